"""Command-line front end.

Subcommands: ``synth`` (waveplate angles for a target unitary),
``verify`` (check an element train), ``discriminate`` (run the 52-pair
task, ideal or simulated), ``witness`` (operator-level witness value),
``tomo`` (gadget characterization over random targets).

Angles cross the boundary in degrees; everything internal is radians.
File-producing commands write one output directory per invocation
containing ``config-echo.toml``, the CSV tables and ``summary.json``;
identical configuration and seed reproduce the files byte for byte.
Exit codes: 0 success, 2 usage, 3 configuration, 4 internal consistency.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .discrimination import (CAUSAL_BOUND_MEAN, CAUSAL_BOUND_MIN,
                             WitnessConstructionError, build_switch_process_matrix,
                             build_witness, fixed_order_source, ideal_source,
                             probability_from_process, success_probability,
                             task_report, witness_expectation)
from .elements import is_reciprocal, parse_sequence, sequence_matrix
from .gadget import SynthesisError, synthesize, verify_gadget, \
    reciprocal_gadget_sequence
from .gates import GATE_NAMES, N_GATES, classify, enumerate_pairs, gate
from .su2 import AxisAngle, is_unitary
from .switchsim import (FitError, NoiseConfigError, NoiseModel, SwitchSetting,
                        efficiency_correction, simulate_counts,
                        success_probability_from_p_plus, write_counts_csv)
from .tomography import characterize_ensemble, histogram
from .elements import format_sequence

SEED_ENV = "SWITCH_SEED"

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_INTERNAL = 4


class ConfigError(Exception):
    """Configuration-level failure (exit code 3)."""


# ---------------------------------------------------------------------------
# input parsing
# ---------------------------------------------------------------------------

def _parse_complex(token: str) -> complex:
    token = token.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(token)
    except ValueError:
        raise ConfigError(f"cannot parse complex entry {token!r}") from None


def parse_matrix(text: str) -> np.ndarray:
    rows = text.strip().split(";")
    if len(rows) != 2:
        raise ConfigError("matrix must have two ';'-separated rows")
    out = np.empty((2, 2), dtype=complex)
    for r, row in enumerate(rows):
        entries = row.split(",")
        if len(entries) != 2:
            raise ConfigError("each matrix row must have two ','-separated entries")
        for c, entry in enumerate(entries):
            out[r, c] = _parse_complex(entry)
    return out


def target_from_args(args: argparse.Namespace,
                     parser: argparse.ArgumentParser) -> tuple[np.ndarray, str]:
    """(unitary, label) from --axis/--angle, --matrix or --gate."""
    given = [name for name in ("axis", "matrix", "gate")
             if getattr(args, name, None) is not None]
    if len(given) != 1:
        parser.error("specify exactly one of --axis, --matrix, --gate")
    if args.axis is not None:
        if args.angle is None:
            parser.error("--axis requires --angle")
        rot = AxisAngle(axis={"x": (1, 0, 0), "y": (0, 1, 0),
                              "z": (0, 0, 1)}[args.axis],
                        angle=math.radians(args.angle))
        return rot.matrix(), f"R_{args.axis}({args.angle} deg)"
    if args.matrix is not None:
        u = parse_matrix(args.matrix)
        if not is_unitary(u):
            raise ConfigError("supplied matrix is not unitary")
        return u, "matrix"
    if not 0 <= args.gate < N_GATES:
        raise ConfigError(f"--gate must be 0..{N_GATES - 1}")
    return gate(args.gate), f"gate {args.gate} ({GATE_NAMES[args.gate]})"


def resolve_seed(args: argparse.Namespace) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"{SEED_ENV}={env!r} is not an integer") from None
    raise ConfigError(f"a seed is required: pass --seed or set {SEED_ENV}")


def load_noise(path: str) -> NoiseModel:
    try:
        return NoiseModel.from_toml(path)
    except FileNotFoundError:
        raise ConfigError(f"noise config not found: {path}") from None
    except NoiseConfigError as exc:
        raise ConfigError(str(exc)) from None


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def _toml_scalar(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return repr(value)
    return json.dumps(str(value))


def write_toml_echo(path: Path, flat: dict, tables: dict | None = None) -> None:
    """Write a flat key/value mapping (plus optional nested tables) as TOML."""
    lines = [f"{key} = {_toml_scalar(value)}" for key, value in flat.items()]
    for table, sub in (tables or {}).items():
        for name, inner in sub.items():
            lines.append("")
            lines.append(f"[{table}.{name}]")
            lines.extend(f"{k} = {_toml_scalar(v)}" for k, v in inner.items())
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def echo_config(out: Path, command: str, params: dict,
                noise: NoiseModel | None = None) -> None:
    flat = {"command": command, "version": __version__, **params}
    tables = None
    if noise is not None:
        items = dict(noise.toml_items())
        tables = {"detector_efficiency": items.pop("detector_efficiency")}
        flat.update(items)
    write_toml_echo(out / "config-echo.toml", flat, tables)


def write_summary(out: Path, summary: dict) -> None:
    with open(out / "summary.json", "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")


def make_out_dir(args: argparse.Namespace, command: str) -> Path:
    out = Path(args.out) if args.out else Path(f"out-{command}")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _fmt_deg(rad: float) -> str:
    return f"{math.degrees(rad):.6f}"


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_synth(args: argparse.Namespace,
              parser: argparse.ArgumentParser) -> int:
    target, label = target_from_args(args, parser)
    try:
        angles = synthesize(target)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    report = verify_gadget(angles, target)
    print(f"target: {label}")
    print(f"full form (deg):    theta={_fmt_deg(angles.theta)}  "
          f"phi={_fmt_deg(angles.phi)}  alpha={_fmt_deg(angles.alpha)}")
    print(f"reduced form (deg): theta1={_fmt_deg(angles.theta1)}  "
          f"phi1={_fmt_deg(angles.phi1)}  alpha={_fmt_deg(angles.alpha)}  "
          f"phi2={_fmt_deg(angles.phi2)}  theta2={_fmt_deg(angles.theta2)}")
    print(f"train: {format_sequence(reciprocal_gadget_sequence(angles))}")
    print(f"verification: fw={report.fw_fidelity:.12f}  "
          f"bw={report.bw_fidelity:.12f}  "
          f"reciprocity={report.reciprocity_fidelity:.12f}")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace,
               parser: argparse.ArgumentParser) -> int:
    try:
        seq = parse_sequence(args.train)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    fw = sequence_matrix(seq, "forward")
    bw = sequence_matrix(seq, "backward")
    rec = abs(np.trace(fw.conj().T @ bw) / 2.0) ** 2
    reciprocal = is_reciprocal(seq, tol=args.tol, mode=args.mode)
    print(f"elements: {len(seq)}")
    print(f"reciprocity fidelity: {rec:.12f}")
    print(f"reciprocal ({args.mode}, tol={args.tol:g}): "
          f"{'yes' if reciprocal else 'no'}")
    if any(getattr(args, name, None) is not None
           for name in ("axis", "matrix", "gate")):
        target, label = target_from_args(args, parser)

        def fid(m):
            return abs(np.trace(m.conj().T @ target) / 2.0) ** 2

        print(f"target: {label}")
        print(f"fw fidelity: {fid(fw):.12f}")
        print(f"bw fidelity: {fid(bw):.12f}")
    return EXIT_OK


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def cmd_discriminate(args: argparse.Namespace,
                     parser: argparse.ArgumentParser) -> int:
    out = make_out_dir(args, "discriminate")
    commuting, anticommuting = enumerate_pairs()
    pairs = sorted(commuting + anticommuting)

    if args.ideal:
        report = task_report(ideal_source())
        rows = [(0, i, j, classify(i, j).value, report.per_pair[(i, j)])
                for (i, j) in pairs]
        summary = {
            "mode": "ideal",
            "runs": 1,
            "min": report.min_success,
            "mean": report.mean_success,
            "bound_min": CAUSAL_BOUND_MIN,
            "bound_mean": CAUSAL_BOUND_MEAN,
            "witness_value": report.mean_success,
        }
        echo_config(out, "discriminate", {"mode": "ideal"})
    else:
        seed = resolve_seed(args)
        noise = replace(load_noise(args.noise), rng_seed=seed)
        records = [simulate_counts(SwitchSetting(i, j), noise, run=run)
                   for run in range(args.runs) for (i, j) in pairs]
        with open(out / "counts.csv", "w", newline="", encoding="utf-8") as fh:
            write_counts_csv(records, fh)
        try:
            correction = efficiency_correction(records)
        except FitError as exc:
            raise ConfigError(f"efficiency correction failed: {exc}") from None
        rows = []
        p_values = []
        for record, p_plus in zip(records, correction.corrected_p_plus):
            p_s = success_probability_from_p_plus(record, p_plus)
            p_values.append(p_s)
            rows.append((record.run, record.u_index, record.v_index,
                         record.pair_class.value, p_s))
        summary = {
            "mode": "noise",
            "runs": args.runs,
            "seed": seed,
            "min": min(p_values),
            "mean": sum(p_values) / len(p_values),
            "bound_min": CAUSAL_BOUND_MIN,
            "bound_mean": CAUSAL_BOUND_MEAN,
            "witness_value": sum(p_values) / len(p_values),
            "relative_port_efficiency": correction.relative_efficiency,
        }
        echo_config(out, "discriminate",
                    {"mode": "noise", "runs": args.runs, "seed": seed,
                     "noise_file": args.noise}, noise)

    with open(out / "success.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["run", "i", "j", "class", "p_s"])
        for run, i, j, cls, p_s in rows:
            writer.writerow([run, i, j, cls, f"{p_s:.9f}"])
    # per-pair averages over runs
    with open(out / "pairs.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["i", "j", "class", "p_s"])
        for i, j in pairs:
            values = [p for run, ri, rj, cls, p in rows if (ri, rj) == (i, j)]
            writer.writerow([i, j, classify(i, j).value,
                             f"{sum(values) / len(values):.9f}"])
    write_summary(out, summary)

    print(f"pairs: {len(pairs)}   rows: {len(rows)}")
    print(f"min p_s:  {summary['min']:.9f}   (causal bound {CAUSAL_BOUND_MIN})")
    print(f"mean p_s: {summary['mean']:.9f}   (causal bound {CAUSAL_BOUND_MEAN})")
    print(f"outputs in {out}")
    return EXIT_OK


def cmd_witness(args: argparse.Namespace,
                parser: argparse.ArgumentParser) -> int:
    out = make_out_dir(args, "witness")
    process = build_switch_process_matrix()
    witness = build_witness()
    value = witness_expectation(witness, process)

    rng = np.random.default_rng(0)
    from .tomography import random_unitary
    from .switchsim import port_probabilities
    residual = 0.0
    for _ in range(args.check_pairs):
        u, v = random_unitary(rng), random_unitary(rng)
        p_plus, p_minus = port_probabilities(u, v, process.target_state)
        residual = max(
            residual,
            abs(probability_from_process(process, u, v, "plus") - p_plus),
            abs(probability_from_process(process, u, v, "minus") - p_minus))

    baseline = task_report(fixed_order_source())
    print(f"tr[S W_switch] = {value:.9f}")
    print(f"causal bounds: mean <= {CAUSAL_BOUND_MEAN}, min <= {CAUSAL_BOUND_MIN}")
    print(f"oracle-match residual over {args.check_pairs} random pairs: "
          f"{residual:.3e}")
    print(f"fixed-order baseline: mean = {baseline.mean_success:.9f} "
          f"<= {CAUSAL_BOUND_MEAN} "
          f"({'consistent' if baseline.mean_success <= CAUSAL_BOUND_MEAN else 'VIOLATION'})")

    echo_config(out, "witness", {"check_pairs": args.check_pairs})
    write_summary(out, {
        "witness_value": value,
        "bound_mean": CAUSAL_BOUND_MEAN,
        "bound_min": CAUSAL_BOUND_MIN,
        "max_probability_residual": residual,
        "fixed_order_mean": baseline.mean_success,
        "n_terms": witness.n_terms,
        "cj_convention": process.cj_convention,
    })
    return EXIT_OK


def cmd_tomo(args: argparse.Namespace,
             parser: argparse.ArgumentParser) -> int:
    out = make_out_dir(args, "tomo")
    seed = resolve_seed(args)
    shots = None if args.shots == 0 else args.shots
    sigma = math.radians(args.jitter_deg)
    result = characterize_ensemble(args.unitaries, jitter_sigma=sigma,
                                   shots=shots, seed=seed)

    with open(out / "fidelity.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "direction", "fidelity"])
        for row in result.rows:
            writer.writerow([row.index, "fw", f"{row.fw_fidelity:.9f}"])
            writer.writerow([row.index, "bw", f"{row.bw_fidelity:.9f}"])
    with open(out / "reciprocity.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "reciprocity"])
        for row in result.rows:
            writer.writerow([row.index, f"{row.reciprocity:.9f}"])
    with open(out / "histogram.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["quantity", "bin_left", "count"])
        fids = np.concatenate([result.fidelities("fw"), result.fidelities("bw")])
        for left, count in histogram(fids):
            writer.writerow(["fidelity", f"{left:.3f}", count])
        for left, count in histogram(result.reciprocities()):
            writer.writerow(["reciprocity", f"{left:.3f}", count])

    summary = result.summary()
    summary.update({"unitaries": args.unitaries, "shots": args.shots,
                    "jitter_deg": args.jitter_deg, "seed": seed})
    echo_config(out, "tomo", {"unitaries": args.unitaries, "shots": args.shots,
                              "jitter_deg": args.jitter_deg, "seed": seed})
    write_summary(out, summary)
    print(f"characterized {args.unitaries} targets "
          f"(shots={'exact' if shots is None else shots}, "
          f"jitter={args.jitter_deg} deg)")
    print(f"mean fidelity: {summary['mean_fidelity']:.6f}   "
          f"mean reciprocity: {summary['mean_reciprocity']:.6f}")
    print(f"outputs in {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_target_options(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--axis", choices=("x", "y", "z"),
                     help="rotation axis of the target unitary")
    sub.add_argument("--angle", type=float,
                     help="rotation angle in degrees (with --axis)")
    sub.add_argument("--matrix",
                     help="target as 'a,b;c,d' with complex entries like 0.5+0.5i")
    sub.add_argument("--gate", type=int,
                     help=f"index 0..{N_GATES - 1} into the discrimination gate set")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sagnac-switch",
        description="Reciprocal polarization gadgets and a Sagnac-loop "
                    "quantum-SWITCH simulator")
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    synth = subs.add_parser("synth", help="synthesize waveplate angles")
    _add_target_options(synth)
    synth.set_defaults(func=cmd_synth)

    verify = subs.add_parser("verify", help="check an element train")
    verify.add_argument("--train", required=True,
                        help="element train, e.g. 'QWP:45 HWP:22.5 F:+'")
    verify.add_argument("--tol", type=float, default=1e-10)
    verify.add_argument("--mode", choices=("exact", "up_to_phase"),
                        default="up_to_phase")
    _add_target_options(verify)
    verify.set_defaults(func=cmd_verify)

    disc = subs.add_parser("discriminate",
                           help="run the 52-pair discrimination task")
    mode = disc.add_mutually_exclusive_group(required=True)
    mode.add_argument("--ideal", action="store_true",
                      help="exact switch probabilities, no simulation")
    mode.add_argument("--noise", metavar="TOML",
                      help="noise-model TOML file; simulate counts")
    disc.add_argument("--runs", type=_positive_int, default=6)
    disc.add_argument("--seed", type=int)
    disc.add_argument("--out", help="output directory (default out-discriminate)")
    disc.set_defaults(func=cmd_discriminate)

    wit = subs.add_parser("witness", help="operator-level witness evaluation")
    wit.add_argument("--check-pairs", type=_positive_int, default=100,
                     help="random pairs for the oracle-match residual")
    wit.add_argument("--out", help="output directory (default out-witness)")
    wit.set_defaults(func=cmd_witness)

    tomo = subs.add_parser("tomo", help="characterize gadgets on random targets")
    tomo.add_argument("--unitaries", type=_positive_int, default=100)
    tomo.add_argument("--shots", type=int, default=10_000,
                      help="tomography shots per basis (0 = exact expectations)")
    tomo.add_argument("--jitter-deg", type=float, default=0.0,
                      help="waveplate jitter standard deviation in degrees")
    tomo.add_argument("--seed", type=int)
    tomo.add_argument("--out", help="output directory (default out-tomo)")
    tomo.set_defaults(func=cmd_tomo)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SynthesisError, WitnessConstructionError) as exc:
        print(f"internal consistency failure: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
