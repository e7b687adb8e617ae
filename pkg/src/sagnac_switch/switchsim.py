"""Quantum-SWITCH evolution and a physical Sagnac-loop count simulator.

The ideal switch puts a photon through two polarization gadgets in a
superposition of the two traversal orders; after the closing beamsplitter
the photon exits the "plus" port with probability |{U,V} psi|^2 / 4 and
the "minus" port with probability |[U,V] psi|^2 / 4.

:func:`simulate_counts` models the real loop: a tunable directional
coupler with an adjustable splitting ratio, the two synthesized gadgets
rebuilt with Gaussian orientation jitter on every motorized waveplate
(one draw per run - both propagation directions see the same plates),
interference-visibility damping of the coherent cross term, circulator
loss on the port that exits through the input fiber, and
polarization-resolved Poisson counting with per-detector efficiencies.

Randomness is counter-based (Philox) with one independent stream per
(seed, setting, run), so runs are reproducible and order-independent.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import IO, Iterable, Sequence

import numpy as np

from . import _kernels
from .elements import BACKWARD, FORWARD
from .gadget import GadgetAngles, reciprocal_gadget_sequence, synthesize
from .gates import PairClass, classify, gate
from .su2 import KET_PLUS, anticommutator, commutator

PORTS = ("plus", "minus")
POLS = ("H", "V")

COUNTS_CSV_COLUMNS = ("run", "i", "j", "class",
                      "n_plus_H", "n_plus_V", "n_minus_H", "n_minus_V")


class NoiseConfigError(ValueError):
    """Raised for an invalid noise-model configuration."""


class FitError(ValueError):
    """Raised when the efficiency fit is degenerate."""


def _check_state(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (2,) or abs(np.linalg.norm(psi) - 1.0) > 1e-9:
        raise ValueError("target state must be a normalized 2-vector")
    return psi


def ideal_output(u: np.ndarray, v: np.ndarray, psi: np.ndarray) -> np.ndarray:
    """Joint target (x) control state after the switch, control measured
    in the +/- basis: {U,V} psi/2 on |0> and [U,V] psi/2 on |1>."""
    psi = _check_state(psi)
    ket0 = np.array([1, 0], dtype=complex)
    ket1 = np.array([0, 1], dtype=complex)
    return 0.5 * (np.kron(anticommutator(u, v) @ psi, ket0)
                  + np.kron(commutator(u, v) @ psi, ket1))


def port_probabilities(u: np.ndarray, v: np.ndarray,
                       psi: np.ndarray) -> tuple[float, float]:
    """(p_plus, p_minus): exit probabilities of the two interferometer ports."""
    psi = _check_state(psi)
    p_plus = float(np.linalg.norm(anticommutator(u, v) @ psi) ** 2) / 4.0
    p_minus = float(np.linalg.norm(commutator(u, v) @ psi) ** 2) / 4.0
    return p_plus, p_minus


@dataclass(frozen=True, eq=False)
class SwitchSetting:
    """One experiment setting: gate indices for the two gadgets and the
    target polarization injected into the loop."""

    u_index: int
    v_index: int
    target_state: np.ndarray = field(default_factory=lambda: KET_PLUS)

    def __post_init__(self) -> None:
        gate(self.u_index)
        gate(self.v_index)
        object.__setattr__(self, "target_state", _check_state(self.target_state))

    @property
    def pair_class(self) -> PairClass:
        return classify(self.u_index, self.v_index)


def _default_efficiency() -> dict[str, dict[str, float]]:
    return {"plus": {"H": 1.0, "V": 1.0}, "minus": {"H": 1.0, "V": 1.0}}


@dataclass(frozen=True)
class NoiseModel:
    """Imperfection parameters of the Sagnac switch.

    Angles in radians, loss in dB per circulator pass, rate in counts per
    second, time in seconds.  ``detector_efficiency[port][pol]`` with
    port in {plus, minus} and pol in {H, V}.
    """

    waveplate_angle_jitter_sigma: float = 0.0
    tdc_splitting: float = 0.5
    interferometric_visibility: float = 1.0
    circulator_loss_db_per_pass: float = 0.0
    detector_efficiency: dict = field(default_factory=_default_efficiency)
    mean_photon_rate: float = 1e4
    integration_time: float = 60.0
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.waveplate_angle_jitter_sigma < 0:
            raise NoiseConfigError("waveplate_angle_jitter_sigma must be >= 0")
        for name in ("tdc_splitting", "interferometric_visibility"):
            x = getattr(self, name)
            if not 0.0 <= x <= 1.0:
                raise NoiseConfigError(f"{name} must lie in [0, 1], got {x}")
        if self.circulator_loss_db_per_pass < 0:
            raise NoiseConfigError("circulator_loss_db_per_pass must be >= 0")
        if self.mean_photon_rate < 0 or self.integration_time < 0:
            raise NoiseConfigError("rate and integration time must be >= 0")
        if not isinstance(self.rng_seed, int) or self.rng_seed < 0:
            raise NoiseConfigError("rng_seed must be a non-negative integer")
        eff = self.detector_efficiency
        try:
            for port in PORTS:
                for pol in POLS:
                    e = eff[port][pol]
                    if not 0.0 <= e <= 1.0:
                        raise NoiseConfigError(
                            f"detector_efficiency[{port}][{pol}] must lie in "
                            f"[0, 1], got {e}")
        except (KeyError, TypeError):
            raise NoiseConfigError(
                "detector_efficiency must provide [plus|minus][H|V] entries"
            ) from None

    def efficiency(self, port: str, pol: str) -> float:
        return float(self.detector_efficiency[port][pol])

    @staticmethod
    def from_toml(path) -> "NoiseModel":
        try:
            import tomllib
        except ModuleNotFoundError:
            import tomli as tomllib
        with open(path, "rb") as fh:
            try:
                data = tomllib.load(fh)
            except tomllib.TOMLDecodeError as exc:
                raise NoiseConfigError(f"bad TOML in {path}: {exc}") from None
        known = set(NoiseModel.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise NoiseConfigError(f"unknown noise-model keys: {sorted(unknown)}")
        return NoiseModel(**data)

    def toml_items(self) -> list[tuple[str, object]]:
        """Flat (key, value) pairs in field order, for config echoing."""
        return [(name, getattr(self, name))
                for name in self.__dataclass_fields__]


def default_calibrated_model(seed: int = 0) -> NoiseModel:
    """Default noise model at experiment-like scales.

    Detector efficiencies and the jitter width are placeholders at
    plausible magnitudes, not measured values.
    """
    return NoiseModel(
        waveplate_angle_jitter_sigma=math.radians(0.1),
        tdc_splitting=0.5,
        interferometric_visibility=0.9995,
        circulator_loss_db_per_pass=1.0,
        detector_efficiency={"plus": {"H": 0.95, "V": 0.90},
                             "minus": {"H": 0.90, "V": 0.95}},
        mean_photon_rate=1e4,
        integration_time=60.0,
        rng_seed=seed,
    )


@dataclass(frozen=True)
class CountsRecord:
    """Polarization-resolved photon counts of one (setting, run)."""

    run: int
    u_index: int
    v_index: int
    pair_class: PairClass
    n_plus_h: float
    n_plus_v: float
    n_minus_h: float
    n_minus_v: float

    @property
    def n_plus(self) -> float:
        return self.n_plus_h + self.n_plus_v

    @property
    def n_minus(self) -> float:
        return self.n_minus_h + self.n_minus_v

    @property
    def total(self) -> float:
        return self.n_plus + self.n_minus

    def raw_p_plus(self) -> float:
        if self.total <= 0:
            raise FitError("record has no counts")
        return self.n_plus / self.total


@lru_cache(maxsize=None)
def _gadget_train(gate_index: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(kinds, base angles, waveplate mask) of the synthesized gadget train."""
    angles: GadgetAngles = synthesize(gate(gate_index))
    seq = reciprocal_gadget_sequence(angles)
    kinds, base = _kernels.as_arrays(
        [0 if e.kind == "QWP" else 1 if e.kind == "HWP" else 2 for e in seq],
        [e.angle for e in seq])
    mask = kinds != _kernels.KIND_FARADAY
    base.flags.writeable = False
    kinds.flags.writeable = False
    return kinds, base, mask


def _stream(seed: int, setting_id: int, run: int) -> np.random.Generator:
    key = np.array([seed, (setting_id << 32) + run], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _jittered_matrices(gate_index: int, sigma: float,
                       rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Forward and backward gadget matrices with one shared jitter draw."""
    kinds, base, mask = _gadget_train(gate_index)
    angles = base.copy()
    if sigma > 0:
        angles[mask] += rng.normal(0.0, sigma, size=int(mask.sum()))
    fw = _kernels.train_matrix(kinds, angles, False)
    bw = _kernels.train_matrix(kinds, angles, True)
    return fw, bw


def _port_intensities(m0: np.ndarray, m1: np.ndarray, psi: np.ndarray,
                      splitting: float, visibility: float) -> np.ndarray:
    """Per-(port, pol) optical intensities; shape (2, 2), rows plus/minus."""
    a = m0 @ psi
    b = m1 @ psi
    t2 = 1.0 - splitting
    r2 = splitting
    cross = np.real(a * np.conj(b))
    plus = t2 * r2 * (np.abs(a) ** 2 + np.abs(b) ** 2 + 2.0 * visibility * cross)
    minus = (t2 ** 2 * np.abs(a) ** 2 + r2 ** 2 * np.abs(b) ** 2
             - 2.0 * visibility * t2 * r2 * cross)
    # perfect destructive interference can round to -1e-18
    return np.maximum(np.stack([plus, minus]), 0.0)


def _mean_counts(intensities: np.ndarray, noise: NoiseModel) -> np.ndarray:
    passes = {"plus": 2, "minus": 1}  # the plus port exits through the circulator
    scale = noise.mean_photon_rate * noise.integration_time
    mu = np.empty((2, 2))
    for pi, port in enumerate(PORTS):
        loss = 10.0 ** (-noise.circulator_loss_db_per_pass * passes[port] / 10.0)
        for qi, pol in enumerate(POLS):
            mu[pi, qi] = (scale * intensities[pi, qi] * loss
                          * noise.efficiency(port, pol))
    return mu


def simulate_counts(setting: SwitchSetting, noise: NoiseModel,
                    run: int = 0, exact: bool = False) -> CountsRecord:
    """Simulate one (setting, run) of the switch experiment.

    ``exact=True`` bypasses Poisson sampling and records the expected
    counts, separating numerical from statistical error in tests.
    """
    if not isinstance(noise, NoiseModel):
        raise NoiseConfigError("noise must be a NoiseModel")
    setting_id = setting.u_index * 10 + setting.v_index
    rng = _stream(noise.rng_seed, setting_id, run)

    sigma = noise.waveplate_angle_jitter_sigma
    u_fw, u_bw = _jittered_matrices(setting.u_index, sigma, rng)
    v_fw, v_bw = _jittered_matrices(setting.v_index, sigma, rng)
    m0 = u_fw @ v_fw   # V-gadget first, then U-gadget
    m1 = v_bw @ u_bw   # opposite traversal order, counter-propagating

    intensities = _port_intensities(m0, m1, setting.target_state,
                                    noise.tdc_splitting,
                                    noise.interferometric_visibility)
    mu = _mean_counts(intensities, noise)
    counts = mu if exact else rng.poisson(mu).astype(float)
    return CountsRecord(
        run=run,
        u_index=setting.u_index,
        v_index=setting.v_index,
        pair_class=setting.pair_class,
        n_plus_h=float(counts[0, 0]),
        n_plus_v=float(counts[0, 1]),
        n_minus_h=float(counts[1, 0]),
        n_minus_v=float(counts[1, 1]),
    )


def expected_port_probabilities(setting: SwitchSetting, noise: NoiseModel,
                                n_samples: int = 1,
                                rng: np.random.Generator | None = None
                                ) -> tuple[float, float]:
    """Optical port probabilities averaged over waveplate jitter.

    Ignores detection efficiency and loss; with ``n_samples`` jitter
    draws this is the jitter-averaged analogue of
    :func:`port_probabilities`.  Uses the batched train kernels.
    """
    if rng is None:
        rng = _stream(noise.rng_seed, setting.u_index * 10 + setting.v_index, 0)
    sigma = noise.waveplate_angle_jitter_sigma

    mats = {}
    for role, idx in (("u", setting.u_index), ("v", setting.v_index)):
        kinds, base, mask = _gadget_train(idx)
        angles = np.tile(base, (n_samples, 1))
        if sigma > 0:
            angles[:, mask] += rng.normal(0.0, sigma, size=(n_samples, int(mask.sum())))
        mats[role + "_fw"] = _kernels.train_matrices_batch(kinds, angles, False)
        mats[role + "_bw"] = _kernels.train_matrices_batch(kinds, angles, True)

    m0 = mats["u_fw"] @ mats["v_fw"]
    m1 = mats["v_bw"] @ mats["u_bw"]
    psi = setting.target_state
    a = m0 @ psi
    b = m1 @ psi
    t2 = 1.0 - noise.tdc_splitting
    r2 = noise.tdc_splitting
    cross = np.real(a * np.conj(b)).sum(axis=1)
    na = (np.abs(a) ** 2).sum(axis=1)
    nb = (np.abs(b) ** 2).sum(axis=1)
    v = noise.interferometric_visibility
    p_plus = t2 * r2 * (na + nb + 2.0 * v * cross)
    p_minus = t2 ** 2 * na + r2 ** 2 * nb - 2.0 * v * t2 * r2 * cross
    return float(p_plus.mean()), float(p_minus.mean())


@dataclass(frozen=True)
class EfficiencyCorrection:
    """Result of the relative-port-efficiency fit and correction."""

    relative_efficiency: float   # eta_plus / eta_minus
    slope: float
    intercept: float
    corrected_p_plus: tuple[float, ...]


def efficiency_correction(records: Sequence[CountsRecord]) -> EfficiencyCorrection:
    """Fit total counts against the raw plus-port fraction and correct.

    Photon number is conserved across the two ports, so the total
    detected counts of a setting fall on a line in its plus-port
    fraction; the line's endpoints give the relative port efficiency
    eta_plus/eta_minus, and each record's corrected plus probability is
    (n_plus/eta) / (n_plus/eta + n_minus).
    """
    if len(records) < 2:
        raise FitError("need at least two records to fit port efficiencies")
    frac = np.array([r.raw_p_plus() for r in records])
    total = np.array([r.total for r in records])
    if frac.max() - frac.min() < 1e-6:
        raise FitError("all records have the same plus-port fraction; "
                       "the efficiency fit is degenerate")
    slope, intercept = np.polyfit(frac, total, 1)
    if intercept <= 0 or intercept + slope <= 0:
        raise FitError("efficiency fit produced a non-positive port rate")
    rel = (intercept + slope) / intercept
    corrected = tuple(
        (r.n_plus / rel) / (r.n_plus / rel + r.n_minus) for r in records)
    return EfficiencyCorrection(relative_efficiency=float(rel),
                                slope=float(slope), intercept=float(intercept),
                                corrected_p_plus=corrected)


def success_probability_from_p_plus(record: CountsRecord, p_plus: float) -> float:
    """Class-correct success probability given a plus-port probability."""
    if record.pair_class is PairClass.COMMUTE:
        return p_plus
    if record.pair_class is PairClass.ANTICOMMUTE:
        return 1.0 - p_plus
    raise ValueError("success probability is undefined for a 'neither' pair")


def write_counts_csv(records: Iterable[CountsRecord], fh: IO[str]) -> None:
    """Emit records in the counts CSV schema (integer counts)."""
    writer = csv.writer(fh)
    writer.writerow(COUNTS_CSV_COLUMNS)
    for r in records:
        writer.writerow([r.run, r.u_index, r.v_index, r.pair_class.value,
                         int(round(r.n_plus_h)), int(round(r.n_plus_v)),
                         int(round(r.n_minus_h)), int(round(r.n_minus_v))])
