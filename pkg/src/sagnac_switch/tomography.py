"""Simulated single-qubit tomography and gadget characterization.

States are reconstructed by linear inversion from Pauli-basis counts,
with eigenvalue clipping to restore positivity (enough at the simulated
noise levels; full maximum-likelihood reconstruction is out of scope).
Gadget quality is summarized the way the hardware is characterized:
each random target is rebuilt per propagation direction with its own
jitter draw (the motors are re-set between direction measurements), the
probe outputs for |H> and |+> are measured tomographically, and

* gate fidelity  = mean fidelity to the ideal probe outputs,
* reciprocity    = mean fidelity between the two directions' outputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from functools import lru_cache

from . import _kernels
from .elements import normalize_direction
from .gadget import GadgetAngles, reciprocal_gadget_sequence, synthesize
from .su2 import (ID2, KET_H, KET_PLUS, PAULI_X, PAULI_Y, PAULI_Z, projector,
                  state_fidelity)

BASES = ("x", "y", "z")
_BASIS_OPS = {"x": PAULI_X, "y": PAULI_Y, "z": PAULI_Z}

PROBE_STATES = (KET_H, KET_PLUS)


def random_unitary(rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed SU(2) matrix (two phases plus an amplitude angle)."""
    u = rng.random()
    p1, p2 = rng.uniform(0.0, 2.0 * math.pi, size=2)
    a = math.sqrt(1.0 - u) * np.exp(1j * p1)
    b = math.sqrt(u) * np.exp(1j * p2)
    return np.array([[a, b], [-b.conjugate(), a.conjugate()]])


def simulate_measurements(state: np.ndarray, shots: int | None,
                          rng: np.random.Generator | None = None
                          ) -> dict[str, tuple[float, float]]:
    """Projective X/Y/Z measurement counts (n_up, n_down) per basis.

    ``shots=None`` returns exact expected fractions (infinite statistics);
    otherwise outcomes are binomial draws of ``shots`` shots per basis.
    """
    state = np.asarray(state, dtype=complex)
    rho = projector(state) if state.ndim == 1 else state
    counts: dict[str, tuple[float, float]] = {}
    for basis in BASES:
        expect = float(np.trace(_BASIS_OPS[basis] @ rho).real)
        p_up = min(max((1.0 + expect) / 2.0, 0.0), 1.0)
        if shots is None:
            counts[basis] = (p_up, 1.0 - p_up)
        else:
            if shots <= 0:
                raise ValueError("shots must be positive")
            if rng is None:
                raise ValueError("finite-shot sampling requires an rng")
            n_up = int(rng.binomial(shots, p_up))
            counts[basis] = (float(n_up), float(shots - n_up))
    return counts


def reconstruct_state(counts: dict[str, tuple[float, float]]) -> np.ndarray:
    """Linear-inversion density matrix from X/Y/Z counts, clipped to PSD."""
    expectations = {}
    for basis in BASES:
        try:
            n_up, n_down = counts[basis]
        except KeyError:
            raise ValueError(f"missing counts for basis {basis!r}") from None
        total = n_up + n_down
        if total <= 0:
            raise ValueError(f"no counts in basis {basis!r}")
        expectations[basis] = (n_up - n_down) / total
    rho = 0.5 * (ID2 + expectations["x"] * PAULI_X
                 + expectations["y"] * PAULI_Y
                 + expectations["z"] * PAULI_Z)
    evals, evecs = np.linalg.eigh(rho)
    evals = np.clip(evals, 0.0, None)
    rho = (evecs * evals) @ evecs.conj().T
    return rho / np.trace(rho).real


def measure_state(state: np.ndarray, shots: int | None,
                  rng: np.random.Generator | None = None) -> np.ndarray:
    """Tomographic estimate of a state: measure then reconstruct."""
    return reconstruct_state(simulate_measurements(state, shots, rng))


@lru_cache(maxsize=256)
def _train_arrays(angles: GadgetAngles) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    seq = reciprocal_gadget_sequence(angles)
    kinds, base = _kernels.as_arrays(
        [0 if e.kind == "QWP" else 1 if e.kind == "HWP" else 2 for e in seq],
        [e.angle for e in seq])
    mask = kinds != _kernels.KIND_FARADAY
    kinds.flags.writeable = False
    base.flags.writeable = False
    return kinds, base, mask


def _gadget_output(angles: GadgetAngles, backward: bool, jitter_sigma: float,
                   rng: np.random.Generator | None) -> np.ndarray:
    """Gadget matrix for one direction with an independent jitter draw."""
    kinds, base, mask = _train_arrays(angles)
    plate_angles = base.copy()
    if jitter_sigma > 0:
        if rng is None:
            raise ValueError("jitter requires an rng")
        plate_angles[mask] += rng.normal(0.0, jitter_sigma, size=int(mask.sum()))
    return _kernels.train_matrix(kinds, plate_angles, backward)


def gate_fidelity(angles: GadgetAngles, direction: str, target: np.ndarray,
                  jitter_sigma: float = 0.0, shots: int | None = None,
                  rng: np.random.Generator | None = None) -> float:
    """Mean fidelity of the measured probe outputs to the ideal ones."""
    backward = normalize_direction(direction) == "backward"
    m = _gadget_output(angles, backward, jitter_sigma, rng)
    fids = []
    for probe in PROBE_STATES:
        rho = measure_state(m @ probe, shots, rng)
        fids.append(state_fidelity(projector(target @ probe), rho))
    return float(np.mean(fids))


def reciprocity(angles: GadgetAngles, jitter_sigma: float = 0.0,
                shots: int | None = None,
                rng: np.random.Generator | None = None) -> float:
    """Mean fidelity between the two directions' measured probe outputs.

    Each direction gets its own jitter draw: the physical plates are
    repositioned between the two measurements.
    """
    m_fw = _gadget_output(angles, False, jitter_sigma, rng)
    m_bw = _gadget_output(angles, True, jitter_sigma, rng)
    fids = []
    for probe in PROBE_STATES:
        rho_fw = measure_state(m_fw @ probe, shots, rng)
        rho_bw = measure_state(m_bw @ probe, shots, rng)
        fids.append(state_fidelity(rho_fw, rho_bw))
    return float(np.mean(fids))


@dataclass(frozen=True)
class CharacterizationRow:
    """Per-target characterization: both direction fidelities + reciprocity."""

    index: int
    fw_fidelity: float
    bw_fidelity: float
    reciprocity: float


@dataclass(frozen=True)
class CharacterizationResult:
    rows: tuple[CharacterizationRow, ...]

    def fidelities(self, direction: str) -> np.ndarray:
        attr = "fw_fidelity" if direction == "fw" else "bw_fidelity"
        return np.array([getattr(r, attr) for r in self.rows])

    def reciprocities(self) -> np.ndarray:
        return np.array([r.reciprocity for r in self.rows])

    def summary(self) -> dict[str, float]:
        fw = self.fidelities("fw")
        bw = self.fidelities("bw")
        rc = self.reciprocities()
        both = np.concatenate([fw, bw])
        # ddof=1: sample standard deviations over the unitary ensemble
        return {
            "mean_fidelity_fw": float(fw.mean()),
            "std_fidelity_fw": float(fw.std(ddof=1)) if fw.size > 1 else 0.0,
            "mean_fidelity_bw": float(bw.mean()),
            "std_fidelity_bw": float(bw.std(ddof=1)) if bw.size > 1 else 0.0,
            "mean_fidelity": float(both.mean()),
            "std_fidelity": float(both.std(ddof=1)) if both.size > 1 else 0.0,
            "mean_reciprocity": float(rc.mean()),
            "std_reciprocity": float(rc.std(ddof=1)) if rc.size > 1 else 0.0,
        }


def characterize_ensemble(n_unitaries: int, jitter_sigma: float = 0.0,
                          shots: int | None = None,
                          seed: int = 0) -> CharacterizationResult:
    """Synthesize and characterize gadgets for Haar-random targets."""
    rng = np.random.default_rng(seed)
    rows = []
    for index in range(n_unitaries):
        target = random_unitary(rng)
        angles = synthesize(target)
        fw = gate_fidelity(angles, "fw", target, jitter_sigma, shots, rng)
        bw = gate_fidelity(angles, "bw", target, jitter_sigma, shots, rng)
        rec = reciprocity(angles, jitter_sigma, shots, rng)
        rows.append(CharacterizationRow(index, fw, bw, rec))
    return CharacterizationResult(rows=tuple(rows))


def histogram(values: np.ndarray, bin_width: float = 0.001
              ) -> list[tuple[float, int]]:
    """(bin_left, count) pairs over occupied bins of the given width."""
    values = np.asarray(values, dtype=float)
    idx = np.floor(values / bin_width).astype(int)
    out = []
    for b in sorted(set(idx.tolist())):
        out.append((b * bin_width, int(np.sum(idx == b))))
    return out
