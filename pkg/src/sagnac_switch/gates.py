"""The ten-element discrimination gate set and its pair classification.

The set contains the identity, the three Pauli operators and the six
normalized two-Pauli sums; all members are Hermitian and unitary.  Any
ordered pair either commutes, anti-commutes, or does neither: 28 + 24 of
the 100 pairs fall in the first two classes.
"""

from __future__ import annotations

import enum
import math

import numpy as np

from .su2 import ID2, PAULI_X, PAULI_Y, PAULI_Z, anticommutator, commutator

_SQ2 = math.sqrt(2.0)

GATE_NAMES = ("I", "X", "Y", "Z", "X+Y", "X-Y", "X+Z", "X-Z", "Y+Z", "Y-Z")

_GATES = (
    ID2,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    (PAULI_X + PAULI_Y) / _SQ2,
    (PAULI_X - PAULI_Y) / _SQ2,
    (PAULI_X + PAULI_Z) / _SQ2,
    (PAULI_X - PAULI_Z) / _SQ2,
    (PAULI_Y + PAULI_Z) / _SQ2,
    (PAULI_Y - PAULI_Z) / _SQ2,
)

for _g in _GATES:
    _g.flags.writeable = False

N_GATES = len(_GATES)


class PairClass(enum.Enum):
    COMMUTE = "commute"
    ANTICOMMUTE = "anticommute"
    NEITHER = "neither"


def gate(i: int) -> np.ndarray:
    """Gate number i (0..9) of the discrimination set."""
    if not 0 <= i < N_GATES:
        raise IndexError(f"gate index must be 0..{N_GATES - 1}, got {i}")
    return _GATES[i]


def gate_set() -> tuple[np.ndarray, ...]:
    return _GATES


def _operator_norm(m: np.ndarray) -> float:
    return float(np.linalg.norm(m, ord=2))


def classify(i: int, j: int, tol: float = 1e-10) -> PairClass:
    """Commutation class of the ordered gate pair (i, j)."""
    u, v = gate(i), gate(j)
    if _operator_norm(commutator(u, v)) < tol:
        return PairClass.COMMUTE
    if _operator_norm(anticommutator(u, v)) < tol:
        return PairClass.ANTICOMMUTE
    return PairClass.NEITHER


def enumerate_pairs() -> tuple[list[tuple[int, int]], list[tuple[int, int]]]:
    """All (commuting, anticommuting) index pairs, lexicographically sorted."""
    commuting = []
    anticommuting = []
    for i in range(N_GATES):
        for j in range(N_GATES):
            cls = classify(i, j)
            if cls is PairClass.COMMUTE:
                commuting.append((i, j))
            elif cls is PairClass.ANTICOMMUTE:
                anticommuting.append((i, j))
    return commuting, anticommuting
