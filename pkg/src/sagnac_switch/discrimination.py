"""Channel-discrimination scoring and the causal witness.

A pair of gates drawn from the commuting or anti-commuting subsets of
the gate set can be classified with a single use of each gate when the
uses happen in a coherent superposition of both orders; any strategy
with a definite order is bounded away from certainty.  The bounds for
this gate set (minimum 0.841, uniform average 0.904) were certified
numerically by semidefinite programming and are imported as constants.

The same task is expressed here operator-style: a witness built from
Choi projectors of the gate pairs and port projectors of the control,
evaluated against a 32-dimensional process matrix.  The switch's process
matrix is constructed from its two branch vectors with the target future
traced out; its contract (reproducing the circuit-level probabilities
for arbitrary unitary insertions) is self-tested at build time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .gates import N_GATES, PairClass, classify, enumerate_pairs, gate
from .su2 import KET_MINUS, KET_PLUS
from .switchsim import port_probabilities

# SDP-certified ceilings for causally ordered strategies on this gate set.
CAUSAL_BOUND_MIN = 0.841
CAUSAL_BOUND_MEAN = 0.904

CJ_CONVENTION = "|U>> = (I (x) U) sum_k |k,k>, factor order in (x) out"

Source = Callable[[int, int], tuple[float, float]]


class WitnessConstructionError(RuntimeError):
    """Raised when the process matrix fails its build-time self-test."""


def double_ket(u: np.ndarray) -> np.ndarray:
    """Choi vector of a 2x2 operator: sum_k |k> (x) u|k>, a 4-vector."""
    u = np.asarray(u, dtype=complex)
    out = np.zeros(4, dtype=complex)
    for k in range(2):
        e = np.zeros(2, dtype=complex)
        e[k] = 1.0
        out += np.kron(e, u @ e)
    return out


def success_probability(i: int, j: int, source: Source) -> float:
    """Probability that the port outcome names the correct pair class.

    ``source(i, j)`` provides (p_plus, p_minus); the pair must commute or
    anti-commute.  Port masses are renormalized, so sources backed by
    corrected counts need not sum exactly to one.
    """
    cls = classify(i, j)
    if cls is PairClass.NEITHER:
        raise ValueError(f"pair ({i}, {j}) neither commutes nor anti-commutes")
    p_plus, p_minus = source(i, j)
    total = p_plus + p_minus
    if total <= 0:
        raise ValueError(f"source returned no probability mass for ({i}, {j})")
    correct = p_plus if cls is PairClass.COMMUTE else p_minus
    return correct / total


def ideal_source(psi: np.ndarray = KET_PLUS) -> Source:
    """Exact switch port probabilities for target input psi."""
    def src(i: int, j: int) -> tuple[float, float]:
        return port_probabilities(gate(i), gate(j), psi)
    return src


def fixed_order_source(order: str = "AB") -> Source:
    """Definite-order baseline: apply both gates once, always guess
    'commute'.  Scores 1 on commuting pairs and 0 on anti-commuting
    ones, identically for both orders (the guess ignores the output)."""
    if order not in ("AB", "BA"):
        raise ValueError("order must be 'AB' or 'BA'")
    def src(i: int, j: int) -> tuple[float, float]:
        return 1.0, 0.0
    return src


@dataclass(frozen=True)
class TaskReport:
    """Per-pair success probabilities with the causal-bound comparison."""

    per_pair: Mapping[tuple[int, int], float]
    min_success: float
    mean_success: float
    bound_min: float = CAUSAL_BOUND_MIN
    bound_mean: float = CAUSAL_BOUND_MEAN

    @property
    def beats_min_bound(self) -> bool:
        return self.min_success > self.bound_min

    @property
    def beats_mean_bound(self) -> bool:
        return self.mean_success > self.bound_mean


def task_report(source: Source) -> TaskReport:
    """Evaluate a source on all 52 classified pairs."""
    commuting, anticommuting = enumerate_pairs()
    per_pair = {}
    for i, j in commuting + anticommuting:
        per_pair[(i, j)] = success_probability(i, j, source)
    values = np.array(list(per_pair.values()))
    return TaskReport(per_pair=per_pair,
                      min_success=float(values.min()),
                      mean_success=float(values.mean()))


@dataclass(frozen=True, eq=False)
class WitnessOperator:
    """The 32x32 witness: uniform mixture of Choi-pair projectors with the
    class-correct control port, one term per classified pair."""

    matrix: np.ndarray
    n_terms: int


@dataclass(frozen=True, eq=False)
class ProcessMatrix:
    """A PSD operator on A_in (x) A_out (x) B_in (x) B_out (x) C."""

    matrix: np.ndarray
    target_state: np.ndarray
    cj_convention: str = CJ_CONVENTION


def pair_operator(u: np.ndarray, v: np.ndarray, port: str) -> np.ndarray:
    """Rank-1 operator |U>><<U| (x) |V>><<V| (x) |port><port|_C."""
    vec = pair_vector(u, v, port)
    return np.outer(vec, vec.conj())


def pair_vector(u: np.ndarray, v: np.ndarray, port: str) -> np.ndarray:
    if port == "plus":
        c = KET_PLUS
    elif port == "minus":
        c = KET_MINUS
    else:
        raise ValueError(f"port must be 'plus' or 'minus', got {port!r}")
    return np.kron(np.kron(double_ket(u), double_ket(v)), c)


def build_witness() -> WitnessOperator:
    """Assemble the witness from the classified pairs, unit weights."""
    commuting, anticommuting = enumerate_pairs()
    dim = 32
    s = np.zeros((dim, dim), dtype=complex)
    for (pairs, port) in ((commuting, "plus"), (anticommuting, "minus")):
        for i, j in pairs:
            s += pair_operator(gate(i), gate(j), port)
    n = len(commuting) + len(anticommuting)
    return WitnessOperator(matrix=s / n, n_terms=n)


def _branch_vector(psi_conj: np.ndarray, first: str) -> np.ndarray:
    """Process branch vector on A_in,A_out,B_in,B_out,C,F for one order.

    The wire pattern routes the (conjugated) target through the party
    named by ``first``, then the other party, then out to the future
    space F; C carries the order label.
    """
    basis = np.eye(2, dtype=complex)
    ctrl = basis[0] if first == "B" else basis[1]
    vec = np.zeros(64, dtype=complex)
    for m in range(2):
        for n in range(2):
            em, en = basis[m], basis[n]
            if first == "B":   # psi -> B -> A -> F
                parts = (em, en, psi_conj, em, ctrl, en)
            else:              # psi -> A -> B -> F
                parts = (psi_conj, em, em, en, ctrl, en)
            term = parts[0]
            for p in parts[1:]:
                term = np.kron(term, p)
            vec += term
    return vec


def build_switch_process_matrix(psi: np.ndarray = KET_PLUS,
                                self_test_pairs: int = 8) -> ProcessMatrix:
    """Process matrix of the switch for a fixed target input state.

    Built from the two pure branch vectors (target routed A-then-B and
    B-then-A, with the order recorded on C) and the target future traced
    out.  The target amplitudes enter conjugated so that contraction
    with Choi projectors reproduces the circuit probabilities; this is
    verified on random unitary pairs before returning.
    """
    psi = np.asarray(psi, dtype=complex)
    if abs(np.linalg.norm(psi) - 1.0) > 1e-9:
        raise ValueError("target state must be normalized")
    psi_conj = psi.conj()
    w_vec = (_branch_vector(psi_conj, "B")
             + _branch_vector(psi_conj, "A")) / math.sqrt(2.0)
    w_mat = w_vec.reshape(32, 2)           # split off the future space
    w = w_mat @ w_mat.conj().T             # trace it out
    process = ProcessMatrix(matrix=w, target_state=psi)

    rng = np.random.default_rng(20230817)
    worst = 0.0
    for _ in range(self_test_pairs):
        u = _haar_su2(rng)
        v = _haar_su2(rng)
        p_plus, p_minus = port_probabilities(u, v, psi)
        for port, expect in (("plus", p_plus), ("minus", p_minus)):
            got = probability_from_process(process, u, v, port)
            worst = max(worst, abs(got - expect))
    if worst > 1e-9:
        raise WitnessConstructionError(
            f"process matrix violates the circuit contract "
            f"(max probability deviation {worst:.3e})")
    return process


def probability_from_process(process: ProcessMatrix, u: np.ndarray,
                             v: np.ndarray, port: str) -> float:
    """tr[(|U>><<U| (x) |V>><<V| (x) |port><port|) W] via the rank-1 form."""
    g = pair_vector(u, v, port)
    return float(np.real(g.conj() @ process.matrix @ g))


def witness_expectation(witness: WitnessOperator,
                        process: ProcessMatrix) -> float:
    return float(np.real(np.trace(witness.matrix @ process.matrix)))


def _haar_su2(rng: np.random.Generator) -> np.ndarray:
    u = rng.random()
    p1, p2 = rng.uniform(0.0, 2.0 * math.pi, size=2)
    a = math.sqrt(1.0 - u) * np.exp(1j * p1)
    b = math.sqrt(u) * np.exp(1j * p2)
    return np.array([[a, b], [-b.conjugate(), a.conjugate()]])
