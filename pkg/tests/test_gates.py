import numpy as np
import pytest

from sagnac_switch.gates import (GATE_NAMES, N_GATES, PairClass, classify,
                                 enumerate_pairs, gate, gate_set)
from sagnac_switch.su2 import ID2

# Explicit anti-commuting index table, used as the ground-truth oracle.
ANTICOMMUTING_TABLE = {
    1: (2, 3, 8, 9),
    2: (1, 3, 6, 7),
    3: (1, 2, 4, 5),
    4: (3, 5),
    5: (3, 4),
    6: (2, 7),
    7: (2, 6),
    8: (1, 9),
    9: (1, 8),
}


def expected_anticommuting():
    return sorted((i, j) for i, js in ANTICOMMUTING_TABLE.items() for j in js)


def expected_commuting():
    return sorted((i, j) for i in range(10) for j in range(10)
                  if i == 0 or j == 0 or i == j)


def test_gate_set_members_hermitian_unitary():
    assert len(gate_set()) == N_GATES == len(GATE_NAMES) == 10
    for g in gate_set():
        assert np.max(np.abs(g - g.conj().T)) < 1e-12
        assert np.max(np.abs(g @ g - ID2)) < 1e-12


def test_gate_index_bounds():
    with pytest.raises(IndexError):
        gate(10)
    with pytest.raises(IndexError):
        gate(-1)


def test_classify_examples():
    for k in range(10):
        assert classify(0, k) is PairClass.COMMUTE
        assert classify(k, 0) is PairClass.COMMUTE
        assert classify(k, k) is PairClass.COMMUTE
    assert classify(1, 2) is PairClass.ANTICOMMUTE
    assert classify(4, 6) is PairClass.NEITHER


def test_enumeration_matches_explicit_lists():
    commuting, anticommuting = enumerate_pairs()
    assert sorted(commuting) == expected_commuting()
    assert sorted(anticommuting) == expected_anticommuting()
    assert len(commuting) == 28
    assert len(anticommuting) == 24
    assert len(commuting) + len(anticommuting) == 52


def test_index_rule_coincides_with_algebraic_classification():
    # the index rule (i=0 or i=j or j=0) and vanishing commutator agree
    for i in range(10):
        for j in range(10):
            by_rule = i == 0 or j == 0 or i == j
            assert (classify(i, j) is PairClass.COMMUTE) == by_rule


def test_classify_phase_invariance():
    # classification uses commutator/anticommutator norms of the fixed set;
    # scaling a member by a phase does not change which class a pair is in
    from sagnac_switch.su2 import anticommutator, commutator
    rng = np.random.default_rng(0)
    for _ in range(30):
        i, j = rng.integers(0, 10, 2)
        phase = np.exp(1j * rng.uniform(0, 2 * np.pi))
        u, v = gate(int(i)) * phase, gate(int(j))
        comm = np.linalg.norm(commutator(u, v), 2) < 1e-10
        anti = np.linalg.norm(anticommutator(u, v), 2) < 1e-10
        cls = classify(int(i), int(j))
        assert comm == (cls is PairClass.COMMUTE)
        assert anti == (cls is PairClass.ANTICOMMUTE)
