import math

import numpy as np
import pytest

from sagnac_switch.elements import (Element, hwp, is_reciprocal, jones, qwp,
                                    reverse_element, sequence_matrix)
from sagnac_switch.gadget import (GadgetAngles, full_gadget_sequence,
                                  gx_sequence, reciprocal_gadget_sequence,
                                  reduce_angles, synthesize, verify_gadget)
from sagnac_switch.gates import gate_set
from sagnac_switch.su2 import ID2, pauli, phase_equal, rotation
from sagnac_switch.tomography import random_unitary

X = pauli("x")


def test_gx_structure():
    seq = gx_sequence(0.7)
    assert len(seq) == 7
    kinds = [e.kind for e in seq]
    assert kinds == ["HWP", "F", "QWP", "HWP", "QWP", "F", "HWP"]


def test_gx_identity_and_pi():
    seq0 = gx_sequence(0.0)
    assert np.max(np.abs(sequence_matrix(seq0, "forward") - ID2)) < 1e-12
    assert np.max(np.abs(sequence_matrix(seq0, "backward") - ID2)) < 1e-12
    seqp = gx_sequence(math.pi)
    for direction in ("forward", "backward"):
        m = sequence_matrix(seqp, direction)
        assert np.max(np.abs(m - (-1j) * X)) < 1e-12


def test_gx_equals_rx_exactly_on_grid():
    for theta in np.linspace(-2 * math.pi, 2 * math.pi, 37):
        seq = gx_sequence(theta)
        rx = rotation("x", theta)
        assert np.max(np.abs(sequence_matrix(seq, "forward") - rx)) < 1e-12
        assert np.max(np.abs(sequence_matrix(seq, "backward") - rx)) < 1e-12


def test_reduce_angles_assignments():
    a = reduce_angles(0.0, 0.0, 0.3)
    assert a.theta1 == pytest.approx(math.pi / 2, abs=1e-12)
    assert a.phi1 == pytest.approx(math.pi / 8 - math.pi / 2, abs=1e-12)
    assert a.theta2 == pytest.approx(math.pi / 2, abs=1e-12)
    assert a.phi2 == pytest.approx(math.pi / 8 - math.pi / 2, abs=1e-12)


def test_reduced_field_relations_hold_for_synthesized_angles():
    rng = np.random.default_rng(0)
    for _ in range(50):
        a = synthesize(random_unitary(rng))
        assert a.theta1 == pytest.approx(a.theta + math.pi / 2, abs=1e-12)
        assert a.phi1 == pytest.approx(a.theta - a.phi + math.pi / 8 - math.pi / 2,
                                       abs=1e-12)
        assert a.theta2 == pytest.approx(-a.theta + math.pi / 2, abs=1e-12)
        assert a.phi2 == pytest.approx(math.pi / 8 + a.phi - a.theta - math.pi / 2,
                                       abs=1e-12)


def test_waveplate_permutation_rule():
    for alpha in np.linspace(-1.5, 1.5, 20):
        for beta in np.linspace(-1.5, 1.5, 20):
            lhs = jones(hwp(alpha)) @ jones(qwp(beta))
            rhs = jones(qwp(2 * alpha - beta)) @ jones(hwp(alpha))
            assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_full_vs_reduced_train():
    rng = np.random.default_rng(1)
    for _ in range(500):
        theta, phi = rng.uniform(-math.pi / 2, math.pi / 2, 2)
        alpha = rng.uniform(-math.pi / 2, math.pi / 2)
        a = reduce_angles(theta, phi, alpha)
        full = full_gadget_sequence(a)
        red = reciprocal_gadget_sequence(a)
        assert len(full) == 11 and len(red) == 9
        for direction in ("forward", "backward"):
            mf = sequence_matrix(full, direction)
            mr = sequence_matrix(red, direction)
            assert phase_equal(mf, mr, 1e-12)


def test_synthesized_gadget_is_exactly_reciprocal():
    rng = np.random.default_rng(2)
    for _ in range(50):
        a = synthesize(random_unitary(rng))
        assert is_reciprocal(reciprocal_gadget_sequence(a), tol=1e-12,
                             mode="exact")


def test_round_trip_haar_targets():
    rng = np.random.default_rng(3)
    for _ in range(200):
        u = random_unitary(rng)
        report = verify_gadget(synthesize(u), u)
        assert report.fw_fidelity >= 1 - 1e-10
        assert report.bw_fidelity >= 1 - 1e-10
        assert report.reciprocity_fidelity >= 1 - 1e-10


def test_round_trip_gate_set():
    for g in gate_set():
        report = verify_gadget(synthesize(g), g)
        assert report.ok(1e-10)


def test_identity_target():
    a = synthesize(ID2)
    report = verify_gadget(a, ID2)
    assert report.fw_fidelity == pytest.approx(1.0, abs=1e-12)
    assert report.bw_fidelity == pytest.approx(1.0, abs=1e-12)


def test_synthesize_deterministic():
    rng = np.random.default_rng(4)
    u = random_unitary(rng)
    a1 = synthesize(u)
    a2 = synthesize(u)
    assert a1 == a2  # bit-identical angles


def test_synthesize_rejects_non_unitary():
    with pytest.raises(ValueError):
        synthesize(np.array([[1, 1], [0, 1]], dtype=complex))


def test_verify_gadget_perturbation_sensitivity():
    rng = np.random.default_rng(5)
    u = random_unitary(rng)
    a = synthesize(u)
    bumped = GadgetAngles(theta=a.theta, phi=a.phi,
                          alpha=a.alpha + math.radians(1.0),
                          theta1=a.theta1, phi1=a.phi1,
                          theta2=a.theta2, phi2=a.phi2)
    report = verify_gadget(bumped, u)
    assert report.fw_fidelity < 1.0 - 1e-6
    assert report.fw_fidelity > 0.9  # a 1-degree bump is a small error


def test_palindrome_cross_check():
    # reversing the element list and negating orientations reproduces the
    # backward matrix of the original train
    rng = np.random.default_rng(6)
    for _ in range(50):
        a = synthesize(random_unitary(rng))
        seq = reciprocal_gadget_sequence(a)
        mirrored = [reverse_element(e) for e in reversed(seq)]
        bw = sequence_matrix(seq, "backward")
        fw_of_mirror = sequence_matrix(mirrored, "forward")
        assert np.max(np.abs(bw - fw_of_mirror)) < 1e-12


def test_reciprocal_gadget_sequence_rejects_non_finite():
    a = reduce_angles(0.1, 0.2, 0.3)
    bad = GadgetAngles(theta=a.theta, phi=a.phi, alpha=math.nan,
                       theta1=a.theta1, phi1=a.phi1,
                       theta2=a.theta2, phi2=a.phi2)
    with pytest.raises(ValueError):
        reciprocal_gadget_sequence(bad)
