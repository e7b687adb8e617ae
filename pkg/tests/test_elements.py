import math

import numpy as np
import pytest

from sagnac_switch.elements import (
    Element, f_minus, f_plus, faraday, format_sequence, hwp, is_reciprocal,
    jones, parse_sequence, qwp, reverse_element, sequence_matrix,
)
from sagnac_switch.su2 import ID2, pauli, phase_equal, rotation

X = pauli("x")
Z = pauli("z")


def random_retarder_train(rng, max_len=8):
    n = int(rng.integers(1, max_len + 1))
    return [Element("QWP" if rng.random() < 0.5 else "HWP",
                    float(rng.uniform(-math.pi, math.pi)))
            for _ in range(n)]


def test_jones_matches_rotation_definition():
    for theta in np.linspace(-1.5, 1.5, 21):
        q = rotation("y", 2 * theta) @ rotation("z", math.pi / 2) @ rotation("y", -2 * theta)
        h = rotation("y", 2 * theta) @ rotation("z", math.pi) @ rotation("y", -2 * theta)
        assert np.allclose(jones(qwp(theta)), q, atol=1e-12)
        assert np.allclose(jones(hwp(theta)), h, atol=1e-12)
    for t in np.linspace(-2, 2, 11):
        assert np.allclose(jones(faraday(t)), rotation("y", t), atol=1e-12)


def test_waveplate_pi_periodicity():
    for theta in np.linspace(-3, 3, 17):
        for kind in ("QWP", "HWP"):
            a = jones(Element(kind, theta))
            b = jones(Element(kind, theta + math.pi))
            assert np.max(np.abs(a - b)) < 1e-12


def test_qwp_squared_is_hwp():
    for theta in np.linspace(-1.5, 1.5, 13):
        q = jones(qwp(theta))
        assert np.allclose(q @ q, jones(hwp(theta)), atol=1e-12)


def test_hwp_faraday_exchange_identities():
    # H(pi/8) F- = F+ H(pi/8) = -iX and H(-pi/8) F- = F+ H(-pi/8) = -iZ
    h8 = jones(hwp(math.pi / 8))
    h8m = jones(hwp(-math.pi / 8))
    fp = jones(f_plus())
    fm = jones(f_minus())
    for lhs in (h8 @ fm, fp @ h8):
        assert np.max(np.abs(lhs - (-1j) * X)) < 1e-12
    for lhs in (h8m @ fm, fp @ h8m):
        assert np.max(np.abs(lhs - (-1j) * Z)) < 1e-12


def test_reverse_element():
    assert reverse_element(hwp(math.pi / 8)) == hwp(-math.pi / 8)
    assert reverse_element(f_plus()) == f_minus()
    assert reverse_element(qwp(0.0)) == qwp(0.0)


def test_element_validation_and_normalization():
    with pytest.raises(ValueError):
        Element("POL", 0.0)
    with pytest.raises(ValueError):
        Element("QWP", math.inf)
    # orientation wrapped into (-pi/2, pi/2]
    assert Element("HWP", math.pi / 2 + 0.2).angle == pytest.approx(
        -math.pi / 2 + 0.2)
    assert Element("HWP", math.pi / 2).angle == pytest.approx(math.pi / 2)


def test_sequence_matrix_rejects_empty():
    with pytest.raises(ValueError):
        sequence_matrix([], "forward")


def test_sequence_matrix_order_convention():
    # element 0 is met first, so the product reads right to left
    seq = [hwp(0.3), qwp(-0.2)]
    expect = jones(qwp(-0.2)) @ jones(hwp(0.3))
    assert np.allclose(sequence_matrix(seq, "forward"), expect, atol=1e-12)


def test_single_hwp_backward_is_transpose_rule():
    for phi in np.linspace(-1.5, 1.5, 11):
        fw = sequence_matrix([hwp(phi)], "forward")
        bw = sequence_matrix([hwp(phi)], "backward")
        assert np.max(np.abs(bw - Z @ fw.T @ Z)) < 1e-12


def test_transpose_rule_random_retarder_trains():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        seq = random_retarder_train(rng)
        fw = sequence_matrix(seq, "forward")
        bw = sequence_matrix(seq, "backward")
        assert np.max(np.abs(bw - Z @ fw.T @ Z)) < 1e-12


def test_faraday_breaks_transpose_rule():
    for theta in (0.4, math.pi / 2, 1.9):
        fw = sequence_matrix([faraday(theta)], "forward")
        bw = sequence_matrix([faraday(theta)], "backward")
        assert np.allclose(bw, rotation("y", -theta), atol=1e-12)
        assert np.max(np.abs(bw - Z @ fw.T @ Z)) > 1e-3


def test_sequence_matrices_unitary():
    rng = np.random.default_rng(8)
    for _ in range(200):
        seq = random_retarder_train(rng)
        if rng.random() < 0.5:
            seq.append(faraday(float(rng.uniform(-math.pi, math.pi))))
        for direction in ("forward", "backward"):
            m = sequence_matrix(seq, direction)
            assert np.max(np.abs(m.conj().T @ m - ID2)) < 1e-12


def test_is_reciprocal():
    # a single QWP is not reciprocal unless at a symmetric orientation
    assert not is_reciprocal([qwp(math.pi / 4)], tol=1e-10, mode="up_to_phase")
    # H(0) is diagonal, hence invariant under the orientation flip
    assert is_reciprocal([hwp(0.0)], tol=1e-10, mode="up_to_phase")
    with pytest.raises(ValueError):
        is_reciprocal([hwp(0.0)], mode="weird")


def test_direction_aliases():
    seq = [qwp(0.3)]
    assert np.allclose(sequence_matrix(seq, "fw"), sequence_matrix(seq, "forward"))
    assert np.allclose(sequence_matrix(seq, "bw"), sequence_matrix(seq, "backward"))
    with pytest.raises(ValueError):
        sequence_matrix(seq, "sideways")


def test_serialization_round_trip():
    seq = [qwp(math.radians(12.25)), hwp(math.radians(-33.5)), f_plus(),
           f_minus(), faraday(0.7)]
    text = format_sequence(seq)
    assert "F:+" in text and "F:-" in text
    parsed = parse_sequence(text)
    assert len(parsed) == len(seq)
    for a, b in zip(seq, parsed):
        assert a.kind == b.kind
        # six printed decimals in degrees resolve ~2e-8 rad
        assert a.angle == pytest.approx(b.angle, abs=1e-7)


def test_parse_errors():
    for bad in ("", "QWP", "QWP:abc", "POL:10"):
        with pytest.raises(ValueError):
            parse_sequence(bad)
