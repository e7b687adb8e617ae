"""Reciprocal polarization gadgets: construction and angle synthesis.

A seven-element train of waveplates sandwiched between two fixed Faraday
rotators implements an X-rotation whose Jones matrix is the same in both
propagation directions.  Wrapping that train palindromically in a
QWP/HWP pair extends it to a direction-independent realization of any
SU(2) operator.  :func:`synthesize` computes the waveplate angles for a
given target; :func:`verify_gadget` checks a candidate angle set by
rebuilding the train and comparing against the target in both
directions.

Angle conventions follow :mod:`sagnac_switch.elements`: orientations
from the vertical axis, radians everywhere, trains listed in forward
encounter order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .elements import (Element, FORWARD, BACKWARD, f_minus, f_plus, hwp,
                       jones, qwp, sequence_matrix)
from .su2 import (KET_H, KET_L, bloch_expectations, projector, rotation,
                  su2_canonicalize, wrap_angle)

_QUARTER = math.pi / 2
_EIGHTH = math.pi / 8


class SynthesisError(RuntimeError):
    """Raised when angle synthesis cannot reproduce its target."""


@dataclass(frozen=True)
class GadgetAngles:
    """Waveplate angles of a universal reciprocal gadget (radians).

    ``theta``/``phi`` orient the outer QWP/HWP pair of the full
    eleven-element train and ``alpha`` the central half-wave plate.  The
    reduced six-waveplate form absorbs the outer pair into the fixed
    pi/8 plates:

        theta1 = theta + pi/2
        phi1   = theta - phi + pi/8 - pi/2
        theta2 = -theta + pi/2
        phi2   = pi/8 + phi - theta - pi/2
    """

    theta: float
    phi: float
    alpha: float
    theta1: float
    phi1: float
    theta2: float
    phi2: float


@dataclass(frozen=True)
class GadgetReport:
    """Phase-insensitive fidelities |tr(A^dag B)/2|^2 of a gadget check."""

    fw_fidelity: float
    bw_fidelity: float
    reciprocity_fidelity: float

    def ok(self, tol: float = 1e-10) -> bool:
        return min(self.fw_fidelity, self.bw_fidelity,
                   self.reciprocity_fidelity) >= 1.0 - tol


def reduce_angles(theta: float, phi: float, alpha: float) -> GadgetAngles:
    """Fill the reduced six-waveplate form for outer angles (theta, phi)."""
    return GadgetAngles(
        theta=theta,
        phi=phi,
        alpha=alpha,
        theta1=theta + _QUARTER,
        phi1=theta - phi + _EIGHTH - _QUARTER,
        theta2=-theta + _QUARTER,
        phi2=_EIGHTH + phi - theta - _QUARTER,
    )


def gx_sequence(theta: float) -> list[Element]:
    """Seven-element train realizing a reciprocal X-rotation by theta.

    Both propagation directions give exactly R_x(theta): the central
    three waveplates form an X-rotation by theta + 2pi, and the pi/8
    half-wave plates merge with the Faraday rotators into +-iX (forward)
    and +-iZ (backward), which conjugate the central rotation back onto
    itself.
    """
    return [
        hwp(_EIGHTH),
        f_plus(),
        qwp(_QUARTER),
        hwp((theta + 2.0 * math.pi) / 4.0),
        qwp(_QUARTER),
        f_minus(),
        hwp(_EIGHTH),
    ]


def full_gadget_sequence(a: GadgetAngles) -> list[Element]:
    """Eleven-element train: outer QWP/HWP pair around the X-rotation core."""
    core = gx_sequence(0.0)
    core[3] = hwp(a.alpha)  # central plate set directly from alpha
    return [qwp(-a.theta), hwp(-a.phi), *core, hwp(a.phi), qwp(a.theta)]


def reciprocal_gadget_sequence(a: GadgetAngles) -> list[Element]:
    """Reduced nine-element train (six waveplates + two Faraday rotators).

    Equivalent to :func:`full_gadget_sequence` with the two adjacent
    waveplate pairs merged via the standard reduction rules.
    """
    for angle in (a.theta1, a.phi1, a.alpha, a.phi2, a.theta2):
        if not math.isfinite(angle):
            raise ValueError("gadget angles must be finite")
    return [
        qwp(a.theta2),
        hwp(a.phi2),
        f_plus(),
        qwp(_QUARTER),
        hwp(a.alpha),
        qwp(_QUARTER),
        f_minus(),
        hwp(a.phi1),
        qwp(a.theta1),
    ]


def verify_gadget(a: GadgetAngles, u: np.ndarray) -> GadgetReport:
    """Rebuild the reduced train and score it against the target unitary."""
    u = np.asarray(u, dtype=complex)
    if np.max(np.abs(u.conj().T @ u - np.eye(2))) > 1e-9:
        raise ValueError("target must be unitary")
    seq = reciprocal_gadget_sequence(a)
    fw = sequence_matrix(seq, FORWARD)
    bw = sequence_matrix(seq, BACKWARD)

    def fid(m: np.ndarray, n: np.ndarray) -> float:
        return float(abs(np.trace(m.conj().T @ n) / 2.0) ** 2)

    return GadgetReport(fid(fw, u), fid(bw, u), fid(fw, bw))


def _safe_atan2(y: float, x: float) -> float:
    # At a rotation pole both arguments vanish and any angle works.
    if math.hypot(y, x) < 1e-12:
        return 0.0
    return math.atan2(y, x)


def _angles_for_branch(eigval: complex, eigvec: np.ndarray) -> GadgetAngles:
    lam = -2.0 * np.angle(eigval)
    rho = projector(eigvec)

    x, _, z = bloch_expectations(rho)
    gamma = _safe_atan2(z, x)
    ry = rotation("y", gamma)
    x2, y2, _ = bloch_expectations(ry @ rho @ ry.conj().T)
    delta = -_safe_atan2(y2, x2)

    # Map the (gamma, delta) rotation pair onto a QWP/HWP pair: probe with
    # circular light for the QWP angle, then with |H> for the HWP angle.
    inv = rotation("x", -_QUARTER) @ rotation("z", -delta) @ rotation("y", -gamma)
    xl, _, zl = bloch_expectations(inv @ KET_L)
    theta_p = 0.5 * _safe_atan2(xl, zl) + math.pi / 4.0
    xh, _, zh = bloch_expectations(jones(qwp(theta_p)) @ inv @ KET_H)
    phi_p = 0.25 * _safe_atan2(xh, zh)

    phi = phi_p
    theta = 2.0 * phi - theta_p

    psi = wrap_angle(lam - math.pi)
    alpha = wrap_angle(psi / 4.0 + _QUARTER, period=math.pi)
    return reduce_angles(wrap_angle(theta, period=math.pi),
                         wrap_angle(phi, period=math.pi), alpha)


def synthesize(u: np.ndarray, tol: float = 1e-10) -> GadgetAngles:
    """Waveplate angles whose gadget implements u in both directions.

    The target is lifted to SU(2), composed with an X-rotation by pi and
    eigendecomposed; each eigenbranch yields a candidate angle set that
    is accepted once the rebuilt train matches the target up to global
    phase in both propagation directions.
    """
    u_su2 = su2_canonicalize(u)
    v = rotation("x", math.pi) @ u_su2

    eigvals, eigvecs = np.linalg.eig(v)
    best: tuple[float, GadgetAngles] | None = None
    for k in range(2):
        angles = _angles_for_branch(eigvals[k], eigvecs[:, k])
        report = verify_gadget(angles, u_su2)
        score = min(report.fw_fidelity, report.bw_fidelity)
        if score >= 1.0 - tol:
            return angles
        if best is None or score > best[0]:
            best = (score, angles)
    raise SynthesisError(
        f"gadget reconstruction failed on both eigenbranches "
        f"(best fidelity {best[0]:.6e})" if best else "eigendecomposition failed")
