"""Physical retarder / rotator elements and direction-aware element trains.

An :class:`Element` is a quarter-wave plate, half-wave plate (orientation
measured from the vertical axis, physically pi-periodic) or a Faraday
rotator (circular retardance; the stock devices are +-pi/2, written F+ and
F-).  An element train is a plain list of elements in the order the
forward-propagating photon meets them; the train matrix is the
right-to-left product of the individual Jones matrices.

Counter-propagation flips the sign of a linear retarder's orientation,
while a Faraday rotator flips the sign of its retardance instead - that
asymmetry is what breaks Lorentz reciprocity and makes the reciprocal
gadgets of :mod:`sagnac_switch.gadget` possible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .su2 import phase_equal, rotation, wrap_angle

QWP = "QWP"
HWP = "HWP"
FARADAY = "F"

_KIND_CODES = {QWP: _kernels.KIND_QWP, HWP: _kernels.KIND_HWP,
               FARADAY: _kernels.KIND_FARADAY}

FORWARD = "forward"
BACKWARD = "backward"
_DIRECTION_ALIASES = {"forward": FORWARD, "fw": FORWARD,
                      "backward": BACKWARD, "bw": BACKWARD}


def normalize_direction(direction: str) -> str:
    try:
        return _DIRECTION_ALIASES[direction.lower()]
    except (KeyError, AttributeError):
        raise ValueError(f"direction must be forward/fw or backward/bw, "
                         f"got {direction!r}") from None


@dataclass(frozen=True)
class Element:
    """One optical element: kind ('QWP', 'HWP' or 'F') and angle in radians.

    Waveplate orientations are normalized into (-pi/2, pi/2] (exact
    pi-periodicity of the Jones matrix); Faraday retardance into
    (-2pi, 2pi].
    """

    kind: str
    angle: float

    def __post_init__(self) -> None:
        if self.kind not in _KIND_CODES:
            raise ValueError(f"unknown element kind {self.kind!r}")
        if not math.isfinite(self.angle):
            raise ValueError("element angle must be finite")
        if self.kind == FARADAY:
            a = wrap_angle(self.angle)
        else:
            a = wrap_angle(self.angle, period=math.pi)
        object.__setattr__(self, "angle", a)


def qwp(angle: float) -> Element:
    return Element(QWP, angle)


def hwp(angle: float) -> Element:
    return Element(HWP, angle)


def faraday(angle: float) -> Element:
    return Element(FARADAY, angle)


def f_plus() -> Element:
    return Element(FARADAY, math.pi / 2)


def f_minus() -> Element:
    return Element(FARADAY, -math.pi / 2)


def jones(e: Element) -> np.ndarray:
    """Jones matrix of a single element, built from its defining rotations.

    QWP(t) = R_y(2t) R_z(pi/2) R_y(-2t), HWP(t) = R_y(2t) R_z(pi) R_y(-2t),
    Faraday(t) = R_y(t).  The batched kernels use equivalent closed forms;
    the two routes are cross-checked in the test suite.
    """
    if e.kind == FARADAY:
        return rotation("y", e.angle)
    retardance = math.pi / 2 if e.kind == QWP else math.pi
    return (rotation("y", 2 * e.angle) @ rotation("z", retardance)
            @ rotation("y", -2 * e.angle))


def reverse_element(e: Element) -> Element:
    """The element as seen by a counter-propagating photon (angle negated)."""
    return Element(e.kind, -e.angle)


def _train_arrays(seq: Sequence[Element]) -> tuple[np.ndarray, np.ndarray]:
    kinds = [_KIND_CODES[e.kind] for e in seq]
    angles = [e.angle for e in seq]
    return _kernels.as_arrays(kinds, angles)


def sequence_matrix(seq: Sequence[Element], direction: str = FORWARD) -> np.ndarray:
    """Jones matrix of an element train for the given propagation direction.

    Forward: J(e_n) ... J(e_1) with e_1 met first.  Backward: the photon
    meets e_n first and every element is direction-reversed, i.e.
    J(rev(e_1)) ... J(rev(e_n)).
    """
    if len(seq) == 0:
        raise ValueError("element sequence must be non-empty")
    backward = normalize_direction(direction) == BACKWARD
    kinds, angles = _train_arrays(seq)
    return _kernels.train_matrix(kinds, angles, backward)


def is_reciprocal(seq: Sequence[Element], tol: float = 1e-10,
                  mode: str = "up_to_phase") -> bool:
    """Whether forward and backward traversal give the same Jones matrix."""
    fw = sequence_matrix(seq, FORWARD)
    bw = sequence_matrix(seq, BACKWARD)
    if mode == "exact":
        return bool(np.max(np.abs(fw - bw)) <= tol)
    if mode == "up_to_phase":
        return phase_equal(fw, bw, tol)
    raise ValueError(f"mode must be 'exact' or 'up_to_phase', got {mode!r}")


def format_sequence(seq: Iterable[Element]) -> str:
    """One-line text form, e.g. 'QWP:45.000000 HWP:-22.500000 F:+'."""
    parts = []
    for e in seq:
        if e.kind == FARADAY:
            if abs(e.angle - math.pi / 2) < 1e-12:
                parts.append("F:+")
                continue
            if abs(e.angle + math.pi / 2) < 1e-12:
                parts.append("F:-")
                continue
        parts.append(f"{e.kind}:{math.degrees(e.angle):.6f}")
    return " ".join(parts)


def parse_sequence(text: str) -> list[Element]:
    """Parse the one-line text form produced by :func:`format_sequence`."""
    seq: list[Element] = []
    for token in text.split():
        kind, _, value = token.partition(":")
        if not value:
            raise ValueError(f"malformed element token {token!r}")
        if kind == FARADAY and value in ("+", "-"):
            seq.append(f_plus() if value == "+" else f_minus())
            continue
        if kind not in _KIND_CODES:
            raise ValueError(f"unknown element kind in token {token!r}")
        try:
            angle = math.radians(float(value))
        except ValueError:
            raise ValueError(f"bad angle in token {token!r}") from None
        seq.append(Element(kind, angle))
    if not seq:
        raise ValueError("empty element train")
    return seq
