"""Complex 2x2 linear algebra for polarization qubits.

Conventions: |H> = [1, 0], |V> = [0, 1]; diagonal states are the X
eigenstates and circular states the Y eigenstates, so the Stokes axes
(S1, S2, S3) map onto the Pauli operators (X, Y, Z).  All angles are in
radians and every function returns a new array; nothing is mutated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi

ID2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

KET_H = np.array([1, 0], dtype=complex)
KET_V = np.array([0, 1], dtype=complex)
KET_PLUS = np.array([1, 1], dtype=complex) / math.sqrt(2)
KET_MINUS = np.array([1, -1], dtype=complex) / math.sqrt(2)
KET_L = np.array([1, 1j], dtype=complex) / math.sqrt(2)
KET_R = np.array([1, -1j], dtype=complex) / math.sqrt(2)

_PAULIS = {"x": PAULI_X, "y": PAULI_Y, "z": PAULI_Z, "id": ID2}

for _m in (ID2, PAULI_X, PAULI_Y, PAULI_Z, KET_H, KET_V, KET_PLUS,
           KET_MINUS, KET_L, KET_R):
    _m.flags.writeable = False


def pauli(k: str) -> np.ndarray:
    """Pauli matrix for axis 'x', 'y', 'z' or the identity for 'id'."""
    try:
        return _PAULIS[k]
    except KeyError:
        raise ValueError(f"unknown Pauli label {k!r}") from None


def rotation(axis: str, theta: float) -> np.ndarray:
    """SU(2) rotation exp(-i*theta/2 * sigma_axis) about a Pauli axis."""
    if not math.isfinite(theta):
        raise ValueError(f"rotation angle must be finite, got {theta!r}")
    if axis not in ("x", "y", "z"):
        raise ValueError(f"axis must be one of x, y, z, got {axis!r}")
    c = math.cos(theta / 2.0)
    s = math.sin(theta / 2.0)
    return c * ID2 - 1j * s * _PAULIS[axis]


def wrap_angle(theta: float, period: float = 2.0 * TWO_PI) -> float:
    """Wrap an angle into the half-open interval (-period/2, period/2]."""
    t = theta % period
    if t > period / 2.0:
        t -= period
    return t


@dataclass(frozen=True)
class AxisAngle:
    """A rotation axis (unit 3-vector) and angle, normalized on construction."""

    axis: tuple[float, float, float]
    angle: float

    def __post_init__(self) -> None:
        n = np.asarray(self.axis, dtype=float)
        norm = float(np.linalg.norm(n))
        if not math.isfinite(self.angle):
            raise ValueError("rotation angle must be finite")
        if norm < 1e-12:
            raise ValueError("rotation axis must be non-zero")
        object.__setattr__(self, "axis", tuple(n / norm))
        object.__setattr__(self, "angle", wrap_angle(self.angle))

    def matrix(self) -> np.ndarray:
        """SU(2) matrix exp(-i*angle/2 * n.sigma)."""
        nx, ny, nz = self.axis
        n_dot_sigma = nx * PAULI_X + ny * PAULI_Y + nz * PAULI_Z
        c = math.cos(self.angle / 2.0)
        s = math.sin(self.angle / 2.0)
        return c * ID2 - 1j * s * n_dot_sigma


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def anticommutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b + b @ a


def is_unitary(u: np.ndarray, tol: float = 1e-9) -> bool:
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2):
        return False
    return bool(np.max(np.abs(u.conj().T @ u - ID2)) <= tol)


def _require_unitary(u: np.ndarray, name: str = "matrix") -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if not is_unitary(u):
        raise ValueError(f"{name} is not unitary")
    return u


def phase_equal(a: np.ndarray, b: np.ndarray, tol: float = 1e-10) -> bool:
    """True iff the unitaries a and b agree up to a global phase.

    Uses |tr(a^dag b)|/2 >= 1 - tol, which for unitaries is equivalent
    to min_phi ||a - e^{i phi} b|| being small.
    """
    a = _require_unitary(a, "first argument")
    b = _require_unitary(b, "second argument")
    return abs(np.trace(a.conj().T @ b)) / 2.0 >= 1.0 - tol


def su2_canonicalize(u: np.ndarray) -> np.ndarray:
    """Rescale a unitary by a global phase so that det = 1.

    The phase branch is the principal square root of det(u), which keeps
    det-1 inputs unchanged and maps e.g. X to -iX.  The result is always
    phase-equal to the input.
    """
    u = _require_unitary(u)
    det = np.linalg.det(u)
    return u / np.sqrt(det)


def projector(psi: np.ndarray) -> np.ndarray:
    """Density matrix |psi><psi| of a state vector."""
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def _as_density(state: np.ndarray) -> np.ndarray:
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        return projector(state)
    return state


def _validate_density(rho: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    rho = _as_density(rho)
    if rho.shape != (2, 2):
        raise ValueError(f"expected a qubit state, got shape {rho.shape}")
    if abs(np.trace(rho).real - 1.0) > tol or abs(np.trace(rho).imag) > tol:
        raise ValueError("density matrix must have unit trace")
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise ValueError("density matrix must be Hermitian")
    evals = np.linalg.eigvalsh(rho)
    if evals.min() < -tol:
        raise ValueError(f"density matrix not PSD (min eigenvalue {evals.min():.3e})")
    return rho


def state_fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.

    For qubits this reduces to tr(rho sigma) + 2 sqrt(det(rho) det(sigma));
    for pure inputs it equals |<psi|phi>|^2.  Accepts kets or density
    matrices; eigenvalues are allowed to dip to -1e-9 (clipped).
    """
    rho = _validate_density(rho)
    sigma = _validate_density(sigma)
    overlap = np.trace(rho @ sigma).real
    det_term = max(np.linalg.det(rho).real, 0.0) * max(np.linalg.det(sigma).real, 0.0)
    f = overlap + 2.0 * math.sqrt(det_term)
    return min(max(f, 0.0), 1.0)


def bloch_expectations(state: np.ndarray) -> tuple[float, float, float]:
    """Pauli expectation values (<X>, <Y>, <Z>) of a state."""
    rho = _as_density(state)
    return (
        float(np.trace(PAULI_X @ rho).real),
        float(np.trace(PAULI_Y @ rho).real),
        float(np.trace(PAULI_Z @ rho).real),
    )
