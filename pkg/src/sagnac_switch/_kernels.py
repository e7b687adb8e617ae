"""Hot numeric kernels: Jones-matrix construction and 2x2 chain products.

Everything downstream (gadget verification, Monte Carlo jitter sweeps,
tomography) bottoms out in products of short trains of 2x2 complex
matrices.  Two interchangeable backends are provided:

* ``numba`` (default): ``@njit``-compiled scalar loops, fastest for the
  batched Monte Carlo paths.
* ``numpy``: vectorized pure-numpy fallback.

Select with the environment variable ``SWITCH_KERNELS=numpy|numba``
(read once at import).  If numba is unavailable the numpy backend is
used automatically.  ``benchmarks/bench_kernels.py`` compares the two.

Element kind codes: 0 = QWP, 1 = HWP, 2 = Faraday rotator.  Closed
forms (orientation t from the vertical axis, circular retardance t for
the Faraday case):

    QWP(t)     = (I - i (cos 2t Z + sin 2t X)) / sqrt(2)
    HWP(t)     =     -i (cos 2t Z + sin 2t X)
    Faraday(t) = [[cos t/2, -sin t/2], [sin t/2, cos t/2]]

A train is stored in the physical order the forward-propagating photon
meets its elements; the train matrix is the right-to-left product, so
element 0 is applied first.  Backward traversal visits the elements in
reverse order with all angles negated (linear-retarder orientation flip
plus Faraday non-reciprocity).
"""

from __future__ import annotations

import math
import os
import warnings

import numpy as np

KIND_QWP = 0
KIND_HWP = 1
KIND_FARADAY = 2

_SQRT_HALF = math.sqrt(0.5)


# ---------------------------------------------------------------------------
# numpy backend (vectorized)
# ---------------------------------------------------------------------------

def _jones_batch_numpy(kinds: np.ndarray, angles: np.ndarray) -> np.ndarray:
    """Jones matrices for elements given kind codes and angles, shape (n,2,2)."""
    kinds = np.asarray(kinds, dtype=np.int64)
    angles = np.asarray(angles, dtype=np.float64)
    n = kinds.shape[0]
    out = np.empty((n, 2, 2), dtype=np.complex128)

    lin = kinds != KIND_FARADAY
    if np.any(lin):
        c2 = np.cos(2.0 * angles[lin])
        s2 = np.sin(2.0 * angles[lin])
        qwp = kinds[lin] == KIND_QWP
        diag = np.where(qwp, _SQRT_HALF, 0.0)
        scale = np.where(qwp, _SQRT_HALF, 1.0)
        out[lin, 0, 0] = diag - 1j * scale * c2
        out[lin, 0, 1] = -1j * scale * s2
        out[lin, 1, 0] = -1j * scale * s2
        out[lin, 1, 1] = diag + 1j * scale * c2

    far = ~lin
    if np.any(far):
        c = np.cos(angles[far] / 2.0)
        s = np.sin(angles[far] / 2.0)
        out[far, 0, 0] = c
        out[far, 0, 1] = -s
        out[far, 1, 0] = s
        out[far, 1, 1] = c
    return out


def _chain_product_numpy(mats: np.ndarray) -> np.ndarray:
    """Right-to-left product mats[n-1] @ ... @ mats[0]."""
    mats = np.asarray(mats, dtype=np.complex128)
    acc = np.eye(2, dtype=np.complex128)
    for i in range(mats.shape[0]):
        acc = mats[i] @ acc
    return acc


def _train_matrix_numpy(kinds: np.ndarray, angles: np.ndarray,
                        backward: bool) -> np.ndarray:
    kinds = np.asarray(kinds, dtype=np.int64)
    angles = np.asarray(angles, dtype=np.float64)
    if backward:
        kinds = kinds[::-1]
        angles = -angles[::-1]
    return _chain_product_numpy(_jones_batch_numpy(kinds, angles))


def _train_matrices_batch_numpy(kinds: np.ndarray, angles: np.ndarray,
                                backward: bool) -> np.ndarray:
    """Train matrices for a (m, n) batch of angle rows, shape (m,2,2)."""
    kinds = np.asarray(kinds, dtype=np.int64)
    angles = np.asarray(angles, dtype=np.float64)
    m, n = angles.shape
    if backward:
        kinds = kinds[::-1]
        angles = -angles[:, ::-1]
    acc = np.broadcast_to(np.eye(2, dtype=np.complex128), (m, 2, 2)).copy()
    flat = _jones_batch_numpy(np.tile(kinds, m), angles.reshape(-1))
    jones = flat.reshape(m, n, 2, 2)
    for i in range(n):
        acc = jones[:, i] @ acc
    return acc


# ---------------------------------------------------------------------------
# numba backend (scalar loops, jitted below if available)
# ---------------------------------------------------------------------------

def _jones_batch_loop(kinds, angles):
    n = kinds.shape[0]
    out = np.empty((n, 2, 2), dtype=np.complex128)
    for i in range(n):
        k = kinds[i]
        t = angles[i]
        if k == 2:  # Faraday
            c = math.cos(t / 2.0)
            s = math.sin(t / 2.0)
            out[i, 0, 0] = c
            out[i, 0, 1] = -s
            out[i, 1, 0] = s
            out[i, 1, 1] = c
        else:
            c2 = math.cos(2.0 * t)
            s2 = math.sin(2.0 * t)
            if k == 0:  # QWP
                out[i, 0, 0] = _SQRT_HALF * (1.0 - 1j * c2)
                out[i, 0, 1] = _SQRT_HALF * (-1j * s2)
                out[i, 1, 0] = _SQRT_HALF * (-1j * s2)
                out[i, 1, 1] = _SQRT_HALF * (1.0 + 1j * c2)
            else:  # HWP
                out[i, 0, 0] = -1j * c2
                out[i, 0, 1] = -1j * s2
                out[i, 1, 0] = -1j * s2
                out[i, 1, 1] = 1j * c2
    return out


def _chain_product_loop(mats):
    a00 = 1.0 + 0.0j
    a01 = 0.0 + 0.0j
    a10 = 0.0 + 0.0j
    a11 = 1.0 + 0.0j
    for i in range(mats.shape[0]):
        m00 = mats[i, 0, 0]
        m01 = mats[i, 0, 1]
        m10 = mats[i, 1, 0]
        m11 = mats[i, 1, 1]
        b00 = m00 * a00 + m01 * a10
        b01 = m00 * a01 + m01 * a11
        b10 = m10 * a00 + m11 * a10
        b11 = m10 * a01 + m11 * a11
        a00, a01, a10, a11 = b00, b01, b10, b11
    out = np.empty((2, 2), dtype=np.complex128)
    out[0, 0] = a00
    out[0, 1] = a01
    out[1, 0] = a10
    out[1, 1] = a11
    return out


def _element_factor(kind, angle):
    if kind == 2:
        c = math.cos(angle / 2.0)
        s = math.sin(angle / 2.0)
        return c + 0j, -s + 0j, s + 0j, c + 0j
    c2 = math.cos(2.0 * angle)
    s2 = math.sin(2.0 * angle)
    if kind == 0:
        return (_SQRT_HALF * (1.0 - 1j * c2), _SQRT_HALF * (-1j * s2),
                _SQRT_HALF * (-1j * s2), _SQRT_HALF * (1.0 + 1j * c2))
    return -1j * c2, -1j * s2, -1j * s2, 1j * c2


def _train_matrix_loop(kinds, angles, backward):
    n = kinds.shape[0]
    a00 = 1.0 + 0.0j
    a01 = 0.0 + 0.0j
    a10 = 0.0 + 0.0j
    a11 = 1.0 + 0.0j
    for step in range(n):
        if backward:
            idx = n - 1 - step
            t = -angles[idx]
        else:
            idx = step
            t = angles[idx]
        m00, m01, m10, m11 = _element_factor(kinds[idx], t)
        b00 = m00 * a00 + m01 * a10
        b01 = m00 * a01 + m01 * a11
        b10 = m10 * a00 + m11 * a10
        b11 = m10 * a01 + m11 * a11
        a00, a01, a10, a11 = b00, b01, b10, b11
    out = np.empty((2, 2), dtype=np.complex128)
    out[0, 0] = a00
    out[0, 1] = a01
    out[1, 0] = a10
    out[1, 1] = a11
    return out


def _train_matrices_batch_loop(kinds, angles, backward):
    m = angles.shape[0]
    out = np.empty((m, 2, 2), dtype=np.complex128)
    for r in range(m):
        out[r] = _train_matrix_loop(kinds, angles[r], backward)
    return out


def _build_numba_backend():
    from numba import njit

    jones_batch = njit(cache=True)(_jones_batch_loop)
    chain_product = njit(cache=True)(_chain_product_loop)
    element_factor = njit(cache=True, inline="always")(_element_factor)

    @njit(cache=True)
    def train_matrix(kinds, angles, backward):
        n = kinds.shape[0]
        a00 = 1.0 + 0.0j
        a01 = 0.0 + 0.0j
        a10 = 0.0 + 0.0j
        a11 = 1.0 + 0.0j
        for step in range(n):
            if backward:
                idx = n - 1 - step
                t = -angles[idx]
            else:
                idx = step
                t = angles[idx]
            m00, m01, m10, m11 = element_factor(kinds[idx], t)
            b00 = m00 * a00 + m01 * a10
            b01 = m00 * a01 + m01 * a11
            b10 = m10 * a00 + m11 * a10
            b11 = m10 * a01 + m11 * a11
            a00, a01, a10, a11 = b00, b01, b10, b11
        out = np.empty((2, 2), dtype=np.complex128)
        out[0, 0] = a00
        out[0, 1] = a01
        out[1, 0] = a10
        out[1, 1] = a11
        return out

    @njit(cache=True)
    def train_matrices_batch(kinds, angles, backward):
        m = angles.shape[0]
        out = np.empty((m, 2, 2), dtype=np.complex128)
        for r in range(m):
            out[r] = train_matrix(kinds, angles[r], backward)
        return out

    return {
        "jones_batch": jones_batch,
        "chain_product": chain_product,
        "train_matrix": train_matrix,
        "train_matrices_batch": train_matrices_batch,
    }


_NUMPY_BACKEND = {
    "jones_batch": _jones_batch_numpy,
    "chain_product": _chain_product_numpy,
    "train_matrix": _train_matrix_numpy,
    "train_matrices_batch": _train_matrices_batch_numpy,
}

_backends: dict[str, dict] = {"numpy": _NUMPY_BACKEND}


def get_backend(name: str) -> dict:
    """Kernel function table for backend 'numpy' or 'numba'."""
    if name == "numba" and "numba" not in _backends:
        _backends["numba"] = _build_numba_backend()
    return _backends[name]


def _select_backend() -> str:
    requested = os.environ.get("SWITCH_KERNELS", "numba").strip().lower()
    if requested not in ("numba", "numpy"):
        warnings.warn(f"SWITCH_KERNELS={requested!r} not recognized, using numba")
        requested = "numba"
    if requested == "numba":
        try:
            get_backend("numba")
        except ImportError:
            warnings.warn("numba not importable, falling back to numpy kernels")
            return "numpy"
    return requested


_ACTIVE = _select_backend()
_active_table = get_backend(_ACTIVE)

jones_batch = _active_table["jones_batch"]
chain_product = _active_table["chain_product"]
train_matrix = _active_table["train_matrix"]
train_matrices_batch = _active_table["train_matrices_batch"]


def backend() -> str:
    """Name of the kernel backend selected at import time."""
    return _ACTIVE


def as_arrays(kinds, angles) -> tuple[np.ndarray, np.ndarray]:
    """Coerce kind codes / angles to the dtypes the kernels expect."""
    return (np.ascontiguousarray(kinds, dtype=np.int64),
            np.ascontiguousarray(angles, dtype=np.float64))
