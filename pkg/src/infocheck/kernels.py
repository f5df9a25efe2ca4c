"""Array kernels for GF(2^k) arithmetic over batches of trials.

Every kernel exists twice: a numba ``@njit`` loop and a vectorized numpy
twin. Both operate on ``uint64`` arrays and must agree bit for bit; the
backend is chosen per call (``backend=``) or globally by
``INFOCHECK_DISABLE_NUMBA``.

Multiplication here interleaves the modular reduction with the
shift-and-add loop, so no accumulator wider than 64 bits is needed. The
scalar field code in :mod:`infocheck.gf2k` uses a separate
multiply-then-reduce route, which lets the two cross-check each other.
"""

import numpy as np

from ._accel import DEFAULT_BACKEND, HAVE_NUMBA, njit

U64 = np.uint64
_ONE = U64(1)
_ZERO = U64(0)


def field_constants(kappa, reduction_poly):
    """Return ``(top_shift, mask, low_poly)`` as uint64 scalars."""
    mask = (1 << kappa) - 1
    low = reduction_poly & mask
    return U64(kappa - 1), U64(mask), U64(low)


# --------------------------------------------------------------------------
# numba path

@njit(cache=True)
def _nb_mul_scalar(x, y, top, mask, low):
    acc = U64(0)
    one = U64(1)
    while y:
        if y & one:
            acc ^= x
        y >>= one
        carry = (x >> top) & one
        x = (x << one) & mask
        if carry:
            x ^= low
    return acc


@njit(cache=True)
def _nb_gf_mul(a, b, top, mask, low):
    out = np.empty_like(a)
    for i in range(a.size):
        out[i] = _nb_mul_scalar(a[i], b[i], top, mask, low)
    return out


@njit(cache=True)
def _nb_poly_eval(coeffs, x, top, mask, low):
    rows, length = coeffs.shape
    m = x.shape[1]
    out = np.zeros((rows, m), dtype=np.uint64)
    for r in range(rows):
        for j in range(m):
            xj = x[r, j]
            acc = U64(0)
            for k in range(length - 1, -1, -1):
                acc = _nb_mul_scalar(acc, xj, top, mask, low) ^ coeffs[r, k]
            out[r, j] = acc
    return out


# --------------------------------------------------------------------------
# numpy path

def _np_gf_mul(a, b, top, mask, low):
    x = a.copy()
    acc = np.zeros_like(a)
    kappa = int(top) + 1
    for bit in range(kappa):
        sel = _ZERO - ((b >> U64(bit)) & _ONE)
        acc ^= x & sel
        carry = (x >> top) & _ONE
        x = (x << _ONE) & mask
        x ^= (_ZERO - carry) & low
    return acc


def _np_poly_eval(coeffs, x, top, mask, low):
    rows, length = coeffs.shape
    acc = np.zeros(x.shape, dtype=np.uint64)
    for k in range(length - 1, -1, -1):
        prod = _np_gf_mul(acc.ravel(), x.ravel(), top, mask, low).reshape(x.shape)
        acc = prod ^ coeffs[:, k : k + 1]
    return acc


# --------------------------------------------------------------------------
# dispatch

def _resolve(backend):
    backend = backend or DEFAULT_BACKEND
    if backend == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not installed")
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    return backend


def gf_mul(a, b, kappa, reduction_poly, backend=None):
    """Elementwise product of two equal-shape uint64 arrays in GF(2^kappa)."""
    a = np.ascontiguousarray(a, dtype=np.uint64)
    b = np.ascontiguousarray(b, dtype=np.uint64)
    a, b = np.broadcast_arrays(a, b)
    shape = a.shape
    a = np.ascontiguousarray(a).ravel()
    b = np.ascontiguousarray(b).ravel()
    consts = field_constants(kappa, reduction_poly)
    if _resolve(backend) == "numba":
        out = _nb_gf_mul(a, b, *consts)
    else:
        out = _np_gf_mul(a, b, *consts)
    return out.reshape(shape)


def poly_eval(coeffs, x, kappa, reduction_poly, backend=None):
    """Evaluate row ``r`` of ``coeffs`` (rows, L) at every point in ``x[r]``.

    ``coeffs[:, k]`` is the coefficient of ``x**k``; returns shape ``(rows, m)``.
    """
    coeffs = np.ascontiguousarray(coeffs, dtype=np.uint64)
    x = np.ascontiguousarray(x, dtype=np.uint64)
    if coeffs.ndim != 2 or x.ndim != 2 or coeffs.shape[0] != x.shape[0]:
        raise ValueError("poly_eval expects coeffs (rows, L) and x (rows, m)")
    consts = field_constants(kappa, reduction_poly)
    if _resolve(backend) == "numba":
        return _nb_poly_eval(coeffs, x, *consts)
    return _np_poly_eval(coeffs, x, *consts)


def warmup():
    """Trigger numba compilation so timings exclude it."""
    if HAVE_NUMBA:
        a = np.arange(1, 5, dtype=np.uint64)
        gf_mul(a, a, 4, 0x13, backend="numba")
        poly_eval(a.reshape(2, 2), a.reshape(2, 2), 4, 0x13, backend="numba")
