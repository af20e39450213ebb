"""Hot numeric kernels: counter-based RNG, pairwise summation, energy quadrature.

Each kernel has a numba @njit fast path and a pure-numpy twin.  The numba path
is the default whenever numba imports; set LIESTAB_NO_NUMBA=1 to force the
numpy path.  Both paths are deterministic: per-sample randomness is a pure
function of (seed, index), parallel loops write disjoint slots only, and all
reductions go through a fixed-order pairwise sum.
"""

from __future__ import annotations

import os

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX_A = 0xBF58476D1CE4E5B9
_MIX_B = 0x94D049BB133111EB
_SLOT = 0xC2B2AE3D27D4EB4F

#: Taylor terms for the scaled matrix exponential; with the norm scaled below
#: 1/2 the truncation error is ~1e-22, far under roundoff.
_TAYLOR_TERMS = 17


def _numba_disabled_by_env() -> bool:
    return os.environ.get("LIESTAB_NO_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}


try:
    if _numba_disabled_by_env():
        raise ImportError("numba disabled via LIESTAB_NO_NUMBA")
    from numba import njit, prange

    NUMBA_ENABLED = True
except ImportError:
    NUMBA_ENABLED = False


def backend() -> str:
    """Name of the active kernel path: 'numba' or 'numpy'."""
    return "numba" if NUMBA_ENABLED else "numpy"


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a 64-bit integer (python-int version)."""
    z = (z + _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * _MIX_A) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX_B) & _MASK64
    return z ^ (z >> 31)


def _mix64_array(z: np.ndarray) -> np.ndarray:
    z = (z + np.uint64(_GOLDEN))
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX_A)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX_B)
    return z ^ (z >> np.uint64(31))


def uniforms(seed: int, count: int, slots: int) -> np.ndarray:
    """(count, slots) array of floats in [0, 1); entry (i, s) depends only on
    (seed, i, s), so any evaluation schedule yields identical samples."""
    base = mix64(int(seed) & _MASK64)
    idx = np.arange(count, dtype=np.uint64)
    out = np.empty((count, slots), dtype=np.float64)
    for s in range(slots):
        state = np.uint64(base) + idx * np.uint64(_GOLDEN) + np.uint64(((s + 1) * _SLOT) & _MASK64)
        out[:, s] = (_mix64_array(state) >> np.uint64(11)).astype(np.float64) * 2.0**-53
    return out


def pairwise_sum(values) -> float:
    """Fixed-order pairwise summation; bit-stable for a given input array."""
    x = np.asarray(values, dtype=np.float64).ravel()
    if x.size == 0:
        return 0.0
    x = x.copy()
    while x.size > 1:
        half = x.size // 2
        head = x[0 : 2 * half : 2] + x[1 : 2 * half : 2]
        if x.size & 1:
            head = np.concatenate([head, x[2 * half :]])
        x = head
    return float(x[0])


def _expm1m_batch(x: np.ndarray) -> np.ndarray:
    """expm(X) - I for a batch (N, n, n), by scaling + Taylor + squaring.

    The identity is never added, so results stay accurate in absolute terms
    even when X is tiny; exp(2X) - I = Q^2 + 2Q recovers each squaring.
    """
    num, n, _ = x.shape
    if num == 0:
        return x.copy()
    norms = np.abs(x).sum(axis=2).max(axis=1)
    top = float(norms.max(initial=0.0))
    squarings = 0
    while top > 0.5:
        top *= 0.5
        squarings += 1
    xs = x / float(2**squarings)
    eye = np.eye(n)
    p = np.broadcast_to(eye, xs.shape).copy()
    for k in range(_TAYLOR_TERMS, 1, -1):
        p = eye + (xs @ p) / k
    q = xs @ p
    for _ in range(squarings):
        q = q @ q + 2.0 * q
    return q


def energy_deviation_numpy(
    a: np.ndarray,
    g2: np.ndarray,
    c2: np.ndarray,
    w_values: np.ndarray,
    dw_values: np.ndarray,
    t: float,
) -> np.ndarray:
    """Per-sample energy-density deviation from t = 0 (pure numpy path).

    a: (n1, n2) rows phi(E_j); g2, c2: codomain metric and constants;
    w_values: (N, n2) field samples; dw_values: (N, n1, n2) frame derivatives.
    For sample i the left-trivialized frame image is
        theta_j = Ad_{exp(-t W_i)} a_j + t dW_{ij},
    and the returned value is (1/2) sum_j (|theta_j|^2 - |a_j|^2), evaluated
    as <u, g (u + 2 a_j)> with u = theta_j - a_j so that near-cancellation at
    small t costs no precision.
    """
    admat = np.einsum("ib,bak->ika", w_values, c2) * (-t)
    q = _expm1m_batch(admat)
    u = np.einsum("ika,ja->ijk", q, a) + t * dw_values
    v = u + 2.0 * a[np.newaxis, :, :]
    return 0.5 * np.einsum("ijk,kl,ijl->i", u, g2, v)


if NUMBA_ENABLED:

    @njit(cache=True)
    def _expm1m_single(x):
        n = x.shape[0]
        norm = 0.0
        for r in range(n):
            rowsum = 0.0
            for c in range(n):
                rowsum += abs(x[r, c])
            if rowsum > norm:
                norm = rowsum
        squarings = 0
        while norm > 0.5:
            norm *= 0.5
            squarings += 1
        xs = x / (2.0**squarings)
        eye = np.eye(n)
        p = np.eye(n)
        for k in range(_TAYLOR_TERMS, 1, -1):
            p = eye + (xs @ p) / k
        q = xs @ p
        for _ in range(squarings):
            q = q @ q + 2.0 * q
        return q

    @njit(cache=True, parallel=True)
    def _energy_deviation_numba(a, g2, c2, w_values, dw_values, t):
        num = w_values.shape[0]
        n1 = a.shape[0]
        n2 = a.shape[1]
        out = np.empty(num)
        for i in prange(num):
            admat = np.zeros((n2, n2))
            for b in range(n2):
                wb = -t * w_values[i, b]
                if wb != 0.0:
                    for col in range(n2):
                        for k in range(n2):
                            admat[k, col] += wb * c2[b, col, k]
            q = _expm1m_single(admat)
            acc = 0.0
            for j in range(n1):
                u = np.empty(n2)
                for k in range(n2):
                    s = t * dw_values[i, j, k]
                    for col in range(n2):
                        s += q[k, col] * a[j, col]
                    u[k] = s
                for k in range(n2):
                    gv = 0.0
                    for l in range(n2):
                        gv += g2[k, l] * (u[l] + 2.0 * a[j, l])
                    acc += u[k] * gv
            out[i] = 0.5 * acc
        return out


def energy_deviation(a, g2, c2, w_values, dw_values, t: float) -> np.ndarray:
    """Dispatch to the active kernel path (see energy_deviation_numpy)."""
    a = np.ascontiguousarray(a, dtype=np.float64)
    g2 = np.ascontiguousarray(g2, dtype=np.float64)
    c2 = np.ascontiguousarray(c2, dtype=np.float64)
    w_values = np.ascontiguousarray(w_values, dtype=np.float64)
    dw_values = np.ascontiguousarray(dw_values, dtype=np.float64)
    if NUMBA_ENABLED:
        return _energy_deviation_numba(a, g2, c2, w_values, dw_values, float(t))
    return energy_deviation_numpy(a, g2, c2, w_values, dw_values, float(t))
