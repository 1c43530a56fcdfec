"""Truncated multivariate power series on dense complex arrays.

A series in up to three variables is stored as an ndarray whose entry
``a[i, j, k]`` is the coefficient of ``t**i x**j y**k``. The array shape is
the truncation: every product is cut back to the shape of its result.
"""

from __future__ import annotations

from functools import lru_cache
from math import comb

import numba
import numpy as np
from scipy.special import binom

__all__ = [
    "mul",
    "convolve",
    "power_family",
    "compose",
    "reciprocal",
    "divide",
    "log1p_coeffs",
    "sqrt1p_coeffs",
    "arctan_taylor_about",
    "arctan_log_coeffs",
    "reinstate_linear",
    "laurent_constant_term",
    "kappa",
    "theta_weights",
    "shift",
]


@numba.njit(cache=True)
def _mul3(a, b, out):
    n0, n1, n2 = out.shape
    for i0 in range(min(a.shape[0], n0)):
        for i1 in range(min(a.shape[1], n1)):
            for i2 in range(min(a.shape[2], n2)):
                v = a[i0, i1, i2]
                if v == 0:
                    continue
                for j0 in range(min(b.shape[0], n0 - i0)):
                    for j1 in range(min(b.shape[1], n1 - i1)):
                        for j2 in range(min(b.shape[2], n2 - i2)):
                            out[i0 + j0, i1 + j1, i2 + j2] += v * b[j0, j1, j2]
    return out


def _as3(a: np.ndarray) -> np.ndarray:
    return a.reshape(a.shape + (1,) * (3 - a.ndim))


def mul(a, b, shape=None) -> np.ndarray:
    """Truncated product of two series of equal rank (at most 3).

    Operands may be smaller than ``shape``; missing coefficients are zero.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.ndim != b.ndim or a.ndim > 3:
        raise ValueError(f"rank mismatch {a.shape} vs {b.shape}")
    shape = a.shape if shape is None else tuple(shape)
    out = np.zeros(shape + (1,) * (3 - len(shape)), dtype=complex)
    _mul3(np.ascontiguousarray(_as3(a)), np.ascontiguousarray(_as3(b)), out)
    return out.reshape(shape)


def convolve(a, b, n) -> np.ndarray:
    """Truncated product with result shape ``n`` (an int for one variable)."""
    return mul(a, b, (n,) if np.isscalar(n) else n)


def shift(a: np.ndarray, offsets, shape=None) -> np.ndarray:
    """Multiply by a monomial, truncating to ``shape`` (default: a.shape)."""
    shape = a.shape if shape is None else tuple(shape)
    out = np.zeros(shape, dtype=complex)
    src = tuple(slice(0, max(n - o, 0)) for n, o in zip(shape, offsets))
    dst = tuple(slice(o, o + max(n - o, 0)) for n, o in zip(shape, offsets))
    sub = a[tuple(slice(0, s.stop) for s in src)]
    out[tuple(slice(d.start, d.start + k) for d, k in zip(dst, sub.shape))] = sub
    return out


def _zero_constant(w: np.ndarray) -> None:
    if w.size and abs(w.flat[0]) > 0:
        raise ValueError("inner series must have zero constant term")


def power_family(w, kmax: int) -> list[np.ndarray]:
    """Powers w**0 .. w**kmax, stopping early once a power truncates to zero."""
    w = np.asarray(w, dtype=complex)
    one = np.zeros_like(w)
    one.flat[0] = 1.0
    out = [one]
    p = one
    for _ in range(kmax):
        p = mul(p, w)
        out.append(p)
        if not p.any():
            break
    return out


def compose(coeffs, w) -> np.ndarray:
    """sum_n coeffs[n] * w**n for a series w without constant term."""
    w = np.asarray(w, dtype=complex)
    _zero_constant(w)
    res = np.zeros_like(w)
    res.flat[0] = coeffs[0]
    p = None
    for c in coeffs[1:]:
        p = w.copy() if p is None else mul(p, w)
        if not p.any():
            break
        if c != 0:
            res += c * p
    return res


def _max_degree(shape) -> int:
    return int(sum(n - 1 for n in shape)) + 1


def reciprocal(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    a0 = a.flat[0]
    if a0 == 0:
        raise ZeroDivisionError("series with zero constant term")
    w = a / a0
    w.flat[0] = 0.0
    n = _max_degree(a.shape)
    return compose((-1.0) ** np.arange(n + 1), w) / a0


def divide(a, b) -> np.ndarray:
    return mul(a, reciprocal(b))


def log1p_coeffs(n: int) -> np.ndarray:
    k = np.arange(1, n + 1)
    return np.concatenate([[0.0], (-1.0) ** (k + 1) / k])


def sqrt1p_coeffs(n: int) -> np.ndarray:
    return binom(0.5, np.arange(n + 1))


def arctan_taylor_about(z0: complex, n: int) -> np.ndarray:
    """Taylor coefficients of arctan(z0 + w) in w, orders 0..n."""
    z0 = complex(z0)
    d = 1.0 + z0 * z0
    if abs(d) < 1e-300:
        raise ValueError("expansion point is a branch point of arctan")
    t = np.zeros(n + 1, dtype=complex)
    t[0] = np.arctan(z0)
    if n >= 1:
        t[1] = 1.0 / d
    for k in range(1, n):
        t[k + 1] = -(2.0 * z0 * k * t[k] + (k - 1) * t[k - 1]) / (d * (k + 1))
    return t


def arctan_log_coeffs(n: int) -> np.ndarray:
    """S_k with arctan(i + w) = log(i w / 2) / (2i) + sum_{k>=1} S_k w**k."""
    k = np.arange(1, n + 1)
    s = (-1.0) ** k / (k * (2j) ** k) / 2j
    return np.concatenate([[0.0], s])


def reinstate_linear(powers, index, value) -> list[np.ndarray]:
    """Update the powers of w after adding ``value`` at coefficient ``index``.

    ``powers[k]`` holds w**k with the entry at ``index`` still zero. Uses
    (w + v m)**n = sum_k C(n, k) v**(n-k) m**(n-k) w**k with m the monomial.
    """
    shape = powers[0].shape
    kmax = len(powers) - 1
    out = []
    for n in range(kmax + 1):
        acc = np.zeros(shape, dtype=complex)
        for k in range(n + 1):
            j = n - k
            offs = tuple(j * i for i in index)
            if any(o >= s for o, s in zip(offs, shape)):
                continue
            acc += comb(n, k) * value**j * shift(powers[k], offs)
        out.append(acc)
    return out


def laurent_constant_term(h, order: int):
    """[t^0] of t**(-order) h(t), with h a series along its first axis."""
    h = np.asarray(h)
    if order < 0 or order >= h.shape[0]:
        raise ValueError("series too short for the requested pole order")
    return h[order]


@lru_cache(maxsize=None)
def kappa(i: int, j: int) -> int:
    """(t d/dt)**i (t + 1)**j at t = -1, i.e. sum_k C(j,k) k**i (-1)**k."""
    return sum(comb(j, k) * k**i * (-1) ** k for k in range(j + 1))


def theta_weights(point: complex, kmax: int, amax: int) -> np.ndarray:
    """K[k, a] = (t d/dt)**k (t - point)**a evaluated at t = point."""
    return _kappa_table(kmax, amax) * (-complex(point)) ** np.arange(amax + 1)


@lru_cache(maxsize=None)
def _kappa_table(kmax: int, amax: int) -> np.ndarray:
    tab = np.array([[float(kappa(k, a)) for a in range(amax + 1)] for k in range(kmax + 1)])
    tab.setflags(write=False)
    return tab
