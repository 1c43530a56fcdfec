"""Expansion of the energy in powers of x = exp(-2 phi) at fixed filling.

Roots are written lambda(t) = i + delta(t, x) with t = exp(2 i pi I / L) and
delta = sum_{a,b>=1} c_ab t^a x^b, c_11 = -2i. The Bethe equations become a
fixed-point problem for the series delta which is solved one power of x at a
time. Moments may carry one extra series variable (for instance a
perturbation parameter), stored on a trailing axis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np

from . import series as S
from .moments import Filling, standard

__all__ = [
    "LargePhiSeries",
    "expand_coefficients",
    "estimate_radius",
    "evaluate",
    "dual_expansion_crosscheck",
    "dual_closed_forms",
]

C11 = -2j


@dataclass
class LargePhiSeries:
    """Energy coefficients f_b, b = -1 .. M-2, in F = sum_b f_b x**b."""

    f: np.ndarray
    c: np.ndarray = field(repr=False)
    M: int = 0

    @property
    def orders(self) -> np.ndarray:
        return np.arange(-1, self.f.shape[0] - 1)

    def coeff(self, b: int):
        return self.f[b + 1]


def _moment_table(moments, M: int) -> np.ndarray:
    a = np.arange(-1, M + 1)
    if isinstance(moments, Filling):
        return moments.moments(a)
    X = np.asarray(moments(a), dtype=complex)
    if X.shape[0] != a.size:
        raise ValueError("moment callable must return one entry per index")
    return X


def _residual(delta: np.ndarray, X: np.ndarray, xdeg: int) -> np.ndarray:
    """Bethe-equation residual as a (t, x[, e]) series up to x-degree xdeg."""
    nt = delta.shape[0]
    extra = delta.shape[2:]
    d = delta[:, : xdeg + 2]
    shape = (nt, xdeg + 1) + extra
    ctil = np.zeros(shape, dtype=complex)
    ctil[: nt - 1] = d[1:, 1 : xdeg + 2] / C11
    ctil[(0, 0) + (0,) * len(extra)] = 0.0
    dd = np.zeros(shape, dtype=complex)
    dd[:] = d[:, : xdeg + 1]

    nmax = xdeg + 2 + sum(n - 1 for n in extra)
    res = S.compose(S.log1p_coeffs(nmax), ctil) / 2j
    res += S.compose(S.arctan_log_coeffs(nmax), dd)

    pw = S.power_family(dd, nmax)
    # Y_r(x) = sum_a X_a [u^a] delta(u)^r, a series in x (and the extra variable)
    xe = X[1:].reshape((X.shape[0] - 1, 1) + extra)
    ys = []
    for p in pw:
        acc = np.zeros((1, xdeg + 1) + extra, dtype=complex)
        for a in range(min(nt, xe.shape[0])):
            if p[a].any():
                acc += S.mul(xe[a][None], p[a][None], acc.shape)
        ys.append(acc)
    at0 = S.arctan_taylor_about(0.0, 2 * len(pw) + 1)
    for q, pq in enumerate(pw):
        u = np.zeros((1, xdeg + 1) + extra, dtype=complex)
        for r, yr in enumerate(ys):
            n = q + r
            if n < at0.size and at0[n] != 0:
                u += at0[n] * comb(n, q) * (-1) ** r * yr
        if u.any():
            res += S.mul(pq, u, shape)
    return res


def expand_coefficients(moments, M: int = 20) -> LargePhiSeries:
    """Coefficients f_{-1} .. f_{M-2} of the energy per site in powers of exp(-2 phi).

    ``moments`` is a Filling or a callable a -> X_a (array with one row per a,
    optionally with a trailing axis holding a series in an extra variable).
    """
    if M < 2:
        raise ValueError("M must be at least 2")
    X = _moment_table(moments, M)
    extra = X.shape[1:]
    if len(extra) > 1:
        raise ValueError("at most one extra series variable")
    zero_e = (0,) * len(extra)
    delta = np.zeros((M + 1, M + 1) + extra, dtype=complex)
    delta[(1, 1) + zero_e] = C11
    for b in range(2, M + 1):
        r = _residual(delta, X, b - 1)
        # linear part of the residual at x^(b-1) is (1/2i) c~_{a,b-1} = delta_{a+1,b} / (2i c11)
        delta[1:, b] = -2j * C11 * r[: M, b - 1]
    f = _energy(delta, X, M)
    return LargePhiSeries(f=f, c=delta, M=M)


def _energy(delta: np.ndarray, X: np.ndarray, M: int) -> np.ndarray:
    extra = delta.shape[2:]
    zero_e = (0,) * len(extra)
    nt = M
    shape = (nt, M) + extra
    ctil = np.zeros(shape, dtype=complex)
    ctil[:] = delta[1 : nt + 1, 1 : M + 1] / C11
    ctil[(0, 0) + zero_e] = 0.0
    one_c = ctil.copy()
    one_c[(0, 0) + zero_e] += 1.0
    two_d = np.zeros(shape, dtype=complex)
    two_d[:] = delta[:nt, :M]
    two_d[(0, 0) + zero_e] += 2j
    g = 2.0 / C11 * S.reciprocal(S.mul(one_c, two_d))
    # f_b = sum_{a>=-1} X_a [t^{a+1} x^{b+1}] g
    f = np.zeros((M,) + extra, dtype=complex)
    for b in range(-1, M - 1):
        for a in range(-1, min(b, nt - 2) + 1):
            coef = g[a + 1, b + 1]
            if extra:
                f[b + 1] += S.mul(X[a + 1], coef, extra)
            else:
                f[b + 1] += X[a + 1] * coef
    return f


def evaluate(series: LargePhiSeries, x, terms: int | None = None):
    """Sum of the first ``terms`` coefficients at x = exp(-2 phi)."""
    x = np.asarray(x, dtype=float)
    f = series.f if terms is None else series.f[:terms]
    if np.any(x == 0) and abs(f[0]) > 0:
        raise ValueError("x = 0 (phi = infinity) with a nonzero 1/x coefficient diverges")
    # Horner in x for b >= 0, plus the 1/x term only when present
    val = np.polyval(f[1:][::-1], x) if f.size > 1 else np.zeros_like(x, dtype=complex)
    if f[0] != 0:
        val = val + f[0] / x
    return val


def estimate_radius(coeffs, tail: int | None = None) -> float:
    """Convergence radius in x from a smoothed root test on the trailing coefficients.

    log|f_b| is fitted linearly in b over the last ceil(n/2) non-negligible
    coefficients (b >= 1); the radius is exp(-slope).
    """
    f = np.abs(np.asarray(coeffs.f if isinstance(coeffs, LargePhiSeries) else coeffs))
    if f.ndim != 1 or f.size < 8:
        raise ValueError("need at least 8 coefficients")
    b = np.arange(-1, f.size - 1) if isinstance(coeffs, LargePhiSeries) else np.arange(f.size)
    if np.all(f[b >= 1][-(-f.size // 2):] < 1e-13):
        return float("inf")
    keep = (b >= 1) & (f > 1e-13 * f.max())
    b, f = b[keep], f[keep]
    if b.size < 3:
        raise ValueError("too few coefficients for a radius estimate")
    n = tail or -(-b.size // 2)
    b, f = b[-max(n, 3):], f[-max(n, 3):]
    slope, _ = np.polyfit(b, np.log(f), 1)
    return float(np.exp(-slope))


def dual_closed_forms(M_m: int, M_u: int) -> np.ndarray:
    """[m^j x^b] of the m-expansion of the standard-filling energy, j <= 4, b = -1 .. M_u.

    Uses g_1 = 2 cosh^2 phi, g_2 = 0, g_3 = -(pi^2/6) cosh 2 phi and
    g_4 = (pi^2/3)(1 + tanh^2 phi), each rewritten as a series in x.
    """
    if not 0 <= M_m <= 4:
        raise ValueError("closed forms are known up to order 4 in m")
    nb = M_u + 2
    out = np.zeros((M_m + 1, nb))

    def put(j, b, v):
        if j <= M_m and b + 1 < nb:
            out[j, b + 1] += v

    # 2 cosh^2 phi = 1/(2x) + 1 + x/2; cosh 2 phi = (1/x + x)/2
    for b, v in ((-1, 0.5), (0, 1.0), (1, 0.5)):
        put(1, b, v)
    for b in (-1, 1):
        put(3, b, -np.pi**2 / 12)
    # tanh^2 phi = (1 - x)^2 / (1 + x)^2 = 1 + sum_{k>=1} 4 k (-1)^k x^k
    put(4, 0, 2 * np.pi**2 / 3)
    for k in range(1, nb):
        put(4, k, np.pi**2 / 3 * 4 * k * (-1) ** k)
    return out


def dual_expansion_crosscheck(M_m: int = 4, M_u: int = 4):
    """Compare [m^j x^b] from the x-expansion (exact Taylor moments in m) with the closed forms.

    Returns (max abs difference, computed table, closed-form table).
    """
    base = Filling(standard(0.0).blocks, 0.0, "standard")
    series = expand_coefficients(lambda a: base.moment_taylor(a, M_m), M_u + 2)
    got = series.f.T  # (m-order, b)
    want = dual_closed_forms(M_m, M_u)
    return float(np.abs(got - want).max()), got, want
