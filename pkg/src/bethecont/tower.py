"""Order-by-order continuation away from a pseudo-vacuum (m = -1 or m = +1).

At the pseudo-vacuum the root generating function is gamma_0(t) = Delta(x t)
with Delta a closed-form kernel. Moving the filling along a one-parameter path
g_xi, with moment derivatives written as linear functionals Xi^p acting on a
function of t, the root function gamma(t, xi) obeys

    arctan(i + gamma(t)) = log(x t) / (2i)
        - sum_p xi^p Xi^p_u[ arctan(gamma(t) - gamma(u)) ]

and the energy is F(xi) = sum_p xi^p Xi^p_t[ 2 / (1 + (i + gamma(t))^2) ].
Each Xi^p is a weighted combination of the Laurent constant term [u^0] and of
(u d/du)^k derivatives at points on the unit circle, so gamma is carried as
local Taylor tables (in s = t - point, xi, and optionally one extra variable)
at t = 0 and at every point the functionals touch. x stays numeric.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial

import numpy as np
from scipy.special import binom

from . import series as S
from .moments import Filling

__all__ = [
    "Kernel",
    "KERNEL_MINUS",
    "KERNEL_PLUS",
    "Term",
    "Functional",
    "functionals_from_filling",
    "Tower",
]

_POINT_TOL = 1e-8


# ----------------------------------------------------------------------------
# kernels


def _poly(coeffs, n):
    out = np.zeros(n, dtype=complex)
    out[: min(n, len(coeffs))] = coeffs[:n]
    return out


def _sqrt_series(q):
    q0 = np.sqrt(q[0])
    w = q / q[0]
    w[0] = 0.0
    return q0 * S.compose(S.sqrt1p_coeffs(q.size), w)


def _delta_minus(y0: complex, n: int) -> np.ndarray:
    # -i/2 + (i/2) sqrt((1 - 9y) / (1 - y)), y = y0 + h
    q = S.divide(_poly([1 - 9 * y0, -9], n), _poly([1 - y0, -1], n))
    out = 0.5j * _sqrt_series(q)
    out[0] -= 0.5j
    return out


def _delta_plus(y0: complex, n: int) -> np.ndarray:
    # (i/2) (1+3y)/(1-y) [1 - sqrt(1 + 8 y (1-y) / (1+3y)^2)]
    num = S.mul(_poly([y0, 1], n), _poly([1 - y0, -1], n))
    den = S.mul(_poly([1 + 3 * y0, 3], n), _poly([1 + 3 * y0, 3], n))
    q = 8 * S.divide(num, den)
    q[0] += 1.0
    r = S.divide(_poly([1 + 3 * y0, 3], n), _poly([1 - y0, -1], n))
    inner = -_sqrt_series(q)
    inner[0] += 1.0
    return 0.5j * S.mul(r, inner)


@dataclass(frozen=True)
class Kernel:
    """Pseudo-vacuum root function gamma_0(t) = Delta(x t) and its sign.

    ``sign`` is the moment weight X_0 of the pseudo-vacuum (-1 at m = -1,
    +1 at m = +1).
    """

    name: str
    sign: int

    def taylor(self, y0: complex, n: int) -> np.ndarray:
        """Coefficients of Delta(y0 + h) in h, orders 0..n-1."""
        f = _delta_minus if self.sign < 0 else _delta_plus
        return f(complex(y0), n)

    def value(self, y) -> complex:
        return self.taylor(y, 1)[0]

    def local(self, x: float, t0: complex, n: int) -> np.ndarray:
        """Coefficients of Delta(x (t0 + s)) in s."""
        return self.taylor(x * t0, n) * x ** np.arange(n)


KERNEL_MINUS = Kernel("m=-1", -1)
KERNEL_PLUS = Kernel("m=+1", +1)


# ----------------------------------------------------------------------------
# functionals


@dataclass(frozen=True)
class Term:
    point: complex
    order: int
    weight: np.ndarray  # series in the extra variable


@dataclass(frozen=True)
class Functional:
    """F -> const * [t^0] F + sum_terms weight * (t d/dt)^order F(point)."""

    const: np.ndarray
    terms: tuple[Term, ...] = ()

    def apply_series(self, coeffs) -> complex:
        """Apply to a Taylor series sum_a F_a t^a (first extra-variable slot only)."""
        coeffs = np.asarray(coeffs, dtype=complex)
        a = np.arange(coeffs.size)
        val = self.const[0] * coeffs[0]
        for tm in self.terms:
            val += tm.weight[0] * np.sum(coeffs * a**tm.order * tm.point**a)
        return val


def _scalar_weight(w, ne):
    arr = np.zeros(ne, dtype=complex)
    arr[0] = w
    return arr


def _merge(terms, ne):
    out: list[Term] = []
    for tm in terms:
        for i, old in enumerate(out):
            if old.order == tm.order and abs(old.point - tm.point) < 1e-12:
                out[i] = Term(old.point, old.order, old.weight + tm.weight)
                break
        else:
            out.append(tm)
    return tuple(t for t in out if np.any(np.abs(t.weight) > 1e-15))


def _snap(z: complex) -> complex:
    # clean rounding noise on points like exp(i pi) = -1 + 1e-16 i
    z = complex(z)
    re, im = z.real, z.imag
    re = 0.0 if abs(re) < 1e-14 else re
    im = 0.0 if abs(im) < 1e-14 else im
    return complex(re, im)


def functionals_from_filling(filling: Filling, P: int, ne: int = 1) -> list[Functional]:
    """Xi^0 .. Xi^P for a filling whose blocks move affinely with its parameter.

    The filling at its current parameter must be a pseudo-vacuum, X_a = c delta_a0.
    An endpoint y = alpha + beta xi with weight w contributes, at order p >= 1,
    +-w (2 i pi beta)^p / (2 i pi p!) (t d/dt)^(p-1) F(exp(2 i pi alpha)).
    """
    base = filling.moments(np.arange(0, 6))
    if np.abs(base[1:]).max() > 1e-12:
        raise ValueError("filling is not a pseudo-vacuum at its base parameter")
    funcs = [Functional(_scalar_weight(base[0].real, ne))]
    xi0 = filling.param
    for p in range(1, P + 1):
        terms = []
        for b in filling.blocks:
            for (c, s), sign in ((b.hi, 1.0), (b.lo, -1.0)):
                if s == 0:
                    continue
                alpha = c + s * xi0
                w = sign * b.w * (2j * np.pi * s) ** p / (2j * np.pi * factorial(p))
                pt = _snap(np.exp(2j * np.pi * alpha))
                terms.append(Term(pt, p - 1, _scalar_weight(w, ne)))
        funcs.append(Functional(np.zeros(ne, dtype=complex), _merge(terms, ne)))
    return funcs


# ----------------------------------------------------------------------------
# the tower


@dataclass
class Tower:
    """Solved local tables of gamma(t, xi[, e]) around t = 0 and the functional points."""

    kernel: Kernel
    x: float
    functionals: list[Functional]
    ne: int = 1
    points: list[complex] = field(default_factory=list)
    tables: list[np.ndarray] = field(default_factory=list)
    ctil: np.ndarray | None = None
    c10: complex = 0.0

    @property
    def P(self) -> int:
        return len(self.functionals) - 1

    # -- setup ---------------------------------------------------------------

    @classmethod
    def solve(cls, kernel: Kernel, x: float, functionals, ne: int = 1) -> "Tower":
        self = cls(kernel, float(x), list(functionals), ne)
        f0 = self.functionals[0]
        if abs(f0.const[0] - kernel.sign) > 1e-12:
            raise ValueError("order-0 functional does not match the kernel's pseudo-vacuum")
        for f in self.functionals[1:]:
            if np.any(np.abs(f.const) > 0):
                raise ValueError("constant-term weights are only supported at order 0")
        for tm in f0.terms:
            if abs(tm.weight[0]) > 0:
                raise ValueError("order-0 point terms must vanish at the base point")
        pts: list[complex] = []
        kmax = 0
        for f in self.functionals:
            for tm in f.terms:
                kmax = max(kmax, tm.order)
                near = [q for q in pts if abs(q - tm.point) < _POINT_TOL]
                if near and abs(near[0] - tm.point) > 1e-12:
                    raise ValueError("two functional points coincide within tolerance")
                if not near:
                    pts.append(tm.point)
        for q in pts:
            if abs(abs(q) - 1) > 1e-12 and abs(q) < _POINT_TOL:
                raise ValueError("functional points must be away from t = 0")
        self.points = pts
        self._A = max(kmax + 1, 1)
        self._init_tables()
        self._run()
        return self

    def _pidx(self, pt: complex) -> int:
        for i, q in enumerate(self.points):
            if abs(q - pt) < 1e-12:
                return i
        raise KeyError(pt)

    def _init_tables(self):
        P, ne, A = self.P, self.ne, self._A
        x = self.x
        self.tables = []
        for pt in self.points:
            tab = np.zeros((A, P + 1, ne), dtype=complex)
            tab[:, 0, 0] = self.kernel.local(x, pt, A)
            self.tables.append(tab)
        loc0 = self.kernel.local(x, 0.0, 4)
        self.c10 = loc0[1]
        ct = np.zeros((2, P + 1, ne), dtype=complex)
        ct[:, 0, 0] = loc0[1:3] / self.c10
        ct[0, 0, 0] = 0.0
        self.ctil = ct
        # inverse Jacobians of the local equations at order xi^0
        s0 = self.kernel.sign
        self._jinv = []
        for tab in self.tables:
            g0 = tab[:, 0, 0]
            gg = S.mul(g0, g0 + np.r_[2j, np.zeros(A - 1)])
            one_g2 = S.mul(g0, g0)
            one_g2[0] += 1.0
            jac = S.reciprocal(gg) + s0 * S.reciprocal(one_g2)
            self._jinv.append(S.reciprocal(jac))
        gam0 = self._gamma0_series(ct[:, :1, :1])[:, 0, 0]
        onec = ct[:, 0, 0].copy()
        onec[0] += 1.0
        twog = gam0.copy()
        twog[0] += 2j
        g2 = S.mul(gam0, gam0)
        g2[0] += 1.0
        j0 = S.reciprocal(S.mul(onec, twog)) + s0 * self.c10 * S.shift(S.reciprocal(g2), (1,))
        self._jinv0 = S.reciprocal(j0)

    def _gamma0_series(self, ct):
        """gamma = c10 t (1 + c~) near t = 0, truncated to the t-degree of c~."""
        one = ct.copy()
        one[0, 0, 0] += 1.0
        return self.c10 * S.shift(one, (1, 0, 0))

    # -- residuals -----------------------------------------------------------

    def _couplings(self, k, W, const, powers, tpows):
        """sum_p xi^p Xi^p_u[arctan(gamma(t) - gamma(u))] for one local table."""
        shape = W.shape
        out = np.zeros(shape, dtype=complex)
        ne = self.ne
        # constant-term part: Xi^0 const * arctan(gamma(t) - gamma(0))
        cw = self.functionals[0].const
        at = S.compose(S.arctan_taylor_about(const, sum(n - 1 for n in shape) + 1), W)
        out += S.mul(at, cw[None, None, :], shape)
        # point terms, grouped by point u
        for j, u in enumerate(self.points):
            vpow = powers[j]
            cu = self._consts[j]
            nmax = len(tpows) + len(vpow)
            T = S.arctan_taylor_about(const - cu, nmax)
            K = S.theta_weights(u, self._A, self._A - 1)
            nq = len(tpows)
            C = self._binom_table(T, nq, len(vpow))
            U = np.zeros((nq, shape[1], ne), dtype=complex)
            used = False
            for p in range(min(k, self.P) + 1):
                for tm in self.functionals[p].terms:
                    if abs(tm.point - u) > 1e-12:
                        continue
                    used = True
                    V = np.stack(
                        [np.tensordot(K[tm.order, : vr.shape[0]], vr, axes=(0, 0)) for vr in vpow]
                    )
                    acc = np.tensordot(C, V, axes=(1, 0))
                    acc = S.mul(acc, tm.weight[None, None, :], acc.shape)
                    U += S.shift(acc, (0, p, 0))
            if not used:
                continue
            for q, tq in enumerate(tpows):
                if U[q].any():
                    out += S.mul(tq, U[q][None], shape)
        return out

    @staticmethod
    def _binom_table(T, nq, nr):
        """C[q, r] = T[q + r] C(q + r, q) (-1)^r, zero beyond the Taylor length."""
        q = np.arange(nq)[:, None]
        r = np.arange(nr)[None, :]
        n = q + r
        Tn = np.where(n < T.size, T[np.minimum(n, T.size - 1)], 0.0)
        return Tn * binom(n, q) * (-1.0) ** r

    def _residuals(self, k):
        """Residuals at all points and at t = 0, on tables truncated to xi-degree k."""
        tabs = [tab[:, : k + 1] for tab in self.tables]
        self._consts = [tab[0, 0, 0] for tab in tabs]
        pows = []
        for tab, c in zip(tabs, self._consts):
            w = tab.copy()
            w[0, 0, 0] = 0.0
            pows.append(S.power_family(w, sum(n - 1 for n in w.shape) + 1))
        res = []
        for tab, c, pw in zip(tabs, self._consts, pows):
            w = pw[1] if len(pw) > 1 else np.zeros_like(tab)
            nmax = sum(n - 1 for n in w.shape) + 1
            r = S.compose(S.arctan_taylor_about(1j + c, nmax), w)
            r += self._couplings(k, w, c, pows, pw)
            res.append(r)
        # t = 0, logarithmic form
        ct = self.ctil[:, : k + 1]
        gam = self._gamma0_series(ct)  # t-degree 0..1
        nmax = sum(n - 1 for n in ct.shape) + 2
        r0 = S.compose(S.log1p_coeffs(nmax), ct) / 2j
        r0 += S.compose(S.arctan_log_coeffs(nmax), gam)
        tp = S.power_family(gam, nmax)
        r0 += self._couplings(k, gam, 0.0, pows, tp)
        return res, r0

    def _run(self):
        ne = self.ne
        for k in range(self.P + 1):
            for e in range(ne):
                if k == 0 and e == 0:
                    continue
                res, r0 = self._residuals(k)
                for tab, r, jinv in zip(self.tables, res, self._jinv):
                    tab[:, k, e] = -S.mul(r[:, k, e], jinv)
                self.ctil[:, k, e] = -S.mul(r0[:, k, e], self._jinv0)

    # -- energy --------------------------------------------------------------

    def energy(self) -> np.ndarray:
        """F(xi, e) = sum_p xi^p Xi^p[2 / (1 + (i + gamma)^2)], shape (P+1, ne)."""
        P, ne = self.P, self.ne
        out = np.zeros((P + 1, ne), dtype=complex)
        ct = self.ctil
        gam = self._gamma0_series(ct)
        onec = ct.copy()
        onec[0, 0, 0] += 1.0
        twog = gam.copy()
        twog[0, 0, 0] += 2j
        h = 2.0 / self.c10 * S.reciprocal(S.mul(onec, twog))
        out += S.mul(h[1], self.functionals[0].const[None, :], out.shape)
        gloc = []
        for tab in self.tables:
            t2 = tab.copy()
            t2[0, 0, 0] += 2j
            gloc.append(2.0 * S.reciprocal(S.mul(tab, t2)))
        for p, f in enumerate(self.functionals):
            for tm in f.terms:
                j = self._pidx(tm.point)
                K = S.theta_weights(tm.point, tm.order, self._A - 1)[tm.order]
                val = np.tensordot(K, gloc[j], axes=(0, 0))
                val = S.mul(val, tm.weight[None, :], val.shape)
                out += S.shift(val, (p, 0))
        return out

    def table_at(self, point: complex) -> np.ndarray:
        return self.tables[self._pidx(point)]
