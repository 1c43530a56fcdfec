"""Finite-size Bethe equations of the non-compact chain.

Logarithmic form, with twist phi and Bethe numbers I_k:

    arctan(lam_k) = pi I_k / L + i phi - (g / L) sum_l arctan(lam_k - lam_l)

g = +1 is the s = -1 chain. g = -1 is the mirror (s = +1 chain with the
twist placed so that roots still tend to i), whose energy per site gives the
s = -1 energy at the negative density -N/L.

Untwisted real roots are found by minimising a strictly convex potential;
twisted roots by Newton continuation in phi, with unknowns delta = lam - i so
that arctan(i + delta) stays accurate when delta is tiny.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

log = logging.getLogger(__name__)

__all__ = [
    "BetheState",
    "solve_untwisted",
    "solve_twisted",
    "energy",
    "residual_log",
    "residual_exp",
    "convex_potential",
]


@dataclass
class BetheState:
    L: int
    numbers: np.ndarray
    roots: np.ndarray
    phi: float
    g: int = 1
    residual: float = np.nan
    delta: np.ndarray | None = None  # lam - i, kept separately for accuracy near i

    def __post_init__(self):
        if self.delta is None:
            self.delta = np.asarray(self.roots, dtype=complex) - 1j

    @property
    def N(self) -> int:
        return self.numbers.size

    @property
    def energy(self) -> float:
        return energy(self)


def _atan_i(delta):
    # arctan(i + delta) = (log(i delta) - log(2 - i delta)) / (2i)
    return (np.log(1j * delta) - np.log(2.0 - 1j * delta)) / 2j


def _log_residual(delta, numbers, L, phi, g):
    d = delta[:, None] - delta[None, :]
    inter = np.arctan(d).sum(axis=1)
    return _atan_i(delta) - np.pi * numbers / L - 1j * phi + g * inter / L


def _jacobian(delta, L, g):
    d = delta[:, None] - delta[None, :]
    k = 1.0 / (1.0 + d * d)
    np.fill_diagonal(k, 0.0)
    jac = -(g / L) * k
    jac[np.diag_indices_from(jac)] = 1.0 / (delta * (delta + 2j)) + (g / L) * k.sum(axis=1)
    return jac


def residual_log(state: BetheState) -> float:
    delta = state.delta
    return float(np.abs(_log_residual(delta, state.numbers, state.L, state.phi, state.g)).max())


def residual_exp(state: BetheState) -> float:
    """Max relative mismatch of the product form of the equations."""
    delta = state.delta
    L, phi, g = state.L, state.phi, state.g
    d = delta[:, None] - delta[None, :]
    # compare logarithms of both sides to avoid overflow of the L-th power
    lhs = L * np.log(delta / (delta + 2j))
    ratio = (d + 1j) / (d - 1j)
    np.fill_diagonal(ratio, 1.0)
    rhs = -2 * phi * L + g * np.log(ratio).sum(axis=1)
    diff = (lhs - rhs) / (2j * np.pi)
    return float(np.abs(np.sin(np.pi * (diff - np.round(diff.real)))).max())


def energy(state: BetheState) -> float:
    """Energy per site, (g / L) sum_k 2 / (lam_k^2 + 1)."""
    delta = state.delta
    e = state.g * np.sum(2.0 / (delta * (delta + 2j))) / state.L
    return complex(e).real if abs(complex(e).imag) < 1e-9 * max(1.0, abs(e)) else complex(e)


def convex_potential(lam, numbers, L):
    lam = np.asarray(lam, dtype=float)

    def A(x):
        return x * np.arctan(x) - 0.5 * np.log1p(x * x)

    d = lam[:, None] - lam[None, :]
    return A(lam).sum() / np.pi - (lam * numbers).sum() / L + A(d).sum() / (2 * np.pi * L)


def _check_numbers(numbers, L):
    numbers = np.sort(np.asarray(numbers, dtype=float))
    N = numbers.size
    if np.unique(numbers).size != N:
        raise ValueError("Bethe numbers must be distinct")
    frac = (numbers * 2) % 2
    want = 0.0 if N % 2 else 1.0
    if L % 2 == 0 and not np.allclose(frac, want):
        raise ValueError("Bethe numbers have the wrong parity for N")
    bound = (L + N - 1) / 2
    if np.any(np.abs(numbers) >= bound):
        raise ValueError("Bethe numbers outside the admissible range")
    return numbers


def solve_untwisted(L: int, numbers, tol: float = 1e-12) -> BetheState:
    """Real roots at phi = 0 via the convex potential, then Newton polish."""
    numbers = _check_numbers(numbers, L)
    N = numbers.size

    def grad(lam, *_):
        d = lam[:, None] - lam[None, :]
        return np.arctan(lam) / np.pi - numbers / L + np.arctan(d).sum(axis=1) / (np.pi * L)

    def hess(lam, *_):
        d = lam[:, None] - lam[None, :]
        k = 1.0 / (1.0 + d * d)
        np.fill_diagonal(k, 0.0)
        h = -k / (np.pi * L)
        h[np.diag_indices(N)] = 1.0 / (np.pi * (1 + lam * lam)) + k.sum(axis=1) / (np.pi * L)
        return h

    x0 = np.tan(np.clip(np.pi * numbers / L, -1.5, 1.5))
    res = minimize(
        convex_potential, x0, args=(numbers, L), jac=grad, hess=hess,
        method="trust-exact", options={"gtol": 1e-13, "maxiter": 500},
    )
    lam = res.x
    for _ in range(20):
        g = grad(lam)
        if np.abs(g).max() < tol * 1e-2:
            break
        lam = lam - np.linalg.solve(hess(lam), g)
    state = BetheState(L, numbers, lam.astype(complex), 0.0, 1)
    state.residual = residual_log(state)
    if state.residual > tol:
        raise RuntimeError(f"untwisted solve did not converge (residual {state.residual:.2e})")
    return state


def _newton(delta, numbers, L, phi, g, tol, maxiter):
    for it in range(maxiter):
        r = _log_residual(delta, numbers, L, phi, g)
        err = np.abs(r).max()
        if not np.isfinite(err):
            return delta, np.inf, it
        if err < tol:
            # one more step to reach the rounding floor
            step = np.linalg.solve(_jacobian(delta, L, g), r)
            polished = delta - step
            r2 = np.abs(_log_residual(polished, numbers, L, phi, g)).max()
            return (polished, r2, it + 1) if r2 <= err else (delta, err, it)
        step = np.linalg.solve(_jacobian(delta, L, g), r)
        # damp steps that would move a root by more than half its distance to i
        lim = 0.5 * np.abs(delta)
        scale = min(1.0, float(np.min(lim / np.maximum(np.abs(step), 1e-300))))
        delta = delta - scale * step
    r = _log_residual(delta, numbers, L, phi, g)
    return delta, np.abs(r).max(), maxiter


def solve_twisted(
    L: int,
    numbers,
    phis,
    phi_start: float = 4.0,
    g: int = 1,
    tol: float = 1e-12,
    dphi: float = 0.25,
    min_step: float = 1e-4,
) -> list[BetheState]:
    """Twisted roots at each phi in ``phis`` by continuation from phi_start downward.

    Results are returned in the order of ``phis``.
    """
    numbers = _check_numbers(numbers, L)
    if numbers.size and (numbers.min() <= -L / 2 or numbers.max() > L / 2):
        raise ValueError("continuation from large phi needs first-level numbers")
    phis = np.atleast_1d(np.asarray(phis, dtype=float))
    targets = sorted(set(phis.tolist()), reverse=True)
    phi = max(phi_start, targets[0])
    x = np.exp(-2 * phi)
    t = np.exp(2j * np.pi * numbers / L)
    delta = -2j * x * t
    delta, err, _ = _newton(delta, numbers, L, phi, g, tol, 50)
    if err > tol:
        raise RuntimeError(f"no convergence at phi_start={phi}")
    found: dict[float, BetheState] = {}
    prev = None  # (phi, delta) for the secant predictor
    for target in targets:
        while phi > target + 1e-15:
            h = min(dphi, phi - target)
            while True:
                new_phi = phi - h
                guess = delta
                if prev is not None:
                    guess = delta + (delta - prev[1]) * (h / (prev[0] - phi))
                cand, err, its = _newton(guess, numbers, L, new_phi, g, tol, 30)
                ok = err < tol
                if ok and cand.size > 1:
                    dist = np.abs(cand[:, None] - cand[None, :]) + np.eye(cand.size)
                    if dist.min() < 1e-10:
                        raise RuntimeError(f"root collision near phi={new_phi}")
                if ok:
                    break
                h /= 2
                if h < min_step:
                    raise RuntimeError(f"continuation stalled at phi={phi}")
            prev = (phi, delta)
            phi, delta = new_phi, cand
        state = BetheState(L, numbers, delta + 1j, phi, g, delta=delta)
        state.residual = residual_log(state)
        found[target] = state
    return [found[p] for p in phis.tolist()]
