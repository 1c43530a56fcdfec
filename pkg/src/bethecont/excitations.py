"""First-level particle and hole excitations above a state at m = -1.

Adding (eta > 0) or removing (eta < 0) a root at scaled position z shifts the
moments by eta exp(2 i pi a z). The per-root energy change is dF/deta, which
is computed exactly by carrying eta as a first-order series variable through
the same recurrences used for the energy.

Pairs (z_p, z_h) with -1/4 < z_p < 1/4 and 1/4 < |z_h| < 1/2 are kept when
delta = dF/deta(z_p) - dF/deta(z_h) is real.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .largephi import LargePhiSeries, expand_coefficients
from .moments import Filling
from .pseudovacuum import EnergySeries
from .tower import KERNEL_MINUS, Functional, Term, Tower
from .trajectory import TRAJ1, TrajectorySpec, get_trajectory

__all__ = [
    "PairedExcitation",
    "GUARD",
    "eta_derivative_largephi",
    "eta_derivative_pseudovacuum_phi0",
    "eta_derivative_along_trajectory",
    "pair_real",
    "gap_scan",
    "windows",
]

GUARD = 1e-6


@dataclass(frozen=True)
class PairedExcitation:
    z_p: float
    z_h: float
    delta: float
    imag: float


def _perturbed(base, z: float):
    def X(a):
        a = np.asarray(a)
        if isinstance(base, Filling):
            x0 = base.moments(a)
        else:
            x0 = np.asarray(base(a), dtype=complex)
        return np.column_stack([x0, np.exp(2j * np.pi * a * z)])

    return X


def eta_derivative_largephi(base, z: float, M: int = 13) -> LargePhiSeries:
    """Series of dF/deta in x = exp(-2 phi); coefficients b = -1 .. M-2."""
    if not -0.5 < z <= 0.5:
        raise ValueError("z must lie in (-1/2, 1/2]")
    full = expand_coefficients(_perturbed(base, z), M)
    return LargePhiSeries(f=full.f[:, 1], c=full.c, M=M)


def eta_derivative_pseudovacuum_phi0(z):
    """(e^{-2i pi z}/2)(e^{2i pi z} - 1)^2 sqrt((9 e^{2i pi z} - 1)/(e^{2i pi z} - 1)) at x = 1."""
    z = np.asarray(z, dtype=float)
    w = np.exp(2j * np.pi * z)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = 0.5 / w * (w - 1) ** 2 * np.sqrt((9 * w - 1) / (w - 1))
    return np.where(np.abs(w - 1) < 1e-300, 0.0, val)


def _excitation_functionals(spec: TrajectorySpec, z: float, P: int) -> list[Functional]:
    funcs = spec.functionals(P, ne=2)
    w = np.exp(2j * np.pi * z)
    for f in funcs:
        for tm in f.terms:
            d = abs(tm.point - w)
            if 1e-12 < d < 1e-8:
                raise ValueError(f"z={z} collides with expansion point {tm.point}")
    if abs(w.imag) < 1e-14:
        w = complex(w.real, 0.0)
    f0 = funcs[0]
    eta = np.array([0.0, 1.0], dtype=complex)
    funcs[0] = Functional(f0.const, f0.terms + (Term(w, 0, eta),))
    return funcs


def eta_derivative_along_trajectory(
    spec: TrajectorySpec | str = TRAJ1, z: float = 0.5, x: float = 1.0, P: int = 4
) -> EnergySeries:
    """xi-coefficients of dF/deta along a path from the pseudo-vacuum."""
    if isinstance(spec, str):
        spec = get_trajectory(spec)
    if not 0 < x <= 1:
        raise ValueError("x must lie in (0, 1]")
    if abs(x * np.exp(2j * np.pi * z) - 1) < 1e-8:
        raise ValueError("z = 0 at x = 1 sits on the kernel branch point; the limit is 0")
    tower = Tower.solve(KERNEL_MINUS, x, _excitation_functionals(spec, z, P), ne=2)
    return EnergySeries("xi", tower.energy()[:, 1], x)


def windows(guard: float = GUARD):
    """Particle window (-1/4, 1/4) and the two halves of the hole window."""
    return (
        [(-0.25 + guard, 0.25 - guard)],
        [(0.25 + guard, 0.5 - guard), (-0.5 + guard, -0.25 - guard)],
    )


def _sign_change_roots(fn, lo, hi, n, cache):
    zs = np.linspace(lo, hi, n)
    vals = np.array([cache(z) for z in zs])
    roots = []
    for i in range(n - 1):
        a, b = vals[i], vals[i + 1]
        if a == 0:
            roots.append(zs[i])
        elif a * b < 0:  # False when either side is nan
            roots.append(brentq(fn, zs[i], zs[i + 1], xtol=1e-12, rtol=1e-14))
    if vals[-1] == 0:
        roots.append(zs[-1])
    return roots


def pair_real(
    zs,
    curve: Callable[[float], complex],
    partner_points: int = 241,
    guard: float = GUARD,
) -> list[PairedExcitation]:
    """Partner each z with positions in the complementary window where Im dF/deta matches.

    ``curve`` maps z to dF/deta. Returns one PairedExcitation per partner
    found (several per z when the matching condition is multi-valued).
    """
    memo: dict[float, complex] = {}

    def c(z):
        z = float(z)
        if z not in memo:
            try:
                memo[z] = complex(curve(z))
            except ValueError:
                # points where the curve is undefined act as gaps in the scan
                memo[z] = complex(np.nan, np.nan)
        return memo[z]

    pwin, hwin = windows(guard)
    out = []
    for z in np.atleast_1d(zs):
        z = float(z)
        in_p = abs(z) < 0.25
        target = c(z)
        if not np.isfinite(target):
            continue
        for lo, hi in (hwin if in_p else pwin):

            def fn(u):
                return c(u).imag - target.imag

            for u in _sign_change_roots(fn, lo, hi, partner_points, lambda v: fn(v)):
                zp, zh = (z, u) if in_p else (u, z)
                d = c(zp) - c(zh)
                out.append(PairedExcitation(zp, float(zh), d.real, d.imag))
    return out


def gap_scan(curve: Callable[[float], complex], grid_size: int = 40, partner_points: int = 241):
    """Smallest paired delta over a particle-window grid and the pair attaining it."""
    (lo, hi), = windows()[0]
    pairs = pair_real(np.linspace(lo, hi, grid_size), curve, partner_points)
    if not pairs:
        raise RuntimeError("no admissible pairs found")
    best = min(pairs, key=lambda p: p.delta)
    return best.delta, best, pairs
