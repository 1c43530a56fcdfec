"""Energies along paths in moment space that start at the m = -1 pseudo-vacuum.

A path is a filling whose blocks move affinely with xi; at xi = 0 it is the
pseudo-vacuum. Two built-in paths end at xi = 1/2 on the three-block ground
state at m = -1: ``traj1`` grows blocks at +-3/4, ``traj2`` at +-7/8.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from .moments import Block, Filling
from .pseudovacuum import EnergySeries
from .tower import KERNEL_MINUS, Functional, Term, Tower, functionals_from_filling

__all__ = [
    "TrajectorySpec",
    "TRAJ1",
    "TRAJ2",
    "get_trajectory",
    "functional_traj1",
    "functional_traj2",
    "trajectory_energy",
    "extrapolate",
    "fit_table",
    "assemble_sl2c",
]


@dataclass(frozen=True)
class TrajectorySpec:
    name: str
    filling: Filling
    default_P: int
    default_kmin: int

    def functionals(self, P: int, ne: int = 1) -> list[Functional]:
        return functionals_from_filling(self.filling, P, ne)

    def required_points(self, P: int) -> list[complex]:
        pts: list[complex] = [0j]
        for f in self.functionals(P):
            for tm in f.terms:
                if all(abs(tm.point - q) > 1e-12 for q in pts):
                    pts.append(tm.point)
        return pts


TRAJ1 = TrajectorySpec(
    "traj1",
    Filling(
        (
            Block((-0.5, 0.5), (0.5, -0.5), -1.0),
            Block((0.75, 0.0), (0.75, 0.5), -1.0),
            Block((-0.75, -0.5), (-0.75, 0.0), -1.0),
        ),
        0.0,
        "traj1",
    ),
    14,
    6,
)

TRAJ2 = TrajectorySpec(
    "traj2",
    Filling(
        (
            Block((-0.5, 0.5), (0.5, -0.5), -1.0),
            Block((0.875, -0.25), (0.875, 0.25), -1.0),
            Block((-0.875, -0.25), (-0.875, 0.25), -1.0),
        ),
        0.0,
        "traj2",
    ),
    7,
    4,
)

_BY_NAME = {"traj1": TRAJ1, "traj2": TRAJ2}


def get_trajectory(name: str) -> TrajectorySpec:
    try:
        return _BY_NAME[name.lower()]
    except KeyError:
        raise ValueError(f"unknown trajectory {name!r}; choose from {sorted(_BY_NAME)}") from None


def _explicit(p: int, triples) -> Functional:
    if p < 1:
        raise ValueError("order 0 is the constant-term rule, not a point functional")
    terms = tuple(
        Term(pt, p - 1, np.array([w], dtype=complex)) for pt, w in triples if abs(w) > 0
    )
    return Functional(np.zeros(1, dtype=complex), terms)


def functional_traj1(p: int) -> Functional:
    """(i pi)^(p-1)/(2 p!) [(1-(-1)^p) F(-1) + (-1)^p F(i) - F(-i)], derivatives of order p-1."""
    c = (1j * np.pi) ** (p - 1) / (2 * factorial(p))
    return _explicit(p, [(-1 + 0j, c * (1 - (-1) ** p)), (1j, c * (-1) ** p), (-1j, -c)])


def functional_traj2(p: int) -> Functional:
    """(1-(-1)^p)(i pi)^(p-1)/(2 p!) [F(-1) - (F(e^{i pi/4}) + F(e^{-i pi/4})) / 2^p]."""
    c = (1 - (-1) ** p) * (1j * np.pi) ** (p - 1) / (2 * factorial(p))
    e = np.exp(1j * np.pi / 4)
    return _explicit(p, [(-1 + 0j, c), (e, -c / 2**p), (e.conjugate(), -c / 2**p)])


def trajectory_energy(spec: TrajectorySpec | str, x: float = 1.0, P: int | None = None) -> EnergySeries:
    """Coefficients f_0..f_P of F(xi) along the path at x = exp(-2 phi)."""
    if isinstance(spec, str):
        spec = get_trajectory(spec)
    P = spec.default_P if P is None else P
    if not 0 < x <= 1:
        raise ValueError("x must lie in (0, 1]")
    tower = Tower.solve(KERNEL_MINUS, x, spec.functionals(P))
    return EnergySeries("xi", tower.energy()[:, 0], x)


def extrapolate(series, xi: float, k_min: int) -> tuple[float, float]:
    """Fit partial sums S_k = sum_{i<k} xi^i f_i to a + b/k over k >= k_min; return (a, rms residual)."""
    f = np.asarray(series.coeffs if hasattr(series, "coeffs") else series)
    if np.iscomplexobj(f):
        f = f.real
    s = np.cumsum(f * xi ** np.arange(f.size))
    k = np.arange(1, f.size + 1)
    sel = k >= k_min
    if sel.sum() < 3:
        raise ValueError("need at least three partial sums at or beyond k_min")
    A = np.column_stack([np.ones(sel.sum()), 1.0 / k[sel]])
    coef, *_ = np.linalg.lstsq(A, s[sel], rcond=None)
    resid = s[sel] - A @ coef
    return float(coef[0]), float(np.sqrt(np.mean(resid**2)))


def fit_table(series, xi: float, k_mins=(5, 6)) -> list[tuple[int, float, float]]:
    return [(k, *extrapolate(series, xi, k)) for k in k_mins]


def assemble_sl2c(e_i: float, e_j: float) -> float:
    """Level of the SL(2,C) chain from its two copies: 2 + e_i(m) + e_j(-2-m)."""
    return 2.0 + e_i + e_j
