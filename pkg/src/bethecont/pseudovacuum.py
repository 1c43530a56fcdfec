"""Energy near the two pseudo-vacua: m = -1 (all roots at i) and its mirror m = +1."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .moments import standard
from .tower import KERNEL_MINUS, KERNEL_PLUS, Tower, functionals_from_filling

__all__ = [
    "EnergySeries",
    "delta_kernel",
    "delta_mirror",
    "gamma_tower",
    "derivatives_at_pseudovacuum",
    "mirror_derivatives_at_m1",
    "first_derivative_closed_form",
    "mirror_first_derivative",
    "X_CRIT",
    "PHI_CRIT",
]

X_CRIT = 7.0 - 4.0 * np.sqrt(3.0)  # exp(-2 phi_c), where the mirror kernel hits its branch point
PHI_CRIT = 0.5 * np.log(7.0 + 4.0 * np.sqrt(3.0))


@dataclass
class EnergySeries:
    """F = sum_k coeffs[k] * v**k in the named expansion variable v."""

    variable: str
    coeffs: np.ndarray
    x: float

    def __call__(self, v, terms: int | None = None):
        c = self.coeffs if terms is None else self.coeffs[:terms]
        return np.polyval(c[::-1], v)

    def partial_sums(self, v) -> np.ndarray:
        return np.cumsum(self.coeffs * v ** np.arange(self.coeffs.size))


def delta_kernel(y):
    """Delta(y) = -i/2 + (i/2) sqrt(1 - 8y/(1-y)), principal branch."""
    y = np.asarray(y, dtype=complex)
    return -0.5j + 0.5j * np.sqrt((1 - 9 * y) / (1 - y))


def delta_mirror(y):
    y = np.asarray(y, dtype=complex)
    return 0.5j * (1 + 3 * y) / (1 - y) * (1 - np.sqrt(1 + 8 * y * (1 - y) / (1 + 3 * y) ** 2))


def gamma_tower(x: float, P: int) -> Tower:
    """Root-function tables for the expansion in mu = m + 1 around the pseudo-vacuum."""
    return Tower.solve(KERNEL_MINUS, x, functionals_from_filling(standard(-1.0), P))


def derivatives_at_pseudovacuum(x: float, P: int = 22) -> EnergySeries:
    """Coefficients of F in powers of (m + 1) at fixed x = exp(-2 phi)."""
    if not 0 < x <= 1:
        raise ValueError("x must lie in (0, 1]")
    t = gamma_tower(x, P)
    return EnergySeries("m_plus_1", t.energy()[:, 0], x)


def mirror_derivatives_at_m1(x: float, P: int = 8) -> EnergySeries:
    """Coefficients of F in powers of (m - 1); only valid for x < 7 - 4 sqrt(3)."""
    if not 0 < x < X_CRIT:
        raise ValueError(
            f"x={x} outside the mirror validity window (0, {X_CRIT:.6f}); phi must exceed {PHI_CRIT:.6f}"
        )
    t = Tower.solve(KERNEL_PLUS, x, functionals_from_filling(standard(1.0), P))
    return EnergySeries("m_minus_1", t.energy()[:, 0], x)


def first_derivative_closed_form(phi):
    """dF/dm at m = -1: -2 cosh^2(phi) sqrt(5 - 4 tanh(phi))."""
    phi = np.asarray(phi, dtype=float)
    return -2 * np.cosh(phi) ** 2 * np.sqrt(5 - 4 * np.tanh(phi))


def mirror_first_derivative(phi):
    """dF/dm at m = +1, real for phi > phi_c."""
    phi = np.asarray(phi, dtype=float)
    c = np.cosh(2 * phi)
    r = np.sqrt(2.0) * np.sinh(phi) * np.sqrt(c - 7)
    return 2 * np.cosh(phi) ** 2 * (c - 7 - 2 * r) / (5 * c - 11 - 4 * r)
