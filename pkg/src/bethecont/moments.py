"""Filling functions on [-1/2, 1/2] and their Fourier moments.

A filling is a sum of weighted blocks whose endpoints move affinely with a
single parameter (the magnetisation m, or a trajectory coordinate). Moments
are X_a = int g(y) exp(2 i pi a y) dy over the oriented blocks.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

__all__ = [
    "Block",
    "Filling",
    "standard",
    "edge_split",
    "three_block",
    "ground_state",
    "moments",
    "moments_piecewise",
    "finite_size_moments",
    "bethe_numbers_for",
]


@dataclass(frozen=True)
class Block:
    """Weight ``w`` on the oriented interval from lo to hi.

    Endpoints are (constant, slope) pairs in the filling parameter.
    """

    lo: tuple[float, float]
    hi: tuple[float, float]
    w: float = 1.0


@dataclass(frozen=True)
class Filling:
    blocks: tuple[Block, ...]
    param: float
    name: str = "custom"

    def at(self, param: float | complex) -> "Filling":
        """Same blocks at another parameter; complex values are allowed for moments."""
        param = complex(param) if np.iscomplexobj(param) else float(param)
        return Filling(self.blocks, param, self.name)

    def intervals(self) -> list[tuple[float, float, float]]:
        p = self.param
        return [
            (b.lo[0] + b.lo[1] * p, b.hi[0] + b.hi[1] * p, b.w) for b in self.blocks
        ]

    def moment_taylor(self, a, order: int = 0) -> np.ndarray:
        """Taylor coefficients of X_a in (param - self.param), shape (len(a), order+1)."""
        a = np.atleast_1d(np.asarray(a, dtype=float))
        out = np.zeros((a.size, order + 1), dtype=complex)
        n = np.arange(order + 1)
        fact = np.array([float(factorial(k)) for k in n])
        nz = a != 0
        an = a[nz][:, None]
        for b in self.blocks:
            for (c, s), sign in ((b.hi, 1.0), (b.lo, -1.0)):
                y = c + s * self.param
                # exp(2 i pi a (y + s h)) / (2 i pi a), expanded in h
                base = np.exp(2j * np.pi * an * y) / (2j * np.pi * an)
                out[nz] += sign * b.w * base * (2j * np.pi * an * s) ** n / fact
                out[~nz, 0] += sign * b.w * y
                if order >= 1:
                    out[~nz, 1] += sign * b.w * s
        return out

    def moments(self, a) -> np.ndarray:
        return self.moment_taylor(a, 0)[:, 0]


def standard(m: float) -> Filling:
    """One block (-m/2, m/2)."""
    return Filling((Block((0.0, -0.5), (0.0, 0.5)),), m, "standard")


def edge_split(m: float) -> Filling:
    """Blocks (1/2 - m/2, 1/2) and (-1/2, -1/2 + m/2)."""
    return Filling(
        (Block((0.5, -0.5), (0.5, 0.0)), Block((-0.5, 0.0), (-0.5, 0.5))),
        m,
        "edge_split",
    )


def three_block(m: float) -> Filling:
    """Blocks (-m/4, m/4), (1/2 - m/2, 1/2 - m/4), (-1/2 + m/4, -1/2 + m/2)."""
    return Filling(
        (
            Block((0.0, -0.25), (0.0, 0.25)),
            Block((0.5, -0.5), (0.5, -0.25)),
            Block((-0.5, 0.25), (-0.5, 0.5)),
        ),
        m,
        "three_block",
    )


_KINDS = {"standard": standard, "edge_split": edge_split, "three_block": three_block}


def ground_state() -> Filling:
    """The m = -1 state reached by the three-block configuration."""
    return three_block(-1.0)


def moments(config, a) -> np.ndarray:
    """X_a for a Filling, or for (kind, m) with kind one of the named configurations."""
    if not isinstance(config, Filling):
        kind, m = config
        config = _KINDS[kind](m)
    return config.moments(a)


def moments_piecewise(intervals, a) -> np.ndarray:
    """X_a for explicit (lo, hi, weight) intervals."""
    blocks = tuple(Block((lo, 0.0), (hi, 0.0), w) for lo, hi, w in intervals)
    return Filling(blocks, 0.0).moments(a)


def finite_size_moments(numbers, L: int, a) -> np.ndarray:
    """(1/L) sum_k exp(2 i pi a I_k / L)."""
    numbers = np.asarray(numbers, dtype=float)
    a = np.atleast_1d(np.asarray(a, dtype=float))
    return np.exp(2j * np.pi * np.outer(a, numbers) / L).sum(axis=1) / L


def bethe_numbers_for(config, L: int) -> np.ndarray:
    """First-level Bethe numbers realising a positive filling at size L.

    Each block gets round(width * L) consecutive admissible numbers centred as
    close as possible to the block centre (ties toward zero). Numbers are
    integers when N is odd and half-integers when N is even.
    """
    if not isinstance(config, Filling):
        kind, m = config
        config = _KINDS[kind](m)
    if L % 2:
        raise ValueError("L must be even")
    ivals = config.intervals()
    if any(w != 1.0 or hi < lo for lo, hi, w in ivals):
        raise ValueError("only positively oriented unit-weight blocks are realisable")
    total = sum(hi - lo for lo, hi, _ in ivals) * L
    N = int(round(total))
    if abs(total - N) > 1e-9:
        raise ValueError(f"m*L = {total} is not an integer")
    off = 0.0 if N % 2 else 0.5
    out = []
    for lo, hi, _ in ivals:
        n = int(round((hi - lo) * L))
        if n == 0:
            continue
        centre = 0.5 * (lo + hi) * L
        # block of n grid points g0, g0+1, ...; its centre is g0 + (n-1)/2
        g0 = centre - (n - 1) / 2
        cands = np.floor(g0 - off) + off + np.array([-1.0, 0.0, 1.0, 2.0])
        dist = np.abs(cands + (n - 1) / 2 - centre)
        best = cands[dist <= dist.min() + 1e-9]
        g0 = best[np.argmin(np.abs(best + (n - 1) / 2))]
        out.append(g0 + np.arange(n))
    nums = np.sort(np.concatenate(out)) if out else np.zeros(0)
    if nums.size != N or np.unique(nums).size != N:
        raise ValueError("blocks overlap or do not sum to N")
    if nums.size and (nums.min() <= -L / 2 or nums.max() > L / 2):
        raise ValueError("numbers outside the first level")
    return nums
