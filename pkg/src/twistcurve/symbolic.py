"""Symbolic coding of the circle map, Birkhoff sums and finite-depth pressure.

Points are coded by their branch itineraries. A length-``n`` word
``(x_0, ..., x_{n-1})`` is realised by composing inverse branches,
``f_{x_0}^{-1} o ... o f_{x_{n-1}}^{-1}``, applied to the midpoint ``1/2``.
The depth-``n`` cylinder points are therefore exactly the ``n``-th preimages
of ``1/2``, which is how the pressure sums are enumerated.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import optimize
from scipy.special import logsumexp

from .alpha import TwistConfig
from .errors import BudgetError, ValidationError
from .maps import CircleMap, map_constants

MAX_DEPTH = 12
MAX_CYLINDERS = 2**24
BOUNDARY_NUDGE = 1e-15


@dataclass(frozen=True)
class SymbolSeq:
    digits: tuple

    @classmethod
    def of(cls, digits, degree: int):
        digits = tuple(int(d) for d in digits)
        if not digits:
            raise ValidationError("symbol sequence must be nonempty")
        if any(d < 0 or d >= degree for d in digits):
            raise ValidationError(f"digits must lie in 0..{degree - 1}")
        return cls(digits)

    def __len__(self):
        return len(self.digits)


@dataclass(frozen=True)
class Potential:
    """Potentials on the coded space; ``f_H`` is ``theta * f_W`` identically."""

    fmap: CircleMap
    theta: float

    def f_w(self, x):
        return np.log(self.fmap.deriv(x))

    def f_h(self, x):
        return self.theta * self.f_w(x)

    def a(self, i, x):
        """Contraction of the ``i``-th inverse branch at ``x``."""
        return 1.0 / self.fmap.deriv(self.fmap.inverse_branch(i, x))

    def c(self, i, x):
        return self.a(i, x) ** self.theta


@dataclass
class PressureEstimate:
    depth: int
    scale: float
    value: float
    extrapolated: float
    error: float
    by_depth: tuple = ()


@dataclass
class DimViaPressure:
    t: float
    dim: float
    s_root: float


def code_point(seq: SymbolSeq | tuple, fmap: CircleMap) -> float:
    """Point of the cylinder ``seq``: inverse branches applied to the midpoint."""
    digits = seq.digits if isinstance(seq, SymbolSeq) else tuple(seq)
    if not digits:
        raise ValidationError("symbol sequence must be nonempty")
    y = 0.5
    for b in reversed(digits):
        y = float(fmap.inverse_branch(b, y))
    return y


def itinerary(x: float, length: int, fmap: CircleMap) -> SymbolSeq:
    """Branch indices of ``x, f(x), ..., f^{length-1}(x)``.

    Points sitting exactly on a branch boundary are nudged by ``1e-15``.
    """
    if length < 1:
        raise ValidationError("length must be >= 1")
    p = float(np.mod(x, 1.0))
    ends = fmap.branch_endpoints()
    if np.any(ends == p):
        p = p + BOUNDARY_NUDGE
    digits = []
    for _ in range(length):
        digits.append(int(fmap.branch_index(p)))
        p = float(fmap(p))
    return SymbolSeq(tuple(digits))


def cylinder_diameter(seq: SymbolSeq | tuple, fmap: CircleMap) -> float:
    """Length of ``f_{x_0}^{-1} o ... o f_{x_n}^{-1}([0, 1])``."""
    digits = seq.digits if isinstance(seq, SymbolSeq) else tuple(seq)
    if not digits:
        raise ValidationError("symbol sequence must be nonempty")
    lo, hi = 0.0, 1.0
    for b in reversed(digits):
        lo = float(fmap.inverse_lift(lo, b))
        hi = float(fmap.inverse_lift(hi, b))
    return hi - lo


def birkhoff_ratio(x: float, m: int, fmap: CircleMap, cfg: TwistConfig) -> float:
    """``S_m f_H / S_m f_W`` along the orbit of ``x``."""
    if m < 1:
        raise ValidationError("m must be >= 1")
    pot = Potential(fmap, cfg.theta)
    p = float(np.mod(x, 1.0))
    sw = sh = 0.0
    for _ in range(m):
        sw += float(pot.f_w(p))
        sh += float(pot.f_h(p))
        p = float(fmap(p))
    return sh / sw


def _check_depth(fmap: CircleMap, depth: int):
    if not 1 <= depth <= MAX_DEPTH:
        raise BudgetError(f"depth must lie in 1..{MAX_DEPTH}")
    if fmap.degree**depth > MAX_CYLINDERS:
        raise BudgetError(f"{fmap.degree}^{depth} cylinders exceeds the 2^24 budget")


@lru_cache(maxsize=8)
def _log_deriv_sums(fmap: CircleMap, depth: int):
    """``S_n log f'`` at the coded midpoints of all depth-``n`` cylinders, ``n = 1..depth``.

    Level ``k + 1`` is obtained from level ``k`` by applying every inverse
    branch and adding ``log f'`` at the new point.
    """
    _check_depth(fmap, depth)
    d = fmap.degree
    pts = np.array([0.5])
    sums = np.array([0.0])
    out = []
    for _ in range(depth):
        new_pts = np.empty(pts.size * d)
        new_sums = np.empty(pts.size * d)
        for b in range(d):
            q = fmap.inverse_lift(pts, b)
            new_pts[b::d] = q
            new_sums[b::d] = sums + np.log(fmap.deriv(q))
        pts, sums = new_pts, new_sums
        out.append(sums)
    return tuple(out)


def _pressure_at(sums: np.ndarray, n: int, s: float) -> float:
    return float(logsumexp(-s * sums)) / n


def aitken(a: float, b: float, c: float) -> float:
    denom = c - 2.0 * b + a
    # a vanishing second difference means the sequence has already converged
    if not abs(denom) > 1e-14 * max(1.0, abs(c)):
        return c
    return c - (c - b) ** 2 / denom


def pressure(fmap: CircleMap, s: float, depth: int) -> PressureEstimate:
    """``P_n = (1/n) log sum_cylinders exp(-s S_n log f')`` with Aitken extrapolation.

    The infimum over each cylinder is replaced by the value at its coded
    midpoint; ``error = s log(C_1)/n`` bounds that substitution.
    """
    sums = _log_deriv_sums(fmap, depth)
    by_depth = tuple(_pressure_at(sums[n - 1], n, s) for n in range(1, depth + 1))
    value = by_depth[-1]
    if depth >= 3:
        extrapolated = aitken(*by_depth[-3:])
    else:
        extrapolated = value
    c1 = map_constants(fmap).distortion
    return PressureEstimate(depth, float(s), value, float(extrapolated),
                            abs(s) * float(np.log(c1)) / depth, by_depth)


def dimension_via_pressure(fmap: CircleMap, cfg: TwistConfig, depth: int = 8,
                           xtol: float = 1e-12) -> DimViaPressure:
    """Root ``s*`` of ``P(-s log f') = 0`` on ``[0.5, 1.5]``; ``t = s* - theta``, ``dim = 1 + t``."""
    depth = min(depth, MAX_DEPTH)
    while fmap.degree**depth > MAX_CYLINDERS:
        depth -= 1

    def p(s):
        return pressure(fmap, s, depth).extrapolated

    lo, hi = 0.5, 1.5
    if not p(lo) > 0 > p(hi):
        raise ValidationError("pressure root not bracketed in [0.5, 1.5]; map is not expanding enough")
    s_root = optimize.bisect(p, lo, hi, xtol=xtol)
    t = s_root - cfg.theta
    return DimViaPressure(float(t), float(1.0 + t), float(s_root))
