"""Pointwise Hölder exponents and box-counting dimension of the graph of ``alpha``."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .alpha import TwistConfig, eval_alpha
from .errors import DegenerateError, ValidationError
from .maps import CircleMap, map_constants
from .observables import Observable

DROP_FACTOR = 10.0


@dataclass
class HolderEstimate:
    x: float
    exponent: float
    stderr: float
    scales: np.ndarray
    oscillations: np.ndarray
    dropped: list = field(default_factory=list)
    local_ratios: np.ndarray | None = None


@dataclass
class BoxDimEstimate:
    scales: np.ndarray
    counts: np.ndarray
    dim: float
    r2: float


def _fit_slope(logx, logy):
    """OLS slope, its standard error and R^2."""
    logx = np.asarray(logx, dtype=float)
    logy = np.asarray(logy, dtype=float)
    n = len(logx)
    A = np.vstack([logx, np.ones(n)]).T
    coef, *_ = np.linalg.lstsq(A, logy, rcond=None)
    fit = A @ coef
    ss_res = float(np.sum((logy - fit) ** 2))
    ss_tot = float(np.sum((logy - logy.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    if n > 2:
        sxx = float(np.sum((logx - logx.mean()) ** 2))
        stderr = float(np.sqrt(ss_res / (n - 2) / sxx))
    else:
        stderr = 0.0
    return float(coef[0]), stderr, r2


def oscillations(sampler, x: float, j_min: int, j_max: int, offsets_per_scale: int = 17):
    """``osc(x, 2^-j)`` for ``j = j_min..j_max`` on nested offset grids.

    At each scale the offsets are ``x + k h / m`` for ``|k| <= m``,
    ``m = (offsets_per_scale - 1) // 2``; the offset set at a scale also
    contains every finer scale's offsets, so the oscillation is monotone in
    ``h`` by construction.
    """
    if offsets_per_scale < 3 or offsets_per_scale % 2 == 0:
        raise ValidationError("offsets_per_scale must be odd and >= 3")
    m = (offsets_per_scale - 1) // 2
    js = np.arange(j_min, j_max + 1)
    hs = 2.0 ** (-js)
    k = np.concatenate([np.arange(-m, 0), np.arange(1, m + 1)])
    ys = x + hs[:, None] * k[None, :] / m
    center = sampler(np.asarray([x]))[0]
    vals = sampler(np.mod(ys.ravel(), 1.0)).reshape(ys.shape)
    raw = np.max(np.abs(vals - center), axis=1)
    # cumulative max from the finest scale outward enforces nesting
    osc = np.maximum.accumulate(raw[::-1])[::-1]
    return hs, osc


def holder_exponent_at(x: float, j_min: int, j_max: int, offsets_per_scale: int,
                       fmap: CircleMap, obs: Observable, cfg: TwistConfig,
                       tol: float | None = None, sampler=None) -> HolderEstimate:
    """Regression slope of ``log osc(x, h)`` against ``log h`` over dyadic ``h``.

    ``sampler`` replaces ``alpha`` (a hook for checking the estimator on
    known functions); it is assumed exact. Scales whose oscillation is within
    ``10 * tail_radius`` are dropped and listed in ``dropped``.
    """
    if not 2 <= j_min < j_max:
        raise ValidationError("need 2 <= j_min < j_max")
    if sampler is None:
        max_tol = 2.0 ** (-j_max * cfg.theta) * 1e-3
        tol = max_tol if tol is None else tol
        if tol > max_tol:
            raise ValidationError(f"tol must be <= 2^(-j_max theta) 1e-3 = {max_tol:.3e}")
        constants = map_constants(fmap)
        radius = eval_alpha(0.0, tol, fmap, obs, cfg, constants).tail_radius

        def sampler(ys):
            return eval_alpha(ys, tol, fmap, obs, cfg, constants).value
    else:
        radius = 0.0
    hs, osc = oscillations(sampler, x, j_min, j_max, offsets_per_scale)
    # 2*radius: osc is a difference of two truncated values
    keep = osc > DROP_FACTOR * 2.0 * radius
    dropped = [float(h) for h in hs[~keep]]
    if keep.sum() < 2:
        raise DegenerateError(
            f"oscillation at x={x} is drowned by evaluation error at {len(dropped)} of {len(hs)} scales"
        )
    lh, lo = np.log(hs[keep]), np.log(osc[keep])
    slope, stderr, _ = _fit_slope(lh, lo)
    ratios = lo / lh
    return HolderEstimate(float(x), slope, stderr, hs[keep], osc[keep], dropped, ratios)


def median_holder_exponent(n_points: int, j_min: int, j_max: int, fmap, obs, cfg,
                           rng_seed=0, offsets_per_scale: int = 17):
    """Median exponent over ``n_points`` Lebesgue-random base points."""
    rng = np.random.default_rng(rng_seed)
    xs = rng.random(n_points)
    ests = [holder_exponent_at(float(x), j_min, j_max, offsets_per_scale, fmap, obs, cfg)
            for x in xs]
    return float(np.median([e.exponent for e in ests])), ests


def box_counts(values: np.ndarray, j_min: int, j_max: int):
    """Occupied-cell counts of the dyadic grids covering a sampled periodic graph.

    ``values`` are samples at ``k/len(values)``. Each column's vertical extent
    is the min/max of its samples plus the first sample of the next column, so
    neighbouring columns join up like the continuous graph does.
    """
    n = len(values)
    closed = np.concatenate([values, values[:1]])
    counts = []
    for j in range(j_min, j_max + 1):
        cols = 2**j
        per = n // cols
        body = closed[:n].reshape(cols, per)
        nxt = closed[per::per][:cols]
        lo = np.minimum(body.min(axis=1), nxt)
        hi = np.maximum(body.max(axis=1), nxt)
        side = 2.0 ** (-j)
        counts.append(int(np.sum(np.floor(hi / side) - np.floor(lo / side) + 1)))
    return np.array(counts)


def box_dimension(sample_count: int, j_min: int, j_max: int, fmap: CircleMap,
                  obs: Observable, cfg: TwistConfig, tol: float = 1e-8,
                  values: np.ndarray | None = None) -> BoxDimEstimate:
    """Box-counting dimension of the graph of ``alpha`` from a uniform sample."""
    if j_min < 0 or j_max <= j_min:
        raise ValidationError("need 0 <= j_min < j_max")
    if sample_count < 4 * 2**j_max:
        raise ValidationError(f"undersampled: need sample_count >= 4*2^j_max = {4 * 2**j_max}")
    if sample_count % 2**j_max:
        raise ValidationError("sample_count must be a multiple of 2^j_max")
    if values is None:
        xs = np.arange(sample_count) / sample_count
        values = eval_alpha(xs, tol, fmap, obs, cfg).value
    counts = box_counts(values, j_min, j_max)
    js = np.arange(j_min, j_max + 1)
    slope, _, r2 = _fit_slope(js * np.log(2.0), np.log(counts))
    return BoxDimEstimate(2.0 ** (-js), counts, slope, r2)


def exponent_bound_from_dimension(d: float) -> float:
    """Upper bound ``2 - d`` on the global Hölder exponent of a graph of dimension ``d``."""
    if not 1.0 <= d <= 2.0:
        raise ValidationError(f"dimension must lie in [1, 2], got {d}")
    return 2.0 - d
