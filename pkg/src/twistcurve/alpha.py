"""The bounded solution of the twisted cohomological equation.

``alpha`` solves ``v(E_r(x)) = alpha(f(x)) - f'(x)**theta * alpha(x)`` and is
given by the orbit series

    alpha(x) = -sum_{i >= 0} v(E_r(f^i x)) / ((f^{i+1})'(x))**theta.

Two evaluators are provided: the truncated series with a certified tail radius
(the production path) and the graph-transform fixed-point iteration (an
independent oracle).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .maps import CircleMap, MapConstants, map_constants
from .observables import Observable, compose_frequency


@dataclass(frozen=True)
class TwistConfig:
    theta: float
    r: int = 1
    k0: int = 1

    def __post_init__(self):
        if not 0.0 < self.theta < 1.0:
            raise ValidationError("theta must lie in (0,1)")
        if int(self.r) != self.r or self.r < 1:
            raise ValidationError("r must be a positive integer")
        if int(self.k0) != self.k0 or self.k0 < 1:
            raise ValidationError("k0 must be a positive integer")


@dataclass
class EvalResult:
    value: float | np.ndarray
    truncation: int
    tail_radius: float


@dataclass
class GraphSample:
    xs: np.ndarray
    values: np.ndarray
    tail_radius: float


def effective_observable(obs: Observable, cfg: TwistConfig) -> Observable:
    return compose_frequency(obs, cfg.r)


def tail_bound(n_trunc: int, lam: float, m_v: float, theta: float) -> float:
    """Bound on the series remainder after terms ``0..n_trunc``."""
    q = lam ** (-theta)
    return m_v * q ** (n_trunc + 1) / (1.0 - q)


def truncation_for(tol: float, constants: MapConstants, obs: Observable, cfg: TwistConfig) -> int:
    """Smallest ``N`` with ``M_v lambda^{-(N+1) theta} / (1 - lambda^{-theta}) <= tol``."""
    if not tol > 0:
        raise ValidationError("tolerance must be positive")
    lam, theta = constants.lam, cfg.theta
    if obs.m_v == 0.0 or obs.m_v / (lam**theta - 1.0) <= tol:
        return 0
    # closed form first, then walk to the exact boundary to dodge rounding
    q = lam ** (-theta)
    n = max(0, math.ceil(math.log(tol * (1.0 - q) / obs.m_v) / math.log(q)) - 1)
    while n > 0 and tail_bound(n - 1, lam, obs.m_v, theta) <= tol:
        n -= 1
    while tail_bound(n, lam, obs.m_v, theta) > tol:
        n += 1
    return n


def series_terms(x, n_trunc: int, fmap: CircleMap, v, theta: float):
    """Yield ``(i, f^i(x), (f^{i+1})'(x))`` for ``i = 0..n_trunc``."""
    p = np.mod(np.asarray(x, dtype=float), 1.0)
    prod = np.ones_like(p)
    for i in range(n_trunc + 1):
        prod = prod * fmap.deriv(p)
        yield i, p, prod
        p = fmap(p)


def eval_alpha(x, tol: float, fmap: CircleMap, obs: Observable, cfg: TwistConfig,
               constants: MapConstants | None = None) -> EvalResult:
    """Truncated series for ``alpha`` at ``x`` (scalar or array) with ``tail_radius <= tol``.

    The radius covers truncation only. Orbits are iterated in floating point,
    which is exact for dyadic ``x`` under ``E_{2^k}`` and for dyadic grids under
    any ``E_d``. Otherwise the float orbit shadows the orbit of a point within a
    few ulps of ``x``, so the value carries an extra ``H * ulp**theta`` of
    conditioning error that no truncation level removes.
    """
    constants = constants or map_constants(fmap)
    vr = effective_observable(obs, cfg)
    n = truncation_for(tol, constants, vr, cfg)
    theta = cfg.theta
    scalar = np.ndim(x) == 0
    total = np.zeros(np.shape(x))
    comp = np.zeros_like(total)
    for _, p, prod in series_terms(x, n, fmap, vr.v, theta):
        # Kahan compensated accumulation
        term = -vr.v(p) / prod**theta - comp
        t = total + term
        comp = (t - total) - term
        total = t
    value = float(total) if scalar else total
    return EvalResult(value, n, tail_bound(n, constants.lam, vr.m_v, theta))


def holder_upper_constant(constants: MapConstants, obs: Observable, cfg: TwistConfig) -> float:
    """An upper bound ``H`` with ``|alpha(x) - alpha(y)| <= H |x - y|**theta`` for all ``x, y``.

    Uses the linear-case upper bound with ``lambda = min f'`` and inflates it by
    ``C_1**theta`` for nonlinear maps; increments above ``1/(2 lambda)`` are
    covered by ``2 sup|alpha|``.
    """
    vr = effective_observable(obs, cfg)
    lam, theta = constants.lam, cfg.theta
    local = (2.0 * vr.m_vp / (lam ** (-theta) * (1.0 - lam ** (theta - 1.0)))
             + 4.0 * vr.m_v / (lam ** (2.0 * theta) * (1.0 - lam ** (-theta))))
    local *= constants.distortion**theta
    sup = vr.m_v / (lam**theta - 1.0)
    far = 2.0 * sup * (2.0 * lam) ** theta
    return max(local, far)


def eval_alpha_iterative(grid_size: int, iters: int, fmap: CircleMap, obs: Observable,
                         cfg: TwistConfig, constants: MapConstants | None = None) -> GraphSample:
    """Graph-transform iteration ``alpha <- (alpha o f - v)/f'**theta`` on a uniform grid.

    ``alpha o f`` is read off the previous sweep by periodic linear
    interpolation. When ``f`` maps the grid into itself the interpolation is
    exact and contributes nothing to the error radius.
    """
    if grid_size < 2:
        raise ValidationError("grid_size must be >= 2")
    if iters < 1:
        raise ValidationError("iters must be >= 1")
    constants = constants or map_constants(fmap)
    vr = effective_observable(obs, cfg)
    theta = cfg.theta
    xs = np.arange(grid_size) / grid_size
    fx = fmap(xs)
    weight = fmap.deriv(xs) ** (-theta)
    forcing = vr.v(xs)

    if fmap.is_linear:
        # E_d sends k/n to (d k mod n)/n; integer arithmetic avoids rounding
        idx = (fmap.degree * np.arange(grid_size)) % grid_size
        on_grid = True
    else:
        pos = fx * grid_size
        idx = np.rint(pos)
        on_grid = bool(np.all(pos == idx))
    values = np.zeros(grid_size)
    if on_grid:
        idx = idx.astype(np.int64) % grid_size
        for _ in range(iters):
            values = (values[idx] - forcing) * weight
        interp_err = 0.0
    else:
        xp = np.concatenate([xs, [1.0]])
        for _ in range(iters):
            fp = np.concatenate([values, values[:1]])
            values = (np.interp(fx, xp, fp) - forcing) * weight
        q = constants.lam ** (-theta)
        per_sweep = holder_upper_constant(constants, obs, cfg) * (1.0 / grid_size) ** theta
        interp_err = q * per_sweep / (1.0 - q)
    q = constants.lam ** (-theta)
    radius = vr.m_v * q**iters / (1.0 - q) + interp_err
    return GraphSample(xs, values, radius)


def residual(x, tol: float, fmap: CircleMap, obs: Observable, cfg: TwistConfig,
             constants: MapConstants | None = None):
    """``v(E_r x) - alpha(f x) + f'(x)**theta alpha(x)`` with both alphas truncated at ``tol``.

    Guaranteed ``|residual| <= (1 + Lambda_1**theta) * tol``.
    """
    constants = constants or map_constants(fmap)
    vr = effective_observable(obs, cfg)
    x = np.mod(np.asarray(x, dtype=float), 1.0)
    a_x = eval_alpha(x, tol, fmap, obs, cfg, constants).value
    a_fx = eval_alpha(fmap(x), tol, fmap, obs, cfg, constants).value
    res = vr.v(x) - a_fx + fmap.deriv(x) ** cfg.theta * a_x
    return float(res) if np.ndim(res) == 0 else res


def residual_bound(tol: float, constants: MapConstants, cfg: TwistConfig) -> float:
    return (1.0 + constants.lambda1**cfg.theta) * tol
