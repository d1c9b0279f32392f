"""Expanding circle maps, their orbits, inverse branches and derived constants.

Two families are supported:

* ``linear``: ``f(x) = d*x mod 1``
* ``sine-perturbed``: ``f(x) = d*x + a*sin(2*pi*x)/(2*pi) mod 1`` with ``|a| < d - 1``

Everything is vectorised over numpy arrays of circle points in ``[0, 1)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .errors import ConvergenceError, ValidationError

TWO_PI = 2.0 * np.pi
KINDS = ("linear", "sine-perturbed")

EXTREMUM_GRID = 2**14
NEWTON_TOL = 1e-14
NEWTON_MAXITER = 50


def circle_dist(x, y):
    """Distance on the unit circle."""
    d = np.mod(np.abs(np.asarray(x, dtype=float) - y), 1.0)
    return np.minimum(d, 1.0 - d)


@dataclass(frozen=True)
class CircleMapSpec:
    kind: str = "linear"
    degree: int = 2
    amplitude: float = 0.0

    def validate(self):
        if self.kind not in KINDS:
            raise ValidationError(f"map kind must be one of {KINDS}, got {self.kind!r}")
        if int(self.degree) != self.degree or self.degree < 2:
            raise ValidationError(f"degree must be an integer >= 2, got {self.degree}")
        if self.kind == "linear" and self.amplitude != 0.0:
            raise ValidationError("linear maps take no amplitude")
        if self.kind == "sine-perturbed" and not abs(self.amplitude) < self.degree - 1:
            raise ValidationError(
                f"|amplitude| must be < degree - 1 = {self.degree - 1} "
                f"for the map to be expanding, got {self.amplitude}"
            )


@dataclass(frozen=True)
class CircleMap:
    """A degree-``degree`` expanding self-map of the circle with exact derivatives.

    The lift ``F`` satisfies ``F(x + 1) = F(x) + degree`` and ``F(0) = 0``, so
    the i-th monotone branch is ``[l_i, l_{i+1})`` with ``F(l_i) = i``.
    """

    spec: CircleMapSpec

    @property
    def degree(self) -> int:
        return int(self.spec.degree)

    @property
    def is_linear(self) -> bool:
        return self.spec.kind == "linear" or self.spec.amplitude == 0.0

    def lift(self, x):
        x = np.asarray(x, dtype=float)
        d, a = self.degree, self.spec.amplitude
        if self.is_linear:
            return d * x
        return d * x + a * np.sin(TWO_PI * x) / TWO_PI

    def __call__(self, x):
        return np.mod(self.lift(x), 1.0)

    def deriv(self, x):
        x = np.asarray(x, dtype=float)
        if self.is_linear:
            return np.full_like(x, float(self.degree))
        return self.degree + self.spec.amplitude * np.cos(TWO_PI * x)

    def second_deriv(self, x):
        x = np.asarray(x, dtype=float)
        if self.is_linear:
            return np.zeros_like(x)
        return -TWO_PI * self.spec.amplitude * np.sin(TWO_PI * x)

    def branch_index(self, x):
        """Index of the monotone branch containing ``x``."""
        b = np.floor(self.lift(np.mod(x, 1.0))).astype(np.int64)
        return np.clip(b, 0, self.degree - 1)

    def inverse_lift(self, y, branch):
        """Solve ``F(x) = y + branch`` for ``y`` in ``[0, 1]``.

        ``y = 1`` is allowed and returns the right end of the branch interval,
        which is what cylinder geometry needs.
        """
        y = np.asarray(y, dtype=float)
        branch = np.asarray(branch)
        target = y + branch
        d = self.degree
        if self.is_linear:
            return target / d
        # F is increasing with F' >= d - |a| > 1; the bracket [(t - |a|/2pi)/d, (t + |a|/2pi)/d]
        # always contains the root because |F(x) - d x| <= |a|/2pi.
        spread = abs(self.spec.amplitude) / TWO_PI / d
        lo = target / d - spread
        hi = target / d + spread
        x = target / d
        for _ in range(NEWTON_MAXITER):
            g = self.lift(x) - target
            lo = np.where(g < 0, x, lo)
            hi = np.where(g > 0, x, hi)
            step = g / self.deriv(x)
            x_new = x - step
            # fall back to bisection when Newton leaves the bracket
            out = (x_new <= lo) | (x_new >= hi)
            x_new = np.where(out, 0.5 * (lo + hi), x_new)
            if np.all(np.abs(x_new - x) <= NEWTON_TOL):
                x = x_new
                break
            x = x_new
        else:
            res = float(np.max(np.abs(self.lift(x) - target)))
            if res > 1e-12:
                raise ConvergenceError(f"inverse branch did not converge (residual {res:.3e})", res)
        return x

    def inverse_branch(self, branch, y):
        """Point in branch ``branch`` mapped to ``y`` by ``f``."""
        if np.any(np.asarray(branch) < 0) or np.any(np.asarray(branch) >= self.degree):
            raise ValidationError(f"branch must lie in 0..{self.degree - 1}")
        return self.inverse_lift(np.mod(y, 1.0), branch)

    def branch_endpoints(self):
        """The points ``l_0 = 0 < l_1 < ... < l_n = 1`` dividing the circle into branches."""
        return self.inverse_lift(np.zeros(self.degree + 1), np.arange(self.degree + 1))


def make_map(spec: CircleMapSpec | dict) -> CircleMap:
    if isinstance(spec, dict):
        spec = CircleMapSpec(**spec)
    spec.validate()
    return CircleMap(spec)


def linear_map(d: int) -> CircleMap:
    return make_map(CircleMapSpec("linear", d))


def sine_map(d: int, amplitude: float) -> CircleMap:
    return make_map(CircleMapSpec("sine-perturbed", d, amplitude))


@dataclass(frozen=True)
class MapConstants:
    lam: float
    lambda1: float
    lambda2: float
    kappa: float
    distortion: float


def _grid_extremum(func, maximize):
    """Extremum of a periodic function: dense grid, then golden-section polish."""
    n = EXTREMUM_GRID
    xs = np.arange(n) / n
    sign = -1.0 if maximize else 1.0
    vals = sign * func(xs)
    k = int(np.argmin(vals))
    a, b, c = xs[k] - 1.0 / n, xs[k], xs[k] + 1.0 / n
    fb = vals[k]
    best = fb
    if sign * func(a) > fb and sign * func(c) > fb:
        res = optimize.minimize_scalar(
            lambda t: sign * float(func(np.asarray(t))), bracket=(a, b, c), method="golden",
            options={"xtol": 1e-12},
        )
        best = min(best, res.fun)
    return sign * best


def map_constants(fmap: CircleMap) -> MapConstants:
    """lambda = min f', Lambda_1 = max f', Lambda_2 = max |f''|, kappa, C_1."""
    if fmap.is_linear:
        d = float(fmap.degree)
        return MapConstants(lam=d, lambda1=d, lambda2=0.0, kappa=d / d**2, distortion=1.0)
    lam = _grid_extremum(fmap.deriv, maximize=False)
    lambda1 = _grid_extremum(fmap.deriv, maximize=True)
    lambda2 = _grid_extremum(lambda x: np.abs(fmap.second_deriv(x)), maximize=True)
    # telescoping bound: |log f'|_Lip <= Lambda_2/lambda, intermediate distances contract geometrically
    c1 = max(1.0, float(np.exp(lambda2 / (lam - 1.0))))
    return MapConstants(lam=lam, lambda1=lambda1, lambda2=lambda2,
                        kappa=lambda1 / lam**2, distortion=c1)


@dataclass
class OrbitSlice:
    """``points[i] = f^i(x)``, ``deriv_products[i] = (f^i)'(x)``; leading axis is time."""

    points: np.ndarray
    deriv_products: np.ndarray


def forward_orbit(fmap: CircleMap, x, m: int) -> OrbitSlice:
    if m < 0:
        raise ValidationError("orbit length must be >= 0")
    x = np.mod(np.asarray(x, dtype=float), 1.0)
    points = np.empty((m + 1,) + x.shape)
    prods = np.empty((m + 1,) + x.shape)
    points[0] = x
    prods[0] = 1.0
    for i in range(m):
        prods[i + 1] = prods[i] * fmap.deriv(points[i])
        points[i + 1] = fmap(points[i])
    return OrbitSlice(points, prods)


def orbit_pair_derivatives(fmap: CircleMap, x, h, n: int):
    """``(f^n)'(x)`` and ``(f^n)'(x + h)`` for tiny ``h``.

    The separation ``f^i(x + h) - f^i(x)`` is propagated directly so it stays
    accurate even when ``x + h`` rounds to ``x``.
    """
    x = np.mod(np.asarray(x, dtype=float), 1.0)
    delta = np.asarray(h, dtype=float) * np.ones_like(x)
    d, a = fmap.degree, fmap.spec.amplitude
    dx = np.ones_like(x)
    dxh = np.ones_like(x)
    for _ in range(n):
        dx = dx * fmap.deriv(x)
        dxh = dxh * fmap.deriv(x + delta)
        if fmap.is_linear:
            delta = d * delta
        else:
            # sin(u + v) - sin(u) = 2 cos(u + v/2) sin(v/2)
            delta = d * delta + (a / np.pi) * np.cos(TWO_PI * x + np.pi * delta) * np.sin(np.pi * delta)
        x = fmap(x)
    return dx, dxh


def distortion_check(fmap: CircleMap, trials: int, rng_seed=0, max_n: int = 30,
                     constants: MapConstants | None = None):
    """Observed range of ``(f^N)'(x)/(f^N)'(x + sigma*h)`` over admissible samples.

    Each trial draws ``x``, ``N <= max_n``, ``sigma = +-1`` and
    ``h <= 1/(C_1 (f^N)'(x))``. Returns ``(min_ratio, max_ratio)``, or
    ``None`` when ``trials == 0``.
    """
    if trials < 0:
        raise ValidationError("trials must be >= 0")
    if trials == 0:
        return None
    constants = constants or map_constants(fmap)
    rng = np.random.default_rng(rng_seed)
    xs = rng.random(trials)
    ns = rng.integers(1, max_n + 1, size=trials)
    sigma = rng.choice([-1.0, 1.0], size=trials)
    frac = rng.random(trials)
    ratios = np.empty(trials)
    for n in np.unique(ns):
        sel = ns == n
        dn = forward_orbit(fmap, xs[sel], int(n)).deriv_products[-1]
        h = sigma[sel] * frac[sel] / (constants.distortion * dn)
        dx, dxh = orbit_pair_derivatives(fmap, xs[sel], h, int(n))
        ratios[sel] = dx / dxh
    return float(ratios.min()), float(ratios.max())
