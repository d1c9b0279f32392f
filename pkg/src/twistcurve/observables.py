"""Forcing functions ``v`` together with the constants the lower-bound machinery needs."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
from scipy import optimize

from .errors import ValidationError

TWO_PI = 2.0 * np.pi
GRID = 2**14


@dataclass(frozen=True)
class Observable:
    """A periodic observable with derivative data.

    ``gamma2`` is a global ``epsilon``-Hölder constant of ``v'`` and ``gamma``
    a local ``epsilon``-Hölder constant of ``v''`` at ``c``, the argmax of ``v'``.
    """

    v: Callable
    dv: Callable
    d2v: Callable | None
    epsilon: float
    m_v: float
    m_vp: float
    gamma2: float
    gamma: float | None
    c: float
    name: str = "custom"

    def __call__(self, x):
        return self.v(x)


def _argmax_dv(dv) -> float:
    """Smallest maximiser of ``dv`` on ``[0, 1)``: grid search then golden-section polish."""
    xs = np.arange(GRID) / GRID
    vals = dv(xs)
    k = int(np.argmax(vals))
    a, b, c = xs[k] - 1.0 / GRID, xs[k], xs[k] + 1.0 / GRID
    if dv(np.asarray(a)) < vals[k] and dv(np.asarray(c)) < vals[k]:
        res = optimize.minimize_scalar(lambda t: -float(dv(np.asarray(t))),
                                       bracket=(a, b, c), method="golden",
                                       options={"xtol": 1e-12})
        # golden section lands within ~1e-8 of the grid point for cosine-like v';
        # keep the exact grid value when it is already optimal
        if -res.fun > vals[k]:
            return float(np.mod(res.x, 1.0))
    return float(b)


def make_cosine() -> Observable:
    """``v(x) = cos(2 pi x)``; every constant is exact."""
    return Observable(
        v=lambda x: np.cos(TWO_PI * np.asarray(x, dtype=float)),
        dv=lambda x: -TWO_PI * np.sin(TWO_PI * np.asarray(x, dtype=float)),
        d2v=lambda x: -TWO_PI**2 * np.cos(TWO_PI * np.asarray(x, dtype=float)),
        epsilon=1.0,
        m_v=1.0,
        m_vp=TWO_PI,
        gamma2=TWO_PI**2,
        gamma=TWO_PI**3,
        c=0.75,
        name="cosine",
    )


def make_constant(value: float = 1.0) -> Observable:
    """``v`` identically ``value``. ``v'`` vanishes, so ``c`` is only nominal."""
    value = float(value)
    zero = lambda x: np.zeros_like(np.asarray(x, dtype=float))  # noqa: E731
    return Observable(
        v=lambda x: np.full_like(np.asarray(x, dtype=float), value),
        dv=zero,
        d2v=zero,
        epsilon=1.0,
        m_v=abs(value),
        m_vp=0.0,
        gamma2=0.0,
        gamma=0.0,
        c=0.0,
        name="constant",
    )


def scale(obs: Observable, t: float) -> Observable:
    """Observable ``t*v``. The argmax ``c`` is unchanged for ``t > 0``."""
    if not t > 0:
        raise ValidationError("scale factor must be positive")
    if t == 1:
        return obs
    v, dv, d2v = obs.v, obs.dv, obs.d2v
    return replace(
        obs,
        v=lambda x: t * v(x),
        dv=lambda x: t * dv(x),
        d2v=None if d2v is None else (lambda x: t * d2v(x)),
        m_v=t * obs.m_v,
        m_vp=t * obs.m_vp,
        gamma2=t * obs.gamma2,
        gamma=None if obs.gamma is None else t * obs.gamma,
        name=f"{t:g}*{obs.name}",
    )


def negate(obs: Observable) -> Observable:
    """Observable ``-v``; used to normalise the sign of ``v'(c)``."""
    v, dv, d2v = obs.v, obs.dv, obs.d2v
    neg = replace(
        obs,
        v=lambda x: -v(x),
        dv=lambda x: -dv(x),
        d2v=None if d2v is None else (lambda x: -d2v(x)),
        name=f"-{obs.name}",
    )
    return replace(neg, c=_argmax_dv(neg.dv))


def compose_frequency(obs: Observable, r: int) -> Observable:
    """Observable ``x -> v(r x mod 1)``.

    ``v'`` picks up a factor ``r``; the Hölder constant of ``v'`` picks up
    ``r**(1 + eps)`` and that of ``v''`` picks up ``r**(2 + eps)``. The new
    ``c`` is the smallest preimage of the old one.
    """
    if int(r) != r or r < 1:
        raise ValidationError(f"frequency r must be a positive integer, got {r}")
    r = int(r)
    if r == 1:
        return obs
    v, dv, d2v = obs.v, obs.dv, obs.d2v
    eps = obs.epsilon

    def er(x):
        return np.mod(r * np.asarray(x, dtype=float), 1.0)

    return replace(
        obs,
        v=lambda x: v(er(x)),
        dv=lambda x: r * dv(er(x)),
        d2v=None if d2v is None else (lambda x: r * r * d2v(er(x))),
        m_vp=r * obs.m_vp,
        gamma2=obs.gamma2 * r ** (1.0 + eps),
        gamma=None if obs.gamma is None else obs.gamma * r ** (2.0 + eps),
        c=obs.c / r,
        name=f"{obs.name}@r={r}",
    )
