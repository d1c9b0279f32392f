"""Explicit lower-bound machinery: pinching, condition (A), thresholds and witnesses.

Condition (A) at a point ``c`` for block length ``k0`` consists of three
inequalities on ``(f, v, theta)``. When it holds, increments

    |alpha(x) - alpha(x + h)| >= C0 h**theta

exist at arbitrarily small ``h`` near almost every ``x``: pick ``N`` with
``f^{k0 N}(x)`` close to ``c`` and ``h`` in the window
``[delta1, delta2] / (C1 (f^{k0 N})'(x))``. ``find_witness`` builds such a
triple and checks the inequality by evaluating ``alpha`` directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .alpha import TwistConfig, eval_alpha, series_terms, truncation_for
from .errors import (DegenerateError, NoOrbitHitError, PrecisionFloorError,
                     ValidationError)
from .maps import CircleMap, MapConstants, circle_dist, forward_orbit, map_constants
from .observables import Observable, compose_frequency, negate

H_FLOOR = 2.0**-45
SCAN_STARTS = 10_000
SCAN_LENGTH = 1_000
SCAN_CHUNK = 500


def pinching_constant(constants: MapConstants):
    """``kappa = Lambda_1 / lambda**2`` and whether ``kappa < 1``."""
    kappa = constants.lambda1 / constants.lam**2
    return kappa, kappa < 1.0


def hardy_threshold(theta: float, b: int | None = None):
    """Smallest base ``5**(1/(1 - theta))`` covered for ``E_b`` with cosine forcing."""
    if not 0.0 < theta < 1.0:
        raise ValidationError("theta must lie in (0,1)")
    threshold = 5.0 ** (1.0 / (1.0 - theta))
    return threshold, (None if b is None else b >= threshold)


@dataclass
class ConditionAReport:
    c: float
    k0: int
    theta: float
    vprime_orbit: list
    v_min: float
    same_sign: bool
    sign_flipped: bool
    a1_lhs: float
    a1_rhs: float
    a2_lhs: list
    a2_rhs: list
    a3_lhs: float
    a3_rhs: float
    passes_A: bool
    kappa: float
    pinching_ok: bool
    simple1_lhs: float
    simple1_rhs: float
    simple2_lhs: float
    simple2_rhs: float
    passes_simple: bool
    regime: str
    delta1: float
    delta2: float
    C0: float
    D1: list
    D2: list
    distortion: float
    lam: float
    lambda1: float
    notes: list = field(default_factory=list)

    @property
    def window_ok(self) -> bool:
        return self.delta1 <= self.delta2 and self.C0 > 0


def _regime(fmap: CircleMap, k0: int) -> str:
    if k0 > 1:
        return "general-k0"
    return "linear-k1" if fmap.is_linear else "nonlinear-k1"


def condition_a_report(fmap: CircleMap, obs: Observable, cfg: TwistConfig,
                       c: float | None = None,
                       constants: MapConstants | None = None) -> ConditionAReport:
    """Evaluate every side of condition (A), the simplified bounds and the thresholds.

    ``obs`` is taken after frequency composition with ``cfg.r``. If ``v'(c) < 0``
    the observable is negated first (``alpha`` flips sign with it) and
    ``sign_flipped`` is set.
    """
    constants = constants or map_constants(fmap)
    vr = compose_frequency(obs, cfg.r)
    c = vr.c if c is None else float(c)
    notes = []
    flipped = False
    if float(vr.dv(np.asarray(c))) < 0:
        vr = negate(vr)
        flipped = True
        notes.append("v'(c) < 0: v negated for the bounds")
    theta, k0, eps = cfg.theta, cfg.k0, vr.epsilon
    lam, big1, c1 = constants.lam, constants.lambda1, constants.distortion
    m_v, m_vp, g2 = vr.m_v, vr.m_vp, vr.gamma2

    orbit = forward_orbit(fmap, c, max(k0 - 1, 0)).points[:k0]
    vprime = [float(vr.dv(np.asarray(p))) for p in orbit]
    if vprime[0] == 0.0:
        raise DegenerateError("v'(c) = 0: no lower bound can be formed")
    same_sign = all(w > 0 for w in vprime) or all(w < 0 for w in vprime)
    v_min = min(abs(w) for w in vprime)
    if v_min == 0.0:
        raise DegenerateError("v' vanishes along the orbit of c")

    # (A_bd1)
    a1_lhs = (6.0 ** (1.0 + 1.0 / eps) * c1 ** (2.0 - theta) * m_v * g2 ** (1.0 / eps)
              / ((1.0 - lam ** (-k0 * theta)) * v_min ** (1.0 + 1.0 / eps))
              * big1 ** (k0 - 1 + theta) / lam ** ((k0 + 1) * theta))
    # (A_bd2), one inequality per block index j
    base2 = (m_vp * c1**2 / (1.0 - lam ** (-k0 * (1.0 - theta)))
             * big1**theta / lam ** (k0 * (1.0 - theta) + theta))
    a2_lhs = [base2 * (big1 / lam) ** (j * (1.0 - theta)) for j in range(k0)]
    a2_rhs = [w / 4.0 for w in vprime]
    # (A_bd3)
    a3_lhs = v_min / (6.0 * g2) if g2 > 0 else math.inf
    a3_rhs = big1 ** (k0 - 1)
    passes = (same_sign and a1_lhs <= 1.0 and all(l <= r for l, r in zip(a2_lhs, a2_rhs))
              and a3_lhs <= a3_rhs)

    kappa, pinching = pinching_constant(constants)
    simple1 = big1**theta * c1**2 / (lam * (1.0 - lam ** (theta - 1.0)))
    gamma = vr.gamma if vr.gamma is not None else math.nan
    passes_simple = bool(simple1 <= 0.25 and m_vp <= 9.0 * gamma)

    # per-block thresholds from the general-k0 argument
    D1 = [6.0 * m_v / ((1.0 - lam ** (-k0 * theta)) * w * lam ** (k0 * theta + j))
          for j, w in enumerate(vprime)]
    D2 = [(abs(w) / (6.0 * g2)) ** (1.0 / eps) / lam**j if g2 > 0 else math.inf
          for j, w in enumerate(vprime)]

    regime = _regime(fmap, k0)
    vc = vprime[0]
    if regime == "linear-k1":
        delta1 = 6.0 * m_v / ((1.0 - lam ** (-theta)) * vc * lam**theta)
        delta2 = D2[0]
        C0 = ((6.0 * m_v / (1.0 - lam ** (-theta))) ** (1.0 - theta) / 12.0
              * lam ** (-2.0 * theta + theta**2) * vc**theta)
    elif regime == "nonlinear-k1":
        delta1 = ((big1 / lam**2) ** theta * 6.0 * m_v * c1 ** (2.0 - theta)
                  / ((1.0 - lam ** (-theta)) * vc))
        delta2 = D2[0]
        # normalised increment >= v'(c)/12 - v'(c)/24 after the proof's tuning of s, N
        C0 = delta1 ** (1.0 - theta) * vc / (24.0 * big1**theta * c1 ** (2.0 - theta))
    else:
        delta1 = max(D1)
        delta2 = min(D2)
        C0 = (max(delta1, 0.0) ** (1.0 - theta) / 12.0
              * sum(w * lam ** (j * (1.0 - theta) - theta) for j, w in enumerate(vprime)))
        if not fmap.is_linear:
            notes.append("general-k0 thresholds are the linear-map formulas with lambda = min f'")
    if not same_sign:
        notes.append("v' changes sign along the orbit of c")

    return ConditionAReport(
        c=c, k0=k0, theta=theta, vprime_orbit=vprime, v_min=v_min, same_sign=same_sign,
        sign_flipped=flipped, a1_lhs=a1_lhs, a1_rhs=1.0, a2_lhs=a2_lhs, a2_rhs=a2_rhs,
        a3_lhs=a3_lhs, a3_rhs=a3_rhs, passes_A=bool(passes), kappa=kappa,
        pinching_ok=bool(pinching), simple1_lhs=simple1, simple1_rhs=0.25,
        simple2_lhs=m_vp, simple2_rhs=9.0 * gamma, passes_simple=passes_simple,
        regime=regime, delta1=delta1, delta2=delta2, C0=C0, D1=D1, D2=D2,
        distortion=c1, lam=lam, lambda1=big1, notes=notes,
    )


@dataclass
class WitnessReport:
    x: float
    N: int
    h: float
    h_window: tuple
    delta_alpha: float
    lower_bound: float
    margin: float
    passed: bool
    block_sums: list
    perturbation: float
    head_sum: float
    tail_sum: float
    eval_error: float
    reconstruction_error: float
    method: str
    hit_distance: float
    sign_flipped: bool


def _window(report: ConditionAReport, dn):
    scale = report.distortion * dn
    return report.delta1 / scale, report.delta2 / scale


def _scan_orbits(fmap, report, h_cap, rng, starts, length):
    """First (start index, N, x) in seed order whose orbit enters the target ball."""
    k0 = report.k0
    radius = report.delta2 * report.lambda1 ** (-(k0 - 1))
    deepest = 0
    for s0 in range(0, starts, SCAN_CHUNK):
        x0 = rng.random(min(SCAN_CHUNK, starts - s0))
        p = x0.copy()
        dn = np.ones_like(p)
        first = np.full(p.shape, -1)
        alive = np.ones(p.shape, dtype=bool)
        for step in range(1, length + 1):
            dn = dn * fmap.deriv(p)
            p = fmap(p)
            if step % k0:
                continue
            lo, hi = _window(report, dn)
            alive &= lo >= H_FLOOR
            if not alive.any():
                break
            deepest = max(deepest, step // k0)
            hit = alive & (first < 0) & (hi < h_cap) & (circle_dist(p, report.c) < radius)
            first[hit] = step // k0
        if (first >= 0).any():
            k = int(np.argmax(first >= 0))
            return float(x0[k]), int(first[k])
    raise NoOrbitHitError(
        f"no orbit of {starts} starts entered B(c, {radius:.3e}) within {length} steps",
        deepest_n=deepest,
    )


def _preimage_start(fmap, report, h_cap, rng):
    """Fallback: a ``k0 N``-th preimage of ``c`` for the smallest admissible ``N``."""
    k0 = report.k0
    n = 1
    while True:
        digits = rng.integers(0, fmap.degree, size=k0 * n)
        x = report.c
        for b in digits[::-1]:
            x = float(fmap.inverse_branch(int(b), x))
        dn = forward_orbit(fmap, x, k0 * n).deriv_products[-1]
        lo, hi = _window(report, dn)
        if lo < H_FLOOR:
            raise PrecisionFloorError(f"window below 2^-45 before reaching h_cap at N={n}")
        if hi < h_cap:
            return x, n
        n += 1


def increment_decomposition(x, h, n_trunc, fmap, vr, theta, k0, head_len):
    """Split ``alpha(x) - alpha(x + h)`` into block sums and the derivative-perturbation term.

    ``B_j`` collects ``(v(f^i(x+h)) - v(f^i x)) / ((f^{i+1})'(x))**theta`` over
    ``i = j mod k0``; the perturbation term carries the change of the
    derivative weights and vanishes for linear maps.
    """
    blocks = [0.0] * k0
    perturb = head = tail = 0.0
    terms_x = series_terms(x, n_trunc, fmap, vr.v, theta)
    terms_xh = series_terms(np.mod(x + h, 1.0), n_trunc, fmap, vr.v, theta)
    for (i, p, dx), (_, q, dxh) in zip(terms_x, terms_xh):
        first = float((vr.v(q) - vr.v(p)) / dx**theta)
        blocks[i % k0] += first
        if i <= head_len:
            head += first
        else:
            tail += first
        perturb += float(vr.v(q) * (dxh ** (-theta) - dx ** (-theta)))
    return blocks, perturb, head, tail


def find_witness(fmap: CircleMap, obs: Observable, cfg: TwistConfig,
                 report: ConditionAReport, h_cap: float, rng_seed=0,
                 starts: int = SCAN_STARTS, length: int = SCAN_LENGTH,
                 constants: MapConstants | None = None) -> WitnessReport:
    """Locate ``(x, N, h)`` with ``f^{k0 N}(x)`` near ``c`` and test ``|dalpha| >= C0 h^theta``."""
    if not report.window_ok:
        raise ValidationError("witness search needs delta1 <= delta2 and C0 > 0")
    if not h_cap > 0:
        raise ValidationError("h_cap must be positive")
    constants = constants or map_constants(fmap)
    vr = compose_frequency(obs, cfg.r)
    if report.sign_flipped:
        vr = negate(vr)
    theta, k0 = cfg.theta, report.k0
    rng = np.random.default_rng(rng_seed)
    try:
        x, n = _scan_orbits(fmap, report, h_cap, rng, starts, length)
        method = "orbit-scan"
    except NoOrbitHitError:
        x, n = _preimage_start(fmap, report, h_cap, rng)
        method = "preimage"

    orbit = forward_orbit(fmap, x, k0 * n)
    dn = orbit.deriv_products[-1]
    lo, hi = _window(report, dn)
    if lo < H_FLOOR:
        raise PrecisionFloorError(f"h window [{lo:.3e}, {hi:.3e}] is below 2^-45")
    h = math.sqrt(lo * hi)
    bound = report.C0 * h**theta
    tol = bound / 100.0
    unit = TwistConfig(theta, 1, k0)
    a_x = eval_alpha(x, tol, fmap, vr, unit, constants)
    a_xh = eval_alpha(math.fmod(x + h, 1.0), tol, fmap, vr, unit, constants)
    dalpha = a_x.value - a_xh.value
    eval_error = a_x.tail_radius + a_xh.tail_radius

    n_trunc = truncation_for(tol, constants, vr, unit)
    blocks, perturb, head, tail = increment_decomposition(
        x, h, n_trunc, fmap, vr, theta, k0, k0 * n)
    recon = abs(sum(blocks) + perturb - dalpha)
    return WitnessReport(
        x=x, N=n, h=h, h_window=(lo, hi), delta_alpha=dalpha, lower_bound=bound,
        margin=abs(dalpha) - bound, passed=abs(dalpha) >= bound, block_sums=blocks,
        perturbation=perturb, head_sum=head, tail_sum=tail, eval_error=eval_error,
        reconstruction_error=recon, method=method,
        hit_distance=float(circle_dist(orbit.points[-1], report.c)),
        sign_flipped=report.sign_flipped,
    )
