import math
from fractions import Fraction

import numpy as np
import pytest

from twistcurve.alpha import (TwistConfig, eval_alpha, eval_alpha_iterative, residual,
                              residual_bound, tail_bound, truncation_for)
from twistcurve.errors import ValidationError
from twistcurve.maps import linear_map, map_constants, sine_map
from twistcurve.observables import compose_frequency, make_constant, make_cosine, scale

COS = make_cosine()
WEIER = (linear_map(4), COS, TwistConfig(0.5))
CONST_ALPHA = -1 / (3**0.7 - 1)  # geometric series -sum 3^{-0.7(i+1)}

CONFIGS = {
    "weierstrass": WEIER,
    "theta03": (linear_map(4), COS, TwistConfig(0.3)),
    "perturbed": (sine_map(8, 0.1), COS, TwistConfig(0.5)),
    "hardy32": (linear_map(32), COS, TwistConfig(0.5)),
    "lacunary2048": (linear_map(2048), COS, TwistConfig(0.5)),
    "constant": (linear_map(3), make_constant(1.0), TwistConfig(0.7)),
    "r3": (linear_map(2), COS, TwistConfig(0.4, r=3)),
}


def brute_truncation(tol, lam, m_v, theta):
    n = 0
    while m_v * lam ** (-(n + 1) * theta) / (1 - lam**-theta) > tol:
        n += 1
    return n


def test_twist_config_validation():
    for bad in (0.0, 1.0, -0.1, 1.5):
        with pytest.raises(ValidationError, match=r"theta must lie in \(0,1\)"):
            TwistConfig(bad)
    with pytest.raises(ValidationError):
        TwistConfig(0.5, r=0)
    with pytest.raises(ValidationError):
        TwistConfig(0.5, k0=0)


def test_truncation_examples():
    e4 = map_constants(linear_map(4))
    assert truncation_for(1e-10, e4, COS, TwistConfig(0.5)) == 34
    e2048 = map_constants(linear_map(2048))
    assert truncation_for(1e-10, e2048, COS, TwistConfig(0.5)) == brute_truncation(1e-10, 2048, 1, 0.5) == 6
    assert truncation_for(2.0, e4, COS, TwistConfig(0.5)) == 0


@pytest.mark.parametrize("tol", [1e-3, 1e-7, 3.3e-9, 1e-12])
@pytest.mark.parametrize("lam,theta", [(4, 0.5), (3, 0.7), (7.9, 0.2), (2048, 0.9)])
def test_truncation_matches_brute_force(tol, lam, theta):
    from twistcurve.maps import MapConstants
    c = MapConstants(lam, lam, 0, 1 / lam, 1)
    n = truncation_for(tol, c, COS, TwistConfig(theta))
    assert n == brute_truncation(tol, lam, 1.0, theta)
    assert tail_bound(n, lam, 1.0, theta) <= tol


def test_closed_form_values():
    fmap, obs, cfg = WEIER
    assert eval_alpha(0.0, 1e-12, fmap, obs, cfg).value == pytest.approx(-1.0, abs=1e-11)
    assert eval_alpha(0.5, 1e-12, fmap, obs, cfg).value == pytest.approx(0.0, abs=1e-11)
    res = eval_alpha(np.linspace(0, 1, 17), 1e-10, linear_map(3), make_constant(1), TwistConfig(0.7))
    assert np.allclose(res.value, CONST_ALPHA, atol=1e-9)


def test_tail_radius_is_honest():
    # compare a loose evaluation to a much tighter one
    fmap, obs, cfg = CONFIGS["perturbed"]
    xs = np.random.default_rng(0).random(500)
    loose = eval_alpha(xs, 1e-4, fmap, obs, cfg)
    tight = eval_alpha(xs, 1e-13, fmap, obs, cfg)
    assert np.all(np.abs(loose.value - tight.value) <= loose.tail_radius + tight.tail_radius)


@pytest.mark.parametrize("t", [2, 10, 0.5])
def test_linearity_in_v(t):
    fmap, obs, cfg = CONFIGS["perturbed"]
    xs = np.random.default_rng(1).random(300)
    base = eval_alpha(xs, 1e-10, fmap, obs, cfg)
    scaled = eval_alpha(xs, 1e-10 * t, fmap, scale(obs, t), cfg)
    assert np.allclose(scaled.value, t * base.value, rtol=1e-12, atol=1e-15)


@pytest.mark.parametrize("name", sorted(CONFIGS))
def test_boundedness(name):
    fmap, obs, cfg = CONFIGS[name]
    consts = map_constants(fmap)
    xs = np.random.default_rng(2).random(10_000)
    res = eval_alpha(xs, 1e-8, fmap, obs, cfg, consts)
    m_v = compose_frequency(obs, cfg.r).m_v
    assert np.all(np.abs(res.value) <= m_v / (consts.lam**cfg.theta - 1) + res.tail_radius)


@pytest.mark.parametrize("name", sorted(CONFIGS))
def test_residual_bound(name):
    fmap, obs, cfg = CONFIGS[name]
    consts = map_constants(fmap)
    xs = np.random.default_rng(3).random(10_000)
    res = residual(xs, 1e-10, fmap, obs, cfg, consts)
    assert np.max(np.abs(res)) <= residual_bound(1e-10, consts, cfg)


def test_residual_examples():
    assert residual_bound(1e-10, map_constants(linear_map(4)), TwistConfig(0.5)) == pytest.approx(3e-10)
    zero = make_constant(0.0)
    xs = np.linspace(0, 1, 11)
    assert np.all(residual(xs, 1e-10, linear_map(4), zero, TwistConfig(0.5)) == 0)
    assert abs(residual(0.0, 1e-10, *WEIER)) <= 3e-10


def test_iterative_zero_forcing():
    g = eval_alpha_iterative(64, 1, linear_map(4), make_constant(0.0), TwistConfig(0.5))
    assert np.all(g.values == 0)
    assert np.all(np.diff(g.xs) > 0) and g.xs[0] == 0 and g.xs[-1] < 1


def test_iterative_constant_forcing():
    g = eval_alpha_iterative(128, 60, linear_map(3), make_constant(1.0), TwistConfig(0.7))
    assert np.allclose(g.values, CONST_ALPHA, atol=1e-9)


def test_iterative_matches_series():
    fmap, obs, cfg = WEIER
    g = eval_alpha_iterative(4096, 40, fmap, obs, cfg)
    s = eval_alpha(g.xs, 1e-10, fmap, obs, cfg)
    assert np.max(np.abs(g.values - s.value)) <= g.tail_radius + s.tail_radius <= 1e-9


def test_iterative_linear_grid_is_exact():
    # E_3 permutes the dyadic grid, and float orbits of dyadic points are exact
    fmap, obs, cfg = linear_map(3), COS, TwistConfig(0.5)
    g = eval_alpha_iterative(1024, 60, fmap, obs, cfg)
    s = eval_alpha(g.xs, 1e-12, fmap, obs, cfg)
    assert np.max(np.abs(g.values - s.value)) <= 1e-9


def test_iterative_off_grid_map_within_radius():
    # the perturbed map does not send grid points to grid points
    fmap, obs, cfg = CONFIGS["perturbed"]
    g = eval_alpha_iterative(1000, 40, fmap, obs, cfg)
    s = eval_alpha(g.xs, 1e-10, fmap, obs, cfg)
    err = np.max(np.abs(g.values - s.value))
    assert err <= g.tail_radius + s.tail_radius
    assert err > 1e-4  # the interpolation error is real, not vacuous


def test_iterative_validation():
    with pytest.raises(ValidationError):
        eval_alpha_iterative(1, 3, *WEIER)
    with pytest.raises(ValidationError):
        eval_alpha_iterative(16, 0, *WEIER)
    with pytest.raises(ValidationError):
        eval_alpha(0.1, 0.0, *WEIER)


def test_frequency_composition_is_applied_once():
    # alpha for (f, v, r) equals alpha for (f, v o E_r, 1)
    fmap, obs, cfg = CONFIGS["r3"]
    xs = np.random.default_rng(4).random(50)
    a = eval_alpha(xs, 1e-10, fmap, obs, cfg).value
    b = eval_alpha(xs, 1e-10, fmap, compose_frequency(obs, 3), TwistConfig(0.4)).value
    assert np.allclose(a, b, atol=1e-14)
    # exact rational orbit of the dyadic float x under E_3 o E_2^i
    direct = [-sum(math.cos(2 * math.pi * float((3 * 2**i * Fraction(x)) % 1)) / 2 ** (0.4 * (i + 1))
                   for i in range(120)) for x in xs]
    assert np.allclose(a, direct, atol=1e-9)
