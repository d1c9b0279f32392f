import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twistcurve.errors import ValidationError
from twistcurve.maps import (CircleMapSpec, circle_dist, distortion_check, forward_orbit,
                             linear_map, make_map, map_constants, sine_map)

BUILTIN = [linear_map(2), linear_map(4), linear_map(3), sine_map(8, 0.1), sine_map(3, -1.5)]


def test_make_map_examples():
    e4 = make_map({"kind": "linear", "degree": 4})
    assert e4(0.3) == pytest.approx(0.2, abs=1e-15)
    assert np.all(e4.deriv(np.linspace(0, 1, 7)) == 4.0)
    p = make_map(CircleMapSpec("sine-perturbed", 8, 0.1))
    assert p.deriv(0.0) == pytest.approx(8.1)
    assert p.deriv(0.5) == pytest.approx(7.9)
    with pytest.raises(ValidationError):
        make_map(CircleMapSpec("sine-perturbed", 2, 1.5))
    with pytest.raises(ValidationError):
        make_map(CircleMapSpec("linear", 1))


@pytest.mark.parametrize("fmap", BUILTIN, ids=lambda m: f"{m.spec.kind}-{m.degree}")
def test_lift_is_degree_covering(fmap):
    xs = np.random.default_rng(0).random(200)
    assert np.allclose(fmap.lift(xs + 1.0), fmap.lift(xs) + fmap.degree, atol=1e-12)
    assert fmap.deriv(xs).min() > 1.0


@pytest.mark.parametrize("fmap", BUILTIN, ids=lambda m: f"{m.spec.kind}-{m.degree}")
def test_derivatives_match_finite_differences(fmap):
    xs = np.random.default_rng(1).random(1000)
    step = 1e-6
    fd1 = (fmap.lift(xs + step) - fmap.lift(xs - step)) / (2 * step)
    assert np.allclose(fd1, fmap.deriv(xs), rtol=1e-6)
    fd2 = (fmap.deriv(xs + step) - fmap.deriv(xs - step)) / (2 * step)
    scale = max(1.0, np.abs(fmap.second_deriv(xs)).max())
    assert np.max(np.abs(fd2 - fmap.second_deriv(xs))) <= 1e-6 * scale


def test_map_constants_linear():
    c = map_constants(linear_map(4))
    assert (c.lam, c.lambda1, c.lambda2, c.kappa, c.distortion) == (4, 4, 0, 0.25, 1)
    c2 = map_constants(linear_map(2))
    assert c2.kappa == 0.5


def test_map_constants_perturbed():
    c = map_constants(sine_map(8, 0.1))
    assert c.lam == pytest.approx(7.9, abs=1e-12)
    assert c.lambda1 == pytest.approx(8.1, abs=1e-12)
    assert c.lambda2 == pytest.approx(0.2 * math.pi, abs=1e-12)
    assert c.kappa == pytest.approx(8.1 / 7.9**2, rel=1e-12)
    # mpmath: exp(0.2 pi / 6.9)
    assert c.distortion == pytest.approx(1.09533544259556994, rel=1e-12)
    assert c.kappa == c.lambda1 / c.lam**2


def test_forward_orbit_examples():
    e4 = linear_map(4)
    o = forward_orbit(e4, 0.0, 5)
    assert np.all(o.points == 0)
    assert o.deriv_products.tolist() == [1, 4, 16, 64, 256, 1024]
    o = forward_orbit(e4, 1 / 3, 2)
    assert np.allclose(o.points, 1 / 3, atol=1e-15)


def test_forward_orbit_dfdivide():
    p = sine_map(8, 0.1)
    o = forward_orbit(p, 0.2, 3)
    assert np.all(np.diff(o.deriv_products) > 0)
    for i in range(4):
        for j in range(i, 4):
            sub = forward_orbit(p, o.points[i], j - i).deriv_products[-1]
            assert o.deriv_products[j] / o.deriv_products[i] == pytest.approx(sub, rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(x=st.floats(0, 1, exclude_max=True), m=st.integers(1, 12), data=st.data())
def test_multiplicativity_property(x, m, data):
    p = sine_map(8, 0.1)
    o = forward_orbit(p, x, m)
    i = data.draw(st.integers(0, m))
    j = data.draw(st.integers(i, m))
    sub = forward_orbit(p, o.points[i], j - i).deriv_products[-1]
    assert o.deriv_products[j] / o.deriv_products[i] == pytest.approx(sub, rel=1e-12)


def test_inverse_branch_examples():
    e4 = linear_map(4)
    assert e4.inverse_branch(1, 0.0) == 0.25
    assert e4.inverse_branch(0, 0.5) == 0.125
    p = sine_map(8, 0.1)
    x = p.inverse_branch(3, 0.7)
    assert abs(p(x) - 0.7) <= 1e-13
    assert p.branch_index(x) == 3
    with pytest.raises(ValidationError):
        e4.inverse_branch(4, 0.1)


@settings(max_examples=100, deadline=None)
@given(y=st.floats(0, 1, exclude_max=True), b=st.integers(0, 7))
def test_branch_inversion_property(y, b):
    p = sine_map(8, 0.1)
    x = p.inverse_branch(b, y)
    assert circle_dist(p(x), y) <= 1e-12
    ends = p.branch_endpoints()
    assert ends[b] - 1e-15 <= x <= ends[b + 1] + 1e-15


def test_branch_endpoints():
    ends = sine_map(8, 0.1).branch_endpoints()
    assert ends[0] == 0.0 and ends[-1] == pytest.approx(1.0, abs=1e-15)
    assert np.all(np.diff(ends) > 0)


def test_distortion_check():
    assert distortion_check(linear_map(4), 500, 0) == (1.0, 1.0)
    assert distortion_check(linear_map(4), 0, 0) is None
    p = sine_map(8, 0.1)
    c1 = map_constants(p).distortion
    lo, hi = distortion_check(p, 10_000, 3)
    assert 1 / c1 <= lo <= hi <= c1
    assert lo < 1 < hi


def test_circle_dist():
    assert circle_dist(0.05, 0.95) == pytest.approx(0.1)
    assert circle_dist(0.3, 0.3) == 0
