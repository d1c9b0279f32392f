import math

import numpy as np
import pytest

from twistcurve.errors import ValidationError
from twistcurve.maps import circle_dist
from twistcurve.observables import compose_frequency, make_cosine, negate, scale

TWO_PI = 2 * math.pi


def test_cosine_constants():
    v = make_cosine()
    assert v.m_vp == TWO_PI
    assert v.gamma == TWO_PI**3
    assert v.gamma2 == TWO_PI**2
    assert v.epsilon == 1.0
    assert v.v(0.0) == 1.0 and v.v(0.5) == -1.0
    assert v.c == 0.75
    assert v.dv(v.c) == pytest.approx(TWO_PI)


def test_cosine_constants_dominate_grid():
    v = make_cosine()
    xs = np.arange(2**14) / 2**14
    assert v.m_v >= np.abs(v.v(xs)).max()
    assert v.m_vp >= np.abs(v.dv(xs)).max()
    assert v.gamma2 >= np.abs(v.d2v(xs)).max()


@pytest.mark.parametrize("obs", [make_cosine(), compose_frequency(make_cosine(), 3),
                                 scale(make_cosine(), 2.5)], ids=["cos", "cos-r3", "2.5cos"])
def test_derivative_consistency(obs):
    xs = np.random.default_rng(0).random(1000)
    h = 1e-6
    fd = (obs.v(xs + h) - obs.v(xs - h)) / (2 * h)
    assert np.max(np.abs(fd - obs.dv(xs))) <= 1e-6 * obs.m_vp
    fd2 = (obs.dv(xs + h) - obs.dv(xs - h)) / (2 * h)
    assert np.max(np.abs(fd2 - obs.d2v(xs))) <= 1e-6 * np.abs(obs.d2v(xs)).max()


@pytest.mark.parametrize("obs", [make_cosine(), compose_frequency(make_cosine(), 2)])
def test_holder_constant_witness(obs):
    rng = np.random.default_rng(2)
    x, y = rng.random(1000), rng.random(1000)
    lhs = np.abs(obs.dv(x) - obs.dv(y))
    assert np.all(lhs <= obs.gamma2 * circle_dist(x, y) ** obs.epsilon + 1e-12)


def test_scale():
    v = make_cosine()
    v2 = scale(v, 2)
    assert v2.m_v == 2 and v2.m_vp == pytest.approx(4 * math.pi)
    assert v2.c == v.c
    assert scale(v, 1) is v
    xs = np.linspace(0, 1, 33)
    assert np.allclose(scale(scale(v, 3), 0.5).v(xs), scale(v, 1.5).v(xs), atol=1e-15)
    with pytest.raises(ValidationError):
        scale(v, 0)


def test_compose_frequency():
    v = make_cosine()
    assert compose_frequency(v, 1) is v
    v3 = compose_frequency(v, 3)
    assert v3.c == pytest.approx(0.25)
    assert v3.dv(v3.c) == pytest.approx(3 * TWO_PI)
    assert v3.m_vp == pytest.approx(3 * TWO_PI)
    assert v3.m_v == v.m_v
    v2 = compose_frequency(v, 2)
    assert v2.gamma2 == pytest.approx(4 * v.gamma2)
    with pytest.raises(ValidationError):
        compose_frequency(v, 0)


def test_negate_moves_argmax():
    n = negate(make_cosine())
    assert n.c == pytest.approx(0.25, abs=1e-9)
    assert n.dv(n.c) == pytest.approx(TWO_PI)
