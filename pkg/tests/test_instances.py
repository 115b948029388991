import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from inexact_gd import certificate, instances
from inexact_gd.certificate import PepPoint
from inexact_gd.instances import OracleError, make_huber, make_quadratic


@given(st.floats(0.0, 0.95), st.floats(0.05, 0.95), st.integers(1, 30), st.floats(0.1, 10.0))
def test_huber_normalization(delta, frac, N, L):
    h = frac * 2 / (1 + delta)
    inst = make_huber(delta, h, N, L)
    assert inst.value(inst.x_start) == pytest.approx(1.0, rel=1e-12)
    assert inst.threshold == pytest.approx(inst.slope / L)
    # N scaled steps of length (h/L)(1-delta) slope land exactly on the kink
    x_n = inst.x_start[0] - N * (h / L) * (1 - delta) * inst.slope
    assert x_n == pytest.approx(inst.threshold, rel=1e-10)


def test_huber_frozen():
    # delta = 0.3, h = 0.75, N = 20: N h (1 - delta) + 1/2 = 11
    inst = make_huber(0.3, 0.75, 20)
    assert inst.slope == pytest.approx(1 / math.sqrt(11))
    assert inst.x_start[0] == pytest.approx(11.5 / math.sqrt(11))


def test_quadratic_normalization():
    for L in (0.5, 1.0, 4.0):
        inst = make_quadratic(L, dimension=2)
        assert inst.value(inst.x_start) == pytest.approx(1.0)
        np.testing.assert_allclose(inst.grad(inst.x_start), L * inst.x_start)


@given(st.floats(0.0, 0.9), st.floats(0.1, 0.9), st.floats(0.2, 5.0), st.integers(0, 2**31))
def test_huber_is_smooth_convex(delta, frac, L, seed):
    inst = make_huber(delta, frac * 2 / (1 + delta), 3, L, dimension=2)
    rng = np.random.default_rng(seed)
    xs = rng.normal(scale=2 * inst.x_start[0], size=(5, 2))
    pts = [PepPoint(x, inst.grad(x), inst.value(x)) for x in xs]
    assert certificate.interpolation_check(pts, L=L, tol=1e-10).feasible


def test_kink_is_continuous():
    inst = make_huber(0.5, 0.5, 2)
    t = inst.threshold
    assert inst.value([t]) == pytest.approx(inst.value([t * (1 + 1e-12)]), abs=1e-10)
    np.testing.assert_allclose(inst.grad([t]), inst.grad([t * (1 + 1e-12)]), atol=1e-10)


def test_embed_keeps_values():
    inst = make_huber(0.2, 1.0, 4)
    e = inst.embed(2)
    assert e.dimension == 2
    assert e.value(e.x_start) == pytest.approx(inst.value(inst.x_start))


def test_bad_instance_parameters():
    with pytest.raises(ValueError):
        make_huber(1.0, 0.5)
    with pytest.raises(ValueError):
        make_huber(0.5, 1.4)
    with pytest.raises(ValueError):
        make_huber(0.5, 0.5, N=0)
    with pytest.raises(ValueError):
        instances.Instance("cubic", 1.0, [1.0])


def test_scaled_oracle():
    o = instances.oracle_scaled(0.7, 0.3)
    np.testing.assert_allclose(o(None, np.array([2.0])), [1.4])
    with pytest.raises(OracleError):
        instances.oracle_scaled(0.6, 0.3)


def test_orthogonal_oracle_frozen():
    # delta = 1/2, g = (1, 0): d = (3/4, sqrt(3)/4)
    d = instances.oracle_orthogonal(0.5)(None, np.array([1.0, 0.0]))
    np.testing.assert_allclose(d, [0.75, 0.25 * math.sqrt(3)], rtol=1e-15)


@given(st.floats(0.01, 0.99), st.floats(-5, 5), st.floats(-5, 5), st.sampled_from([1, -1]))
def test_orthogonal_oracle_geometry(delta, a, b, orientation):
    g = np.array([a, b])
    if np.linalg.norm(g) < 1e-3:
        return
    d = instances.oracle_orthogonal(delta, orientation)(None, g)
    e = d - g
    ng = np.linalg.norm(g)
    assert np.linalg.norm(e) == pytest.approx(delta * ng, rel=1e-12)
    # the error is tangent to the admissible ball: orthogonal to d, at angle -delta to g
    assert abs(e @ d) <= 1e-12 * ng * ng
    assert (e @ g) / (np.linalg.norm(e) * ng) == pytest.approx(-delta, rel=1e-9)
    assert np.linalg.norm(d) == pytest.approx(math.sqrt(1 - delta**2) * ng, rel=1e-12)


def test_orthogonal_needs_two_dimensions():
    with pytest.raises(ValueError):
        instances.oracle_orthogonal(0.5)(None, np.array([1.0]))


@given(st.floats(0.0, 0.99), st.integers(0, 2**31), st.integers(1, 3))
def test_random_oracle_admissible_and_reproducible(delta, seed, dim):
    o = instances.oracle_random(delta, seed)
    g = np.arange(1.0, dim + 1.0)
    a = [o.session()(None, g) for _ in range(2)]
    np.testing.assert_array_equal(a[0], a[1])
    assert np.linalg.norm(a[0] - g) <= delta * np.linalg.norm(g) * (1 + 1e-12)


def test_descriptors():
    assert instances.oracle_random(0.2, 7).descriptor() == {"kind": "random", "delta": 0.2, "seed": 7}
    assert make_quadratic().descriptor()["kind"] == "quadratic"
