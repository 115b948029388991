import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from inexact_gd.cubic import largest_real_root, real_roots, relative_residual

coef = st.floats(-10, 10, allow_nan=False).filter(lambda v: abs(v) > 1e-3)


def test_three_known_roots():
    # (x - 3)(x - 1)(x + 2) = x^3 - 2x^2 - 5x + 6
    np.testing.assert_allclose(real_roots(1, -2, -5, 6), [3, 1, -2], rtol=1e-14)


def test_one_real_root_pads_with_nan():
    # (x - 2)(x^2 + 1)
    r = real_roots(1, -2, 1, -2)
    assert r[0] == pytest.approx(2.0, rel=1e-14)
    assert np.isnan(r[1]) and np.isnan(r[2])


def test_double_root_is_found():
    # (x - 1)^2 (x + 1) = x^3 - x^2 - x + 1
    r = real_roots(1, -1, -1, 1)
    np.testing.assert_allclose(r, [1, 1, -1], atol=1e-7)


def test_leading_zero_rejected():
    with pytest.raises(ValueError):
        real_roots(0.0, 1.0, 2.0, 3.0)


def test_vectorized_shape():
    c = np.array([1.0, 2.0])
    r = real_roots(c, -2 * c, -5 * c, 6 * c)
    assert r.shape == (2, 3)
    np.testing.assert_allclose(r[1], [3, 1, -2], rtol=1e-13)


@given(coef, coef, coef, coef)
def test_largest_root_matches_companion_eigenvalues(c3, c2, c1, c0):
    # independent oracle: eigenvalues of the companion matrix
    ref = np.roots([c3, c2, c1, c0])
    real = ref[np.abs(ref.imag) <= 1e-7 * max(1.0, np.max(np.abs(ref)))].real
    x = largest_real_root(c3, c2, c1, c0)
    assert relative_residual(c3, c2, c1, c0, x) < 1e-10
    if real.size:
        assert x == pytest.approx(np.max(real), rel=1e-4, abs=1e-4)


@given(st.lists(st.floats(-5, 5, allow_nan=False), min_size=3, max_size=3, unique=True), st.floats(0.1, 5))
def test_roots_recovered_from_factored_form(roots, lead):
    roots = sorted(roots, reverse=True)
    if min(abs(a - b) for a, b in zip(roots, roots[1:])) < 1e-2:
        return
    c = lead * np.poly(roots)
    np.testing.assert_allclose(real_roots(*c), roots, atol=1e-8)
