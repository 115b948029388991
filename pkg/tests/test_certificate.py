from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from inexact_gd import certificate as cert_mod
from inexact_gd import rates
from inexact_gd.certificate import CertificateError, PepPoint, interpolation_check
from inexact_gd.rates import Regime

deltas = st.floats(0.02, 0.97)
fracs = st.floats(0.01, 0.99)


@pytest.mark.parametrize("delta", [0.1, 0.5, 0.8])
def test_grid_passes(delta):
    hm = rates.h_max(delta)
    for k in range(1, 60):
        rep = cert_mod.verify_certificate(hm * k / 60, delta)
        assert rep.passed, (k, rep.failures)


def test_left_regime_frozen():
    c = cert_mod.certificate_params(0.5, 0.5)
    assert (c.regime, c.lam, c.b, c.rho) == (Regime.LEFT, 1.0, 0.125, 0.25)


def test_right_regime_frozen():
    # u = 1.8: lam = 0.2 / 0.8, b = 0.6 / 1.6, rho = 1.8 * 0.2 / (2 * 0.64)
    c = cert_mod.certificate_params(1.2, 0.5)
    assert c.regime is Regime.RIGHT
    assert c.lam == pytest.approx(0.25)
    assert c.b == pytest.approx(0.375)
    assert c.rho == pytest.approx(0.28125)


def test_intermediate_a1_vanishes():
    h = 1.05
    c = cert_mod.certificate_params(h, 0.5)
    m = cert_mod.build_proof_matrices(h, 0.5, c)
    assert np.max(np.abs(m.A1)) < 1e-12


@given(deltas, fracs, st.lists(st.floats(-3, 3), min_size=6, max_size=6))
def test_matrix_form_equals_combined_inequalities(delta, frac, z):
    # the weighted sum of inequality right-hand sides, evaluated directly,
    # equals 1/2 z^T (A + diag(0, 2 rho, 0)) z coordinatewise
    h = frac * rates.h_max(delta)
    c = cert_mod.certificate_params(h, delta)
    m = cert_mod.build_proof_matrices(h, delta, c)
    M = m.A + np.diag([0.0, 2 * c.rho, 0.0])
    Z = np.array(z).reshape(3, 2)
    q = cert_mod.combination_quadratic_form(h, delta, c.lam, c.b, Z[0], Z[1], Z[2])
    ref = 0.5 * sum(Z[:, i] @ M @ Z[:, i] for i in range(2))
    assert q == pytest.approx(ref, rel=1e-9, abs=1e-9)


@given(deltas, fracs)
def test_certificate_properties(delta, frac):
    h = frac * rates.h_max(delta)
    rep = cert_mod.verify_certificate(h, delta)
    assert rep.passed, rep.failures
    c = rep.certificate
    assert c.lam >= 0 and c.b > 0
    assert 1 / c.rho == pytest.approx(rates.rate_one_step_to_f1(h, delta), rel=1e-9)


@given(deltas, fracs, st.integers(0, 2**32 - 1))
def test_certified_decrease_on_random_quadratics(delta, frac, seed):
    # independent check: f0 - f1 >= rho ||g1||^2 on a random 1-smooth convex quadratic
    h = frac * rates.h_max(delta)
    rho = cert_mod.certificate_params(h, delta).rho
    rng = np.random.default_rng(seed)
    Q = rng.normal(size=(2, 2))
    Q = Q @ Q.T
    Q /= max(np.linalg.eigvalsh(Q)[-1], 1e-12)
    x0 = rng.normal(size=2)
    g0 = Q @ x0
    e = rng.normal(size=2)
    e *= delta * np.linalg.norm(g0) * rng.uniform() / max(np.linalg.norm(e), 1e-300)
    x1 = x0 - h * (g0 + e)
    g1 = Q @ x1
    f0, f1 = 0.5 * x0 @ Q @ x0, 0.5 * x1 @ Q @ x1
    assert f0 - f1 >= rho * (g1 @ g1) - 1e-10 * max(1.0, f0)


@pytest.mark.parametrize("h,delta", [(0.5, 0.5), (1.05, 0.5), (1.25, 0.5)])
@pytest.mark.parametrize("field,factor", [("rho", 1.01), ("lam", 1.01), ("lam", 0.99), ("rho", 0.99)])
def test_perturbed_certificate_rejected(h, delta, field, factor):
    c = cert_mod.certificate_params(h, delta)
    bad = replace(c, **{field: getattr(c, field) * factor})
    assert not cert_mod.verify_certificate(h, delta, bad).passed


def test_domain_errors():
    with pytest.raises(CertificateError):
        cert_mod.certificate_params(rates.h_max(0.5), 0.5)
    with pytest.raises(ValueError):
        cert_mod.certificate_params(1.0, 0.0)
    with pytest.raises(CertificateError):
        cert_mod.right_certificate(0.5, 0.5)
    with pytest.raises(CertificateError):
        cert_mod.build_proof_matrices(1.0, 0.5, cert_mod.Certificate(Regime.LEFT, 1.0, 0.0, 0.5))


@given(st.floats(0.001, 1.999))
def test_exact_certificates(h):
    rep = cert_mod.verify_certificate_exact(h)
    assert rep.passed, rep.failures


def test_exact_certificate_frozen():
    assert cert_mod.exact_certificate(1.0).rho == 1.0
    c = cert_mod.exact_certificate(1.8)
    assert c.lam == pytest.approx(0.25)
    assert c.rho == pytest.approx(0.5 * (1 / 0.64 - 1))


def test_interpolation_check():
    # f(x) = x^2/2 sampled exactly is interpolable, shifting a value breaks it
    pts = {str(x): PepPoint([x], [x], 0.5 * x * x) for x in (-1.0, 0.3, 2.0)}
    assert interpolation_check(pts).feasible
    pts["0.3"] = PepPoint([0.3], [0.3], 0.5 * 0.09 + 0.1)
    rep = interpolation_check(pts)
    assert not rep.feasible and "0.3" in rep.worst_pair
    with pytest.raises(ValueError):
        interpolation_check([PepPoint([0.0], [0.0], 0.0), PepPoint([0.0, 1.0], [0.0, 1.0], 0.5)])


def test_interpolation_scales_with_l():
    a = PepPoint([0.0], [0.0], 0.0)
    b = PepPoint([1.0], [2.0], 1.0)  # f = x^2 with L = 2
    assert interpolation_check([a, b], L=2.0).feasible
    assert not interpolation_check([a, b], L=1.0).feasible
