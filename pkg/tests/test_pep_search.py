import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from inexact_gd import pep_search, rates
from inexact_gd.certificate import PepPoint


def bound(h, delta, criterion):
    if criterion == "to_fstar":
        return rates.rate_one_step_to_fstar(h, delta)
    return rates.rate_one_step_to_f1(h, delta)


@given(st.floats(0.0, 0.9), st.floats(0.02, 0.98))
def test_scaled_seeds_match_closed_forms(delta, frac):
    h = frac * rates.h_max(delta)
    lo = pep_search.seed_candidate(h, delta, "scaled_lower")
    up = pep_search.seed_candidate(h, delta, "scaled_upper")
    assert lo.value == pytest.approx(1 / (h * (1 - delta) + 0.5), rel=1e-9)
    assert up.value == pytest.approx(2 * (1 - h * (1 + delta)) ** 2, rel=1e-9, abs=1e-12)


@settings(max_examples=15)
@given(st.floats(0.0, 0.9), st.floats(0.05, 0.95), st.sampled_from(pep_search.CRITERIA), st.integers(0, 1000))
def test_search_never_beats_the_proven_rate(delta, frac, criterion, seed):
    # every candidate is exactly feasible, so its value is a valid lower bound
    h = frac * rates.h_max(delta)
    best, value = pep_search.search_one_step(h, delta, criterion, 2, budget=300, seed=seed, n_refine=4)
    ok, rep = best.validate()
    assert ok, rep["issues"]
    assert value <= bound(h, delta, criterion) + 1e-6


@pytest.mark.parametrize("h", [0.5, 1.5, 1.8])
def test_exact_case_recovered(h):
    _, value = pep_search.search_one_step(h, 0.0, "to_fstar", 1, budget=500, seed=0)
    assert value == pytest.approx(rates.rate_exact_N(h, 1), rel=1e-2)


def test_deterministic_for_a_seed():
    a, _ = pep_search.search_one_step(1.05, 0.5, budget=400, seed=11, n_refine=4)
    b, _ = pep_search.search_one_step(1.05, 0.5, budget=400, seed=11, n_refine=4)
    assert a.to_json(sort_keys=True) == b.to_json(sort_keys=True)


def test_bivariate_worst_case_at_optimal_stepsize():
    delta = 0.5
    h, _ = rates.optimal_stepsize(delta, 1)
    (c1, v1), (c2, v2) = pep_search.compare_1d_2d(h, delta, budget=2000, seed=0)
    C = rates.rate_one_step_to_fstar(h, delta)
    assert v2 >= 0.99 * C
    assert v1 < v2
    assert np.all(c1.d0[1:] == 0) and c1.points["1"].g[1] == 0
    diag = pep_search.orthogonality_diagnostic(c2)
    # worst direction: the error is tangent to the admissible ball
    assert abs(diag["cos_error_direction"]) < 1e-3
    assert diag["cos_error_gradient"] == pytest.approx(-delta, abs=1e-3)


def test_validate_catches_tampering():
    c = pep_search.seed_candidate(0.6, 0.3, "scaled_lower")
    assert c.validate()[0]
    p1 = c.points["1"]
    c.points["1"] = PepPoint(p1.x, p1.g, p1.f - 0.5)
    ok, rep = c.validate()
    assert not ok and any(i.startswith("interpolation") for i in rep["issues"])
    c2 = pep_search.seed_candidate(0.6, 0.3, "scaled_lower")
    c2.d0 = c2.d0 * 0.5
    ok, rep = c2.validate()
    assert "inexactness" in rep["issues"] and "step" in rep["issues"]


def test_json_contents():
    c = pep_search.seed_candidate(1.0, 0.5, "orthogonal")
    d = json.loads(c.to_json())
    assert set(d["points"]) == {"0", "1", "*"}
    assert len(d["d0"]) == 2 and d["objective"] == pytest.approx(c.value)
    assert all(s >= -1e-9 for s in d["slacks"].values())
    assert d["orthogonality"]["cos_error_gradient"] == pytest.approx(-0.5)


def test_orthogonality_undefined_for_exact_direction():
    c = pep_search.seed_candidate(1.0, 0.0, "scaled_lower")
    assert pep_search.orthogonality_diagnostic(c)["undefined"]


def test_input_errors():
    with pytest.raises(ValueError):
        pep_search.search_one_step(1.4, 0.5)
    with pytest.raises(ValueError):
        pep_search.search_one_step(1.0, 0.5, criterion="to_x")
    with pytest.raises(ValueError):
        pep_search.search_one_step(1.0, 0.5, dimension=3)
    with pytest.raises(ValueError):
        pep_search.search_one_step(1.0, 0.5, budget=0)
