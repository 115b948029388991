import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from inexact_gd import rates, simulator
from inexact_gd.instances import Oracle, make_huber, make_quadratic, oracle_orthogonal, oracle_scaled


def test_huber_left_regime_frozen():
    tr = simulator.run(make_huber(0.3, 0.75, 20), oracle_scaled(0.7, 0.3), 0.75, 0.3, 20)
    m = simulator.metrics(tr)
    assert m["ratio_min"] == pytest.approx(1 / 11, rel=1e-12)
    assert m["ratio_last"] == pytest.approx(1 / 11, rel=1e-12)


@given(st.floats(0.0, 0.9), st.floats(0.05, 0.99), st.integers(1, 40), st.floats(0.2, 5.0))
def test_huber_attains_left_bound(delta, t, N, L):
    h = t * rates.regime_boundaries(delta).left_end
    tr = simulator.run(make_huber(delta, h, N, L), oracle_scaled(1 - delta, delta), h, delta, N)
    assert simulator.metrics(tr)["ratio_min"] == pytest.approx(1 / (N * h * (1 - delta) + 0.5), rel=1e-9)


@given(st.floats(0.0, 0.9), st.floats(0.0, 1.0), st.integers(1, 40))
def test_quadratic_attains_right_bound(delta, t, N):
    _, hi, hm = rates.regime_boundaries(delta)
    h = hi + t * (hm - hi)
    tr = simulator.run(make_quadratic(), oracle_scaled(1 + delta, delta), h, delta, N)
    m = simulator.metrics(tr)
    assert m["ratio_last"] == pytest.approx(2 * (1 - h * (1 + delta)) ** (2 * N), rel=1e-9, abs=1e-300)
    assert m["ratio_last"] <= rates.rate_N_steps(h, delta, N) + 1e-9


def test_two_dimensional_instances_agree_with_1d():
    h, delta, N = 0.6, 0.4, 7
    a = simulator.run(make_huber(delta, h, N, dimension=1), oracle_scaled(1 - delta, delta), h, delta, N)
    b = simulator.run(make_huber(delta, h, N, dimension=2), oracle_scaled(1 - delta, delta), h, delta, N)
    np.testing.assert_allclose(a.f, b.f, rtol=1e-14)


def test_orthogonal_oracle_run_respects_bound():
    h, delta, N = 1.0, 0.5, 10
    tr = simulator.run(make_huber(delta, h, N, dimension=2), oracle_orthogonal(delta), h, delta, N)
    assert simulator.metrics(tr)["ratio_min"] <= rates.rate_N_steps(h, delta, N) + 1e-12


class _Cheat(Oracle):
    kind = "cheat"

    def direction(self, x, g, rng=None):
        return 2.0 * g

    def __call__(self, x, g):  # skips the oracle's own check
        return self.direction(x, g)


def test_inexactness_violation_names_iteration():
    with pytest.raises(simulator.InexactnessViolation) as err:
        simulator.run(make_quadratic(), _Cheat(0.1), 0.5, 0.1, 3)
    assert err.value.k == 0


def test_degenerate_start():
    tr = simulator.run(make_quadratic(), oracle_scaled(1.0, 0.0), 1.0, 0.0, 3, x0=[0.0])
    assert simulator.metrics(tr)["degenerate"]


def test_divergence_probe():
    delta = 0.5
    p = simulator.divergence_probe(delta, 1.1 * rates.h_max(delta), N=50)
    assert p["diverges"] and p["strictly_increasing"]
    assert p["max_factor_error"] <= 1e-12
    assert p["expected_factor"] == pytest.approx(1.2)


def test_csv_layout():
    tr = simulator.run(make_huber(0.3, 0.75, 2, dimension=2), oracle_scaled(0.7, 0.3), 0.75, 0.3, 2)
    lines = tr.to_csv("config: test").splitlines()
    assert lines[0] == "# config: test"
    assert lines[1] == "k,x,g_norm,d_norm,f,err_ratio"
    assert len(lines) == 2 + 3
    assert lines[-1].endswith(",")  # no direction at the final iterate
    assert ";" in lines[2].split(",")[1]


def test_fuzz_small():
    out = simulator.fuzz_upper_bound(n_configs=4, runs_per_config=40, seed=3)
    assert out["runs"] == 160
    assert not out["violations"]
    assert out["worst_ratio_to_bound"] <= 1 + 1e-9
