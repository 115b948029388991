"""Gradient descent with relatively inexact gradients: tight rates, dual
certificates, worst-case instances and numerical worst-case search."""

from .certificate import (
    Certificate,
    CertificateError,
    PepPoint,
    certificate_params,
    interpolation_check,
    verify_certificate,
    verify_certificate_exact,
)
from .instances import (
    Instance,
    OracleError,
    make_huber,
    make_quadratic,
    oracle_exact,
    oracle_orthogonal,
    oracle_random,
    oracle_scaled,
)
from .pep_search import PepCandidate, compare_1d_2d, search_one_step
from .rates import (
    DivergenceRegionError,
    RateQuery,
    Regime,
    approx_optimal_stepsize,
    classify_regime,
    compare_h_max,
    cubic_coeffs,
    h_max,
    lambda_tilde,
    lower_bound_N,
    optimal_stepsize,
    rate_exact_N,
    rate_N_steps,
    rate_one_step_to_f1,
    rate_one_step_to_fstar,
    regime_boundaries,
)
from .simulator import InexactnessViolation, Trace, divergence_probe, fuzz_upper_bound, metrics, run

__version__ = "0.1.0"
