"""Dual certificates for the one-step rates, rebuilt and checked numerically.

A certificate is a nonnegative combination of the two interpolation
inequalities between ``x0`` and ``x1`` (weights ``lam + 1`` and ``lam``) and of
the inexactness inequality (weight ``b``). Writing ``z = (g0, g1, D)`` with
``D = (d0 - g0) / delta``, the combination reads

    f0 - f1 >= 1/2 z^T (A + diag(0, 2 rho, 0)) z,

so ``A`` positive semidefinite proves ``f0 - f1 >= rho ||g1||^2`` (L = 1).
``A`` splits into a Schur remainder ``A1`` plus a rank-one ``A2``; checking
``A1`` suffices.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import rates
from .rates import Regime

PSD_TOL = 1e-8
IDENTITY_TOL = 1e-10


class CertificateError(ValueError):
    """Raised when certificate parameters are requested outside their domain."""


@dataclass(frozen=True)
class Certificate:
    regime: Regime
    lam: float
    b: float
    rho: float


@dataclass(frozen=True)
class ProofMatrices:
    A: np.ndarray
    A1: np.ndarray
    A2: np.ndarray
    v: np.ndarray  # A2 = outer(v, v)


@dataclass
class CertReport:
    h: float
    delta: float
    certificate: Certificate
    min_eig_A1: float
    rank1_residual: float
    split_residual: float
    implied_rate: float
    rate: float
    rate_gap: float
    saturation: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.failures

    def as_row(self):
        c = self.certificate
        return {
            "delta": self.delta,
            "h": self.h,
            "regime": c.regime.value,
            "lambda": c.lam,
            "b": c.b,
            "rho": c.rho,
            "min_eig_A1": self.min_eig_A1,
            "rank1_residual": self.rank1_residual,
            "rate_gap": self.rate_gap,
            "passed": self.passed,
            "failures": ";".join(self.failures),
        }


def min_eigenvalue(M):
    """Smallest eigenvalue of a small symmetric matrix."""
    M = np.asarray(M, dtype=float)
    return float(np.linalg.eigvalsh(0.5 * (M + M.T))[0])


def certificate_params(h, delta):
    """Multipliers ``(lam, b, rho)`` proving the one-step rate at ``(h, delta)``.

    ``1 / rho`` equals ``rates.rate_one_step_to_f1(h, delta)``.
    """
    rates.check_delta(delta, allow_zero=False)
    lo, hi, hm = rates.regime_boundaries(delta)
    if not 0 < h < hm:
        raise CertificateError(f"h must lie in (0, {hm}) for delta={delta}, got {h}")
    regime = rates.classify_regime(h, delta)
    if regime is Regime.LEFT:
        return Certificate(regime, 1.0, h * delta / 2.0, h * (1.0 - delta))
    if regime is Regime.INTERMEDIATE:
        lam = rates.lambda_tilde(h, delta)
        b = 1.0 - 0.5 * h * lam - 1.0 / (2.0 * (1.0 + lam))
        rho = h - 1.0 + 0.5 * h * lam + (h - 1.0) / (2.0 * lam)
        return Certificate(regime, lam, b, rho)
    return right_certificate(h, delta)


def right_certificate(h, delta):
    """Right-regime multipliers; they require ``h (1 + delta) > 1``."""
    u = h * (1.0 + delta)
    if u <= 1.0:
        raise CertificateError(f"right-regime certificate needs h(1+delta) > 1, got {u}")
    lam = (2.0 - u) / (u - 1.0)
    b = h * delta / (2.0 * (u - 1.0))
    rho = u * (2.0 - u) / (2.0 * (u - 1.0) ** 2)
    return Certificate(Regime.RIGHT, lam, b, rho)


def build_proof_matrices(h, delta, cert):
    """Combination matrix ``A`` and its Schur split ``A = A1 + A2``.

    Rows and columns are indexed by ``(g0, g1, D)``.
    """
    lam, b, rho = cert.lam, cert.b, cert.rho
    if not b > 0:
        raise CertificateError("b must be positive for the Schur split; use the exact-gradient 2x2 certificate")
    hd = h * delta
    A = np.array(
        [
            [2 * (1 - h) * lam - 2 * b + 1, (h - 2) * lam - 1 + h, -hd * lam],
            [(h - 2) * lam - 1 + h, 2 * lam + 1 - 2 * rho, hd * (lam + 1)],
            [-hd * lam, hd * (lam + 1), 2 * b],
        ]
    )
    k = hd * hd / (2 * b)
    A1 = np.array(
        [
            [-2 * b - 2 * lam * (h - 1) + 1 - k * lam * lam, h + lam * (h - 2) - 1 + k * lam * (lam + 1), 0.0],
            [h + lam * (h - 2) - 1 + k * lam * (lam + 1), -2 * rho + 2 * lam + 1 - k * (lam + 1) ** 2, 0.0],
            [0.0, 0.0, 0.0],
        ]
    )
    s = math.sqrt(2 * b)
    v = np.array([-hd * lam / s, hd * (lam + 1) / s, s])
    return ProofMatrices(A, A1, np.outer(v, v), v)


def exact_matrix(h, lam, rho):
    """2x2 combination matrix of the exact-gradient proof, indexed by ``(g0, g1)``."""
    return np.array(
        [
            [2 * (1 - h) * lam + 1, (h - 2) * lam - 1 + h],
            [(h - 2) * lam - 1 + h, 2 * lam + 1 - 2 * rho],
        ]
    )


def combination_quadratic_form(h, delta, lam, b, g0, g1, D):
    """Weighted sum of the right-hand sides of the three combined inequalities.

    Evaluated directly from the inequalities, for cross-checking the matrix
    form; ``g0, g1, D`` are vectors of a common dimension (or scalars).
    """
    g0, g1, D = (np.atleast_1d(np.asarray(v, float)) for v in (g0, g1, D))
    d0 = g0 + delta * D
    half = 0.5 * np.dot(g0 - g1, g0 - g1)
    q01 = h * np.dot(g1, d0) + half  # f0 - f1 >= q01
    q10 = -h * np.dot(g0, d0) + half  # f1 - f0 >= q10
    qin = np.dot(D, D) - np.dot(g0, g0)  # 0 >= qin
    return (lam + 1) * q01 + lam * q10 + b * qin


def _rank1_residual(A2):
    s = np.linalg.svd(A2, compute_uv=False)
    return float(s[1] / s[0]) if s[0] > 0 else 0.0


def verify_certificate(h, delta, cert=None, psd_tol=PSD_TOL, rate_tol=1e-8, identity_tol=IDENTITY_TOL):
    """Rebuild the certificate at ``(h, delta)`` and check every condition.

    Checks: ``A1`` is PSD (minimum eigenvalue ``>= -psd_tol``), ``A1 + A2 = A``,
    ``A2`` is rank one, ``1/rho`` matches the closed-form rate, the multipliers
    are nonnegative, and in the intermediate regime the saturation
    ``A1[0,0] = A1[0,1] = 0``. A custom ``cert`` may be supplied to test
    falsifiability.
    """
    if cert is None:
        cert = certificate_params(h, delta)
    failures = []
    if cert.lam < 0:
        failures.append("negative_lambda")
    if cert.b < 0:
        failures.append("negative_b")
    m = build_proof_matrices(h, delta, cert)
    min_eig = min_eigenvalue(m.A1)
    if min_eig < -psd_tol:
        failures.append("A1_not_psd")
    split = float(np.max(np.abs(m.A1 + m.A2 - m.A)))
    if split > identity_tol * max(1.0, float(np.max(np.abs(m.A)))):
        failures.append("split_mismatch")
    if np.any(m.A1[2] != 0) or np.any(m.A1[:, 2] != 0):
        failures.append("A1_third_row_nonzero")
    r1 = _rank1_residual(m.A2)
    if r1 > 1e-12:
        failures.append("A2_not_rank_one")
    implied = 1.0 / cert.rho if cert.rho > 0 else math.inf
    rate = rates.rate_one_step_to_f1(h, delta)
    gap = abs(implied - rate)
    if not gap <= rate_tol:
        failures.append("rate_mismatch")
    saturation = {}
    if cert.regime is Regime.INTERMEDIATE:
        saturation = {"A1_00": float(m.A1[0, 0]), "A1_01": float(m.A1[0, 1])}
        scale = max(1.0, float(np.max(np.abs(m.A))))
        if abs(m.A1[0, 0]) > psd_tol * scale or abs(m.A1[0, 1]) > psd_tol * scale:
            failures.append("intermediate_not_saturated")
    return CertReport(h, delta, cert, min_eig, r1, split, implied, rate, gap, saturation, failures)


def exact_certificate(h):
    """Multiplier and rate of the exact-gradient proof for ``h`` in ``(0, 2)``."""
    if not 0 < h < 2:
        raise CertificateError(f"h must lie in (0, 2), got {h}")
    lam = 1.0 if h <= 1.5 else (2.0 - h) / (h - 1.0)
    rho = h if h == 1.0 else min(h, 0.5 * ((1.0 - h) ** -2 - 1.0))
    regime = Regime.LEFT if h < 1.5 else (Regime.INTERMEDIATE if h == 1.5 else Regime.RIGHT)
    return Certificate(regime, lam, 0.0, rho)


def verify_certificate_exact(h, psd_tol=PSD_TOL, rate_tol=1e-8):
    """Check the 2x2 certificate of the exact-gradient one-step rate."""
    cert = exact_certificate(h)
    M = exact_matrix(h, cert.lam, cert.rho)
    min_eig = min_eigenvalue(M)
    failures = []
    if min_eig < -psd_tol:
        failures.append("A_not_psd")
    implied = 1.0 / cert.rho
    rate = rates.rate_exact_one_step_to_f1(h)
    gap = abs(implied - rate)
    if not gap <= rate_tol:
        failures.append("rate_mismatch")
    return CertReport(h, 0.0, cert, min_eig, 0.0, 0.0, implied, rate, gap, {}, failures)


@dataclass(frozen=True)
class PepPoint:
    """A point, its gradient and its function value."""

    x: np.ndarray
    g: np.ndarray
    f: float

    def __post_init__(self):
        object.__setattr__(self, "x", np.atleast_1d(np.asarray(self.x, dtype=float)))
        object.__setattr__(self, "g", np.atleast_1d(np.asarray(self.g, dtype=float)))
        if self.x.shape != self.g.shape:
            raise ValueError("x and g must have the same shape")
        object.__setattr__(self, "f", float(self.f))


@dataclass
class InterpolationReport:
    min_slack: float
    worst_pair: tuple
    slacks: dict
    feasible: bool


def interpolation_slack(pi, pj, L=1.0):
    """``f_i - f_j - <g_j, x_i - x_j> - ||g_i - g_j||^2 / (2L)``."""
    dg = pi.g - pj.g
    return pi.f - pj.f - float(np.dot(pj.g, pi.x - pj.x)) - float(np.dot(dg, dg)) / (2.0 * L)


def interpolation_check(points, L=1.0, tol=1e-9, labels=None):
    """Smooth convex interpolation slacks over all ordered pairs of points.

    ``points`` is a sequence (or a dict keyed by label) of :class:`PepPoint`.
    The data extend to an ``L``-smooth convex function iff every slack is
    nonnegative; ``feasible`` allows a violation down to ``-tol``.
    """
    if isinstance(points, dict):
        labels, points = list(points.keys()), list(points.values())
    labels = list(labels) if labels is not None else list(range(len(points)))
    if not L > 0:
        raise ValueError("L must be positive")
    dims = {p.x.shape for p in points}
    if len(dims) > 1:
        raise ValueError(f"dimension mismatch among points: {sorted(dims)}")
    slacks = {}
    for i, pi in enumerate(points):
        for j, pj in enumerate(points):
            if i != j:
                slacks[(labels[i], labels[j])] = interpolation_slack(pi, pj, L)
    if not slacks:
        return InterpolationReport(math.inf, None, slacks, True)
    worst = min(slacks, key=slacks.get)
    return InterpolationReport(slacks[worst], worst, slacks, slacks[worst] >= -tol)
