"""Relatively inexact gradient descent with a constant normalized stepsize."""

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from . import rates
from .instances import ORACLE_ATOL, ORACLE_RTOL, make_huber, make_quadratic, oracle_random, oracle_scaled


class InexactnessViolation(RuntimeError):
    """Raised when an oracle direction breaks the relative error bound."""

    def __init__(self, k, err, bound):
        super().__init__(f"iteration {k}: ||d - g|| = {err!r} > delta ||g|| = {bound!r}")
        self.k = k


@dataclass
class Trace:
    """Iterates ``x[k]``, true gradients ``g[k]``, values ``f[k]`` for k = 0..N
    and directions ``d[k]`` for k = 0..N-1."""

    x: np.ndarray
    g: np.ndarray
    d: np.ndarray
    f: np.ndarray
    h: float
    delta: float
    L: float
    N: int
    f_star: float = 0.0

    def to_csv(self, comment=None):
        """CSV text with columns k, x, g_norm, d_norm, f, err_ratio."""
        buf = io.StringIO()
        if comment:
            for line in str(comment).splitlines():
                buf.write(f"# {line}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "x", "g_norm", "d_norm", "f", "err_ratio"])
        for k in range(self.N + 1):
            gn = float(np.linalg.norm(self.g[k]))
            if k < self.N:
                dn = repr(float(np.linalg.norm(self.d[k])))
                er = float(np.linalg.norm(self.d[k] - self.g[k]))
                er = repr(er / gn) if gn > 0 else ""
            else:
                dn = er = ""
            w.writerow([k, ";".join(repr(float(v)) for v in self.x[k]), repr(gn), dn, repr(float(self.f[k])), er])
        return buf.getvalue()


def run(instance, oracle, h, delta, N, x0=None):
    """Run ``N`` steps ``x_{k+1} = x_k - (h/L) d_k`` and record everything.

    Each direction is validated against ``||d_k - g_k|| <= delta ||g_k||``;
    a violation raises :class:`InexactnessViolation` naming the iteration.
    Stepsizes beyond ``2/(1+delta)`` are allowed (divergence studies).
    """
    if not h >= 0:
        raise ValueError("h must be nonnegative")
    rates.check_n(N)
    L = instance.L
    x = np.array(instance.x_start if x0 is None else x0, dtype=float).reshape(instance.dimension)
    call = oracle.session()
    xs = np.empty((N + 1, x.size))
    gs = np.empty_like(xs)
    ds = np.empty((N, x.size))
    fs = np.empty(N + 1)
    step = h / L
    for k in range(N + 1):
        g = instance.grad(x)
        xs[k], gs[k], fs[k] = x, g, instance.value(x)
        if k == N:
            break
        d = np.asarray(call(x, g), dtype=float)
        err = float(np.linalg.norm(d - g))
        gn = float(np.linalg.norm(g))
        bound = delta * gn
        if err > bound * (1.0 + ORACLE_RTOL) + ORACLE_ATOL * gn:
            raise InexactnessViolation(k, err, bound)
        ds[k] = d
        x = x - step * d
    return Trace(xs, gs, ds, fs, float(h), float(delta), float(L), int(N), instance.f_star)


def metrics(trace):
    """Performance ratios bounded by the worst-case rates.

    ``ratio_last = ||g_N||^2 / (L (f0 - f*))``, ``ratio_min`` uses the smallest
    ``||g_k||^2`` over k = 1..N, and ``ratio_to_f1 = ||g_1||^2 / (L (f0 - f1))``.
    If the start is already optimal every ratio is 0 and ``degenerate`` is set.
    """
    sq = np.sum(trace.g**2, axis=1) / trace.L
    gap = trace.f[0] - trace.f_star
    if gap <= 0:
        return {"ratio_last": 0.0, "ratio_min": 0.0, "ratio_to_f1": 0.0, "degenerate": True}
    dec = trace.f[0] - trace.f[1]
    return {
        "ratio_last": float(sq[-1] / gap),
        "ratio_min": float(np.min(sq[1:]) / gap),
        "ratio_to_f1": float(sq[1] / dec) if dec > 0 else (0.0 if sq[1] == 0 else math.inf),
        "degenerate": False,
    }


def divergence_probe(delta, h, N=50, L=1.0):
    """Quadratic instance with the ``(1 + delta)``-scaled oracle beyond ``h_max``.

    The gradient norm is multiplied by ``|1 - h (1 + delta)|`` at every step,
    which exceeds 1 exactly when ``h > 2 / (1 + delta)``.
    """
    rates.check_delta(delta)
    inst = make_quadratic(L)
    tr = run(inst, oracle_scaled(1.0 + delta, delta), h, delta, N)
    norms = np.linalg.norm(tr.g, axis=1)
    factors = norms[1:] / norms[:-1]
    expected = abs(1.0 - h * (1.0 + delta))
    return {
        "expected_factor": expected,
        "factors": factors,
        "max_factor_error": float(np.max(np.abs(factors - expected))),
        "strictly_increasing": bool(np.all(np.diff(norms) > 0)),
        "diverges": expected > 1.0,
        "grad_norms": norms,
    }


def fuzz_upper_bound(n_configs=20, runs_per_config=250, seed=0, max_N=20, slack=1e-9):
    """Random admissible oracles against the ``N``-step upper bound.

    For each random ``(h, delta, N)``, runs the Huber and quadratic instances
    (each in 1D and 2D, with randomly perturbed start points) under random
    oracles and records any ``ratio_min > rate_N_steps + slack``.
    """
    rng = np.random.default_rng(seed)
    violations = []
    n_runs = 0
    worst = -math.inf
    for _ in range(n_configs):
        delta = float(rng.uniform(0.0, 0.95))
        h = float(rng.uniform(0.01, 0.999) * rates.h_max(delta))
        N = int(rng.integers(1, max_N + 1))
        bound = rates.rate_N_steps(h, delta, N)
        for r in range(runs_per_config):
            dim = 1 + (r % 2)
            inst = make_huber(delta, h, N, dimension=dim) if (r // 2) % 2 == 0 else make_quadratic(dimension=dim)
            x0 = inst.x_start * rng.uniform(0.2, 3.0)
            if dim == 2:
                x0 = x0 + rng.normal(scale=0.3, size=2)
            oracle = oracle_random(delta, seed=int(rng.integers(2**32)))
            m = metrics(run(inst, oracle, h, delta, N, x0=x0))
            n_runs += 1
            worst = max(worst, m["ratio_min"] / bound)
            if m["ratio_min"] > bound + slack:
                violations.append({"h": h, "delta": delta, "N": N, "kind": inst.kind, "ratio_min": m["ratio_min"], "bound": bound})
    return {"runs": n_runs, "violations": violations, "worst_ratio_to_bound": worst}
