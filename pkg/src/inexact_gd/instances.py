"""Worst-case test functions and adversarial inexact-gradient oracles.

Instances are radial in two dimensions (``f(x) = phi(||x||)``), so the 1D
constructions embed along the first axis without changing any value.
"""

import math
from dataclasses import dataclass

import numpy as np

ORACLE_RTOL = 1e-12
# forming d - g costs a few ulps of ||g||, which matters only for tiny delta
ORACLE_ATOL = 4 * np.finfo(float).eps


class OracleError(ValueError):
    """An oracle output violates ``||d - g|| <= delta ||g||``."""


@dataclass(frozen=True)
class Instance:
    """Smooth convex function with minimizer at the origin and ``f* = 0``.

    ``kind`` is ``"huber"`` (curvature ``L`` for ``||x|| < threshold``, linear
    with the given ``slope`` beyond) or ``"quadratic"`` (``L ||x||^2 / 2``).
    """

    kind: str
    L: float
    x_start: np.ndarray
    slope: float = math.nan
    threshold: float = math.nan

    f_star = 0.0

    def __post_init__(self):
        if self.kind not in ("huber", "quadratic"):
            raise ValueError(f"unknown instance kind {self.kind!r}")
        if not self.L > 0:
            raise ValueError("L must be positive")
        x = np.atleast_1d(np.asarray(self.x_start, dtype=float))
        if x.shape not in ((1,), (2,)):
            raise ValueError("instances are univariate or bivariate")
        object.__setattr__(self, "x_start", x)

    @property
    def dimension(self):
        return self.x_start.shape[0]

    @property
    def minimizer(self):
        return np.zeros(self.dimension)

    def value(self, x):
        r = float(np.linalg.norm(x))
        if self.kind == "huber" and r > self.threshold:
            return self.slope * r - self.slope * self.slope / (2.0 * self.L)
        return 0.5 * self.L * r * r

    def grad(self, x):
        x = np.asarray(x, dtype=float)
        r = float(np.linalg.norm(x))
        if self.kind == "huber" and r > self.threshold:
            return (self.slope / r) * x
        return self.L * x

    def embed(self, dimension):
        """Same instance with the start point placed on the first axis of R^dimension."""
        x = np.zeros(dimension)
        x[0] = float(np.linalg.norm(self.x_start))
        return Instance(self.kind, self.L, x, self.slope, self.threshold)

    def descriptor(self):
        d = {
            "kind": self.kind,
            "L": self.L,
            "x_start": [float(v) for v in self.x_start],
            "dimension": self.dimension,
        }
        if self.kind == "huber":
            d.update(slope=self.slope, threshold=self.threshold)
        return d


def make_huber(delta, h, N=1, L=1.0, dimension=1):
    """Huber instance on which ``N`` steps with ``d = (1 - delta) g`` are worst case.

    The linear branch has slope ``sqrt(L) / sqrt(N h (1 - delta) + 1/2)``; the
    start point is placed so that the ``N``-th iterate lands on the kink and
    ``f(x_start) - f* = 1``.
    """
    if not 0 <= delta < 1:
        raise ValueError("delta must lie in [0, 1)")
    if not h > 0 or h >= 2.0 / (1.0 + delta):
        raise ValueError("h must lie in (0, 2/(1+delta))")
    if int(N) != N or N < 1:
        raise ValueError("N must be a positive integer")
    m = N * h * (1.0 - delta) + 0.5
    s = 1.0 / math.sqrt(m)  # unit-curvature slope
    x0 = np.zeros(dimension)
    x0[0] = (N * h * (1.0 - delta) + 1.0) * s / math.sqrt(L)
    slope = s * math.sqrt(L)
    return Instance("huber", L, x0, slope=slope, threshold=slope / L)


def make_quadratic(L=1.0, dimension=1):
    """``f(x) = L ||x||^2 / 2`` started at distance ``sqrt(2 / L)``, so ``f(x_start) = 1``."""
    x0 = np.zeros(dimension)
    x0[0] = math.sqrt(2.0 / L)
    return Instance("quadratic", L, x0)


def rotate90(g, orientation=1):
    """``g`` rotated by +90 degrees (``orientation=1``) or -90 degrees."""
    g = np.asarray(g, dtype=float)
    if g.shape != (2,):
        raise ValueError("rotation needs a 2-vector: there is no orthogonal direction in one dimension")
    return orientation * np.array([-g[1], g[0]])


class Oracle:
    """Inexact-gradient oracle ``(x, grad f(x)) -> d``.

    Every output is checked against ``||d - g|| <= delta ||g||``. Oracles are
    immutable; :meth:`session` returns the callable used for one run (for the
    random oracle, a fresh generator seeded from ``seed``).
    """

    kind = "abstract"

    def __init__(self, delta):
        if not 0 <= delta < 1:
            raise ValueError("delta must lie in [0, 1)")
        self.delta = float(delta)

    def direction(self, x, g, rng=None):
        raise NotImplementedError

    def check(self, g, d):
        err = float(np.linalg.norm(d - g))
        bound = self.delta * float(np.linalg.norm(g))
        if err > bound * (1.0 + ORACLE_RTOL) + ORACLE_ATOL * float(np.linalg.norm(g)):
            raise OracleError(f"{self.kind} oracle error {err!r} exceeds delta * ||g|| = {bound!r}")

    def __call__(self, x, g):
        d = self.direction(x, np.asarray(g, dtype=float))
        self.check(g, d)
        return d

    def session(self):
        return self

    def descriptor(self):
        return {"kind": self.kind, "delta": self.delta}


class ScaledOracle(Oracle):
    """``d = factor * g`` with ``|factor - 1| <= delta``.

    One step with this oracle equals an exact gradient step with stepsize
    ``h * factor``.
    """

    kind = "scaled"

    def __init__(self, factor, delta):
        super().__init__(delta)
        if abs(factor - 1.0) > delta * (1.0 + ORACLE_RTOL) + ORACLE_ATOL:
            raise OracleError(f"|factor - 1| = {abs(factor - 1.0)} exceeds delta = {delta}")
        self.factor = float(factor)

    def direction(self, x, g, rng=None):
        return self.factor * g

    def descriptor(self):
        return {**super().descriptor(), "factor": self.factor}


class OrthogonalOracle(Oracle):
    """Bivariate oracle ``d = (1 - delta^2) g + delta sqrt(1 - delta^2) g_perp``.

    ``g_perp`` is ``g`` rotated by +-90 degrees. The error ``d - g`` has norm
    exactly ``delta ||g||`` and is orthogonal to ``d`` (``d`` is tangent to
    the ball of admissible directions), so ``||d|| = sqrt(1 - delta^2) ||g||``.
    """

    kind = "orthogonal"

    def __init__(self, delta, orientation=1):
        super().__init__(delta)
        if orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")
        self.orientation = orientation

    def direction(self, x, g, rng=None):
        d2 = self.delta * self.delta
        return (1.0 - d2) * g + self.delta * math.sqrt(1.0 - d2) * rotate90(g, self.orientation)

    def descriptor(self):
        return {**super().descriptor(), "orientation": self.orientation}


class RandomOracle(Oracle):
    """Error direction uniform on the sphere, radius uniform in ``[0, delta ||g||]``."""

    kind = "random"

    def __init__(self, delta, seed=0):
        super().__init__(delta)
        self.seed = seed

    def session(self):
        rng = np.random.default_rng(self.seed)

        def call(x, g):
            g = np.asarray(g, dtype=float)
            u = rng.standard_normal(g.shape)
            nu = float(np.linalg.norm(u))
            u = u / nu if nu > 0 else np.eye(g.shape[0])[0]
            radius = rng.uniform(0.0, 1.0) * self.delta * float(np.linalg.norm(g))
            d = g + radius * u
            self.check(g, d)
            return d

        return call

    def direction(self, x, g, rng=None):
        return self.session()(x, g)

    def descriptor(self):
        return {**super().descriptor(), "seed": self.seed}


def oracle_exact():
    return ScaledOracle(1.0, 0.0)


def oracle_scaled(factor, delta):
    return ScaledOracle(factor, delta)


def oracle_orthogonal(delta, orientation=1):
    return OrthogonalOracle(delta, orientation)


def oracle_random(delta, seed=0):
    return RandomOracle(delta, seed)
