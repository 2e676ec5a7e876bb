"""Outcome-stream generators for exercising forecasters and metrics.

All adversaries emit domain members and replay deterministically from their
seed.  Oblivious adversaries ignore the forecast argument; adaptive ones
require it and read the full forecast distribution, never a sample.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError, ProtocolError
from .geometry import Domain, Norm, Simplex, norm_value


class Adversary:
    adaptive = False

    def __init__(self, domain: Domain):
        self.domain = domain

    def outcome(self, t: int, forecast=None) -> np.ndarray:
        raise NotImplementedError

    def _check(self, forecast):
        if self.adaptive and forecast is None:
            raise ProtocolError(f"{type(self).__name__} is adaptive and needs the forecast")


class Constant(Adversary):
    """Same outcome every round; defaults to the domain's first vertex."""

    def __init__(self, domain, y_star=None):
        super().__init__(domain)
        if y_star is None:
            y_star = domain.vertices()[0]
        self.y_star = domain.require_member(y_star, what="constant outcome")

    def outcome(self, t, forecast=None):
        return self.y_star.copy()


class VertexCycle(Adversary):
    """Cycles through the first ``period`` canonical vertices."""

    def __init__(self, domain, period: int | None = None):
        super().__init__(domain)
        self.vertices = domain.vertices()
        n = self.vertices.shape[0]
        if period is None or period <= 0:
            period = n
        if period > n:
            raise ConfigError(f"period {period} exceeds {n} vertices")
        self.period = period

    def outcome(self, t, forecast=None):
        return self.vertices[(t - 1) % self.period].copy()


class IidVertices(Adversary):
    """Independent vertex draws, optionally non-uniform."""

    def __init__(self, domain, rng: np.random.Generator, weights=None):
        super().__init__(domain)
        self.vertices = domain.vertices()
        self.rng = rng
        if weights is not None:
            weights = np.asarray(weights, dtype=float)
            if weights.shape != (self.vertices.shape[0],) or np.any(weights < 0):
                raise ConfigError("weights must be nonnegative, one per vertex")
            weights = weights / weights.sum()
        self.weights = weights

    def outcome(self, t, forecast=None):
        i = self.rng.choice(self.vertices.shape[0], p=self.weights)
        return self.vertices[i].copy()


class IidDirichlet(Adversary):
    """Independent symmetric-Dirichlet draws; simplex domains only."""

    def __init__(self, domain, rng: np.random.Generator, alpha: float = 1.0):
        if not isinstance(domain, Simplex):
            raise ConfigError("dirichlet outcomes need a simplex domain")
        if alpha <= 0:
            raise ConfigError("dirichlet alpha must be positive")
        super().__init__(domain)
        self.rng = rng
        self.alpha = alpha

    def outcome(self, t, forecast=None):
        return self.rng.dirichlet(np.full(self.domain.d, self.alpha))


class DriftingMean(Adversary):
    """Linear interpolation from start to end across the horizon."""

    def __init__(self, domain, T: int, start=None, end=None):
        super().__init__(domain)
        if T < 1:
            raise ConfigError("drifting mean needs T >= 1")
        verts = domain.vertices()
        self.start = domain.require_member(
            verts[0] if start is None else start, what="drift start"
        )
        self.end = domain.require_member(
            verts[-1] if end is None else end, what="drift end"
        )
        self.T = T

    def outcome(self, t, forecast=None):
        frac = 0.0 if self.T == 1 else (t - 1) / (self.T - 1)
        return (1.0 - frac) * self.start + frac * self.end


class FarthestVertex(Adversary):
    """Adaptive: plays the vertex farthest (in l1) from the forecast mean."""

    adaptive = True

    def __init__(self, domain):
        super().__init__(domain)
        self.vertices = domain.vertices()

    def outcome(self, t, forecast=None):
        self._check(forecast)
        center = forecast.mean_point()
        distances = [norm_value(v - center, Norm.L1) for v in self.vertices]
        return self.vertices[int(np.argmax(distances))].copy()  # ties: lowest index


def materialize(adversary: Adversary, T: int) -> np.ndarray:
    """Precompute an oblivious adversary's full stream as a (T, d) array."""
    if adversary.adaptive:
        raise ProtocolError("cannot materialize an adaptive adversary")
    return np.stack([adversary.outcome(t) for t in range(1, T + 1)])


#: registry used by the experiment harness; adaptive flags are on the classes
ADVERSARIES = {
    "constant": Constant,
    "vertex-cycle": VertexCycle,
    "iid-vertices": IidVertices,
    "iid-dirichlet": IidDirichlet,
    "drifting-mean": DriftingMean,
    "farthest-vertex": FarthestVertex,
}


def make_adversary(
    name: str,
    domain: Domain,
    T: int,
    rng: np.random.Generator,
    **params,
) -> Adversary:
    """Build a registered adversary, passing only the arguments it takes."""
    if name not in ADVERSARIES:
        raise ConfigError(f"unknown adversary {name!r}; options: {sorted(ADVERSARIES)}")
    cls = ADVERSARIES[name]
    if cls is Constant:
        return Constant(domain, y_star=params.get("y_star"))
    if cls is VertexCycle:
        return VertexCycle(domain, period=params.get("period"))
    if cls is IidVertices:
        return IidVertices(domain, rng, weights=params.get("weights"))
    if cls is IidDirichlet:
        return IidDirichlet(domain, rng, alpha=params.get("alpha", 1.0))
    if cls is DriftingMean:
        return DriftingMean(domain, T, start=params.get("start"), end=params.get("end"))
    return FarthestVertex(domain)
