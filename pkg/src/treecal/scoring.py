"""Convex regularizers, Bregman divergences, and proper-scoring identities.

A regularizer bundles a convex value function R with its gradient and a
nominal divergence-range scale rho.  The induced divergence

    D(y | p) = R(y) - R(p) - <grad R(p), y - p>

is a proper scoring rule: averaged over outcomes y it is minimized at the
outcome mean, with a Jensen-gap offset that is independent of p.  That
identity (``mixture_minimizer``) is what makes the tree forecaster
regularizer-free, so the evaluators here are only exercised by metrics,
bound checks, and probes.

Evaluators are vectorized over leading axes: value maps (..., d) -> (...),
grad maps (..., d) -> (..., d).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .errors import ConfigError, DomainError, UnsupportedCombination
from .geometry import Box, Domain, L1Ball, L2Ball, Norm, Simplex, as_vector, norm_value

#: coordinates below this are clamped inside log terms of the entropy gradient
DEFAULT_ENTROPY_CLAMP = 1e-12


@dataclass(frozen=True)
class Regularizer:
    """Convex R with evaluators and a nominal range scale.

    ``rho`` is informational (bound checks use realized loss maxima); it is
    None when the regularizer was built without a domain to measure against.
    """

    name: str
    value: Callable[[np.ndarray], np.ndarray]
    grad: Callable[[np.ndarray], np.ndarray]
    rho: float | None = None
    domain: Domain | None = field(default=None, compare=False)


def euclidean(domain: Domain | None = None) -> Regularizer:
    """R(p) = ||p||_2^2, whose divergence is the squared euclidean distance."""

    def value(p):
        p = np.asarray(p, dtype=float)
        return np.sum(p * p, axis=-1)

    def grad(p):
        return 2.0 * np.asarray(p, dtype=float)

    rho = _euclidean_range(domain) if domain is not None else None
    return Regularizer("euclidean", value, grad, rho=rho, domain=domain)


def _euclidean_range(domain: Domain) -> float:
    if isinstance(domain, Simplex):
        return 1.0 - 1.0 / domain.d
    if isinstance(domain, (L2Ball, L1Ball)):
        return domain.radius**2
    if isinstance(domain, Box):
        top = max(domain.lo**2, domain.hi**2)
        bottom = 0.0 if domain.lo <= 0.0 <= domain.hi else min(domain.lo**2, domain.hi**2)
        return domain.d * (top - bottom)
    raise UnsupportedCombination(f"no euclidean range for {domain.describe()}")


def negative_entropy(domain: Simplex, clamp: float = DEFAULT_ENTROPY_CLAMP) -> Regularizer:
    """R(p) = sum_i p_i log p_i on the simplex, with 0 log 0 = 0.

    The gradient clamps coordinates to at least ``clamp`` inside the log so
    that divergences stay finite at the boundary; value terms use the exact
    0 log 0 = 0 convention.
    """
    if not isinstance(domain, Simplex):
        raise ConfigError("negative entropy is defined on the simplex only")
    if not 0.0 < clamp < 1.0:
        raise ConfigError("entropy clamp must lie in (0, 1)")

    def value(p):
        p = np.asarray(p, dtype=float)
        w = np.clip(p, 0.0, None)
        out = np.zeros_like(w)
        pos = w > 0.0
        out[pos] = w[pos] * np.log(w[pos])
        return np.sum(out, axis=-1)

    def grad(p):
        p = np.asarray(p, dtype=float)
        return 1.0 + np.log(np.clip(p, clamp, None))

    return Regularizer(
        "negentropy", value, grad, rho=math.log(domain.d), domain=domain
    )


def bregman(reg: Regularizer, y, p) -> float:
    """D(y | p) = R(y) - R(p) - <grad R(p), y - p>; zero when y == p."""
    y = as_vector(y)
    p = as_vector(p)
    return float(reg.value(y) - reg.value(p) - np.dot(reg.grad(p), y - p))


def bregman_batch(reg: Regularizer, ys: np.ndarray, qs: np.ndarray) -> np.ndarray:
    """Divergence matrix D[t, j] = D(ys[t] | qs[j]) for stacked points."""
    ys = np.asarray(ys, dtype=float)
    qs = np.asarray(qs, dtype=float)
    ry = reg.value(ys)  # (T,)
    rq = reg.value(qs)  # (m,)
    gq = reg.grad(qs)  # (m, d)
    cross = ys @ gq.T  # (T, m)
    own = np.sum(gq * qs, axis=-1)  # (m,)
    return ry[:, None] - rq[None, :] - cross + own[None, :]


def mixture_minimizer(points, weights, reg: Regularizer) -> tuple[np.ndarray, float]:
    """Mean and Jensen gap of a finite mixture of outcome points.

    For every probe p the weighted average divergence decomposes exactly as

        sum_i w_i D(y_i | p) = D(mean | p) + gap,

    so the expected loss is minimized at the mean with value ``gap``.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise DomainError("mixture needs a non-empty (n, d) stack of points")
    w = np.asarray(weights, dtype=float)
    if w.shape != (pts.shape[0],):
        raise DomainError("weights must match the number of points")
    if np.any(w < -1e-15) or abs(w.sum() - 1.0) > 1e-9:
        raise DomainError("weights must be nonnegative and sum to one")
    mean = w @ pts
    gap = float(math.fsum(wi * vi for wi, vi in zip(w, reg.value(pts))) - reg.value(mean))
    return mean, gap


def center_regularizer(reg: Regularizer, base_point=None) -> Regularizer:
    """Subtract the tangent at the domain's canonical point.

    The shifted R'(p) = R(p) - <grad R(p0), p - p0> - R(p0) vanishes at p0 and
    induces the same divergence pointwise (Bregman invariance under affine
    shifts).
    """
    if base_point is None:
        if reg.domain is None:
            raise ConfigError("centering needs a base point or a domain-bound regularizer")
        base_point = reg.domain.base_point()
    p0 = as_vector(base_point)
    g0 = np.asarray(reg.grad(p0), dtype=float)
    v0 = float(reg.value(p0))

    def value(p):
        p = np.asarray(p, dtype=float)
        return reg.value(p) - (p @ g0) + (p0 @ g0) - v0

    def grad(p):
        return np.asarray(reg.grad(p), dtype=float) - g0

    return Regularizer(f"centered({reg.name})", value, grad, rho=reg.rho, domain=reg.domain)


def scale_regularizer(reg: Regularizer) -> Regularizer:
    """R'(p) = 4 R(p/2): trades a bounded range for a bounded divergence.

    Requires a centrally symmetric domain so p/2 stays inside; strong
    convexity is preserved and the divergence range is at most 3x the range
    of R.
    """
    if reg.domain is None or not reg.domain.centrally_symmetric:
        raise UnsupportedCombination("scaling requires a centrally symmetric domain")

    def value(p):
        return 4.0 * reg.value(np.asarray(p, dtype=float) / 2.0)

    def grad(p):
        return 2.0 * np.asarray(reg.grad(np.asarray(p, dtype=float) / 2.0), dtype=float)

    rho = 3.0 * reg.rho if reg.rho is not None else None
    return Regularizer(f"scaled({reg.name})", value, grad, rho=rho, domain=reg.domain)


def strong_convexity_probe(
    reg: Regularizer,
    kind: Norm,
    domain: Domain,
    n_samples: int = 1000,
    seed: int = 0,
) -> tuple[float, float]:
    """Measure min D(y|p)/||y-p||^2 and max D(y|p) over sampled member pairs.

    Reports observed constants rather than asserting any nominal strong
    convexity; pairs closer than 1e-6 in the probe norm are skipped in the
    ratio.  Deterministic given the seed.
    """
    if n_samples < 1:
        raise ConfigError("probe needs n_samples >= 1")
    rng = np.random.default_rng(seed)
    min_ratio = math.inf
    max_div = -math.inf
    for _ in range(n_samples):
        y = domain.sample(rng)
        p = domain.sample(rng)
        div = bregman(reg, y, p)
        max_div = max(max_div, div)
        dist = norm_value(y - p, kind)
        if dist > 1e-6:
            min_ratio = min(min_ratio, div / dist**2)
    return min_ratio, max_div


def with_rho(reg: Regularizer, rho: float) -> Regularizer:
    """Copy with an explicitly supplied nominal range."""
    return replace(reg, rho=rho)
