"""Convex prediction domains, norms, and base-H tree interval arithmetic.

Everything downstream (forecasters, metrics, adversaries) works with plain
float64 numpy vectors living in one of four domain types: the probability
simplex, the l1/l2 balls, and axis-aligned boxes.  Rounds of a horizon
T <= H**L are indexed by the base-H digits of t-1, which arrange the
timeline into an H-ary tree of nested intervals.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import product

import numpy as np

from .errors import BoundsError, ConfigError, DomainError, UnsupportedCombination

# Membership tolerances: sums/radii may drift by accumulated averaging error,
# genuinely negative coordinates may not.
SUM_TOL = 1e-9
COORD_TOL = 1e-12


class Norm(Enum):
    L1 = "l1"
    L2 = "l2"
    LINF = "linf"

    @property
    def dual(self) -> "Norm":
        return _DUAL[self]


_DUAL = {Norm.L1: Norm.LINF, Norm.L2: Norm.L2, Norm.LINF: Norm.L1}


def dual_norm(kind: Norm) -> Norm:
    """Dual pairing: l1 <-> linf, l2 self-dual."""
    return kind.dual


def as_vector(v, d: int | None = None) -> np.ndarray:
    """Coerce to a finite 1-d float64 array, optionally checking its length."""
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1:
        raise DomainError(f"expected a 1-d vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError("vector has non-finite entries")
    if d is not None and arr.shape[0] != d:
        raise DomainError(f"expected dimension {d}, got {arr.shape[0]}")
    return arr


def norm_value(v, kind: Norm) -> float:
    v = as_vector(v)
    if kind is Norm.L1:
        return float(np.sum(np.abs(v)))
    if kind is Norm.L2:
        return float(np.sqrt(np.dot(v, v)))
    if kind is Norm.LINF:
        return float(np.max(np.abs(v)))
    raise UnsupportedCombination(f"unknown norm {kind!r}")


# ---------------------------------------------------------------------------
# Domains
# ---------------------------------------------------------------------------


class Domain:
    """Bounded convex subset of R^d.

    Subclasses provide membership tests, a deterministic canonical point
    (used wherever an algorithm is free to pick an arbitrary action), exact
    diameters per norm, extreme points for adversaries, and seeded sampling
    for probes.
    """

    d: int

    def contains(self, p) -> bool:
        raise NotImplementedError

    def base_point(self) -> np.ndarray:
        raise NotImplementedError

    def diameter(self, kind: Norm) -> float:
        raise NotImplementedError

    def vertices(self) -> np.ndarray:
        """Canonical extreme points, in a fixed deterministic order."""
        raise NotImplementedError

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    @property
    def centrally_symmetric(self) -> bool:
        return False

    def grid(self, step: float) -> np.ndarray:
        """Regular grid of member points; only supported for small d."""
        raise UnsupportedCombination(f"no grid for {self.describe()}")

    def describe(self) -> str:
        raise NotImplementedError

    def require_member(self, p, what: str = "point") -> np.ndarray:
        arr = as_vector(p, self.d)
        if not self.contains(arr):
            raise DomainError(f"{what} {arr!r} is not in {self.describe()}")
        return arr


@dataclass(frozen=True)
class Simplex(Domain):
    """Probability simplex: nonnegative coordinates summing to one."""

    d: int

    def __post_init__(self):
        if self.d < 1:
            raise ConfigError("simplex dimension must be >= 1")

    def contains(self, p) -> bool:
        arr = np.asarray(p, dtype=float)
        if arr.shape != (self.d,) or not np.all(np.isfinite(arr)):
            return False
        return bool(np.all(arr >= -COORD_TOL) and abs(arr.sum() - 1.0) <= SUM_TOL)

    def base_point(self) -> np.ndarray:
        return np.full(self.d, 1.0 / self.d)

    def diameter(self, kind: Norm) -> float:
        if self.d == 1:
            return 0.0
        if kind is Norm.L1:
            return 2.0
        if kind is Norm.L2:
            return float(np.sqrt(2.0))
        if kind is Norm.LINF:
            return 1.0
        raise UnsupportedCombination(f"simplex diameter for {kind!r}")

    def vertices(self) -> np.ndarray:
        return np.eye(self.d)

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        return rng.dirichlet(np.ones(self.d))

    def grid(self, step: float) -> np.ndarray:
        n = round(1.0 / step)
        if self.d > 3:
            raise UnsupportedCombination("simplex grid limited to d <= 3")
        if self.d == 1:
            return np.ones((1, 1))
        pts = []
        if self.d == 2:
            for i in range(n + 1):
                pts.append((i / n, (n - i) / n))
        else:
            for i in range(n + 1):
                for j in range(n + 1 - i):
                    pts.append((i / n, j / n, (n - i - j) / n))
        return np.asarray(pts, dtype=float)

    def describe(self) -> str:
        return f"simplex({self.d})"


@dataclass(frozen=True)
class L2Ball(Domain):
    d: int
    radius: float = 1.0

    def __post_init__(self):
        if self.d < 1 or self.radius <= 0:
            raise ConfigError("l2 ball needs d >= 1 and radius > 0")

    def contains(self, p) -> bool:
        arr = np.asarray(p, dtype=float)
        if arr.shape != (self.d,) or not np.all(np.isfinite(arr)):
            return False
        return bool(np.sqrt(np.dot(arr, arr)) <= self.radius + SUM_TOL)

    def base_point(self) -> np.ndarray:
        return np.zeros(self.d)

    def diameter(self, kind: Norm) -> float:
        if kind is Norm.L1:
            return 2.0 * self.radius * float(np.sqrt(self.d))
        if kind is Norm.L2:
            return 2.0 * self.radius
        if kind is Norm.LINF:
            return 2.0 * self.radius
        raise UnsupportedCombination(f"l2 ball diameter for {kind!r}")

    def vertices(self) -> np.ndarray:
        eye = self.radius * np.eye(self.d)
        return np.vstack([eye, -eye])

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        direction = rng.standard_normal(self.d)
        direction /= np.sqrt(np.dot(direction, direction))
        r = self.radius * rng.random() ** (1.0 / self.d)
        return r * direction

    def grid(self, step: float) -> np.ndarray:
        box = Box(self.d, -self.radius, self.radius).grid(step * self.radius * 2)
        keep = np.sqrt(np.sum(box * box, axis=1)) <= self.radius + SUM_TOL
        return box[keep]

    @property
    def centrally_symmetric(self) -> bool:
        return True

    def describe(self) -> str:
        return f"l2ball({self.d},r={self.radius:g})"


@dataclass(frozen=True)
class L1Ball(Domain):
    d: int
    radius: float = 1.0

    def __post_init__(self):
        if self.d < 1 or self.radius <= 0:
            raise ConfigError("l1 ball needs d >= 1 and radius > 0")

    def contains(self, p) -> bool:
        arr = np.asarray(p, dtype=float)
        if arr.shape != (self.d,) or not np.all(np.isfinite(arr)):
            return False
        return bool(np.sum(np.abs(arr)) <= self.radius + SUM_TOL)

    def base_point(self) -> np.ndarray:
        return np.zeros(self.d)

    def diameter(self, kind: Norm) -> float:
        if kind in (Norm.L1, Norm.L2, Norm.LINF):
            return 2.0 * self.radius
        raise UnsupportedCombination(f"l1 ball diameter for {kind!r}")

    def vertices(self) -> np.ndarray:
        eye = self.radius * np.eye(self.d)
        return np.vstack([eye, -eye])

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        face = rng.dirichlet(np.ones(self.d))
        signs = rng.choice([-1.0, 1.0], size=self.d)
        r = self.radius * rng.random() ** (1.0 / self.d)
        return r * signs * face

    def grid(self, step: float) -> np.ndarray:
        box = Box(self.d, -self.radius, self.radius).grid(step * self.radius * 2)
        keep = np.sum(np.abs(box), axis=1) <= self.radius + SUM_TOL
        return box[keep]

    @property
    def centrally_symmetric(self) -> bool:
        return True

    def describe(self) -> str:
        return f"l1ball({self.d},r={self.radius:g})"


@dataclass(frozen=True)
class Box(Domain):
    d: int
    lo: float = 0.0
    hi: float = 1.0

    def __post_init__(self):
        if self.d < 1 or not self.lo < self.hi:
            raise ConfigError("box needs d >= 1 and lo < hi")

    def contains(self, p) -> bool:
        arr = np.asarray(p, dtype=float)
        if arr.shape != (self.d,) or not np.all(np.isfinite(arr)):
            return False
        return bool(np.all(arr >= self.lo - SUM_TOL) and np.all(arr <= self.hi + SUM_TOL))

    def base_point(self) -> np.ndarray:
        return np.full(self.d, 0.5 * (self.lo + self.hi))

    def diameter(self, kind: Norm) -> float:
        side = self.hi - self.lo
        if kind is Norm.L1:
            return self.d * side
        if kind is Norm.L2:
            return float(np.sqrt(self.d)) * side
        if kind is Norm.LINF:
            return side
        raise UnsupportedCombination(f"box diameter for {kind!r}")

    def vertices(self) -> np.ndarray:
        if self.d > 16:
            raise UnsupportedCombination("box vertex enumeration limited to d <= 16")
        corners = list(product((self.lo, self.hi), repeat=self.d))
        return np.asarray(corners, dtype=float)

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        return self.lo + (self.hi - self.lo) * rng.random(self.d)

    def grid(self, step: float) -> np.ndarray:
        if self.d > 3:
            raise UnsupportedCombination("box grid limited to d <= 3")
        n = round((self.hi - self.lo) / step)
        axis = self.lo + (self.hi - self.lo) * np.arange(n + 1) / n
        mesh = np.meshgrid(*([axis] * self.d), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    @property
    def centrally_symmetric(self) -> bool:
        return self.lo == -self.hi

    def describe(self) -> str:
        return f"box({self.d},[{self.lo:g},{self.hi:g}])"


def base_point(domain: Domain) -> np.ndarray:
    return domain.base_point()


def diameter(domain: Domain, kind: Norm) -> float:
    return domain.diameter(kind)


# ---------------------------------------------------------------------------
# Base-H round indexing
# ---------------------------------------------------------------------------


def digits_base_h(t: int, H: int, L: int) -> tuple[int, ...]:
    """Base-H digits of t-1, most significant first, padded to length L."""
    if H < 2 or L < 1:
        raise ConfigError(f"need H >= 2 and L >= 1, got H={H}, L={L}")
    if not 1 <= t <= H**L:
        raise BoundsError(f"round {t} outside [1, {H**L}]")
    rem = t - 1
    out = [0] * L
    for i in range(L - 1, -1, -1):
        out[i] = rem % H
        rem //= H
    return tuple(out)


def round_from_digits(digits, H: int) -> int:
    """Inverse of digits_base_h: reconstruct the 1-based round."""
    value = 0
    for dig in digits:
        if not 0 <= dig < H:
            raise BoundsError(f"digit {dig} outside [0, {H - 1}]")
        value = value * H + dig
    return value + 1


def interval_of(prefix, H: int, L: int) -> tuple[int, int]:
    """Inclusive round range [start, end] of the tree node with this prefix.

    The node at level len(prefix) covers the H**(L - len(prefix)) rounds whose
    leading digits equal the prefix; the empty prefix is the root [1, H**L].
    """
    if H < 2 or L < 1:
        raise ConfigError(f"need H >= 2 and L >= 1, got H={H}, L={L}")
    level = len(prefix)
    if level > L:
        raise BoundsError(f"prefix length {level} exceeds depth {L}")
    offset = 0
    for dig in prefix:
        if not 0 <= dig < H:
            raise BoundsError(f"digit {dig} outside [0, {H - 1}]")
        offset = offset * H + dig
    size = H ** (L - level)
    start = offset * size + 1
    return start, start + size - 1
