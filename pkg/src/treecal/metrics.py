"""Exact calibration error and full swap regret over interaction transcripts.

A transcript records, per round, a finite-support forecast distribution and
the realized outcome.  Metrics group forecast mass by (quantized point,
optional label), form the mass-weighted conditional outcome mean of each
group, and sum a distance between the group's mean and its point.  All
accumulations use exact summation (math.fsum) so every metric is invariant
under permuting rounds.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import IO, Iterable

import numpy as np

from .errors import DomainError
from .geometry import Domain, Norm, as_vector, norm_value
from .scoring import Regularizer, bregman, bregman_batch

#: forecast points are rounded to this many decimal digits before grouping,
#: so mathematically equal averages computed in different orders collide
DEFAULT_KEY_PRECISION = 12

Label = tuple[int, ...]


# ---------------------------------------------------------------------------
# Transcript containers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Forecast:
    """Finite-support distribution over (point, optional label) atoms."""

    points: np.ndarray  # (k, d)
    weights: np.ndarray  # (k,)
    labels: tuple[Label, ...] | None = None

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        w = np.array(self.weights, dtype=float)
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise DomainError("forecast needs a non-empty (k, d) stack of points")
        if w.shape != (pts.shape[0],):
            raise DomainError("forecast weights must match the number of atoms")
        if np.any(w < 0.0) or abs(math.fsum(w) - 1.0) > 1e-12:
            raise DomainError("forecast weights must be nonnegative and sum to one")
        if self.labels is not None:
            labels = tuple(tuple(int(i) for i in lab) for lab in self.labels)
            if len(labels) != pts.shape[0]:
                raise DomainError("forecast labels must match the number of atoms")
            if len(set(labels)) != len(labels):
                raise DomainError("forecast labels must be distinct")
            object.__setattr__(self, "labels", labels)
        pts.flags.writeable = False
        w.flags.writeable = False
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    @classmethod
    def point_mass(cls, point, label: Label | None = None) -> "Forecast":
        labels = (tuple(label),) if label is not None else None
        return cls(np.asarray(point, dtype=float)[None, :], np.ones(1), labels)

    @property
    def size(self) -> int:
        return self.points.shape[0]

    def mean_point(self) -> np.ndarray:
        return self.weights @ self.points


@dataclass(frozen=True)
class Transcript:
    """Full interaction record: one forecast and one outcome per round."""

    domain: Domain
    forecasts: tuple[Forecast, ...]
    outcomes: np.ndarray  # (T, d)

    def __post_init__(self):
        forecasts = tuple(self.forecasts)
        ys = np.array(self.outcomes, dtype=float)
        if len(forecasts) == 0:
            raise DomainError("transcript needs at least one round")
        if ys.shape != (len(forecasts), self.domain.d):
            raise DomainError(
                f"outcomes shape {ys.shape} does not match "
                f"{len(forecasts)} rounds in {self.domain.describe()}"
            )
        for t, f in enumerate(forecasts, start=1):
            for point in f.points:
                self.domain.require_member(point, what=f"forecast atom at round {t}")
        for t, y in enumerate(ys, start=1):
            self.domain.require_member(y, what=f"outcome at round {t}")
        ys.flags.writeable = False
        object.__setattr__(self, "forecasts", forecasts)
        object.__setattr__(self, "outcomes", ys)

    @property
    def T(self) -> int:
        return len(self.forecasts)

    def rounds(self) -> Iterable[tuple[Forecast, np.ndarray]]:
        return zip(self.forecasts, self.outcomes)


@dataclass(frozen=True)
class PureTranscript:
    """Point predictions instead of distributions; masses are counts."""

    domain: Domain
    predictions: np.ndarray  # (T, d)
    outcomes: np.ndarray  # (T, d)

    def __post_init__(self):
        ps = np.array(self.predictions, dtype=float)
        ys = np.array(self.outcomes, dtype=float)
        if ps.ndim != 2 or ps.shape[0] == 0 or ps.shape != ys.shape:
            raise DomainError("pure transcript needs matching (T, d) stacks")
        for t in range(ps.shape[0]):
            self.domain.require_member(ps[t], what=f"prediction at round {t + 1}")
            self.domain.require_member(ys[t], what=f"outcome at round {t + 1}")
        ps.flags.writeable = False
        ys.flags.writeable = False
        object.__setattr__(self, "predictions", ps)
        object.__setattr__(self, "outcomes", ys)

    @property
    def T(self) -> int:
        return self.predictions.shape[0]


# ---------------------------------------------------------------------------
# Distance measures
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NormDistance:
    kind: Norm

    def __call__(self, a, b) -> float:
        return norm_value(np.asarray(a, dtype=float) - np.asarray(b, dtype=float), self.kind)

    @property
    def name(self) -> str:
        return self.kind.value


@dataclass(frozen=True)
class SquaredNormDistance:
    kind: Norm

    def __call__(self, a, b) -> float:
        return norm_value(np.asarray(a, dtype=float) - np.asarray(b, dtype=float), self.kind) ** 2

    @property
    def name(self) -> str:
        return f"{self.kind.value}_sq"


@dataclass(frozen=True)
class BregmanDistance:
    reg: Regularizer

    def __call__(self, a, b) -> float:
        return bregman(self.reg, a, b)

    @property
    def name(self) -> str:
        return f"bregman_{self.reg.name}"


# ---------------------------------------------------------------------------
# Conditional means and calibration error
# ---------------------------------------------------------------------------


@dataclass
class GroupStats:
    """One forecast group: total mass, conditional outcome mean, and point."""

    mass: float
    nu: np.ndarray
    point: np.ndarray
    label: Label | None


def group_key(point: np.ndarray, label: Label | None, precision: int) -> tuple:
    return (tuple(np.round(point, precision).tolist()), label)


class _Accumulator:
    __slots__ = ("weights", "rounds", "rep", "label")

    def __init__(self, label):
        self.weights: list[float] = []
        self.rounds: list[int] = []
        self.rep: tuple | None = None
        self.label = label

    def add(self, w: float, t: int, point: np.ndarray):
        self.weights.append(w)
        self.rounds.append(t)
        # lexicographic-min exact coordinates: a permutation-invariant
        # representative when distinct floats share a quantized key
        cand = tuple(point.tolist())
        if self.rep is None or cand < self.rep:
            self.rep = cand


def conditional_means(
    tr: Transcript,
    labeled: bool = False,
    precision: int = DEFAULT_KEY_PRECISION,
) -> dict[tuple, GroupStats]:
    """Group forecast mass and average the outcomes it was placed on.

    Only groups with positive realized mass are materialized.  With
    ``labeled`` the atom labels join the grouping key, so identical points
    played under different labels are scored separately.
    """
    acc: dict[tuple, _Accumulator] = {}
    for t, (forecast, _) in enumerate(tr.rounds()):
        labels = forecast.labels if (labeled and forecast.labels is not None) else None
        for i in range(forecast.size):
            w = float(forecast.weights[i])
            if w == 0.0:
                continue
            lab = labels[i] if labels is not None else None
            key = group_key(forecast.points[i], lab, precision)
            bucket = acc.get(key)
            if bucket is None:
                bucket = acc[key] = _Accumulator(lab)
            bucket.add(w, t, forecast.points[i])
    out: dict[tuple, GroupStats] = {}
    d = tr.domain.d
    for key, bucket in acc.items():
        mass = math.fsum(bucket.weights)
        ys = tr.outcomes[bucket.rounds]
        nu = np.array(
            [
                math.fsum(w * ys[i, j] for i, w in enumerate(bucket.weights)) / mass
                for j in range(d)
            ]
        )
        out[key] = GroupStats(mass, nu, np.asarray(bucket.rep, dtype=float), bucket.label)
    return out


def calibration_error(
    tr: Transcript,
    distance,
    labeled: bool = False,
    precision: int = DEFAULT_KEY_PRECISION,
) -> float:
    """Mass-weighted distance between each group's conditional mean and point."""
    groups = conditional_means(tr, labeled=labeled, precision=precision)
    return math.fsum(g.mass * distance(g.nu, g.point) for g in groups.values())


def pure_calibration_error(
    tr: PureTranscript,
    distance,
    precision: int = DEFAULT_KEY_PRECISION,
) -> float:
    """Calibration of point predictions: groups carry integer counts."""
    acc: dict[tuple, _Accumulator] = {}
    for t in range(tr.T):
        key = group_key(tr.predictions[t], None, precision)
        bucket = acc.get(key)
        if bucket is None:
            bucket = acc[key] = _Accumulator(None)
        bucket.add(1.0, t, tr.predictions[t])
    total = []
    d = tr.domain.d
    for bucket in acc.values():
        count = len(bucket.rounds)
        ys = tr.outcomes[bucket.rounds]
        nu = np.array([math.fsum(ys[:, j].tolist()) / count for j in range(d)])
        total.append(count * distance(nu, np.asarray(bucket.rep, dtype=float)))
    return math.fsum(total)


# ---------------------------------------------------------------------------
# Swap regret
# ---------------------------------------------------------------------------


def swap_regret_bregman(
    tr: Transcript,
    reg: Regularizer,
    labeled: bool = False,
    audit: bool = False,
    grid_step: float = 0.02,
    precision: int = DEFAULT_KEY_PRECISION,
    tol: float = 1e-9,
) -> float:
    """Full swap regret under the scoring losses induced by ``reg``.

    The per-group optimal swap target is the group's conditional mean, which
    collapses the supremum over swap functions to the Bregman calibration
    error; that closed form is returned.  With ``audit`` the regret is
    recomputed by brute force -- best response per group searched over the
    conditional mean plus a domain grid (d <= 3) -- and the two values must
    agree within ``tol``.
    """
    closed = calibration_error(tr, BregmanDistance(reg), labeled=labeled, precision=precision)
    if audit:
        brute = _swap_regret_audit(tr, reg, labeled, grid_step, precision)
        if abs(brute - closed) > tol:
            raise AssertionError(
                f"swap-regret audit mismatch: closed={closed!r} brute={brute!r}"
            )
    return closed


def _swap_regret_audit(tr, reg, labeled, grid_step, precision) -> float:
    groups = conditional_means(tr, labeled=labeled, precision=precision)
    # membership of each round's weight in each group, rebuilt independently
    per_group: dict[tuple, list[tuple[float, int]]] = {k: [] for k in groups}
    for t, (forecast, _) in enumerate(tr.rounds()):
        labels = forecast.labels if (labeled and forecast.labels is not None) else None
        for i in range(forecast.size):
            w = float(forecast.weights[i])
            if w == 0.0:
                continue
            lab = labels[i] if labels is not None else None
            per_group[group_key(forecast.points[i], lab, precision)].append((w, t))
    grid = tr.domain.grid(grid_step) if tr.domain.d <= 3 else None
    total = []
    for key, stats in groups.items():
        contributions = per_group[key]
        w = np.array([c[0] for c in contributions])
        ys = tr.outcomes[[c[1] for c in contributions]]
        candidates = stats.nu[None, :] if grid is None else np.vstack([stats.nu[None, :], grid])
        losses = bregman_batch(reg, ys, np.vstack([stats.point[None, :], candidates]))
        own = float(w @ losses[:, 0])
        best = float(np.min(w @ losses[:, 1:]))
        total.append(own - best)
    return math.fsum(total)


def max_realized_loss(tr: Transcript, reg: Regularizer) -> float:
    """Largest scoring loss actually incurred: max over rounds and atoms of
    the divergence from the outcome to the atom's point.

    Bound checks use this in place of a global loss cap, which can be
    infinite (entropy near the boundary) even though realized values stay
    finite because played points are interior averages.
    """
    worst = 0.0
    for forecast, outcome in tr.rounds():
        divs = bregman_batch(reg, outcome[None, :], forecast.points)[0]
        worst = max(worst, float(np.max(divs)))
    return worst


def swap_regret_finite(menu, dists, losses) -> float:
    """Exact full swap regret for distributions over a finite action menu.

    ``menu`` is an (m, d) stack, ``dists`` a (T, m) stack of probability
    rows, ``losses`` a (T, d) stack of linear loss vectors.  The optimal swap
    maps each menu point to its best response against the mass-weighted loss
    it accumulated, so the supremum is a per-point minimum.
    """
    menu = np.asarray(menu, dtype=float)
    if menu.ndim != 2 or menu.shape[0] == 0:
        raise DomainError("menu must be a non-empty (m, d) stack")
    dists = np.asarray(dists, dtype=float)
    losses = np.asarray(losses, dtype=float)
    if dists.ndim != 2 or dists.shape[1] != menu.shape[0] or dists.shape[0] != losses.shape[0]:
        raise DomainError("need matching (T, m) distributions and (T, d) losses")
    weighted = dists.T @ losses  # (m, d): loss accumulated by each menu point
    gains = weighted @ menu.T  # (m, m): [i, j] = cost of playing j under i's losses
    own = np.diag(gains)
    return float(np.sum(own - gains.min(axis=1)))


# ---------------------------------------------------------------------------
# Serialization (JSON-lines, one record per round)
# ---------------------------------------------------------------------------


def dump_transcript(tr: Transcript, fp: IO[str]) -> None:
    """One JSON object per round: {"t", "atoms", "outcome"}.

    Floats round-trip bit-exactly via the shortest-repr encoding (at most 17
    significant digits).
    """
    for t, (forecast, outcome) in enumerate(tr.rounds(), start=1):
        atoms = []
        for i in range(forecast.size):
            label = None
            if forecast.labels is not None:
                label = list(forecast.labels[i])
            atoms.append([forecast.points[i].tolist(), label, float(forecast.weights[i])])
        fp.write(json.dumps({"t": t, "atoms": atoms, "outcome": outcome.tolist()}) + "\n")


def load_transcript(fp: IO[str], domain: Domain) -> Transcript:
    """Inverse of dump_transcript; lines carrying an "event" key are skipped."""
    forecasts = []
    outcomes = []
    for line in fp:
        line = line.strip()
        if not line:
            continue
        record = json.loads(line)
        if "event" in record:
            continue
        points = np.array([atom[0] for atom in record["atoms"]], dtype=float)
        weights = np.array([atom[2] for atom in record["atoms"]], dtype=float)
        raw_labels = [atom[1] for atom in record["atoms"]]
        labels = None
        if any(lab is not None for lab in raw_labels):
            labels = tuple(tuple(lab) for lab in raw_labels)
        forecasts.append(Forecast(points, weights, labels))
        outcomes.append(record["outcome"])
    return Transcript(domain, tuple(forecasts), np.array(outcomes, dtype=float))
