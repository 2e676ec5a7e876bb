"""Tree-structured forecasters: TreeCal, generic TreeSwap, and sampling.

Rounds 1..T are arranged into an H-ary tree of depth L via the base-H digits
of t-1.  Every tree node carries an action; the forecast at round t is the
uniform mixture of the L actions on the root-to-leaf path, each atom labeled
by its node's digit prefix.

TreeCal assigns a node's action directly: the h-th child of a node gets the
running mean of all outcomes observed in the node's first h child intervals
(the 0th child gets the domain's canonical point).  TreeSwap generalizes
this by giving each internal node a fresh external-regret subroutine that is
fed the per-child interval losses; with Follow-The-Leader and proper-scoring
losses the two produce identical transcripts, since the loss-minimizing
action against a batch of scoring losses is the batch's outcome mean.

State is confined to the active root-to-leaf path: O(L * d) floats, never
the full tree.  Runs are strictly sequential (forecast t, observe t, ...).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, IO

import numpy as np

from .adversaries import Adversary
from .errors import ConfigError, DomainError, ProtocolError
from .geometry import Domain, digits_base_h, interval_of
from .metrics import Forecast, PureTranscript, Transcript, dump_transcript
from .scoring import Regularizer, bregman


def _validate_tree_params(domain: Domain, T: int, H: int, L: int) -> None:
    if H < 2:
        raise ConfigError(f"need H >= 2, got {H}")
    if L < 1:
        raise ConfigError(f"need L >= 1, got {L}")
    if not H ** (L - 1) <= T <= H**L:
        raise ConfigError(
            f"need H**(L-1) <= T <= H**L, got T={T} outside [{H ** (L - 1)}, {H**L}]"
        )


@dataclass(frozen=True)
class AssignmentEvent:
    """A node received its action: (level, digit prefix, action)."""

    level: int
    prefix: tuple[int, ...]
    action: np.ndarray


@dataclass(frozen=True)
class IntervalLoss:
    """Sufficient statistic of one child interval's average scoring loss.

    For losses of Bregman type the interval average is determined by the
    interval's outcome mean and length, so subroutines never see a
    regularizer.
    """

    mean: np.ndarray
    count: int
    level: int
    prefix: tuple[int, ...]


class TreeCal:
    """Online calibration forecaster over an arbitrary convex domain.

    Protocol: ``forecast(t)`` then ``observe(t, y)`` for t = 1..T, strictly
    in order.  The forecast at t is the uniform mixture of the path actions,
    labeled by digit prefixes of t-1.
    """

    def __init__(self, domain: Domain, T: int, H: int, L: int,
                 base_point=None, record_events: bool = False):
        _validate_tree_params(domain, T, H, L)
        self.domain = domain
        self.T = T
        self.H = H
        self.L = L
        self.base = (
            domain.base_point()
            if base_point is None
            else domain.require_member(base_point, what="base point")
        )
        self._digits = digits_base_h(1, H, L)
        self._actions = [self.base.copy() for _ in range(L)]  # index l-1 -> level l
        self._node_sum = [np.zeros(domain.d) for _ in range(L)]  # levels 0..L-1
        self._node_count = [0] * L
        self._t = 1
        self._awaiting = "forecast"
        self.events: list[AssignmentEvent] | None = [] if record_events else None
        if record_events:
            for l in range(1, L + 1):
                self._record(l, self._digits[:l], self.base)

    def _record(self, level, prefix, action):
        if self.events is not None:
            self.events.append(AssignmentEvent(level, tuple(prefix), action.copy()))

    def forecast(self, t: int) -> Forecast:
        if self._awaiting != "forecast" or t != self._t:
            raise ProtocolError(
                f"expected {self._awaiting}({self._t}), got forecast({t})"
            )
        points = np.stack(self._actions)
        weights = np.full(self.L, 1.0 / self.L)
        labels = tuple(self._digits[:l] for l in range(1, self.L + 1))
        self._awaiting = "observe"
        return Forecast(points, weights, labels)

    def observe(self, t: int, y) -> None:
        if self._awaiting != "observe" or t != self._t:
            raise ProtocolError(f"expected {self._awaiting}({self._t}), got observe({t})")
        y = self.domain.require_member(y, what=f"outcome at round {t}")
        for j in range(self.L):
            self._node_sum[j] += y
            self._node_count[j] += 1
        if t < self.T:
            self._advance(t + 1)
        self._t = t + 1
        self._awaiting = "forecast"

    def _advance(self, t_next: int) -> None:
        new = digits_base_h(t_next, self.H, self.L)
        l_star = 1
        while new[l_star - 1] == self._digits[l_star - 1]:
            l_star += 1
        # the level-l_star node's elder siblings are exactly the rounds its
        # parent has accumulated so far, giving the prefix-mean assignment
        parent = l_star - 1
        self._actions[l_star - 1] = self._node_sum[parent] / self._node_count[parent]
        self._record(l_star, new[:l_star], self._actions[l_star - 1])
        for l in range(l_star + 1, self.L + 1):
            self._actions[l - 1] = self.base.copy()
            self._record(l, new[:l], self.base)
        for j in range(l_star, self.L):
            self._node_sum[j][:] = 0.0
            self._node_count[j] = 0
        self._digits = new

    def run(self, adversary: Adversary) -> Transcript:
        return run_forecaster(self, adversary, self.T)


def run_forecaster(forecaster, adversary: Adversary, T: int) -> Transcript:
    """Drive the forecast/observe protocol for T rounds and collect rounds."""
    forecasts = []
    outcomes = []
    for t in range(1, T + 1):
        f = forecaster.forecast(t)
        y = adversary.outcome(t, forecast=f)
        forecaster.observe(t, y)
        forecasts.append(f)
        outcomes.append(np.asarray(y, dtype=float))
    return Transcript(forecaster.domain, tuple(forecasts), np.stack(outcomes))


# ---------------------------------------------------------------------------
# Subroutines
# ---------------------------------------------------------------------------


def ftl_action(interval_losses, base_point) -> np.ndarray:
    """Count-weighted mean of the completed interval means.

    This is the best response to the cumulative scoring losses; with no
    feedback yet it falls back to the supplied canonical point.
    """
    if not interval_losses:
        return np.asarray(base_point, dtype=float).copy()
    means = np.stack([loss.mean for loss in interval_losses])
    counts = np.array([loss.count for loss in interval_losses], dtype=float)
    return np.average(means, axis=0, weights=counts)


def btl_action(interval_losses) -> np.ndarray:
    """Count-weighted mean including the current interval (clairvoyant)."""
    if not interval_losses:
        raise DomainError("be-the-leader needs at least the current interval loss")
    means = np.stack([loss.mean for loss in interval_losses])
    counts = np.array([loss.count for loss in interval_losses], dtype=float)
    return np.average(means, axis=0, weights=counts)


class FollowTheLeader:
    """Best response to completed interval losses; canonical point first."""

    clairvoyant = False

    def __init__(self, base_point):
        self.base_point = np.asarray(base_point, dtype=float)

    def next_action(self, interval_losses) -> np.ndarray:
        return ftl_action(interval_losses, self.base_point)


class BeTheLeader:
    """Best response including the upcoming interval loss.

    Unimplementable against a live stream; the engine only runs it in oracle
    mode, where the full outcome stream is fixed up front.
    """

    clairvoyant = True

    def next_action(self, interval_losses) -> np.ndarray:
        return btl_action(interval_losses)


# ---------------------------------------------------------------------------
# TreeSwap
# ---------------------------------------------------------------------------


@dataclass
class NodeRecord:
    """Per-node history for bound checks: child means and assigned actions."""

    level: int
    prefix: tuple[int, ...]
    means: list[np.ndarray] = field(default_factory=list)
    counts: list[int] = field(default_factory=list)
    actions: list[np.ndarray] = field(default_factory=list)


@dataclass
class TreeSwapRun:
    transcript: Transcript
    nodes: list[NodeRecord] | None = None
    events: list[AssignmentEvent] | None = None


def node_external_regret(reg: Regularizer, record: NodeRecord) -> float:
    """Count-weighted external regret of one node's subroutine.

    The node's children fed losses whose interval averages are determined by
    (mean, count); the regret compares the played actions against the single
    best response, which is the count-weighted mean of the child means.
    Jensen offsets are common to both sides and cancel.
    """
    n = min(len(record.means), len(record.actions))
    if n == 0:
        return 0.0
    means = np.stack(record.means[:n])
    counts = np.array(record.counts[:n], dtype=float)
    best_point = np.average(means, axis=0, weights=counts)
    played = math.fsum(
        c * bregman(reg, m, a) for c, m, a in zip(counts, means, record.actions)
    )
    best = math.fsum(c * bregman(reg, m, best_point) for c, m in zip(counts, means))
    return played - best


class _Node:
    __slots__ = ("sub", "prefix", "completed", "cur_sum", "cur_count", "record")

    def __init__(self, sub, prefix, d, record):
        self.sub = sub
        self.prefix = prefix
        self.completed: list[IntervalLoss] = []
        self.cur_sum = np.zeros(d)
        self.cur_count = 0
        self.record = NodeRecord(len(prefix), prefix) if record else None


def treeswap_run(
    domain: Domain,
    T: int,
    H: int,
    L: int,
    subroutine_factory: Callable[[], object],
    adversary: Adversary | None = None,
    outcomes: np.ndarray | None = None,
    record_nodes: bool = False,
    record_events: bool = False,
) -> TreeSwapRun:
    """Run the swap-regret meta-algorithm with a pluggable subroutine.

    Each internal tree node gets a fresh subroutine instance that chooses the
    actions of the node's child intervals from the completed children's
    average losses (represented by their outcome means).  Clairvoyant
    subroutines additionally see the current child's loss, which requires the
    full stream up front: pass ``outcomes`` instead of an adaptive adversary.
    """
    _validate_tree_params(domain, T, H, L)
    if outcomes is None:
        if adversary is None:
            raise ConfigError("need an adversary or a precomputed outcome stream")
    else:
        outcomes = np.asarray(outcomes, dtype=float)
        if outcomes.shape != (T, domain.d):
            raise ConfigError(f"outcome stream must have shape ({T}, {domain.d})")

    digits = digits_base_h(1, H, L)
    nodes = [
        _Node(subroutine_factory(), digits[:j], domain.d, record_nodes) for j in range(L)
    ]
    clairvoyant = any(getattr(n.sub, "clairvoyant", False) for n in nodes)
    if clairvoyant and outcomes is None:
        raise ProtocolError(
            "clairvoyant subroutine needs a precomputed (oblivious) outcome stream"
        )
    events: list[AssignmentEvent] | None = [] if record_events else None
    finished_records: list[NodeRecord] = []

    def oracle_mean(prefix) -> IntervalLoss:
        start, end = interval_of(prefix, H, L)
        end = min(end, T)
        block = outcomes[start - 1 : end]
        return IntervalLoss(block.mean(axis=0), end - start + 1, len(prefix), prefix)

    def assign(level: int, child_prefix: tuple[int, ...]) -> np.ndarray:
        node = nodes[level - 1]
        fed = node.completed
        if getattr(node.sub, "clairvoyant", False):
            fed = fed + [oracle_mean(child_prefix)]
        action = np.asarray(node.sub.next_action(fed), dtype=float)
        if not domain.contains(action):
            raise ProtocolError(
                f"subroutine returned non-member action for node {child_prefix}"
            )
        if node.record is not None:
            node.record.actions.append(action.copy())
        if events is not None:
            events.append(AssignmentEvent(level, child_prefix, action.copy()))
        return action

    def finalize_child(level: int, child_prefix: tuple[int, ...]) -> None:
        node = nodes[level - 1]
        loss = IntervalLoss(
            node.cur_sum / node.cur_count, node.cur_count, level, child_prefix
        )
        node.completed.append(loss)
        if node.record is not None:
            node.record.means.append(loss.mean.copy())
            node.record.counts.append(loss.count)
        node.cur_sum = np.zeros(domain.d)
        node.cur_count = 0

    actions = [assign(l, digits[:l]) for l in range(1, L + 1)]
    forecasts = []
    stream = []
    for t in range(1, T + 1):
        forecast = Forecast(
            np.stack(actions),
            np.full(L, 1.0 / L),
            tuple(digits[:l] for l in range(1, L + 1)),
        )
        forecasts.append(forecast)
        if outcomes is not None:
            y = outcomes[t - 1]
        else:
            y = domain.require_member(
                adversary.outcome(t, forecast=forecast), what=f"outcome at round {t}"
            )
        stream.append(np.asarray(y, dtype=float))
        for node in nodes:
            node.cur_sum += y
            node.cur_count += 1
        if t == T:
            break
        new = digits_base_h(t + 1, H, L)
        l_star = 1
        while new[l_star - 1] == digits[l_star - 1]:
            l_star += 1
        for l in range(L, l_star - 1, -1):  # level-l intervals just ended
            finalize_child(l, digits[:l])
        for j in range(l_star, L):  # nodes at these levels are replaced
            if nodes[j].record is not None:
                finished_records.append(nodes[j].record)
            nodes[j] = _Node(subroutine_factory(), new[:j], domain.d, record_nodes)
        digits = new
        for l in range(l_star, L + 1):
            actions[l - 1] = assign(l, digits[:l])

    for l in range(L, 0, -1):  # close out the final path
        if nodes[l - 1].cur_count > 0:
            finalize_child(l, digits[:l])
    if record_nodes:
        for j in range(L - 1, -1, -1):
            finished_records.append(nodes[j].record)

    transcript = Transcript(domain, tuple(forecasts), np.stack(stream))
    return TreeSwapRun(
        transcript,
        nodes=finished_records if record_nodes else None,
        events=events,
    )


# ---------------------------------------------------------------------------
# Sampled (pure-prediction) variant
# ---------------------------------------------------------------------------


@dataclass
class SampleRun:
    pure: PureTranscript
    inner: Transcript


def sample_treecal_run(
    domain: Domain,
    T: int,
    H: int,
    L: int,
    S: int,
    adversary: Adversary,
    rng: np.random.Generator,
) -> SampleRun:
    """Blocked sampling wrapper producing pure (point) predictions.

    Each of the T/S inner rounds draws S i.i.d. point predictions from the
    inner forecaster's mixture; the block's mean outcome is fed back as a
    single inner observation.
    """
    if S < 1 or T % S != 0:
        raise ConfigError(f"S={S} must be >= 1 and divide T={T}")
    inner_T = T // S
    inner = TreeCal(domain, inner_T, H, L)
    inner_forecasts = []
    inner_outcomes = []
    predictions = []
    raw_outcomes = []
    for i in range(1, inner_T + 1):
        forecast = inner.forecast(i)
        inner_forecasts.append(forecast)
        block = []
        for j in range(S):
            idx = int(rng.integers(forecast.size))  # mixture weights are uniform
            predictions.append(forecast.points[idx].copy())
            y = domain.require_member(
                adversary.outcome(S * (i - 1) + j + 1, forecast=forecast),
                what="outcome",
            )
            block.append(y)
            raw_outcomes.append(y)
        block_mean = np.mean(block, axis=0)
        inner.observe(i, block_mean)
        inner_outcomes.append(block_mean)
    pure = PureTranscript(domain, np.stack(predictions), np.stack(raw_outcomes))
    inner_tr = Transcript(domain, tuple(inner_forecasts), np.stack(inner_outcomes))
    return SampleRun(pure, inner_tr)


def dump_trace(fp: IO[str], transcript: Transcript, events=None) -> None:
    """Round records (transcript JSON-lines) followed by assignment events."""
    dump_transcript(transcript, fp)
    for ev in events or []:
        fp.write(
            json.dumps(
                {
                    "event": "assign",
                    "level": ev.level,
                    "prefix": list(ev.prefix),
                    "action": ev.action.tolist(),
                }
            )
            + "\n"
        )
