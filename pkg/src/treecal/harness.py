"""Seeded experiment runner: single runs, parameter sweeps, CSV/JSON reports.

A run is described by a flat key=value config (file keys overridable by CLI
flags of the same name).  Each run drives one algorithm for T rounds against
a configured adversary, computes every calibration/swap-regret metric at the
requested norms, evaluates the applicable bound checks with both sides
recorded, and emits one row per metric.

Randomness: one root PCG64 generator is seeded per run from the config's
``seed``; it is split (via numpy SeedSequence spawning) into one child
stream for the adversary and one for the prediction sampler, so reruns are
bit-identical and metrics never perturb the stream.
"""

from __future__ import annotations

import csv
import hashlib
import io
import itertools
import json
import logging
import time
from dataclasses import dataclass, fields, replace

import numpy as np

from .adversaries import make_adversary, materialize
from .engine import (
    BeTheLeader,
    FollowTheLeader,
    TreeCal,
    node_external_regret,
    sample_treecal_run,
    treeswap_run,
)
from .errors import ConfigError
from .geometry import Box, Domain, L1Ball, L2Ball, Norm, Simplex, norm_value
from .metrics import (
    BregmanDistance,
    NormDistance,
    SquaredNormDistance,
    calibration_error,
    max_realized_loss,
    pure_calibration_error,
    swap_regret_bregman,
)
from .scoring import euclidean, negative_entropy

logger = logging.getLogger(__name__)

ALGORITHMS = ("treecal", "treeswap-ftl", "treeswap-btl", "sample-treecal")

CSV_COLUMNS = [
    "run_id", "algorithm", "domain", "d", "H", "L", "T", "S",
    "adversary", "regularizer", "norm", "metric", "value",
    "b_realized", "bound", "bound_ok", "seed", "wall_ms",
]


@dataclass
class RunConfig:
    algorithm: str = "treecal"
    domain: str = "simplex"
    d: int = 3
    radius: float = 1.0
    lo: float = 0.0
    hi: float = 1.0
    adversary: str = "iid-dirichlet"
    alpha: float = 1.0
    period: int = 0
    H: int = 4
    L: int = 2
    T: int = 0  # 0 means H**L (T/S inner rounds for sample-treecal)
    S: int = 1
    regularizer: str = "auto"
    norms: str = "l1,l2"
    seed: int = 0
    out: str = ""
    format: str = "csv"


@dataclass
class ReportRow:
    run_id: str
    algorithm: str
    domain: str
    d: int
    H: int
    L: int
    T: int
    S: int
    adversary: str
    regularizer: str
    norm: str
    metric: str
    value: float
    b_realized: float | None
    bound: float | None
    bound_ok: bool | None
    seed: int
    wall_ms: float

    @property
    def gates_exit_code(self) -> bool:
        """Strict-form rows are informational and never gate (see trace of
        the tighter 1/H^2 correction term, which the proofs do not sustain)."""
        return self.bound_ok is False and not self.metric.endswith("_strict")


# ---------------------------------------------------------------------------
# Config parsing
# ---------------------------------------------------------------------------


def parse_config_text(text: str) -> dict[str, str]:
    """Flat ``key = value`` lines; '#' starts a comment."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def config_from_mapping(mapping: dict[str, str], base: RunConfig | None = None) -> RunConfig:
    cfg = base or RunConfig()
    known = {f.name: f.type for f in fields(RunConfig)}
    updates = {}
    for key, value in mapping.items():
        if key.startswith("sweep_") or key == "seeds":
            continue  # sweep axes are read separately
        if key not in known:
            raise ConfigError(f"unknown config key {key!r}")
        current = getattr(cfg, key)
        if isinstance(current, bool):
            updates[key] = value.lower() in ("1", "true", "yes")
        elif isinstance(current, int):
            updates[key] = int(value)
        elif isinstance(current, float):
            updates[key] = float(value)
        else:
            updates[key] = value
    return replace(cfg, **updates)


def load_config(path: str, base: RunConfig | None = None) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fp:
        return config_from_mapping(parse_config_text(fp.read()), base)


def build_domain(cfg: RunConfig) -> Domain:
    tag = cfg.domain.lower()
    if tag == "simplex":
        return Simplex(cfg.d)
    if tag == "l2ball":
        return L2Ball(cfg.d, cfg.radius)
    if tag == "l1ball":
        return L1Ball(cfg.d, cfg.radius)
    if tag == "box":
        return Box(cfg.d, cfg.lo, cfg.hi)
    raise ConfigError(f"unknown domain {cfg.domain!r}")


def parse_norms(spec: str) -> list[Norm]:
    out = []
    for token in spec.split(","):
        token = token.strip().lower()
        if not token:
            continue
        try:
            out.append(Norm(token))
        except ValueError:
            raise ConfigError(f"unknown norm {token!r}") from None
    if not out:
        raise ConfigError("at least one norm must be requested")
    return out


def regularizer_for(cfg: RunConfig, domain: Domain, kind: Norm):
    name = cfg.regularizer.lower()
    if name == "auto":
        if kind is Norm.L1 and isinstance(domain, Simplex):
            return negative_entropy(domain)
        return euclidean(domain)
    if name in ("negentropy", "negative-entropy"):
        if not isinstance(domain, Simplex):
            raise ConfigError("regularizer 'negentropy' requires domain = simplex")
        return negative_entropy(domain)
    if name == "euclidean":
        return euclidean(domain)
    raise ConfigError(f"unknown regularizer {cfg.regularizer!r}")


def effective_horizon(cfg: RunConfig) -> int:
    capacity = cfg.H**cfg.L
    if cfg.T == 0:
        return capacity * cfg.S if cfg.algorithm == "sample-treecal" else capacity
    return cfg.T


def run_id_of(cfg: RunConfig) -> str:
    canon = ",".join(
        f"{f.name}={getattr(cfg, f.name)}" for f in fields(RunConfig) if f.name not in ("out", "format")
    )
    return hashlib.sha1(canon.encode()).hexdigest()[:10]


# ---------------------------------------------------------------------------
# Single experiment
# ---------------------------------------------------------------------------


def run_experiment(cfg: RunConfig) -> list[ReportRow]:
    """Execute one full T-round protocol and report all metrics and bounds."""
    if cfg.algorithm not in ALGORITHMS:
        raise ConfigError(f"unknown algorithm {cfg.algorithm!r}; options: {ALGORITHMS}")
    domain = build_domain(cfg)
    norms = parse_norms(cfg.norms)
    T = effective_horizon(cfg)
    started = time.perf_counter()

    root = np.random.SeedSequence(cfg.seed)
    adversary_seq, sampler_seq = root.spawn(2)
    adversary_rng = np.random.default_rng(adversary_seq)
    sampler_rng = np.random.default_rng(sampler_seq)

    params = {"alpha": cfg.alpha}
    if cfg.period > 0:
        params["period"] = cfg.period

    pure = None
    nodes = None
    movement = None

    if cfg.algorithm == "sample-treecal":
        if cfg.S < 1 or T % cfg.S != 0:
            raise ConfigError(f"S = {cfg.S} must divide T = {T}")
        adversary = make_adversary(cfg.adversary, domain, T, adversary_rng, **params)
        run = sample_treecal_run(domain, T, cfg.H, cfg.L, cfg.S, adversary, sampler_rng)
        transcript = run.inner  # distributional metrics live on the inner run
        pure = run.pure
    elif cfg.algorithm == "treecal":
        adversary = make_adversary(cfg.adversary, domain, T, adversary_rng, **params)
        engine = TreeCal(domain, T, cfg.H, cfg.L)
        transcript = engine.run(adversary)
    elif cfg.algorithm == "treeswap-ftl":
        adversary = make_adversary(cfg.adversary, domain, T, adversary_rng, **params)
        transcript = treeswap_run(
            domain, T, cfg.H, cfg.L,
            lambda: FollowTheLeader(domain.base_point()),
            adversary=adversary,
        ).transcript
    else:  # treeswap-btl (oracle mode: needs the stream up front)
        adversary = make_adversary(cfg.adversary, domain, T, adversary_rng, **params)
        if adversary.adaptive:
            raise ConfigError(
                "algorithm 'treeswap-btl' is clairvoyant and requires an oblivious adversary"
            )
        stream = materialize(adversary, T)
        run = treeswap_run(
            domain, T, cfg.H, cfg.L, BeTheLeader, outcomes=stream, record_nodes=True
        )
        transcript = run.transcript
        nodes = run.nodes
        ftl_run = treeswap_run(
            domain, T, cfg.H, cfg.L,
            lambda: FollowTheLeader(domain.base_point()),
            outcomes=stream, record_nodes=True,
        )
        movement = _movement_by_norm(ftl_run.nodes, run.nodes, norms)

    wall_ms = 1000.0 * (time.perf_counter() - started)
    rid = run_id_of(cfg)

    def row(metric, value, *, norm="", reg_name="", b=None, bound=None, ok=None):
        return ReportRow(
            run_id=rid, algorithm=cfg.algorithm, domain=domain.describe(), d=cfg.d,
            H=cfg.H, L=cfg.L, T=T, S=cfg.S, adversary=cfg.adversary,
            regularizer=reg_name, norm=norm, metric=metric, value=value,
            b_realized=b, bound=bound, bound_ok=ok, seed=cfg.seed, wall_ms=wall_ms,
        )

    rows: list[ReportRow] = []
    inner_T = transcript.T
    seen_regs: dict[str, float] = {}

    for kind in norms:
        reg = regularizer_for(cfg, domain, kind)
        b = seen_regs.get(reg.name)
        if b is None:
            b = max_realized_loss(transcript, reg)
            seen_regs[reg.name] = b
            rows.append(
                row("cal_bregman", calibration_error(transcript, BregmanDistance(reg)),
                    reg_name=reg.name, b=b)
            )
            rows.append(
                row("swap_bregman_labeled",
                    swap_regret_bregman(transcript, reg, labeled=True),
                    reg_name=reg.name, b=b)
            )
        cal = calibration_error(transcript, NormDistance(kind))
        cal_sq = calibration_error(transcript, SquaredNormDistance(kind))
        rows.append(row("cal", cal, norm=kind.value, reg_name=reg.name, b=b))
        rows.append(row("cal_sq", cal_sq, norm=kind.value, reg_name=reg.name, b=b))
        rows.append(
            row("cal_labeled",
                calibration_error(transcript, NormDistance(kind), labeled=True),
                norm=kind.value, reg_name=reg.name, b=b)
        )
        rows.append(
            row("cal_sq_labeled",
                calibration_error(transcript, SquaredNormDistance(kind), labeled=True),
                norm=kind.value, reg_name=reg.name, b=b)
        )
        cauchy_lhs = (cal / inner_T) ** 2
        cauchy_rhs = cal_sq / inner_T
        rows.append(
            row("cauchy", cauchy_lhs, norm=kind.value, reg_name=reg.name, b=b,
                bound=cauchy_rhs, ok=cauchy_lhs <= cauchy_rhs + 1e-9)
        )
        diam = domain.diameter(kind)
        if cfg.algorithm in ("treecal", "treeswap-ftl", "sample-treecal"):
            bound = 6.0 * b * inner_T / cfg.L + 2.0 * diam**2 * inner_T / cfg.H
            rows.append(
                row("cal_sq_bound", cal_sq, norm=kind.value, reg_name=reg.name, b=b,
                    bound=bound, ok=cal_sq <= bound + 1e-9)
            )
            strict = 6.0 * b * inner_T / cfg.L + 2.0 * diam**2 * inner_T / cfg.H**2
            rows.append(
                row("cal_sq_bound_strict", cal_sq, norm=kind.value, reg_name=reg.name,
                    b=b, bound=strict, ok=cal_sq <= strict + 1e-9)
            )
        if cfg.algorithm == "treeswap-btl":
            labeled_swap = swap_regret_bregman(transcript, reg, labeled=True)
            bound = 3.0 * b * inner_T / cfg.L  # clairvoyant regret term vanishes
            rows.append(
                row("btl_swap_bound", labeled_swap, norm=kind.value, reg_name=reg.name,
                    b=b, bound=bound, ok=labeled_swap <= bound + 1e-6)
            )
            worst = max(node_external_regret(reg, record) for record in nodes)
            rows.append(
                row("btl_node_regret_max", worst, norm=kind.value, reg_name=reg.name,
                    b=b, bound=0.0, ok=worst <= 1e-9)
            )
            move_bound = 2.0 * diam**2
            rows.append(
                row("btl_movement_max", movement[kind], norm=kind.value,
                    reg_name=reg.name, b=b, bound=move_bound,
                    ok=movement[kind] <= move_bound + 1e-9)
            )
        if pure is not None:
            pcal = pure_calibration_error(pure, NormDistance(kind))
            rows.append(row("purecal", pcal, norm=kind.value, reg_name=reg.name, b=b))
            rows.append(
                row("purecal_sq",
                    pure_calibration_error(pure, SquaredNormDistance(kind)),
                    norm=kind.value, reg_name=reg.name, b=b)
            )
            gap = abs(pcal / pure.T - cal / inner_T)
            rows.append(
                row("pure_gap", gap, norm=kind.value, reg_name=reg.name, b=b)
            )
    return rows


def _movement_by_norm(ftl_nodes, btl_nodes, norms) -> dict[Norm, float]:
    btl_by_key = {(r.level, r.prefix): r for r in btl_nodes}
    out = {kind: 0.0 for kind in norms}
    for record in ftl_nodes:
        partner = btl_by_key[(record.level, record.prefix)]
        for kind in norms:
            gap = sum(
                norm_value(a - b, kind) ** 2
                for a, b in zip(record.actions, partner.actions)
            )
            out[kind] = max(out[kind], gap)
    return out


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------

SWEEP_AXES = ("H", "L", "T", "d")


def parse_sweep_axes(mapping: dict[str, str]) -> dict[str, list[int]]:
    axes: dict[str, list[int]] = {}
    for axis in SWEEP_AXES:
        key = f"sweep_{axis}"
        if key in mapping and mapping[key].strip():
            axes[axis] = [int(v) for v in mapping[key].split(",") if v.strip()]
    if "seeds" in mapping and mapping["seeds"].strip():
        axes["seed"] = [int(v) for v in mapping["seeds"].split(",") if v.strip()]
    return axes


def run_sweep(base: RunConfig, axes: dict[str, list[int]]) -> list[ReportRow]:
    """Cartesian product over the axes, lexicographic (H, L, T, d, seed).

    Invalid grid points are skipped with a logged reason rather than
    aborting the sweep.
    """
    names = [axis for axis in (*SWEEP_AXES, "seed") if axis in axes]
    if not names:
        return run_experiment(base)
    rows: list[ReportRow] = []
    for values in itertools.product(*(axes[name] for name in names)):
        cfg = replace(base, **dict(zip(names, values)))
        try:
            rows.extend(run_experiment(cfg))
        except ConfigError as exc:
            point = ", ".join(f"{n}={v}" for n, v in zip(names, values))
            logger.warning("skipping grid point (%s): %s", point, exc)
    return rows


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    return repr(value) if isinstance(value, float) else str(value)


def rows_to_csv(rows: list[ReportRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        writer.writerow([_cell(getattr(r, col)) for col in CSV_COLUMNS])
    return buf.getvalue()


def rows_to_json(rows: list[ReportRow]) -> str:
    return json.dumps(
        [{col: getattr(r, col) for col in CSV_COLUMNS} for r in rows], indent=2
    ) + "\n"


def write_rows(rows: list[ReportRow], path: str, fmt: str = "csv") -> None:
    if fmt not in ("csv", "json"):
        raise ConfigError(f"unknown output format {fmt!r}")
    text = rows_to_csv(rows) if fmt == "csv" else rows_to_json(rows)
    with open(path, "w", encoding="utf-8") as fp:
        fp.write(text)


def stable_row_key(row: ReportRow) -> tuple:
    """All columns that must be bit-identical across reruns (wall time is not)."""
    return tuple(getattr(row, col) for col in CSV_COLUMNS if col != "wall_ms")
