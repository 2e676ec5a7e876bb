"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines.  Tolerances are fixed here, not calibrated at runtime.
"""

import itertools
import math
import time

import numpy as np
import pytest

from treecal import (
    BeTheLeader,
    Box,
    FarthestVertex,
    FollowTheLeader,
    IidDirichlet,
    IidVertices,
    Norm,
    NormDistance,
    Simplex,
    SquaredNormDistance,
    TreeCal,
    VertexCycle,
    bregman,
    calibrated_to_swap,
    calibration_error,
    embed_l1ball_to_simplex,
    euclidean,
    finite_menu,
    materialize,
    max_realized_loss,
    mixture_minimizer,
    negative_entropy,
    node_external_regret,
    norm_value,
    project_simplex_to_l1ball,
    project_transcript_to_l1ball,
    pure_calibration_error,
    sample_treecal_run,
    swap_regret_bregman,
    treeswap_run,
)
from treecal.geometry import L1Ball
from treecal.metrics import Forecast, Transcript

#: all transcripts produced while the suite runs; criterion 7 sweeps them
PRODUCED_TRANSCRIPTS: list[Transcript] = []


def _register(tr: Transcript) -> Transcript:
    PRODUCED_TRANSCRIPTS.append(tr)
    return tr


def _report(number: int, description: str, ok: bool, detail: str = ""):
    status = "PASS" if ok else "FAIL"
    tail = f" ({detail})" if detail else ""
    print(f"ACCEPTANCE {number:02d} {status}: {description}{tail}")
    assert ok, f"criterion {number}: {description}{tail}"


def _run_treecal_on_stream(domain, T, H, L, stream):
    engine = TreeCal(domain, T, H, L)
    forecasts = []
    for t in range(1, T + 1):
        forecasts.append(engine.forecast(t))
        engine.observe(t, stream[t - 1])
    return _register(Transcript(domain, tuple(forecasts), np.asarray(stream, dtype=float)))


def _random_stream(domain, T, rng, treecal_params=None):
    """Mixed adversary pool; adaptive streams are realized against TreeCal."""
    choice = int(rng.integers(4))
    if choice == 0:
        return materialize(VertexCycle(domain), T)
    if choice == 1:
        return materialize(IidVertices(domain, rng), T)
    if choice == 2 and isinstance(domain, Simplex):
        return materialize(IidDirichlet(domain, rng), T)
    H, L = treecal_params
    return TreeCal(domain, T, H, L).run(FarthestVertex(domain)).outcomes


def test_criterion_01_equivalence():
    """Tree forecaster and meta-algorithm with follow-the-leader coincide."""
    rng = np.random.default_rng(101)
    domains = [Simplex(2), Simplex(3), Simplex(4), Simplex(5), Box(2, 0.0, 1.0), Box(3, 0.0, 1.0)]
    started = time.perf_counter()
    worst = 0.0
    for trial in range(200):
        H = int(rng.integers(2, 5))
        L = int(rng.integers(2, 5))
        T = int(rng.integers(H ** (L - 1), H**L + 1))
        domain = domains[trial % len(domains)]
        stream = _random_stream(domain, T, rng, treecal_params=(H, L))
        cal_tr = _run_treecal_on_stream(domain, T, H, L, stream)
        swap_tr = treeswap_run(
            domain, T, H, L,
            lambda: FollowTheLeader(domain.base_point()),
            outcomes=stream,
        ).transcript
        for f1, f2 in zip(cal_tr.forecasts, swap_tr.forecasts):
            assert f1.labels == f2.labels
            assert np.array_equal(f1.weights, f2.weights)
            worst = max(worst, float(np.max(np.abs(f1.points - f2.points))))
        assert worst <= 1e-12
    elapsed = time.perf_counter() - started
    _report(
        1,
        "TreeCal == TreeSwap.FTL over 200 random configs",
        worst <= 1e-12 and elapsed < 30.0,
        f"max point gap {worst:.2e}, {elapsed:.1f}s",
    )


def test_criterion_02_proper_scoring_identity():
    """Three-term mixture decomposition and the grid argmin oracle."""
    rng = np.random.default_rng(102)
    simplex = Simplex(3)
    worst = 0.0
    for trial in range(1000):
        reg = euclidean() if trial % 2 == 0 else negative_entropy(simplex)
        m = int(rng.integers(1, 6))
        points = np.stack([simplex.sample(rng) for _ in range(m)])
        w = rng.dirichlet(np.ones(m))
        mean, gap = mixture_minimizer(points, w, reg)
        probe = simplex.sample(rng)
        lhs = math.fsum(wi * bregman(reg, yi, probe) for wi, yi in zip(w, points))
        rhs = bregman(reg, mean, probe) + gap
        worst = max(worst, abs(lhs - rhs))
        assert gap >= -1e-9

    # d = 2 grid oracle, step 0.05: the mixture objective and the
    # divergence-to-the-mean pick the same grid minimizer; for the euclidean
    # case that point is also the euclidean-nearest grid point to the mean
    grid_ok = True
    box = Box(2, 0.0, 1.0)
    simplex2 = Simplex(2)
    for trial in range(50):
        for reg, domain in ((euclidean(), box), (negative_entropy(simplex2), simplex2)):
            grid = domain.grid(0.05)
            points = np.stack([domain.sample(rng) for _ in range(4)])
            w = rng.dirichlet(np.ones(4))
            mean, _ = mixture_minimizer(points, w, reg)
            mixture_losses = np.array(
                [
                    math.fsum(wi * bregman(reg, yi, q) for wi, yi in zip(w, points))
                    for q in grid
                ]
            )
            mean_losses = np.array([bregman(reg, mean, q) for q in grid])
            via_mixture = int(np.argmin(mixture_losses))
            via_mean = int(np.argmin(mean_losses))
            if via_mixture != via_mean:
                grid_ok = False
            if reg.name == "euclidean":
                nearest = int(np.argmin(np.sum((grid - mean) ** 2, axis=1)))
                if via_mixture != nearest:
                    grid_ok = False
    _report(
        2,
        "proper-scoring decomposition within 1e-9 over 1000 mixtures + grid oracle",
        worst <= 1e-9 and grid_ok,
        f"max identity gap {worst:.2e}",
    )


def test_criterion_03_swap_equals_calibration():
    """Closed form vs brute-force audit on 100 small transcripts."""
    rng = np.random.default_rng(103)
    domains = [Simplex(2), Simplex(3), Box(2, 0.0, 1.0)]
    audited = 0
    for trial in range(100):
        domain = domains[trial % len(domains)]
        T = int(rng.integers(2, 9))
        labeled = trial % 2 == 0
        forecasts = []
        for _ in range(T):
            k = int(rng.integers(1, 4))
            points = np.stack([domain.sample(rng) for _ in range(k)])
            weights = rng.random(k) + 0.1
            weights /= weights.sum()
            labels = tuple((int(i),) for i in rng.permutation(8)[:k]) if labeled else None
            forecasts.append(Forecast(points, weights, labels))
        outcomes = np.stack([domain.sample(rng) for _ in range(T)])
        tr = _register(Transcript(domain, tuple(forecasts), outcomes))
        regs = [euclidean()]
        if isinstance(domain, Simplex):
            regs.append(negative_entropy(domain))
        for reg in regs:
            swap_regret_bregman(tr, reg, labeled=labeled, audit=True, tol=1e-9)
            audited += 1
    _report(3, "swap regret equals Bregman calibration (audited)", True, f"{audited} audits")


def _btl_configs(rng, count):
    out = []
    while len(out) < count:
        H = int(rng.integers(2, 5))
        L = int(rng.integers(2, 6))
        T = H**L
        if T > 4**5:
            continue
        out.append((H, L, T))
    return out


def test_criterion_04_btl_guarantees():
    """Clairvoyant runs: non-positive node regret and the 3bT/L swap bound."""
    rng = np.random.default_rng(104)
    worst_regret = -math.inf
    worst_margin = -math.inf
    for trial, (H, L, T) in enumerate(_btl_configs(rng, 50)):
        if trial % 3 == 2:
            domain = Box(2, 0.0, 1.0)
            stream = materialize(IidVertices(domain, rng), T)
            regs = [euclidean(domain)]
        else:
            domain = Simplex(int(rng.integers(2, 5)))
            stream = materialize(IidDirichlet(domain, rng), T)
            regs = [negative_entropy(domain), euclidean(domain)]
        run = treeswap_run(domain, T, H, L, BeTheLeader, outcomes=stream, record_nodes=True)
        _register(run.transcript)
        for reg in regs:
            node_worst = max(node_external_regret(reg, r) for r in run.nodes)
            worst_regret = max(worst_regret, node_worst)
            assert node_worst <= 1e-9
            value = swap_regret_bregman(run.transcript, reg, labeled=True)
            b = max_realized_loss(run.transcript, reg)
            margin = value - 3.0 * b * T / L
            worst_margin = max(worst_margin, margin)
            assert margin <= 1e-6
    _report(
        4,
        "BTL node regret <= 1e-9 and labeled swap regret <= 3bT/L over 50 runs",
        True,
        f"max node regret {worst_regret:.2e}, max bound margin {worst_margin:.3g}",
    )


def test_criterion_05_ftl_btl_proximity():
    """Per node, squared action movement is at most twice the squared diameter."""
    rng = np.random.default_rng(105)
    checked = 0
    for trial, (H, L, T) in enumerate(_btl_configs(rng, 25)):
        domain = Simplex(3) if trial % 2 == 0 else Box(2, 0.0, 1.0)
        if isinstance(domain, Simplex):
            stream = materialize(IidDirichlet(domain, rng), T)
        else:
            stream = materialize(IidVertices(domain, rng), T)
        ftl = treeswap_run(
            domain, T, H, L,
            lambda: FollowTheLeader(domain.base_point()),
            outcomes=stream, record_nodes=True,
        )
        btl = treeswap_run(domain, T, H, L, BeTheLeader, outcomes=stream, record_nodes=True)
        btl_by_key = {(r.level, r.prefix): r for r in btl.nodes}
        for record in ftl.nodes:
            partner = btl_by_key[(record.level, record.prefix)]
            for kind in (Norm.L1, Norm.L2):
                gap = sum(
                    norm_value(a - b, kind) ** 2
                    for a, b in zip(record.actions, partner.actions)
                )
                assert gap <= 2.0 * domain.diameter(kind) ** 2 + 1e-9
                checked += 1
    _report(5, "FTL-BTL movement <= 2 diam^2 per node (l1 and l2)", True, f"{checked} node checks")


def test_criterion_06_end_to_end_bound_and_trend():
    """Standard sweep: calibration bound on every run, error shrinks with depth."""
    domain = Simplex(3)
    H = 4
    per_round: dict[int, list[float]] = {}
    for L in (2, 3, 4, 5):
        T = H**L
        vals = []
        for seed in range(10):
            adv = IidDirichlet(domain, np.random.default_rng(np.random.SeedSequence([106, L, seed])))
            tr = _register(TreeCal(domain, T, H, L).run(adv))
            for kind, reg in ((Norm.L1, negative_entropy(domain)), (Norm.L2, euclidean(domain))):
                cal_sq = calibration_error(tr, SquaredNormDistance(kind))
                b = max_realized_loss(tr, reg)
                bound = 6.0 * b * T / L + 2.0 * domain.diameter(kind) ** 2 * T / H
                assert cal_sq <= bound + 1e-9, (L, seed, kind.value)
                if kind is Norm.L1:
                    vals.append(cal_sq / T)
        per_round[L] = vals
    means = {L: float(np.mean(v)) for L, v in per_round.items()}
    stds = {L: float(np.std(v)) for L, v in per_round.items()}
    trend_ok = all(
        means[b] <= means[a] + 2.0 * max(stds[a], stds[b])
        for a, b in zip((2, 3, 4), (3, 4, 5))
    )

    # runtime probe at the largest standard size
    big = Simplex(10)
    adv = IidDirichlet(big, np.random.default_rng(1060))
    started = time.perf_counter()
    TreeCal(big, 4**5, 4, 5).run(adv)
    elapsed = time.perf_counter() - started
    _report(
        6,
        "squared-norm bound holds on the standard sweep; per-round error non-increasing in L",
        trend_ok and elapsed < 1.0,
        f"per-round l1^2 means {[round(means[L], 4) for L in (2, 3, 4, 5)]}, T=1024 d=10 run {elapsed * 1000:.0f}ms",
    )


def test_criterion_07_cauchy_everywhere():
    """Norm vs squared-norm calibration relation on every produced transcript."""
    rng = np.random.default_rng(107)
    # a few extra transcripts so this criterion stands on its own
    for H, L in ((2, 3), (3, 2), (4, 2)):
        domain = Simplex(3)
        adv = IidDirichlet(domain, rng)
        _register(TreeCal(domain, H**L, H, L).run(adv))
    assert len(PRODUCED_TRANSCRIPTS) >= 3
    worst = -math.inf
    for tr in PRODUCED_TRANSCRIPTS:
        for kind in Norm:
            cal = calibration_error(tr, NormDistance(kind))
            cal_sq = calibration_error(tr, SquaredNormDistance(kind))
            gap = (cal / tr.T) ** 2 - cal_sq / tr.T
            worst = max(worst, gap)
            assert gap <= 1e-9
    _report(
        7,
        "(Cal/T)^2 <= Cal_sq/T on every transcript produced by the suite",
        True,
        f"{len(PRODUCED_TRANSCRIPTS)} transcripts, worst gap {worst:.2e}",
    )


def test_criterion_08_reduction_inequality():
    """Best-response play against calibrated forecasts: swap regret bound."""
    rng = np.random.default_rng(108)
    domain = Simplex(3)
    menu = finite_menu(list(itertools.product((0.0, 1.0), repeat=3)))
    worst = -math.inf
    for trial in range(20):
        H = int(rng.integers(2, 5))
        L = int(rng.integers(2, 4))
        T = H**L
        pick = trial % 3
        if pick == 0:
            outcomes = materialize(VertexCycle(domain), T)
        elif pick == 1:
            outcomes = materialize(IidVertices(domain, rng), T)
        else:
            outcomes = materialize(IidDirichlet(domain, rng), T)
        report = calibrated_to_swap(TreeCal(domain, T, H, L), menu, outcomes, kind=Norm.L1)
        _register(report.transcript)
        assert report.menu_diameter_dual == 1.0
        margin = report.swap_regret - report.bound
        worst = max(worst, margin)
        assert margin <= 1e-6
    _report(
        8,
        "FullSwapReg <= diam_inf(menu) * Cal_l1 with cube-vertex menus over 20 runs",
        True,
        f"worst margin {worst:.3g}",
    )


def test_criterion_09_embedding():
    """Round-trip identity and non-expansive pushforward of l1 calibration."""
    rng = np.random.default_rng(109)
    worst_rt = 0.0
    for _ in range(1000):
        d = int(rng.integers(1, 5))
        y = L1Ball(d, 1.0).sample(rng)
        back = project_simplex_to_l1ball(embed_l1ball_to_simplex(y))
        worst_rt = max(worst_rt, float(np.max(np.abs(back - y))))
    assert worst_rt <= 1e-15

    push_ok = True
    for trial in range(20):
        d = (1, 2, 3)[trial % 3]
        domain = Simplex(2 * d + 1)
        forecasts = []
        T = 8
        for _ in range(T):
            k = int(rng.integers(1, 4))
            points = np.stack([domain.sample(rng) for _ in range(k)])
            weights = rng.random(k) + 0.1
            weights /= weights.sum()
            forecasts.append(Forecast(points, weights))
        outcomes = np.stack([domain.sample(rng) for _ in range(T)])
        tr = _register(Transcript(domain, tuple(forecasts), outcomes))
        before = calibration_error(tr, NormDistance(Norm.L1))
        after = calibration_error(project_transcript_to_l1ball(tr), NormDistance(Norm.L1))
        if after > before + 1e-9:
            push_ok = False
    _report(
        9,
        "embedding round-trip within 1e-15; projection never increases l1 calibration",
        push_ok,
        f"max round-trip error {worst_rt:.2e}",
    )


def test_criterion_10_pure_calibration_trend():
    """Sampled predictions approach the distributional calibration as 1/sqrt(S)."""
    domain = Simplex(3)
    H, L, inner_T = 3, 3, 27
    sample_sizes = (16, 64, 256)
    gaps = {}
    for S in sample_sizes:
        vals = []
        for seed in range(50):
            ss = np.random.SeedSequence([110, S, seed])
            adv_seq, samp_seq = ss.spawn(2)
            adv = IidDirichlet(domain, np.random.default_rng(adv_seq))
            run = sample_treecal_run(
                domain, inner_T * S, H, L, S, adv, np.random.default_rng(samp_seq)
            )
            pure_rate = pure_calibration_error(run.pure, NormDistance(Norm.L1)) / run.pure.T
            dist_rate = calibration_error(run.inner, NormDistance(Norm.L1)) / run.inner.T
            vals.append(abs(pure_rate - dist_rate))
        gaps[S] = float(np.mean(vals))
    shrinks = gaps[256] < gaps[16]
    # fit gap(S) ~ C / sqrt(S) with C estimated from the runs themselves: the
    # rescaled values gap(S) * sqrt(S) should be flat (trend check only)
    rescaled = [gaps[S] * math.sqrt(S) for S in sample_sizes]
    fit_ok = max(rescaled) <= 3.0 * min(rescaled)
    c_est = float(np.mean(rescaled))
    _report(
        10,
        "pure-vs-distributional calibration gap shrinks like C/sqrt(S)",
        shrinks and fit_ok,
        f"gaps {[round(gaps[S], 4) for S in sample_sizes]}, C ~= {c_est:.3f}",
    )
