import numpy as np
import pytest

from treecal import (
    Box,
    ConfigError,
    Constant,
    DriftingMean,
    FarthestVertex,
    Forecast,
    IidDirichlet,
    IidVertices,
    Norm,
    ProtocolError,
    Simplex,
    TreeCal,
    VertexCycle,
    calibration_error,
    conditional_means,
    make_adversary,
    materialize,
    norm_value,
)

from conftest import small_domains


class TestObliviousStreams:
    def test_constant_repeats(self):
        domain = Simplex(3)
        adv = Constant(domain, y_star=[0.0, 1.0, 0.0])
        for t in (1, 5, 100):
            np.testing.assert_array_equal(adv.outcome(t), [0.0, 1.0, 0.0])

    def test_vertex_cycle_on_simplex(self):
        d = 4
        adv = VertexCycle(Simplex(d))
        for t in range(1, 3 * d + 1):
            expected = np.zeros(d)
            expected[(t - 1) % d] = 1.0
            np.testing.assert_array_equal(adv.outcome(t), expected)

    def test_vertex_cycle_period_bound(self):
        with pytest.raises(ConfigError):
            VertexCycle(Simplex(2), period=5)

    def test_drifting_mean_endpoints(self):
        domain = Box(2, 0.0, 1.0)
        adv = DriftingMean(domain, T=5, start=[0.0, 0.0], end=[1.0, 1.0])
        np.testing.assert_array_equal(adv.outcome(1), [0.0, 0.0])
        np.testing.assert_array_equal(adv.outcome(5), [1.0, 1.0])
        np.testing.assert_allclose(adv.outcome(3), [0.5, 0.5])

    def test_replay_determinism(self):
        domain = Simplex(3)
        streams = []
        for _ in range(2):
            rng = np.random.default_rng(99)
            adv = IidDirichlet(domain, rng, alpha=0.7)
            streams.append(materialize(adv, 50))
        np.testing.assert_array_equal(streams[0], streams[1])

    def test_membership_of_emitted_outcomes(self):
        for domain in small_domains():
            rng = np.random.default_rng(5)
            advs = [
                Constant(domain),
                VertexCycle(domain),
                IidVertices(domain, rng),
                DriftingMean(domain, T=200),
            ]
            if isinstance(domain, Simplex):
                advs.append(IidDirichlet(domain, rng))
            for adv in advs:
                for t in range(1, 201):
                    assert domain.contains(adv.outcome(t))


class TestAdaptive:
    def test_farthest_vertex_maximizes_l1_distance(self):
        domain = Simplex(3)
        adv = FarthestVertex(domain)
        forecast = Forecast.point_mass([0.6, 0.3, 0.1])
        got = adv.outcome(1, forecast=forecast)
        center = forecast.mean_point()
        dists = [norm_value(v - center, Norm.L1) for v in domain.vertices()]
        np.testing.assert_array_equal(got, domain.vertices()[int(np.argmax(dists))])
        np.testing.assert_array_equal(got, [0.0, 0.0, 1.0])

    def test_farthest_vertex_tie_breaks_low_index(self):
        domain = Simplex(2)
        adv = FarthestVertex(domain)
        forecast = Forecast.point_mass([0.5, 0.5])  # both vertices at distance 1
        np.testing.assert_array_equal(adv.outcome(1, forecast=forecast), [1.0, 0.0])

    def test_requires_forecast(self):
        adv = FarthestVertex(Simplex(2))
        with pytest.raises(ProtocolError):
            adv.outcome(1)

    def test_materialize_refuses_adaptive(self):
        with pytest.raises(ProtocolError):
            materialize(FarthestVertex(Simplex(2)), 4)


class TestRegistry:
    def test_unknown_name(self):
        with pytest.raises(ConfigError):
            make_adversary("nope", Simplex(2), 4, np.random.default_rng(0))

    def test_all_registered_names_build(self):
        domain = Simplex(3)
        rng = np.random.default_rng(1)
        for name in (
            "constant",
            "vertex-cycle",
            "iid-vertices",
            "iid-dirichlet",
            "drifting-mean",
            "farthest-vertex",
        ):
            adv = make_adversary(name, domain, 9, rng)
            f = Forecast.point_mass(domain.base_point())
            assert domain.contains(adv.outcome(1, forecast=f))


class TestConstantCalibratesExactly:
    def test_non_base_groups_contribute_zero(self):
        # under a constant vertex outcome, every assigned action beyond the
        # canonical point equals the vertex bit-for-bit, so only canonical
        # atoms carry calibration error
        domain = Simplex(3)
        y_star = np.array([0.0, 1.0, 0.0])
        H, L = 3, 3
        engine = TreeCal(domain, H**L, H, L)
        tr = engine.run(Constant(domain, y_star=y_star))
        base = domain.base_point()
        groups = conditional_means(tr, labeled=True)
        for stats in groups.values():
            if not np.array_equal(stats.point, base):
                np.testing.assert_array_equal(stats.point, y_star)
                np.testing.assert_array_equal(stats.nu, y_star)

    def test_unlabeled_error_is_base_only(self):
        domain = Simplex(2)
        y_star = np.array([1.0, 0.0])
        H, L = 2, 4
        engine = TreeCal(domain, H**L, H, L)
        tr = engine.run(Constant(domain, y_star=y_star))
        from treecal import NormDistance

        total = calibration_error(tr, NormDistance(Norm.L1))
        groups = conditional_means(tr)
        base_key = [k for k, g in groups.items() if np.array_equal(g.point, domain.base_point())]
        assert len(base_key) == 1
        g = groups[base_key[0]]
        assert total == pytest.approx(g.mass * np.abs(g.nu - g.point).sum(), abs=1e-15)
