import itertools

import numpy as np
import pytest

from treecal import (
    BoundsError,
    Box,
    ConfigError,
    L1Ball,
    L2Ball,
    Norm,
    Simplex,
    digits_base_h,
    dual_norm,
    interval_of,
    norm_value,
    round_from_digits,
)

from conftest import small_domains


class TestNorms:
    def test_zero_vector(self):
        for kind in Norm:
            assert norm_value((0.0, 0.0, 0.0), kind) == 0.0

    def test_unit_coordinate(self):
        for kind in Norm:
            assert norm_value((1.0, 0.0), kind) == 1.0

    def test_three_four_five(self):
        assert norm_value((0.3, -0.4), Norm.L2) == pytest.approx(0.5, abs=1e-15)

    def test_duality_involution(self):
        assert dual_norm(Norm.L1) is Norm.LINF
        assert dual_norm(Norm.L2) is Norm.L2
        for kind in Norm:
            assert dual_norm(dual_norm(kind)) is kind

    def test_triangle_and_homogeneity(self, rng):
        for _ in range(200):
            u = rng.normal(size=4)
            v = rng.normal(size=4)
            c = rng.normal()
            for kind in Norm:
                assert norm_value(u + v, kind) <= norm_value(u, kind) + norm_value(v, kind) + 1e-12
                assert abs(norm_value(c * u, kind) - abs(c) * norm_value(u, kind)) <= 1e-12


class TestDomains:
    def test_base_points(self):
        np.testing.assert_allclose(Simplex(3).base_point(), [1 / 3] * 3)
        np.testing.assert_array_equal(L2Ball(2, 1.0).base_point(), [0.0, 0.0])
        np.testing.assert_array_equal(Box(2, 0.0, 1.0).base_point(), [0.5, 0.5])

    def test_base_point_is_member(self):
        for domain in small_domains():
            assert domain.contains(domain.base_point())

    def test_simplex_membership_tolerances(self):
        s = Simplex(2)
        assert s.contains([0.5, 0.5 + 5e-10])  # sum drift within tolerance
        assert not s.contains([0.5, 0.6])
        assert s.contains([1.0 + 1e-13, -1e-13])
        assert not s.contains([1.1, -0.1])

    def test_diameter_closed_forms(self):
        assert Simplex(4).diameter(Norm.L1) == 2.0
        assert L2Ball(3, 1.0).diameter(Norm.L2) == 2.0
        assert Box(2, 0.0, 1.0).diameter(Norm.L1) == 2.0
        assert Simplex(1).diameter(Norm.L2) == 0.0

    def test_box_l1_diameter_matches_corner_enumeration(self):
        box = Box(2, 0.0, 1.0)
        corners = box.vertices()
        brute = max(
            norm_value(a - b, Norm.L1) for a in corners for b in corners
        )
        assert box.diameter(Norm.L1) == brute == 2.0

    def test_diameter_dominates_sampled_pairs(self, rng):
        for domain in small_domains():
            pts = np.stack([domain.sample(rng) for _ in range(200)])
            for kind in Norm:
                diam = domain.diameter(kind)
                for a, b in zip(pts[:-1], pts[1:]):
                    assert norm_value(a - b, kind) <= diam + 1e-9

    def test_samples_are_members(self, rng):
        for domain in small_domains():
            for _ in range(200):
                assert domain.contains(domain.sample(rng))

    def test_central_symmetry_flags(self):
        assert L2Ball(2).centrally_symmetric
        assert L1Ball(2).centrally_symmetric
        assert Box(2, -1.0, 1.0).centrally_symmetric
        assert not Box(2, 0.0, 1.0).centrally_symmetric
        assert not Simplex(2).centrally_symmetric

    def test_vertices_are_members(self):
        for domain in small_domains():
            for v in domain.vertices():
                assert domain.contains(v)

    def test_grid_members(self):
        for domain in [Simplex(3), Box(2, 0.0, 1.0), L1Ball(2, 1.0)]:
            grid = domain.grid(0.1)
            assert len(grid) > 0
            for q in grid:
                assert domain.contains(q)

    def test_invalid_construction(self):
        with pytest.raises(ConfigError):
            Simplex(0)
        with pytest.raises(ConfigError):
            Box(2, 1.0, 0.0)


class TestTreeIndexing:
    def test_first_and_last_round(self):
        assert digits_base_h(1, 3, 3) == (0, 0, 0)
        assert digits_base_h(27, 3, 3) == (2, 2, 2)

    def test_mid_round(self):
        assert digits_base_h(5, 2, 3) == (1, 0, 0)  # 4 = 1*4 + 0*2 + 0

    def test_roundtrip_identity_exhaustive(self):
        for H, L in itertools.product((2, 3, 4), (1, 2, 3)):
            for t in range(1, H**L + 1):
                assert round_from_digits(digits_base_h(t, H, L), H) == t

    def test_out_of_range(self):
        with pytest.raises(BoundsError):
            digits_base_h(0, 2, 2)
        with pytest.raises(BoundsError):
            digits_base_h(5, 2, 2)

    def test_root_interval(self):
        assert interval_of((), 3, 3) == (1, 27)

    def test_first_child_spans(self):
        assert interval_of((0,), 3, 3) == (1, 9)

    def test_offset_arithmetic(self):
        # start - 1 = (1*9 + 2*3)
        assert interval_of((1, 2), 3, 3) == (16, 18)

    def test_children_partition_parent(self):
        for H, L in itertools.product((2, 3, 4), (2, 3)):
            for level in range(L):
                for prefix in itertools.product(range(H), repeat=level):
                    start, end = interval_of(prefix, H, L)
                    covered = []
                    prev_end = start - 1
                    for h in range(H):
                        cs, ce = interval_of(prefix + (h,), H, L)
                        assert cs == prev_end + 1  # ordered, adjacent
                        prev_end = ce
                        covered.extend(range(cs, ce + 1))
                    assert covered == list(range(start, end + 1))

    def test_membership_matches_prefix(self):
        for H, L in [(2, 4), (3, 3), (4, 2)]:
            for t in range(1, H**L + 1):
                digits = digits_base_h(t, H, L)
                for level in range(L + 1):
                    for prefix in itertools.product(range(H), repeat=level):
                        start, end = interval_of(prefix, H, L)
                        assert (start <= t <= end) == (digits[:level] == prefix)

    def test_invalid_digit(self):
        with pytest.raises(BoundsError):
            interval_of((3,), 3, 3)
