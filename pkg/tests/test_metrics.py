"""Hausdorff and intrinsic comparisons between filtered axes, plus the
closed-form constant formulary."""

import math

import numpy as np
import pytest

import medaxis as mx


def two_site_scene():
    return mx.SiteScene(sites=np.array([[-1.0, 0.0], [1.0, 0.0]]),
                        bounding_radius=10.0)


def two_site_axes():
    sk = mx.build_skeleton(two_site_scene())
    return mx.filter_axis(sk, 0.70, 0.5), mx.filter_axis(sk, 0.75, 0.5)


class TestHausdorff:
    def test_nested_direction_is_exactly_zero(self):
        loose, tight = two_site_axes()
        assert mx.directed_hausdorff(tight, loose, resolution=0.01) == 0.0

    def test_two_site_gap_value(self):
        loose, tight = two_site_axes()
        expect = math.sqrt(3.0) - 4.0 / 3.0
        d = mx.hausdorff_distance(loose, tight, resolution=0.01)
        assert abs(d - expect) <= 0.01

    def test_symmetric(self):
        loose, tight = two_site_axes()
        d1 = mx.hausdorff_distance(loose, tight, resolution=0.01)
        d2 = mx.hausdorff_distance(tight, loose, resolution=0.01)
        assert d1 == pytest.approx(d2, abs=1e-12)

    def test_identical_axes_at_zero(self):
        loose, _ = two_site_axes()
        assert mx.hausdorff_distance(loose, loose, resolution=0.01) == 0.0


class TestSampling:
    def test_spacing_controls_gaps(self):
        loose, _ = two_site_axes()
        pts = mx.sample_axis_points(loose, spacing=0.05)
        # each branch is a vertical segment; successive samples stay close
        for sign in (-1.0, 1.0):
            branch = np.sort(pts[np.sign(pts[:, 1]) == sign][:, 1])
            assert np.diff(branch).max() <= 0.05 + 1e-12

    def test_isolated_points_included(self):
        sk = mx.build_skeleton(two_site_scene())
        ax = mx.filter_axis(sk, 1.2, 0.5)
        pts = mx.sample_axis_points(ax, spacing=0.05)
        assert len(pts) == 2
        assert np.allclose(np.abs(pts[:, 1]), 4.95, atol=1e-9)


class TestGeodesics:
    def test_connected_axis_diameter_is_its_length(self):
        sk = mx.build_skeleton(two_site_scene())
        ax = mx.filter_axis(sk, 0.4, 0.5)   # full bisector survives
        graph = mx.build_geodesic_graph(ax, resolution=0.02)
        diam = mx.geodesic_diameter(graph)
        assert diam == pytest.approx(9.9, abs=0.05)

    def test_disconnected_axis_has_infinite_diameter(self):
        _, tight = two_site_axes()
        graph = mx.build_geodesic_graph(tight, resolution=0.02)
        assert math.isinf(mx.geodesic_diameter(graph))

    def test_path_on_a_segment_is_straight(self):
        sk = mx.build_skeleton(two_site_scene())
        ax = mx.filter_axis(sk, 0.4, 0.5)
        graph = mx.build_geodesic_graph(ax, resolution=0.02)
        length, path = mx.geodesic(graph, np.array([0.0, -2.0]), np.array([0.0, 3.0]))
        assert length == pytest.approx(5.0, abs=0.05)
        assert len(path) > 2

    def test_disconnected_endpoints_give_inf(self):
        _, tight = two_site_axes()
        graph = mx.build_geodesic_graph(tight, resolution=0.02)
        length, path = mx.geodesic(graph, np.array([0.0, -2.5]), np.array([0.0, 2.5]))
        assert math.isinf(length)
        assert len(path) == 0


class TestDistortion:
    def test_self_distortion_bounded_by_radius(self):
        loose, _ = two_site_axes()
        res = 0.01
        distortion, corr = mx.gh_distortion(loose, loose, radius=res,
                                            resolution=res, seed=0)
        assert distortion <= 2.0 * res
        assert corr.n_pairs > 0

    def test_radius_below_gap_is_not_surjective(self):
        loose, tight = two_site_axes()
        with pytest.raises(mx.SurjectivityError):
            mx.gh_distortion(loose, tight, radius=1e-4, resolution=0.01, seed=0)

    def test_small_graphs_enumerate_all_pairs(self):
        sk = mx.build_skeleton(two_site_scene())
        ax = mx.filter_axis(sk, 1.2, 0.5)   # two isolated points
        distortion, corr = mx.gh_distortion(ax, ax, radius=0.01,
                                            resolution=0.01, seed=0)
        assert corr.exhaustive
        assert distortion == 0.0

    def test_deterministic_in_seed(self):
        loose, tight = two_site_axes()
        d1, _ = mx.gh_distortion(loose, tight, radius=0.5, resolution=0.01, seed=5)
        d2, _ = mx.gh_distortion(loose, tight, radius=0.5, resolution=0.01, seed=5)
        assert d1 == d2


def summary_fixture():
    return mx.ReachSummary(mu=0.5, alpha=0.25, lam=0.5, r_mu_alpha=1.0,
                           wfs=1.0, r_max=5.05, mu_tilde=0.5)


class TestStabilityConstants:
    def test_flow_time_and_holder_forms(self):
        s = summary_fixture()
        cons = mx.stability_constants(s, delta=0.1, epsilon=1e-3)
        r, a, l, mt, d = s.r_max, s.alpha, s.lam, s.mu_tilde, 0.1
        assert cons.t_lambda == pytest.approx(r * r * d / (a * l * mt * mt))
        assert cons.t_alpha == pytest.approx(r * d / (a * mt * mt))
        assert cons.c == pytest.approx((22.0 / 3.0) * r * r / (a ** 0.5 * mt ** 1.5 * l))
        assert cons.hausdorff_bound == pytest.approx(cons.c * math.sqrt(1e-3))
        assert cons.entry_bound == pytest.approx(
            8.0 * r * r * 1e-3 / ((2.0 * l - d) * d * mt))

    def test_gh_bound_is_sum_of_three_terms(self):
        s = summary_fixture()
        cons = mx.stability_constants(s, delta=0.1, epsilon=1e-3,
                                      gdiam_a=4.0, gdiam_b=3.0)
        assert cons.gh_bound == pytest.approx(
            cons.gh_term_flow + cons.gh_term_near + cons.gh_term_diam)
        assert cons.gh_term_flow == pytest.approx(2.0 * cons.c ** 1.5 * 1e-3 ** 0.25)
        assert cons.diam_used == 4.0

    def test_undefined_mu_tilde_disables_bounds(self):
        s = mx.ReachSummary(mu=0.5, alpha=0.25, lam=0.5, r_mu_alpha=float("nan"),
                            wfs=float("nan"), r_max=5.05, mu_tilde=float("nan"))
        cons = mx.stability_constants(s, delta=0.1, epsilon=1e-3)
        assert not cons.hypothesis_flags["mu-tilde-defined"]
        assert math.isnan(cons.hausdorff_bound)
        assert not cons.hypothesis_flags["perturb-epsilon-small"]

    def test_huge_exponents_saturate_instead_of_raising(self):
        s = mx.ReachSummary(mu=0.01, alpha=1e-3, lam=0.01, r_mu_alpha=20.0,
                            wfs=20.0, r_max=100.0, mu_tilde=0.01)
        cons = mx.stability_constants(s, delta=0.005, epsilon=1e-3,
                                      gdiam_a=10.0, r_bound=100.0)
        assert math.isinf(cons.gh_bound)
        assert math.isinf(cons.gdiam_bound)

    def test_reach_hypothesis_flag(self):
        s = summary_fixture()
        cons = mx.stability_constants(s, delta=0.1, epsilon=1e-3)
        # r_mu_alpha = 1.0 > alpha + lam = 0.75
        assert cons.hypothesis_flags["reach-exceeds-filter"]
        tight = mx.ReachSummary(mu=0.5, alpha=0.25, lam=0.5, r_mu_alpha=0.7,
                                wfs=0.7, r_max=5.05, mu_tilde=0.5)
        cons2 = mx.stability_constants(tight, delta=0.1, epsilon=1e-3)
        assert not cons2.hypothesis_flags["reach-exceeds-filter"]
