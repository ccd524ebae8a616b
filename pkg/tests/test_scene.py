"""Scene containers, validation, enclosing balls, and serialization."""

import json

import numpy as np
import pytest

import medaxis as mx


def two_site_scene():
    return mx.SiteScene(sites=np.array([[-1.0, 0.0], [1.0, 0.0]]),
                        bounding_radius=10.0)


class TestSceneValidation:
    def test_accepts_plain_lists(self):
        scene = mx.SiteScene(sites=[[0.0, 1.0], [2.0, 3.0]], bounding_radius=5.0)
        assert scene.sites.shape == (2, 2)
        assert scene.dim == 2

    def test_rejects_empty_sites(self):
        with pytest.raises(mx.InvalidSceneError):
            mx.SiteScene(sites=np.empty((0, 2)), bounding_radius=5.0)

    def test_rejects_one_dimensional_sites(self):
        with pytest.raises(mx.InvalidSceneError):
            mx.SiteScene(sites=np.array([[1.0], [2.0]]), bounding_radius=5.0)

    def test_rejects_site_outside_ball(self):
        with pytest.raises(mx.InvalidSceneError):
            mx.SiteScene(sites=np.array([[11.0, 0.0]]), bounding_radius=10.0)

    def test_rejects_site_on_boundary(self):
        with pytest.raises(mx.InvalidSceneError):
            mx.SiteScene(sites=np.array([[10.0, 0.0]]), bounding_radius=10.0)

    def test_rejects_duplicate_sites(self):
        with pytest.raises(mx.InvalidSceneError):
            mx.SiteScene(sites=np.array([[0.0, 0.0], [0.0, 0.0]]),
                         bounding_radius=10.0)

    def test_rejects_nonfinite_coordinates(self):
        with pytest.raises(mx.InvalidSceneError):
            mx.SiteScene(sites=np.array([[0.0, np.nan]]), bounding_radius=10.0)

    def test_rejects_nonpositive_radius(self):
        with pytest.raises(mx.InvalidSceneError):
            mx.SiteScene(sites=np.array([[0.0, 0.0]]), bounding_radius=0.0)

    def test_three_dimensional_sites_allowed(self):
        scene = mx.SiteScene(sites=np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]),
                             bounding_radius=4.0)
        assert scene.dim == 3


class TestSmallestEnclosingBall:
    def test_single_point(self):
        ball = mx.smallest_enclosing_ball(np.array([[1.0, 2.0]]))
        assert np.allclose(ball.center, [1.0, 2.0])
        assert ball.radius == 0.0

    def test_two_points_diametral(self):
        ball = mx.smallest_enclosing_ball(np.array([[0.0, 0.0], [4.0, 0.0]]))
        assert np.allclose(ball.center, [2.0, 0.0])
        assert abs(ball.radius - 2.0) < 1e-12

    def test_obtuse_triangle_uses_longest_edge(self):
        pts = np.array([[0.0, 0.0], [4.0, 0.0], [2.0, 0.5]])
        ball = mx.smallest_enclosing_ball(pts)
        assert np.allclose(ball.center, [2.0, 0.0], atol=1e-12)
        assert abs(ball.radius - 2.0) < 1e-12

    def test_equilateral_triangle_circumball(self):
        pts = np.array([[0.0, 0.0], [2.0, 0.0], [1.0, np.sqrt(3.0)]])
        ball = mx.smallest_enclosing_ball(pts)
        assert np.allclose(ball.center, [1.0, 1.0 / np.sqrt(3.0)], atol=1e-9)
        assert abs(ball.radius - 2.0 / np.sqrt(3.0)) < 1e-9

    def test_all_points_inside(self):
        rng = np.random.default_rng(11)
        pts = rng.normal(size=(40, 3))
        ball = mx.smallest_enclosing_ball(pts)
        dists = np.linalg.norm(pts - ball.center, axis=1)
        assert dists.max() <= ball.radius * (1.0 + 1e-9) + 1e-12


class TestWallWitness:
    def test_radial_projection(self):
        scene = two_site_scene()
        w = mx.wall_witness(scene, np.array([0.0, 2.0]))
        assert np.allclose(w, [0.0, 10.0], atol=1e-12)

    def test_witness_is_on_sphere(self):
        scene = two_site_scene()
        rng = np.random.default_rng(3)
        for x in rng.normal(size=(20, 2)):
            w = mx.wall_witness(scene, x)
            assert abs(np.linalg.norm(w) - 10.0) < 1e-9


class TestRandomScene:
    def test_counts_and_margin(self):
        scene = mx.random_scene(12, bounding_radius=6.0, seed=5)
        assert len(scene.sites) == 12
        assert np.linalg.norm(scene.sites, axis=1).max() <= 0.85 * 6.0 + 1e-12

    def test_min_separation_enforced(self):
        scene = mx.random_scene(12, bounding_radius=6.0, seed=5, min_separation=1.0)
        d = np.linalg.norm(scene.sites[:, None, :] - scene.sites[None, :, :], axis=2)
        np.fill_diagonal(d, np.inf)
        assert d.min() >= 1.0

    def test_seed_reproducible(self):
        a = mx.random_scene(8, seed=42)
        b = mx.random_scene(8, seed=42)
        assert np.array_equal(a.sites, b.sites)

    def test_three_dimensional_variant(self):
        scene = mx.random_scene(6, seed=1, dim=3)
        assert scene.sites.shape == (6, 3)


class TestSerialization:
    def test_json_round_trip(self):
        scene = mx.random_scene(9, seed=13)
        text = mx.scene_to_json(scene)
        back = mx.scene_from_json(text)
        assert np.array_equal(scene.sites, back.sites)
        assert back.bounding_radius == scene.bounding_radius

    def test_json_is_stable(self):
        scene = two_site_scene()
        assert mx.scene_to_json(scene) == mx.scene_to_json(scene)

    def test_file_round_trip(self, tmp_path):
        scene = mx.random_scene(5, seed=2)
        path = tmp_path / "scene.json"
        mx.save_scene(scene, path)
        back = mx.load_scene(path)
        assert np.array_equal(scene.sites, back.sites)

    def test_rejects_malformed_payload(self):
        with pytest.raises((mx.InvalidSceneError, KeyError, json.JSONDecodeError)):
            mx.scene_from_json("{\"sites\": []}")
