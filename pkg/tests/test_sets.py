import numpy as np
import pytest

from penflow import Ball, Box, ConfigError, DomainError
from penflow.sets import TOL_ACTIVE, normal_residual, project, tangent_project


def random_box(rng, m):
    lo = rng.uniform(-2.0, 0.0, size=m)
    return Box(lo, lo + rng.uniform(0.5, 3.0, size=m))


def random_ball(rng, m):
    return Ball(rng.uniform(-1.0, 1.0, size=m), rng.uniform(0.5, 3.0))


def boundary_point(set_, rng):
    # projecting a far exterior point always lands on the boundary
    far = set_.project(rng.normal(size=set_.dim) * 50.0 + 50.0)
    assert set_.normal_residual(far) <= TOL_ACTIVE
    return far


class TestProjection:
    def test_box_clips_coordinatewise(self):
        box = Box(np.zeros(2), np.ones(2))
        np.testing.assert_array_equal(box.project([2.0, -1.0]), [1.0, 0.0])

    def test_ball_rescales_radially(self):
        ball = Ball(np.zeros(2), 1.0)
        np.testing.assert_allclose(ball.project([3.0, 4.0]), [0.6, 0.8], rtol=0, atol=1e-15)

    def test_member_is_fixed_point(self, rng):
        for m in (1, 2, 5):
            for set_ in (random_box(rng, m), random_ball(rng, m)):
                x = set_.sample(rng)
                np.testing.assert_array_equal(set_.project(x), x)

    def test_idempotent(self, rng):
        # boxes clip exactly; ball re-projection can rescale by 1 ulp
        for m in (1, 3, 7):
            box = random_box(rng, m)
            ball = random_ball(rng, m)
            for _ in range(20):
                y = box.project(rng.normal(size=m) * 10.0)
                np.testing.assert_array_equal(box.project(y), y)
                y = ball.project(rng.normal(size=m) * 10.0)
                np.testing.assert_allclose(ball.project(y), y, rtol=1e-15, atol=1e-15)

    def test_nonexpansive(self, rng):
        for m in (2, 4):
            for set_ in (random_box(rng, m), random_ball(rng, m)):
                for _ in range(200):
                    x = rng.normal(size=m) * 10.0
                    y = rng.normal(size=m) * 10.0
                    dp = np.linalg.norm(set_.project(x) - set_.project(y))
                    assert dp <= np.linalg.norm(x - y) + 1e-12

    def test_free_function_delegates(self):
        box = Box(np.zeros(2), np.ones(2))
        np.testing.assert_array_equal(project(box, [2.0, -1.0]), [1.0, 0.0])


class TestNormalResidual:
    def test_box_exterior_distance(self):
        box = Box(np.zeros(2), np.ones(2))
        assert box.normal_residual([2.0, 0.0]) == pytest.approx(1.0)

    def test_ball_exterior_distance(self):
        ball = Ball(np.zeros(2), 1.0)
        assert ball.normal_residual([0.0, 2.0]) == pytest.approx(1.0)

    def test_zero_iff_member(self, rng):
        for m in (1, 4):
            for set_ in (random_box(rng, m), random_ball(rng, m)):
                assert set_.normal_residual(set_.sample(rng)) == 0.0
                outside = set_.project(rng.normal(size=m)) + np.full(m, 10.0)
                r = normal_residual(set_, outside)
                assert r > 0.0
                assert not set_.contains(outside)


class TestTangentProjection:
    def test_interior_passthrough_is_exact(self, rng):
        for m in (2, 6):
            box = random_box(rng, m)
            ball = random_ball(rng, m)
            for set_, mid in ((box, 0.5 * (box.lower + box.upper)), (ball, ball.center)):
                assert set_.interior_margin(mid) > 0
                v = rng.normal(size=m) * 3.0
                np.testing.assert_array_equal(set_.tangent_project(mid, v), v)

    def test_ball_boundary_removes_outward_part(self):
        ball = Ball(np.zeros(2), 1.0)
        x = np.array([1.0, 0.0])
        np.testing.assert_allclose(ball.tangent_project(x, [1.0, 1.0]), [0.0, 1.0], atol=1e-15)

    def test_ball_boundary_keeps_inward_velocity(self):
        ball = Ball(np.zeros(2), 1.0)
        x = np.array([1.0, 0.0])
        v = np.array([-1.0, 1.0])
        np.testing.assert_array_equal(ball.tangent_project(x, v), v)

    def test_box_corner_zeroes_both_outward_components(self):
        box = Box(np.zeros(2), np.ones(2))
        out = tangent_project(box, np.array([1.0, 1.0]), np.array([2.0, 1.0]))
        np.testing.assert_array_equal(out, [0.0, 0.0])

    def test_box_coordinate_rule(self, rng):
        box = random_box(rng, 5)
        x = box.sample(rng)
        x[0] = box.lower[0]
        x[3] = box.upper[3]
        v = rng.normal(size=5)
        expected = v.copy()
        if v[0] < 0:
            expected[0] = 0.0
        if v[3] > 0:
            expected[3] = 0.0
        np.testing.assert_array_equal(box.tangent_project(x, v), expected)

    def test_infeasible_base_rejected(self):
        box = Box(np.zeros(2), np.ones(2))
        with pytest.raises(DomainError):
            box.tangent_project(np.array([2.0, 0.0]), np.ones(2))
        ball = Ball(np.zeros(2), 1.0)
        with pytest.raises(DomainError):
            ball.tangent_project(np.array([0.0, 2.0]), np.ones(2))

    def test_result_lies_in_tangent_cone(self, rng):
        # feasibility of x + eps*t for small eps certifies cone membership
        for m in (2, 4):
            for set_ in (random_box(rng, m), random_ball(rng, m)):
                for _ in range(25):
                    x = boundary_point(set_, rng)
                    t = set_.tangent_project(x, rng.normal(size=m) * 2.0)
                    eps = 1e-9 / (1.0 + np.linalg.norm(t))
                    assert set_.normal_residual(x + eps * t) <= 1e-13


def normal_cone_project_box(box, x, v):
    low_act, up_act = box.active_faces(x)
    n = np.zeros_like(v)
    n[up_act] = np.maximum(v[up_act], 0.0)
    n[low_act] = np.minimum(v[low_act], 0.0)
    return n


def normal_cone_project_ball(ball, x, v):
    normal = ball.boundary_normal(x)
    if normal is None:
        return np.zeros_like(v)
    return max(0.0, float(v @ normal)) * normal


class TestMoreauDecomposition:
    """Tangent projection must equal v minus the normal-cone projection."""

    def test_box(self, rng):
        for _ in range(50):
            box = random_box(rng, 4)
            x = boundary_point(box, rng)
            v = rng.normal(size=4) * 3.0
            t = box.tangent_project(x, v)
            n = normal_cone_project_box(box, x, v)
            np.testing.assert_allclose(t + n, v, atol=1e-14)
            assert abs(float(t @ n)) <= 1e-13

    def test_ball(self, rng):
        for _ in range(50):
            ball = random_ball(rng, 3)
            x = boundary_point(ball, rng)
            v = rng.normal(size=3) * 3.0
            t = ball.tangent_project(x, v)
            n = normal_cone_project_ball(ball, x, v)
            np.testing.assert_allclose(t + n, v, atol=1e-13)
            assert abs(float(t @ n)) <= 1e-12


class TestTangentMatchesProjectionDerivative:
    """(P(x + d*v) - x)/d -> tangent_project(x, v) as d -> 0."""

    def test_finite_difference_agreement(self, rng):
        delta = 1e-7
        for m in (2, 5):
            for set_ in (random_box(rng, m), random_ball(rng, m)):
                for _ in range(20):
                    x = boundary_point(set_, rng)
                    v = rng.normal(size=m) * 2.0
                    fd = (set_.project(x + delta * v) - x) / delta
                    t = set_.tangent_project(x, v)
                    np.testing.assert_allclose(fd, t, atol=1e-5)


class TestGeometryHelpers:
    def test_box_active_faces(self):
        box = Box(np.array([0.0, 0.0, 0.0]), np.array([1.0, 1.0, 1.0]))
        low, up = box.active_faces(np.array([0.0, 0.5, 1.0]))
        np.testing.assert_array_equal(low, [True, False, False])
        np.testing.assert_array_equal(up, [False, False, True])

    def test_interior_margin_sign(self, rng):
        box = Box(np.zeros(2), np.ones(2))
        assert box.interior_margin(np.array([0.5, 0.5])) == pytest.approx(0.5)
        assert box.interior_margin(np.array([0.0, 0.5])) == 0.0
        ball = Ball(np.zeros(2), 2.0)
        assert ball.interior_margin(np.zeros(2)) == pytest.approx(2.0)
        assert ball.interior_margin(np.array([3.0, 0.0])) == pytest.approx(-1.0)

    def test_max_norm(self):
        box = Box(np.array([-1.0, -2.0]), np.array([3.0, 1.0]))
        assert box.max_norm() == pytest.approx(np.sqrt(13.0))
        ball = Ball(np.array([3.0, 4.0]), 2.0)
        assert ball.max_norm() == pytest.approx(7.0)

    def test_sample_is_member(self, rng):
        for m in (1, 3, 8):
            for set_ in (random_box(rng, m), random_ball(rng, m)):
                for _ in range(50):
                    assert set_.contains(set_.sample(rng))


class TestValidation:
    def test_box_rejects_crossed_bounds(self):
        with pytest.raises(ConfigError):
            Box(np.array([1.0, 0.0]), np.array([0.0, 1.0]))

    def test_box_rejects_degenerate_width(self):
        with pytest.raises(ConfigError):
            Box(np.zeros(2), np.full(2, 1e-12))

    def test_box_rejects_shape_mismatch(self):
        with pytest.raises(ConfigError):
            Box(np.zeros(2), np.ones(3))

    def test_ball_rejects_nonpositive_radius(self):
        with pytest.raises(ConfigError):
            Ball(np.zeros(2), 0.0)
        with pytest.raises(ConfigError):
            Ball(np.zeros(2), -1.0)

    def test_dimension_mismatch_rejected(self):
        box = Box(np.zeros(2), np.ones(2))
        with pytest.raises(DomainError):
            box.project(np.zeros(3))
        ball = Ball(np.zeros(2), 1.0)
        with pytest.raises(DomainError):
            ball.contains(np.zeros(4))
