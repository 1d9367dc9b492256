import numpy as np
import pytest

from penflow import (
    Ball,
    Box,
    DomainError,
    InfeasibleProblemError,
    L1PlusLinear,
    OracleSolution,
    QuadPlusL1,
    intersection_project,
    solve_centralized,
)
from penflow.oracle import find_interior_point


def scalar_box(lo, hi):
    return Box(np.array([lo]), np.array([hi]))


class TestIntersectionProject:
    def test_overlapping_intervals(self):
        out = intersection_project([scalar_box(0.0, 2.0), scalar_box(1.0, 3.0)], [5.0])
        assert out[0] == pytest.approx(2.0, abs=1e-10)

    def test_point_inside_returned_unchanged(self):
        sets = [scalar_box(0.0, 2.0), scalar_box(1.0, 3.0)]
        np.testing.assert_array_equal(intersection_project(sets, [1.5]), [1.5])

    def test_two_balls_lens(self):
        sets = [Ball(np.zeros(2), 1.0), Ball(np.array([1.0, 0.0]), 1.0)]
        out = intersection_project(sets, [3.0, 0.0])
        np.testing.assert_allclose(out, [1.0, 0.0], atol=1e-8)
        for s in sets:
            assert s.normal_residual(out) <= 1e-10

    def test_result_always_feasible(self, rng):
        sets = [
            Box(np.array([-1.0, -2.0]), np.array([2.0, 1.0])),
            Ball(np.array([0.5, 0.0]), 1.5),
            Ball(np.zeros(2), 2.0),
        ]
        for _ in range(50):
            out = intersection_project(sets, rng.normal(size=2) * 10.0)
            for s in sets:
                assert s.normal_residual(out) <= 1e-10

    def test_disjoint_boxes_detected(self):
        sets = [scalar_box(0.0, 1.0), scalar_box(2.0, 3.0)]
        with pytest.raises(InfeasibleProblemError):
            intersection_project(sets, [0.5])

    def test_disjoint_balls_detected(self):
        sets = [Ball(np.zeros(2), 1.0), Ball(np.array([5.0, 0.0]), 1.0)]
        with pytest.raises(InfeasibleProblemError):
            intersection_project(sets, [2.5, 0.0])


class TestFindInteriorPoint:
    def test_strictly_inside_every_set(self):
        sets = [
            Box(np.array([-1.0, -1.0]), np.array([1.0, 1.0])),
            Ball(np.array([0.5, 0.5]), 1.0),
        ]
        point = find_interior_point(sets)
        assert min(s.interior_margin(point) for s in sets) > 0.0

    def test_touching_sets_rejected(self):
        # intersection is the single point x = 1: no interior
        sets = [scalar_box(0.0, 1.0), scalar_box(1.0, 2.0)]
        with pytest.raises(InfeasibleProblemError):
            find_interior_point(sets)

    def test_thin_overlap_still_has_interior(self):
        sets = [scalar_box(0.0, 1.0), scalar_box(1.0 - 1e-12, 2.0)]
        point = find_interior_point(sets)
        assert min(s.interior_margin(point) for s in sets) > 0.0


class TestSolveCentralized:
    def test_opposing_quadratics_meet_in_the_middle(self):
        # (x-1)^2 + (x+1)^2 up to constants, constrained to [-0.5, 0.5]
        objs = [
            QuadPlusL1(np.array([[2.0]]), np.array([-2.0]), 0.0),
            QuadPlusL1(np.array([[2.0]]), np.array([2.0]), 0.0),
        ]
        sets = [scalar_box(-0.5, 0.5), scalar_box(-0.5, 0.5)]
        sol = solve_centralized(objs, sets)
        assert sol.x_star[0] == pytest.approx(0.0, abs=1e-7)
        assert sol.f_star == pytest.approx(0.0, abs=1e-9)

    def test_l1_pushed_to_boundary(self):
        objs = [L1PlusLinear(np.zeros(1), np.zeros(1))]
        sol = solve_centralized(objs, [scalar_box(1.0, 2.0)])
        assert sol.x_star[0] == pytest.approx(1.0, abs=1e-7)
        assert sol.f_star == pytest.approx(1.0, abs=1e-7)

    def test_distinct_starts_agree(self, mixed_problem):
        # the quad agent makes the sum strongly convex, so the minimizer
        # is unique; a value gap of d bounds the distance by sqrt(2d/beta)
        objs, sets = mixed_problem.objectives, mixed_problem.sets
        a = solve_centralized(objs, sets, x_init=np.array([0.9, -0.9]))
        b = solve_centralized(objs, sets, x_init=np.array([-0.4, 0.6]))
        assert a.f_star == pytest.approx(b.f_star, abs=1e-7)
        beta = objs[1].strong_convexity_modulus()
        radius = 2.0 * np.sqrt(2.0 * 1e-7 / beta)
        assert np.linalg.norm(a.x_star - b.x_star) <= radius

    def test_solution_feasible_and_value_consistent(self, mixed_problem):
        objs, sets = mixed_problem.objectives, mixed_problem.sets
        sol = solve_centralized(objs, sets)
        for s in sets:
            assert s.normal_residual(sol.x_star) <= 1e-10
        direct = sum(f.value(sol.x_star) for f in objs)
        assert sol.f_star == direct

    def test_beats_feasible_grid(self, mixed_problem, rng):
        # no feasible point may undercut the reported optimum
        objs, sets = mixed_problem.objectives, mixed_problem.sets
        sol = solve_centralized(objs, sets)
        for _ in range(2000):
            y = intersection_project(sets, rng.normal(size=2) * 2.0)
            assert sum(f.value(y) for f in objs) >= sol.f_star - 1e-7

    def test_backends_agree(self, mixed_problem):
        objs, sets = mixed_problem.objectives, mixed_problem.sets
        a = solve_centralized(objs, sets, backend="numpy")
        b = solve_centralized(objs, sets, backend="numba")
        assert np.linalg.norm(a.x_star - b.x_star) <= 1e-6
        assert a.method.endswith("numpy")
        assert b.method.endswith("numba")

    def test_infeasible_instance_rejected(self):
        objs = [L1PlusLinear(np.zeros(1), np.zeros(1))] * 2
        sets = [scalar_box(0.0, 1.0), scalar_box(2.0, 3.0)]
        with pytest.raises(InfeasibleProblemError):
            solve_centralized(objs, sets)

    def test_dimension_mismatch_rejected(self):
        objs = [L1PlusLinear(np.zeros(2), np.zeros(2))]
        with pytest.raises(DomainError):
            solve_centralized(objs, [scalar_box(0.0, 1.0)])

    def test_empty_input_rejected(self):
        with pytest.raises(DomainError):
            solve_centralized([], [])

    def test_first_order_condition_by_finite_differences(self, mixed_problem):
        # the steepest feasible direction at x* must be (near) null: project
        # -sum g_i onto the intersection's tangent cone by a small projected
        # step, minimizing over the free kink selections coordinate-wise
        def centralized_residual(objs, sets, x, delta):
            raw = np.zeros_like(x)
            slack = np.zeros_like(x)
            for f in objs:
                raw -= f.subgradient(x)
                if isinstance(f, L1PlusLinear):
                    slack += np.abs(x - f.anchor) <= 1e-9
                elif isinstance(f, QuadPlusL1):
                    slack += f.r * (np.abs(x) <= 1e-9)
            v = np.sign(raw) * np.maximum(0.0, np.abs(raw) - slack)
            moved = intersection_project(sets, x + delta * v) - x
            return float(np.linalg.norm(moved / delta))

        objs = [
            QuadPlusL1(np.array([[2.0]]), np.array([-2.0]), 0.0),
            QuadPlusL1(np.array([[2.0]]), np.array([2.0]), 0.0),
        ]
        sets = [scalar_box(-0.5, 0.5)] * 2
        sol = solve_centralized(objs, sets)
        assert centralized_residual(objs, sets, sol.x_star, 1e-4) <= 1e-6

        objs = [L1PlusLinear(np.zeros(1), np.zeros(1))]
        sets = [scalar_box(1.0, 2.0)]
        sol = solve_centralized(objs, sets)
        assert centralized_residual(objs, sets, sol.x_star, 1e-4) <= 1e-3

        objs, sets = mixed_problem.objectives, mixed_problem.sets
        sol = solve_centralized(objs, sets)
        # x* is located to sqrt(2 tol/beta) ~ 1e-4, which the quadratic
        # gradient amplifies; the residual scale reflects that, not 10*tol
        assert centralized_residual(objs, sets, sol.x_star, 1e-4) <= 2e-3

    def test_solution_round_trips_through_dict(self, mixed_problem):
        sol = solve_centralized(mixed_problem.objectives, mixed_problem.sets)
        back = OracleSolution.from_dict(sol.to_dict())
        np.testing.assert_array_equal(back.x_star, sol.x_star)
        assert back.f_star == sol.f_star
        assert back.method == sol.method
