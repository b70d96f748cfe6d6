import math

import numpy as np
import pytest

from steelnav import (
    Config,
    Footprint,
    Multigraph,
    RrtParams,
    ncbe,
    pibc_check,
    rrt_plan,
    vocpp,
)
from steelnav.errors import (
    EmptyBoundaries,
    GoalInvalid,
    NoPathFound,
    StartInvalid,
)
from steelnav.planner import PibcChecker, footprint_points, plan_route


def corridor_boundary(length=1.0, width=0.14, seed=0, density=20000):
    """Boundary of an axis-aligned length x width bar centered at origin."""
    rng = np.random.default_rng(seed)
    n = int(density * length * width)
    pts = rng.uniform([-length / 2, -width / 2], [length / 2, width / 2],
                      (n, 2))
    return ncbe(pts, 0.02), pts


class TestConfig:
    def test_theta_wrapped(self):
        assert Config(0, 0, 3 * math.pi).theta == pytest.approx(math.pi)
        assert Config(0, 0, -3 * math.pi).theta == pytest.approx(math.pi)

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            Config(float("nan"), 0.0, 0.0)


class TestFootprintPoints:
    def test_identity_pose(self):
        fp = Footprint(width=0.1, length=0.2)
        pts = footprint_points(Config(0, 0, 0), fp)
        assert len(pts) == 9
        corners = {tuple(p) for p in pts[:4]}
        assert (0.1, 0.05) in corners and (-0.1, -0.05) in corners
        np.testing.assert_allclose(pts[-1], [0, 0])

    def test_quarter_turn(self):
        fp = Footprint(width=0.1, length=0.2)
        pts0 = footprint_points(Config(0, 0, 0), fp)
        pts90 = footprint_points(Config(0, 0, math.pi / 2), fp)
        rot = np.array([[0.0, -1.0], [1.0, 0.0]])
        np.testing.assert_allclose(pts90, pts0 @ rot.T, atol=1e-12)

    def test_translation(self):
        fp = Footprint(width=0.1, length=0.2)
        pts = footprint_points(Config(2.0, -1.0, 0.4), fp)
        base = footprint_points(Config(0, 0, 0.4), fp)
        np.testing.assert_allclose(pts, base + [2.0, -1.0], atol=1e-12)

    def test_rigidity(self):
        fp = Footprint(width=0.1, length=0.2)
        a = footprint_points(Config(0, 0, 0), fp)
        b = footprint_points(Config(1.3, 0.7, 1.1), fp)
        da = np.linalg.norm(a[:, None] - a[None, :], axis=2)
        db = np.linalg.norm(b[:, None] - b[None, :], axis=2)
        np.testing.assert_allclose(da, db, atol=1e-12)

    def test_template_outside_rectangle_rejected(self):
        with pytest.raises(ValueError):
            Footprint(width=0.1, length=0.2,
                      template=np.array([[0.5, 0.0]]))


class TestPibc:
    def test_center_config_valid(self):
        b, _ = corridor_boundary()
        fp = Footprint(width=0.04, length=0.05)
        assert pibc_check([b], Config(0, 0, 0), fp, rule="any")

    def test_outside_config_invalid(self):
        b, _ = corridor_boundary()
        fp = Footprint(width=0.04, length=0.05)
        for rule in ("all", "any"):
            assert not pibc_check([b], Config(0.0, 0.5, 0.0), fp, rule=rule)

    def test_all_rule_subset_of_any(self):
        b, _ = corridor_boundary()
        checker_all = PibcChecker([b], rule="all")
        checker_any = PibcChecker([b], rule="any")
        rng = np.random.default_rng(1)
        probes = rng.uniform([-0.6, -0.12], [0.6, 0.12], (300, 2))
        inside_all = checker_all.points_inside(probes)
        inside_any = checker_any.points_inside(probes)
        assert np.all(inside_any[inside_all])

    def test_empty_boundaries(self):
        with pytest.raises(EmptyBoundaries):
            PibcChecker([])

    def test_bad_rule(self):
        b, _ = corridor_boundary()
        with pytest.raises(ValueError):
            PibcChecker([b], rule="most")


class TestRrtPlan:
    PARAMS = RrtParams(step=0.02, goal_tol=0.01, rule="any")
    FP = Footprint(width=0.1, length=0.12)

    def test_corridor_ten_seeds(self):
        b, _ = corridor_boundary(length=1.0, width=0.14)
        checker = PibcChecker([b], rule="any")
        start = Config(-0.4, 0.0, 0.0)
        goal = Config(0.4, 0.0, 0.0)
        straight = 0.8
        for seed in range(10):
            path = rrt_plan(start, goal, [b], self.FP, self.PARAMS,
                            seed=seed, checker=checker)
            xy = np.array([[c.x, c.y] for c in path.configs])
            length = float(np.linalg.norm(np.diff(xy, axis=0), axis=1).sum())
            assert length <= 2 * straight
            assert np.linalg.norm(xy[-1] - goal.xy) <= self.PARAMS.goal_tol
            # every waypoint of the returned path is itself valid
            for c in path.configs:
                assert checker.check(c, self.FP)

    def test_start_equals_goal(self):
        b, _ = corridor_boundary()
        c = Config(0, 0, 0)
        path = rrt_plan(c, c, [b], self.FP, self.PARAMS, seed=0)
        assert path.configs == (c,)

    def test_invalid_endpoints(self):
        b, _ = corridor_boundary()
        inside = Config(0, 0, 0)
        outside = Config(0.0, 1.0, 0.0)
        with pytest.raises(StartInvalid):
            rrt_plan(outside, inside, [b], self.FP, self.PARAMS, seed=0)
        with pytest.raises(GoalInvalid):
            rrt_plan(inside, outside, [b], self.FP, self.PARAMS, seed=0)

    def test_deterministic(self):
        b, _ = corridor_boundary()
        start, goal = Config(-0.3, 0, 0), Config(0.3, 0, 0)
        a = rrt_plan(start, goal, [b], self.FP, self.PARAMS, seed=4)
        c = rrt_plan(start, goal, [b], self.FP, self.PARAMS, seed=4)
        assert a.configs == c.configs

    def test_unreachable_times_out(self):
        # two disjoint bars: the goal sits in the far one
        b1, _ = corridor_boundary(seed=0)
        rng = np.random.default_rng(1)
        far = rng.uniform([2.0, -0.07], [3.0, 0.07], (2000, 2))
        b2 = ncbe(far, 0.02)
        params = RrtParams(step=0.02, goal_tol=0.01, rule="any",
                           max_iters=300)
        with pytest.raises(NoPathFound):
            rrt_plan(Config(0, 0, 0), Config(2.5, 0, 0), [b1, b2],
                     self.FP, params, seed=0)


class FakeGraph:
    def __init__(self, pos, edges):
        self._pos = {k: np.asarray(v, dtype=float) for k, v in pos.items()}
        self.edge_list = edges

    def positions(self):
        return self._pos

    def vertex_ids(self):
        return list(self._pos)


class TestPlanRoute:
    def test_single_bar_route(self):
        b, _ = corridor_boundary(length=1.0, width=0.14)
        g = FakeGraph({0: [-0.5, 0.0], 1: [0.5, 0.0]}, [(0, 1, 1.0)])
        mg = Multigraph.build([0, 1], [(0, 1, 1.0)])
        route = vocpp(mg, 0, 1)
        fp = Footprint(width=0.1, length=0.12)
        params = RrtParams(step=0.02, goal_tol=0.01, rule="any")
        result = plan_route(route, g, [b], fp, params, seed=0)
        assert result.all_succeeded
        assert [p.edge_ref for p in result.paths] == [(0, 1)]
        # chained: nothing to chain with one edge, but the path must end
        # near the (nudged) goal end of the bar
        assert result.paths[0].configs[-1].x > 0.3

    def test_phantom_edge_reported(self):
        # vertex 2 sits far outside every boundary: its edge must fail
        # while the real edge still gets planned
        b, _ = corridor_boundary(length=1.0, width=0.14)
        g = FakeGraph({0: [-0.5, 0.0], 1: [0.5, 0.0], 2: [0.5, 5.0]},
                      [(0, 1, 1.0), (1, 2, 5.0)])
        mg = Multigraph.build([0, 1, 2], [(0, 1, 1.0), (1, 2, 5.0)])
        route = vocpp(mg, 0, 2)
        fp = Footprint(width=0.1, length=0.12)
        params = RrtParams(step=0.02, goal_tol=0.01, rule="any",
                           max_iters=500)
        result = plan_route(route, g, [b], fp, params, seed=0)
        assert not result.all_succeeded
        failed_edges = {f.edge for f in result.failures}
        assert (1, 2) in failed_edges
        assert [p.edge_ref for p in result.paths] == [(0, 1)]
