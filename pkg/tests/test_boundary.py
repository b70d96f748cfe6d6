import math

import numpy as np
import pytest

from steelnav import (
    Boundary,
    are_neighbors,
    cluster_border,
    default_alpha_s,
    ncbe,
    point_in_boundary,
)
from steelnav.errors import EmptyBoundary, EmptyInput, InvalidAlpha

from oracles import dist_to_polygon_edge, point_in_polygon

UNIT_SQUARE = np.array([[0.0, 0], [1.0, 0], [1.0, 1], [0.0, 1]])


def square_samples(n, seed=0):
    rng = np.random.default_rng(seed)
    return rng.uniform(0, 1, (n, 2))


class TestNcbe:
    def test_two_points(self):
        pts = np.array([[0.0, 0.0], [1.0, 1.0]])
        b = ncbe(pts, 0.5)
        assert len(b) == 2
        assert {tuple(p) for p in b.points} == {(0, 0), (1, 1)}

    def test_unit_square_fidelity(self):
        pts = square_samples(10000)
        b = ncbe(pts, 0.05)
        for p in b.points:
            assert dist_to_polygon_edge(p, UNIT_SQUARE) <= 0.05

    def test_square_with_hole_traces_outer_perimeter(self):
        pts = square_samples(10000, seed=1)
        hole = (np.abs(pts[:, 0] - 0.5) <= 0.1) & (np.abs(pts[:, 1] - 0.5) <= 0.1)
        b = ncbe(pts[~hole], 0.05)
        for p in b.points:
            assert dist_to_polygon_edge(p, UNIT_SQUARE) <= 0.05

    def test_members_of_input(self):
        pts = square_samples(500, seed=2)
        b = ncbe(pts, 0.1)
        as_set = {tuple(p) for p in pts}
        assert all(tuple(p) in as_set for p in b.points)

    def test_size_bound(self):
        pts = square_samples(300, seed=3)
        alpha = 0.2
        b = ncbe(pts, alpha)
        windows = sum(
            int(np.ceil((pts[:, ax].max() - pts[:, ax].min()) / alpha)) + 1
            for ax in (0, 1)
        )
        assert len(b) <= min(2 * windows, len(pts))

    def test_monotone_fidelity_on_square(self):
        # shrinking alpha gives a denser boundary, so the worst gap from
        # the true perimeter to the nearest boundary point shrinks too
        pts = square_samples(8000, seed=4)
        t = np.linspace(0, 1, 400, endpoint=False)
        perimeter = np.vstack([
            np.column_stack([t, np.zeros_like(t)]),
            np.column_stack([np.ones_like(t), t]),
            np.column_stack([1 - t, np.ones_like(t)]),
            np.column_stack([np.zeros_like(t), 1 - t]),
        ])
        worst = []
        for alpha in (0.2, 0.1, 0.05):
            b = ncbe(pts, alpha)
            gaps = np.linalg.norm(perimeter[:, None, :] - b.points[None, :, :],
                                  axis=2).min(axis=1)
            worst.append(float(gaps.max()))
        assert worst[0] >= worst[1] >= worst[2]

    def test_monotone_fidelity_on_disk(self):
        rng = np.random.default_rng(5)
        r = np.sqrt(rng.uniform(0, 1, 8000))
        th = rng.uniform(0, 2 * np.pi, 8000)
        pts = np.column_stack([r * np.cos(th), r * np.sin(th)])
        t = np.linspace(0, 2 * np.pi, 800, endpoint=False)
        circle = np.column_stack([np.cos(t), np.sin(t)])
        worst = []
        for alpha in (0.2, 0.1, 0.05):
            b = ncbe(pts, alpha)
            gaps = np.linalg.norm(circle[:, None, :] - b.points[None, :, :],
                                  axis=2).min(axis=1)
            worst.append(float(gaps.max()))
        assert worst[0] >= worst[1] >= worst[2]

    def test_errors(self):
        with pytest.raises(EmptyInput):
            ncbe(np.zeros((0, 2)), 0.1)
        with pytest.raises(InvalidAlpha):
            ncbe(np.zeros((3, 2)), 0.0)

    def test_3d_input(self):
        rng = np.random.default_rng(6)
        pts = np.column_stack([rng.uniform(0, 1, (2000, 2)), np.zeros(2000)])
        b = ncbe(pts, 0.1)
        assert b.points.shape[1] == 3

    def test_default_alpha_scale(self):
        pts = square_samples(2500, seed=7)
        alpha = default_alpha_s(pts)
        # 2x median nearest-neighbor spacing of 2500 uniform points
        assert 0.005 < alpha < 0.05


@pytest.fixture(scope="module")
def square_boundary():
    pts = square_samples(10000, seed=8)
    return ncbe(pts, 0.05)


class TestPointInBoundary:
    def test_center_inside(self, square_boundary):
        assert point_in_boundary(square_boundary, np.array([0.5, 0.5]), m=5)

    def test_far_outside(self, square_boundary):
        assert not point_in_boundary(square_boundary, np.array([1.5, 0.5]), m=5)

    def test_convex_polygon_agreement(self):
        k = 12
        angles = np.arange(k) * 2 * np.pi / k
        polygon = np.column_stack([np.cos(angles), np.sin(angles)])
        # dense samples of the 12-gon to build a realistic boundary
        rng = np.random.default_rng(9)
        raw = rng.uniform(-1, 1, (40000, 2))
        inside_mask = np.array([point_in_polygon(p, polygon) for p in raw])
        samples = raw[inside_mask]
        b = ncbe(samples, 0.05)
        probes = np.random.default_rng(10).uniform(-0.2, 1.2, (500, 2))
        agree = 0
        counted = 0
        for p in probes:
            if dist_to_polygon_edge(p, polygon) < 0.02:
                continue
            counted += 1
            got = point_in_boundary(b, p, m=5)
            want = point_in_polygon(p, polygon)
            agree += got == want
        assert counted > 0
        assert agree / counted >= 0.98

    def test_any_rule_superset_of_all(self, square_boundary):
        rng = np.random.default_rng(11)
        for p in rng.uniform(-0.2, 1.2, (200, 2)):
            if point_in_boundary(square_boundary, p, m=5, rule="all"):
                assert point_in_boundary(square_boundary, p, m=5, rule="any")

    def test_empty_boundary(self):
        b = Boundary(np.zeros((0, 2)), np.zeros(2), 0.1)
        with pytest.raises(EmptyBoundary):
            point_in_boundary(b, np.zeros(2), m=1)

    def test_bad_rule(self, square_boundary):
        with pytest.raises(ValueError):
            point_in_boundary(square_boundary, np.zeros(2), m=1, rule="most")


def grid_square_boundary(x0, y0, pitch=0.05):
    """Boundary of a unit square sampled along its perimeter at `pitch`."""
    t = np.arange(0.0, 1.0, pitch)
    pts = np.vstack([
        np.column_stack([x0 + t, np.full_like(t, y0)]),
        np.column_stack([np.full_like(t, x0 + 1.0), y0 + t]),
        np.column_stack([x0 + 1.0 - t, np.full_like(t, y0 + 1.0)]),
        np.column_stack([np.full_like(t, x0), y0 + 1.0 - t]),
    ])
    return Boundary(pts, np.array([x0 + 0.5, y0 + 0.5]), pitch)


class TestClusterBorder:
    def test_shared_edge(self):
        a = grid_square_boundary(0.0, 0.0)
        b = grid_square_boundary(1.0, 0.0)
        border = cluster_border(a, b, eps_border=0.02)
        assert abs(border.length - 1.0) <= 0.1
        np.testing.assert_allclose(border.midpoint, [1.0, 0.5], atol=0.06)

    def test_disjoint(self):
        a = grid_square_boundary(0.0, 0.0)
        b = grid_square_boundary(2.0, 0.0)
        border = cluster_border(a, b, eps_border=0.02)
        assert border.length == 0.0
        assert len(border.points) == 0
        assert border.midpoint is None

    def test_corner_contact_not_neighbors(self):
        a = grid_square_boundary(0.0, 0.0)
        b = grid_square_boundary(1.0, 1.0)
        eps = 0.02
        border = cluster_border(a, b, eps_border=eps)
        assert border.length <= 2 * eps + 1e-12
        assert not are_neighbors(border, l_b=0.1)

    def test_symmetry(self):
        a = grid_square_boundary(0.0, 0.0)
        b = grid_square_boundary(1.0, 0.0)
        ab = cluster_border(a, b, eps_border=0.02)
        ba = cluster_border(b, a, eps_border=0.02)
        assert ab.length == ba.length
        assert are_neighbors(ab, 0.3) == are_neighbors(ba, 0.3)


class TestAreNeighbors:
    def test_definition(self):
        a = grid_square_boundary(0.0, 0.0)
        b = grid_square_boundary(1.0, 0.0)
        border = cluster_border(a, b, eps_border=0.02)
        assert are_neighbors(border, l_b=0.3)
        assert not are_neighbors(border, l_b=1.5)

    def test_zero_length(self):
        a = grid_square_boundary(0.0, 0.0)
        b = grid_square_boundary(2.0, 0.0)
        border = cluster_border(a, b, eps_border=0.02)
        assert not are_neighbors(border, l_b=0.001)
