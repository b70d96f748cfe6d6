"""Deterministic synthetic generators for lattice-structure point clouds.

Each shape is a set of bar rectangles plus square junction areas; points
are sampled uniformly per rectangle at a fixed density, labeled before
noise is added, and shipped with the true rectangles and the true
structure graph as ground truth.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .cloud import Frame, PointCloud
from .errors import InvalidSpec


class Shape(enum.Enum):
    CROSS = "cross"
    K = "k"
    L = "l"
    T = "t"
    I = "i"


@dataclass(frozen=True)
class BarRect:
    """Oriented rectangle: `length` along the local x axis rotated by `angle`."""

    center: np.ndarray  # (2,)
    length: float
    width: float
    angle: float  # radians

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))

    @property
    def area(self) -> float:
        return self.length * self.width

    def contains(self, points: np.ndarray, margin: float = 0.0) -> np.ndarray:
        """Boolean mask of points inside the rectangle (shrunk by `margin`)."""
        pts = np.atleast_2d(points) - self.center
        cos, sin = math.cos(self.angle), math.sin(self.angle)
        local = pts @ np.array([[cos, sin], [-sin, cos]]).T
        return (np.abs(local[:, 0]) <= self.length / 2 - margin) & \
               (np.abs(local[:, 1]) <= self.width / 2 - margin)

    def boundary_distance(self, points: np.ndarray) -> np.ndarray:
        """Unsigned distance of each point to the rectangle outline."""
        pts = np.atleast_2d(points) - self.center
        cos, sin = math.cos(self.angle), math.sin(self.angle)
        local = pts @ np.array([[cos, sin], [-sin, cos]]).T
        dx = np.abs(local[:, 0]) - self.length / 2
        dy = np.abs(local[:, 1]) - self.width / 2
        outside = np.hypot(np.maximum(dx, 0), np.maximum(dy, 0))
        return np.where(outside > 0, outside, -np.maximum(dx, dy))

    def to_json(self):
        return {
            "center": [float(v) for v in self.center],
            "length": self.length,
            "width": self.width,
            "angle": self.angle,
        }


@dataclass(frozen=True)
class StructureSpec:
    shape: Shape
    bar_length: float = 1.0
    bar_width: float = 0.1
    density: float = 4000.0  # points per square meter
    noise_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.bar_length <= 0 or self.bar_width <= 0:
            raise InvalidSpec("bar dimensions must be positive")
        if self.density <= 0:
            raise InvalidSpec("density must be positive")
        if self.noise_sigma < 0:
            raise InvalidSpec("noise_sigma must be >= 0")


@dataclass
class GroundTruth:
    labels: np.ndarray  # per-point rectangle index, assigned pre-noise
    rects: list[BarRect]
    cross_labels: set[int]  # which rectangles are junction areas
    graph_vertices: list[np.ndarray]
    graph_edges: list[tuple[int, int]]

    def to_json(self):
        return {
            "labels": [int(v) for v in self.labels],
            "rects": [r.to_json() for r in self.rects],
            "cross_labels": sorted(self.cross_labels),
            "graph_vertices": [[float(c) for c in v] for v in self.graph_vertices],
            "graph_edges": [list(e) for e in self.graph_edges],
        }


def _dir(angle: float) -> np.ndarray:
    return np.array([math.cos(angle), math.sin(angle)])


def _arm(angle: float, length: float, width: float, hub_half: float) -> BarRect:
    """Bar of given length attached to a hub square of half-size `hub_half`."""
    center = _dir(angle) * (hub_half + length / 2.0)
    return BarRect(center, length, width, angle)


def _build_shape(spec: StructureSpec):
    """Rectangles, junction labels, and the true graph for one shape."""
    length, w = spec.bar_length, spec.bar_width
    hub = w / 2.0
    origin = np.zeros(2)

    def square(at):
        return BarRect(np.asarray(at, dtype=float), w, w, 0.0)

    def endpoint(angle, from_pt=origin):
        return from_pt + _dir(angle) * (hub + length)

    if spec.shape is Shape.CROSS:
        angles = [0.0, math.pi, math.pi / 2, -math.pi / 2]
        rects = [_arm(a, length, w, hub) for a in angles] + [square(origin)]
        cross = {4}
        verts = [origin] + [endpoint(a) for a in angles]
        edges = [(0, i) for i in range(1, 5)]
    elif spec.shape is Shape.T:
        angles = [0.0, math.pi, -math.pi / 2]
        rects = [_arm(a, length, w, hub) for a in angles] + [square(origin)]
        cross = {3}
        verts = [origin] + [endpoint(a) for a in angles]
        edges = [(0, i) for i in range(1, 4)]
    elif spec.shape is Shape.L:
        angles = [0.0, math.pi / 2]
        rects = [_arm(a, length, w, hub) for a in angles] + [square(origin)]
        cross = {2}
        verts = [origin] + [endpoint(a) for a in angles]
        edges = [(0, 1), (0, 2)]
    elif spec.shape is Shape.K:
        # vertical stroke (two arms) plus three arms fanning out
        angles = [math.pi / 2, -math.pi / 2, 0.0, math.pi / 4, -math.pi / 4]
        rects = [_arm(a, length, w, hub) for a in angles] + [square(origin)]
        cross = {5}
        verts = [origin] + [endpoint(a) for a in angles]
        edges = [(0, i) for i in range(1, 6)]
    elif spec.shape is Shape.I:
        # two junction squares joined by one bar, each with stub flanges
        stub = length / 3.0
        top = np.array([0.0, hub + length / 2.0 + hub])
        bot = -top
        mid_bar = BarRect(origin, length, w, math.pi / 2)
        rects = [mid_bar, square(top), square(bot)]
        for at in (top, bot):
            for a in (0.0, math.pi):
                rects.append(BarRect(at + _dir(a) * (hub + stub / 2.0), stub, w, a))
        cross = {1, 2}
        verts = [top, bot,
                 top + _dir(0.0) * (hub + stub), top + _dir(math.pi) * (hub + stub),
                 bot + _dir(0.0) * (hub + stub), bot + _dir(math.pi) * (hub + stub)]
        edges = [(0, 1), (0, 2), (0, 3), (1, 4), (1, 5)]
    else:
        raise InvalidSpec(f"unknown shape {spec.shape!r}")
    return rects, cross, verts, edges


def generate(spec: StructureSpec) -> tuple[PointCloud, GroundTruth]:
    """Sample the shape at `spec.density` with per-rect labels and optional noise."""
    rects, cross, verts, edges = _build_shape(spec)
    rng = np.random.default_rng(spec.seed)

    pts = []
    labels = []
    for idx, rect in enumerate(rects):
        n = max(int(round(spec.density * rect.area)), 1)
        local = rng.uniform([-rect.length / 2, -rect.width / 2],
                            [rect.length / 2, rect.width / 2], size=(n, 2))
        cos, sin = math.cos(rect.angle), math.sin(rect.angle)
        world = local @ np.array([[cos, sin], [-sin, cos]]) + rect.center
        pts.append(world)
        labels.append(np.full(n, idx, dtype=int))
    xy = np.vstack(pts)
    labels = np.concatenate(labels)
    if spec.noise_sigma > 0:
        xy = xy + rng.normal(0.0, spec.noise_sigma, size=xy.shape)

    cloud = PointCloud(np.column_stack([xy, np.zeros(len(xy))]), Frame.PROJECTED_2D)
    truth = GroundTruth(labels, rects, cross, verts, edges)
    return cloud, truth


def degrade(cloud: PointCloud, dropout: float, range_falloff: float,
            seed: int = 0) -> PointCloud:
    """Remove points with probability growing along the camera (x) axis."""
    if not 0.0 <= dropout <= 1.0:
        raise InvalidSpec("dropout must be in [0, 1]")
    if range_falloff < 0:
        raise InvalidSpec("range_falloff must be >= 0")
    if len(cloud) == 0:
        return cloud
    rng = np.random.default_rng(seed)
    x = cloud.points[:, 0]
    p_remove = np.clip(dropout + range_falloff * (x - x.min()), 0.0, 1.0)
    keep = rng.random(len(cloud)) >= p_remove
    return PointCloud(cloud.points[keep], cloud.frame)
