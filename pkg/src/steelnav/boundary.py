"""Non-convex boundary estimation and boundary-based membership tests.

The slicing estimator keeps, per window along each axis, the two points
at maximum mutual distance; the union over windows and axes approximates
the outer boundary of the point set without reconstructing a polygon.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import EmptyBoundary, EmptyInput, InvalidAlpha

_MAX_PAIR_BLOCK = 2048  # bounds memory of the per-window farthest-pair search


@dataclass(frozen=True)
class Boundary:
    points: np.ndarray  # (M, d) subset of the source cluster, d in {2, 3}
    center: np.ndarray  # (d,) mean of the SOURCE cluster, not of the boundary
    alpha_s: float

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2:
            pts = pts.reshape(0, 2)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))

    def __len__(self):
        return self.points.shape[0]

    def to_json(self, cluster_id=None):
        d = {
            "center": [float(v) for v in self.center],
            "alpha_s": float(self.alpha_s),
            "points": [[float(v) for v in p] for p in self.points],
        }
        if cluster_id is not None:
            d["cluster_id"] = cluster_id
        return d


@dataclass(frozen=True)
class Border:
    """Shared boundary-point set between two clusters."""

    cluster_a: int
    cluster_b: int
    points: np.ndarray  # (K, d), possibly empty
    length: float  # diameter of the border point set, 0 if < 2 points
    midpoint: np.ndarray | None  # mean of border points, None when empty


def _farthest_pair(pts: np.ndarray) -> tuple[int, int]:
    """Indices of the two points at maximum mutual distance.

    Blocked O(k^2) scan; deterministic first-hit tie-break.
    """
    n = len(pts)
    best = (-1.0, 0, 0)
    for i0 in range(0, n, _MAX_PAIR_BLOCK):
        block = pts[i0:i0 + _MAX_PAIR_BLOCK]
        d2 = np.sum((block[:, None, :] - pts[None, :, :]) ** 2, axis=2)
        flat = int(np.argmax(d2))
        i, j = divmod(flat, n)
        val = float(d2[i, j])
        if val > best[0]:
            best = (val, i0 + i, j)
    return best[1], best[2]


def default_alpha_s(points: np.ndarray) -> float:
    """2x the median nearest-neighbor spacing of the set."""
    pts = np.asarray(points, dtype=float)
    if len(pts) < 2:
        raise EmptyInput("need >= 2 points to derive alpha_s")
    tree = cKDTree(pts)
    d, _ = tree.query(pts, k=2)
    return 2.0 * float(np.median(d[:, 1]))


def ncbe(points: np.ndarray, alpha_s: float) -> Boundary:
    """Slicing boundary estimation.

    For every axis (x, y for 2D input; x, y, z for 3D) the coordinate
    range is tiled by windows of width `alpha_s` centered at
    min + i*alpha_s; each window contributes its farthest point pair.
    Output points are deduplicated members of the input, never
    synthesized coordinates.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] not in (2, 3):
        raise EmptyInput("points must have shape (N, 2) or (N, 3)")
    if len(pts) == 0:
        raise EmptyInput("empty point set")
    if not alpha_s > 0:
        raise InvalidAlpha(f"alpha_s must be > 0, got {alpha_s}")

    center = pts.mean(axis=0)
    out = []
    for axis in range(pts.shape[1]):
        coord = pts[:, axis]
        lo, hi = float(coord.min()), float(coord.max())
        n_windows = int(np.ceil(max(hi - lo, 0.0) / alpha_s)) + 1
        for i in range(n_windows):
            sl = lo + i * alpha_s
            mask = np.abs(coord - sl) <= alpha_s / 2
            window = pts[mask]
            if len(window) == 0:
                continue
            if len(window) == 1:
                out.append(window[0])
                continue
            a, b = _farthest_pair(window)
            out.append(window[a])
            out.append(window[b])
    uniq = np.unique(np.asarray(out), axis=0)
    return Boundary(uniq, center, alpha_s)


def point_in_boundary(b: Boundary, p: np.ndarray, m: int, rule: str = "all") -> bool:
    """Center-closest-points membership test.

    `p` is inside when its distance to the cluster center beats the
    center distances of its `m` nearest boundary points: for ALL of them
    under the conservative default rule, for ANY under rule="any".
    """
    if len(b) == 0:
        raise EmptyBoundary("boundary has no points")
    if m < 1:
        raise ValueError("m must be >= 1")
    p = np.asarray(p, dtype=float)
    d_s = float(np.linalg.norm(p - b.center))
    d_pb = np.linalg.norm(b.points - p, axis=1)
    nearest = np.argsort(d_pb, kind="stable")[:m]
    d_n = np.linalg.norm(b.points[nearest] - b.center, axis=1)
    if rule == "all":
        return bool(np.all(d_s < d_n))
    if rule == "any":
        return bool(np.any(d_s < d_n))
    raise ValueError(f"unknown rule {rule!r}")


def cluster_border(a: Boundary, b: Boundary, eps_border: float,
                   cluster_a: int = 0, cluster_b: int = 1) -> Border:
    """Boundary points of each cluster within eps_border of the other's."""
    if not eps_border > 0:
        raise ValueError(f"eps_border must be > 0, got {eps_border}")
    pts = []
    if len(a) and len(b):
        tree_b = cKDTree(b.points)
        d_ab, _ = tree_b.query(a.points, k=1)
        pts.append(a.points[d_ab <= eps_border])
        tree_a = cKDTree(a.points)
        d_ba, _ = tree_a.query(b.points, k=1)
        pts.append(b.points[d_ba <= eps_border])
    if pts:
        merged = np.unique(np.vstack(pts), axis=0)
    else:
        merged = np.zeros((0, a.points.shape[1] if len(a) else 2))
    if len(merged) >= 2:
        i, j = _farthest_pair(merged)
        length = float(np.linalg.norm(merged[i] - merged[j]))
    else:
        length = 0.0
    midpoint = merged.mean(axis=0) if len(merged) else None
    return Border(cluster_a, cluster_b, merged, length, midpoint)


def are_neighbors(border: Border, l_b: float) -> bool:
    """Clusters are neighbors when they share a border of length >= l_b."""
    if not l_b > 0:
        raise ValueError(f"l_b must be > 0, got {l_b}")
    return border.length >= l_b
