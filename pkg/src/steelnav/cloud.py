"""Point cloud ingestion and geometric pre-processing.

Clouds are immutable (N, 3) float64 arrays tagged with the coordinate
frame they live in.  All operations are pure functions; randomized ones
take an explicit seed.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    DegenerateCloud,
    InvalidLeaf,
    InvalidRange,
    NoPlane,
    ParseError,
    WrongFrame,
)

_AXIS_INDEX = {"x": 0, "y": 1, "z": 2}


class Frame(enum.Enum):
    CAMERA = "camera"
    ROBOT_BASE = "robot_base"
    PROJECTED_2D = "projected_2d"


@dataclass(frozen=True)
class PointCloud:
    points: np.ndarray  # (N, 3) float64, all finite
    frame: Frame = Frame.CAMERA

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.size == 0:
            pts = pts.reshape(0, 3)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise ValueError("points must have shape (N, 3)")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points must be finite")
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return self.points.shape[0]

    @property
    def xy(self) -> np.ndarray:
        return self.points[:, :2]


@dataclass(frozen=True)
class PlanePatch:
    """RANSAC-extracted plane: inlier cloud plus n.p = offset model."""

    inliers: PointCloud
    normal: np.ndarray  # unit (3,)
    offset: float
    centroid: np.ndarray  # (3,), mean of inliers

    def __post_init__(self):
        n = np.asarray(self.normal, dtype=float)
        if abs(np.linalg.norm(n) - 1.0) > 1e-9:
            raise ValueError("normal must be a unit vector")
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "centroid", np.asarray(self.centroid, dtype=float))


@dataclass(frozen=True)
class RigidTransform:
    rotation: np.ndarray  # (3, 3) orthonormal, det +1
    translation: np.ndarray  # (3,)

    def __post_init__(self):
        r = np.asarray(self.rotation, dtype=float)
        t = np.asarray(self.translation, dtype=float).reshape(3)
        if r.shape != (3, 3):
            raise ValueError("rotation must be 3x3")
        if np.max(np.abs(r.T @ r - np.eye(3))) > 1e-9:
            raise ValueError("rotation must be orthonormal")
        if abs(np.linalg.det(r) - 1.0) > 1e-9:
            raise ValueError("rotation must be proper (det +1)")
        object.__setattr__(self, "rotation", r)
        object.__setattr__(self, "translation", t)

    @classmethod
    def identity(cls) -> "RigidTransform":
        return cls(np.eye(3), np.zeros(3))

    def apply(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        return pts @ self.rotation.T + self.translation


def _parse_float_triple(fields, lineno):
    if len(fields) < 3:
        raise ParseError(f"expected 3 coordinates, got {len(fields)}", line=lineno)
    try:
        vals = [float(fields[0]), float(fields[1]), float(fields[2])]
    except ValueError as exc:
        raise ParseError(str(exc), line=lineno) from None
    if not all(np.isfinite(v) for v in vals):
        raise ParseError("non-finite coordinate", line=lineno)
    return vals


def _load_csv(lines):
    pts = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        pts.append(_parse_float_triple(line.split(","), lineno))
    return pts


def _load_pcd(lines):
    """Minimal PCD reader: ascii data with x y z among the fields."""
    fields = None
    data_start = None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, rest = line.partition(" ")
        key = key.upper()
        if key == "FIELDS":
            fields = rest.split()
        elif key == "DATA":
            if rest.strip().lower() != "ascii":
                raise ParseError("only DATA ascii is supported", line=lineno)
            data_start = lineno
            break
    if fields is None or data_start is None:
        raise ParseError("missing FIELDS or DATA header")
    try:
        ix, iy, iz = fields.index("x"), fields.index("y"), fields.index("z")
    except ValueError:
        raise ParseError("FIELDS must contain x y z") from None

    pts = []
    for lineno, raw in enumerate(lines[data_start:], start=data_start + 1):
        line = raw.strip()
        if not line:
            continue
        cols = line.split()
        if max(ix, iy, iz) >= len(cols):
            raise ParseError("row shorter than declared fields", line=lineno)
        pts.append(_parse_float_triple([cols[ix], cols[iy], cols[iz]], lineno))
    return pts


def _load_ply(lines):
    """Minimal PLY reader: ascii format, vertex element with x, y, z."""
    if not lines or lines[0].strip() != "ply":
        raise ParseError("not a PLY file", line=1)
    n_vertex = None
    props = []
    in_vertex = False
    header_end = None
    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if line.startswith("format"):
            if "ascii" not in line:
                raise ParseError("only ascii PLY is supported", line=lineno)
        elif line.startswith("element"):
            parts = line.split()
            in_vertex = parts[1] == "vertex"
            if in_vertex:
                n_vertex = int(parts[2])
        elif line.startswith("property") and in_vertex:
            props.append(line.split()[-1])
        elif line == "end_header":
            header_end = lineno
            break
    if n_vertex is None or header_end is None:
        raise ParseError("missing vertex element or end_header")
    try:
        ix, iy, iz = props.index("x"), props.index("y"), props.index("z")
    except ValueError:
        raise ParseError("vertex element must have x, y, z properties") from None

    pts = []
    for lineno, raw in enumerate(lines[header_end:header_end + n_vertex],
                                 start=header_end + 1):
        cols = raw.split()
        if max(ix, iy, iz) >= len(cols):
            raise ParseError("vertex row shorter than property list", line=lineno)
        pts.append(_parse_float_triple([cols[ix], cols[iy], cols[iz]], lineno))
    if len(pts) != n_vertex:
        raise ParseError(f"expected {n_vertex} vertices, got {len(pts)}")
    return pts


_LOADERS = {"csv": _load_csv, "pcd": _load_pcd, "ply": _load_ply}


def load_cloud(path, fmt: str | None = None) -> PointCloud:
    """Load a cloud from CSV, ascii PCD, or ascii PLY.

    The format defaults to the file suffix.  NaN/Inf coordinates are a
    hard ParseError (with the offending line), never silently dropped.
    """
    path = Path(path)
    if fmt is None:
        fmt = path.suffix.lstrip(".").lower()
    if fmt not in _LOADERS:
        raise ParseError(f"unsupported format {fmt!r}")
    lines = path.read_text().splitlines()
    pts = _LOADERS[fmt](lines)
    return PointCloud(np.asarray(pts, dtype=float).reshape(-1, 3), Frame.CAMERA)


def passthrough_filter(cloud: PointCloud, axis: str, lo: float, hi: float) -> PointCloud:
    """Keep points whose coordinate on `axis` lies in [lo, hi]."""
    if axis not in _AXIS_INDEX:
        raise InvalidRange(f"unknown axis {axis!r}")
    if lo > hi:
        raise InvalidRange(f"lo ({lo}) > hi ({hi})")
    coord = cloud.points[:, _AXIS_INDEX[axis]]
    mask = (coord >= lo) & (coord <= hi)
    return PointCloud(cloud.points[mask], cloud.frame)


def voxel_downsample(cloud: PointCloud, leaf: float) -> PointCloud:
    """Replace each occupied voxel of side `leaf` by the centroid of its members.

    Output is sorted by voxel index, which makes the operation
    deterministic regardless of input order.
    """
    if leaf <= 0:
        raise InvalidLeaf(f"leaf must be > 0, got {leaf}")
    if len(cloud) == 0:
        return cloud
    idx = np.floor(cloud.points / leaf).astype(np.int64)
    uniq, inverse = np.unique(idx, axis=0, return_inverse=True)
    sums = np.zeros((len(uniq), 3))
    np.add.at(sums, inverse, cloud.points)
    counts = np.bincount(inverse, minlength=len(uniq)).astype(float)
    return PointCloud(sums / counts[:, None], cloud.frame)


def _is_collinear(pts: np.ndarray, tol: float = 1e-12) -> bool:
    d = pts - pts.mean(axis=0)
    # rank <= 1 means all points lie on one line (or coincide)
    s = np.linalg.svd(d, compute_uv=False)
    return s.size < 2 or s[1] <= tol * max(s[0], 1.0)


def extract_plane_ransac(
    cloud: PointCloud,
    dist_thresh: float,
    max_iters: int = 500,
    rng_seed: int = 0,
    min_inlier_fraction: float = 0.2,
) -> PlanePatch:
    """RANSAC plane fit maximizing the inlier count over `max_iters` samples.

    Deterministic given `rng_seed`.  Raises DegenerateCloud for fewer than
    3 points or a collinear cloud, NoPlane when the best inlier fraction
    falls below `min_inlier_fraction`.
    """
    pts = cloud.points
    n = len(pts)
    if n < 3 or _is_collinear(pts):
        raise DegenerateCloud(f"need >= 3 non-collinear points, got {n}")
    rng = np.random.default_rng(rng_seed)
    best_count = -1
    best = None  # (normal, offset)
    for _ in range(max_iters):
        i, j, k = rng.choice(n, size=3, replace=False)
        normal = np.cross(pts[j] - pts[i], pts[k] - pts[i])
        norm = np.linalg.norm(normal)
        if norm < 1e-12:
            continue
        normal = normal / norm
        offset = float(normal @ pts[i])
        count = int(np.count_nonzero(np.abs(pts @ normal - offset) <= dist_thresh))
        if count > best_count:
            best_count = count
            best = (normal, offset)
    if best is None or best_count < min_inlier_fraction * n:
        raise NoPlane(f"best inlier fraction {max(best_count, 0) / n:.3f} "
                      f"below {min_inlier_fraction}")
    normal, offset = best
    # sign convention: first non-negligible component positive
    for c in normal:
        if abs(c) > 1e-12:
            if c < 0:
                normal, offset = -normal, -offset
            break
    mask = np.abs(pts @ normal - offset) <= dist_thresh
    inliers = PointCloud(pts[mask], cloud.frame)
    return PlanePatch(inliers, normal, offset, inliers.points.mean(axis=0))


def transform_point(p: np.ndarray, t: RigidTransform) -> np.ndarray:
    """Apply the rigid transform: R.p + t."""
    return t.rotation @ np.asarray(p, dtype=float) + t.translation


def transform_cloud(cloud: PointCloud, t: RigidTransform,
                    frame: Frame = Frame.ROBOT_BASE) -> PointCloud:
    return PointCloud(t.apply(cloud.points), frame)


def project_to_2d(cloud: PointCloud) -> PointCloud:
    """Drop z (set to 0) and retag as PROJECTED_2D.  Idempotent."""
    if cloud.frame not in (Frame.ROBOT_BASE, Frame.PROJECTED_2D):
        raise WrongFrame(f"cannot project from frame {cloud.frame}")
    pts = cloud.points.copy()
    pts[:, 2] = 0.0
    return PointCloud(pts, Frame.PROJECTED_2D)
