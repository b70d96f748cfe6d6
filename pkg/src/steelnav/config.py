"""Pipeline configuration: JSON-backed, validated, with documented defaults."""
from __future__ import annotations

import copy
import json
from pathlib import Path

from .errors import ConfigError

SCHEMA_VERSION = 1

DEFAULTS = {
    "schema_version": SCHEMA_VERSION,
    "seed": 0,
    "cloud": {
        # pass-through window per axis, null disables the filter
        "passthrough": None,  # e.g. {"axis": "z", "lo": 0.0, "hi": 2.0}
        "voxel_leaf": None,  # meters, null disables downsampling
        "ransac": {
            "dist_thresh": 0.01,
            "max_iters": 500,
            "min_inlier_fraction": 0.2,
        },
    },
    "transform": {
        # camera -> robot base; identity by default
        "rotation": [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        "translation": [0.0, 0.0, 0.0],
    },
    "height": {
        "base_height": 0.0,
        "tol": 0.005,
    },
    "foot": {
        "width": 0.2,
        "length": 0.3,
        "tolerance": 0.02,
        "n_anchors": 5,
        "m_neighbors": 3,
    },
    "boundary": {
        "alpha_s": None,  # null -> 2x median nearest-neighbor spacing
        "eps_border": None,  # null -> 2 * alpha_s
        "l_b": 0.06,
    },
    "segmentation": {
        "n_cmin": 2,
        "n_cmax": 6,
        "max_iter": 200,
        "rel_tol": 1e-7,
        "restarts": 3,
    },
    "graph": {
        "d_min": None,  # null -> robot footprint length
    },
    "route": {
        "v_s": 0,
        "v_t": None,  # null -> highest vertex id
    },
    "planner": {
        "footprint_width": 0.04,
        "footprint_length": 0.05,
        "step": None,  # null -> footprint_width / 2
        "theta_step": 0.3,
        "goal_tol": None,  # null -> footprint_width / 4
        "goal_bias": 0.1,
        "max_iters": 5000,
        "n_candidates": 3,
        "m_neighbors": 5,
        # "any" accepts a point when any of its m nearest boundary points
        # is farther from the cluster center; "all" is far more conservative
        # and rejects most of a thin bar's interior, so it is unusable for
        # corridor planning (it remains the default for point_in_boundary).
        "rule": "any",
    },
}


def _merge(defaults, override, path=""):
    if not isinstance(override, dict):
        raise ConfigError(f"expected object at {path or 'top level'}")
    merged = copy.deepcopy(defaults)
    for key, value in override.items():
        if key not in defaults:
            raise ConfigError(f"unknown config key {path + key!r}")
        if isinstance(defaults[key], dict) and defaults[key]:
            merged[key] = _merge(defaults[key], value, path + key + ".")
        else:
            merged[key] = value
    return merged


def _require(cond, msg):
    if not cond:
        raise ConfigError(msg)


def validate(cfg: dict) -> dict:
    _require(cfg["schema_version"] == SCHEMA_VERSION,
             f"unsupported schema_version {cfg['schema_version']}")
    pt = cfg["cloud"]["passthrough"]
    if pt is not None:
        _require(set(pt) == {"axis", "lo", "hi"},
                 "passthrough needs exactly axis/lo/hi")
        _require(pt["axis"] in ("x", "y", "z"), "passthrough axis must be x, y, or z")
        _require(pt["lo"] <= pt["hi"], "passthrough lo must be <= hi")
    leaf = cfg["cloud"]["voxel_leaf"]
    _require(leaf is None or leaf > 0, "voxel_leaf must be positive")
    _require(cfg["cloud"]["ransac"]["dist_thresh"] > 0, "ransac dist_thresh must be > 0")
    _require(cfg["foot"]["width"] > 0 and cfg["foot"]["length"] > 0,
             "foot dimensions must be positive")
    _require(cfg["foot"]["tolerance"] >= 0, "foot tolerance must be >= 0")
    _require(cfg["height"]["tol"] >= 0, "height tol must be >= 0")
    b = cfg["boundary"]
    _require(b["alpha_s"] is None or b["alpha_s"] > 0, "alpha_s must be positive")
    _require(b["eps_border"] is None or b["eps_border"] > 0,
             "eps_border must be positive")
    _require(b["l_b"] > 0, "l_b must be positive")
    s = cfg["segmentation"]
    _require(s["n_cmin"] >= 2 and s["n_cmax"] >= s["n_cmin"],
             "need n_cmax >= n_cmin >= 2")
    g = cfg["graph"]
    _require(g["d_min"] is None or g["d_min"] >= 0, "d_min must be >= 0")
    p = cfg["planner"]
    _require(p["footprint_width"] > 0 and p["footprint_length"] > 0,
             "planner footprint dimensions must be positive")
    _require(0.0 <= p["goal_bias"] <= 1.0, "goal_bias must be in [0, 1]")
    _require(p["rule"] in ("all", "any"), "planner rule must be 'all' or 'any'")
    return cfg


def load_config(path=None) -> dict:
    """Load and validate a config file; missing keys fall back to defaults."""
    if path is None:
        return validate(copy.deepcopy(DEFAULTS))
    try:
        raw = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from None
    return validate(_merge(DEFAULTS, raw))


def default_config_text() -> str:
    return json.dumps(DEFAULTS, indent=2, sort_keys=True) + "\n"
