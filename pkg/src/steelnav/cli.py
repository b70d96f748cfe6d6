"""Pipeline orchestrator: ingestion, switching, navigation, standalone solver.

Artifacts are JSON (schema-versioned, sorted keys) with sibling SVG
figures drawn only from that JSON's data.  Exit codes: 0 success,
1 error, 2 partial success (some route edges could not be planned).
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import boundary as bd
from . import cloud as cl
from . import config as cfgmod
from . import graph as gr
from . import route as rt
from . import segmentation as seg
from . import svgplot
from . import switching as sw
from . import synth
from .errors import NoPlane, DegenerateCloud, SteelNavError
from .planner import Footprint, RrtParams, plan_route

SCHEMA_VERSION = cfgmod.SCHEMA_VERSION


def _write_json(path: Path, payload: dict):
    payload = {"schema_version": SCHEMA_VERSION, **payload}
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _preprocess(cloud, cfg):
    pt = cfg["cloud"]["passthrough"]
    if pt is not None:
        cloud = cl.passthrough_filter(cloud, pt["axis"], pt["lo"], pt["hi"])
    leaf = cfg["cloud"]["voxel_leaf"]
    if leaf is not None:
        cloud = cl.voxel_downsample(cloud, leaf)
    return cloud


def _transform(cfg) -> cl.RigidTransform:
    return cl.RigidTransform(np.asarray(cfg["transform"]["rotation"]),
                             np.asarray(cfg["transform"]["translation"]))


def _alpha_for(points, cfg) -> float:
    alpha = cfg["boundary"]["alpha_s"]
    return alpha if alpha is not None else bd.default_alpha_s(points)


# --- switching pipeline ----------------------------------------------------

def run_switching(input_path, cfg, out_dir: Path) -> sw.SwitchDecision:
    out_dir.mkdir(parents=True, exist_ok=True)
    cloud = _preprocess(cl.load_cloud(input_path), cfg)

    plane = None
    try:
        plane = cl.extract_plane_ransac(
            cloud,
            dist_thresh=cfg["cloud"]["ransac"]["dist_thresh"],
            max_iters=cfg["cloud"]["ransac"]["max_iters"],
            rng_seed=cfg["seed"],
            min_inlier_fraction=cfg["cloud"]["ransac"]["min_inlier_fraction"],
        )
    except (NoPlane, DegenerateCloud):
        plane = None

    s_pa = sw.plane_available(plane.inliers if plane else None)
    candidates = []
    pose = None
    s_hc = False
    bound = None
    if s_pa:
        alpha = _alpha_for(plane.inliers.points, cfg)
        bound = bd.ncbe(plane.inliers.points, alpha)
        foot = sw.FootParams(
            width=cfg["foot"]["width"], length=cfg["foot"]["length"],
            tolerance=cfg["foot"]["tolerance"], n_anchors=cfg["foot"]["n_anchors"],
            m_neighbors=cfg["foot"]["m_neighbors"])
        candidates = sw.area_check_candidates(bound, plane.centroid, plane.normal, foot)
        for cand in candidates:
            if cand.passed:
                pose = cand.pose
                break
        if pose is not None:
            s_hc = sw.height_available(plane.centroid, _transform(cfg),
                                       cfg["height"]["base_height"],
                                       cfg["height"]["tol"])
    decision = sw.switch_decision(s_pa, pose is not None, s_hc, pose)

    payload = {
        "decision": decision.to_json(),
        "plane": None if plane is None else {
            "normal": [float(v) for v in plane.normal],
            "offset": plane.offset,
            "centroid": [float(v) for v in plane.centroid],
            "inlier_count": len(plane.inliers),
        },
        "boundary": bound.to_json() if bound is not None else None,
        "candidate_rectangles": [c.to_json() for c in candidates],
    }
    _write_json(out_dir / "switching.json", payload)
    _render_switching_svg(out_dir / "switching.svg", payload)
    return decision


def _render_switching_svg(path: Path, payload: dict):
    bound = payload["boundary"]
    if bound is None or not bound["points"]:
        path.write_text(svgplot.SvgCanvas(((0, 0), (1, 1))).render())
        return
    pts = np.asarray(bound["points"])[:, :2]
    canvas = svgplot.SvgCanvas(svgplot.bounds_of(pts))
    canvas.points(pts, radius=1.5, fill="#555555")
    centroid = payload["plane"]["centroid"][:2]
    canvas.points([centroid], radius=4, fill="#000000")
    for i, cand in enumerate(payload["candidate_rectangles"]):
        col = "#2ca02c" if cand["passed"] else svgplot.color(i + 3)
        corners = np.asarray(cand["corners"])[:, :2]
        for a, b in ((0, 1), (1, 3), (3, 2), (2, 0)):
            canvas.line(corners[a], corners[b], stroke=col, width=2.0)
    pose = payload["decision"]["pose"]
    if pose is not None:
        p = np.asarray(pose["position"][:2])
        canvas.points([p], radius=5, fill="#d62728")
        canvas.arrow(p, p + 0.1 * np.asarray(pose["e_x"][:2]), stroke="#d62728")
        canvas.arrow(p, p + 0.1 * np.asarray(pose["e_y"][:2]), stroke="#2ca02c")
    path.write_text(canvas.render())


# --- navigation pipeline ---------------------------------------------------

def run_navigation(input_path, cfg, out_dir: Path) -> int:
    """Full pipeline; returns the process exit code (0 full, 2 partial)."""
    out_dir.mkdir(parents=True, exist_ok=True)
    cloud = _preprocess(cl.load_cloud(input_path), cfg)
    cloud = cl.transform_cloud(cloud, _transform(cfg))
    flat = cl.project_to_2d(cloud)
    xy = flat.xy

    alpha = _alpha_for(xy, cfg)
    eps_border = cfg["boundary"]["eps_border"] or 2.0 * alpha
    s = cfg["segmentation"]
    cs = seg.segment_structure(
        xy, s["n_cmin"], s["n_cmax"], l_b=cfg["boundary"]["l_b"],
        eps_border=eps_border, alpha_s=alpha, seed=cfg["seed"],
        max_iter=s["max_iter"], rel_tol=s["rel_tol"], restarts=s["restarts"])

    d_min = cfg["graph"]["d_min"]
    if d_min is None:
        d_min = cfg["planner"]["footprint_length"]
    g = gr.build_graph(cs, d_min)
    if g.component_count > 1:
        print(f"warning: structure graph has {g.component_count} components",
              file=sys.stderr)

    v_s = cfg["route"]["v_s"]
    v_t = cfg["route"]["v_t"]
    if v_t is None:
        v_t = max(g.vertex_ids())
    route = rt.vocpp(g, v_s, v_t)

    fp = Footprint(cfg["planner"]["footprint_width"],
                   cfg["planner"]["footprint_length"])
    p = cfg["planner"]
    params = RrtParams(
        step=p["step"] if p["step"] is not None else fp.width / 2.0,
        theta_step=p["theta_step"],
        goal_tol=p["goal_tol"] if p["goal_tol"] is not None else fp.width / 4.0,
        goal_bias=p["goal_bias"], max_iters=p["max_iters"],
        n_candidates=p["n_candidates"], m_neighbors=p["m_neighbors"],
        rule=p["rule"])
    boundaries = [b for b in cs.boundaries if len(b) > 0]
    result = plan_route(route, g, boundaries, fp, params, seed=cfg["seed"])

    # stage artifacts
    cloud_json = {"points": [[float(v) for v in pt] for pt in flat.points],
                  "frame": flat.frame.value}
    _write_json(out_dir / "cloud.json", cloud_json)
    clusters_json = cs.to_json()
    clusters_json["alpha_s"] = alpha
    clusters_json["eps_border"] = eps_border
    clusters_json["boundaries"] = [
        b.to_json(cluster_id=i) for i, b in enumerate(cs.boundaries)]
    _write_json(out_dir / "clusters.json", clusters_json)
    graph_json = g.to_json()
    _write_json(out_dir / "graph.json", graph_json)
    route_json = route.to_json()
    route_json["v_s"], route_json["v_t"] = v_s, v_t
    route_json["covered_edges"] = len(g.edges)
    _write_json(out_dir / "route.json", route_json)
    motion_json = result.to_json()
    _write_json(out_dir / "motion.json", motion_json)

    _render_navigation_svgs(out_dir, cloud_json, clusters_json, graph_json,
                            route_json, motion_json)
    if result.failures:
        manifest = {"failed_edges": [list(f.edge) for f in result.failures]}
        _write_json(out_dir / "failures.json", manifest)
        return 2
    return 0


def _render_navigation_svgs(out_dir, cloud_json, clusters_json, graph_json,
                            route_json, motion_json):
    pts = np.asarray(cloud_json["points"])[:, :2]
    bounds = svgplot.bounds_of(pts)

    canvas = svgplot.SvgCanvas(bounds)
    canvas.points(pts, radius=1.0, fill="#444444")
    (out_dir / "cloud.svg").write_text(canvas.render())

    canvas = svgplot.SvgCanvas(bounds)
    labels = np.asarray(clusters_json["labels"])
    for i in range(clusters_json["n_c"]):
        canvas.points(pts[labels == i], radius=1.0, fill=svgplot.color(i))
    (out_dir / "segmentation.svg").write_text(canvas.render())

    canvas = svgplot.SvgCanvas(bounds)
    for b in clusters_json["boundaries"]:
        if b["points"]:
            canvas.points(np.asarray(b["points"])[:, :2], radius=1.5,
                          fill=svgplot.color(b["cluster_id"]))
    pos = {v["id"]: np.asarray(v["pos"]) for v in graph_json["vertices"]}
    for e in graph_json["edges"]:
        canvas.line(pos[e["u"]], pos[e["v"]], stroke="#000000", width=1.5)
    for v in graph_json["vertices"]:
        canvas.points([pos[v["id"]]], radius=4, fill="#000000")
        canvas.text(pos[v["id"]], str(v["id"]))
    (out_dir / "graph.svg").write_text(canvas.render())

    canvas = svgplot.SvgCanvas(bounds)
    for e in graph_json["edges"]:
        canvas.line(pos[e["u"]], pos[e["v"]], stroke="#bbbbbb", width=1.0)
    walk = route_json["walk"]
    for i in range(len(walk) - 1):
        canvas.arrow(pos[walk[i]], pos[walk[i + 1]])
        mid = (pos[walk[i]] + pos[walk[i + 1]]) / 2
        canvas.text(mid, str(i + 1), size=10, fill="#1f77b4")
    (out_dir / "route.svg").write_text(canvas.render())

    canvas = svgplot.SvgCanvas(bounds)
    canvas.points(pts, radius=0.8, fill="#dddddd")
    for i, path in enumerate(motion_json["paths"]):
        configs = np.asarray(path["configs"])
        canvas.polyline(configs[:, :2], stroke=svgplot.color(i), width=2.0)
    (out_dir / "motion.svg").write_text(canvas.render())


# --- standalone solver -----------------------------------------------------

def load_edge_list(path) -> rt.Multigraph:
    """Parse 'u v w' lines (ints where possible) into a multigraph."""
    edges = []
    vertices = []
    seen = set()
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise SteelNavError(f"line {lineno}: expected 'u v w'")
        u, v = parts[0], parts[1]
        try:
            u, v = int(u), int(v)
        except ValueError:
            pass
        w = float(parts[2])
        for x in (u, v):
            if x not in seen:
                seen.add(x)
                vertices.append(x)
        edges.append((u, v, w))
    return rt.Multigraph.build(vertices, edges)


def solve_graph(path, v_s, v_t, oracle=False, out=None) -> dict:
    g = load_edge_list(path)
    try:
        v_s_key = int(v_s)
        v_t_key = int(v_t)
    except ValueError:
        v_s_key, v_t_key = v_s, v_t
    plan = rt.vocpp(g, v_s_key, v_t_key)
    payload = plan.to_json()
    if oracle:
        ref = rt.brute_force_ocpp(g, v_s_key, v_t_key)
        payload["oracle_length"] = ref.total_length
        payload["optimality_gap"] = (
            (plan.total_length - ref.total_length) / ref.total_length
            if ref.total_length > 0 else 0.0)
    if out is not None:
        _write_json(Path(out), payload)
    return payload


# --- synth command -----------------------------------------------------------

def run_synth(shape, out_dir: Path, bar_length, bar_width, density, noise, seed):
    out_dir.mkdir(parents=True, exist_ok=True)
    spec = synth.StructureSpec(synth.Shape(shape), bar_length, bar_width,
                               density, noise, seed)
    cloud, truth = synth.generate(spec)
    lines = [",".join(repr(float(c)) for c in p) for p in cloud.points]
    (out_dir / "cloud.csv").write_text("\n".join(lines) + "\n")
    _write_json(out_dir / "ground_truth.json", truth.to_json())


# --- argparse wiring ---------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="steelnav",
        description="Lattice-structure inspection: switching control and "
                    "route/motion planning from point clouds.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("init", help="write a config template with all defaults")
    p.add_argument("--out", default="steelnav.json")

    p = sub.add_parser("switching", help="run the switching-control pipeline")
    p.add_argument("--input", required=True)
    p.add_argument("--config", default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("navigate", help="run the full navigation pipeline")
    p.add_argument("--input", required=True)
    p.add_argument("--config", default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("solve", help="solve the open postman route on an edge list")
    p.add_argument("--input", required=True)
    p.add_argument("--vs", required=True)
    p.add_argument("--vt", required=True)
    p.add_argument("--oracle", action="store_true",
                   help="also run the exact brute-force solver (<= 14 edges)")
    p.add_argument("--out", default=None)

    p = sub.add_parser("synth", help="generate a synthetic structure cloud")
    p.add_argument("--shape", required=True,
                   choices=[s.value for s in synth.Shape])
    p.add_argument("--out", required=True)
    p.add_argument("--bar-length", type=float, default=1.0)
    p.add_argument("--bar-width", type=float, default=0.1)
    p.add_argument("--density", type=float, default=4000.0)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "init":
            Path(args.out).write_text(cfgmod.default_config_text())
            return 0
        if args.command == "synth":
            run_synth(args.shape, Path(args.out), args.bar_length, args.bar_width,
                      args.density, args.noise, args.seed)
            return 0
        if args.command == "solve":
            payload = solve_graph(args.input, args.vs, args.vt,
                                  oracle=args.oracle, out=args.out)
            print(json.dumps(payload, indent=2, sort_keys=True))
            return 0
        cfg = cfgmod.load_config(args.config)
        if args.seed is not None:
            cfg["seed"] = args.seed
        if args.command == "switching":
            run_switching(args.input, cfg, Path(args.out))
            return 0
        if args.command == "navigate":
            return run_navigation(args.input, cfg, Path(args.out))
    except SteelNavError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 1


if __name__ == "__main__":
    sys.exit(main())
