"""Variant open Chinese Postman solver.

The graph is augmented with duplicated shortest-path edges until an
Euler trail from v_s to v_t exists, then the trail is extracted with
Hierholzer's method.  A subset-enumeration oracle gives the exact
optimum on small instances.
"""
from __future__ import annotations

import enum
import heapq
import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    Disconnected,
    DisconnectedEndpoints,
    EmptyGraph,
    OddCardinality,
    ParityViolation,
    TooLarge,
    UnknownVertex,
)

_MATCHING_DP_LIMIT = 16


@dataclass(frozen=True)
class Multigraph:
    """Undirected weighted multigraph over hashable, orderable vertex ids."""

    vertices: tuple
    edges: tuple  # of (u, v, w)

    @classmethod
    def build(cls, vertices, edges) -> "Multigraph":
        vertices = tuple(vertices)
        vset = set(vertices)
        norm = []
        for u, v, w in edges:
            if u not in vset or v not in vset:
                raise UnknownVertex(f"edge ({u}, {v}) references unknown vertex")
            if u == v:
                raise ValueError("self-loops are not allowed")
            if w < 0:
                raise ValueError("edge weights must be non-negative")
            norm.append((u, v, float(w)))
        return cls(vertices, tuple(norm))

    @classmethod
    def from_structure_graph(cls, g) -> "Multigraph":
        return cls.build(g.vertex_ids(), [(e.u, e.v, e.weight) for e in g.edges])

    def adjacency(self):
        adj = {v: [] for v in self.vertices}
        for idx, (u, v, w) in enumerate(self.edges):
            adj[u].append((v, idx, w))
            adj[v].append((u, idx, w))
        return adj

    def degrees(self):
        deg = {v: 0 for v in self.vertices}
        for u, v, _ in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def total_weight(self) -> float:
        return float(sum(w for _, _, w in self.edges))


def _as_multigraph(g) -> Multigraph:
    if isinstance(g, Multigraph):
        return g
    return Multigraph.from_structure_graph(g)


class AugmentCase(enum.Enum):
    EULERIAN = "EulerianCase"
    BOTH_ODD = "BothOdd"
    TARGET_ODD = "TargetOdd"
    SOURCE_ODD = "SourceOdd"
    BOTH_EVEN = "BothEven"


@dataclass(frozen=True)
class AugmentedGraph:
    base: Multigraph
    duplicated: tuple  # of (u, v, w, base_edge_idx)
    provenance: AugmentCase

    def combined_edges(self):
        """Base edges then duplicates, each tagged with its base edge index."""
        out = [(u, v, w, i) for i, (u, v, w) in enumerate(self.base.edges)]
        out.extend(self.duplicated)
        return out

    def odd_set(self):
        deg = {v: 0 for v in self.base.vertices}
        for u, v, _, _ in self.combined_edges():
            deg[u] += 1
            deg[v] += 1
        return {v for v, d in deg.items() if d % 2 == 1}


@dataclass(frozen=True)
class RoutePlan:
    walk: tuple  # ordered vertex ids, starts v_s, ends v_t
    edge_visits: tuple  # per base edge, visit count >= 1
    total_length: float
    provenance: str = ""
    optimality_gap: float | None = None

    def to_json(self):
        d = {
            "walk": list(self.walk),
            "edge_visits": list(self.edge_visits),
            "total_length": self.total_length,
            "provenance": self.provenance,
        }
        if self.optimality_gap is not None:
            d["optimality_gap"] = self.optimality_gap
        return d


def dijkstra(g, src):
    """Shortest-path distances and predecessor map from `src`.

    Returns (dist, pred) where pred[v] = (previous vertex, edge index).
    Unreachable vertices get dist infinity.  Equal-length paths resolve
    to the smallest predecessor id.
    """
    mg = _as_multigraph(g)
    if src not in set(mg.vertices):
        raise UnknownVertex(f"unknown vertex {src!r}")
    adj = mg.adjacency()
    dist = {v: float("inf") for v in mg.vertices}
    pred = {v: None for v in mg.vertices}
    dist[src] = 0.0
    heap = [(0.0, src)]
    done = set()
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        for v, idx, w in adj[u]:
            nd = d + w
            if nd < dist[v] - 1e-15:
                dist[v] = nd
                pred[v] = (u, idx)
                heapq.heappush(heap, (nd, v))
            elif abs(nd - dist[v]) <= 1e-15 and pred[v] is not None and u < pred[v][0]:
                pred[v] = (u, idx)
    return dist, pred


def _path_edges(pred, src, dst, mg):
    """Base edge indices along the shortest path src -> dst."""
    out = []
    v = dst
    while v != src:
        if pred[v] is None:
            raise Disconnected(f"no path to {dst!r}")
        u, idx = pred[v]
        out.append(idx)
        v = u
    out.reverse()
    return out


def odd_vertices(g):
    mg = _as_multigraph(g)
    return {v for v, d in mg.degrees().items() if d % 2 == 1}


def min_weight_pairing(odd, metric):
    """Minimum-weight perfect pairing of `odd` under distance map `metric`.

    Exact bitmask DP up to 16 vertices; greedy nearest-pair with 2-opt
    swap improvement beyond.  metric[(u, v)] must be finite for all pairs.
    """
    odd = sorted(odd)
    n = len(odd)
    if n % 2 != 0:
        raise OddCardinality(f"odd set has odd cardinality {n}")
    if n == 0:
        return [], 0.0

    def d(i, j):
        val = metric[(odd[i], odd[j])]
        if not np.isfinite(val):
            raise Disconnected(f"no finite distance between {odd[i]!r} and {odd[j]!r}")
        return val

    if n <= _MATCHING_DP_LIMIT:
        full = (1 << n) - 1
        best = [float("inf")] * (full + 1)
        choice = [None] * (full + 1)
        best[0] = 0.0
        for mask in range(1, full + 1):
            if bin(mask).count("1") % 2:
                continue
            i = (mask & -mask).bit_length() - 1
            for j in range(i + 1, n):
                if not mask & (1 << j):
                    continue
                sub = mask & ~(1 << i) & ~(1 << j)
                cost = best[sub] + d(i, j)
                if cost < best[mask]:
                    best[mask] = cost
                    choice[mask] = (i, j)
        pairs = []
        mask = full
        while mask:
            i, j = choice[mask]
            pairs.append((odd[i], odd[j]))
            mask &= ~(1 << i) & ~(1 << j)
        return pairs, float(best[full])

    # greedy nearest pair, then 2-opt pair swaps
    remaining = list(range(n))
    pairs_idx = []
    while remaining:
        best_pair = min(
            ((d(i, j), i, j) for i, j in itertools.combinations(remaining, 2)),
            key=lambda t: (t[0], t[1], t[2]),
        )
        _, i, j = best_pair
        pairs_idx.append((i, j))
        remaining.remove(i)
        remaining.remove(j)
    improved = True
    while improved:
        improved = False
        for a in range(len(pairs_idx)):
            for b in range(a + 1, len(pairs_idx)):
                (i, j), (k, l) = pairs_idx[a], pairs_idx[b]
                cur = d(i, j) + d(k, l)
                for alt in (((i, k), (j, l)), ((i, l), (j, k))):
                    cost = d(*alt[0]) + d(*alt[1])
                    if cost < cur - 1e-15:
                        pairs_idx[a], pairs_idx[b] = alt
                        cur = cost
                        improved = True
    total = sum(d(i, j) for i, j in pairs_idx)
    return [(odd[i], odd[j]) for i, j in pairs_idx], float(total)


def _check_connected(mg: Multigraph, endpoints):
    """All edge-bearing vertices plus the endpoints must share one component."""
    deg = mg.degrees()
    relevant = {v for v, dg in deg.items() if dg > 0} | set(endpoints)
    if len(relevant) <= 1:
        return
    adj = mg.adjacency()
    start = next(iter(sorted(relevant)))
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for v, _, _ in adj[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    if not relevant <= seen:
        raise DisconnectedEndpoints(
            "endpoints and edge-bearing vertices are not in one component")


def augment_for_open_trail(g, v_s, v_t) -> AugmentedGraph:
    """Duplicate shortest-path edges until odd degrees sit exactly at {v_s, v_t}.

    Case analysis on the odd-vertex set: an Eulerian input gets the
    shortest v_s-v_t path duplicated; an even endpoint is first tied to
    its nearest odd vertex (or, with both endpoints even, to the pair of
    odd vertices with minimal joint distance); the remaining odd
    vertices are fixed by an exact minimum-weight pairing over
    shortest-path distances.
    """
    mg = _as_multigraph(g)
    vset = set(mg.vertices)
    if v_s not in vset or v_t not in vset:
        raise UnknownVertex(f"unknown endpoint {v_s!r} or {v_t!r}")
    if not mg.edges:
        raise EmptyGraph("graph has no edges")
    _check_connected(mg, (v_s, v_t))

    s_ov = odd_vertices(mg)
    sp = {}  # per-source (dist, pred) cache

    def shortest(src):
        if src not in sp:
            sp[src] = dijkstra(mg, src)
        return sp[src]

    def dup_path(src, dst):
        dist, pred = shortest(src)
        return [(mg.edges[i][0], mg.edges[i][1], mg.edges[i][2], i)
                for i in _path_edges(pred, src, dst, mg)]

    duplicated = []
    if not s_ov:
        case = AugmentCase.EULERIAN
        if v_s != v_t:
            duplicated.extend(dup_path(v_s, v_t))
        s_mov = set()
    elif v_s == v_t:
        # circuit extension: every odd vertex is fixed by the pairing
        case = AugmentCase.BOTH_EVEN
        s_mov = set(s_ov)
    elif v_s in s_ov and v_t in s_ov:
        case = AugmentCase.BOTH_ODD
        s_mov = s_ov - {v_s, v_t}
    elif v_s not in s_ov and v_t in s_ov:
        case = AugmentCase.TARGET_ODD
        dist, _ = shortest(v_s)
        v_c = min((c for c in s_ov if c != v_t), key=lambda c: (dist[c], c))
        duplicated.extend(dup_path(v_s, v_c))
        s_mov = s_ov - {v_t, v_c}
    elif v_s in s_ov and v_t not in s_ov:
        case = AugmentCase.SOURCE_ODD
        dist, _ = shortest(v_t)
        v_c = min((c for c in s_ov if c != v_s), key=lambda c: (dist[c], c))
        duplicated.extend(dup_path(v_t, v_c))
        s_mov = s_ov - {v_s, v_c}
    else:
        case = AugmentCase.BOTH_EVEN
        dist_s, _ = shortest(v_s)
        dist_t, _ = shortest(v_t)
        c1, c2 = min(
            ((a, b) for a in s_ov for b in s_ov if a != b),
            key=lambda p: (dist_s[p[0]] + dist_t[p[1]], p),
        )
        duplicated.extend(dup_path(v_s, c1))
        duplicated.extend(dup_path(v_t, c2))
        s_mov = s_ov - {c1, c2}

    if s_mov:
        metric = {}
        for a in s_mov:
            dist, _ = shortest(a)
            for b in s_mov:
                if a != b:
                    metric[(a, b)] = dist[b]
        pairs, _ = min_weight_pairing(s_mov, metric)
        for a, b in pairs:
            duplicated.extend(dup_path(a, b))

    ag = AugmentedGraph(mg, tuple(duplicated), case)
    expected = set() if v_s == v_t else {v_s, v_t}
    if ag.odd_set() != expected:
        raise ParityViolation(
            f"augmentation left odd set {ag.odd_set()} (expected {expected})")
    return ag


def euler_trail(ag: AugmentedGraph, v_s, v_t) -> RoutePlan:
    """Extract the trail over the augmented edge multiset (Hierholzer).

    Each augmented edge is used exactly once; the walk starts at v_s and
    ends at v_t (a circuit when they coincide).
    """
    mg = ag.base
    combined = ag.combined_edges()
    expected = set() if v_s == v_t else {v_s, v_t}
    if ag.odd_set() != expected:
        raise ParityViolation("odd-degree set does not match the trail endpoints")
    _check_connected(Multigraph(mg.vertices, tuple((u, v, w) for u, v, w, _ in combined)),
                     (v_s, v_t))

    adj = {v: [] for v in mg.vertices}
    for eid, (u, v, w, base_idx) in enumerate(combined):
        adj[u].append((v, eid))
        adj[v].append((u, eid))
    for v in adj:
        adj[v].sort()  # deterministic traversal order

    used = [False] * len(combined)
    ptr = {v: 0 for v in mg.vertices}
    stack = [v_s]
    walk = []
    while stack:
        u = stack[-1]
        nbrs = adj[u]
        i = ptr[u]
        while i < len(nbrs) and used[nbrs[i][1]]:
            i += 1
        ptr[u] = i
        if i == len(nbrs):
            walk.append(stack.pop())
        else:
            v, eid = nbrs[i]
            used[eid] = True
            stack.append(v)
    walk.reverse()

    if not all(used) or walk[0] != v_s or walk[-1] != v_t:
        raise ParityViolation("failed to extract a complete trail")

    visits = [0] * len(mg.edges)
    for _, _, _, base_idx in combined:
        visits[base_idx] += 1
    total = float(sum(w for _, _, w, _ in combined))
    return RoutePlan(tuple(walk), tuple(visits), total, ag.provenance.value)


def vocpp(g, v_s, v_t) -> RoutePlan:
    """Solve the variant open CPP: augment, then extract the Euler trail."""
    ag = augment_for_open_trail(g, v_s, v_t)
    return euler_trail(ag, v_s, v_t)


def brute_force_ocpp(g, v_s, v_t) -> RoutePlan:
    """Exact open-CPP optimum by enumerating duplicated edge subsets.

    A minimum T-join never needs an edge twice, so the optimum is the
    lightest D subseteq E whose addition leaves odd degrees exactly at
    the trail endpoints.  Exponential in |E|; refuses more than 14 edges.
    """
    mg = _as_multigraph(g)
    if len(mg.edges) > 14:
        raise TooLarge(f"{len(mg.edges)} edges exceeds the brute-force limit of 14")
    vset = set(mg.vertices)
    if v_s not in vset or v_t not in vset:
        raise UnknownVertex(f"unknown endpoint {v_s!r} or {v_t!r}")
    if not mg.edges:
        raise EmptyGraph("graph has no edges")
    _check_connected(mg, (v_s, v_t))

    base_deg = mg.degrees()
    expected = set() if v_s == v_t else {v_s, v_t}
    m = len(mg.edges)
    best_mask, best_extra = None, float("inf")
    for mask in range(1 << m):
        deg = dict(base_deg)
        extra = 0.0
        for i in range(m):
            if mask & (1 << i):
                u, v, w = mg.edges[i]
                deg[u] += 1
                deg[v] += 1
                extra += w
        if extra >= best_extra:
            continue
        if {x for x, dg in deg.items() if dg % 2 == 1} == expected:
            best_mask, best_extra = mask, extra
    if best_mask is None:
        raise Disconnected("no feasible duplication subset")

    duplicated = tuple(
        (mg.edges[i][0], mg.edges[i][1], mg.edges[i][2], i)
        for i in range(m) if best_mask & (1 << i)
    )
    ag = AugmentedGraph(mg, duplicated, AugmentCase.EULERIAN)
    plan = euler_trail(ag, v_s, v_t)
    return RoutePlan(plan.walk, plan.edge_visits, plan.total_length, "BruteForce")
