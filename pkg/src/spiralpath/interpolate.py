"""Polyline spiral interpolation between neighboring wavefronts:
per-revolution sweep times, stepover clamping, path marking, and
convexification of the (arc length, time) profile."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .geom import Vec, lerp
from .diagram import RootedTree
from .wave import WaveAnnotation


@dataclass
class SpiralCorner:
    pt: Vec
    edge: int | None           # hosting tree edge (None for start/guard corners)
    time: float                # local tree time at the corner
    revolution: int
    parents: list[int] = field(default_factory=list)
    guard: bool = False
    tree_key: object = None    # set by the island assembly


@dataclass
class Driver:
    """One wavefront corner driving a spiral corner for this revolution."""
    edge: int                  # tree edge hosting the wavefront corner
    corner_time: float         # local time of the wavefront corner
    nominal_time: float        # sweep time t_w for this corner
    parent_refs: list[int]     # spiral indices eligible as stepover anchors
    pt: Vec


class SpiralBuilder:
    def __init__(self, eps: float):
        self.corners: list[SpiralCorner] = []
        self.eps = eps
        self.revolution_starts: list[int] = []
        self.last_row_map: list[int] = []

    def append(self, corner: SpiralCorner) -> int:
        if self.corners:
            last = self.corners[-1]
            if last.pt.dist(corner.pt) <= self.eps:
                for p in corner.parents:
                    if p not in last.parents:
                        last.parents.append(p)
                return len(self.corners) - 1
        self.corners.append(corner)
        return len(self.corners) - 1

    def points(self) -> list[Vec]:
        return [c.pt for c in self.corners]


def point_at_time(tree: RootedTree, ann: WaveAnnotation,
                  edge: int, t: float) -> tuple[int, Vec]:
    """Point at wave time t on the rootward path starting at `edge`."""
    e = edge
    guard = 0
    while ann.tm_nd[tree.start[e]] > t + 1e-15:
        pe = tree.parent_edge[tree.start[e]]
        if pe is None:
            break
        e = pe
        guard += 1
        if guard > len(tree.start) + 2:
            raise RuntimeError("runaway rootward walk")
    return e, ann.get_point(e, min(max(t, ann.tm_nd[tree.start[e]]), ann.tm_nd[tree.end[e]]))


def _rootward_chain(tree: RootedTree, edge_hi: int, edge_lo: int) -> list[int]:
    """Edges from edge_lo (rootmost) up to edge_hi, inclusive."""
    chain = [edge_hi]
    e = edge_hi
    while e != edge_lo:
        pe = tree.parent_edge[tree.start[e]]
        if pe is None:
            break
        e = pe
        chain.append(e)
    chain.reverse()
    return chain


def pull_back_to_distance(tree: RootedTree, ann: WaveAnnotation,
                          ref_pt: Vec, ref_edge: int,
                          target_edge: int, target_t: float,
                          dist: float) -> tuple[int, float, Vec]:
    """First point on the path from `ref` toward the target whose distance to
    ref_pt is exactly `dist` (the stepover clamp)."""
    d = tree.diagram
    chain = _rootward_chain(tree, target_edge, ref_edge)
    for e in chain:
        a = d.nodes[tree.start[e]].pt
        b = d.nodes[tree.end[e]].pt
        L = d.edges[e].length
        x_hi = 1.0
        if e == target_edge:
            x_hi = min(1.0, ann.get_dist(e, target_t) / L)
        ab = b - a
        m = a - ref_pt
        A = ab.norm2()
        B = 2.0 * ab.dot(m)
        C = m.norm2() - dist * dist
        disc = B * B - 4.0 * A * C
        if disc < 0.0 or A == 0.0:
            continue
        sq = math.sqrt(disc)
        for x in ((-B - sq) / (2 * A), (-B + sq) / (2 * A)):
            if -1e-12 <= x <= x_hi + 1e-12:
                x = min(max(x, 0.0), x_hi)
                pt = lerp(a, b, x)
                t = ann.get_time(e, x * L)
                return e, t, pt
    # distance never reached: keep the target point itself
    _, pt = point_at_time(tree, ann, target_edge, target_t)
    return target_edge, target_t, pt


def upper_hull_times(dlen: list[float], times: list[float]) -> list[float]:
    """Times lifted onto the upper convex hull of the (dlen, time) points."""
    pts: list[tuple[float, float]] = []
    for x, t in zip(dlen, times):
        if pts and x - pts[-1][0] <= 1e-15:
            if t > pts[-1][1]:
                pts[-1] = (pts[-1][0], t)
            continue
        pts.append((x, t))
    if len(pts) < 2:
        return list(times)
    hull: list[tuple[float, float]] = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (p[1] - y1) - (p[0] - x1) * (y2 - y1) >= -1e-18:
                hull.pop()
            else:
                break
        hull.append(p)

    out = []
    k = 0
    for x, t in zip(dlen, times):
        while k + 1 < len(hull) and hull[k + 1][0] <= x:
            k += 1
        if k + 1 < len(hull) and hull[k + 1][0] > hull[k][0]:
            x1, y1 = hull[k]
            x2, y2 = hull[k + 1]
            f = y1 + (y2 - y1) * (x - x1) / (x2 - x1)
        else:
            f = hull[k][1]
        out.append(max(f, t))
    return out


def interpolate_revolution(tree: RootedTree, ann: WaveAnnotation,
                           spiral: SpiralBuilder, rev_index: int,
                           drivers: list[Driver], delta_prime: float,
                           tree_key=None) -> list[int]:
    """One revolution of spiral corners from the drivers; returns the spiral
    corner index produced for each driver (shared on duplicate collapse)."""
    marks: dict[int, float] = {}

    def mark_path(edge: int, t: float) -> None:
        if marks.get(edge, -math.inf) < t:
            marks[edge] = t
        e = edge
        while True:
            pe = tree.parent_edge[tree.start[e]]
            if pe is None:
                break
            e = pe
            full = ann.tm_nd[tree.end[e]]
            if marks.get(e, -math.inf) >= full:
                break
            marks[e] = full

    def nearest_ref(refs: list[int], p: Vec) -> tuple[int, float]:
        best, bd = refs[0], math.inf
        for rid in refs:
            dd = spiral.corners[rid].pt.dist(p)
            if dd < bd:
                best, bd = rid, dd
        return best, bd

    # pass 1: Q points, clamped to the stepover, marking their rootward paths
    for drv in drivers:
        t_w = min(drv.nominal_time, drv.corner_time)
        e_q, q_pt = point_at_time(tree, ann, drv.edge, t_w)
        t_q = t_w
        if drv.parent_refs:
            rid, dd = nearest_ref(drv.parent_refs, q_pt)
            if dd > delta_prime:
                ref = spiral.corners[rid]
                ref_edge = ref.edge if ref.edge is not None else e_q
                e_q, t_q, q_pt = pull_back_to_distance(
                    tree, ann, ref.pt, ref_edge, e_q, t_q, delta_prime)
        mark_path(e_q, t_q)

    # pass 2: first marked point rootward of each wavefront corner
    p_locs: list[tuple[int, float, Vec]] = []
    for drv in drivers:
        e = drv.edge
        t_cap = drv.corner_time
        found = None
        while True:
            mt = marks.get(e)
            if mt is not None and mt >= ann.tm_nd[tree.start[e]] - 1e-15:
                t_p = min(mt, t_cap)
                found = (e, t_p, ann.get_point(e, t_p))
                break
            pe = tree.parent_edge[tree.start[e]]
            if pe is None:
                t_p = ann.tm_nd[tree.start[e]]
                found = (e, t_p, ann.get_point(e, t_p))
                break
            e = pe
        p_locs.append(found)

    # convexification over cumulative polyline length
    dlen = [0.0]
    for (a, b) in zip(p_locs, p_locs[1:]):
        dlen.append(dlen[-1] + a[2].dist(b[2]))
    times = [t for _, t, _ in p_locs]
    lifted = upper_hull_times(dlen, times)

    # pass 3: final corners at the lifted times, re-clamped to the stepover
    produced: list[int] = []
    for drv, t_s in zip(drivers, lifted):
        t_s = min(t_s, drv.corner_time)
        e_s, s_pt = point_at_time(tree, ann, drv.edge, t_s)
        if drv.parent_refs:
            rid, dd = nearest_ref(drv.parent_refs, s_pt)
            if dd > delta_prime:
                ref = spiral.corners[rid]
                ref_edge = ref.edge if ref.edge is not None else e_s
                e_s, t_s, s_pt = pull_back_to_distance(
                    tree, ann, ref.pt, ref_edge, e_s, t_s, delta_prime)
        idx = spiral.append(SpiralCorner(
            s_pt, e_s, t_s, rev_index,
            parents=list(drv.parent_refs), tree_key=tree_key))
        produced.append(idx)
    return produced


def build_polyline_spiral(tree: RootedTree, ann: WaveAnnotation, wfs,
                          delta_prime: float) -> SpiralBuilder:
    """The basic (no island) polyline spiral: every revolution interpolates
    wavefront i-1 toward wavefront i, starting at the root point."""
    d = tree.diagram
    spiral = SpiralBuilder(eps=10.0 * d.eps)
    root_corner = SpiralCorner(d.nodes[tree.root].pt, None, 0.0, 0, parents=[])
    spiral.corners.append(root_corner)
    pa_sp = [0] * max(len(wfs.wf[0]), 1)

    for i in range(1, wfs.r + 1):
        spiral.revolution_starts.append(len(spiral.corners))
        row = wfs.wf[i]
        total = wfs.total[i]
        drivers = []
        for w, c in enumerate(row):
            frac = (wfs.lng[i][w] / total) if total > 0 else 0.0
            t_w = (i - 1) / wfs.r + frac * (1.0 / wfs.r)
            drivers.append(Driver(
                edge=c.edge, corner_time=c.time, nominal_time=t_w,
                parent_refs=[pa_sp[c.parent]] if c.parent >= 0 else [],
                pt=c.pt))
        produced = interpolate_revolution(tree, ann, spiral, i, drivers,
                                          delta_prime)
        pa_sp = produced
    spiral.last_row_map = pa_sp
    return spiral


def close_spiral(spiral: SpiralBuilder, tree: RootedTree, wfs,
                 ring: int = 0) -> list[int]:
    """Append the outline corners of `ring` as a guard revolution used only
    by rounding and verification; returns their spiral indices."""
    d = tree.diagram
    guard_ids = []
    row = wfs.wf[wfs.r]
    produced = spiral.last_row_map
    for w, c in enumerate(row):
        node = tree.end[c.edge]
        nd = d.nodes[node]
        if nd.corner is None or nd.corner[0] != ring:
            continue
        parents = [produced[w]] if produced else []
        idx = spiral.append(SpiralCorner(
            nd.pt, c.edge, 1.0, wfs.r + 1, parents=parents, guard=True))
        guard_ids.append(idx)
    return guard_ids
