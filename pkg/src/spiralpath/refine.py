"""Diagram refinement: replace double edges at concave corners by their angle
bisector, then enrich long boundary spans with perpendicular edges so every
wavefront gains corners near the boundary."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .geom import Vec, ccw_angle
from .diagram import Diagram


@dataclass
class RefineReport:
    bisected_corners: int = 0
    skipped_nonconvex: int = 0
    perpendiculars_added: int = 0
    snapped_to_nodes: int = 0


def _ray_hits(d: Diagram, origin: Vec, direction: Vec,
              exclude: set[int]) -> list[tuple[float, int, Vec]]:
    """Diagram edges hit by the ray, as (ray param, edge id, point)."""
    hits = []
    eps = 1e-9
    for eid, e in d.edges.items():
        if eid in exclude:
            continue
        a = d.nodes[e.a].pt
        b = d.nodes[e.b].pt
        ab = b - a
        denom = direction.cross(ab)
        if abs(denom) < 1e-15:
            continue
        diff = a - origin
        s = diff.cross(ab) / denom
        t = diff.cross(direction) / denom
        if s <= eps * max(1.0, e.length) or t < -1e-9 or t > 1.0 + 1e-9:
            continue
        hits.append((s, eid, a + ab * min(max(t, 0.0), 1.0)))
    hits.sort(key=lambda h: (h[0], h[1]))
    return hits


def _ray_first_hit(d: Diagram, origin: Vec, direction: Vec,
                   exclude: set[int]) -> tuple[int, Vec, float] | None:
    hits = _ray_hits(d, origin, direction, exclude)
    if not hits:
        return None
    s, eid, q = hits[0]
    return eid, q, s


def _attach_ray(d: Diagram, hit: tuple[int, Vec, float],
                report: RefineReport) -> int:
    """Node at the ray hit: splits the edge, or snaps when the hit lands on an
    existing endpoint (flagged, the behaviour there is unspecified upstream)."""
    eid, q, _ = hit
    e = d.edges[eid]
    for end in (e.a, e.b):
        if d.nodes[end].pt.dist(q) <= 10.0 * d.eps:
            report.snapped_to_nodes += 1
            return end
    return d.split_edge(eid, q)


def _gap_after_removal(d: Diagram, nid: int, removed: set[int]) -> float:
    """Largest face angle opened at `nid` when `removed` edges disappear."""
    ring = [e for e in d.adj[nid] if e not in removed]
    if not ring:
        return 2.0 * math.pi
    full = d.adj[nid]
    worst = 0.0
    k = len(full)
    for i, eid in enumerate(full):
        if eid not in removed:
            continue
        # walk to surviving neighbors on both sides
        j = i
        while full[j % k] in removed or j == i:
            j += 1
            if j - i > k:
                return 2.0 * math.pi
        nxt = full[j % k]
        j = i
        while full[j % k] in removed or j == i:
            j -= 1
            if i - j > k:
                return 2.0 * math.pi
        prv = full[j % k]
        # adjacency rings are sorted CCW, so the face opened by the removal
        # spans counterclockwise from the surviving predecessor to successor
        worst = max(worst, ccw_angle(d.edge_dir(prv, nid), d.edge_dir(nxt, nid)))
    return worst


def rebisect_concave(d: Diagram, report: RefineReport | None = None) -> RefineReport:
    """Replace the pair of edges meeting each concave input corner by a single
    edge along the corner's interior angle bisector, when the faces adjacent
    to the change stay convex."""
    report = report or RefineReport()
    sm = d.site_model
    for v in sm.verts:
        if v.interior_angle <= math.pi + 1e-9:
            continue
        leaf_nodes = [n for n in d.nodes.values()
                      if n.corner == (v.ring, v.vidx) and d.adj[n.id]]
        if len(leaf_nodes) != 2:
            continue
        e1 = d.adj[leaf_nodes[0].id][0]
        e2 = d.adj[leaf_nodes[1].id][0]
        n1 = d.edges[e1].other(leaf_nodes[0].id)
        n2 = d.edges[e2].other(leaf_nodes[1].id)
        ring = sm.rings[v.ring]
        vs = ring.vertices
        m = len(vs)
        u_out = (vs[(v.vidx + 1) % m] - vs[v.vidx]).unit()
        bis_ang = u_out.angle() + 0.5 * v.interior_angle
        direction = Vec(math.cos(bis_ang), math.sin(bis_ang))
        hit = _ray_first_hit(d, v.p, direction, exclude={e1, e2})
        if hit is None:
            continue
        # convexity guard: the faces merged at the far ends must stay convex
        removed = {e1, e2}
        ok = all(_gap_after_removal(d, n, removed) <= math.pi + 1e-9
                 for n in {n1, n2})
        if not ok:
            report.skipped_nonconvex += 1
            continue
        q = _attach_ray(d, hit, report)
        d.remove_edge(e1)
        d.remove_edge(e2)
        leaf = d.add_node(v.p, 0.0,
                          boundary_pos=(v.ring, v.vidx, 0.0),
                          corner=(v.ring, v.vidx))
        d.add_edge(leaf, q)
        d.remove_isolated_nodes()
        report.bisected_corners += 1
    return report


def _boundary_leaves_in_order(d: Diagram, ring_idx: int) -> list[int]:
    ring = d.site_model.rings[ring_idx]
    items = []
    for nid, n in d.nodes.items():
        if nid in d.aux_node_ids or not n.on_boundary or not d.adj[nid]:
            continue
        r, eidx, t = n.boundary_pos
        if r == ring_idx:
            items.append(((eidx + min(max(t, 0.0), 1.0)) % len(ring.vertices), nid))
    items.sort()
    return [nid for _, nid in items]


def enrich(d: Diagram, delta: float, min_angle: float = math.radians(50.0),
           report: RefineReport | None = None) -> RefineReport:
    """Add perpendicular edges from long boundary spans to the diagram.

    Between consecutive leaves spanning a boundary distance d, m = ceil(d/delta)
    interpolation points are tried; a perpendicular is added at each point
    whose half-line meets the diagram at an angle steeper than `min_angle`.
    Cycle edges are never split and receive no perpendiculars.
    """
    report = report or RefineReport()
    sm = d.site_model
    for ring_idx in range(len(sm.rings)):
        leaves = _boundary_leaves_in_order(d, ring_idx)
        if len(leaves) < 2:
            continue
        spans = []
        for i in range(len(leaves)):
            l1 = leaves[i]
            l2 = leaves[(i + 1) % len(leaves)]
            p1 = d.nodes[l1].pt
            p2 = d.nodes[l2].pt
            if p1.dist(p2) <= 10.0 * d.eps:
                continue  # multiple leaves on one corner span nothing
            spans.append((p1, p2, d.nodes[l1].boundary_pos))
        for p1, p2, bpos in spans:
            s = p2 - p1
            dist = s.norm()
            m = math.ceil(dist / delta)
            if m <= 1:
                continue
            direction = s.perp().unit()
            for i in range(1, m):
                pi = p1 + s * (i / m)
                hits = _ray_hits(d, pi, direction, exclude=set())
                if not hits:
                    continue
                # when the ray lands on a node several edges tie at the same
                # distance; judge the angle rule against the steepest of them
                s_min = hits[0][0]
                tied = [h for h in hits if h[0] <= s_min + 10.0 * d.eps]

                def incidence(h):
                    e = d.edges[h[1]]
                    cosang = abs(direction.dot(d.edge_dir(h[1], e.a)))
                    return math.acos(min(1.0, max(-1.0, cosang)))

                s_hit, eid_hit, q_hit = max(tied, key=incidence)
                e = d.edges[eid_hit]
                if e.on_cycle:
                    continue
                if incidence((s_hit, eid_hit, q_hit)) <= min_angle:
                    continue
                q = _attach_ray(d, (eid_hit, q_hit, s_hit), report)
                ring_i, eidx, t0 = bpos
                vs = sm.rings[ring_idx].vertices
                nvs = len(vs)
                # locate pi along the ring for bookkeeping
                eidx2, t2 = _locate_on_ring(vs, pi)
                leaf = d.add_node(pi, 0.0, boundary_pos=(ring_idx, eidx2, t2))
                d.add_edge(leaf, q)
                report.perpendiculars_added += 1
    return report


def _locate_on_ring(vs: list[Vec], p: Vec) -> tuple[int, float]:
    best = (0, 0.0, math.inf)
    for i in range(len(vs)):
        a, b = vs[i], vs[(i + 1) % len(vs)]
        ab = b - a
        L2 = ab.norm2()
        t = min(max((p - a).dot(ab) / L2, 0.0), 1.0) if L2 > 0 else 0.0
        dd = p.dist(a + ab * t)
        if dd < best[2]:
            best = (i, t, dd)
    return best[0], best[1]


def refine_diagram(d: Diagram, delta: float,
                   min_angle: float = math.radians(50.0)) -> RefineReport:
    """Concave-corner bisectors first, then enrichment."""
    report = RefineReport()
    rebisect_concave(d, report)
    enrich(d, delta, min_angle, report)
    return report
