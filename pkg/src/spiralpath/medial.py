"""Interior Voronoi diagram (medial structure) of a polygonal pocket.

Sites are the boundary segments and vertices of the pocket and its islands.
Topology candidates are discovered from a Delaunay triangulation of dense
boundary samples; every vertex of the final diagram is then re-solved exactly
as the equidistant point of its defining sites, and edges follow the exact
bisectors (curved bisectors are polylinized to a chord tolerance).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import Delaunay

from .geom import Vec, Polygon, ccw_angle, lerp
from .diagram import Diagram, AuxEdge


class DiagramError(Exception):
    pass


@dataclass(frozen=True)
class SegSite:
    idx: int
    ring: int
    eidx: int
    a: Vec
    b: Vec
    u: Vec      # unit direction, free region on the left
    n: Vec      # left normal
    length: float


@dataclass(frozen=True)
class VertSite:
    idx: int
    ring: int
    vidx: int
    p: Vec
    interior_angle: float

    @property
    def reflex(self) -> bool:
        return self.interior_angle > math.pi + 1e-9

    @property
    def straightish(self) -> bool:
        return abs(self.interior_angle - math.pi) <= 1e-9


class SiteModel:
    """Flat site arrays plus distance queries for one pocket instance.

    Rings are stored with the free region on the left of every directed edge:
    the outer ring counterclockwise, island rings clockwise.
    """

    def __init__(self, pocket: Polygon, islands: list[Polygon]):
        self.pocket = pocket
        self.islands = islands
        self.rings: list[Polygon] = [pocket] + islands
        self.segs: list[SegSite] = []
        self.verts: list[VertSite] = []
        for ri, ring in enumerate(self.rings):
            vs = ring.vertices
            m = len(vs)
            for k in range(m):
                a, b = vs[k], vs[(k + 1) % m]
                u = (b - a).unit()
                self.segs.append(SegSite(0, ri, k, a, b, u, u.perp(), a.dist(b)))
            for k in range(m):
                u_in = (vs[k] - vs[k - 1]).unit()
                u_out = (vs[(k + 1) % m] - vs[k]).unit()
                ang = ccw_angle(u_out, -u_in)
                self.verts.append(VertSite(0, ri, k, vs[k], ang))
        # assign flat indices: segments first, then vertices
        self.segs = [SegSite(i, s.ring, s.eidx, s.a, s.b, s.u, s.n, s.length)
                     for i, s in enumerate(self.segs)]
        off = len(self.segs)
        self.verts = [VertSite(off + i, v.ring, v.vidx, v.p, v.interior_angle)
                      for i, v in enumerate(self.verts)]
        self.sites: list = list(self.segs) + list(self.verts)
        self._seg_a = np.array([[s.a.x, s.a.y] for s in self.segs])
        self._seg_u = np.array([[s.u.x, s.u.y] for s in self.segs])
        self._seg_n = np.array([[s.n.x, s.n.y] for s in self.segs])
        self._seg_len = np.array([s.length for s in self.segs])
        xs = [v.x for v in pocket.vertices]
        ys = [v.y for v in pocket.vertices]
        self.bbox = (min(xs), min(ys), max(xs), max(ys))
        self.diag = math.hypot(self.bbox[2] - self.bbox[0], self.bbox[3] - self.bbox[1])
        self.eps = 1e-9 * self.diag

    # -- distances ---------------------------------------------------------

    def boundary_distance(self, p: Vec) -> float:
        d = np.array([p.x, p.y]) - self._seg_a
        t = np.clip(np.einsum("ij,ij->i", d, self._seg_u), 0.0, self._seg_len)
        foot = self._seg_a + t[:, None] * self._seg_u
        diff = np.array([p.x, p.y]) - foot
        return float(np.sqrt(np.min(np.einsum("ij,ij->i", diff, diff))))

    def boundary_distance_batch(self, pts: np.ndarray) -> np.ndarray:
        d = pts[:, None, :] - self._seg_a[None, :, :]
        t = np.clip(np.einsum("pij,ij->pi", d, self._seg_u), 0.0, self._seg_len)
        foot = self._seg_a[None, :, :] + t[..., None] * self._seg_u[None, :, :]
        diff = pts[:, None, :] - foot
        return np.sqrt(np.min(np.einsum("pij,pij->pi", diff, diff), axis=1))

    def site_distance(self, site, p: Vec) -> float:
        """Slab distance for segments (inf outside the slab), euclidean for
        vertices. Signed sidedness is not applied here."""
        if isinstance(site, VertSite):
            return p.dist(site.p)
        t = (p - site.a).dot(site.u)
        if t < -1e-9 * (1 + site.length) or t > site.length * (1 + 1e-9) + 1e-9:
            return math.inf
        return abs((p - site.a).dot(site.n))

    def in_region(self, p: Vec, tol: float) -> bool:
        if not self.pocket.contains(p, tol):
            return False
        for isl in self.islands:
            if isl.strictly_contains(p, tol):
                return False
        return True

    def seg_site_at(self, ring: int, eidx: int) -> SegSite:
        off = 0
        for ri in range(ring):
            off += len(self.rings[ri].vertices)
        return self.segs[off + eidx]

    def vert_site_at(self, ring: int, vidx: int) -> VertSite:
        off = 0
        for ri in range(ring):
            off += len(self.rings[ri].vertices)
        return self.verts[off + vidx]


# -- exact equidistant-point solvers ----------------------------------------


def _solve_sss(s1: SegSite, s2: SegSite, s3: SegSite) -> list[Vec]:
    rows = []
    rhs = []
    for a, b in ((s1, s2), (s1, s3)):
        g = a.n - b.n
        rows.append(g)
        rhs.append(a.n.dot(a.a) - b.n.dot(b.a))
    det = rows[0].x * rows[1].y - rows[0].y * rows[1].x
    if abs(det) < 1e-13:
        return []
    x = (rhs[0] * rows[1].y - rows[0].y * rhs[1]) / det
    y = (rows[0].x * rhs[1] - rhs[0] * rows[1].x) / det
    return [Vec(x, y)]


def _bisector_line(s1: SegSite, s2: SegSite):
    """Point and direction of the equal-signed-distance bisector line of two
    segment support lines, or None when the normals coincide."""
    g = s1.n - s2.n
    gn = g.norm()
    if gn < 1e-9:
        return None
    c = s1.n.dot(s1.a) - s2.n.dot(s2.a)
    p0 = g * (c / (gn * gn))
    return p0, g.perp().unit()


def _quad_roots(A: float, B: float, C: float) -> list[float]:
    if abs(A) < 1e-300:
        if abs(B) < 1e-300:
            return []
        return [-C / B]
    disc = B * B - 4.0 * A * C
    if disc < 0.0:
        if disc > -1e-12 * max(B * B, abs(4 * A * C), 1.0):
            disc = 0.0
        else:
            return []
    sq = math.sqrt(disc)
    return [(-B - sq) / (2 * A), (-B + sq) / (2 * A)]


def _solve_line_vertex(p0: Vec, w: Vec, n: Vec, a: Vec, v: Vec) -> list[Vec]:
    """Points p = p0 + t*w with n.(p - a) = |p - v| and positive sidedness."""
    f0 = n.dot(p0 - a)
    f1 = n.dot(w)
    m = p0 - v
    A = 1.0 - f1 * f1
    B = 2.0 * (w.dot(m) - f0 * f1)
    C = m.norm2() - f0 * f0
    out = []
    for t in _quad_roots(A, B, C):
        p = p0 + w * t
        if n.dot(p - a) >= -1e-12:
            out.append(p)
    return out


def _solve_ssv(s1: SegSite, s2: SegSite, v: VertSite) -> list[Vec]:
    line = _bisector_line(s1, s2)
    if line is None:
        return []
    p0, w = line
    return _solve_line_vertex(p0, w, s1.n, s1.a, v.p)


def _solve_svv(s: SegSite, v1: VertSite, v2: VertSite) -> list[Vec]:
    dv = v2.p - v1.p
    if dv.norm() < 1e-15:
        return []
    p0 = lerp(v1.p, v2.p, 0.5)
    w = dv.perp().unit()
    return _solve_line_vertex(p0, w, s.n, s.a, v1.p)


def _solve_vvv(v1: VertSite, v2: VertSite, v3: VertSite) -> list[Vec]:
    ax, ay = v1.p.x, v1.p.y
    bx, by = v2.p.x, v2.p.y
    cx, cy = v3.p.x, v3.p.y
    d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    if abs(d) < 1e-13:
        return []
    ux = ((ax * ax + ay * ay) * (by - cy) + (bx * bx + by * by) * (cy - ay)
          + (cx * cx + cy * cy) * (ay - by)) / d
    uy = ((ax * ax + ay * ay) * (cx - bx) + (bx * bx + by * by) * (ax - cx)
          + (cx * cx + cy * cy) * (bx - ax)) / d
    return [Vec(ux, uy)]


def solve_triple(sm: SiteModel, triple) -> list[Vec]:
    segs = [s for s in triple if isinstance(s, SegSite)]
    verts = [s for s in triple if isinstance(s, VertSite)]
    if len(segs) == 3:
        return _solve_sss(*segs)
    if len(segs) == 2:
        return _solve_ssv(segs[0], segs[1], verts[0])
    if len(segs) == 1:
        return _solve_svv(segs[0], verts[0], verts[1])
    return _solve_vvv(*verts)


# -- candidate discovery -----------------------------------------------------


def _sample_boundary(sm: SiteModel, spacing: float):
    # samples are nudged slightly into the free region so that coincident
    # back-to-back walls of zero-area islands stay distinguishable to qhull
    nudge = spacing * 1e-3
    pts: list[tuple[float, float]] = []
    labels: list[int] = []
    for ring in range(len(sm.rings)):
        for s in sm.segs:
            if s.ring != ring:
                continue
            n = max(2, math.ceil(s.length / spacing))
            for i in range(n):
                t = i / n
                if i == 0:
                    v = sm.vert_site_at(s.ring, s.eidx)
                    half = 0.5 * v.interior_angle
                    ang = s.u.angle() + half
                    p = v.p + Vec(math.cos(ang), math.sin(ang)) * nudge
                    pts.append((p.x, p.y))
                    labels.append(v.idx)
                else:
                    p = lerp(s.a, s.b, t) + s.n * nudge
                    pts.append((p.x, p.y))
                    labels.append(s.idx)
    return np.array(pts), labels


def _candidate_triples(sm: SiteModel, spacing: float) -> set[frozenset]:
    pts, labels = _sample_boundary(sm, spacing)
    if len(pts) < 4:
        return set()
    tri = Delaunay(pts)
    triples: set[frozenset] = set()
    npts = len(pts)
    for simplex in tri.simplices:
        if any(i >= npts for i in simplex):
            continue
        f = frozenset(labels[i] for i in simplex)
        if len(f) == 3:
            triples.add(f)
    return triples


# -- diagram assembly --------------------------------------------------------


class _Builder:
    def __init__(self, sm: SiteModel, delta: float, chord_tol: float):
        self.sm = sm
        self.delta = delta
        self.chord_tol = chord_tol
        self.tol = max(100.0 * sm.eps, 1e-12)
        self.snap = max(1e-7 * sm.diag, 10.0 * sm.eps)

    def build(self, spacing: float) -> Diagram:
        sm = self.sm
        verts = self._exact_vertices(spacing)
        d = Diagram(sm.pocket, sm.islands, sm.eps)
        d.site_model = sm
        node_sites: dict[int, set] = {}
        for p, rho, sset in verts:
            nid = d.add_node(p, clearance=rho)
            node_sites[nid] = sset
        self._add_corner_nodes(d, node_sites)
        self._add_pair_edges(d, node_sites)
        d.remove_isolated_nodes()
        return d

    # vertices ---------------------------------------------------------

    def _exact_vertices(self, spacing: float):
        sm = self.sm
        triples = _candidate_triples(sm, spacing)
        raw: list[tuple[Vec, float, frozenset]] = []
        for f in triples:
            sites = [sm.sites[i] for i in f]
            for p in solve_triple(sm, sites):
                if not all(math.isfinite(c) for c in (p.x, p.y)):
                    continue
                ds = [sm.site_distance(s, p) for s in sites]
                rho = max(ds)
                if not all(abs(di - rho) <= 2.0 * self.tol for di in ds):
                    continue
                if rho <= 2.0 * self.snap:
                    continue  # corner-adjacent, covered by corner nodes
                if not sm.in_region(p, sm.eps):
                    continue
                if sm.boundary_distance(p) < rho - self.tol:
                    continue
                raw.append((p, rho, f))
        return self._cluster(raw)

    def _cluster(self, raw):
        cell = self.snap
        grid: dict[tuple[int, int], list[int]] = {}
        merged: list[tuple[Vec, float, set]] = []
        for p, rho, f in sorted(raw, key=lambda r: (r[0].x, r[0].y)):
            gx, gy = int(p.x / cell), int(p.y / cell)
            target = None
            for dx in (-1, 0, 1):
                for dy in (-1, 0, 1):
                    for idx in grid.get((gx + dx, gy + dy), []):
                        if merged[idx][0].dist(p) <= self.snap:
                            target = idx
                            break
                    if target is not None:
                        break
                if target is not None:
                    break
            if target is None:
                merged.append((p, rho, set(f)))
                grid.setdefault((gx, gy), []).append(len(merged) - 1)
            else:
                mp, mrho, ms = merged[target]
                ms.update(f)
                merged[target] = (mp, mrho, ms)
        return merged

    # corner nodes -------------------------------------------------------

    def _add_corner_nodes(self, d: Diagram, node_sites: dict[int, set]) -> None:
        sm = self.sm
        for v in sm.verts:
            ring = sm.rings[v.ring]
            m = len(ring.vertices)
            prev_seg = sm.seg_site_at(v.ring, (v.vidx - 1) % m)
            next_seg = sm.seg_site_at(v.ring, v.vidx)
            if v.interior_angle < math.pi - 1e-9:
                nid = d.add_node(v.p, 0.0,
                                 boundary_pos=(v.ring, v.vidx, 0.0),
                                 corner=(v.ring, v.vidx))
                node_sites[nid] = {prev_seg.idx, next_seg.idx}
            elif v.straightish:
                nid = d.add_node(v.p, 0.0,
                                 boundary_pos=(v.ring, v.vidx, 0.0),
                                 corner=(v.ring, v.vidx))
                node_sites[nid] = {v.idx, prev_seg.idx}
            else:
                # reflex corners and degenerate tips carry one leaf per side
                n1 = d.add_node(v.p, 0.0,
                                boundary_pos=(v.ring, (v.vidx - 1) % m, 1.0),
                                corner=(v.ring, v.vidx))
                node_sites[n1] = {v.idx, prev_seg.idx}
                n2 = d.add_node(v.p, 0.0,
                                boundary_pos=(v.ring, v.vidx, 0.0),
                                corner=(v.ring, v.vidx))
                node_sites[n2] = {v.idx, next_seg.idx}

    # edges ---------------------------------------------------------------

    def _pair_param(self, pair, p: Vec) -> float:
        a, b = pair
        if isinstance(a, SegSite) and isinstance(b, SegSite):
            line = _bisector_line(a, b)
            return line[1].dot(p) if line else 0.0
        if isinstance(a, VertSite) and isinstance(b, VertSite):
            return (b.p - a.p).perp().unit().dot(p)
        s, v = (a, b) if isinstance(a, SegSite) else (b, a)
        eta = (v.p - s.a).dot(s.n)
        if abs(eta) <= 1e-9 * (1 + self.sm.diag):
            return s.n.dot(p - v.p)
        return (p - s.a).dot(s.u)

    def _pair_point(self, pair, t: float) -> Vec:
        a, b = pair
        if isinstance(a, SegSite) and isinstance(b, SegSite):
            p0, w = _bisector_line(a, b)
            base = p0.dot(w)
            return p0 + w * (t - base)
        if isinstance(a, VertSite) and isinstance(b, VertSite):
            mid = lerp(a.p, b.p, 0.5)
            w = (b.p - a.p).perp().unit()
            base = w.dot(mid)
            return mid + w * (t - base)
        s, v = (a, b) if isinstance(a, SegSite) else (b, a)
        eta = (v.p - s.a).dot(s.n)
        if abs(eta) <= 1e-9 * (1 + self.sm.diag):
            return v.p + s.n * t
        xi = (v.p - s.a).dot(s.u)
        y = ((t - xi) ** 2 + eta * eta) / (2.0 * eta)
        return s.a + s.u * t + s.n * y

    def _pair_is_curved(self, pair) -> bool:
        a, b = pair
        if isinstance(a, SegSite) == isinstance(b, SegSite):
            return False
        s, v = (a, b) if isinstance(a, SegSite) else (b, a)
        return abs((v.p - s.a).dot(s.n)) > 1e-9 * (1 + self.sm.diag)

    def _live(self, pair, p: Vec) -> bool:
        sm = self.sm
        d1 = sm.site_distance(pair[0], p)
        d2 = sm.site_distance(pair[1], p)
        if not (math.isfinite(d1) and math.isfinite(d2)):
            return False
        if abs(d1 - d2) > self.tol + 1e-9 * max(d1, d2):
            return False
        if not sm.in_region(p, sm.eps):
            return False
        return sm.boundary_distance(p) >= min(d1, d2) - self.tol

    def _add_pair_edges(self, d: Diagram, node_sites: dict[int, set]) -> None:
        pair_nodes: dict[tuple[int, int], list[int]] = {}
        for nid, sset in node_sites.items():
            ss = sorted(sset)
            for i in range(len(ss)):
                for j in range(i + 1, len(ss)):
                    pair_nodes.setdefault((ss[i], ss[j]), []).append(nid)
        sm = self.sm
        for key in sorted(pair_nodes):
            nids = pair_nodes[key]
            if len(nids) < 2:
                continue
            pair = (sm.sites[key[0]], sm.sites[key[1]])
            if isinstance(pair[0], SegSite) and isinstance(pair[1], SegSite):
                if _bisector_line(*pair) is None:
                    continue
            items = sorted(((self._pair_param(pair, d.nodes[n].pt), n) for n in nids))
            for (t1, n1), (t2, n2) in zip(items, items[1:]):
                if t2 - t1 <= 2.0 * self.snap:
                    continue
                if d.nodes[n1].pt.dist(d.nodes[n2].pt) <= 2.0 * self.snap:
                    continue
                probes = [t1 + (t2 - t1) * f for f in (0.25, 0.5, 0.75)]
                if not all(self._live(pair, self._pair_point(pair, t)) for t in probes):
                    continue
                self._emit_edge(d, pair, key, n1, t1, n2, t2)

    def _emit_edge(self, d: Diagram, pair, key, n1: int, t1: float, n2: int, t2: float) -> None:
        if not self._pair_is_curved(pair):
            d.add_edge(n1, n2, sites=key)
            return
        ts = self._subdivide(pair, t1, t2)
        prev = n1
        for t in ts[1:-1]:
            p = self._pair_point(pair, t)
            nid = d.add_node(p, clearance=self.sm.boundary_distance(p))
            d.add_edge(prev, nid, sites=key)
            prev = nid
        d.add_edge(prev, n2, sites=key)

    def _subdivide(self, pair, t1: float, t2: float) -> list[float]:
        out = [t1]

        def rec(a: float, b: float, depth: int):
            pa, pb = self._pair_point(pair, a), self._pair_point(pair, b)
            tm = 0.5 * (a + b)
            pm = self._pair_point(pair, tm)
            chord = pb - pa
            L = chord.norm()
            dev = abs(chord.cross(pm - pa)) / L if L > 0 else 0.0
            if dev > self.chord_tol and depth < 24:
                rec(a, tm, depth + 1)
                rec(tm, b, depth + 1)
            else:
                out.append(b)

        rec(t1, t2, 0)
        return out


# -- validation oracles ------------------------------------------------------


def equidistance_violation(d: Diagram, samples_per_edge: int = 5) -> float:
    """Max over sampled bisector-edge points of how much closer some other
    boundary feature is than the edge's two defining sites."""
    sm: SiteModel = d.site_model
    worst = 0.0
    for e in d.edges.values():
        if e.sites is None:
            continue
        s1, s2 = (sm.sites[e.sites[0]], sm.sites[e.sites[1]])
        pa, pb = d.nodes[e.a].pt, d.nodes[e.b].pt
        for k in range(1, samples_per_edge + 1):
            p = lerp(pa, pb, k / (samples_per_edge + 1))
            dd = min(sm.site_distance(s1, p), sm.site_distance(s2, p))
            worst = max(worst, dd - sm.boundary_distance(p))
    return worst


def face_convexity_violations(d: Diagram, tol: float) -> list[tuple[int, float]]:
    """Rotational gaps exceeding pi at diagram nodes, which is where a face of
    the subdivision has a reflex interior angle.

    Interior chain nodes of one polylinized curved bisector are skipped: the
    concave side of such a chain exceeds pi by the chord turn by construction.
    """
    out: list[tuple[int, float]] = []
    for nid, ring in d.adj.items():
        node = d.nodes[nid]
        dirs = [(d.edge_dir(eid, nid), eid) for eid in ring]
        if len(ring) == 2:
            e1, e2 = (d.edges[ring[0]], d.edges[ring[1]])
            if e1.sites is not None and e1.sites == e2.sites:
                continue
        if node.on_boundary:
            rng, eidx, t = node.boundary_pos
            poly = d.site_model.rings[rng]
            vs = poly.vertices
            m = len(vs)
            if t >= 1.0 - 1e-12:
                eidx = (eidx + 1) % m
                t = 0.0
            a, b = vs[eidx], vs[(eidx + 1) % m]
            w_out = (b - a).unit()
            if t <= 1e-12 and node.corner is not None:
                prev = vs[(eidx - 1) % m]
                w_in = (vs[eidx] - prev).unit()
            else:
                w_in = w_out
            dirs.append((w_out, "ring-out"))
            dirs.append((-w_in, "ring-in"))
        dirs.sort(key=lambda it: it[0].angle())
        k = len(dirs)
        for i in range(k):
            d1, tag1 = dirs[i]
            d2, tag2 = dirs[(i + 1) % k]
            if tag1 == "ring-in" and tag2 == "ring-out":
                continue  # exterior wedge
            gap = ccw_angle(d1, d2)
            if gap > math.pi + tol and k > 1:
                out.append((nid, gap))
    return out


# -- aux edges ---------------------------------------------------------------


def _closest_between_rings(r1: Polygon, r2: Polygon) -> tuple[Vec, Vec, float, tuple, tuple]:
    best = (None, None, math.inf, None, None)
    e1 = r1.edges()
    e2 = r2.edges()
    for i, s1 in enumerate(e1):
        for j, s2 in enumerate(e2):
            p, q = _closest_points_segments(s1.a, s1.b, s2.a, s2.b)
            dd = p.dist(q)
            if dd < best[2]:
                t1 = (p - s1.a).norm() / max(s1.length(), 1e-300)
                t2 = (q - s2.a).norm() / max(s2.length(), 1e-300)
                best = (p, q, dd, (i, t1), (j, t2))
    return best


def _closest_points_segments(a: Vec, b: Vec, c: Vec, d: Vec) -> tuple[Vec, Vec]:
    # candidate pairs: each endpoint against the other segment
    def proj(p: Vec, s0: Vec, s1: Vec) -> Vec:
        sv = s1 - s0
        L2 = sv.norm2()
        if L2 == 0.0:
            return s0
        t = max(0.0, min(1.0, (p - s0).dot(sv) / L2))
        return lerp(s0, s1, t)

    cands = [(a, proj(a, c, d)), (b, proj(b, c, d)),
             (proj(c, a, b), c), (proj(d, a, b), d)]
    return min(cands, key=lambda pq: pq[0].dist(pq[1]))


def compute_aux_edges(d: Diagram) -> None:
    """Closest-approach connectors between distinct Voronoi-neighboring input
    objects (ring 0 is the pocket outline, rings >= 1 the islands)."""
    sm: SiteModel = d.site_model
    neighbor_pairs = set()
    for e in d.edges.values():
        if e.sites is None:
            continue
        r1 = sm.sites[e.sites[0]].ring
        r2 = sm.sites[e.sites[1]].ring
        if r1 != r2:
            neighbor_pairs.add((min(r1, r2), max(r1, r2)))
    d.aux_edges = []
    for ra, rb in sorted(neighbor_pairs):
        p, q, dist, (ea, ta), (eb, tb) = _closest_between_rings(sm.rings[ra], sm.rings[rb])
        na = _boundary_node_at(d, ra, ea, ta, p)
        nb = _boundary_node_at(d, rb, eb, tb, q)
        d.aux_edges.append(AuxEdge(na, nb, (ra, rb), dist))


def _boundary_node_at(d: Diagram, ring: int, eidx: int, t: float, p: Vec) -> int:
    for nid, node in d.nodes.items():
        if node.on_boundary and node.pt.dist(p) <= 10.0 * d.eps:
            return nid
    nid = d.add_node(p, 0.0, boundary_pos=(ring, eidx, t))
    d.aux_node_ids.add(nid)
    return nid


# -- public entry ------------------------------------------------------------


def build_diagram(pocket: Polygon, islands: list[Polygon] | None = None,
                  delta: float | None = None,
                  chord_tol: float | None = None) -> Diagram:
    """Voronoi diagram of the pocket boundary restricted to the free region.

    With no islands the result is a plane tree; with one island it contains
    exactly one cycle; with several islands, one independent cycle per island.
    """
    islands = islands or []
    sm = SiteModel(pocket, islands)
    if delta is None:
        delta = sm.diag / 20.0
    if chord_tol is None:
        chord_tol = delta / 50.0
    shortest = min(s.length for s in sm.segs)
    spacing = min(sm.diag / 150.0, shortest / 3.0, delta)
    builder = _Builder(sm, delta, chord_tol)
    last_err = None
    for attempt in range(4):
        d = builder.build(spacing)
        err = _structure_error(d, len(islands))
        if err is None:
            if islands:
                compute_aux_edges(d)
            return d
        last_err = err
        spacing *= 0.5
    raise DiagramError(f"diagram construction failed: {last_err}")


def _structure_error(d: Diagram, n_islands: int) -> str | None:
    if not d.nodes:
        return "empty diagram"
    if not d.connected():
        return "diagram not connected"
    v = len([n for n in d.nodes if n not in d.aux_node_ids])
    e = len(d.edges)
    if e != v - 1 + n_islands:
        return f"euler mismatch: V={v} E={e} islands={n_islands}"
    sm: SiteModel = d.site_model
    covered = {(n.corner) for n in d.nodes.values() if n.corner is not None and d.adj[n.id]}
    for vs in sm.verts:
        if (vs.ring, vs.vidx) not in covered:
            return f"corner {vs.ring}:{vs.vidx} has no leaf"
    return None
