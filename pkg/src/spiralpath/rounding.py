"""Rounding of the polyline spiral with tangential circular arcs.

Every corner starts as a degenerate zero-radius arc; a priority queue grows
arcs (preferring small radii and large subtended angles), merging neighbors
when possible, while every enlargement preserves the stepover to the arcs
rounding parent and child corners and introduces no intersection.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

from .geom import (Vec, Segment, ArcElement, Element, lerp,
                   dist_point_element, element_crossings)
from .interpolate import SpiralBuilder, SpiralCorner


@dataclass
class Arc:
    id: int
    lo: int                 # first corner rounded
    hi: int                 # last corner rounded
    radius: float
    element: ArcElement | None   # None while degenerate (radius 0)
    start_seg: int          # segment index carrying the start point
    end_seg: int            # segment index carrying the end point
    start_param: float      # absolute distance along start_seg
    end_param: float
    subtended: float
    enlarge_count: int = 0
    alive: bool = True


@dataclass
class RoundedSpiral:
    elements: list[Element]
    corner_arc: dict[int, int]
    arcs: dict[int, Arc]
    start_index: int        # first toolpath corner index in the spiral arrays
    enlargements: int = 0

    def length(self) -> float:
        return sum(el.length() for el in self.elements)


def corner_turns(pts: list[Vec]) -> list[float]:
    """Signed turn angle at every interior corner (0 at endpoints)."""
    turns = [0.0] * len(pts)
    for i in range(1, len(pts) - 1):
        u = (pts[i] - pts[i - 1])
        w = (pts[i + 1] - pts[i])
        if u.norm() == 0.0 or w.norm() == 0.0:
            continue
        turns[i] = math.atan2(u.cross(w), u.dot(w))
    return turns


def corner_angles(pts: list[Vec]) -> list[float]:
    """Interior corner angle phi in (0, pi]: pi for straight corners."""
    return [math.pi - abs(t) for t in corner_turns(pts)]


def subdivide_segments(pts: list[Vec]) -> list[float]:
    """Split point p_a of each segment as a fraction of its length: arcs
    ending on the segment stay before it, arcs starting on it stay after.
    The sharper corner receives the larger share."""
    phi = corner_angles(pts)
    out = []
    for a in range(len(pts) - 1):
        sharp_a = math.pi - phi[a]
        sharp_b = math.pi - phi[a + 1]
        denom = sharp_a + sharp_b
        w_a = 0.5 if denom <= 1e-12 else sharp_a / denom
        out.append(w_a)
    return out


class _ArcFamily:
    """Tangential arcs from a window on segment `sa` to a window on `sb`."""

    def __init__(self, pts: list[Vec], sa: int, sb: int,
                 lo_a: float, hi_a: float, lo_b: float, hi_b: float,
                 ccw: bool):
        self.ok = False
        a0, a1 = pts[sa], pts[sa + 1]
        b0, b1 = pts[sb], pts[sb + 1]
        u = a1 - a0
        w = b1 - b0
        lu, lw = u.norm(), w.norm()
        if lu == 0.0 or lw == 0.0:
            return
        u = u * (1.0 / lu)
        w = w * (1.0 / lw)
        nu = u.perp() if ccw else -u.perp()
        nw = w.perp() if ccw else -w.perp()
        self.a0, self.u, self.nu = a0, u, nu
        self.b0, self.w, self.nw = b0, w, nw
        self.ccw = ccw
        cross_uw = u.cross(w)
        self.windows = (lo_a, hi_a, lo_b, hi_b)
        if abs(cross_uw) < 1e-12:
            if u.dot(w) > 0.0:
                return  # collinear directions: nothing to round
            # hairpin: a single radius closes the gap between the two lines
            r = 0.5 * (b0 - a0).dot(nu)
            if r <= 0.0:
                return
            p = min(max((b0 - a0).dot(u), lo_a), hi_a)
            q = (a0 + u * p - b0).dot(w)
            if not (lo_b - 1e-9 <= q <= hi_b + 1e-9):
                return
            self.r_lo = self.r_hi = r
            self._p0, self._p1 = p, 0.0
            self._q0, self._q1 = q, 0.0
            self.ok = True
            return
        # p(R), q(R) affine: solve p*u - q*w = (b0-a0) + R*(nw-nu)
        k0 = b0 - a0
        k1 = nw - nu
        p0 = k0.cross(w) / cross_uw
        p1 = k1.cross(w) / cross_uw
        q0 = -u.cross(k0) / cross_uw
        q1 = -u.cross(k1) / cross_uw
        self._p0, self._p1, self._q0, self._q1 = p0, p1, q0, q1
        lo, hi = 0.0, math.inf
        for c0, c1, wlo, whi in ((p0, p1, lo_a, hi_a), (q0, q1, lo_b, hi_b)):
            if abs(c1) < 1e-15:
                if not (wlo - 1e-9 <= c0 <= whi + 1e-9):
                    return
                continue
            r1 = (wlo - c0) / c1
            r2 = (whi - c0) / c1
            lo = max(lo, min(r1, r2))
            hi = min(hi, max(r1, r2))
        if hi < lo:
            return
        self.r_lo, self.r_hi = lo, hi
        self.ok = True

    def arc(self, r: float) -> tuple[ArcElement, float, float] | None:
        p = self._p0 + self._p1 * r
        q = self._q0 + self._q1 * r
        P = self.a0 + self.u * p
        Q = self.b0 + self.w * q
        c = P + self.nu * r
        if r <= 0.0:
            return None
        sa = (P - c).angle()
        ea = (Q - c).angle()
        el = ArcElement(c, r, sa, ea, "ccw" if self.ccw else "cw")
        if el.subtended() >= 2.0 * math.pi - 1e-9:
            return None
        return el, p, q


def _zero_arc(pts: list[Vec], i: int, turn: float) -> ArcElement:
    u_in = (pts[i] - pts[i - 1]).unit()
    u_out = (pts[i + 1] - pts[i]).unit()
    ccw = turn > 0.0
    r_in = -u_in.perp() if ccw else u_in.perp()
    r_out = -u_out.perp() if ccw else u_out.perp()
    return ArcElement(pts[i], 0.0, r_in.angle(), r_out.angle(),
                      "ccw" if ccw else "cw")


class Rounder:
    def __init__(self, spiral: SpiralBuilder, delta: float,
                 clearance_max: float, regrow_cap: int = 8,
                 search_tol_factor: float = 0.01):
        self.spiral = spiral
        self.delta = delta
        self.r_cmax = max(clearance_max, 1e-12)
        self.regrow_cap = regrow_cap
        self.search_tol = search_tol_factor * delta

        corners = spiral.corners
        self.n_total = len(corners)
        first_real = 0
        while first_real < len(corners) and corners[first_real].guard:
            first_real += 1
        last_real = len(corners) - 1
        while last_real >= 0 and corners[last_real].guard:
            last_real -= 1
        self.start_index = first_real
        self.end_index = last_real
        self.pts = [c.pt for c in corners[first_real:last_real + 1]]
        self.turns = corner_turns(self.pts)
        self.split_fracs = subdivide_segments(self.pts)
        # children per corner (full-array indices), from the parent pointers
        self.children: dict[int, list[int]] = {}
        for idx, c in enumerate(corners):
            for p in c.parents:
                self.children.setdefault(p, []).append(idx)
        self.arcs: dict[int, Arc] = {}
        self.corner_arc: dict[int, int] = {}
        self._next_arc = 0
        self.heap: list[tuple[float, int, int]] = []
        self.enlargements = 0

    # -- indices: local corner i <-> spiral index ----------------------------

    def _spiral_index(self, i: int) -> int:
        return self.start_index + i

    def _local(self, idx: int) -> int | None:
        j = idx - self.start_index
        return j if 0 <= j < len(self.pts) else None

    # -- windows -------------------------------------------------------------

    def _window(self, seg: int) -> tuple[float, float]:
        """Allowed absolute parameter range split point on segment `seg`."""
        L = self.pts[seg].dist(self.pts[seg + 1])
        return self.split_fracs[seg] * L, L

    def _seg_len(self, seg: int) -> float:
        return self.pts[seg].dist(self.pts[seg + 1])

    # -- usability -----------------------------------------------------------

    def _corner_geom(self, idx: int) -> ArcElement | None:
        """Arc currently rounding full-array corner `idx`, if any."""
        c = self.spiral.corners[idx]
        if c.guard:
            return None
        j = self._local(idx)
        if j is None:
            return None
        aid = self.corner_arc.get(j)
        if aid is None:
            return None
        a = self.arcs[aid]
        if a.alive and a.element is not None and a.radius > 0.0:
            return a.element

    def _chain_between(self, a_idx: int, b_idx: int,
                       override: tuple[int, int, ArcElement] | None = None
                       ) -> list[Element]:
        """Current rounded geometry of full-array corners a_idx..b_idx as a
        connected element chain. `override` replaces corners lo..hi (local
        indices) with a candidate arc."""
        els: list[Element] = []
        cursor: Vec | None = None
        seen_arcs: set[int] = set()
        idx = a_idx
        while idx <= b_idx:
            c = self.spiral.corners[idx]
            geom = None
            skip_to = idx
            j = self._local(idx)
            if override is not None and j is not None and \
                    override[0] <= j <= override[1]:
                geom = override[2]
                skip_to = self._spiral_index(override[1])
            else:
                geom = self._corner_geom(idx)
                if geom is not None:
                    aid = self.corner_arc[j]
                    if aid in seen_arcs:
                        idx += 1
                        continue
                    seen_arcs.add(aid)
                    skip_to = self._spiral_index(self.arcs[aid].hi)
            if geom is None:
                if cursor is not None and cursor.dist(c.pt) > 1e-15:
                    els.append(Segment(cursor, c.pt))
                cursor = c.pt
                idx += 1
            else:
                start = geom.start()
                if cursor is not None and cursor.dist(start) > 1e-15:
                    els.append(Segment(cursor, start))
                els.append(geom)
                cursor = geom.end()
                idx = skip_to + 1
        return els

    def _relatives(self, lo: int, hi: int) -> tuple[list[int], list[int]]:
        parents: list[int] = []
        kids: list[int] = []
        for i in range(max(lo - 1, 1), min(hi + 1, len(self.pts) - 1) + 1):
            idx = self._spiral_index(i)
            for p in self.spiral.corners[idx].parents:
                if p not in parents:
                    parents.append(p)
            for ch in self.children.get(idx, ()):
                if ch not in kids:
                    kids.append(ch)
        return parents, kids

    def _sample_arc(self, el: ArcElement, n: int = 13) -> list[Vec]:
        return [el.point_at(k / (n - 1)) for k in range(n)]

    def _usable(self, el: ArcElement, lo: int, hi: int) -> bool:
        parents, kids = self._relatives(lo, hi)
        samples = self._sample_arc(el)
        # stepover to the parent revolution (or boundary / start point)
        if parents:
            p_chain = self._chain_between(min(parents), max(parents))
            if not p_chain:
                ppt = self.spiral.corners[parents[0]].pt
                p_chain = [Segment(ppt, ppt + Vec(1e-15, 0.0))]
            for s in samples:
                if min(dist_point_element(s, pe) for pe in p_chain) > self.delta:
                    return False
            for pe in p_chain:
                if element_crossings(el, pe):
                    return False
        # the child revolution (or guard ring) must still reach this one
        if kids:
            local = self._chain_between(
                self._spiral_index(max(lo - 2, 0)),
                self._spiral_index(min(hi + 2, len(self.pts) - 1)),
                override=(lo, hi, el))
            k_chain = self._chain_between(min(kids), max(kids))
            step = max(self.delta / 3.0, 1e-9)
            for ke in k_chain:
                if element_crossings(el, ke):
                    return False
                for q in ke.sample(step):
                    if dist_point_element(q, el) > 3.0 * self.delta:
                        continue  # not this arc's responsibility
                    if min(dist_point_element(q, le) for le in local) > self.delta:
                        return False
        # no crossing with nearby untouched polyline pieces
        for i in (lo - 2, hi + 1):
            if 0 <= i < len(self.pts) - 1:
                if element_crossings(el, Segment(self.pts[i], self.pts[i + 1])):
                    return False
        return True

    # -- queue ----------------------------------------------------------------

    def _priority(self, radius: float, subtended: float) -> float:
        if subtended <= 1e-12:
            return math.inf
        return radius / self.r_cmax + 1.0 / subtended

    def _push(self, arc: Arc) -> None:
        pr = self._priority(arc.radius, arc.subtended)
        if math.isfinite(pr):
            heapq.heappush(self.heap, (pr, arc.lo, arc.id))

    def _new_arc(self, lo: int, hi: int, radius: float,
                 element: ArcElement | None, start_seg: int, end_seg: int,
                 p: float, q: float, subtended: float) -> Arc:
        arc = Arc(self._next_arc, lo, hi, radius, element, start_seg, end_seg,
                  p, q, subtended)
        self._next_arc += 1
        self.arcs[arc.id] = arc
        for i in range(lo, hi + 1):
            self.corner_arc[i] = arc.id
        return arc

    # -- candidate construction ------------------------------------------------

    def _family(self, lo: int, hi: int) -> _ArcFamily | None:
        sa = lo - 1
        sb = hi
        if sa < 0 or sb >= len(self.pts) - 1 or sa >= sb:
            return None
        total_turn = sum(self.turns[lo:hi + 1])
        if abs(total_turn) <= 1e-12:
            return None
        ccw = total_turn > 0.0
        split_a, La = self._window(sa)
        split_b, Lb = self._window(sb)
        fam = _ArcFamily(self.pts, sa, sb, split_a, La, 0.0, split_b, ccw)
        return fam if fam.ok else None

    def _largest_usable(self, lo: int, hi: int) -> tuple[ArcElement, float, float, float] | None:
        fam = self._family(lo, hi)
        if fam is None:
            return None
        r_lo, r_hi = fam.r_lo, fam.r_hi
        r_hi = min(r_hi, 1e7 * self.delta)
        if r_hi < r_lo:
            return None
        made = fam.arc(max(r_lo, 1e-9 * self.delta))
        if made is None or not self._usable(made[0], lo, hi):
            return None
        best = (made[0], max(r_lo, 1e-9 * self.delta), made[1], made[2])
        made_hi = fam.arc(r_hi)
        if made_hi is not None and self._usable(made_hi[0], lo, hi):
            return made_hi[0], r_hi, made_hi[1], made_hi[2]
        lo_r, hi_r = best[1], r_hi
        while hi_r - lo_r > self.search_tol:
            mid = 0.5 * (lo_r + hi_r)
            made_mid = fam.arc(mid)
            if made_mid is not None and self._usable(made_mid[0], lo, hi):
                lo_r = mid
                best = (made_mid[0], mid, made_mid[1], made_mid[2])
            else:
                hi_r = mid
        return best

    # -- main -------------------------------------------------------------------

    def run(self) -> RoundedSpiral:
        pts = self.pts
        for i in range(1, len(pts) - 1):
            turn = self.turns[i]
            el = _zero_arc(pts, i, turn) if abs(turn) > 1e-12 else None
            arc = self._new_arc(i, i, 0.0, el, i - 1, i,
                                self._seg_len(i - 1), 0.0, abs(turn))
            self._push(arc)

        budget = 60 * max(len(pts), 1)
        while self.heap and budget > 0:
            budget -= 1
            pr, _, aid = heapq.heappop(self.heap)
            arc = self.arcs.get(aid)
            if arc is None or not arc.alive:
                continue
            if pr > self._priority(arc.radius, arc.subtended) + 1e-12:
                continue  # stale entry
            self._process(arc)
        return self._assemble()

    def _neighbor(self, arc: Arc, right: bool) -> Arc | None:
        i = arc.hi + 1 if right else arc.lo - 1
        if not (1 <= i <= len(self.pts) - 2):
            return None
        aid = self.corner_arc.get(i)
        return self.arcs.get(aid) if aid is not None else None

    def _process(self, arc: Arc) -> None:
        left = self._neighbor(arc, right=False)
        right = self._neighbor(arc, right=True)
        attempts: list[tuple[int, int, list[Arc]]] = []
        if left is not None and right is not None:
            attempts.append((left.lo, right.hi, [left, arc, right]))
        if left is not None:
            attempts.append((left.lo, arc.hi, [left, arc]))
        if right is not None:
            attempts.append((arc.lo, right.hi, [arc, right]))
        allow_self = arc.enlarge_count < self.regrow_cap
        if allow_self:
            attempts.append((arc.lo, arc.hi, [arc]))
        for lo, hi, absorbed in attempts:
            found = self._largest_usable(lo, hi)
            if found is None:
                continue
            el, radius, p, q = found
            if len(absorbed) == 1 and radius <= arc.radius + self.search_tol:
                continue
            for old in absorbed:
                old.alive = False
            new = self._new_arc(lo, hi, radius, el, lo - 1, hi, p, q,
                                el.subtended())
            if len(absorbed) == 1:
                new.enlarge_count = arc.enlarge_count + 1
            self.enlargements += 1
            self._push(new)
            self._requeue_relatives(lo, hi)
            return

    def _requeue_relatives(self, lo: int, hi: int) -> None:
        parents, kids = self._relatives(lo, hi)
        for idx in parents + kids:
            j = self._local(idx)
            if j is None or not (1 <= j <= len(self.pts) - 2):
                continue
            aid = self.corner_arc.get(j)
            if aid is None:
                continue
            a = self.arcs[aid]
            if a.alive:
                self._push(a)

    # -- assembly ---------------------------------------------------------------

    def _assemble(self) -> RoundedSpiral:
        pts = self.pts
        elements: list[Element] = []
        cursor = pts[0]
        seen: set[int] = set()
        eps = 1e-9 * max(self.delta, 1e-12)
        i = 1
        while i <= len(pts) - 2:
            aid = self.corner_arc.get(i)
            arc = self.arcs.get(aid) if aid is not None else None
            if arc is None or not arc.alive or arc.element is None or arc.radius <= 0.0:
                if cursor.dist(pts[i]) > eps:
                    elements.append(Segment(cursor, pts[i]))
                    cursor = pts[i]
                i += 1
                continue
            if arc.id in seen:
                i += 1
                continue
            seen.add(arc.id)
            start = arc.element.start()
            if cursor.dist(start) > eps:
                elements.append(Segment(cursor, start))
            elements.append(arc.element)
            cursor = arc.element.end()
            i = arc.hi + 1
        if cursor.dist(pts[-1]) > eps:
            elements.append(Segment(cursor, pts[-1]))
        corner_arc = {i: aid for i, aid in self.corner_arc.items()
                      if self.arcs[aid].alive}
        return RoundedSpiral(elements, corner_arc, self.arcs,
                             self.start_index, self.enlargements)


def round_spiral(spiral: SpiralBuilder, delta: float, clearance_max: float,
                 regrow_cap: int = 8,
                 search_tol_factor: float = 0.01) -> RoundedSpiral:
    return Rounder(spiral, delta, clearance_max, regrow_cap,
                   search_tol_factor).run()
