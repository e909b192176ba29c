"""Wave movement over a rooted diagram tree: center choice, per-edge
time/speed profiles, and the profile evaluators.

The wave leaves the root at t=0 with speed equal to the root height, travels
at constant speed along the longest paths and decelerates linearly over the
first quarter of every shorter branch, reaching every leaf exactly at t=1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geom import Vec, lerp
from .diagram import Diagram, RootedTree


class WaveError(Exception):
    pass


@dataclass
class EdgeProfile:
    t_n: float   # time the wave enters the edge's start node
    v_n: float   # speed at the start node
    t_e: float   # end of the linear deceleration ramp
    v_e: float   # constant speed after the ramp
    length: float

    def speed(self, t: float) -> float:
        if t >= self.t_e or self.t_e <= self.t_n:
            return self.v_e
        x = (t - self.t_n) / (self.t_e - self.t_n)
        return (1.0 - x) * self.v_n + x * self.v_e

    def dist(self, t: float) -> float:
        """Distance travelled from the start node up to time t."""
        if t <= self.t_n:
            return 0.0
        if self.t_e <= self.t_n or t >= self.t_e:
            ramp = 0.5 * (self.v_n + self.v_e) * max(self.t_e - self.t_n, 0.0)
            return ramp + self.v_e * (t - max(self.t_e, self.t_n))
        return 0.5 * (self.v_n + self.speed(t)) * (t - self.t_n)

    def time(self, d: float) -> float:
        """Inverse of dist(); quadratic on the ramp, linear after."""
        if d <= 0.0:
            return self.t_n
        ramp_len = self.t_e - self.t_n
        ramp_dist = 0.5 * (self.v_n + self.v_e) * ramp_len if ramp_len > 0 else 0.0
        if ramp_len > 0.0 and d <= ramp_dist:
            a = (self.v_e - self.v_n) / ramp_len
            if abs(a) < 1e-15:
                return self.t_n + d / self.v_n
            disc = self.v_n * self.v_n + 2.0 * a * d
            if disc < 0.0:
                disc = 0.0
            tau = (-self.v_n + math.sqrt(disc)) / a
            return self.t_n + tau
        if self.v_e <= 0.0:
            raise WaveError("distance beyond the reach of a stopped wave")
        return max(self.t_e, self.t_n) + (d - ramp_dist) / self.v_e


class WaveAnnotation:
    """Times and speeds for every node and edge of one rooted tree."""

    def __init__(self, tree: RootedTree):
        self.tree = tree
        self.tm_nd: dict[int, float] = {}
        self.ve_nd: dict[int, float] = {}
        self.profiles: dict[int, EdgeProfile] = {}

    def get_speed(self, eid: int, t: float) -> float:
        return self.profiles[eid].speed(t)

    def get_dist(self, eid: int, t: float) -> float:
        return self.profiles[eid].dist(t)

    def get_time(self, eid: int, d: float) -> float:
        p = self.profiles[eid]
        if d < -1e-9 * p.length or d > p.length * (1.0 + 1e-9) + 1e-12:
            raise WaveError("distance outside edge")
        return p.time(min(max(d, 0.0), p.length))

    def get_point(self, eid: int, t: float) -> Vec:
        tree = self.tree
        p = self.profiles[eid]
        x = p.dist(t) / p.length
        x = min(max(x, 0.0), 1.0)
        a = tree.diagram.nodes[tree.start[eid]].pt
        b = tree.diagram.nodes[tree.end[eid]].pt
        return lerp(a, b, x)


def _solve_quarter_profile(t_n: float, v_n: float, h: float) -> tuple[float, float]:
    """TmEd, VeEd with total distance h by t=1 and a quarter of it covered by
    the end of the ramp."""
    T = 1.0 - t_n
    if T <= 0.0:
        raise WaveError("no time left for edge")
    B = T * v_n - 1.25 * h
    disc = B * B + 3.0 * T * h * v_n
    v = (-B + math.sqrt(max(disc, 0.0))) / (2.0 * T)
    tau = h / (2.0 * (v_n + v)) if (v_n + v) > 0 else 0.0
    return t_n + tau, v


def _solve_same_rate(t_n: float, v_n: float, a: float, h: float) -> tuple[float, float] | None:
    """TmEd, VeEd keeping deceleration rate `a` with total distance h by t=1;
    None when no meaningful root exists."""
    T = 1.0 - t_n
    D = T * T - (2.0 / a) * (h - v_n * T)
    if D < -1e-12 * max(T * T, 1.0):
        return None
    tau = T - math.sqrt(max(D, 0.0))
    if tau < -1e-12 or tau > T + 1e-12:
        return None
    v = v_n + a * tau
    if v < -1e-12:
        return None
    return t_n + max(tau, 0.0), max(v, 0.0)


def set_times_and_speeds(tree: RootedTree, t_root: float = 0.0,
                         v_root: float | None = None) -> WaveAnnotation:
    """Times and speeds per Appendix-style wave propagation: inherit the
    parent profile when it already covers the branch; otherwise keep slowing
    at the same rate when the branch is nearly as tall, else re-profile with
    the quarter-ramp rule."""
    ann = WaveAnnotation(tree)
    d = tree.diagram
    H = tree.heights[tree.root]
    if v_root is None:
        v_root = H
    if H > 0.0 and v_root * (1.0 - t_root) < H * (1.0 - 1e-9):
        raise WaveError("root speed cannot reach the farthest leaf in time")
    ann.tm_nd[tree.root] = t_root
    ann.ve_nd[tree.root] = v_root

    for nid, eid in tree.walk_down():
        t_n = ann.tm_nd[nid]
        v_n = ann.ve_nd[nid]
        if nid == tree.root:
            t_e, v_e = t_n, v_n
        else:
            parent = tree.parent_edge[nid]
            pp = ann.profiles[parent]
            t_e, v_e = pp.t_e, pp.v_e
        L = d.edges[eid].length
        h = tree.heights[tree.end[eid]] + L
        prof = EdgeProfile(t_n, v_n, t_e, v_e, L)
        if prof.dist(1.0) > h:
            done = False
            if t_n < t_e and tree.heights[nid] <= 1.1 * h:
                a = (v_e - v_n) / (t_e - t_n)
                v1 = v_n + a * (1.0 - t_n)
                s = 0.5 * (v_n + v1) * (1.0 - t_n)
                if s <= h:
                    solved = _solve_same_rate(t_n, v_n, a, h)
                    if solved is not None:
                        prof = EdgeProfile(t_n, v_n, solved[0], solved[1], L)
                        done = True
            if not done:
                te2, ve2 = _solve_quarter_profile(t_n, v_n, h)
                prof = EdgeProfile(t_n, v_n, te2, ve2, L)
        ann.profiles[eid] = prof
        m = tree.end[eid]
        ann.tm_nd[m] = prof.time(L)
        ann.ve_nd[m] = prof.speed(ann.tm_nd[m])

    # leaves are reached exactly at t=1 up to roundoff; snap them
    for nid in tree.nodes:
        if not tree.children[nid] and nid != tree.root:
            if abs(ann.tm_nd[nid] - 1.0) > 1e-9:
                raise WaveError(f"leaf {nid} reached at {ann.tm_nd[nid]!r}, not 1")
            ann.tm_nd[nid] = 1.0
    return ann


def find_center(d: Diagram) -> int:
    """Node at the point of the diagram minimizing the maximal distance to a
    leaf; interior edge points are realized by splitting the edge there."""

    def farthest(start: int):
        dist = {start: 0.0}
        via: dict[int, tuple[int, int]] = {}
        stack = [start]
        best = (0.0, start)
        while stack:
            n = stack.pop()
            for eid in d.adj[n]:
                m = d.edges[eid].other(n)
                if m in dist:
                    continue
                dist[m] = dist[n] + d.edges[eid].length
                via[m] = (n, eid)
                stack.append(m)
                if dist[m] > best[0]:
                    best = (dist[m], m)
        return best[1], best[0], via

    u, _, _ = farthest(next(iter(sorted(d.nodes))))
    v, diameter, via = farthest(u)
    # walk back from v to u collecting the diameter path
    path = []
    cur = v
    while cur != u:
        n, eid = via[cur]
        path.append((n, eid, cur))
        cur = n
    path.reverse()  # from u to v
    target = diameter / 2.0
    acc = 0.0
    for n, eid, m in path:
        L = d.edges[eid].length
        if acc + L >= target - 1e-15:
            t = (target - acc) / L
            pa, pb = d.nodes[n].pt, d.nodes[m].pt
            pt = lerp(pa, pb, t)
            if pt.dist(pa) <= 10.0 * d.eps:
                return n
            if pt.dist(pb) <= 10.0 * d.eps:
                return m
            return d.split_edge(eid, pt)
        acc += L
    return v


def eccentricity(d: Diagram, nid: int) -> float:
    dist = {nid: 0.0}
    stack = [nid]
    worst = 0.0
    while stack:
        n = stack.pop()
        for eid in d.adj[n]:
            m = d.edges[eid].other(n)
            if m in dist:
                continue
            dist[m] = dist[n] + d.edges[eid].length
            stack.append(m)
            worst = max(worst, dist[m])
    return worst
