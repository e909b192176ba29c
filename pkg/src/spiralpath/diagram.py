"""Plane-graph representation of the refined Voronoi diagram of a pocket:
nodes, straight edges, counterclockwise rotation order, rooted-tree views,
Euler traversal and the face/angle helpers used by refinement and islands."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .geom import Vec, Polygon, ccw_angle


@dataclass
class DiagramNode:
    id: int
    pt: Vec
    clearance: float = 0.0
    # boundary attachment of leaves: (ring index, edge index, param) or None
    boundary_pos: tuple[int, int, float] | None = None
    # set when the leaf sits exactly on an input corner: (ring, vertex index)
    corner: tuple[int, int] | None = None

    @property
    def on_boundary(self) -> bool:
        return self.boundary_pos is not None


@dataclass
class DiagramEdge:
    id: int
    a: int
    b: int
    length: float
    # defining boundary feature pair for genuine bisector edges, else None
    sites: tuple | None = None
    on_cycle: bool = False

    def other(self, n: int) -> int:
        if n == self.a:
            return self.b
        if n == self.b:
            return self.a
        raise ValueError("node not incident to edge")


@dataclass
class AuxEdge:
    """Closest-approach connector between two distinct input objects."""
    a: int
    b: int
    objects: tuple[int, int]
    length: float


class Diagram:
    """Undirected plane graph with a CCW rotation system per node.

    The basic (no island) diagram is additionally rooted, which fills in the
    parent/children structure used by the wave machinery.
    """

    def __init__(self, pocket: Polygon, islands: list[Polygon], eps: float):
        self.pocket = pocket
        self.islands = islands
        self.eps = eps
        self.nodes: dict[int, DiagramNode] = {}
        self.edges: dict[int, DiagramEdge] = {}
        self.adj: dict[int, list[int]] = {}
        self.root: int | None = None
        self.cycle_nodes: list[int] = []
        self.aux_edges: list[AuxEdge] = []
        self.aux_node_ids: set[int] = set()
        self._next_node = 0
        self._next_edge = 0

    # -- construction ------------------------------------------------------

    def add_node(self, pt: Vec, clearance: float = 0.0,
                 boundary_pos=None, corner=None) -> int:
        nid = self._next_node
        self._next_node += 1
        self.nodes[nid] = DiagramNode(nid, pt, clearance, boundary_pos, corner)
        self.adj[nid] = []
        return nid

    def add_edge(self, a: int, b: int, sites=None, on_cycle: bool = False) -> int:
        length = self.nodes[a].pt.dist(self.nodes[b].pt)
        if length <= 0.0:
            raise ValueError("zero-length diagram edge")
        eid = self._next_edge
        self._next_edge += 1
        self.edges[eid] = DiagramEdge(eid, a, b, length, sites, on_cycle)
        self._insert_sorted(a, eid)
        self._insert_sorted(b, eid)
        return eid

    def remove_edge(self, eid: int) -> None:
        e = self.edges.pop(eid)
        self.adj[e.a].remove(eid)
        self.adj[e.b].remove(eid)

    def remove_isolated_nodes(self) -> None:
        for nid in [n for n, es in self.adj.items() if not es]:
            del self.adj[nid]
            del self.nodes[nid]

    def split_edge(self, eid: int, pt: Vec, clearance: float | None = None) -> int:
        """Insert a node at `pt` on edge `eid`; returns the new node id."""
        e = self.edges[eid]
        if clearance is None:
            na, nb = self.nodes[e.a], self.nodes[e.b]
            t = (pt - na.pt).norm() / e.length
            clearance = na.clearance + (nb.clearance - na.clearance) * t
        mid = self.add_node(pt, clearance)
        a, b, sites, cyc = e.a, e.b, e.sites, e.on_cycle
        self.remove_edge(eid)
        self.add_edge(a, mid, sites, cyc)
        self.add_edge(mid, b, sites, cyc)
        return mid

    def edge_dir(self, eid: int, frm: int) -> Vec:
        e = self.edges[eid]
        return (self.nodes[e.other(frm)].pt - self.nodes[frm].pt).unit()

    def _insert_sorted(self, nid: int, eid: int) -> None:
        ring = self.adj[nid]
        ang = self.edge_dir(eid, nid).angle()
        lo = 0
        while lo < len(ring) and self.edge_dir(ring[lo], nid).angle() <= ang:
            lo += 1
        ring.insert(lo, eid)

    # -- rotation system ---------------------------------------------------

    def next_ccw(self, eid: int, nid: int) -> int:
        """Next edge counterclockwise after `eid` among the edges at `nid`."""
        ring = self.adj[nid]
        i = ring.index(eid)
        return ring[(i + 1) % len(ring)]

    def next_cw(self, eid: int, nid: int) -> int:
        ring = self.adj[nid]
        i = ring.index(eid)
        return ring[(i - 1) % len(ring)]

    def degree(self, nid: int) -> int:
        return len(self.adj[nid])

    def leaves(self) -> list[int]:
        return [n for n in self.nodes if self.degree(n) == 1]

    # -- structure ---------------------------------------------------------

    def connected(self) -> bool:
        proper = [n for n in self.nodes if n not in self.aux_node_ids]
        if not proper:
            return False
        start = proper[0]
        seen = {start}
        stack = [start]
        while stack:
            n = stack.pop()
            for eid in self.adj[n]:
                m = self.edges[eid].other(n)
                if m not in seen:
                    seen.add(m)
                    stack.append(m)
        return len(seen) == len(proper)

    def two_core_cycle(self) -> list[int]:
        """Node ids of the unique cycle (single-island case), in cycle order
        with positive (counterclockwise) orientation. Empty if acyclic."""
        deg = {n: self.degree(n) for n in self.nodes}
        stack = [n for n, dd in deg.items() if dd <= 1]
        removed: set[int] = set()
        while stack:
            n = stack.pop()
            if n in removed:
                continue
            removed.add(n)
            for eid in self.adj[n]:
                m = self.edges[eid].other(n)
                if m not in removed:
                    deg[m] -= 1
                    if deg[m] <= 1:
                        stack.append(m)
        core = sorted(n for n in self.nodes if n not in removed)
        if not core:
            return []
        core_set = set(core)
        nbrs: dict[int, list[int]] = {n: [] for n in core}
        for e in self.edges.values():
            if e.a in core_set and e.b in core_set:
                nbrs[e.a].append(e.b)
                nbrs[e.b].append(e.a)
        if any(len(v) != 2 for v in nbrs.values()):
            raise ValueError("two-core is not a single simple cycle")
        start = core[0]
        order = [start]
        prev, cur = None, start
        while True:
            a, b = nbrs[cur]
            nxt = b if a == prev else a
            if nxt == start:
                break
            order.append(nxt)
            prev, cur = cur, nxt
        area = 0.0
        for i in range(len(order)):
            a = self.nodes[order[i]].pt
            b = self.nodes[order[(i + 1) % len(order)]].pt
            area += a.cross(b)
        if area < 0.0:
            order = [order[0]] + list(reversed(order[1:]))
        return order

    def mark_cycle(self, order: list[int]) -> None:
        self.cycle_nodes = order
        on = set()
        for i in range(len(order)):
            a, b = order[i], order[(i + 1) % len(order)]
            for eid in self.adj[a]:
                if self.edges[eid].other(a) == b:
                    on.add(eid)
                    break
        for e in self.edges.values():
            e.on_cycle = e.id in on

    # -- local angles ------------------------------------------------------

    def merged_angle_without(self, eid: int, nid: int) -> float:
        """Interior angle at `nid` of the face obtained by deleting `eid`:
        the CCW angle from the rotation predecessor of `eid` to its successor."""
        ring = self.adj[nid]
        if len(ring) < 2:
            return 2.0 * math.pi
        i = ring.index(eid)
        nxt = ring[(i + 1) % len(ring)]
        prv = ring[(i - 1) % len(ring)]
        if nxt == prv:
            return 2.0 * math.pi
        return ccw_angle(self.edge_dir(prv, nid), self.edge_dir(nxt, nid))


class RootedTree:
    """Directed view of (a subtree of) the diagram: parent edge per node and
    ordered child edges, counterclockwise with the first following the parent.

    `mirror=True` flips the rotation order, which is how trees hanging on the
    inner side of the central cycle are traversed.
    """

    def __init__(self, diagram: Diagram, root: int,
                 edge_filter=None, mirror: bool = False,
                 reference_dir: Vec | None = None):
        self.diagram = diagram
        self.root = root
        self.mirror = mirror
        self.parent_edge: dict[int, int | None] = {root: None}
        self.children: dict[int, list[int]] = {}
        self.start: dict[int, int] = {}
        self.end: dict[int, int] = {}
        self.index_in_start: dict[int, int] = {}
        self.heights: dict[int, float] = {}
        self._build(edge_filter, reference_dir)

    def _ordered_incident(self, nid: int, after_dir: Vec | None, edge_filter):
        d = self.diagram
        eids = [e for e in d.adj[nid] if edge_filter is None or edge_filter(e)]
        if self.mirror:
            eids = list(reversed(eids))
        if after_dir is None or not eids:
            return eids
        ang0 = after_dir.angle()

        def key(eid):
            a = d.edge_dir(eid, nid).angle() - ang0
            if self.mirror:
                a = -a
            a %= 2.0 * math.pi
            return a if a > 1e-13 else 2.0 * math.pi

        return sorted(eids, key=key)

    def _build(self, edge_filter, reference_dir) -> None:
        d = self.diagram
        stack = [(self.root, None, reference_dir)]
        while stack:
            nid, pe, pdir = stack.pop()
            kids = [e for e in self._ordered_incident(nid, pdir, edge_filter)
                    if e != pe]
            self.children[nid] = kids
            for i, eid in enumerate(kids):
                m = d.edges[eid].other(nid)
                self.start[eid] = nid
                self.end[eid] = m
                self.index_in_start[eid] = i
                self.parent_edge[m] = eid
                stack.append((m, eid, -d.edge_dir(eid, nid)))
        self._compute_heights()

    def _compute_heights(self) -> None:
        order = []
        stack = [self.root]
        while stack:
            n = stack.pop()
            order.append(n)
            for eid in self.children[n]:
                stack.append(self.end[eid])
        for n in reversed(order):
            h = 0.0
            for eid in self.children[n]:
                h = max(h, self.diagram.edges[eid].length + self.heights[self.end[eid]])
            self.heights[n] = h

    @property
    def nodes(self) -> list[int]:
        return list(self.children.keys())

    @property
    def edge_ids(self) -> list[int]:
        return list(self.start.keys())

    def leaves_in_order(self) -> list[int]:
        out = []
        stack = [self.root]
        while stack:
            n = stack.pop()
            kids = self.children[n]
            if not kids and n != self.root:
                out.append(n)
            for eid in reversed(kids):
                stack.append(self.end[eid])
        return out

    def walk_down(self):
        """Depth-first generator of (node, child edge) in traversal order."""
        stack = [(self.root, list(self.children[self.root]))]
        while stack:
            nid, kids = stack[-1]
            if not kids:
                stack.pop()
                continue
            eid = kids.pop(0)
            yield nid, eid
            m = self.end[eid]
            stack.append((m, list(self.children[m])))

    def path_to_root(self, nid: int):
        """Edge ids from `nid` down to the root."""
        out = []
        while self.parent_edge[nid] is not None:
            eid = self.parent_edge[nid]
            out.append(eid)
            nid = self.start[eid]
        return out


def compute_heights(tree: RootedTree) -> dict[int, float]:
    return tree.heights


def traversal_edge_visits(tree: RootedTree) -> int:
    """Number of edge visits of the full counterclockwise Euler traversal
    implemented with next_ccw; every edge is seen exactly twice."""
    d = tree.diagram
    if not tree.children[tree.root]:
        return 0
    n0, e0 = tree.root, tree.children[tree.root][0]
    n, e = n0, e0
    visits = 0
    while True:
        visits += 1
        n = d.edges[e].other(n)
        e = d.next_ccw(e, n)
        if (n, e) == (n0, e0) or visits > 4 * len(d.edges) + 4:
            break
    return visits
