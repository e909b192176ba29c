"""Discrete wavefronts: one corner per root-leaf path per time step, stored
with cumulative lengths and parent pointers into the previous wavefront."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .geom import Vec
from .diagram import RootedTree
from .wave import WaveAnnotation


@dataclass
class WfCorner:
    pt: Vec
    edge: int          # hosting edge (tree edge id); root copies use the child edge
    time: float        # wave time of the wavefront
    parent: int        # index into the previous wavefront (-1 on wavefront 0)


@dataclass
class WavefrontSet:
    wf: list[list[WfCorner]]
    lng: list[list[float]]
    total: list[float]
    r: int
    delta_t: float
    delta_prime: float

    def polygon(self, i: int) -> list[Vec]:
        return [c.pt for c in self.wf[i]]


def build_wavefronts(tree: RootedTree, ann: WaveAnnotation,
                     delta: float, shrink: float = 0.95,
                     r: int | None = None) -> WavefrontSet:
    """Wavefronts at times i/r for i=0..r with r = ceil(height/(shrink*delta)),
    corners emitted in counterclockwise traversal order; corner i on edge e
    exactly when time(start) < i/r <= time(end)."""
    H = tree.heights[tree.root]
    dp = shrink * delta
    if r is None:
        r = max(1, math.ceil(H / dp - 1e-12))
    wf: list[list[WfCorner]] = [[] for _ in range(r + 1)]

    d = tree.diagram
    root_pt = d.nodes[tree.root].pt
    # DFS with per-wavefront "last corner on the current root path" state
    path_state: dict[int, int] = {}
    undo: list[tuple[int, int | None]] = []

    def emit(i: int, pt: Vec, eid: int) -> None:
        parent = path_state.get(i - 1, -1) if i > 0 else -1
        wf[i].append(WfCorner(pt, eid, i / r, parent))
        undo.append((i, path_state.get(i)))
        path_state[i] = len(wf[i]) - 1

    stack: list[tuple[str, object]] = []
    kids = tree.children[tree.root]
    for eid in reversed(kids):
        stack.append(("edge", eid))
    frames: list[list[tuple[str, object]]] = [list(reversed([("edge", e) for e in kids]))]

    # iterative DFS: process child edges in order, restoring path state on exit
    def walk():
        def visit_edge(eid: int):
            n = tree.start[eid]
            m = tree.end[eid]
            t_lo = ann.tm_nd[n]
            t_hi = ann.tm_nd[m]
            mark = len(undo)
            if n == tree.root:
                emit(0, root_pt, eid)
            i = math.floor(t_lo * r) + 1
            while i / r <= t_lo:
                i += 1
            while i <= r and i / r <= t_hi:
                is_leaf_end = not tree.children[m]
                if i == r and is_leaf_end:
                    pt = d.nodes[m].pt
                else:
                    pt = ann.get_point(eid, i / r)
                emit(i, pt, eid)
                i += 1
            for child in tree.children[m]:
                visit_edge(child)
            while len(undo) > mark:
                j, prev = undo.pop()
                if prev is None:
                    path_state.pop(j, None)
                else:
                    path_state[j] = prev

        for eid in tree.children[tree.root]:
            visit_edge(eid)

    import sys
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 10000 + 4 * len(tree.start)))
    try:
        walk()
    finally:
        sys.setrecursionlimit(old)

    lng: list[list[float]] = []
    total: list[float] = []
    for row in wf:
        acc = [0.0]
        for a, b in zip(row, row[1:]):
            acc.append(acc[-1] + a.pt.dist(b.pt))
        lng.append(acc)
        total.append(acc[-1] if acc else 0.0)
    return WavefrontSet(wf, lng, total, r, 1.0 / r, dp)
