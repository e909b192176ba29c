import math
import random

import pytest

from spiralpath.geom import Vec, Polygon, dist_point_segment, lerp
from spiralpath.diagram import Diagram, RootedTree, traversal_edge_visits
from spiralpath.medial import build_diagram, equidistance_violation, face_convexity_violations

from conftest import regular_ngon, l_shape, five_point_star, square_with_island, island_plate


def _feature_distances(p, rings):
    """Independent oracle: distances from p to every boundary segment and
    corner of the input rings."""
    out = []
    for ring in rings:
        vs = ring.vertices
        m = len(vs)
        for i in range(m):
            out.append(dist_point_segment(p, vs[i], vs[(i + 1) % m]))
    return sorted(out)


def _assert_edges_equidistant(diagram, rings, tol):
    for e in diagram.edges.values():
        if e.sites is None:
            continue
        pa = diagram.nodes[e.a].pt
        pb = diagram.nodes[e.b].pt
        for k in (0.25, 0.5, 0.75):
            p = lerp(pa, pb, k)
            ds = _feature_distances(p, rings)
            # nearest two features are (nearly) tied, nothing else is closer
            assert ds[1] - ds[0] <= tol


def test_unit_square_structure():
    sq = Polygon([Vec(0, 0), Vec(1, 0), Vec(1, 1), Vec(0, 1)])
    d = build_diagram(sq)
    interior = [n for n in d.nodes.values() if n.clearance > 1e-9]
    assert len(interior) == 1
    assert interior[0].pt.dist(Vec(0.5, 0.5)) < 1e-9
    assert len(d.edges) == 4
    leaves = [n for n in d.nodes.values() if d.degree(n.id) == 1]
    assert len(leaves) == 4
    _assert_edges_equidistant(d, [sq], 1e-9)


def test_two_by_one_rectangle_structure():
    rect = Polygon([Vec(0, 0), Vec(2, 0), Vec(2, 1), Vec(0, 1)])
    d = build_diagram(rect)
    interior = sorted((n.pt.x, n.pt.y) for n in d.nodes.values() if n.clearance > 1e-9)
    assert len(interior) == 2
    assert abs(interior[0][0] - 0.5) < 1e-9 and abs(interior[0][1] - 0.5) < 1e-9
    assert abs(interior[1][0] - 1.5) < 1e-9 and abs(interior[1][1] - 0.5) < 1e-9
    assert len(d.edges) == 5
    _assert_edges_equidistant(d, [rect], 1e-9)


def test_island_cycle_equidistant():
    outer = Polygon([Vec(0, 0), Vec(1, 0), Vec(1, 1), Vec(0, 1)])
    island = Polygon([Vec(0.4, 0.4), Vec(0.4, 0.6), Vec(0.6, 0.6), Vec(0.6, 0.4)])
    d = build_diagram(outer, [island], delta=0.05)
    cyc = d.two_core_cycle()
    assert len(cyc) >= 8
    bbox_diag = math.sqrt(2.0)
    for nid in cyc:
        p = d.nodes[nid].pt
        di = island.boundary_distance(p)
        do = outer.boundary_distance(p)
        assert abs(di - do) <= 1e-3 * bbox_diag
    # cycle is counterclockwise and encloses the island
    area = 0.0
    for i in range(len(cyc)):
        a = d.nodes[cyc[i]].pt
        b = d.nodes[cyc[(i + 1) % len(cyc)]].pt
        area += a.cross(b)
    assert area > 0.0
    cyc_poly = Polygon([d.nodes[n].pt for n in cyc])
    assert cyc_poly.contains(Vec(0.5, 0.5))
    _assert_edges_equidistant(d, [outer, island], 1e-3 * bbox_diag)


@pytest.mark.parametrize("pocket,delta", [
    (regular_ngon(16), 0.1),
    (l_shape(), 0.2),
    (five_point_star(), 0.08),
])
def test_suite_pockets_pass_equidistance_oracle(pocket, delta):
    d = build_diagram(pocket, delta=delta)
    xs = [v.x for v in pocket.vertices]
    ys = [v.y for v in pocket.vertices]
    diag = math.hypot(max(xs) - min(xs), max(ys) - min(ys))
    _assert_edges_equidistant(d, [pocket], 1e-3 * diag)
    assert equidistance_violation(d) <= 1e-3 * diag


def test_leaves_cover_every_corner():
    for pocket in (regular_ngon(16), l_shape(), five_point_star()):
        d = build_diagram(pocket)
        covered = {n.corner for n in d.nodes.values()
                   if n.corner is not None and d.degree(n.id) >= 1}
        assert covered == {(0, k) for k in range(len(pocket.vertices))}


def test_face_convexity_on_convex_pockets():
    for pocket in (regular_ngon(16), regular_ngon(7),
                   Polygon([Vec(0, 0), Vec(2, 0), Vec(2, 1), Vec(0, 1)])):
        d = build_diagram(pocket)
        assert face_convexity_violations(d, tol=d.eps) == []


def test_multi_island_plate_structure():
    outer, islands = island_plate(13)
    d = build_diagram(outer, islands, delta=0.25)
    v = len([n for n in d.nodes if n not in d.aux_node_ids])
    assert len(d.edges) == v - 1 + 13
    assert len(d.aux_edges) >= 12
    seen_pairs = {a.objects for a in d.aux_edges}
    assert all(o1 != o2 for o1, o2 in seen_pairs)


# -- synthetic-diagram operations ----------------------------------------------


def _synthetic_tree(points, edges):
    d = Diagram(None, [], 1e-9)
    ids = [d.add_node(Vec(x, y)) for x, y in points]
    for a, b in edges:
        d.add_edge(ids[a], ids[b])
    return d, ids


def test_next_ccw_star_and_wraparound():
    # hub at origin with three children, parent edge pointing down
    d, ids = _synthetic_tree(
        [(0, 0), (0, -1), (1, 0.2), (0, 1), (-1, 0.2)],
        [(0, 1), (0, 2), (0, 3), (0, 4)])
    tree = RootedTree(d, ids[1])
    hub = ids[0]
    kids = tree.children[hub]
    dirs = [d.edge_dir(e, hub) for e in kids]
    # children counterclockwise, first follows the parent edge
    assert len(kids) == 3
    assert dirs[0].x > 0 and dirs[1].y > 0.5 and dirs[2].x < 0
    # next_ccw of the last child wraps to the parent edge
    parent = tree.parent_edge[hub]
    assert d.next_ccw(kids[-1], hub) == parent


def test_traversal_visits_each_edge_twice():
    # 7-edge tree: full counterclockwise traversal = 14 edge visits
    d, ids = _synthetic_tree(
        [(0, 0), (1, 0), (2, 1), (2, -1), (-1, 0), (-2, 1), (-2, -1), (0, 2)],
        [(0, 1), (1, 2), (1, 3), (0, 4), (4, 5), (4, 6), (0, 7)])
    tree = RootedTree(d, ids[0])
    assert traversal_edge_visits(tree) == 14


def test_compute_heights_path():
    d, ids = _synthetic_tree([(0, 0), (2, 0), (5, 0)], [(0, 1), (1, 2)])
    tree = RootedTree(d, ids[0])
    assert abs(tree.heights[ids[0]] - 5.0) < 1e-12
    assert abs(tree.heights[ids[1]] - 3.0) < 1e-12
    assert tree.heights[ids[2]] == 0.0


def test_compute_heights_random_tree_vs_bruteforce(rng):
    n = 50
    pts = [(rng.uniform(0, 10), rng.uniform(0, 10)) for _ in range(n)]
    edges = [(rng.randrange(i), i) for i in range(1, n)]
    d, ids = _synthetic_tree(pts, edges)
    tree = RootedTree(d, ids[0])

    adj = {i: [] for i in range(n)}
    for a, b in edges:
        w = math.dist(pts[a], pts[b])
        adj[a].append((b, w))

    def brute(i):
        if not adj[i]:
            return 0.0
        return max(w + brute(j) for j, w in adj[i])

    for i in range(n):
        assert abs(tree.heights[ids[i]] - brute(i)) < 1e-9
