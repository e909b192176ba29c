import math
import random

import pytest

from spiralpath.geom import (
    Vec, Segment, ArcElement, Polygon, ccw_rotate, ccw_angle,
    sampled_hausdorff, curves_intersect, element_crossings,
    polyline_elements, dist_point_segment,
)


# -- ccw_rotate ---------------------------------------------------------------

def test_ccw_rotate_axis():
    assert ccw_rotate(Vec(1, 0)) == Vec(0, 1)


def test_ccw_rotate_origin_fixed():
    assert ccw_rotate(Vec(0, 0)) == Vec(0, 0)


def test_ccw_rotate_formula():
    assert ccw_rotate(Vec(3, -2)) == Vec(2, 3)


def test_four_rotations_identity():
    rng = random.Random(7)
    for _ in range(50):
        p = Vec(rng.uniform(-10, 10), rng.uniform(-10, 10))
        q = ccw_rotate(ccw_rotate(ccw_rotate(ccw_rotate(p))))
        assert q.dist(p) < 1e-12


def test_ccw_angle_straight_and_tip():
    assert abs(ccw_angle(Vec(0, 1), Vec(-1, 0)) - math.pi / 2) < 1e-12
    # zero turn reports as a full revolution (degenerate tip convention)
    assert abs(ccw_angle(Vec(1, 0), Vec(1, 0)) - 2 * math.pi) < 1e-12


# -- sampled_hausdorff --------------------------------------------------------

def _square_ring(lo, hi):
    return polyline_elements(
        [Vec(lo, lo), Vec(hi, lo), Vec(hi, hi), Vec(lo, hi)], closed=True)


def _brute_hausdorff(a, b, step):
    """Independent oracle: dense sample-to-sample Hausdorff."""
    pa = [p for el in a for p in el.sample(step)]
    pb = [p for el in b for p in el.sample(step)]

    def directed(ps, qs):
        return max(min(p.dist(q) for q in qs) for p in ps)

    return max(directed(pa, pb), directed(pb, pa))


def test_hausdorff_parallel_segments():
    a = [Segment(Vec(0, 0), Vec(1, 0))]
    b = [Segment(Vec(0, 0.3), Vec(1, 0.3))]
    assert abs(sampled_hausdorff(a, b, 0.05) - 0.3) < 1e-12


def test_hausdorff_identity():
    a = _square_ring(0, 1)
    assert sampled_hausdorff(a, a, 0.05) == 0.0


def test_hausdorff_inset_square_vs_dense_oracle():
    outer = _square_ring(0.0, 1.0)
    inner = _square_ring(0.1, 0.9)
    got = sampled_hausdorff(outer, inner, 0.01)
    # the farthest points are the outer corners, 0.1*sqrt(2) from the inset
    oracle = _brute_hausdorff(outer, inner, 0.001)
    assert abs(oracle - 0.1 * math.sqrt(2)) <= 0.002
    assert abs(got - 0.1 * math.sqrt(2)) <= 0.01
    assert abs(got - oracle) <= 0.011


def test_hausdorff_symmetric():
    a = _square_ring(0, 1)
    b = _square_ring(0.2, 0.7)
    assert sampled_hausdorff(a, b, 0.03) == sampled_hausdorff(b, a, 0.03)


def test_hausdorff_step_refinement_monotone():
    a = _square_ring(0, 1)
    b = polyline_elements([Vec(0.3, 0.2), Vec(0.8, 0.4), Vec(0.5, 0.9)], closed=True)
    coarse = sampled_hausdorff(a, b, 0.08)
    fine = sampled_hausdorff(a, b, 0.01)
    assert fine >= coarse - 1e-12
    assert fine - coarse <= 0.08


def test_hausdorff_rejects_bad_input():
    a = _square_ring(0, 1)
    with pytest.raises(ValueError):
        sampled_hausdorff(a, [], 0.1)
    with pytest.raises(ValueError):
        sampled_hausdorff(a, a, 0.0)


# -- curves_intersect ---------------------------------------------------------

def _brute_crossings(elements, closed=False):
    n = len(elements)
    out = []
    for i in range(n):
        for j in range(i + 2, n):
            if closed and i == 0 and j == n - 1:
                continue
            out.extend((i, j, p) for p in element_crossings(elements[i], elements[j]))
    return out


def test_figure_eight_has_one_crossing():
    chain = polyline_elements(
        [Vec(0, 0), Vec(2, 2), Vec(2, 0), Vec(0, 2), Vec(0, 0)])
    assert len(curves_intersect(chain)) == 1


def test_convex_polygon_has_no_crossings():
    ring = polyline_elements(
        [Vec(math.cos(a), math.sin(a)) for a in
         [2 * math.pi * k / 8 for k in range(8)]], closed=True)
    assert curves_intersect(ring, closed=True) == []


def test_archimedean_spiral_no_crossings():
    pts = []
    for k in range(201):
        t = 6 * math.pi * k / 200
        r = 0.05 + t / (2 * math.pi)
        pts.append(Vec(r * math.cos(t), r * math.sin(t)))
    chain = polyline_elements(pts)
    fast = curves_intersect(chain)
    brute = _brute_crossings(chain)
    assert fast == [] and brute == []


def test_grid_matches_brute_force_on_random_chains():
    rng = random.Random(11)
    for _ in range(10):
        pts = [Vec(rng.uniform(0, 4), rng.uniform(0, 4)) for _ in range(30)]
        chain = polyline_elements(pts)
        fast = {(i, j) for i, j, _ in curves_intersect(chain)}
        brute = {(i, j) for i, j, _ in _brute_crossings(chain)}
        assert fast == brute


def test_arc_segment_crossing_detected():
    arc = ArcElement(Vec(0, 0), 1.0, 0.0, math.pi, "ccw")
    chain = [
        Segment(Vec(-3, 0.5), Vec(-1.2, 0.5)),
        Segment(Vec(-1.2, 0.5), Vec(0, 0.5)),
        Segment(Vec(0, 0.5), Vec(0, 2)),
        Segment(Vec(0, 2), Vec(2, 2)),
        arc,
    ]
    hits = curves_intersect(chain)
    assert any(isinstance(chain[j], ArcElement) or isinstance(chain[i], ArcElement)
               for i, j, _ in hits)


# -- polygons -----------------------------------------------------------------

def test_polygon_orientation_and_area():
    sq = Polygon([Vec(0, 0), Vec(1, 0), Vec(1, 1), Vec(0, 1)])
    assert sq.is_ccw() and abs(sq.signed_area() - 1.0) < 1e-12
    assert not sq.reversed().is_ccw()


def test_polygon_containment():
    sq = Polygon([Vec(0, 0), Vec(2, 0), Vec(2, 2), Vec(0, 2)])
    assert sq.contains(Vec(1, 1))
    assert not sq.contains(Vec(3, 1))
    assert not sq.strictly_contains(Vec(0, 1), tol=1e-9)


def test_polygon_simplicity():
    good = Polygon([Vec(0, 0), Vec(1, 0), Vec(1, 1), Vec(0, 1)])
    bad = Polygon([Vec(0, 0), Vec(1, 1), Vec(1, 0), Vec(0, 1)])
    assert good.is_simple()
    assert not bad.is_simple()


def test_degenerate_polygon_allowed():
    seg = Polygon([Vec(0, 0), Vec(1, 0)], degenerate=True)
    assert abs(seg.signed_area()) < 1e-15
    assert not seg.strictly_contains(Vec(0.5, 0.5))


def test_dist_point_segment():
    assert dist_point_segment(Vec(0, 1), Vec(-1, 0), Vec(1, 0)) == 1.0
    assert dist_point_segment(Vec(3, 4), Vec(0, 0), Vec(1, 0)) == math.hypot(2, 4)
