"""2D primitives shared by the whole pipeline: points, segments, arcs, polygons,
distance queries, sampled Hausdorff distance and chain self-intersection tests."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

TWO_PI = 2.0 * math.pi


class Vec:
    """Immutable 2D point / vector."""

    __slots__ = ("x", "y")

    def __init__(self, x: float, y: float):
        object.__setattr__(self, "x", float(x))
        object.__setattr__(self, "y", float(y))

    def __setattr__(self, name, value):
        raise AttributeError("Vec is immutable")

    def __iter__(self):
        yield self.x
        yield self.y

    def __repr__(self):
        return f"Vec({self.x!r}, {self.y!r})"

    def __eq__(self, other):
        return isinstance(other, Vec) and self.x == other.x and self.y == other.y

    def __hash__(self):
        return hash((self.x, self.y))

    def __add__(self, o: "Vec") -> "Vec":
        return Vec(self.x + o.x, self.y + o.y)

    def __sub__(self, o: "Vec") -> "Vec":
        return Vec(self.x - o.x, self.y - o.y)

    def __mul__(self, s: float) -> "Vec":
        return Vec(self.x * s, self.y * s)

    __rmul__ = __mul__

    def __neg__(self) -> "Vec":
        return Vec(-self.x, -self.y)

    def dot(self, o: "Vec") -> float:
        return self.x * o.x + self.y * o.y

    def cross(self, o: "Vec") -> float:
        return self.x * o.y - self.y * o.x

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def norm2(self) -> float:
        return self.x * self.x + self.y * self.y

    def dist(self, o: "Vec") -> float:
        return math.hypot(self.x - o.x, self.y - o.y)

    def unit(self) -> "Vec":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize zero vector")
        return Vec(self.x / n, self.y / n)

    def perp(self) -> "Vec":
        """Counterclockwise rotation by 90 degrees: (x, y) -> (-y, x)."""
        return Vec(-self.y, self.x)

    def angle(self) -> float:
        return math.atan2(self.y, self.x)


def ccw_rotate(p: Vec) -> Vec:
    """Rotate a point 90 degrees counterclockwise about the origin."""
    return p.perp()


def lerp(a: Vec, b: Vec, t: float) -> Vec:
    return Vec(a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t)


def normalize_angle(a: float) -> float:
    """Map an angle to (-pi, pi]."""
    a = math.fmod(a, TWO_PI)
    if a <= -math.pi:
        a += TWO_PI
    elif a > math.pi:
        a -= TWO_PI
    return a


def ccw_angle(frm: Vec, to: Vec) -> float:
    """Counterclockwise angle from direction `frm` to `to`, in (0, 2*pi].

    An exact zero turn is reported as a full 2*pi turn, which is the convention
    needed for degenerate polygon tips (interior angle of a doubled edge).
    """
    a = math.atan2(frm.cross(to), frm.dot(to))
    if a <= 0.0:
        a += TWO_PI
    return a


@dataclass(frozen=True)
class Segment:
    a: Vec
    b: Vec

    def direction(self) -> Vec:
        return (self.b - self.a).unit()

    def length(self) -> float:
        return self.a.dist(self.b)

    def point_at(self, t: float) -> Vec:
        return lerp(self.a, self.b, t)

    def start(self) -> Vec:
        return self.a

    def end(self) -> Vec:
        return self.b

    def tangent_at_start(self) -> Vec:
        return self.direction()

    def tangent_at_end(self) -> Vec:
        return self.direction()

    def sample(self, step: float) -> list[Vec]:
        n = max(1, math.ceil(self.length() / step))
        return [self.point_at(i / n) for i in range(n + 1)]


@dataclass(frozen=True)
class ArcElement:
    """Circular arc from start_angle to end_angle in the given direction."""

    center: Vec
    radius: float
    start_angle: float
    end_angle: float
    direction: str  # "ccw" | "cw"

    def subtended(self) -> float:
        """Swept angle in [0, 2*pi), measured along the arc direction."""
        if self.direction == "ccw":
            s = (self.end_angle - self.start_angle) % TWO_PI
        else:
            s = (self.start_angle - self.end_angle) % TWO_PI
        return s

    def angle_at(self, t: float) -> float:
        s = self.subtended()
        if self.direction == "ccw":
            return self.start_angle + s * t
        return self.start_angle - s * t

    def point_at(self, t: float) -> Vec:
        a = self.angle_at(t)
        return Vec(self.center.x + self.radius * math.cos(a),
                   self.center.y + self.radius * math.sin(a))

    def start(self) -> Vec:
        return self.point_at(0.0)

    def end(self) -> Vec:
        return self.point_at(1.0)

    def tangent_at(self, t: float) -> Vec:
        a = self.angle_at(t)
        t_ccw = Vec(-math.sin(a), math.cos(a))
        return t_ccw if self.direction == "ccw" else -t_ccw

    def tangent_at_start(self) -> Vec:
        return self.tangent_at(0.0)

    def tangent_at_end(self) -> Vec:
        return self.tangent_at(1.0)

    def length(self) -> float:
        return self.subtended() * self.radius

    def sample(self, step: float) -> list[Vec]:
        n = max(1, math.ceil(self.length() / max(step, 1e-300)))
        return [self.point_at(i / n) for i in range(n + 1)]

    def contains_angle(self, a: float, tol: float = 1e-12) -> bool:
        s = self.subtended()
        if self.direction == "ccw":
            rel = (a - self.start_angle) % TWO_PI
        else:
            rel = (self.start_angle - a) % TWO_PI
        return rel <= s + tol or rel - TWO_PI >= -tol


Element = Segment | ArcElement


def dist_point_segment(p: Vec, a: Vec, b: Vec) -> float:
    ab = b - a
    L2 = ab.norm2()
    if L2 == 0.0:
        return p.dist(a)
    t = (p - a).dot(ab) / L2
    if t <= 0.0:
        return p.dist(a)
    if t >= 1.0:
        return p.dist(b)
    return abs(ab.cross(p - a)) / math.sqrt(L2)


def dist_point_arc(p: Vec, arc: ArcElement) -> float:
    d = p - arc.center
    r = d.norm()
    if r > 1e-300 and arc.contains_angle(d.angle()):
        return abs(r - arc.radius)
    return min(p.dist(arc.start()), p.dist(arc.end()))


def dist_point_element(p: Vec, el: Element) -> float:
    if isinstance(el, Segment):
        return dist_point_segment(p, el.a, el.b)
    return dist_point_arc(p, el)


def dist_point_chain(p: Vec, chain: list[Element]) -> float:
    return min(dist_point_element(p, el) for el in chain)


@dataclass
class Polygon:
    """Simple polygon given by its vertex ring. `degenerate` marks zero-area
    rings (doubled back-to-back edges) used as artificial islands."""

    vertices: list[Vec]
    degenerate: bool = False

    def __post_init__(self):
        if len(self.vertices) < 2 or (not self.degenerate and len(self.vertices) < 3):
            raise ValueError("polygon needs at least 3 vertices")

    def __len__(self):
        return len(self.vertices)

    def signed_area(self) -> float:
        s = 0.0
        vs = self.vertices
        for i in range(len(vs)):
            a, b = vs[i], vs[(i + 1) % len(vs)]
            s += a.cross(b)
        return 0.5 * s

    def is_ccw(self) -> bool:
        return self.signed_area() > 0.0

    def reversed(self) -> "Polygon":
        return Polygon(list(reversed(self.vertices)), degenerate=self.degenerate)

    def edges(self) -> list[Segment]:
        vs = self.vertices
        return [Segment(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs))]

    def perimeter(self) -> float:
        vs = self.vertices
        return sum(vs[i].dist(vs[(i + 1) % len(vs)]) for i in range(len(vs)))

    def bbox(self) -> tuple[float, float, float, float]:
        xs = [v.x for v in self.vertices]
        ys = [v.y for v in self.vertices]
        return min(xs), min(ys), max(xs), max(ys)

    def contains(self, p: Vec, tol: float = 0.0) -> bool:
        """Point-in-polygon by crossing number; points within `tol` of the
        boundary count as inside."""
        if tol > 0.0 and self.boundary_distance(p) <= tol:
            return True
        return self.winding(p) != 0

    def strictly_contains(self, p: Vec, tol: float = 0.0) -> bool:
        if tol > 0.0 and self.boundary_distance(p) <= tol:
            return False
        return self.winding(p) != 0

    def winding(self, p: Vec) -> int:
        w = 0
        vs = self.vertices
        for i in range(len(vs)):
            a, b = vs[i], vs[(i + 1) % len(vs)]
            if a.y <= p.y:
                if b.y > p.y and (b - a).cross(p - a) > 0.0:
                    w += 1
            elif b.y <= p.y and (b - a).cross(p - a) < 0.0:
                w -= 1
        return w

    def boundary_distance(self, p: Vec) -> float:
        vs = self.vertices
        return min(dist_point_segment(p, vs[i], vs[(i + 1) % len(vs)])
                   for i in range(len(vs)))

    def is_simple(self, tol: float = 0.0) -> bool:
        """No two non-adjacent edges intersect and no edge is degenerate."""
        segs = self.edges()
        n = len(segs)
        for s in segs:
            if s.length() <= tol:
                return False
        for i in range(n):
            for j in range(i + 1, n):
                adjacent = (j == i + 1) or (i == 0 and j == n - 1)
                if adjacent:
                    continue
                if _segments_touch(segs[i], segs[j], tol):
                    return False
        return True


def _segments_touch(s1: Segment, s2: Segment, tol: float) -> bool:
    if segment_segment_crossing(s1.a, s1.b, s2.a, s2.b) is not None:
        return True
    if tol <= 0.0:
        return False
    return (dist_point_segment(s1.a, s2.a, s2.b) <= tol
            or dist_point_segment(s1.b, s2.a, s2.b) <= tol
            or dist_point_segment(s2.a, s1.a, s1.b) <= tol
            or dist_point_segment(s2.b, s1.a, s1.b) <= tol)


def segment_segment_crossing(a: Vec, b: Vec, c: Vec, d: Vec) -> Vec | None:
    """Proper crossing point of the closed segments ab and cd, or None.

    Collinear overlaps and endpoint-only touches return None; a T-touch where
    an endpoint lies strictly inside the other segment counts as a crossing.
    """
    r = b - a
    s = d - c
    denom = r.cross(s)
    qp = c - a
    if denom == 0.0:
        return None
    t = qp.cross(s) / denom
    u = qp.cross(r) / denom
    eps = 1e-12
    if -eps < t < 1.0 + eps and -eps < u < 1.0 + eps:
        # reject touches that happen exactly at shared endpoints
        p = lerp(a, b, t)
        ends = (t < eps or t > 1.0 - eps) and (u < eps or u > 1.0 - eps)
        if ends:
            return None
        return p
    return None


def _line_circle_params(a: Vec, b: Vec, center: Vec, radius: float) -> list[float]:
    d = b - a
    f = a - center
    A = d.norm2()
    B = 2.0 * f.dot(d)
    C = f.norm2() - radius * radius
    if A == 0.0:
        return []
    disc = B * B - 4.0 * A * C
    if disc < 0.0:
        return []
    sq = math.sqrt(disc)
    return [(-B - sq) / (2.0 * A), (-B + sq) / (2.0 * A)]


def segment_arc_crossings(seg: Segment, arc: ArcElement) -> list[Vec]:
    out = []
    eps = 1e-9
    for t in _line_circle_params(seg.a, seg.b, arc.center, arc.radius):
        if t < eps or t > 1.0 - eps:
            continue
        p = seg.point_at(t)
        ang = (p - arc.center).angle()
        if arc.contains_angle(ang, tol=-eps):
            if p.dist(arc.start()) > eps * (1 + arc.radius) and \
               p.dist(arc.end()) > eps * (1 + arc.radius):
                out.append(p)
    return out


def arc_arc_crossings(a1: ArcElement, a2: ArcElement) -> list[Vec]:
    d = a2.center - a1.center
    dist = d.norm()
    r1, r2 = a1.radius, a2.radius
    if dist == 0.0 or dist > r1 + r2 or dist < abs(r1 - r2):
        return []
    x = (dist * dist - r2 * r2 + r1 * r1) / (2.0 * dist)
    h2 = r1 * r1 - x * x
    if h2 < 0.0:
        return []
    h = math.sqrt(h2)
    u = d * (1.0 / dist)
    base = a1.center + u * x
    candidates = [base + u.perp() * h, base - u.perp() * h] if h > 0 else [base]
    out = []
    eps = 1e-9
    for p in candidates:
        ang1 = (p - a1.center).angle()
        ang2 = (p - a2.center).angle()
        if a1.contains_angle(ang1, tol=-eps) and a2.contains_angle(ang2, tol=-eps):
            near_end = any(p.dist(q) <= eps * (1 + r1 + r2) for q in
                           (a1.start(), a1.end(), a2.start(), a2.end()))
            if not near_end:
                out.append(p)
    return out


def element_crossings(e1: Element, e2: Element) -> list[Vec]:
    if isinstance(e1, Segment) and isinstance(e2, Segment):
        p = segment_segment_crossing(e1.a, e1.b, e2.a, e2.b)
        return [p] if p is not None else []
    if isinstance(e1, Segment):
        return segment_arc_crossings(e1, e2)
    if isinstance(e2, Segment):
        return segment_arc_crossings(e2, e1)
    return arc_arc_crossings(e1, e2)


def _element_bbox(el: Element) -> tuple[float, float, float, float]:
    if isinstance(el, Segment):
        return (min(el.a.x, el.b.x), min(el.a.y, el.b.y),
                max(el.a.x, el.b.x), max(el.a.y, el.b.y))
    # conservative box for arcs
    r = el.radius
    return (el.center.x - r, el.center.y - r, el.center.x + r, el.center.y + r)


def curves_intersect(elements: list[Element], closed: bool = False) -> list[tuple[int, int, Vec]]:
    """All transversal crossings between non-adjacent elements of a chain.

    Uses a uniform grid over element bounding boxes so long spirals stay
    affordable; agrees with the O(n^2) pairwise test.
    """
    n = len(elements)
    if n < 3:
        return []
    boxes = [_element_bbox(el) for el in elements]
    x0 = min(b[0] for b in boxes)
    y0 = min(b[1] for b in boxes)
    x1 = max(b[2] for b in boxes)
    y1 = max(b[3] for b in boxes)
    span = max(x1 - x0, y1 - y0, 1e-300)
    mean_size = sum(max(b[2] - b[0], b[3] - b[1]) for b in boxes) / n
    cell = max(mean_size, span / 256, 1e-300)
    grid: dict[tuple[int, int], list[int]] = {}
    for i, b in enumerate(boxes):
        for gx in range(int((b[0] - x0) / cell), int((b[2] - x0) / cell) + 1):
            for gy in range(int((b[1] - y0) / cell), int((b[3] - y0) / cell) + 1):
                grid.setdefault((gx, gy), []).append(i)
    seen: set[tuple[int, int]] = set()
    out: list[tuple[int, int, Vec]] = []
    for bucket in grid.values():
        for ii in range(len(bucket)):
            for jj in range(ii + 1, len(bucket)):
                i, j = bucket[ii], bucket[jj]
                if i > j:
                    i, j = j, i
                if (i, j) in seen:
                    continue
                seen.add((i, j))
                if j == i + 1:
                    continue
                if closed and i == 0 and j == n - 1:
                    continue
                bi, bj = boxes[i], boxes[j]
                if bi[2] < bj[0] or bj[2] < bi[0] or bi[3] < bj[1] or bj[3] < bi[1]:
                    continue
                for p in element_crossings(elements[i], elements[j]):
                    out.append((i, j, p))
    return out


def sample_chain(chain: list[Element], step: float) -> list[Vec]:
    pts: list[Vec] = []
    for el in chain:
        s = el.sample(step)
        if pts and pts[-1].dist(s[0]) < 1e-15:
            pts.extend(s[1:])
        else:
            pts.extend(s)
    return pts


def directed_hausdorff(a: list[Element], b: list[Element], step: float) -> float:
    """Max over samples of A of the exact distance to the elements of B."""
    if not a or not b:
        raise ValueError("empty curve")
    return max(dist_point_chain(p, b) for p in sample_chain(a, step))


def sampled_hausdorff(a: list[Element], b: list[Element], step: float) -> float:
    """Symmetric sampled Hausdorff distance between two element chains."""
    if step <= 0.0:
        raise ValueError("step must be positive")
    return max(directed_hausdorff(a, b, step), directed_hausdorff(b, a, step))


def polyline_elements(points: list[Vec], closed: bool = False) -> list[Element]:
    els: list[Element] = []
    for i in range(len(points) - 1):
        if points[i].dist(points[i + 1]) > 0.0:
            els.append(Segment(points[i], points[i + 1]))
    if closed and len(points) > 1 and points[-1].dist(points[0]) > 0.0:
        els.append(Segment(points[-1], points[0]))
    return els


def geom_tolerance(points: list[Vec]) -> float:
    """Global coincidence tolerance: 1e-9 times the bounding-box diagonal."""
    xs = [p.x for p in points]
    ys = [p.y for p in points]
    diag = math.hypot(max(xs) - min(xs), max(ys) - min(ys))
    return 1e-9 * max(diag, 1e-300)
