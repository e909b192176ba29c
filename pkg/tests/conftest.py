import math
import random

import pytest

from spiralpath.geom import Vec, Polygon


def regular_ngon(n: int, radius: float = 1.0, phase: float = 0.0) -> Polygon:
    return Polygon([Vec(radius * math.cos(phase + 2 * math.pi * k / n),
                        radius * math.sin(phase + 2 * math.pi * k / n))
                    for k in range(n)])


def l_shape() -> Polygon:
    return Polygon([Vec(0, 0), Vec(4, 0), Vec(4, 1), Vec(1, 1), Vec(1, 3), Vec(0, 3)])


def five_point_star(outer: float = 1.0, inner: float = 0.42) -> Polygon:
    pts = []
    for k in range(5):
        a0 = math.pi / 2 + 2 * math.pi * k / 5
        a1 = a0 + math.pi / 5
        pts.append(Vec(outer * math.cos(a0), outer * math.sin(a0)))
        pts.append(Vec(inner * math.cos(a1), inner * math.sin(a1)))
    return Polygon(pts)


def long_rectangle() -> Polygon:
    return Polygon([Vec(0, 0), Vec(10, 0), Vec(10, 1), Vec(0, 1)])


def square_with_island(offset: float = 0.0):
    outer = Polygon([Vec(0, 0), Vec(4, 0), Vec(4, 4), Vec(0, 4)])
    c = 2.0 + offset
    s = 0.6
    island = Polygon([Vec(c - s, 2 - s), Vec(c - s, 2 + s),
                      Vec(c + s, 2 + s), Vec(c + s, 2 - s)])  # clockwise
    return outer, island


def island_plate(n_islands: int = 13):
    outer = Polygon([Vec(0, 0), Vec(12, 0), Vec(12, 6), Vec(0, 6)])
    centers = ([(2 + 2.4 * i, 1.6) for i in range(5)]
               + [(3.2 + 2.4 * i, 4.4) for i in range(4)]
               + [(1.2, 3.0), (11.0, 3.0), (5.8, 3.0), (8.3, 3.0)])
    islands = []
    s = 0.35
    for cx, cy in centers[:n_islands]:
        islands.append(Polygon([Vec(cx - s, cy - s), Vec(cx - s, cy + s),
                                Vec(cx + s, cy + s), Vec(cx + s, cy - s)]))
    return outer, islands


@pytest.fixture
def rng():
    return random.Random(20260810)
