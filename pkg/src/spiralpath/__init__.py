"""Spiral pocket-machining toolpaths built on the medial structure of the
pocket: G1-continuous spirals for simply connected pockets, pockets with an
island, elongated pockets (zero-area skeleton island) and multi-island plates.
"""

from .geom import Vec, Segment, ArcElement, Polygon, ccw_rotate, sampled_hausdorff, curves_intersect
from .config import PipelineConfig, Constants
from .medial import build_diagram, DiagramError

__all__ = [
    "Vec", "Segment", "ArcElement", "Polygon",
    "ccw_rotate", "sampled_hausdorff", "curves_intersect",
    "PipelineConfig", "Constants",
    "build_diagram", "DiagramError",
]
