"""Pipeline configuration: the stepover, mode selection and the tuning
constants of the construction, each defaulted to its published value."""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass
class Constants:
    """Tuning constants. Exposed for experimentation; defaults are canonical."""

    # wavefronts use a slightly tightened stepover to leave rounding slack
    stepover_shrink: float = 0.95
    # enrichment only adds a perpendicular when it meets the diagram steeper
    # than this angle (degrees)
    enrich_min_angle_deg: float = 50.0
    # arc binary search stops at this fraction of the stepover
    arc_search_resolution: float = 0.01
    # in-place re-enlargement budget per arc
    arc_regrow_cap: int = 8
    # cycle smoothing (island case)
    influence_weight_factor: float = 32.0
    balanced_ratio_band: float = 1.02
    domination_distance_factor: float = 0.1   # times stepover
    domination_weight_ratio: float = 5.0
    # skeleton criteria, as multiples of D = max over nodes of the shortest
    # node-to-leaf distance
    skeleton_branch_factor: float = 1.5
    skeleton_span_factor: float = 2.0
    skeleton_height_factor: float = 1.0
    skeleton_circumference_ratio: float = 0.05
    # diagram polylinization: max chord error of curved bisectors, times stepover
    parabola_chord_tol: float = 1.0 / 50.0
    # verification sampling step, times stepover
    hausdorff_step_factor: float = 1.0 / 20.0


@dataclass
class PipelineConfig:
    stepover: float
    mode: str = "auto"          # auto | basic | skeleton | island | multi
    tool_radius: float | None = None
    smoothing: bool = True      # island cycle time/speed smoothing
    constants: Constants = field(default_factory=Constants)
    svg_layers: tuple[str, ...] = ("boundary", "rounded")

    def __post_init__(self):
        if self.stepover <= 0.0:
            raise ValueError("stepover must be positive")
        if self.tool_radius is not None and self.stepover >= self.tool_radius:
            raise ValueError("stepover must be smaller than the tool radius")
        if self.mode not in ("auto", "basic", "skeleton", "island", "multi"):
            raise ValueError(f"unknown mode {self.mode!r}")

    @property
    def delta(self) -> float:
        return self.stepover

    @property
    def delta_prime(self) -> float:
        return self.constants.stepover_shrink * self.stepover

    @property
    def enrich_min_angle(self) -> float:
        return math.radians(self.constants.enrich_min_angle_deg)
