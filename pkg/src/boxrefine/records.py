"""Prediction and ground-truth record types shared by matching, evaluation, and I/O."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

from .geometry import Box

# image_id -> (width, height); needed wherever boxes are normalized.
ImageSizes = Mapping[int, tuple[float, float]]


@dataclass(frozen=True)
class Detection:
    """A scored, class-labeled predicted box.

    ``class_probs`` optionally carries the full per-category probability map
    used by the matcher; when absent, the scalar score stands in for the
    probability of the labeled class and other classes read as 0.
    ``extras`` preserves unknown JSON fields across a results round trip.
    """

    image_id: int
    category_id: int
    score: float
    box: Box
    class_probs: Optional[Mapping[int, float]] = None
    extras: Optional[Mapping[str, object]] = None

    def __post_init__(self):
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"score must lie in [0, 1], got {self.score}")

    def prob_of(self, category_id: int) -> Optional[float]:
        """Probability assigned to a category, or None if genuinely unknown."""
        if self.class_probs is not None:
            p = self.class_probs.get(category_id)
            return float(p) if p is not None else None
        return self.score if category_id == self.category_id else 0.0


@dataclass(frozen=True)
class GtInstance:
    """A ground-truth instance with COCO-style area and crowd flag."""

    image_id: int
    category_id: int
    box: Box
    area: float = field(default=-1.0)
    iscrowd: bool = False

    def __post_init__(self):
        # COCO stores segmentation area, which need not equal the box area;
        # a negative sentinel means "fill in from the box".
        if self.area < 0:
            object.__setattr__(self, "area", self.box.area)
