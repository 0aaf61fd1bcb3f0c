"""Axis-aligned box types, overlap metrics, and the logit-space delta codec.

Two box parameterizations are used throughout the package:

* ``Box`` is the absolute corner form (x1, y1, x2, y2) in pixels. IoU/GIoU
  and COCO-style file I/O operate on this form directly.
* ``NormBox`` is the normalized center form (cx, cy, w, h), each field in
  [0, 1]. It is the quantity the refinement network updates additively in
  inverse-sigmoid space.

All geometry here is 64-bit and pure; every type is an immutable value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# Clamp applied before inverse-sigmoid so box updates never see 0 or 1.
CLAMP_EPS = 1e-5

# COCO area-bin boundaries (pixels squared).
SMALL_AREA_MAX = 32.0**2
MEDIUM_AREA_MAX = 96.0**2


def _require_finite(name: str, *values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise ValueError(f"{name} has non-finite coordinate {v!r}")


@dataclass(frozen=True)
class Box:
    """Absolute corner-form rectangle with (x1, y1) top-left, (x2, y2) bottom-right.

    Zero-area boxes are legal values (they arise from clamping); negative
    extent is rejected at construction.
    """

    x1: float
    y1: float
    x2: float
    y2: float

    def __post_init__(self):
        _require_finite("Box", self.x1, self.y1, self.x2, self.y2)
        if self.x2 < self.x1 or self.y2 < self.y1:
            raise ValueError(f"Box has negative extent: {self}")

    @property
    def width(self) -> float:
        return self.x2 - self.x1

    @property
    def height(self) -> float:
        return self.y2 - self.y1

    @property
    def area(self) -> float:
        return self.width * self.height


@dataclass(frozen=True)
class NormBox:
    """Center-form rectangle normalized to image size; every field in [0, 1]."""

    cx: float
    cy: float
    w: float
    h: float

    def __post_init__(self):
        _require_finite("NormBox", self.cx, self.cy, self.w, self.h)
        for f in (self.cx, self.cy, self.w, self.h):
            if not 0.0 <= f <= 1.0:
                raise ValueError(f"NormBox field out of [0, 1]: {self}")


@dataclass(frozen=True)
class BoxDelta:
    """Additive update to a NormBox in inverse-sigmoid (logit) space."""

    dcx: float
    dcy: float
    dw: float
    dh: float

    def __post_init__(self):
        _require_finite("BoxDelta", self.dcx, self.dcy, self.dw, self.dh)


def iou(a: Box, b: Box) -> float:
    """Intersection over union of two corner-form boxes, in [0, 1].

    Degenerate (zero-area) boxes have IoU 0 against everything, including
    an identical degenerate box.
    """
    iw = min(a.x2, b.x2) - max(a.x1, b.x1)
    ih = min(a.y2, b.y2) - max(a.y1, b.y1)
    if iw <= 0.0 or ih <= 0.0:
        return 0.0
    inter = iw * ih
    union = a.area + b.area - inter
    if union <= 0.0:
        return 0.0
    return inter / union


def giou(a: Box, b: Box) -> float:
    """Generalized IoU: iou minus the enclosing-hull slack fraction.

    Ranges over (-1, 1] for boxes of positive area and never exceeds
    ``iou(a, b)``. When the smallest enclosing box equals the union the two
    metrics coincide. A pair of distinct degenerate boxes evaluates to -1
    (the mathematical limit); identical degenerate boxes give 0.
    """
    hw = max(a.x2, b.x2) - min(a.x1, b.x1)
    hh = max(a.y2, b.y2) - min(a.y1, b.y1)
    hull = hw * hh
    if hull <= 0.0:
        return 0.0
    iw = min(a.x2, b.x2) - max(a.x1, b.x1)
    ih = min(a.y2, b.y2) - max(a.y1, b.y1)
    inter = iw * ih if (iw > 0.0 and ih > 0.0) else 0.0
    union = a.area + b.area - inter
    base = inter / union if union > 0.0 else 0.0
    return base - (hull - union) / hull


def sigmoid(x: float) -> float:
    if x >= 0.0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def inverse_sigmoid(x: float) -> float:
    """Logit of x; the caller is responsible for clamping x away from 0 and 1."""
    return math.log(x / (1.0 - x))


def _clamp(x: float, lo: float, hi: float) -> float:
    return lo if x < lo else hi if x > hi else x


def refine_step(b: NormBox, d: BoxDelta, eps: float = CLAMP_EPS) -> NormBox:
    """Apply a logit-space delta: sigmoid(logit(clamp(field, eps, 1-eps)) + delta).

    A delta component that is exactly zero returns the clamped field
    unchanged, so a zero-initialized delta head is an exact identity on
    clamped boxes rather than identity-up-to-roundtrip-rounding.
    """
    if not 0.0 < eps < 0.5:
        raise ValueError(f"eps must lie in (0, 0.5), got {eps}")

    def step(field: float, delta: float) -> float:
        c = _clamp(field, eps, 1.0 - eps)
        if delta == 0.0:
            return c
        return sigmoid(inverse_sigmoid(c) + delta)

    return NormBox(
        step(b.cx, d.dcx),
        step(b.cy, d.dcy),
        step(b.w, d.dw),
        step(b.h, d.dh),
    )


def norm_to_box(b: NormBox, img_w: float, img_h: float) -> Box:
    """Denormalize a center-form box to absolute corner form."""
    if img_w <= 0 or img_h <= 0:
        raise ValueError(f"image size must be positive, got {img_w}x{img_h}")
    hw = 0.5 * b.w * img_w
    hh = 0.5 * b.h * img_h
    cx = b.cx * img_w
    cy = b.cy * img_h
    return Box(cx - hw, cy - hh, cx + hw, cy + hh)


def box_to_norm(b: Box, img_w: float, img_h: float) -> NormBox:
    """Normalize a corner-form box to center form.

    Boxes extending beyond the image are clamped into [0, 1] fieldwise; this
    is documented behavior, not an error. The round trip with norm_to_box is
    the identity (within 1e-9) for boxes strictly inside the image.
    """
    if img_w <= 0 or img_h <= 0:
        raise ValueError(f"image size must be positive, got {img_w}x{img_h}")
    return NormBox(
        _clamp(0.5 * (b.x1 + b.x2) / img_w, 0.0, 1.0),
        _clamp(0.5 * (b.y1 + b.y2) / img_h, 0.0, 1.0),
        _clamp(b.width / img_w, 0.0, 1.0),
        _clamp(b.height / img_h, 0.0, 1.0),
    )


def area_bin(b: Box) -> str:
    """COCO area bin of a box: 'small' (< 32^2), 'medium' (< 96^2), or 'large'."""
    a = b.area
    if a < SMALL_AREA_MAX:
        return "small"
    if a < MEDIUM_AREA_MAX:
        return "medium"
    return "large"
