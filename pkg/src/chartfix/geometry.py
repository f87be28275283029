"""Geometry substrate: rectangles, affine transforms, viewport.

All coordinates are CSS pixels in viewport space (y grows downward).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass


@dataclass(frozen=True)
class Rect2D:
    """Axis-aligned box. Degenerate (zero-extent) boxes are valid."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self) -> None:
        if self.x_min > self.x_max or self.y_min > self.y_max:
            raise ValueError(f"inverted rect: {self}")

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def x_center(self) -> float:
        return (self.x_min + self.x_max) / 2.0

    @property
    def y_center(self) -> float:
        return (self.y_min + self.y_max) / 2.0

    def union(self, other: Rect2D) -> Rect2D:
        return Rect2D(
            min(self.x_min, other.x_min),
            min(self.y_min, other.y_min),
            max(self.x_max, other.x_max),
            max(self.y_max, other.y_max),
        )

    def intersection_area(self, other: Rect2D) -> float:
        w = min(self.x_max, other.x_max) - max(self.x_min, other.x_min)
        h = min(self.y_max, other.y_max) - max(self.y_min, other.y_min)
        if w <= 0 or h <= 0:
            return 0.0
        return w * h

    def intersects(self, other: Rect2D) -> bool:
        return self.intersection_area(other) > 0.0

    def contains(self, other: Rect2D) -> bool:
        return (
            self.x_min <= other.x_min
            and self.y_min <= other.y_min
            and self.x_max >= other.x_max
            and self.y_max >= other.y_max
        )

    def translate(self, dx: float, dy: float) -> Rect2D:
        return Rect2D(self.x_min + dx, self.y_min + dy, self.x_max + dx, self.y_max + dy)

    @staticmethod
    def from_points(points: list[tuple[float, float]]) -> Rect2D:
        xs = [p[0] for p in points]
        ys = [p[1] for p in points]
        return Rect2D(min(xs), min(ys), max(xs), max(ys))

    @staticmethod
    def union_all(rects: list[Rect2D]) -> Rect2D | None:
        if not rects:
            return None
        out = rects[0]
        for r in rects[1:]:
            out = out.union(r)
        return out


@dataclass(frozen=True)
class Viewport:
    """Target device viewport. Bottom edge is unbounded (scrollable)."""

    width: float = 375.0
    height: float = 812.0

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise ValueError("viewport dimensions must be positive")


# SVG transform matrix convention: [a c e; b d f; 0 0 1].
@dataclass(frozen=True)
class Affine:
    a: float = 1.0
    b: float = 0.0
    c: float = 0.0
    d: float = 1.0
    e: float = 0.0
    f: float = 0.0

    @staticmethod
    def identity() -> Affine:
        return Affine()

    @staticmethod
    def translate(tx: float, ty: float = 0.0) -> Affine:
        return Affine(1, 0, 0, 1, tx, ty)

    @staticmethod
    def scale(sx: float, sy: float | None = None) -> Affine:
        if sy is None:
            sy = sx
        return Affine(sx, 0, 0, sy, 0, 0)

    @staticmethod
    def rotate(deg: float, cx: float = 0.0, cy: float = 0.0) -> Affine:
        rad = math.radians(deg)
        ca, sa = math.cos(rad), math.sin(rad)
        rot = Affine(ca, sa, -sa, ca, 0, 0)
        if cx or cy:
            return Affine.translate(cx, cy) @ rot @ Affine.translate(-cx, -cy)
        return rot

    def __matmul__(self, other: Affine) -> Affine:
        # self applied after other (self ∘ other).
        return Affine(
            self.a * other.a + self.c * other.b,
            self.b * other.a + self.d * other.b,
            self.a * other.c + self.c * other.d,
            self.b * other.c + self.d * other.d,
            self.a * other.e + self.c * other.f + self.e,
            self.b * other.e + self.d * other.f + self.f,
        )

    def apply(self, x: float, y: float) -> tuple[float, float]:
        return (self.a * x + self.c * y + self.e, self.b * x + self.d * y + self.f)

    def apply_rect(self, rect: Rect2D) -> Rect2D:
        corners = [
            self.apply(rect.x_min, rect.y_min),
            self.apply(rect.x_max, rect.y_min),
            self.apply(rect.x_min, rect.y_max),
            self.apply(rect.x_max, rect.y_max),
        ]
        return Rect2D.from_points(corners)

    def is_identity(self) -> bool:
        return self == Affine()

    def inverse(self) -> Affine:
        det = self.a * self.d - self.b * self.c
        if abs(det) < 1e-12:
            raise ValueError("singular transform")
        ia = self.d / det
        ib = -self.b / det
        ic = -self.c / det
        id_ = self.a / det
        ie = -(ia * self.e + ic * self.f)
        if_ = -(ib * self.e + id_ * self.f)
        return Affine(ia, ib, ic, id_, ie, if_)


_TRANSFORM_RE = re.compile(r"(matrix|translate|scale|rotate|skewX|skewY)\s*\(([^)]*)\)")
_NUM_RE = re.compile(r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?")


def parse_transform(text: str | None) -> Affine:
    """Parse an SVG transform attribute into a single affine matrix.

    Unknown functions are ignored (conservative: identity contribution).
    """
    out = Affine.identity()
    if not text:
        return out
    for name, args in _TRANSFORM_RE.findall(text):
        nums = [float(n) for n in _NUM_RE.findall(args)]
        if name == "translate" and nums:
            t = Affine.translate(nums[0], nums[1] if len(nums) > 1 else 0.0)
        elif name == "scale" and nums:
            t = Affine.scale(nums[0], nums[1] if len(nums) > 1 else None)
        elif name == "rotate" and nums:
            if len(nums) >= 3:
                t = Affine.rotate(nums[0], nums[1], nums[2])
            else:
                t = Affine.rotate(nums[0])
        elif name == "matrix" and len(nums) >= 6:
            t = Affine(*nums[:6])
        elif name == "skewX" and nums:
            t = Affine(1, 0, math.tan(math.radians(nums[0])), 1, 0, 0)
        elif name == "skewY" and nums:
            t = Affine(1, math.tan(math.radians(nums[0])), 0, 1, 0, 0)
        else:
            continue
        out = out @ t
    return out
