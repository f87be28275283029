"""Declarative chart grammar: groups, scales, layout dependencies.

A DeclarativeSpec splits into an immutable skeleton (recovered structure
plus per-element position bindings) and a small mutable parameter block
(SpecParams).  Repair actions copy and edit only the parameter block, so
stepping is cheap; the skeleton is shared.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any

from .geometry import Rect2D, Viewport
from .svg_model import DocumentModel

SPEC_FORMAT_VERSION = 1


class GroupClass(Enum):
    TITLE = "Title"
    AXIS = "Axis"
    LEGEND = "Legend"
    MARK = "Mark"
    LABEL = "Label"


class GroupKind(Enum):
    TITLE_TEXT = "TitleText"
    AXIS_TICK = "AxisTick"
    AXIS_LABEL = "AxisLabel"
    AXIS_LINE = "AxisLine"
    AXIS_TITLE = "AxisTitle"
    GRID = "Grid"
    LEGEND_SHAPE = "LegendShape"
    LEGEND_TEXT = "LegendText"
    SHAPE = "Shape"
    LABEL_TEXT = "LabelText"


KIND_TO_CLASS = {
    GroupKind.TITLE_TEXT: GroupClass.TITLE,
    GroupKind.AXIS_TICK: GroupClass.AXIS,
    GroupKind.AXIS_LABEL: GroupClass.AXIS,
    GroupKind.AXIS_LINE: GroupClass.AXIS,
    GroupKind.AXIS_TITLE: GroupClass.AXIS,
    GroupKind.GRID: GroupClass.AXIS,
    GroupKind.LEGEND_SHAPE: GroupClass.LEGEND,
    GroupKind.LEGEND_TEXT: GroupClass.LEGEND,
    GroupKind.SHAPE: GroupClass.MARK,
    GroupKind.LABEL_TEXT: GroupClass.LABEL,
}


class AnchorPosition(Enum):
    LEFT = "Left"
    X_CENTER = "XCenter"
    RIGHT = "Right"
    TOP = "Top"
    Y_CENTER = "YCenter"
    BOTTOM = "Bottom"

    @property
    def horizontal(self) -> bool:
        return self in (AnchorPosition.LEFT, AnchorPosition.X_CENTER, AnchorPosition.RIGHT)


def anchor_coordinate(box: Rect2D, pos: AnchorPosition) -> float:
    if pos is AnchorPosition.LEFT:
        return box.x_min
    if pos is AnchorPosition.X_CENTER:
        return box.x_center
    if pos is AnchorPosition.RIGHT:
        return box.x_max
    if pos is AnchorPosition.TOP:
        return box.y_min
    if pos is AnchorPosition.Y_CENTER:
        return box.y_center
    return box.y_max


def mirror_anchor(pos: AnchorPosition) -> AnchorPosition:
    table = {
        AnchorPosition.LEFT: AnchorPosition.RIGHT,
        AnchorPosition.RIGHT: AnchorPosition.LEFT,
        AnchorPosition.TOP: AnchorPosition.BOTTOM,
        AnchorPosition.BOTTOM: AnchorPosition.TOP,
        AnchorPosition.X_CENTER: AnchorPosition.X_CENTER,
        AnchorPosition.Y_CENTER: AnchorPosition.Y_CENTER,
    }
    return table[pos]


@dataclass(frozen=True)
class RgTuple:
    """One-axis reactive-geometry anchoring: pos(p) = anchor_pos(p_a) + offset."""

    p: AnchorPosition
    p_a: AnchorPosition
    offset: float

    def __post_init__(self) -> None:
        if self.p.horizontal != self.p_a.horizontal:
            raise ValueError(f"mixed-axis anchoring: {self.p} vs {self.p_a}")

    def mirrored(self) -> RgTuple:
        return RgTuple(mirror_anchor(self.p), mirror_anchor(self.p_a), -self.offset)


class DependencyKind(Enum):
    GLOBAL_SCALE = "GlobalScale"
    LOCAL_SCALE = "LocalScale"
    REACTIVE_GEOMETRY = "ReactiveGeometry"


@dataclass
class LayoutDependency:
    variant: DependencyKind
    anchor_group: str | None = None
    rg_x: RgTuple | None = None
    rg_y: RgTuple | None = None
    # per-member anchor element ids, parallel to group.members; None means
    # the whole anchor group's bbox anchors every member
    anchor_members: list[str] | None = None
    # local scale: absolute px span on the spread axis plus per-member
    # fractions inside it ("x" spreads horizontally, "y" vertically)
    local_axis: str | None = None
    local_range: tuple[float, float] | None = None
    local_fracs: list[float] | None = None


class ScaleVariant(Enum):
    LINEAR = "Linear"
    DISCRETE = "Discrete"


@dataclass
class Scale:
    """Pixel range of one chart axis, with the data side it encodes.

    range_min < range_max always; `reversed` records inverted axes
    (larger data value at smaller pixel coordinate).
    """

    variant: ScaleVariant
    range_min: float
    range_max: float
    reversed: bool = False
    domain_min: float | None = None
    domain_max: float | None = None
    categories: list[str] | None = None
    step: float | None = None

    def __post_init__(self) -> None:
        if self.range_min >= self.range_max:
            raise ValueError("scale range must have positive extent")
        if self.variant is ScaleVariant.LINEAR:
            if self.domain_min is None or self.domain_max is None or self.domain_min == self.domain_max:
                raise ValueError("linear scale needs a non-degenerate domain")
        else:
            if not self.categories:
                raise ValueError("discrete scale needs categories")

    @property
    def span(self) -> float:
        return self.range_max - self.range_min

    def fraction_of(self, pixel: float) -> float:
        return (pixel - self.range_min) / self.span

    def value_at_fraction(self, frac: float) -> float:
        if self.variant is not ScaleVariant.LINEAR:
            raise ValueError("value_at_fraction needs a linear scale")
        u = 1.0 - frac if self.reversed else frac
        return self.domain_min + u * (self.domain_max - self.domain_min)

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "variant": self.variant.value,
            "range": [self.range_min, self.range_max],
            "reversed": self.reversed,
        }
        if self.variant is ScaleVariant.LINEAR:
            out["domain"] = [self.domain_min, self.domain_max]
        else:
            out["categories"] = list(self.categories or [])
            out["step"] = self.step
        return out


@dataclass
class VisualGroup:
    """Elements sharing one encoding signature, plus recovered semantics."""

    id: str
    members: list[str]
    element_kind: str
    encoding_signature: dict[str, bool]  # key -> True when value shared
    kind: GroupKind | None = None
    layout: LayoutDependency = field(default_factory=lambda: LayoutDependency(DependencyKind.GLOBAL_SCALE))
    font_size: float | None = None
    orientation: str | None = None  # axis groups: "x" or "y"

    @property
    def group_class(self) -> GroupClass | None:
        return KIND_TO_CLASS.get(self.kind) if self.kind is not None else None

    @property
    def is_text(self) -> bool:
        return self.element_kind == "text"


@dataclass(frozen=True)
class ElementBinding:
    """Build-time normalized position of one element.

    Fractions are measured against the original scale ranges; rendering
    re-maps them through the current ranges.  `points` carries per-point
    fractions for paths / polylines; others bind their bbox edges.
    """

    element_id: str
    x_frac: tuple[float, float]
    y_frac: tuple[float, float]
    points: tuple[tuple[float, float], ...] | None = None  # (u_x, u_y) per point


@dataclass
class SpecParams:
    """The mutable slice of the parameter space actions operate on."""

    x_range: tuple[float, float]
    y_range: tuple[float, float]
    x_tick_count: int
    y_tick_count: int
    rg_offsets: dict[str, tuple[float, float]] = field(default_factory=dict)
    rg_cycle_index: dict[str, int] = field(default_factory=dict)
    font_sizes: dict[str, float] = field(default_factory=dict)
    local_ranges: dict[str, tuple[float, float]] = field(default_factory=dict)
    hidden: frozenset[str] = frozenset()
    wrapped: dict[str, tuple[str, ...]] = field(default_factory=dict)
    label_overrides: dict[str, tuple[RgTuple | None, RgTuple | None]] = field(default_factory=dict)

    def copy(self) -> SpecParams:
        return SpecParams(
            x_range=self.x_range,
            y_range=self.y_range,
            x_tick_count=self.x_tick_count,
            y_tick_count=self.y_tick_count,
            rg_offsets=dict(self.rg_offsets),
            rg_cycle_index=dict(self.rg_cycle_index),
            font_sizes=dict(self.font_sizes),
            local_ranges=dict(self.local_ranges),
            hidden=self.hidden,
            wrapped=dict(self.wrapped),
            label_overrides=dict(self.label_overrides),
        )


@dataclass
class AxisInfo:
    """One detected axis assembly (group ids into the spec's group list)."""

    orientation: str  # "x" or "y"
    tick_group: str | None
    label_group: str | None
    line_group: str | None
    grid_group: str | None
    title_group: str | None
    tick_count: int
    # per-category/tick original pixel positions along the axis (fractions)
    tick_fracs: list[float] = field(default_factory=list)


@dataclass
class DeclarativeSpec:
    """Recovered declarative description of one chart.

    Skeleton fields are never mutated after build; `params` is the live
    parameter block.  with_params() derives a sibling spec sharing the
    skeleton.
    """

    model: DocumentModel
    viewport: Viewport
    x_scale: Scale
    y_scale: Scale
    groups: list[VisualGroup]
    axes: list[AxisInfo]
    bindings: dict[str, ElementBinding]
    params: SpecParams
    rg_cycles: dict[str, list[tuple[RgTuple | None, RgTuple | None]]] = field(default_factory=dict)

    def group_by_id(self, gid: str) -> VisualGroup:
        for g in self.groups:
            if g.id == gid:
                return g
        raise KeyError(gid)

    def groups_of_class(self, cls: GroupClass) -> list[VisualGroup]:
        return [g for g in self.groups if g.group_class is cls]

    def groups_of_kind(self, kind: GroupKind) -> list[VisualGroup]:
        return [g for g in self.groups if g.kind is kind]

    def axis(self, orientation: str) -> AxisInfo | None:
        for ax in self.axes:
            if ax.orientation == orientation:
                return ax
        return None

    def with_params(self, params: SpecParams) -> DeclarativeSpec:
        return replace(self, params=params)

    def to_json(self) -> dict[str, Any]:
        """Documented JSON schema for the CLI `inspect` command."""
        groups = []
        for g in self.groups:
            dep = g.layout
            dep_json: dict[str, Any] = {"variant": dep.variant.value}
            if dep.anchor_group:
                dep_json["anchor_group"] = dep.anchor_group
            for axis_name, rg in (("x", dep.rg_x), ("y", dep.rg_y)):
                if rg is not None:
                    dep_json[axis_name] = [rg.p.value, rg.p_a.value, rg.offset]
            if dep.local_range is not None:
                dep_json["local_axis"] = dep.local_axis
                dep_json["local_range"] = list(dep.local_range)
            groups.append(
                {
                    "id": g.id,
                    "kind": g.kind.value if g.kind else None,
                    "class": g.group_class.value if g.group_class else None,
                    "element_kind": g.element_kind,
                    "members": list(g.members),
                    "font_size": g.font_size,
                    "dependency": dep_json,
                }
            )
        return {
            "format_version": SPEC_FORMAT_VERSION,
            "viewport": {"width": self.viewport.width, "height": self.viewport.height},
            "x_scale": self.x_scale.to_json(),
            "y_scale": self.y_scale.to_json(),
            "x_tick_count": self.params.x_tick_count,
            "y_tick_count": self.params.y_tick_count,
            "groups": groups,
        }
