"""SVG document model: parse, measure, serialize.

Parses an SVG byte stream into a flat element table with resolved
transforms and cascaded presentation properties, computes per-element
bounding boxes (text via a fixed-ratio metrics model, since no browser
layout engine is available), and serializes a possibly-modified model
back to SVG.
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field, replace
from enum import Enum

from .errors import MalformedDocument, MissingGeometry
from .geometry import Affine, Rect2D, parse_transform

SVG_NS = "http://www.w3.org/2000/svg"

# Properties participating in the CSS cascade and inheritance.
_PRESENTATION_PROPS = frozenset(
    {
        "fill",
        "stroke",
        "stroke-width",
        "stroke-dasharray",
        "opacity",
        "fill-opacity",
        "stroke-opacity",
        "font-size",
        "font-family",
        "font-weight",
        "font-style",
        "text-anchor",
        "dominant-baseline",
        "display",
        "visibility",
    }
)
_INHERITED_PROPS = frozenset(
    {
        "fill",
        "stroke",
        "stroke-width",
        "font-size",
        "font-family",
        "font-weight",
        "font-style",
        "text-anchor",
        "dominant-baseline",
        "visibility",
    }
)

# Container/metadata tags that never become visual elements.
_SKIP_TAGS = frozenset({"defs", "title", "desc", "metadata", "style", "symbol", "marker", "clipPath", "mask", "pattern"})

DEFAULT_FONT_SIZE = 16.0


class ElementKind(Enum):
    TEXT = "text"
    RECT = "rect"
    CIRCLE = "circle"
    ELLIPSE = "ellipse"
    LINE = "line"
    PATH = "path"
    GROUP = "group"
    OTHER = "other"


_TAG_KINDS = {
    "text": ElementKind.TEXT,
    "rect": ElementKind.RECT,
    "circle": ElementKind.CIRCLE,
    "ellipse": ElementKind.ELLIPSE,
    "line": ElementKind.LINE,
    "path": ElementKind.PATH,
    "g": ElementKind.GROUP,
    "svg": ElementKind.GROUP,
}


@dataclass(frozen=True)
class TextMetricsConfig:
    """Fixed-ratio text measurement (stand-in for glyph metrics).

    Width: chars x font-size x avg_char_width_ratio.  Height: font-size x
    line_height_ratio per line, baseline at baseline_ratio of the line
    height measured from the top.
    """

    avg_char_width_ratio: float = 0.6
    line_height_ratio: float = 1.2
    baseline_ratio: float = 0.8

    def __post_init__(self) -> None:
        if self.avg_char_width_ratio <= 0 or self.line_height_ratio <= 0:
            raise ValueError("metrics ratios must be positive")

    def line_height(self, font_size: float) -> float:
        return font_size * self.line_height_ratio

    def text_width(self, text: str, font_size: float) -> float:
        return len(text) * font_size * self.avg_char_width_ratio


@dataclass
class VisualElement:
    """One SVG element with resolved transform and cascaded properties.

    `attributes` holds the resolved view (geometry as raw strings plus
    cascaded presentation values); `raw_attrib` preserves the attributes
    as written, so untouched elements serialize byte-faithfully.
    """

    id: str
    kind: ElementKind
    tag: str
    attributes: dict[str, str]
    raw_attrib: dict[str, str]
    transform: Affine
    parent: str | None = None
    text_content: str | None = None

    def get_float(self, name: str, default: float | None = None) -> float | None:
        val = self.attributes.get(name)
        if val is None:
            return default
        try:
            return parse_length(val)
        except ValueError:
            return default

    @property
    def font_size(self) -> float:
        raw = self.attributes.get("font-size")
        if raw is None:
            return DEFAULT_FONT_SIZE
        try:
            return parse_length(raw)
        except ValueError:
            return DEFAULT_FONT_SIZE

    @property
    def visible(self) -> bool:
        if self.attributes.get("display") == "none":
            return False
        if self.attributes.get("visibility") == "hidden":
            return False
        return True

    def lines(self) -> list[str]:
        if self.text_content is None:
            return []
        return self.text_content.split("\n")


@dataclass
class DocumentModel:
    """Value-type view of an SVG document.

    Purely data: cloning and cross-thread handoff are safe, and every
    operation over it is a pure function of its inputs.
    """

    width: float
    height: float
    root_attrib: dict[str, str]
    elements: dict[str, VisualElement] = field(default_factory=dict)
    order: list[str] = field(default_factory=list)
    children: dict[str | None, list[str]] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)
    metrics: TextMetricsConfig = field(default_factory=TextMetricsConfig)

    def leaf_elements(self) -> list[VisualElement]:
        return [self.elements[i] for i in self.order if self.elements[i].kind is not ElementKind.GROUP]

    def visible_leaves(self) -> list[VisualElement]:
        return [e for e in self.leaf_elements() if e.visible]

    def clone(self) -> DocumentModel:
        return DocumentModel(
            width=self.width,
            height=self.height,
            root_attrib=dict(self.root_attrib),
            elements={
                k: replace(v, attributes=dict(v.attributes), raw_attrib=dict(v.raw_attrib))
                for k, v in self.elements.items()
            },
            order=list(self.order),
            children={k: list(v) for k, v in self.children.items()},
            warnings=list(self.warnings),
            metrics=self.metrics,
        )


_LENGTH_RE = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([a-z%]*)\s*$")


def parse_length(value: str, em_base: float = DEFAULT_FONT_SIZE) -> float:
    """Parse an SVG length. px and unitless pass through; pt and em convert."""
    m = _LENGTH_RE.match(value)
    if not m:
        raise ValueError(f"not a length: {value!r}")
    num = float(m.group(1))
    unit = m.group(2)
    if unit in ("", "px"):
        return num
    if unit == "pt":
        return num * 4.0 / 3.0
    if unit == "em":
        return num * em_base
    if unit == "%":
        raise ValueError("percentage lengths are context-dependent")
    raise ValueError(f"unsupported unit: {unit}")


def _strip_ns(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _parse_style_attr(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for part in text.split(";"):
        if ":" not in part:
            continue
        key, val = part.split(":", 1)
        out[key.strip()] = val.strip()
    return out


_CSS_RULE_RE = re.compile(r"([^{}]+)\{([^{}]*)\}")


def _parse_stylesheet(css: str, warnings: list[str]) -> list[tuple[str, dict[str, str]]]:
    """Very small CSS subset: tag, .class, #id and tag.class selectors."""
    if "@import" in css:
        warnings.append("UnsupportedFeature: external CSS @import ignored")
    css = re.sub(r"/\*.*?\*/", "", css, flags=re.S)
    rules: list[tuple[str, dict[str, str]]] = []
    for selectors, body in _CSS_RULE_RE.findall(css):
        props = _parse_style_attr(body)
        if not props:
            continue
        for sel in selectors.split(","):
            sel = sel.strip()
            if sel and not sel.startswith("@"):
                rules.append((sel, props))
    return rules


def _selector_matches(sel: str, tag: str, classes: set[str], elem_id: str | None) -> bool:
    if " " in sel or ">" in sel:  # descendant combinators unsupported
        sel = sel.split()[-1]
    if sel.startswith("#"):
        return elem_id == sel[1:]
    if sel.startswith("."):
        return sel[1:] in classes
    if "." in sel:
        tag_part, cls = sel.split(".", 1)
        return tag == tag_part and cls in classes
    return sel == tag or sel == "*"


def parse_svg(data: bytes | str) -> DocumentModel:
    """Parse SVG bytes into a DocumentModel.

    Raises MalformedDocument for non-XML input or a non-svg root.
    Unsupported subtrees (foreignObject, use) are skipped with a warning.
    """
    if isinstance(data, str):
        data = data.encode("utf-8")
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise MalformedDocument(f"not well-formed XML: {exc}") from exc
    if _strip_ns(root.tag) != "svg":
        raise MalformedDocument(f"root element is <{_strip_ns(root.tag)}>, expected <svg>")

    warnings: list[str] = []
    stylesheet: list[tuple[str, dict[str, str]]] = []
    for style_el in root.iter():
        if _strip_ns(style_el.tag) == "style" and style_el.text:
            stylesheet.extend(_parse_stylesheet(style_el.text, warnings))

    width, height = _root_size(root)
    model = DocumentModel(width=width, height=height, root_attrib=dict(root.attrib), warnings=warnings)
    model.children[None] = []

    counter = [0]
    seen_ids: set[str] = set()

    def next_id(node: ET.Element) -> str:
        raw = node.get("id")
        if raw and raw not in seen_ids:
            seen_ids.add(raw)
            return raw
        counter[0] += 1
        while f"e{counter[0]}" in seen_ids:
            counter[0] += 1
        eid = f"e{counter[0]}"
        seen_ids.add(eid)
        return eid

    root_inherited = _cascade(root, {}, stylesheet)

    def walk(node: ET.Element, parent_id: str | None, transform: Affine, inherited: dict[str, str]) -> None:
        for child in node:
            tag = _strip_ns(child.tag)
            if tag in _SKIP_TAGS:
                continue
            if tag in ("foreignObject", "use", "image", "switch"):
                warnings.append(f"UnsupportedFeature: <{tag}> skipped")
                continue
            props = _cascade(child, inherited, stylesheet)
            local = parse_transform(child.get("transform"))
            total = transform @ local
            kind = _TAG_KINDS.get(tag, ElementKind.OTHER)
            eid = next_id(child)
            attributes = dict(child.attrib)
            attributes.update(props)
            elem = VisualElement(
                id=eid,
                kind=kind,
                tag=tag,
                attributes=attributes,
                raw_attrib=dict(child.attrib),
                transform=total,
                parent=parent_id,
                text_content=_gather_text(child) if kind is ElementKind.TEXT else None,
            )
            model.elements[eid] = elem
            model.order.append(eid)
            model.children.setdefault(parent_id, []).append(eid)
            model.children.setdefault(eid, [])
            if kind is ElementKind.GROUP or (kind is ElementKind.OTHER and len(child) > 0):
                walk(child, eid, total, props)

    walk(root, None, parse_transform(root.get("transform")), root_inherited)
    return model


def _root_size(root: ET.Element) -> tuple[float, float]:
    def attr_len(name: str) -> float | None:
        val = root.get(name)
        if val is None:
            return None
        try:
            return parse_length(val)
        except ValueError:
            return None

    width = attr_len("width")
    height = attr_len("height")
    if width is None or height is None:
        viewbox = root.get("viewBox")
        if viewbox:
            parts = viewbox.replace(",", " ").split()
            if len(parts) == 4:
                width = width if width is not None else float(parts[2])
                height = height if height is not None else float(parts[3])
    return (width or 300.0, height or 150.0)


def _cascade(
    node: ET.Element,
    inherited: dict[str, str],
    stylesheet: list[tuple[str, dict[str, str]]],
) -> dict[str, str]:
    """Resolve presentation properties for one node.

    Precedence (low to high): inherited < presentation attribute <
    stylesheet rule < inline style attribute.
    """
    props = {k: v for k, v in inherited.items() if k in _INHERITED_PROPS}
    for key, val in node.attrib.items():
        key = _strip_ns(key)
        if key in _PRESENTATION_PROPS:
            props[key] = val
    tag = _strip_ns(node.tag)
    classes = set((node.get("class") or "").split())
    elem_id = node.get("id")
    for sel, rule_props in stylesheet:
        if _selector_matches(sel, tag, classes, elem_id):
            for key, val in rule_props.items():
                if key in _PRESENTATION_PROPS:
                    props[key] = val
    style = node.get("style")
    if style:
        for key, val in _parse_style_attr(style).items():
            if key in _PRESENTATION_PROPS:
                props[key] = val
    return props


def _gather_text(node: ET.Element) -> str:
    """Collect text content; tspans carrying an x attribute start new lines."""
    parts: list[str] = []
    if node.text and node.text.strip():
        parts.append(node.text.strip())
    for child in node:
        if _strip_ns(child.tag) == "tspan":
            chunk = _gather_text(child)
            if chunk:
                if parts and child.get("x") is not None:
                    parts.append("\n")
                parts.append(chunk)
        if child.tail and child.tail.strip():
            parts.append(child.tail.strip())
    return "".join(parts)


# ---------------------------------------------------------------------------
# Path data


_PATH_CMD_RE = re.compile(r"([MmLlHhVvCcSsQqTtAaZz])|([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)")

_ARG_COUNT = {
    "M": 2, "L": 2, "H": 1, "V": 1, "C": 6, "S": 4, "Q": 4, "T": 2, "A": 7, "Z": 0,
}


@dataclass
class PathCommand:
    op: str  # one of M L C Q Z (normalized, absolute)
    points: list[tuple[float, float]]


def parse_path(d: str) -> list[PathCommand]:
    """Normalize path data to absolute M/L/C/Q/Z commands.

    Arcs degrade to line segments between endpoints (bounds stay
    conservative because arc endpoints bound the sweep we care about
    only approximately; flagged upstream as Other handling).
    """
    tokens: list[str] = []
    for cmd, num in _PATH_CMD_RE.findall(d):
        tokens.append(cmd or num)
    out: list[PathCommand] = []
    cur = (0.0, 0.0)
    start = (0.0, 0.0)
    prev_ctrl: tuple[float, float] | None = None
    i = 0
    last_op = ""
    while i < len(tokens):
        tok = tokens[i]
        if tok.isalpha():
            op = tok
            i += 1
        else:
            # implicit repeat; M repeats as L
            op = last_op
            if op in ("M", "m"):
                op = "L" if op == "M" else "l"
        upper = op.upper()
        rel = op.islower()
        n = _ARG_COUNT.get(upper)
        if n is None:
            break
        args = [float(t) for t in tokens[i : i + n]]
        if len(args) < n:
            break
        i += n
        last_op = op

        def pt(ax: float, ay: float) -> tuple[float, float]:
            return (cur[0] + ax, cur[1] + ay) if rel else (ax, ay)

        if upper == "M":
            cur = pt(args[0], args[1])
            start = cur
            out.append(PathCommand("M", [cur]))
            prev_ctrl = None
        elif upper == "L":
            cur = pt(args[0], args[1])
            out.append(PathCommand("L", [cur]))
            prev_ctrl = None
        elif upper == "H":
            cur = ((cur[0] + args[0]) if rel else args[0], cur[1])
            out.append(PathCommand("L", [cur]))
            prev_ctrl = None
        elif upper == "V":
            cur = (cur[0], (cur[1] + args[0]) if rel else args[0])
            out.append(PathCommand("L", [cur]))
            prev_ctrl = None
        elif upper == "C":
            c1 = pt(args[0], args[1])
            c2 = pt(args[2], args[3])
            end = pt(args[4], args[5])
            out.append(PathCommand("C", [c1, c2, end]))
            prev_ctrl = c2
            cur = end
        elif upper == "S":
            c1 = (2 * cur[0] - prev_ctrl[0], 2 * cur[1] - prev_ctrl[1]) if prev_ctrl else cur
            c2 = pt(args[0], args[1])
            end = pt(args[2], args[3])
            out.append(PathCommand("C", [c1, c2, end]))
            prev_ctrl = c2
            cur = end
        elif upper == "Q":
            c1 = pt(args[0], args[1])
            end = pt(args[2], args[3])
            out.append(PathCommand("Q", [c1, end]))
            prev_ctrl = c1
            cur = end
        elif upper == "T":
            c1 = (2 * cur[0] - prev_ctrl[0], 2 * cur[1] - prev_ctrl[1]) if prev_ctrl else cur
            end = pt(args[0], args[1])
            out.append(PathCommand("Q", [c1, end]))
            prev_ctrl = c1
            cur = end
        elif upper == "A":
            end = pt(args[5], args[6])
            out.append(PathCommand("L", [end]))
            prev_ctrl = None
            cur = end
        elif upper == "Z":
            out.append(PathCommand("Z", []))
            cur = start
            prev_ctrl = None
    return out


def path_points(commands: list[PathCommand]) -> list[tuple[float, float]]:
    """All anchor and control points (control-polygon bound, conservative)."""
    pts: list[tuple[float, float]] = []
    for cmd in commands:
        pts.extend(cmd.points)
    return pts


def format_number(value: float) -> str:
    """Attribute formatting: up to 3 decimal places, no trailing zeros."""
    text = f"{value:.3f}".rstrip("0").rstrip(".")
    return text if text not in ("-0", "") else "0"


def serialize_path(commands: list[PathCommand]) -> str:
    parts: list[str] = []
    for cmd in commands:
        coords = " ".join(f"{format_number(x)},{format_number(y)}" for x, y in cmd.points)
        parts.append(cmd.op + coords)
    return "".join(parts)


# ---------------------------------------------------------------------------
# Bounding boxes


def compute_bbox(element: VisualElement, metrics: TextMetricsConfig) -> Rect2D:
    """Transformed bounds of one element.

    Raises MissingGeometry when required attributes are absent; callers
    treat that as an empty bbox excluded from costs.
    """
    local = _local_bbox_points(element, metrics)
    return Rect2D.from_points([element.transform.apply(x, y) for x, y in local])


def _local_bbox_points(element: VisualElement, metrics: TextMetricsConfig) -> list[tuple[float, float]]:
    kind = element.kind
    get = element.get_float
    if kind is ElementKind.RECT:
        x, y = get("x", 0.0), get("y", 0.0)
        w, h = get("width"), get("height")
        if w is None or h is None:
            raise MissingGeometry(f"rect {element.id} lacks width/height")
        return [(x, y), (x + w, y), (x, y + h), (x + w, y + h)]
    if kind is ElementKind.CIRCLE:
        cx, cy, r = get("cx", 0.0), get("cy", 0.0), get("r")
        if r is None:
            raise MissingGeometry(f"circle {element.id} lacks r")
        return [(cx - r, cy - r), (cx + r, cy - r), (cx - r, cy + r), (cx + r, cy + r)]
    if kind is ElementKind.ELLIPSE:
        cx, cy = get("cx", 0.0), get("cy", 0.0)
        rx, ry = get("rx"), get("ry")
        if rx is None or ry is None:
            raise MissingGeometry(f"ellipse {element.id} lacks rx/ry")
        return [(cx - rx, cy - ry), (cx + rx, cy - ry), (cx - rx, cy + ry), (cx + rx, cy + ry)]
    if kind is ElementKind.LINE:
        x1, y1 = get("x1", 0.0), get("y1", 0.0)
        x2, y2 = get("x2", 0.0), get("y2", 0.0)
        return [(x1, y1), (x2, y2)]
    if kind is ElementKind.PATH:
        d = element.attributes.get("d")
        if not d:
            raise MissingGeometry(f"path {element.id} lacks d")
        pts = path_points(parse_path(d))
        if not pts:
            raise MissingGeometry(f"path {element.id} has no coordinates")
        return pts
    if kind is ElementKind.TEXT:
        return _text_bbox_points(element, metrics)
    if kind is ElementKind.OTHER:
        pts_attr = element.attributes.get("points")
        if pts_attr:  # polygon / polyline
            nums = [float(n) for n in re.findall(r"[-+]?(?:\d+\.?\d*|\.\d+)", pts_attr)]
            pts = list(zip(nums[0::2], nums[1::2]))
            if pts:
                return pts
        x, y = get("x"), get("y")
        w, h = get("width"), get("height")
        if None not in (x, y, w, h):
            return [(x, y), (x + w, y), (x, y + h), (x + w, y + h)]
        raise MissingGeometry(f"unsupported element {element.id} ({element.tag})")
    raise MissingGeometry(f"group {element.id} has no intrinsic geometry")


def text_anchor_box(
    x: float,
    y: float,
    lines: list[str],
    font_size: float,
    anchor: str,
    metrics: TextMetricsConfig,
) -> Rect2D:
    """Local-space text box for an anchor point and wrapped lines.

    The anchor (x, y) is the first line's baseline; subsequent lines
    stack downward at one line-height each.
    """
    if not lines:
        lines = [""]
    width = max(metrics.text_width(line, font_size) for line in lines)
    lh = metrics.line_height(font_size)
    y_min = y - metrics.baseline_ratio * lh
    y_max = y_min + lh * len(lines)
    if anchor == "middle":
        x_min = x - width / 2.0
    elif anchor == "end":
        x_min = x - width
    else:
        x_min = x
    return Rect2D(x_min, y_min, x_min + width, y_max)


def _text_bbox_points(element: VisualElement, metrics: TextMetricsConfig) -> list[tuple[float, float]]:
    x = element.get_float("x", 0.0)
    y = element.get_float("y", 0.0)
    dy = element.get_float("dy", 0.0) or 0.0
    dx = element.get_float("dx", 0.0) or 0.0
    anchor = element.attributes.get("text-anchor", "start")
    box = text_anchor_box(x + dx, y + dy, element.lines(), element.font_size, anchor, metrics)
    return [(box.x_min, box.y_min), (box.x_max, box.y_min), (box.x_min, box.y_max), (box.x_max, box.y_max)]


def safe_bbox(element: VisualElement, metrics: TextMetricsConfig) -> Rect2D | None:
    """compute_bbox that maps MissingGeometry to None."""
    try:
        return compute_bbox(element, metrics)
    except MissingGeometry:
        return None


def group_bbox(model: DocumentModel, group_id: str) -> Rect2D | None:
    """Union of a container's descendant leaf bboxes."""
    boxes: list[Rect2D] = []
    stack = list(model.children.get(group_id, []))
    while stack:
        eid = stack.pop()
        elem = model.elements[eid]
        if elem.kind is ElementKind.GROUP:
            stack.extend(model.children.get(eid, []))
        else:
            box = safe_bbox(elem, model.metrics)
            if box is not None:
                boxes.append(box)
    return Rect2D.union_all(boxes)


# ---------------------------------------------------------------------------
# Serialization


def serialize(model: DocumentModel) -> bytes:
    """Serialize the model to SVG bytes.

    Attribute order and whitespace are not preserved; geometry is
    (re-parsing yields per-element bboxes within 0.01 px).
    """
    root_attrib = dict(model.root_attrib)
    root_attrib.setdefault("xmlns", SVG_NS)
    root = ET.Element("svg", _clean_attrib(root_attrib))

    nodes: dict[str | None, ET.Element] = {None: root}

    for eid in model.order:
        elem = model.elements[eid]
        parent_node = nodes.get(elem.parent, root)
        node = ET.SubElement(parent_node, elem.tag, _clean_attrib(elem.raw_attrib))
        nodes[eid] = node
        if elem.kind is ElementKind.TEXT and elem.text_content is not None:
            lines = elem.lines()
            if len(lines) <= 1:
                node.text = elem.text_content
            else:
                # stacked spans preserve the anchor point of the first line
                x = elem.raw_attrib.get("x", "0")
                lh = model.metrics.line_height(elem.font_size)
                node.text = None
                for idx, line in enumerate(lines):
                    span = ET.SubElement(node, "tspan", {"x": x, "dy": "0" if idx == 0 else format_number(lh)})
                    span.text = line
    return ET.tostring(root, encoding="utf-8", xml_declaration=True)


def _clean_attrib(attrib: dict[str, str]) -> dict[str, str]:
    out: dict[str, str] = {}
    for key, val in attrib.items():
        key = key.rsplit("}", 1)[-1] if key.startswith("{") else key
        out[key] = val
    return out
