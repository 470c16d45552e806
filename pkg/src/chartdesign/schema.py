"""Hierarchical chart-design records: parsing, validation, canonicalization.

A design document is a JSON object keyed by a fixed set of top-level
attributes (``chart_type``, ``chart_alignment``, ``text_elements``, ...).
Keys that do not apply to a chart family are omitted entirely rather than
written with null or "not applicable" placeholders; :func:`applicability`
returns the permitted key set per family and :func:`validate` enforces it.

Enum-valued fields accept case-insensitive synonyms ("Bar Chart", "boxplot")
which are collapsed to canonical tokens using the versioned table shipped in
``data/synonyms.json``.
"""

from __future__ import annotations

import json
import re
import warnings
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import lru_cache
from importlib import resources
from typing import Any


class ChartType(str, Enum):
    BAR = "bar"
    LINE = "line"
    AREA = "area"
    SCATTER = "scatter"
    PIE = "pie"
    BOX = "box"
    HISTOGRAM = "histogram"


CHART_ALIGNMENTS = ("horizontal", "vertical", "other")
SUB_CHART_TYPES = ("simple", "grouped", "stacked")
LEGEND_POSITIONS = ("top", "bottom", "left", "right", "none")
MARK_ALIGNMENTS = ("grouped", "stacked")
PATTERNS = ("solid", "striped", "dotted")
AXIS_KINDS = ("categorical", "numeric")

# Canonical serialization order of top-level keys.
TOP_LEVEL_KEYS = (
    "chart_type",
    "sub_chart_type",
    "chart_alignment",
    "text_elements",
    "axes",
    "legend",
    "bars_or_data_points",
    "grid_lines",
    "size_and_spacing",
    "boxplot_style",
)


class IssueCode(str, Enum):
    MISSING_REQUIRED = "missing_required"
    INAPPLICABLE_KEY = "inapplicable_key"
    BAD_ENUM = "bad_enum"
    BAD_RANGE = "bad_range"
    BAD_TYPE = "bad_type"


@dataclass(frozen=True)
class ValidationIssue:
    path: str
    code: IssueCode
    message: str


class DesignParseError(ValueError):
    """The document is not syntactically valid JSON."""

    def __init__(self, message: str, offset: int):
        super().__init__(message)
        self.offset = offset  # byte offset into the UTF-8 document


class InvalidDesignError(ValueError):
    """The document parsed as JSON but violates the design schema."""

    def __init__(self, issues: list[ValidationIssue]):
        detail = "; ".join(f"{i.path}: {i.message}" for i in issues)
        super().__init__(f"invalid design document: {detail}")
        self.issues = issues


class UnknownKeyWarning(UserWarning):
    """An input document carried a key outside the schema (retained, not rejected)."""


@dataclass(frozen=True)
class TextElements:
    title: str | None = None
    x_axis_label: str | None = None
    y_axis_label: str | None = None
    annotations: tuple[str, ...] | None = None


@dataclass(frozen=True)
class AxisRange:
    min: float
    max: float


@dataclass(frozen=True)
class AxisSpec:
    kind: str | None = None
    categories: tuple[str, ...] | None = None
    range: AxisRange | None = None


@dataclass(frozen=True)
class Axes:
    x: AxisSpec | None = None
    y: AxisSpec | None = None


@dataclass(frozen=True)
class Legend:
    visible: bool | None = None
    position: str | None = None
    labels: tuple[str, ...] = ()


@dataclass(frozen=True)
class MarkStyle:
    """Styling of bars or data points: series layout, geometry, fill pattern."""

    alignment: str | None = None
    width: float | None = None
    spacing: float | None = None
    pattern: str | None = None


@dataclass(frozen=True)
class GridLines:
    horizontal: int | None = None
    vertical: int | None = None


@dataclass(frozen=True)
class SizeAndSpacing:
    mark_width: float | None = None
    intra_group_spacing: float | None = None


@dataclass(frozen=True)
class BoxplotStyle:
    whisker_rule: str | None = None
    outlier_marker_visible: bool | None = None
    mean_marker: bool | None = None


@dataclass(frozen=True)
class DesignSpec:
    """One chart's design choices. Immutable; compare with ``==``.

    ``extras`` holds unknown top-level keys retained from the source document
    so that forward-compatible corpora survive a round trip.
    """

    chart_type: ChartType
    sub_chart_type: str | None = None
    chart_alignment: str | None = None
    text_elements: TextElements = field(default_factory=TextElements)
    axes: Axes | None = None
    legend: Legend | None = None
    bars_or_data_points: MarkStyle | None = None
    grid_lines: GridLines | None = None
    size_and_spacing: SizeAndSpacing | None = None
    boxplot_style: BoxplotStyle | None = None
    extras: dict[str, Any] = field(default_factory=dict)


# --------------------------------------------------------------------------
# Synonym table


@lru_cache(maxsize=1)
def _synonyms() -> dict[str, dict[str, str]]:
    text = resources.files("chartdesign.data").joinpath("synonyms.json").read_text("utf-8")
    table = json.loads(text)
    table.pop("version", None)
    return table


def synonym_table_version() -> int:
    text = resources.files("chartdesign.data").joinpath("synonyms.json").read_text("utf-8")
    return json.loads(text)["version"]


def normalize_token(value: str) -> str:
    """Lowercase and collapse whitespace/punctuation runs to single spaces."""
    return re.sub(r"[^a-z0-9]+", " ", value.lower()).strip()


def resolve_enum(domain: str, raw: str) -> str | None:
    """Map a raw string onto its canonical enum token, or None if unknown."""
    return _synonyms()[domain].get(normalize_token(raw))


def resolve_any_enum(raw: str) -> str | None:
    """Resolve a raw string against every enum domain (used by the matcher).

    Returns the canonical token if exactly one canonical value is reachable,
    None otherwise.
    """
    hits = {t for d in _synonyms().values() if (t := d.get(normalize_token(raw)))}
    if len(hits) == 1:
        return hits.pop()
    return None


# --------------------------------------------------------------------------
# Applicability

_BASE_KEYS = frozenset(
    {"chart_type", "sub_chart_type", "chart_alignment", "text_elements", "legend"}
)
_AXIS_KEYS = frozenset({"axes", "grid_lines"})
_MARK_KEYS = frozenset({"bars_or_data_points", "size_and_spacing"})

_APPLICABILITY: dict[ChartType, frozenset[str]] = {
    ChartType.PIE: _BASE_KEYS,
    ChartType.BAR: _BASE_KEYS | _AXIS_KEYS | _MARK_KEYS,
    ChartType.BOX: _BASE_KEYS | _AXIS_KEYS | _MARK_KEYS | {"boxplot_style"},
    ChartType.LINE: _BASE_KEYS | _AXIS_KEYS,
    ChartType.AREA: _BASE_KEYS | _AXIS_KEYS,
    ChartType.SCATTER: _BASE_KEYS | _AXIS_KEYS,
    ChartType.HISTOGRAM: _BASE_KEYS | _AXIS_KEYS,
}


def applicability(chart_type: ChartType) -> frozenset[str]:
    """Top-level keys permitted for the given chart family."""
    return _APPLICABILITY[ChartType(chart_type)]


# --------------------------------------------------------------------------
# Parsing


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _want_str(obj: dict, key: str, path: str, issues: list[ValidationIssue]) -> str | None:
    if key not in obj:
        return None
    v = obj[key]
    if not isinstance(v, str):
        issues.append(ValidationIssue(f"{path}{key}", IssueCode.BAD_TYPE, "expected text"))
        return None
    return v


def _want_number(obj: dict, key: str, path: str, issues: list[ValidationIssue]) -> float | None:
    if key not in obj:
        return None
    v = obj[key]
    if not _is_number(v):
        issues.append(ValidationIssue(f"{path}{key}", IssueCode.BAD_TYPE, "expected a number"))
        return None
    return v


def _want_bool(obj: dict, key: str, path: str, issues: list[ValidationIssue]) -> bool | None:
    if key not in obj:
        return None
    v = obj[key]
    if not isinstance(v, bool):
        issues.append(ValidationIssue(f"{path}{key}", IssueCode.BAD_TYPE, "expected true/false"))
        return None
    return v


def _want_str_list(
    obj: dict, key: str, path: str, issues: list[ValidationIssue]
) -> tuple[str, ...] | None:
    if key not in obj:
        return None
    v = obj[key]
    if not isinstance(v, list):
        issues.append(ValidationIssue(f"{path}{key}", IssueCode.BAD_TYPE, "expected a list of text"))
        return None
    out = []
    for i, item in enumerate(v):
        if not isinstance(item, str):
            issues.append(
                ValidationIssue(f"{path}{key}.{i}", IssueCode.BAD_TYPE, "expected text")
            )
            return None
        out.append(item)
    return tuple(out)


def _want_record(obj: dict, key: str, path: str, issues: list[ValidationIssue]) -> dict | None:
    if key not in obj:
        return None
    v = obj[key]
    if not isinstance(v, dict):
        issues.append(ValidationIssue(f"{path}{key}", IssueCode.BAD_TYPE, "expected an object"))
        return None
    return v


def _enum_or_raw(domain: str, raw: str | None) -> str | None:
    if raw is None:
        return None
    return resolve_enum(domain, raw) or raw


def _count(value: float | None) -> int | float | None:
    # Integral floats collapse to int so canonical output is stable.
    if isinstance(value, float) and value.is_integer():
        return int(value)
    return value


def _build_axis(obj: dict, path: str, issues: list[ValidationIssue]) -> AxisSpec:
    rng = None
    rng_obj = _want_record(obj, "range", path, issues)
    if rng_obj is not None:
        rng = AxisRange(
            min=_want_number(rng_obj, "min", f"{path}range.", issues),
            max=_want_number(rng_obj, "max", f"{path}range.", issues),
        )
    return AxisSpec(
        kind=_enum_or_raw("axis_kind", _want_str(obj, "kind", path, issues)),
        categories=_want_str_list(obj, "categories", path, issues),
        range=rng,
    )


def _build_spec(obj: Any, issues: list[ValidationIssue]) -> tuple[DesignSpec | None, list[str]]:
    """Assemble a DesignSpec from decoded JSON, collecting type issues.

    Returns (spec, unknown_key_paths); spec is None when chart_type cannot
    be established.
    """
    if not isinstance(obj, dict):
        issues.append(ValidationIssue("", IssueCode.BAD_TYPE, "document must be a JSON object"))
        return None, []

    unknown = [k for k in obj if k not in TOP_LEVEL_KEYS]

    raw_type = obj.get("chart_type")
    if raw_type is None:
        issues.append(
            ValidationIssue("chart_type", IssueCode.MISSING_REQUIRED, "chart_type is required")
        )
        return None, unknown
    if not isinstance(raw_type, str):
        issues.append(ValidationIssue("chart_type", IssueCode.BAD_TYPE, "expected text"))
        return None, unknown
    canonical = resolve_enum("chart_type", raw_type)
    if canonical is None:
        issues.append(
            ValidationIssue("chart_type", IssueCode.BAD_ENUM, f"unknown chart type {raw_type!r}")
        )
        return None, unknown
    chart_type = ChartType(canonical)

    text_elements = TextElements()
    te = _want_record(obj, "text_elements", "", issues)
    if te is not None:
        text_elements = TextElements(
            title=_want_str(te, "title", "text_elements.", issues),
            x_axis_label=_want_str(te, "x_axis_label", "text_elements.", issues),
            y_axis_label=_want_str(te, "y_axis_label", "text_elements.", issues),
            annotations=_want_str_list(te, "annotations", "text_elements.", issues),
        )

    axes = None
    ax = _want_record(obj, "axes", "", issues)
    if ax is not None:
        x_obj = _want_record(ax, "x", "axes.", issues)
        y_obj = _want_record(ax, "y", "axes.", issues)
        axes = Axes(
            x=_build_axis(x_obj, "axes.x.", issues) if x_obj is not None else None,
            y=_build_axis(y_obj, "axes.y.", issues) if y_obj is not None else None,
        )

    legend = None
    lg = _want_record(obj, "legend", "", issues)
    if lg is not None:
        legend = Legend(
            visible=_want_bool(lg, "visible", "legend.", issues),
            position=_enum_or_raw("legend_position", _want_str(lg, "position", "legend.", issues)),
            labels=_want_str_list(lg, "labels", "legend.", issues) or (),
        )

    marks = None
    bd = _want_record(obj, "bars_or_data_points", "", issues)
    if bd is not None:
        marks = MarkStyle(
            alignment=_enum_or_raw(
                "mark_alignment", _want_str(bd, "alignment", "bars_or_data_points.", issues)
            ),
            width=_want_number(bd, "width", "bars_or_data_points.", issues),
            spacing=_want_number(bd, "spacing", "bars_or_data_points.", issues),
            pattern=_enum_or_raw(
                "pattern", _want_str(bd, "pattern", "bars_or_data_points.", issues)
            ),
        )

    grid = None
    gl = _want_record(obj, "grid_lines", "", issues)
    if gl is not None:
        grid = GridLines(
            horizontal=_count(_want_number(gl, "horizontal", "grid_lines.", issues)),
            vertical=_count(_want_number(gl, "vertical", "grid_lines.", issues)),
        )

    sizing = None
    ss = _want_record(obj, "size_and_spacing", "", issues)
    if ss is not None:
        sizing = SizeAndSpacing(
            mark_width=_want_number(ss, "mark_width", "size_and_spacing.", issues),
            intra_group_spacing=_want_number(
                ss, "intra_group_spacing", "size_and_spacing.", issues
            ),
        )

    boxstyle = None
    bs = _want_record(obj, "boxplot_style", "", issues)
    if bs is not None:
        boxstyle = BoxplotStyle(
            whisker_rule=_want_str(bs, "whisker_rule", "boxplot_style.", issues),
            outlier_marker_visible=_want_bool(bs, "outlier_marker_visible", "boxplot_style.", issues),
            mean_marker=_want_bool(bs, "mean_marker", "boxplot_style.", issues),
        )

    spec = DesignSpec(
        chart_type=chart_type,
        sub_chart_type=_enum_or_raw("sub_chart_type", _want_str(obj, "sub_chart_type", "", issues)),
        chart_alignment=_enum_or_raw(
            "chart_alignment", _want_str(obj, "chart_alignment", "", issues)
        ),
        text_elements=text_elements,
        axes=axes,
        legend=legend,
        bars_or_data_points=marks,
        grid_lines=grid,
        size_and_spacing=sizing,
        boxplot_style=boxstyle,
        extras={
            k: v
            for k in sorted(unknown)
            if (v := _canonical_value(obj[k])) not in ({}, [])
        },
    )
    return spec, unknown


def spec_from_obj(obj: Any) -> DesignSpec:
    """Build a DesignSpec from an already-decoded JSON object.

    Raises InvalidDesignError on missing chart_type or type mismatches;
    unknown keys are retained on the spec and reported as warnings.
    """
    issues: list[ValidationIssue] = []
    spec, unknown = _build_spec(obj, issues)
    for key in unknown:
        warnings.warn(f"unknown design key {key!r} retained", UnknownKeyWarning, stacklevel=2)
    if issues or spec is None:
        raise InvalidDesignError(issues)
    return spec


def parse_design(text: str) -> DesignSpec:
    """Parse a UTF-8 JSON document into a DesignSpec.

    Raises DesignParseError (with byte offset) on malformed JSON and
    InvalidDesignError (with the issue list) on schema type mismatches.
    Enum strings are matched case-insensitively against the synonym table.
    """
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        offset = len(text[: exc.pos].encode("utf-8"))
        raise DesignParseError(f"JSON syntax error at byte {offset}: {exc.msg}", offset) from None
    return spec_from_obj(obj)


# --------------------------------------------------------------------------
# Validation


def _check_enum(value, allowed, path, issues):
    if value is not None and value not in allowed:
        issues.append(
            ValidationIssue(
                path, IssueCode.BAD_ENUM, f"{value!r} not one of {', '.join(allowed)}"
            )
        )


def _check_required(value, path, issues):
    if value is None:
        issues.append(ValidationIssue(path, IssueCode.MISSING_REQUIRED, "required"))
        return False
    return True


def _check_count(value, path, issues):
    if value is None:
        issues.append(ValidationIssue(path, IssueCode.MISSING_REQUIRED, "required"))
    elif not isinstance(value, int) or isinstance(value, bool):
        issues.append(ValidationIssue(path, IssueCode.BAD_TYPE, "expected a whole number"))
    elif value < 0:
        issues.append(ValidationIssue(path, IssueCode.BAD_RANGE, "count must be >= 0"))


def _validate_axis(axis: AxisSpec | None, path: str, issues: list[ValidationIssue]) -> None:
    if axis is None:
        issues.append(ValidationIssue(path, IssueCode.MISSING_REQUIRED, "required"))
        return
    if not _check_required(axis.kind, f"{path}.kind", issues):
        return
    if axis.kind not in AXIS_KINDS:
        _check_enum(axis.kind, AXIS_KINDS, f"{path}.kind", issues)
        return
    if axis.kind == "categorical":
        if axis.categories is None:
            issues.append(
                ValidationIssue(f"{path}.categories", IssueCode.MISSING_REQUIRED, "required")
            )
        elif not axis.categories:
            issues.append(
                ValidationIssue(
                    f"{path}.categories", IssueCode.BAD_RANGE, "must list at least one category"
                )
            )
        if axis.range is not None:
            issues.append(
                ValidationIssue(
                    f"{path}.range",
                    IssueCode.INAPPLICABLE_KEY,
                    "range does not apply to a categorical axis",
                )
            )
    else:  # numeric
        if axis.range is None:
            issues.append(ValidationIssue(f"{path}.range", IssueCode.MISSING_REQUIRED, "required"))
        else:
            if axis.range.min is None or axis.range.max is None:
                issues.append(
                    ValidationIssue(f"{path}.range", IssueCode.MISSING_REQUIRED, "needs min and max")
                )
            elif axis.range.min > axis.range.max:
                issues.append(
                    ValidationIssue(f"{path}.range", IssueCode.BAD_RANGE, "min must be <= max")
                )
        if axis.categories is not None:
            issues.append(
                ValidationIssue(
                    f"{path}.categories",
                    IssueCode.INAPPLICABLE_KEY,
                    "categories do not apply to a numeric axis",
                )
            )


def validate(spec: DesignSpec) -> list[ValidationIssue]:
    """Check every schema invariant; an empty list means the spec is valid.

    Issues are returned sorted by attribute path.
    """
    issues: list[ValidationIssue] = []

    allowed = applicability(spec.chart_type)
    for key in TOP_LEVEL_KEYS:
        if key in ("chart_type", "text_elements"):
            continue
        if getattr(spec, key) is not None and key not in allowed:
            issues.append(
                ValidationIssue(
                    key,
                    IssueCode.INAPPLICABLE_KEY,
                    f"{key} does not apply to {spec.chart_type.value} charts",
                )
            )

    if spec.chart_alignment is None:
        issues.append(ValidationIssue("chart_alignment", IssueCode.MISSING_REQUIRED, "required"))
    else:
        _check_enum(spec.chart_alignment, CHART_ALIGNMENTS, "chart_alignment", issues)

    if spec.sub_chart_type is not None:
        _check_enum(spec.sub_chart_type, SUB_CHART_TYPES, "sub_chart_type", issues)
        if spec.sub_chart_type in ("grouped", "stacked") and spec.chart_type is not ChartType.BAR:
            issues.append(
                ValidationIssue(
                    "sub_chart_type",
                    IssueCode.BAD_ENUM,
                    f"{spec.sub_chart_type!r} applies only to bar charts",
                )
            )

    if spec.axes is not None and "axes" in allowed:
        _validate_axis(spec.axes.x, "axes.x", issues)
        _validate_axis(spec.axes.y, "axes.y", issues)

    if spec.legend is not None:
        _check_required(spec.legend.visible, "legend.visible", issues)
        if _check_required(spec.legend.position, "legend.position", issues):
            _check_enum(spec.legend.position, LEGEND_POSITIONS, "legend.position", issues)

    if spec.bars_or_data_points is not None and "bars_or_data_points" in allowed:
        m = spec.bars_or_data_points
        if _check_required(m.alignment, "bars_or_data_points.alignment", issues):
            _check_enum(m.alignment, MARK_ALIGNMENTS, "bars_or_data_points.alignment", issues)
        if _check_required(m.width, "bars_or_data_points.width", issues):
            if not 0 < m.width <= 1:
                issues.append(
                    ValidationIssue(
                        "bars_or_data_points.width",
                        IssueCode.BAD_RANGE,
                        "width is a fraction in (0, 1]",
                    )
                )
        if _check_required(m.spacing, "bars_or_data_points.spacing", issues):
            if m.spacing < 0:
                issues.append(
                    ValidationIssue(
                        "bars_or_data_points.spacing", IssueCode.BAD_RANGE, "spacing must be >= 0"
                    )
                )
        if _check_required(m.pattern, "bars_or_data_points.pattern", issues):
            _check_enum(m.pattern, PATTERNS, "bars_or_data_points.pattern", issues)

    if spec.grid_lines is not None and "grid_lines" in allowed:
        _check_count(spec.grid_lines.horizontal, "grid_lines.horizontal", issues)
        _check_count(spec.grid_lines.vertical, "grid_lines.vertical", issues)

    if spec.size_and_spacing is not None and "size_and_spacing" in allowed:
        s = spec.size_and_spacing
        if _check_required(s.mark_width, "size_and_spacing.mark_width", issues):
            if not 0 < s.mark_width <= 1:
                issues.append(
                    ValidationIssue(
                        "size_and_spacing.mark_width",
                        IssueCode.BAD_RANGE,
                        "mark_width is a fraction in (0, 1]",
                    )
                )
        if _check_required(s.intra_group_spacing, "size_and_spacing.intra_group_spacing", issues):
            if s.intra_group_spacing < 0:
                issues.append(
                    ValidationIssue(
                        "size_and_spacing.intra_group_spacing",
                        IssueCode.BAD_RANGE,
                        "spacing must be >= 0",
                    )
                )

    if spec.boxplot_style is not None and "boxplot_style" in allowed:
        b = spec.boxplot_style
        _check_required(b.whisker_rule, "boxplot_style.whisker_rule", issues)
        _check_required(b.outlier_marker_visible, "boxplot_style.outlier_marker_visible", issues)
        _check_required(b.mean_marker, "boxplot_style.mean_marker", issues)

    return sorted(issues, key=lambda i: (i.path, i.code.value))


# --------------------------------------------------------------------------
# Canonical form


def _canonical_value(value: Any) -> Any:
    """Deterministic rendering of retained unknown subtrees: sorted keys,
    empty containers dropped."""
    if isinstance(value, dict):
        out = {k: _canonical_value(value[k]) for k in sorted(value)}
        return {k: v for k, v in out.items() if v not in ({}, [])}
    if isinstance(value, list):
        return [v for v in (_canonical_value(x) for x in value) if v not in ({}, [])]
    return value


def spec_to_obj(spec: DesignSpec) -> dict[str, Any]:
    """Render a DesignSpec as a plain dict in canonical key order."""
    obj: dict[str, Any] = {"chart_type": spec.chart_type.value}
    if spec.sub_chart_type is not None:
        obj["sub_chart_type"] = spec.sub_chart_type
    if spec.chart_alignment is not None:
        obj["chart_alignment"] = spec.chart_alignment

    te: dict[str, Any] = {}
    for name in ("title", "x_axis_label", "y_axis_label"):
        v = getattr(spec.text_elements, name)
        if v is not None:
            te[name] = v
    if spec.text_elements.annotations:
        te["annotations"] = list(spec.text_elements.annotations)
    obj["text_elements"] = te

    if spec.axes is not None:
        ax: dict[str, Any] = {}
        for name in ("x", "y"):
            axis = getattr(spec.axes, name)
            if axis is None:
                continue
            a: dict[str, Any] = {}
            if axis.kind is not None:
                a["kind"] = axis.kind
            if axis.categories is not None:
                a["categories"] = list(axis.categories)
            if axis.range is not None:
                a["range"] = {"min": axis.range.min, "max": axis.range.max}
            ax[name] = a
        obj["axes"] = ax

    if spec.legend is not None:
        lg: dict[str, Any] = {}
        if spec.legend.visible is not None:
            lg["visible"] = spec.legend.visible
        if spec.legend.position is not None:
            lg["position"] = spec.legend.position
        lg["labels"] = list(spec.legend.labels)
        obj["legend"] = lg

    if spec.bars_or_data_points is not None:
        m = spec.bars_or_data_points
        bd = {
            k: v
            for k, v in (
                ("alignment", m.alignment),
                ("width", m.width),
                ("spacing", m.spacing),
                ("pattern", m.pattern),
            )
            if v is not None
        }
        obj["bars_or_data_points"] = bd

    if spec.grid_lines is not None:
        gl = {
            k: v
            for k, v in (
                ("horizontal", spec.grid_lines.horizontal),
                ("vertical", spec.grid_lines.vertical),
            )
            if v is not None
        }
        obj["grid_lines"] = gl

    if spec.size_and_spacing is not None:
        s = spec.size_and_spacing
        ss = {
            k: v
            for k, v in (
                ("mark_width", s.mark_width),
                ("intra_group_spacing", s.intra_group_spacing),
            )
            if v is not None
        }
        obj["size_and_spacing"] = ss

    if spec.boxplot_style is not None:
        b = spec.boxplot_style
        bs = {
            k: v
            for k, v in (
                ("whisker_rule", b.whisker_rule),
                ("outlier_marker_visible", b.outlier_marker_visible),
                ("mean_marker", b.mean_marker),
            )
            if v is not None
        }
        obj["boxplot_style"] = bs

    for key in sorted(spec.extras):
        obj[key] = _canonical_value(spec.extras[key])
    return obj


def serialize(spec: DesignSpec) -> str:
    """Canonical serialization: 2-space indent, fixed key order, UTF-8."""
    return json.dumps(spec_to_obj(spec), indent=2, ensure_ascii=False)


def normalize(spec: DesignSpec) -> DesignSpec:
    """Return the canonical form of a spec: synonyms collapsed, keys in
    schema order, inapplicable keys dropped. Idempotent.

    Raises InvalidDesignError when the spec has issues canonicalization
    cannot repair (bad enums, bad ranges, missing required fields).
    """
    issues: list[ValidationIssue] = []
    reparsed, _ = _build_spec(spec_to_obj(spec), issues)
    if issues or reparsed is None:
        raise InvalidDesignError(issues)

    allowed = applicability(reparsed.chart_type)
    drop = {
        key: None
        for key in TOP_LEVEL_KEYS
        if key not in ("chart_type", "text_elements")
        and key not in allowed
        and getattr(reparsed, key) is not None
    }
    if drop:
        reparsed = replace(reparsed, **drop)

    # Nested repair: a categorical axis cannot carry a range, nor a numeric
    # one categories.
    if reparsed.axes is not None:
        new_axes = {}
        for name in ("x", "y"):
            axis = getattr(reparsed.axes, name)
            if axis is not None:
                if axis.kind == "categorical" and axis.range is not None:
                    axis = replace(axis, range=None)
                if axis.kind == "numeric" and axis.categories is not None:
                    axis = replace(axis, categories=None)
            new_axes[name] = axis
        reparsed = replace(reparsed, axes=Axes(**new_axes))

    # Canonical form never carries an empty annotations list.
    if reparsed.text_elements.annotations == ():
        reparsed = replace(reparsed, text_elements=replace(reparsed.text_elements, annotations=None))

    remaining = validate(reparsed)
    if remaining:
        raise InvalidDesignError(remaining)
    return reparsed
