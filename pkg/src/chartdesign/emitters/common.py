"""Shared resolution layer for all chart emitters.

Every backend renders from the same EmitContext so the four outputs encode
the same visualization: the same category/value columns, series layout,
orientation, and effective geometry. Backends differ only in which
attributes their library can express; anything a backend degrades is
reported through EmitResult.warnings as "<attribute path>: <note>" (a
warned path covers its whole subtree).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .. import schema, tabular
from ..schema import ChartType, DesignSpec
from ..tabular import ColumnKind, DataTable


class Backend(str, Enum):
    VEGALITE = "vegalite"
    MATPLOTLIB = "matplotlib"
    GGPLOT2 = "ggplot2"
    ALTAIR = "altair"


@dataclass(frozen=True)
class EmitResult:
    backend: Backend
    content: str
    warnings: tuple[str, ...] = ()


class EmitError(ValueError):
    """The (spec, table) pair cannot be compiled for the requested backend."""


SERIES_FIELD = "series"
VALUE_FIELD = "value"

# Chart families that can carry a color/series channel and hence a legend.
_LEGEND_TYPES = {ChartType.BAR, ChartType.LINE, ChartType.AREA, ChartType.BOX, ChartType.PIE}
_SERIES_TYPES = {ChartType.BAR, ChartType.LINE, ChartType.AREA}


@dataclass
class EmitContext:
    spec: DesignSpec
    table: DataTable
    orientation: str  # "vertical" | "horizontal", as drawn
    category_field: str
    categories: list[str]
    value_fields: list[str]
    series: dict[str, list[float | None]]
    group_mode: str  # "simple" | "grouped" | "stacked"
    use_series: bool
    width: float | None
    width_path: str | None  # which attribute supplied the bar width
    warnings: list[str] = field(default_factory=list)

    def warn(self, path: str, note: str) -> None:
        self.warnings.append(f"{path}: {note}")

    @property
    def legend_supported(self) -> bool:
        return self.spec.chart_type in _LEGEND_TYPES

    @property
    def first_series(self) -> tuple[str, list[float | None]]:
        name = self.value_fields[0]
        return name, self.series[name]


def _column_name(table: DataTable, index: int) -> str:
    if index < len(table.headers) and table.headers[index]:
        return table.headers[index]
    return f"column_{index + 1}"


def _as_float(cell) -> float | None:
    if isinstance(cell, (int, float)) and not isinstance(cell, bool):
        return float(cell)
    return None


def build_context(spec: DesignSpec, table: DataTable) -> EmitContext:
    """Validate the pair and resolve every backend-independent decision."""
    issues = schema.validate(spec)
    if issues:
        raise EmitError(
            "spec does not validate: " + "; ".join(f"{i.path} ({i.code.value})" for i in issues)
        )
    spec = schema.normalize(spec)

    if not table.rows:
        raise EmitError("table has no data rows")
    kinds = tabular.infer_column_kinds(table)
    numeric_idx = [i for i, k in enumerate(kinds) if k is ColumnKind.NUMERIC]
    label_idx = [i for i, k in enumerate(kinds) if k is not ColumnKind.NUMERIC]

    needed = 2 if spec.chart_type is ChartType.SCATTER else 1
    if len(numeric_idx) < needed:
        raise EmitError(
            f"{spec.chart_type.value} chart needs {needed} numeric column(s), "
            f"table has {len(numeric_idx)}"
        )

    if spec.chart_type is ChartType.SCATTER:
        cat_i = None
        value_idx = numeric_idx[:2]
    else:
        cat_i = label_idx[0] if label_idx else None
        value_idx = numeric_idx

    if cat_i is not None:
        category_field = _column_name(table, cat_i)
        categories = [
            "" if cell is None else str(tabular._format_cell(cell))
            for cell in table.column(cat_i)
        ]
    else:
        # No label column: categories fall back to 1-based row numbers.
        category_field = "row"
        categories = [str(i + 1) for i in range(len(table.rows))]

    value_fields = [_column_name(table, i) for i in value_idx]
    series = {
        _column_name(table, i): [_as_float(c) for c in table.column(i)] for i in value_idx
    }

    # The axes record describes the axes as drawn; a declared categorical
    # axis with no label column to back it is unfulfillable.
    if spec.axes is not None:
        declared = {a.kind for a in (spec.axes.x, spec.axes.y) if a is not None}
        if "categorical" in declared and cat_i is None and spec.chart_type is not ChartType.BOX:
            raise EmitError("spec declares a categorical axis but the table has no label column")

    ctx = EmitContext(
        spec=spec,
        table=table,
        orientation="horizontal" if spec.chart_alignment == "horizontal" else "vertical",
        category_field=category_field,
        categories=categories,
        value_fields=value_fields,
        series=series,
        group_mode="simple",
        use_series=False,
        width=None,
        width_path=None,
    )

    if spec.chart_alignment == "other":
        ctx.warn("chart_alignment", "no drawable orientation for 'other'; drawn vertical")
    elif spec.chart_type in (ChartType.PIE, ChartType.SCATTER) and spec.chart_alignment:
        ctx.warn(
            "chart_alignment",
            f"{spec.chart_type.value} charts have no orientation; value not encoded",
        )

    marks = spec.bars_or_data_points
    declared: list[tuple[str, str]] = []
    if marks is not None and marks.alignment in ("grouped", "stacked"):
        declared.append(("bars_or_data_points.alignment", marks.alignment))
    if spec.sub_chart_type in ("grouped", "stacked"):
        declared.append(("sub_chart_type", spec.sub_chart_type))
    if declared:
        ctx.group_mode = declared[0][1]  # bars_or_data_points wins on conflict
        if len({mode for _, mode in declared}) > 1:
            ctx.warn(
                "sub_chart_type",
                f"conflicts with bars_or_data_points.alignment; drawn {ctx.group_mode}",
            )
        if spec.chart_type is not ChartType.BAR:
            for path, _ in declared:
                ctx.warn(path, "only bar charts group or stack; drawn plain")
            ctx.group_mode = "simple"
        elif len(value_fields) < 2:
            for path, _ in declared:
                ctx.warn(path, f"{ctx.group_mode} layout needs >= 2 value columns; drawn plain")
            ctx.group_mode = "simple"

    ctx.use_series = spec.chart_type in _SERIES_TYPES and (
        len(value_fields) > 1 or spec.legend is not None
    )
    if spec.legend is not None and not ctx.legend_supported:
        ctx.warn("legend", f"no series channel on {spec.chart_type.value} charts")

    if marks is not None and marks.width is not None:
        ctx.width, ctx.width_path = marks.width, "bars_or_data_points.width"
    if spec.size_and_spacing is not None and spec.size_and_spacing.mark_width is not None:
        if ctx.width is None:
            ctx.width, ctx.width_path = (
                spec.size_and_spacing.mark_width,
                "size_and_spacing.mark_width",
            )
        elif spec.size_and_spacing.mark_width != ctx.width:
            ctx.warn("size_and_spacing.mark_width", "shadowed by bars_or_data_points.width")

    return ctx


def whisker_extent(ctx: EmitContext) -> float | str | None:
    """Canonical whisker rules: "1.5 IQR" and "min-max". Anything else is
    warned and drawn with the 1.5 IQR default."""
    style = ctx.spec.boxplot_style
    if style is None or style.whisker_rule is None:
        return None
    rule = style.whisker_rule
    if rule == "1.5 IQR":
        return 1.5
    if rule == "min-max":
        return "min-max"
    ctx.warn("boxplot_style.whisker_rule", f"unrecognized rule {rule!r}; drawn as 1.5 IQR")
    return 1.5
