"""Vega-Lite compilation of (design spec, data table) pairs.

Every supported design attribute maps to exactly one Vega-Lite construct
(the table lives in docs/backend_mappings.md), and
:func:`design_attrs_from_vegalite` walks those constructs back out of an
emitted document. Attributes a document cannot express are listed in the
result's warnings instead, so recovered attributes + warned attributes
always cover the normalized spec.
"""

from __future__ import annotations

import json
from typing import Any

from ..schema import ChartType
from .common import (
    SERIES_FIELD,
    VALUE_FIELD,
    Backend,
    EmitContext,
    EmitResult,
    build_context,
    whisker_extent,
)

SCHEMA_URL = "https://vega.github.io/schema/vega-lite/v6.json"

_MARKS = {
    ChartType.BAR: "bar",
    ChartType.LINE: "line",
    ChartType.AREA: "area",
    ChartType.SCATTER: "point",
    ChartType.PIE: "arc",
    ChartType.BOX: "boxplot",
    ChartType.HISTOGRAM: "bar",  # with bin=true on the value channel
}


def emit_vegalite(spec, table) -> EmitResult:
    """Compile to a self-contained Vega-Lite JSON document (inline data)."""
    ctx = build_context(spec, table)
    doc = _document(ctx)
    return EmitResult(
        backend=Backend.VEGALITE,
        content=json.dumps(doc, indent=2, ensure_ascii=False),
        warnings=tuple(ctx.warnings),
    )


def long_category_field(ctx: EmitContext) -> str:
    if ctx.category_field in (SERIES_FIELD, VALUE_FIELD):
        return "category"
    return ctx.category_field


def data_records(ctx: EmitContext) -> list[dict[str, Any]]:
    """Inline data in the shape the chart family consumes."""
    chart = ctx.spec.chart_type
    if chart is ChartType.SCATTER:
        (xf, xs), (yf, ys) = (
            (ctx.value_fields[0], ctx.series[ctx.value_fields[0]]),
            (ctx.value_fields[1], ctx.series[ctx.value_fields[1]]),
        )
        return [{xf: x, yf: y} for x, y in zip(xs, ys)]
    if chart is ChartType.HISTOGRAM:
        name, values = ctx.first_series
        return [{name: v} for v in values]
    if chart is ChartType.BOX:
        return [
            {SERIES_FIELD: name, VALUE_FIELD: v}
            for name in ctx.value_fields
            for v in ctx.series[name]
        ]
    if ctx.use_series:
        cat = long_category_field(ctx)
        return [
            {cat: c, SERIES_FIELD: name, VALUE_FIELD: v}
            for name in ctx.value_fields
            for c, v in zip(ctx.categories, ctx.series[name])
        ]
    name, values = ctx.first_series
    cat = ctx.category_field
    return [{cat: c, name: v} for c, v in zip(ctx.categories, values)]


def _title_block(ctx: EmitContext) -> dict[str, Any] | None:
    te = ctx.spec.text_elements
    if te.title is None and not te.annotations:
        return None
    block: dict[str, Any] = {"text": te.title or ""}
    if te.annotations:
        block["subtitle"] = list(te.annotations)
    return block


def _axis_block(ctx: EmitContext, displayed: str) -> dict[str, Any]:
    """Display-space axis options: label text plus grid-line tick counts.

    Horizontal grid lines belong to the displayed y axis, vertical ones to x.
    """
    te = ctx.spec.text_elements
    block: dict[str, Any] = {}
    label = te.x_axis_label if displayed == "x" else te.y_axis_label
    if label is not None:
        block["title"] = label
    if ctx.spec.grid_lines is not None:
        count = (
            ctx.spec.grid_lines.vertical
            if displayed == "x"
            else ctx.spec.grid_lines.horizontal
        )
        if count == 0:
            block["grid"] = False
        elif count is not None:
            block["grid"] = True
            block["tickCount"] = count
    return block


def _attach_axis_extras(ctx: EmitContext, enc: dict[str, Any]) -> None:
    """Axis labels, grid ticks, and declared scale domains onto x/y."""
    for displayed in ("x", "y"):
        channel = enc.get(displayed)
        if channel is None:
            te = ctx.spec.text_elements
            label = te.x_axis_label if displayed == "x" else te.y_axis_label
            if label is not None:
                ctx.warn(
                    f"text_elements.{displayed}_axis_label",
                    f"{ctx.spec.chart_type.value} charts draw no {displayed} axis",
                )
            continue
        axis = _axis_block(ctx, displayed)
        if axis:
            channel["axis"] = axis
        if ctx.spec.axes is None:
            continue
        declared = getattr(ctx.spec.axes, displayed)
        if declared is None:
            continue
        path = f"axes.{displayed}"
        if declared.kind == "categorical" and channel.get("type") == "nominal":
            channel.setdefault("scale", {})["domain"] = list(declared.categories)
        elif declared.kind == "numeric" and channel.get("type") == "quantitative":
            channel.setdefault("scale", {})["domain"] = [
                declared.range.min,
                declared.range.max,
            ]
        else:
            ctx.warn(path, f"declared {declared.kind} axis does not match the drawn channel")


def _attach_legend(ctx: EmitContext, color: dict[str, Any]) -> None:
    legend = ctx.spec.legend
    if legend is None:
        return
    if legend.visible and legend.position != "none":
        color["legend"] = {"orient": legend.position}
    else:
        color["legend"] = None
        if legend.visible and legend.position == "none":
            ctx.warn("legend.visible", "position 'none' hides the legend; reads back hidden")
        if not legend.visible and legend.position not in (None, "none"):
            ctx.warn("legend.position", "hidden legends carry no placement")
    if legend.labels:
        color.setdefault("scale", {})["domain"] = list(legend.labels)


def _mark_block(ctx: EmitContext) -> dict[str, Any]:
    chart = ctx.spec.chart_type
    mark: dict[str, Any] = {"type": _MARKS[chart]}
    if ctx.width is not None:
        if chart is ChartType.BAR:
            dim = "width" if ctx.orientation == "vertical" else "height"
            mark[dim] = {"band": ctx.width}
        else:
            ctx.warn(ctx.width_path, f"{chart.value} marks have no band width")
    if chart is ChartType.BOX:
        extent = whisker_extent(ctx)
        if extent is not None:
            mark["extent"] = extent
        style = ctx.spec.boxplot_style
        if style is not None:
            if style.outlier_marker_visible is not None:
                mark["outliers"] = style.outlier_marker_visible
            if style.mean_marker is not None:
                ctx.warn("boxplot_style.mean_marker", "no mean tick in this grammar")
    marks = ctx.spec.bars_or_data_points
    if marks is not None and marks.pattern in ("striped", "dotted"):
        ctx.warn("bars_or_data_points.pattern", f"no {marks.pattern} fill; drawn solid")
    return mark


def _spacing(ctx: EmitContext, enc: dict[str, Any], cat_channel: str) -> None:
    marks = ctx.spec.bars_or_data_points
    if marks is not None and marks.spacing is not None:
        spacing = marks.spacing
        if spacing > 1:
            ctx.warn("bars_or_data_points.spacing", "band padding saturates at 1")
            spacing = 1.0
        enc[cat_channel].setdefault("scale", {})["paddingInner"] = spacing
    sizing = ctx.spec.size_and_spacing
    if sizing is not None and sizing.intra_group_spacing is not None:
        offset = "xOffset" if cat_channel == "x" else "yOffset"
        if ctx.group_mode == "grouped" and offset in enc:
            enc[offset].setdefault("scale", {})["paddingInner"] = min(
                sizing.intra_group_spacing, 1.0
            )
            if sizing.intra_group_spacing > 1:
                ctx.warn("size_and_spacing.intra_group_spacing", "band padding saturates at 1")
        else:
            ctx.warn(
                "size_and_spacing.intra_group_spacing", "only grouped bars have within-group slots"
            )


def _document(ctx: EmitContext) -> dict[str, Any]:
    chart = ctx.spec.chart_type
    cat_channel = "x" if ctx.orientation == "vertical" else "y"
    val_channel = "y" if ctx.orientation == "vertical" else "x"
    enc: dict[str, Any] = {}
    color: dict[str, Any] | None = None

    if chart is ChartType.SCATTER:
        enc["x"] = {"field": ctx.value_fields[0], "type": "quantitative"}
        enc["y"] = {"field": ctx.value_fields[1], "type": "quantitative"}
    elif chart is ChartType.HISTOGRAM:
        enc[cat_channel] = {"field": ctx.first_series[0], "type": "quantitative", "bin": True}
        enc[val_channel] = {"aggregate": "count", "type": "quantitative"}
    elif chart is ChartType.PIE:
        enc["theta"] = {"field": ctx.first_series[0], "type": "quantitative"}
        color = {"field": ctx.category_field, "type": "nominal"}
    elif chart is ChartType.BOX:
        enc[cat_channel] = {"field": SERIES_FIELD, "type": "nominal"}
        enc[val_channel] = {"field": VALUE_FIELD, "type": "quantitative"}
        if ctx.spec.legend is not None:
            color = {"field": SERIES_FIELD, "type": "nominal"}
    else:  # bar, line, area
        enc[cat_channel] = {
            "field": long_category_field(ctx) if ctx.use_series else ctx.category_field,
            "type": "nominal",
        }
        if ctx.use_series:
            enc[val_channel] = {"field": VALUE_FIELD, "type": "quantitative"}
            color = {"field": SERIES_FIELD, "type": "nominal"}
            if ctx.group_mode == "grouped":
                enc["xOffset" if cat_channel == "x" else "yOffset"] = {"field": SERIES_FIELD}
            elif ctx.group_mode == "stacked":
                enc[val_channel]["stack"] = "zero"
            elif chart in (ChartType.BAR, ChartType.AREA):
                enc[val_channel]["stack"] = None
        else:
            enc[val_channel] = {"field": ctx.first_series[0], "type": "quantitative"}

    if color is not None:
        _attach_legend(ctx, color)
        enc["color"] = color

    _attach_axis_extras(ctx, enc)
    if chart in (ChartType.BAR, ChartType.BOX):
        _spacing(ctx, enc, cat_channel)

    doc: dict[str, Any] = {"$schema": SCHEMA_URL}
    title = _title_block(ctx)
    if title is not None:
        doc["title"] = title
    doc["data"] = {"values": data_records(ctx)}
    doc["mark"] = _mark_block(ctx)
    doc["encoding"] = enc
    return doc


# --------------------------------------------------------------------------
# Reverse mapping


def design_attrs_from_vegalite(content: str) -> dict[str, Any]:
    """Read design attributes back out of an emitted document.

    Returns a flat {attribute path: value} mapping covering every attribute
    the document encodes; emission warnings name exactly the attributes that
    are absent here.
    """
    doc = json.loads(content)
    enc: dict[str, Any] = doc.get("encoding", {})
    mark = doc.get("mark", "")
    mark_type = mark.get("type") if isinstance(mark, dict) else mark
    binned = any(
        isinstance(enc.get(ch), dict) and enc[ch].get("bin") for ch in ("x", "y")
    )
    attrs: dict[str, Any] = {}

    if mark_type == "arc":
        chart = "pie"
    elif mark_type == "boxplot":
        chart = "box"
    elif mark_type == "point":
        chart = "scatter"
    elif mark_type == "bar" and binned:
        chart = "histogram"
    else:
        chart = mark_type
    attrs["chart_type"] = chart

    x_type = enc.get("x", {}).get("type") if isinstance(enc.get("x"), dict) else None
    y_type = enc.get("y", {}).get("type") if isinstance(enc.get("y"), dict) else None
    orientation = None
    if chart == "histogram":
        orientation = "vertical" if enc.get("x", {}).get("bin") else "horizontal"
    elif x_type == "nominal":
        orientation = "vertical"
    elif y_type == "nominal":
        orientation = "horizontal"
    if orientation and chart not in ("pie", "scatter"):
        attrs["chart_alignment"] = orientation

    title = doc.get("title")
    if isinstance(title, str) and title:
        attrs["text_elements.title"] = title
    elif isinstance(title, dict):
        if title.get("text"):
            attrs["text_elements.title"] = title["text"]
        for i, note in enumerate(title.get("subtitle", [])):
            attrs[f"text_elements.annotations.{i}"] = note

    for ch, label_path, grid_path in (
        ("x", "text_elements.x_axis_label", "grid_lines.vertical"),
        ("y", "text_elements.y_axis_label", "grid_lines.horizontal"),
    ):
        channel = enc.get(ch)
        if not isinstance(channel, dict):
            continue
        axis = channel.get("axis")
        if isinstance(axis, dict):
            if "title" in axis:
                attrs[label_path] = axis["title"]
            if axis.get("grid") is False:
                attrs[grid_path] = 0
            elif "tickCount" in axis:
                attrs[grid_path] = axis["tickCount"]
        scale = channel.get("scale")
        domain = scale.get("domain") if isinstance(scale, dict) else None
        if domain:
            if channel.get("type") == "nominal":
                attrs[f"axes.{ch}.kind"] = "categorical"
                for i, category in enumerate(domain):
                    attrs[f"axes.{ch}.categories.{i}"] = category
            elif channel.get("type") == "quantitative" and len(domain) == 2:
                attrs[f"axes.{ch}.kind"] = "numeric"
                attrs[f"axes.{ch}.range.min"] = domain[0]
                attrs[f"axes.{ch}.range.max"] = domain[1]

    color = enc.get("color")
    if isinstance(color, dict):
        if "legend" in color:
            legend = color["legend"]
            if legend is None:
                attrs["legend.visible"] = False
                attrs["legend.position"] = "none"
            elif isinstance(legend, dict) and "orient" in legend:
                attrs["legend.visible"] = True
                attrs["legend.position"] = legend["orient"]
        domain = color.get("scale", {}).get("domain")
        if domain:
            for i, label in enumerate(domain):
                attrs[f"legend.labels.{i}"] = label

    if chart == "bar":
        if "xOffset" in enc or "yOffset" in enc:
            mode = "grouped"
        else:
            val_channel = "y" if orientation != "horizontal" else "x"
            stacked = isinstance(enc.get(val_channel), dict) and enc[val_channel].get(
                "stack"
            ) == "zero"
            mode = "stacked" if stacked else "simple"
        attrs["sub_chart_type"] = mode
        if mode != "simple":
            attrs["bars_or_data_points.alignment"] = mode
    else:
        attrs["sub_chart_type"] = "simple"

    if isinstance(mark, dict):
        for dim in ("width", "height"):
            block = mark.get(dim)
            if isinstance(block, dict) and "band" in block:
                attrs["bars_or_data_points.width"] = block["band"]
                attrs["size_and_spacing.mark_width"] = block["band"]
        if mark_type == "boxplot":
            extent = mark.get("extent")
            if extent == 1.5:
                attrs["boxplot_style.whisker_rule"] = "1.5 IQR"
            elif extent == "min-max":
                attrs["boxplot_style.whisker_rule"] = "min-max"
            if "outliers" in mark:
                attrs["boxplot_style.outlier_marker_visible"] = mark["outliers"]

    if chart in ("bar", "box", "histogram"):
        attrs["bars_or_data_points.pattern"] = "solid"

    for ch in ("x", "y"):
        channel = enc.get(ch)
        if isinstance(channel, dict) and channel.get("type") == "nominal":
            padding = channel.get("scale", {}).get("paddingInner")
            if padding is not None:
                attrs["bars_or_data_points.spacing"] = padding
    for ch in ("xOffset", "yOffset"):
        channel = enc.get(ch)
        if isinstance(channel, dict):
            padding = channel.get("scale", {}).get("paddingInner")
            if padding is not None:
                attrs["size_and_spacing.intra_group_spacing"] = padding

    return attrs
