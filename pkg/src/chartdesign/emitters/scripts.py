"""Self-contained plotting scripts for matplotlib, ggplot2, and altair.

Each script embeds its data inline and builds the chart with the constructs
listed in docs/backend_mappings.md, one construct per design attribute.
Output is a pure function of (spec, table, backend): no timestamps, no
environment lookups. The toolkit never executes the scripts it emits.
"""

from __future__ import annotations

import json

from ..schema import ChartType
from .common import (
    Backend,
    EmitContext,
    EmitResult,
    build_context,
    whisker_extent,
)
from .vegalite import long_category_field

_MPL_LEGEND_LOC = {
    "top": "upper center",
    "bottom": "lower center",
    "left": "center left",
    "right": "center right",
}


def emit_script(spec, table, backend: Backend) -> EmitResult:
    """Compile to a plotting script for one of the script backends."""
    backend = Backend(backend)
    renderers = {
        Backend.MATPLOTLIB: _matplotlib_script,
        Backend.GGPLOT2: _ggplot_script,
        Backend.ALTAIR: _altair_script,
    }
    if backend not in renderers:
        raise ValueError(f"emit_script does not handle backend {backend.value!r}")
    ctx = build_context(spec, table)
    content = renderers[backend](ctx)
    return EmitResult(backend=backend, content=content, warnings=tuple(ctx.warnings))


# --------------------------------------------------------------------------
# Literal rendering


def _py_num(v) -> str:
    if v is None:
        return 'float("nan")'
    return repr(v)


def _py_nums(values) -> str:
    return "[" + ", ".join(_py_num(v) for v in values) + "]"


def _py_strs(values) -> str:
    return "[" + ", ".join(repr(v) for v in values) + "]"


def _r_num(v) -> str:
    if v is None:
        return "NA"
    return repr(v)


def _r_vec_num(values) -> str:
    return "c(" + ", ".join(_r_num(v) for v in values) + ")"


def _r_vec_str(values) -> str:
    return "c(" + ", ".join(json.dumps(v) for v in values) + ")"


# --------------------------------------------------------------------------
# matplotlib


def _matplotlib_script(ctx: EmitContext) -> str:
    spec = ctx.spec
    chart = spec.chart_type
    horizontal = ctx.orientation == "horizontal"
    marks = spec.bars_or_data_points
    L: list[str] = ["import matplotlib.pyplot as plt"]
    if spec.grid_lines is not None:
        L.append("from matplotlib.ticker import MaxNLocator")
    L.append("")

    if chart is ChartType.SCATTER:
        L.append(f"xs = {_py_nums(ctx.series[ctx.value_fields[0]])}")
        L.append(f"ys = {_py_nums(ctx.series[ctx.value_fields[1]])}")
    elif chart is ChartType.HISTOGRAM:
        L.append(f"values = {_py_nums(ctx.first_series[1])}")
    elif chart is ChartType.BOX:
        L.append("groups = {")
        for name in ctx.value_fields:
            L.append(f"    {name!r}: {_py_nums(ctx.series[name])},")
        L.append("}")
    else:
        L.append(f"categories = {_py_strs(ctx.categories)}")
        L.append("series = {")
        for name in ctx.value_fields:
            L.append(f"    {name!r}: {_py_nums(ctx.series[name])},")
        L.append("}")
    L += ["", "fig, ax = plt.subplots(figsize=(8, 5))"]

    if chart in (ChartType.BAR, ChartType.LINE, ChartType.AREA):
        spacing = marks.spacing if marks is not None and marks.spacing is not None else None
        if chart is ChartType.BAR and spacing is not None:
            L.append(f"step = 1 + {spacing!r}  # category slot stride")
            L.append("positions = [i * step for i in range(len(categories))]")
        else:
            L.append("positions = list(range(len(categories)))")

    hatch = ""
    if marks is not None and marks.pattern == "striped":
        hatch = ', hatch="//"'
    elif marks is not None and marks.pattern == "dotted":
        hatch = ', hatch=".."'

    if chart is ChartType.BAR:
        width = ctx.width if ctx.width is not None else 0.8
        bar_fn, thickness = ("ax.barh", "height") if horizontal else ("ax.bar", "width")
        if ctx.group_mode == "grouped":
            intra = (
                spec.size_and_spacing.intra_group_spacing
                if spec.size_and_spacing is not None
                and spec.size_and_spacing.intra_group_spacing is not None
                else 0.0
            )
            L.append(f"group_width = {width!r}")
            L.append(f"slot = group_width / len(series) * (1 + {intra!r})")
            L.append("for i, (name, values) in enumerate(series.items()):")
            L.append("    offset = (i - (len(series) - 1) / 2) * slot")
            L.append(
                f"    {bar_fn}([p + offset for p in positions], values, "
                f"{thickness}=group_width / len(series), label=name{hatch})"
            )
        elif ctx.group_mode == "stacked":
            base_kw = "left" if horizontal else "bottom"
            L.append("base = [0.0] * len(categories)")
            L.append("for name, values in series.items():")
            L.append(
                f"    {bar_fn}(positions, values, {thickness}={width!r}, "
                f"{base_kw}=base, label=name{hatch})"
            )
            L.append("    base = [b + v for b, v in zip(base, values)]")
        else:
            L.append("for name, values in series.items():")
            L.append(
                f"    {bar_fn}(positions, values, {thickness}={width!r}, label=name{hatch})"
            )
    elif chart is ChartType.LINE:
        if horizontal:
            L.append("for name, values in series.items():")
            L.append('    ax.plot(values, positions, marker="o", label=name)')
        else:
            L.append("for name, values in series.items():")
            L.append('    ax.plot(positions, values, marker="o", label=name)')
    elif chart is ChartType.AREA:
        fill_fn = "ax.fill_betweenx" if horizontal else "ax.fill_between"
        L.append("for name, values in series.items():")
        L.append(f"    {fill_fn}(positions, values, alpha=0.6, label=name)")
    elif chart is ChartType.SCATTER:
        L.append("ax.scatter(xs, ys)")
    elif chart is ChartType.PIE:
        name = ctx.first_series[0]
        L.append(f"ax.pie(series[{name!r}], labels=categories)")
    elif chart is ChartType.BOX:
        extent = whisker_extent(ctx)
        opts = []
        if extent == 1.5:
            opts.append("whis=1.5")
        elif extent == "min-max":
            opts.append("whis=(0, 100)")
        style = spec.boxplot_style
        if style is not None and style.outlier_marker_visible is not None:
            opts.append(f"showfliers={style.outlier_marker_visible}")
        if style is not None and style.mean_marker is not None:
            opts.append(f"showmeans={style.mean_marker}")
        if spec.size_and_spacing is not None and spec.size_and_spacing.mark_width is not None:
            opts.append(f"widths={spec.size_and_spacing.mark_width!r}")
        if horizontal:
            opts.insert(0, 'orientation="horizontal"')
        joined = (", " + ", ".join(opts)) if opts else ""
        L.append("names = list(groups)")
        L.append(f"ax.boxplot([groups[n] for n in names], tick_labels=names{joined})")
    else:  # histogram
        orient = ', orientation="horizontal"' if horizontal else ""
        L.append(f"ax.hist(values, bins=10{orient})")

    if chart in (ChartType.BAR, ChartType.LINE, ChartType.AREA):
        tick_fn = "ax.set_yticks" if horizontal else "ax.set_xticks"
        L.append(f"{tick_fn}(positions, categories)")

    te = spec.text_elements
    L.append("")
    if te.title is not None:
        L.append(f"ax.set_title({te.title!r})")
    if chart is ChartType.PIE:
        for name in ("x_axis_label", "y_axis_label"):
            if getattr(te, name) is not None:
                ctx.warn(f"text_elements.{name}", "pie charts draw no axes")
    else:
        if te.x_axis_label is not None:
            L.append(f"ax.set_xlabel({te.x_axis_label!r})")
        if te.y_axis_label is not None:
            L.append(f"ax.set_ylabel({te.y_axis_label!r})")
    for i, note in enumerate(te.annotations or ()):
        L.append(f"fig.text(0.01, {0.01 + 0.05 * i:.2f}, {note!r}, fontsize=8)")

    if spec.grid_lines is not None:
        for count, axis_name in (
            (spec.grid_lines.horizontal, "y"),
            (spec.grid_lines.vertical, "x"),
        ):
            if count is None:
                continue
            if count == 0:
                L.append(f'ax.grid(False, axis="{axis_name}")')
            else:
                L.append(f"ax.{axis_name}axis.set_major_locator(MaxNLocator({count}))")
                L.append(f'ax.grid(True, axis="{axis_name}")')

    if spec.axes is not None:
        if chart in (ChartType.BAR, ChartType.LINE, ChartType.AREA, ChartType.BOX):
            cat_axis = "y" if horizontal else "x"
        else:
            cat_axis = None
        for axis_name in ("x", "y"):
            declared = getattr(spec.axes, axis_name)
            if declared is None:
                continue
            if declared.kind == "categorical" and declared.categories:
                if axis_name != cat_axis:
                    ctx.warn(
                        f"axes.{axis_name}",
                        "declared categorical axis does not match the drawn channel",
                    )
                    continue
                L.append(f"{axis_name}_categories = {_py_strs(list(declared.categories))}")
                slots = (
                    f"list(range(1, len({axis_name}_categories) + 1))"
                    if chart is ChartType.BOX
                    else f"positions[:len({axis_name}_categories)]"
                )
                L.append(f"ax.set_{axis_name}ticks({slots}, {axis_name}_categories)")
            elif declared.kind == "numeric" and declared.range is not None:
                L.append(
                    f"ax.set_{axis_name}lim({declared.range.min!r}, {declared.range.max!r})"
                )

    legend = spec.legend
    if legend is not None and ctx.legend_supported:
        if legend.visible and legend.position in _MPL_LEGEND_LOC:
            loc = _MPL_LEGEND_LOC[legend.position]
            if legend.labels:
                L.append(f"ax.legend({_py_strs(list(legend.labels))}, loc={loc!r})")
            else:
                L.append(f"ax.legend(loc={loc!r})")

    L += ["", "fig.tight_layout()", 'fig.savefig("chart.png", dpi=150)']
    return "\n".join(L) + "\n"


# --------------------------------------------------------------------------
# ggplot2


def _r_long_frame(ctx: EmitContext) -> tuple[list[str], str]:
    cat = long_category_field(ctx)
    cats, names, values = [], [], []
    for name in ctx.value_fields:
        for c, v in zip(ctx.categories, ctx.series[name]):
            cats.append(c)
            names.append(name)
            values.append(v)
    lines = [
        "df <- data.frame(",
        f"  {cat} = {_r_vec_str(cats)},",
        f"  series = {_r_vec_str(names)},",
        f"  value = {_r_vec_num(values)}",
        ")",
    ]
    return lines, cat


def _ggplot_script(ctx: EmitContext) -> str:
    spec = ctx.spec
    chart = spec.chart_type
    marks = spec.bars_or_data_points
    L: list[str] = ["library(ggplot2)", ""]
    aes = ""
    geoms: list[str] = []
    fill_scale = None  # "fill" or "colour" when a series scale exists

    if chart is ChartType.SCATTER:
        xf, yf = ctx.value_fields[:2]
        L += [
            "df <- data.frame(",
            f"  x = {_r_vec_num(ctx.series[xf])},",
            f"  y = {_r_vec_num(ctx.series[yf])}",
            ")",
        ]
        aes = "aes(x = x, y = y)"
        geoms.append("geom_point()")
    elif chart is ChartType.HISTOGRAM:
        L += ["df <- data.frame(", f"  value = {_r_vec_num(ctx.first_series[1])}", ")"]
        aes = "aes(x = value)"
        geoms.append("geom_histogram(bins = 10)")
    elif chart is ChartType.BOX:
        names = [n for n in ctx.value_fields for _ in ctx.series[n]]
        values = [v for n in ctx.value_fields for v in ctx.series[n]]
        L += [
            "df <- data.frame(",
            f"  group = {_r_vec_str(names)},",
            f"  value = {_r_vec_num(values)}",
            ")",
        ]
        L.append("df$group <- factor(df$group, levels = unique(df$group))")
        aes = "aes(x = group, y = value, fill = group)" if spec.legend else "aes(x = group, y = value)"
        opts = []
        extent = whisker_extent(ctx)
        if extent == 1.5:
            opts.append("coef = 1.5")
        elif extent == "min-max":
            opts.append("coef = Inf")
        style = spec.boxplot_style
        if style is not None and style.outlier_marker_visible is False:
            opts.append("outlier.shape = NA")
        if spec.size_and_spacing is not None and spec.size_and_spacing.mark_width is not None:
            opts.append(f"width = {spec.size_and_spacing.mark_width!r}")
        geoms.append(f"geom_boxplot({', '.join(opts)})")
        if style is not None and style.mean_marker:
            geoms.append('stat_summary(fun = mean, geom = "point", shape = 18, size = 3)')
        if spec.legend:
            fill_scale = "fill"
    elif chart is ChartType.PIE:
        name = ctx.first_series[0]
        L += [
            "df <- data.frame(",
            f"  category = {_r_vec_str(ctx.categories)},",
            f"  value = {_r_vec_num(ctx.series[name])}",
            ")",
        ]
        L.append("df$category <- factor(df$category, levels = unique(df$category))")
        aes = 'aes(x = "", y = value, fill = category)'
        geoms.append("geom_col(width = 1)")
        geoms.append('coord_polar("y")')
        fill_scale = "fill"
    else:  # bar, line, area over the long frame
        frame_lines, cat = _r_long_frame(ctx)
        L += frame_lines
        L.append(f"df${cat} <- factor(df${cat}, levels = unique(df${cat}))")
        channel = "colour" if chart is ChartType.LINE else "fill"
        if ctx.use_series:
            aes = f"aes(x = {cat}, y = value, {channel} = series, group = series)"
            fill_scale = channel
        else:
            aes = f"aes(x = {cat}, y = value, group = 1)"
        if chart is ChartType.BAR:
            opts = []
            if ctx.group_mode == "grouped":
                width = ctx.width if ctx.width is not None else 0.8
                intra = (
                    spec.size_and_spacing.intra_group_spacing
                    if spec.size_and_spacing is not None
                    and spec.size_and_spacing.intra_group_spacing is not None
                    else None
                )
                if intra is not None:
                    opts.append(f"position = position_dodge(width = {width * (1 + intra)!r})")
                else:
                    opts.append("position = position_dodge()")
            elif ctx.group_mode == "stacked":
                opts.append('position = "stack"')
            elif ctx.use_series:
                opts.append('position = "identity"')
            if ctx.width is not None:
                opts.append(f"width = {ctx.width!r}")
            geoms.append(f"geom_col({', '.join(opts)})")
            if marks is not None and marks.spacing is not None:
                ctx.warn(
                    "bars_or_data_points.spacing",
                    "no independent inter-bar gap control in this grammar",
                )
        elif chart is ChartType.LINE:
            geoms.append("geom_line()")
            geoms.append("geom_point()")
        else:
            geoms.append('geom_area(alpha = 0.6, position = "identity")')

    if marks is not None and marks.pattern in ("striped", "dotted"):
        ctx.warn("bars_or_data_points.pattern", f"no {marks.pattern} fill; drawn solid")

    if ctx.orientation == "horizontal" and chart not in (ChartType.PIE, ChartType.SCATTER):
        geoms.append("coord_flip()")

    te = spec.text_elements
    labs = []
    if te.title is not None:
        labs.append(f"title = {json.dumps(te.title)}")
    if chart is ChartType.PIE:
        for name in ("x_axis_label", "y_axis_label"):
            if getattr(te, name) is not None:
                ctx.warn(f"text_elements.{name}", "pie charts draw no axes")
    else:
        if te.x_axis_label is not None:
            labs.append(f"x = {json.dumps(te.x_axis_label)}")
        if te.y_axis_label is not None:
            labs.append(f"y = {json.dumps(te.y_axis_label)}")
    if te.annotations:
        labs.append(f"caption = {json.dumps('; '.join(te.annotations))}")
    if labs:
        geoms.append(f"labs({', '.join(labs)})")

    if spec.grid_lines is not None:
        h, v = spec.grid_lines.horizontal, spec.grid_lines.vertical
        if h is not None:
            if h == 0:
                geoms.append("theme(panel.grid.major.y = element_blank())")
            else:
                geoms.append(f"scale_y_continuous(n.breaks = {h})")
        if v is not None:
            if v == 0:
                geoms.append("theme(panel.grid.major.x = element_blank())")
            elif chart in (ChartType.SCATTER, ChartType.HISTOGRAM):
                geoms.append(f"scale_x_continuous(n.breaks = {v})")
            else:
                ctx.warn(
                    "grid_lines.vertical", "discrete axis draws one grid line per category"
                )

    if spec.axes is not None:
        for axis_name, limits in (("x", "xlim"), ("y", "ylim")):
            declared = getattr(spec.axes, axis_name)
            if declared is None:
                continue
            if declared.kind == "numeric" and declared.range is not None:
                geoms.append(
                    f"coord_cartesian({limits} = c({declared.range.min!r}, {declared.range.max!r}))"
                )
            elif declared.kind == "categorical" and declared.categories:
                geoms.append(
                    f"scale_{axis_name}_discrete(limits = {_r_vec_str(list(declared.categories))})"
                )

    legend = spec.legend
    if legend is not None and ctx.legend_supported:
        position = legend.position if legend.visible and legend.position != "none" else "none"
        geoms.append(f"theme(legend.position = {json.dumps(position)})")
        if legend.labels and fill_scale is not None:
            geoms.append(
                f"scale_{fill_scale}_discrete(labels = {_r_vec_str(list(legend.labels))})"
            )

    L.append("")
    L.append(f"p <- ggplot(df, {aes}) +")
    for i, geom in enumerate(geoms):
        sep = " +" if i < len(geoms) - 1 else ""
        L.append(f"  {geom}{sep}")
    L += ["", 'ggsave("chart.png", p, width = 8, height = 5)']
    return "\n".join(L) + "\n"


# --------------------------------------------------------------------------
# altair


def _alt_axis(ctx: EmitContext, displayed: str) -> tuple[str | None, str | None]:
    """(title kwarg, axis kwarg) for the displayed channel, or Nones."""
    te = ctx.spec.text_elements
    label = te.x_axis_label if displayed == "x" else te.y_axis_label
    title = f"title={label!r}" if label is not None else None
    axis = None
    if ctx.spec.grid_lines is not None:
        count = (
            ctx.spec.grid_lines.vertical if displayed == "x" else ctx.spec.grid_lines.horizontal
        )
        if count == 0:
            axis = "axis=alt.Axis(grid=False)"
        elif count is not None:
            axis = f"axis=alt.Axis(grid=True, tickCount={count})"
    return title, axis


def _alt_scale(ctx: EmitContext, displayed: str, channel_type: str) -> str | None:
    parts = []
    if ctx.spec.axes is not None:
        declared = getattr(ctx.spec.axes, displayed)
        if declared is not None:
            if declared.kind == "categorical" and channel_type == "N" and declared.categories:
                parts.append(f"domain={_py_strs(list(declared.categories))}")
            elif declared.kind == "numeric" and channel_type == "Q" and declared.range is not None:
                parts.append(f"domain=[{declared.range.min!r}, {declared.range.max!r}]")
    marks = ctx.spec.bars_or_data_points
    if (
        channel_type == "N"
        and ctx.spec.chart_type in (ChartType.BAR, ChartType.BOX)
        and marks is not None
        and marks.spacing is not None
    ):
        parts.append(f"paddingInner={min(marks.spacing, 1.0)!r}")
    if not parts:
        return None
    return f"scale=alt.Scale({', '.join(parts)})"


def _alt_channel(name: str, shorthand: str, *opts: str | None) -> str:
    args = ", ".join([repr(shorthand)] + [o for o in opts if o])
    return f"{name}=alt.{name.capitalize()}({args})"


def _altair_script(ctx: EmitContext) -> str:
    spec = ctx.spec
    chart = spec.chart_type
    marks = spec.bars_or_data_points
    horizontal = ctx.orientation == "horizontal"
    cat_ch, val_ch = ("y", "x") if horizontal else ("x", "y")
    L: list[str] = ["import altair as alt", "import pandas as pd", ""]

    columns: dict[str, list] = {}
    if chart is ChartType.SCATTER:
        xf, yf = ctx.value_fields[:2]
        columns = {xf: ctx.series[xf], yf: ctx.series[yf]}
    elif chart is ChartType.HISTOGRAM:
        columns = {ctx.first_series[0]: ctx.first_series[1]}
    elif chart is ChartType.BOX:
        columns = {
            "series": [n for n in ctx.value_fields for _ in ctx.series[n]],
            "value": [v for n in ctx.value_fields for v in ctx.series[n]],
        }
    elif ctx.use_series:
        cat = long_category_field(ctx)
        columns = {
            cat: [c for _ in ctx.value_fields for c in ctx.categories],
            "series": [n for n in ctx.value_fields for _ in ctx.categories],
            "value": [v for n in ctx.value_fields for v in ctx.series[n]],
        }
    else:
        name, values = ctx.first_series
        columns = {ctx.category_field: ctx.categories, name: values}
    L.append("df = pd.DataFrame({")
    for key, values in columns.items():
        rendered = _py_strs(values) if values and isinstance(values[0], str) else (
            "[" + ", ".join("None" if v is None else repr(v) for v in values) + "]"
        )
        L.append(f"    {key!r}: {rendered},")
    L.append("})")
    L.append("")

    mark_opts = []
    if ctx.width is not None:
        if chart is ChartType.BAR:
            dim = "height" if horizontal else "width"
            mark_opts.append(f"{dim}=alt.RelativeBandSize({ctx.width!r})")
        else:
            ctx.warn(ctx.width_path, f"{chart.value} marks have no band width")
    if chart is ChartType.BOX:
        extent = whisker_extent(ctx)
        if extent is not None:
            mark_opts.append(f"extent={extent!r}")
        style = spec.boxplot_style
        if style is not None and style.outlier_marker_visible is not None:
            mark_opts.append(f"outliers={style.outlier_marker_visible}")
        if style is not None and style.mean_marker is not None:
            ctx.warn("boxplot_style.mean_marker", "no mean tick in this grammar")
    if marks is not None and marks.pattern in ("striped", "dotted"):
        ctx.warn("bars_or_data_points.pattern", f"no {marks.pattern} fill; drawn solid")

    mark_method = {
        ChartType.BAR: "mark_bar",
        ChartType.LINE: "mark_line",
        ChartType.AREA: "mark_area",
        ChartType.SCATTER: "mark_point",
        ChartType.PIE: "mark_arc",
        ChartType.BOX: "mark_boxplot",
        ChartType.HISTOGRAM: "mark_bar",
    }[chart]

    channels: list[str] = []
    color_parts: list[str] | None = None
    if chart is ChartType.SCATTER:
        xf, yf = ctx.value_fields[:2]
        channels.append(_alt_channel("x", f"{xf}:Q", *_alt_axis(ctx, "x"), _alt_scale(ctx, "x", "Q")))
        channels.append(_alt_channel("y", f"{yf}:Q", *_alt_axis(ctx, "y"), _alt_scale(ctx, "y", "Q")))
    elif chart is ChartType.HISTOGRAM:
        name = ctx.first_series[0]
        channels.append(
            _alt_channel(
                cat_ch, f"{name}:Q", "bin=True", *_alt_axis(ctx, cat_ch), _alt_scale(ctx, cat_ch, "Q")
            )
        )
        channels.append(_alt_channel(val_ch, "count():Q", *_alt_axis(ctx, val_ch)))
    elif chart is ChartType.PIE:
        name = ctx.first_series[0]
        channels.append(f"theta=alt.Theta({name!r}, type='quantitative')")
        color_parts = [repr(f"{ctx.category_field}:N")]
    elif chart is ChartType.BOX:
        channels.append(
            _alt_channel(cat_ch, "series:N", *_alt_axis(ctx, cat_ch), _alt_scale(ctx, cat_ch, "N"))
        )
        channels.append(
            _alt_channel(val_ch, "value:Q", *_alt_axis(ctx, val_ch), _alt_scale(ctx, val_ch, "Q"))
        )
        if spec.legend is not None:
            color_parts = ["'series:N'"]
    else:
        cat = long_category_field(ctx) if ctx.use_series else ctx.category_field
        value = "value" if ctx.use_series else ctx.first_series[0]
        stack = None
        if ctx.use_series:
            color_parts = ["'series:N'"]
            if ctx.group_mode == "grouped":
                intra = None
                if (
                    spec.size_and_spacing is not None
                    and spec.size_and_spacing.intra_group_spacing is not None
                ):
                    intra = min(spec.size_and_spacing.intra_group_spacing, 1.0)
                offset_scale = (
                    f", scale=alt.Scale(paddingInner={intra!r})" if intra is not None else ""
                )
                offset_name = "yOffset" if horizontal else "xOffset"
                channels.append(f"{offset_name}=alt.{offset_name[0].upper()}{offset_name[1:]}('series:N'{offset_scale})")
            elif ctx.group_mode == "stacked":
                stack = "stack='zero'"
            elif chart in (ChartType.BAR, ChartType.AREA):
                stack = "stack=None"
        channels.insert(
            0, _alt_channel(cat_ch, f"{cat}:N", *_alt_axis(ctx, cat_ch), _alt_scale(ctx, cat_ch, "N"))
        )
        channels.insert(
            1,
            _alt_channel(
                val_ch, f"{value}:Q", stack, *_alt_axis(ctx, val_ch), _alt_scale(ctx, val_ch, "Q")
            ),
        )

    legend = spec.legend
    if color_parts is not None and legend is not None:
        if legend.visible and legend.position != "none":
            color_parts.append(f"legend=alt.Legend(orient={legend.position!r})")
        else:
            color_parts.append("legend=None")
        if legend.labels:
            color_parts.append(f"scale=alt.Scale(domain={_py_strs(list(legend.labels))})")
    if color_parts is not None:
        channels.append(f"color=alt.Color({', '.join(color_parts)})")

    te = spec.text_elements
    if chart is ChartType.PIE:
        for name in ("x_axis_label", "y_axis_label"):
            if getattr(te, name) is not None:
                ctx.warn(f"text_elements.{name}", "pie charts draw no axes")

    L.append("chart = (")
    L.append("    alt.Chart(df)")
    L.append(f"    .{mark_method}({', '.join(mark_opts)})")
    L.append("    .encode(")
    for channel in channels:
        L.append(f"        {channel},")
    L.append("    )")
    if te.title is not None or te.annotations:
        title_args = [repr(te.title or "")]
        if te.annotations:
            title_args.append(f"subtitle={_py_strs(list(te.annotations))}")
        L.append(f"    .properties(title=alt.Title({', '.join(title_args)}))")
    L.append(")")
    L += ["", 'chart.save("chart.html")']
    return "\n".join(L) + "\n"
