"""Multi-chart CSV bundles: parsing, column typing, perturbations, masking.

A bundle is a UTF-8 CSV document that may contain several tables, each
introduced by a ``Chart <n>:`` label line. Blank lines are tolerated
anywhere. Cells are typed on parse: finite numbers become int/float,
blank fields become the empty cell (None), everything else stays text.

All randomized transforms draw from NumPy's PCG64 generator
(``numpy.random.default_rng(seed)``), so a given (input, seed) pair always
produces byte-identical output.
"""

from __future__ import annotations

import csv
import io
import math
import re
import warnings
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

Cell = int | float | str | None

MASK_TOKEN = "<MASKED>"

_LABEL_RE = re.compile(r"^\s*Chart\s+(\d+)\s*:\s*(.*)$", re.IGNORECASE)
_INT_RE = re.compile(r"[+-]?\d+")
_TEMPORAL_HEADER_RE = re.compile(
    r"(?i)\b(year|date|month|day|time|quarter|week|period)\b"
)
_DATE_VALUE_RE = re.compile(r"^\s*(\d{4}-\d{1,2}-\d{1,2}|\d{1,2}/\d{1,2}/\d{2,4})\s*$")
_MONTHS = {
    "jan", "feb", "mar", "apr", "may", "jun", "jul", "aug", "sep", "oct", "nov", "dec",
    "january", "february", "march", "april", "june", "july", "august", "september",
    "october", "november", "december",
}


class TableError(ValueError):
    """A bundle or table operation could not proceed."""


class TableWarning(UserWarning):
    """A recoverable irregularity in a CSV bundle (ragged row, missing header)."""


class ColumnKind(str, Enum):
    NUMERIC = "numeric"
    CATEGORICAL = "categorical"
    TEMPORAL = "temporal"


@dataclass(frozen=True)
class DataTable:
    """One parsed table. ``headers`` is empty only for headerless tables."""

    name: str | None
    headers: tuple[str, ...]
    rows: tuple[tuple[Cell, ...], ...]
    headerless: bool = False

    @property
    def width(self) -> int:
        if self.headers:
            return len(self.headers)
        return max((len(r) for r in self.rows), default=0)

    def column(self, index: int) -> list[Cell]:
        return [row[index] for row in self.rows]


def _parse_cell(field: str) -> Cell:
    stripped = field.strip()
    if stripped == "":
        return None
    try:
        value = float(stripped)
    except ValueError:
        return field
    if not math.isfinite(value):
        return field
    if _INT_RE.fullmatch(stripped):
        return int(stripped)
    return value


def _is_numeric_cell(cell: Cell) -> bool:
    return isinstance(cell, (int, float)) and not isinstance(cell, bool)


def _split_blocks(text: str) -> list[tuple[str | None, list[str]]]:
    blocks: list[tuple[str | None, list[str]]] = []
    current: list[str] = []
    current_name: str | None = None
    started = False
    for line in text.splitlines():
        m = _LABEL_RE.match(line)
        if m:
            if started and (current or current_name is not None):
                blocks.append((current_name, current))
            current_name = f"Chart {m.group(1)}"
            current = [m.group(2)] if m.group(2).strip() else []
            started = True
        else:
            current.append(line)
            started = True
    if started:
        blocks.append((current_name, current))
    return blocks


def _parse_block(name: str | None, lines: list[str]) -> DataTable | None:
    raw_rows = [r for r in csv.reader(io.StringIO("\n".join(lines))) if r and r != [""]]
    if not raw_rows:
        return None

    # Header rows are names; a numeric cell in the first row marks raw data.
    first_typed = [_parse_cell(f) for f in raw_rows[0]]
    headerless = any(_is_numeric_cell(c) for c in first_typed)
    if headerless:
        headers: tuple[str, ...] = ()
        body = raw_rows
        warnings.warn(
            f"table {name or '(unnamed)'} has no header row; columns are unnamed",
            TableWarning,
            stacklevel=3,
        )
    else:
        headers = tuple(f.strip() for f in raw_rows[0])
        body = raw_rows[1:]

    width = len(headers) if headers else max(len(r) for r in body)
    if headers and any(len(r) > width for r in body):
        extra = max(len(r) for r in body) - width
        headers = headers + tuple(f"column_{width + i}" for i in range(extra))
        width = len(headers)
        warnings.warn(
            f"table {name or '(unnamed)'} has rows wider than its header; "
            f"added {extra} generated column name(s)",
            TableWarning,
            stacklevel=3,
        )

    rows = []
    ragged = 0
    for r in body:
        cells = [_parse_cell(f) for f in r]
        if len(cells) < width:
            ragged += 1
            cells.extend([None] * (width - len(cells)))
        rows.append(tuple(cells))
    if ragged:
        warnings.warn(
            f"table {name or '(unnamed)'}: padded {ragged} short row(s) with empty cells",
            TableWarning,
            stacklevel=3,
        )
    return DataTable(name=name, headers=headers, rows=tuple(rows), headerless=headerless)


def parse_csv_bundle(text: str) -> list[DataTable]:
    """Parse a CSV document into its tables.

    Tables are delimited by ``Chart <n>:`` label lines; a document without
    labels yields a single unnamed table. Ragged rows are padded right with
    empty cells (with a warning). Raises TableError when no table can be
    extracted at all.
    """
    tables = []
    for name, lines in _split_blocks(text):
        table = _parse_block(name, lines)
        if table is not None:
            tables.append(table)
    if not tables:
        raise TableError("document contains no parseable tables")
    return tables


def _format_cell(cell: Cell) -> str:
    if cell is None:
        return ""
    if isinstance(cell, bool):
        return "true" if cell else "false"
    if isinstance(cell, (int, float)):
        return repr(cell)
    return cell


def serialize_table(table: DataTable, include_label: bool = True) -> str:
    """Render one table back to CSV text (inverse of parsing for well-formed
    tables whose text cells neither look numeric nor start a line with a
    ``Chart <n>:`` label of their own)."""
    buf = io.StringIO()
    if include_label and table.name is not None:
        buf.write(f"{table.name}:\n")
    writer = csv.writer(buf, lineterminator="\n")
    if table.headers:
        writer.writerow(table.headers)
    for row in table.rows:
        writer.writerow([_format_cell(c) for c in row])
    return buf.getvalue()


def serialize_bundle(tables: list[DataTable]) -> str:
    return "\n".join(serialize_table(t) for t in tables)


def infer_column_kinds(table: DataTable) -> list[ColumnKind]:
    """Classify each column as numeric, temporal, or categorical.

    Numeric requires >= 90% of non-empty cells to parse as numbers; temporal
    is decided first, from the header name or date-shaped / year-run values.
    """
    kinds = []
    for i in range(table.width):
        cells = [c for c in table.column(i) if c is not None]
        header = table.headers[i] if i < len(table.headers) else ""
        kinds.append(_classify(header, cells))
    return kinds


def _classify(header: str, cells: list[Cell]) -> ColumnKind:
    if not cells:
        return ColumnKind.CATEGORICAL

    numericish = []
    for c in cells:
        if _is_numeric_cell(c):
            numericish.append(float(c))
        elif isinstance(c, str):
            parsed = _parse_cell(c)
            numericish.append(float(parsed) if _is_numeric_cell(parsed) else None)
        else:
            numericish.append(None)
    numeric_share = sum(v is not None for v in numericish) / len(cells)

    if _TEMPORAL_HEADER_RE.search(header):
        return ColumnKind.TEMPORAL
    texts = [c for c in cells if isinstance(c, str)]
    if texts and all(
        _DATE_VALUE_RE.match(t) or t.strip().lower() in _MONTHS for t in texts
    ) and len(texts) == len(cells):
        return ColumnKind.TEMPORAL
    values = [v for v in numericish if v is not None]
    if (
        len(values) == len(cells)
        and len(values) >= 2
        and all(v.is_integer() and 1500 <= v <= 2100 for v in values)
        and values == sorted(values)
        and len(set(values)) > 1
    ):
        return ColumnKind.TEMPORAL

    if numeric_share >= 0.90:
        return ColumnKind.NUMERIC
    return ColumnKind.CATEGORICAL


def _body_positions(table: DataTable) -> list[tuple[int, int]]:
    return [(r, c) for r in range(len(table.rows)) for c in range(table.width)]


def perturb_missing(table: DataTable, fraction: float, seed: int) -> DataTable:
    """Blank out exactly floor(fraction * body cells) distinct cells.

    ``fraction`` may not exceed 0.10. Headers are never touched.
    """
    if not 0 <= fraction <= 0.10:
        raise ValueError(f"missing-cell fraction must be in [0, 0.10], got {fraction}")
    positions = _body_positions(table)
    k = math.floor(fraction * len(positions))
    if k == 0:
        return table
    rng = np.random.default_rng(seed)
    chosen = {positions[i] for i in rng.choice(len(positions), size=k, replace=False)}
    rows = tuple(
        tuple(None if (r, c) in chosen else cell for c, cell in enumerate(row))
        for r, row in enumerate(table.rows)
    )
    return replace(table, rows=rows)


def perturb_outliers(
    table: DataTable, fraction: float, seed: int, spread: float = 10.0
) -> DataTable:
    """Replace floor(fraction * numeric cells) numeric cells with noise.

    Replacements are drawn uniformly from (spread * column_min,
    spread * column_max) of the cell's own column; non-numeric cells are
    untouched. Raises TableError when the table has no numeric cells.
    """
    if not 0 <= fraction <= 1:
        raise ValueError(f"outlier fraction must be in [0, 1], got {fraction}")
    numeric_positions = [
        (r, c) for (r, c) in _body_positions(table) if _is_numeric_cell(table.rows[r][c])
    ]
    if not numeric_positions:
        raise TableError("table has no numeric cells to perturb")

    col_bounds: dict[int, tuple[float, float]] = {}
    for c in range(table.width):
        values = [float(v) for v in table.column(c) if _is_numeric_cell(v)]
        if values:
            col_bounds[c] = (min(values), max(values))

    k = math.floor(fraction * len(numeric_positions))
    if k == 0:
        return table
    rng = np.random.default_rng(seed)
    chosen = sorted(
        numeric_positions[i] for i in rng.choice(len(numeric_positions), size=k, replace=False)
    )
    replacements = {}
    for r, c in chosen:
        lo, hi = col_bounds[c]
        lo, hi = spread * lo, spread * hi
        replacements[(r, c)] = float(rng.uniform(lo, hi)) if hi > lo else lo
    rows = tuple(
        tuple(replacements.get((r, c), cell) for c, cell in enumerate(row))
        for r, row in enumerate(table.rows)
    )
    return replace(table, rows=rows)


def perturb_format(table: DataTable, seed: int) -> str:
    """Serialize a table in deliberately irregular form: the header row is
    dropped and 1-3 blank lines are inserted at seeded positions.

    The result still parses via parse_csv_bundle, coming back as a
    headerless table (with a warning) when the data rows contain numbers.
    """
    rng = np.random.default_rng(seed)
    body = serialize_table(replace(table, headers=(), headerless=True))
    lines = body.splitlines()
    for _ in range(int(rng.integers(1, 4))):
        at = int(rng.integers(0, len(lines) + 1))
        lines.insert(at, "")
    return "\n".join(lines) + "\n"


def mask_numeric(table: DataTable) -> DataTable:
    """Replace every numeric body cell with the <MASKED> token, keeping
    headers and text cells intact. Idempotent."""
    rows = tuple(
        tuple(MASK_TOKEN if _is_numeric_cell(c) else c for c in row) for row in table.rows
    )
    return replace(table, rows=rows)
