"""CSV ingestion with row-level error reporting, plus table and chart writers.

Readers take header-named columns so files can carry extra columns in any
order.  Errors name the offending row (1-based, counting the header as
row 1) and column.  Writers are deterministic: same inputs, same bytes.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DomainError, ParseError, SchemaError, ValidationError
from .estimators import XYDataset
from .metrics import PairedObservations

__all__ = [
    "TableDocument",
    "load_xy_csv",
    "load_paired_csv",
    "write_table_csv",
    "write_residual_svg",
]


@dataclass
class TableDocument:
    """A titled rectangular table of numbers; the title is for display only."""

    title: str
    columns: tuple[str, ...]
    rows: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        self.columns = tuple(str(c) for c in self.columns)
        if not self.columns:
            raise DomainError("a table needs at least one column")
        rows = tuple(tuple(float(v) for v in row) for row in self.rows)
        for i, row in enumerate(rows):
            if len(row) != len(self.columns):
                raise DomainError(
                    f"row {i} has {len(row)} values but the table has {len(self.columns)} columns"
                )
        self.rows = rows


def _read_named_columns(path, column_names: Sequence[str]) -> list[tuple[float, ...]]:
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        header = reader.fieldnames
        if header is None:
            raise SchemaError(f"{path}: empty file, expected a header row")
        for name in column_names:
            if name not in header:
                raise SchemaError(
                    f"{path}: missing column '{name}' (available: {', '.join(header)})"
                )
        records: list[tuple[float, ...]] = []
        # header is row 1, first data row is row 2
        for row_number, row in enumerate(reader, start=2):
            values = []
            for name in column_names:
                raw = row.get(name)
                if raw is None or raw.strip() == "":
                    raise ParseError(f"{path} row {row_number}: column '{name}' is empty")
                try:
                    values.append(float(raw))
                except ValueError:
                    raise ParseError(
                        f"{path} row {row_number}: could not parse '{raw}' in column '{name}'"
                    ) from None
            records.append(tuple(values))
    if not records:
        raise ValidationError(f"{path}: no data rows")
    return records


def _validated(build, path):
    # Re-raise dataset construction errors with file context attached.
    try:
        return build()
    except DomainError as exc:
        raise ValidationError(f"{path}: {exc}") from exc


def load_xy_csv(path, x_column: str, y_column: str) -> XYDataset:
    """Read an (x, y) dataset, y strictly positive, from named CSV columns."""
    records = _read_named_columns(path, (x_column, y_column))
    for row_number, (_, y) in enumerate(records, start=2):
        if y <= 0.0:
            raise ValidationError(
                f"{path} row {row_number}: column '{y_column}' must be > 0, got {y:g}"
            )
    xs = np.array([r[0] for r in records])
    ys = np.array([r[1] for r in records])
    return _validated(lambda: XYDataset(xs, ys), path)


def load_paired_csv(path, actual_column: str, predicted_column: str) -> PairedObservations:
    """Read actual/predicted pairs, both strictly positive, from named CSV columns."""
    records = _read_named_columns(path, (actual_column, predicted_column))
    for row_number, pair in enumerate(records, start=2):
        for name, value in zip((actual_column, predicted_column), pair):
            if value <= 0.0:
                raise ValidationError(
                    f"{path} row {row_number}: column '{name}' must be > 0, got {value:g}"
                )
    actuals = np.array([r[0] for r in records])
    predictions = np.array([r[1] for r in records])
    return _validated(lambda: PairedObservations(actuals, predictions), path)


def write_table_csv(document: TableDocument, path) -> None:
    """Write header then data rows; numbers rendered with %.6g, \\n line endings."""
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(document.columns)
        for row in document.rows:
            writer.writerow(format(value, ".6g") for value in row)


def _svg_number(value: float) -> str:
    return format(value, ".2f")


def write_residual_svg(ln_q_residuals, xs, path) -> None:
    """Bar chart of log accuracy ratios against x, written as SVG 1.1.

    Bars above the zero baseline mark over-predictions.  A sibling CSV
    holding the plotted (x, ln_q) series is always written next to the
    chart so the picture can be regenerated or checked numerically.
    """
    residuals = np.asarray(ln_q_residuals, dtype=float)
    x_values = np.asarray(xs, dtype=float)
    if residuals.ndim != 1 or x_values.shape != residuals.shape:
        raise ValidationError("residuals and xs must be 1-D arrays of equal length")
    if residuals.size == 0:
        raise ValidationError("nothing to plot: empty residual series")
    if not (np.all(np.isfinite(residuals)) and np.all(np.isfinite(x_values))):
        raise ValidationError("residuals and xs must be finite")

    path = Path(path)
    write_table_csv(
        TableDocument(
            "log accuracy ratio residuals",
            ("x", "ln_q"),
            tuple(zip(x_values, residuals)),
        ),
        path.with_suffix(".csv"),
    )

    width, height = 720.0, 400.0
    m_left, m_right, m_top, m_bottom = 70.0, 20.0, 20.0, 45.0
    plot_w = width - m_left - m_right
    plot_h = height - m_top - m_bottom

    x_min, x_max = float(x_values.min()), float(x_values.max())
    pad = 0.05 * (x_max - x_min) if x_max > x_min else max(1.0, 0.5 * abs(x_min))
    x_lo, x_hi = x_min - pad, x_max + pad
    r_max = max(float(np.abs(residuals).max()), 1e-12)
    y_top = 1.1 * r_max

    def px(x: float) -> float:
        return m_left + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(r: float) -> float:
        return m_top + (y_top - r) / (2.0 * y_top) * plot_h

    baseline = py(0.0)
    if x_values.size > 1:
        pixel_positions = np.unique([px(v) for v in x_values])
        spacing = float(np.diff(pixel_positions).min()) if pixel_positions.size > 1 else plot_w
        half_width = min(max(0.35 * spacing, 0.5), 12.0)
    else:
        half_width = 8.0

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width:g}" height="{height:g}" viewBox="0 0 {width:g} {height:g}">',
        f'<rect x="0" y="0" width="{width:g}" height="{height:g}" fill="white"/>',
    ]
    for x_val, r_val in zip(x_values, residuals):
        top = py(max(r_val, 0.0))
        bar_h = abs(py(r_val) - baseline)
        parts.append(
            f'<rect class="bar" x="{_svg_number(px(x_val) - half_width)}" '
            f'y="{_svg_number(top)}" width="{_svg_number(2 * half_width)}" '
            f'height="{_svg_number(bar_h)}" fill="#4878a8"/>'
        )
    parts.append(
        f'<line x1="{_svg_number(m_left)}" y1="{_svg_number(baseline)}" '
        f'x2="{_svg_number(width - m_right)}" y2="{_svg_number(baseline)}" '
        f'stroke="#333333" stroke-width="1"/>'
    )
    for tick in (-r_max, 0.0, r_max):
        parts.append(
            f'<text x="{_svg_number(m_left - 8)}" y="{_svg_number(py(tick) + 4)}" '
            f'text-anchor="end" font-family="sans-serif" font-size="12">{tick:.3g}</text>'
        )
    parts.append(
        f'<text x="{_svg_number(m_left + plot_w / 2)}" y="{_svg_number(height - 10)}" '
        f'text-anchor="middle" font-family="sans-serif" font-size="13">x</text>'
    )
    parts.append(
        f'<text x="16" y="{_svg_number(m_top + plot_h / 2)}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13" '
        f'transform="rotate(-90 16 {_svg_number(m_top + plot_h / 2)})">'
        f"ln(prediction / actual)</text>"
    )
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write("\n".join(parts) + "\n")
