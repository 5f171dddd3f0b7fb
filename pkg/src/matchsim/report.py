"""CSV serialisation of sweep rows and SVG trend plots."""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence
from xml.sax.saxutils import escape

from .sweep import AggregateRow, SweepRow

CSV_HEADER = "n,k,rho,trial,seed,D,ratio"
_COLUMNS = CSV_HEADER.split(",")

# matplotlib's default cycle, so the curves look familiar.
_PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)


class CsvFormatError(ValueError):
    def __init__(self, line: int, column: str, message: str):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


def format_csv(rows: Sequence[SweepRow]) -> str:
    out = io.StringIO()
    out.write(CSV_HEADER + "\n")
    for r in rows:
        out.write(f"{r.n},{r.k},{r.rho!r},{r.trial},{r.seed},{r.D},{r.ratio!r}\n")
    return out.getvalue()


def write_csv(rows: Sequence[SweepRow], destination) -> int:
    """Write rows as UTF-8 CSV with LF newlines; returns bytes written."""
    data = format_csv(rows).encode("utf-8")
    path = Path(destination)
    try:
        path.write_bytes(data)
    except OSError as e:
        raise OSError(f"cannot write {path}: {e.strerror or e}") from e
    return len(data)


def _parse_int(text: str, line: int, column: str, lo: int = 0) -> int:
    try:
        value = int(text)
    except ValueError:
        raise CsvFormatError(line, column, f"not an integer: {text!r}") from None
    if value < lo:
        raise CsvFormatError(line, column, f"{value} is below {lo}")
    return value


def _parse_float(text: str, line: int, column: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise CsvFormatError(line, column, f"not a number: {text!r}") from None
    if not math.isfinite(value):
        raise CsvFormatError(line, column, f"not finite: {text!r}")
    return value


def parse_csv(text: str) -> list[SweepRow]:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0].strip() != CSV_HEADER:
        raise CsvFormatError(1, "header", f"expected {CSV_HEADER!r}")
    rows = []
    for lineno, line in enumerate(lines[1:], 2):
        fields = line.rstrip("\r").split(",")
        if len(fields) != len(_COLUMNS):
            raise CsvFormatError(lineno, "*", f"expected {len(_COLUMNS)} columns, got {len(fields)}")
        n = _parse_int(fields[0], lineno, "n", lo=1)
        k = _parse_int(fields[1], lineno, "k", lo=1)
        rho = _parse_float(fields[2], lineno, "rho")
        if rho < 0:
            raise CsvFormatError(lineno, "rho", f"{rho} is negative")
        trial = _parse_int(fields[3], lineno, "trial")
        seed = _parse_int(fields[4], lineno, "seed")
        D = _parse_int(fields[5], lineno, "D")
        if D > n:
            raise CsvFormatError(lineno, "D", f"{D} exceeds n={n}")
        ratio = _parse_float(fields[6], lineno, "ratio")
        if not 0 <= ratio <= 1:
            raise CsvFormatError(lineno, "ratio", f"{ratio} outside [0, 1]")
        row = SweepRow(n, k, rho, trial, seed, D)
        if row.ratio != ratio:
            raise CsvFormatError(lineno, "ratio", f"{ratio} != D/n = {row.ratio}")
        rows.append(row)
    return rows


def read_csv(source) -> list[SweepRow]:
    return parse_csv(Path(source).read_text(encoding="utf-8"))


@dataclass(frozen=True)
class PlotSpec:
    """What to draw: ``fix`` filters rows, every remaining (k, rho) is a series."""

    fix: dict = field(default_factory=dict)
    log_y: bool = False
    title: str = ""
    x_label: str = "market size n"
    y_label: str = "D(n)/n"
    width: int = 720
    height: int = 440


def _series(aggregates: Sequence[AggregateRow], spec: PlotSpec):
    selected = [
        a for a in aggregates
        if all(getattr(a, key) == value for key, value in spec.fix.items())
    ]
    series: dict[tuple[int, float], list[AggregateRow]] = {}
    for a in sorted(selected, key=lambda a: (a.k, a.rho, a.n)):
        series.setdefault((a.k, a.rho), []).append(a)
    return series


def _ticks(lo: float, hi: float, count: int = 6) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    start = math.ceil(lo / step) * step
    ticks = []
    t = start
    while t <= hi + step * 1e-9:
        ticks.append(round(t, 10))
        t += step
    return ticks


def _fmt(v: float) -> str:
    return f"{v:g}"


def render_plot(aggregates: Sequence[AggregateRow], spec: PlotSpec, destination=None) -> str:
    """SVG line chart of mean D/n against n, one polyline per (k, rho)."""
    series = _series(aggregates, spec)
    if not series:
        raise ValueError(f"no series matched {spec.fix or 'the data'}")
    varying = [
        name for name, idx in (("k", 0), ("rho", 1))
        if len({key[idx] for key in series}) > 1
    ] or ["k", "rho"]

    def label(key):
        values = {"k": key[0], "rho": key[1]}
        return ", ".join(f"{name}={_fmt(values[name])}" for name in varying)

    points = [a for rows in series.values() for a in rows]
    x_lo, x_hi = min(a.n for a in points), max(a.n for a in points)
    if x_lo == x_hi:
        x_lo, x_hi = x_lo - 1, x_hi + 1

    if spec.log_y:
        positive = [a.mean_ratio for a in points if a.mean_ratio > 0]
        floor = min(positive) if positive else 1e-4
        y_lo = 10 ** math.floor(math.log10(floor))
        y_hi = 10 ** math.ceil(math.log10(max(max(positive, default=floor), y_lo * 10)))
        y_ticks = [10.0 ** e for e in range(round(math.log10(y_lo)), round(math.log10(y_hi)) + 1)]

        def ty(v):
            return (math.log10(max(v, y_lo)) - math.log10(y_lo)) / (math.log10(y_hi) - math.log10(y_lo))
    else:
        y_lo = 0.0
        y_hi = max(max(a.mean_ratio for a in points), 1e-3)
        y_ticks = _ticks(y_lo, y_hi)
        y_hi = max(y_hi, y_ticks[-1])

        def ty(v):
            return (v - y_lo) / (y_hi - y_lo)

    w, h = spec.width, spec.height
    left, right, top, bottom = 70, 150, 40, 50
    pw, ph = w - left - right, h - top - bottom

    def px(x):
        return left + (x - x_lo) / (x_hi - x_lo) * pw

    def py(y):
        return top + ph - ty(y) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>',
    ]
    if spec.title:
        out.append(f'<text x="{left + pw / 2:.1f}" y="22" text-anchor="middle" font-size="14">{escape(spec.title)}</text>')
    out.append(f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
    for t in _ticks(x_lo, x_hi):
        x = px(t)
        out.append(f'<line x1="{x:.1f}" y1="{top + ph}" x2="{x:.1f}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{x:.1f}" y="{top + ph + 18}" text-anchor="middle">{_fmt(t)}</text>')
    for t in y_ticks:
        y = py(t)
        out.append(f'<line x1="{left - 5}" y1="{y:.1f}" x2="{left}" y2="{y:.1f}" stroke="black"/>')
        out.append(f'<line x1="{left}" y1="{y:.1f}" x2="{left + pw}" y2="{y:.1f}" stroke="#dddddd"/>')
        out.append(f'<text x="{left - 8}" y="{y + 4:.1f}" text-anchor="end">{_fmt(t)}</text>')
    out.append(f'<text x="{left + pw / 2:.1f}" y="{h - 12}" text-anchor="middle">{escape(spec.x_label)}</text>')
    out.append(
        f'<text x="18" y="{top + ph / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 18 {top + ph / 2:.1f})">{escape(spec.y_label)}</text>'
    )
    for i, (key, rows) in enumerate(series.items()):
        color = _PALETTE[i % len(_PALETTE)]
        coords = " ".join(f"{px(a.n):.2f},{py(a.mean_ratio):.2f}" for a in rows)
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{coords}"/>')
        ly = top + 10 + 18 * i
        lx = left + pw + 12
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 22}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 28}" y="{ly + 4}">{escape(label(key))}</text>')
    out.append("</svg>")
    svg = "\n".join(out) + "\n"
    if destination is not None:
        Path(destination).write_text(svg, encoding="utf-8")
    return svg
