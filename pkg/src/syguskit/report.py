"""Category tables, per-benchmark detail CSV and SVG bar charts."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence
from xml.sax.saxutils import escape

from .harness import RunRecord
from .scoring import (
    SIZE_LABELS,
    TIME_LABELS,
    BenchmarkDetail,
    ScoreCard,
    format_size,
    format_time,
    score,
    size_bucket,
    time_bucket,
)

DEFAULT_CATEGORY = "uncategorized"
DETAIL_COLUMNS = ["benchmark", "category", "solvers_solved", "min_time", "max_time",
                  "min_size", "max_size", "fastest_solvers", "smallest_solvers"]
PALETTE = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#17becf"]


@dataclass
class CategoryRow:
    category: str
    benchmarks: int
    solved: dict[str, int]
    fastest: dict[str, int]
    unique: dict[str, int]


@dataclass
class ReportBundle:
    solvers: list[str]
    cards: list[ScoreCard]
    rows: list[CategoryRow]  # last row is the total
    details: list[BenchmarkDetail]
    categories: dict[str, str]
    svg: dict[str, str] = field(default_factory=dict)  # category -> chart

    def table_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["category", "benchmarks"]
                   + [f"{m}_{s}" for m in ("solved", "fastest", "unique") for s in self.solvers])
        for r in self.rows:
            w.writerow([r.category, r.benchmarks]
                       + [d[s] for d in (r.solved, r.fastest, r.unique) for s in self.solvers])
        return buf.getvalue()

    def table_text(self) -> str:
        head = ["Category", "Benchmarks", "Solved", "Fastest", "Uniquely"]
        body = [[r.category, str(r.benchmarks)]
                + ["/".join(str(d[s]) for s in self.solvers) for d in (r.solved, r.fastest, r.unique)]
                for r in self.rows]
        widths = [max(len(x) for x in col) for col in zip(head, *body)]
        lines = ["Solvers: " + " / ".join(self.solvers)]
        for row in [head] + body:
            lines.append("  ".join(x.ljust(w) for x, w in zip(row, widths)).rstrip())
        return "\n".join(lines) + "\n"

    def detail_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(DETAIL_COLUMNS)
        for d in self.details:
            w.writerow([
                d.benchmark_id, self.categories.get(d.benchmark_id, DEFAULT_CATEGORY), d.solver_count,
                "" if d.min_time is None else format_time(d.min_time), format_time(d.max_time),
                "" if d.min_size is None else d.min_size, "" if d.max_size is None else d.max_size,
                ";".join(d.fastest), ";".join(d.smallest),
            ])
        return buf.getvalue()

    def write(self, out_dir: str | Path, formats: Iterable[str] = ("csv", "text", "svg")) -> list[Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        written = []
        formats = set(formats)
        if "csv" in formats:
            written.append(_put(out / "table.csv", self.table_csv()))
            written.append(_put(out / "details.csv", self.detail_csv()))
        if "text" in formats:
            written.append(_put(out / "table.txt", self.table_text()))
        if "svg" in formats:
            for cat, svg in self.svg.items():
                written.append(_put(out / f"{_slug(cat)}.svg", svg))
        return written


def _put(path: Path, text: str) -> Path:
    path.write_text(text, encoding="utf-8")
    return path


def _slug(name: str) -> str:
    return "".join(c if c.isalnum() or c in "-_" else "_" for c in name) or "chart"


def load_categories(path: str | Path) -> dict[str, str]:
    """Benchmark-to-category sidecar: JSON object, or ``benchmark,category`` CSV lines."""
    text = Path(path).read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        data = json.loads(text)
        return {str(k): str(v) for k, v in data.items()}
    out = {}
    for row in csv.reader(io.StringIO(text)):
        if not row or row[0].startswith("#"):
            continue
        if len(row) != 2:
            raise ValueError(f"{path}: expected 'benchmark,category', got {row}")
        out[row[0].strip()] = row[1].strip()
    return out


def report(records: Sequence[RunRecord], categories: Mapping[str, str] | None = None,
           svg: bool = True) -> ReportBundle:
    categories = dict(categories or {})
    cards, details = score(records)
    solvers = [c.solver_id for c in cards]
    order: list[str] = []
    rows: dict[str, CategoryRow] = {}

    def row(cat: str) -> CategoryRow:
        if cat not in rows:
            order.append(cat)
            z = lambda: dict.fromkeys(solvers, 0)  # noqa: E731
            rows[cat] = CategoryRow(cat, 0, z(), z(), z())
        return rows[cat]

    total = CategoryRow("Total", 0, dict.fromkeys(solvers, 0), dict.fromkeys(solvers, 0),
                        dict.fromkeys(solvers, 0))
    for d in details:
        r = row(categories.get(d.benchmark_id, DEFAULT_CATEGORY))
        for target in (r, total):
            target.benchmarks += 1
            for sid in d.solved_by:
                target.solved[sid] += 1
            if d.solver_count == 1:
                target.unique[d.solved_by[0]] += 1
            for sid in d.fastest:
                target.fastest[sid] += 1
    bundle = ReportBundle(solvers, cards, [rows[c] for c in order] + [total], details, categories)
    if svg:
        by_cat: dict[str, list[BenchmarkDetail]] = {}
        for d in details:
            by_cat.setdefault(categories.get(d.benchmark_id, DEFAULT_CATEGORY), []).append(d)
        bundle.svg = {cat: render_svg(ds, solvers, cat) for cat, ds in by_cat.items()}
    return bundle


# ---------------------------------------------------------------------------
# SVG


def render_svg(details: Sequence[BenchmarkDetail], solvers: Sequence[str], title: str = "") -> str:
    """One column per benchmark: the time-bucket range as a black bar above the
    axis with fastest-solver markers under it, the size-bucket range as a gray
    bar below the axis with smallest-solver markers over it."""
    col, unit, mark = 34, 18, 6
    nt, ns = len(TIME_LABELS), len(SIZE_LABELS)
    k = len(solvers)
    left, top = 90, 30
    axis = top + nt * unit + k * mark + 6
    height = axis + 6 + k * mark + ns * unit + 60
    width = left + col * max(1, len(details)) + 140
    color = {s: PALETTE[i % len(PALETTE)] for i, s in enumerate(solvers)}
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'font-family="sans-serif" font-size="9">',
           f'<text x="{left}" y="14" font-size="12">{escape(title)}</text>']
    time_base = axis - 6 - k * mark
    for i, lab in enumerate(TIME_LABELS):
        y = time_base - (i + 1) * unit
        out.append(f'<text x="{left - 4}" y="{y + unit - 5}" text-anchor="end">{escape(lab)}</text>')
    size_base = axis + 6 + k * mark
    for i, lab in enumerate(SIZE_LABELS):
        y = size_base + i * unit
        out.append(f'<text x="{left - 4}" y="{y + unit - 5}" text-anchor="end">{escape(lab)}</text>')
    out.append(f'<line x1="{left}" y1="{axis}" x2="{width - 130}" y2="{axis}" stroke="black"/>')
    for j, d in enumerate(details):
        x = left + j * col + 4
        w = col - 8
        if d.unsolved:
            lo, hi = 0, nt - 1
        else:
            lo, hi = time_bucket(d.min_time), time_bucket(d.max_time)
        y0 = time_base - (hi + 1) * unit
        out.append(f'<rect x="{x}" y="{y0}" width="{w}" height="{(hi - lo + 1) * unit}" fill="black"/>')
        out.append(f'<text x="{x + w / 2}" y="{y0 - 2}" text-anchor="middle">'
                   f'{escape(format_time(d.max_time))}</text>')
        if d.min_time is not None:
            out.append(f'<text x="{x + w / 2}" y="{time_base - 3}" text-anchor="middle" fill="white">'
                       f'{format_time(d.min_time)}</text>')
        for i, s in enumerate(solvers):
            if s in d.fastest:
                out.append(f'<rect x="{x}" y="{time_base + i * mark}" width="{w}" height="{mark - 1}" '
                           f'fill="{color[s]}"/>')
            if s in d.smallest:
                out.append(f'<rect x="{x}" y="{axis + 6 + i * mark}" width="{w}" height="{mark - 1}" '
                           f'fill="{color[s]}"/>')
        if d.min_size is not None:
            lo, hi = size_bucket(d.min_size), size_bucket(d.max_size)
            y1 = size_base + lo * unit
            h = (hi - lo + 1) * unit
            out.append(f'<rect x="{x}" y="{y1}" width="{w}" height="{h}" fill="#999999"/>')
            out.append(f'<text x="{x + w / 2}" y="{y1 + h + 10}" text-anchor="middle">'
                       f'{escape(format_size(d.max_size))}</text>')
            if lo != hi:
                out.append(f'<text x="{x + w / 2}" y="{y1 + 10}" text-anchor="middle" fill="white">'
                           f'{escape(format_size(d.min_size))}</text>')
        out.append(f'<text x="{x + w / 2}" y="{height - 8}" text-anchor="end" '
                   f'transform="rotate(-60 {x + w / 2} {height - 8})">{escape(d.benchmark_id)}</text>')
    for i, s in enumerate(solvers):
        y = top + i * 14
        out.append(f'<rect x="{width - 120}" y="{y}" width="10" height="10" fill="{color[s]}"/>')
        out.append(f'<text x="{width - 105}" y="{y + 9}">{escape(s)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
