"""Resilience analysis and report files (CSV, JSON, radar SVG)."""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

from .errors import EmptyReport, InsufficientValues, MissingCharacteristic
from .harness import CHARACTERISTIC_ORDER, MetricsSummary, format_float, format_value
from .optimizers import ALGORITHM_NAMES, ALGORITHM_ORDER

AXIS_LABELS = {
    "local_optima": "Local optima",
    "ratio": "Ratio",
    "dimensions": "Dimensionality",
    "boundary": "Boundary",
    "smoothness": "Smoothness",
}

SUMMARY_COLUMNS = ("algorithm", "characteristic", "value", "mean_error", "std_error",
                   "success_rate", "n_runs")
RESILIENCE_COLUMNS = ("algorithm", "characteristic", "raw_std", "normalized", "plotted")


@dataclass(frozen=True)
class ResilienceRow:
    algorithm: str
    characteristic: str
    raw_std: float
    normalized: float
    plotted: float


class ResilienceTable:
    """Per-(algorithm, characteristic) spread of mean error, min-max normalised."""

    def __init__(self, rows: Sequence[ResilienceRow]):
        self.rows = list(rows)
        self._index = {(r.algorithm, r.characteristic): r for r in self.rows}

    def __getitem__(self, key: tuple[str, str]) -> ResilienceRow:
        return self._index[key]

    def __contains__(self, key) -> bool:
        return key in self._index

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    @property
    def algorithms(self) -> list[str]:
        return _ordered({r.algorithm for r in self.rows}, ALGORITHM_ORDER)

    @property
    def characteristics(self) -> list[str]:
        return _ordered({r.characteristic for r in self.rows}, CHARACTERISTIC_ORDER)


def _ordered(names, preferred) -> list[str]:
    known = [n for n in preferred if n in names]
    return known + sorted(set(names) - set(known))


def _sort_key(summary: MetricsSummary):
    return (summary.value is None, summary.value if summary.value is not None else 0)


def resilience(summaries: Sequence[MetricsSummary]) -> ResilienceTable:
    """Standard deviation (n - 1) of mean error across each characteristic's values.

    Within a characteristic the deviations are min-max normalised across
    algorithms; ``plotted = 1 - normalized`` so robust algorithms sit on
    the rim.  When all algorithms tie, every normalised value is 0.
    """
    series: dict[tuple[str, str], list[MetricsSummary]] = {}
    for s in summaries:
        series.setdefault((s.algorithm, s.characteristic), []).append(s)

    raw = {}
    for key, group in series.items():
        if len({s.value for s in group}) < 2:
            raise InsufficientValues(
                f"{key[0]} / {key[1]}: need at least 2 characteristic values, got {len(group)}")
        means = [s.mean_error for s in sorted(group, key=_sort_key)]
        raw[key] = float(np.std(means, ddof=1))

    rows = []
    for characteristic in _ordered({c for _, c in raw}, CHARACTERISTIC_ORDER):
        algs = _ordered({a for a, c in raw if c == characteristic}, ALGORITHM_ORDER)
        stds = [raw[(a, characteristic)] for a in algs]
        lo, hi = min(stds), max(stds)
        for alg, value in zip(algs, stds):
            norm = (value - lo) / (hi - lo) if hi > lo else 0.0
            rows.append(ResilienceRow(alg, characteristic, value, norm, 1.0 - norm))
    return ResilienceTable(rows)


# -- radar plots -------------------------------------------------------------

RADAR_SIZE = 400
RADAR_RADIUS = 130.0
_CENTER = RADAR_SIZE / 2.0


def _fmt(x: float) -> str:
    return repr(float(x) + 0.0)


def axis_angle(k: int, count: int = 5) -> float:
    """Axis ``k`` direction, starting straight up and going clockwise."""
    return -math.pi / 2.0 + 2.0 * math.pi * k / count


def _point(k: int, fraction: float) -> tuple[float, float]:
    angle = axis_angle(k, len(CHARACTERISTIC_ORDER))
    return (_CENTER + RADAR_RADIUS * fraction * math.cos(angle),
            _CENTER + RADAR_RADIUS * fraction * math.sin(angle))


def radar_svg(table: ResilienceTable, algorithm_id: str, require_all: bool = True) -> str:
    """Render one algorithm's resilience profile as a standalone SVG document.

    Axes follow CHARACTERISTIC_ORDER.  Each vertex sits at ``plotted * radius`` on
    its axis, so a larger polygon means a more robust algorithm.  With
    ``require_all=False`` characteristics absent from the table are drawn
    as dashed axes and left out of the polygon.
    """
    present = [c for c in CHARACTERISTIC_ORDER if (algorithm_id, c) in table]
    missing = [c for c in CHARACTERISTIC_ORDER if c not in present]
    if require_all and missing:
        raise MissingCharacteristic(f"{algorithm_id}: no resilience data for {', '.join(missing)}")
    if not present:
        raise MissingCharacteristic(f"{algorithm_id}: no resilience data at all")

    title = ALGORITHM_NAMES.get(algorithm_id, algorithm_id)
    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{RADAR_SIZE}" '
        f'height="{RADAR_SIZE}" viewBox="0 0 {RADAR_SIZE} {RADAR_SIZE}">',
        f"<title>{escape(title)}</title>",
        f'<rect x="0" y="0" width="{RADAR_SIZE}" height="{RADAR_SIZE}" fill="#ffffff"/>',
        f'<text x="{_fmt(_CENTER)}" y="24" text-anchor="middle" font-family="sans-serif" '
        f'font-size="16" font-weight="bold">{escape(title)}</text>',
    ]
    for ring in (0.25, 0.5, 0.75, 1.0):
        pts = [_point(k, ring) for k in range(len(CHARACTERISTIC_ORDER))]
        path = "M " + " L ".join(f"{_fmt(x)} {_fmt(y)}" for x, y in pts) + " Z"
        out.append(f'<path class="ring" d="{path}" fill="none" stroke="#cccccc" stroke-width="1"/>')
    for k, name in enumerate(CHARACTERISTIC_ORDER):
        x, y = _point(k, 1.0)
        dash = ' stroke-dasharray="4 3"' if name in missing else ""
        out.append(f'<line class="axis" data-characteristic="{name}" x1="{_fmt(_CENTER)}" '
                   f'y1="{_fmt(_CENTER)}" x2="{_fmt(x)}" y2="{_fmt(y)}" stroke="#888888" '
                   f'stroke-width="1"{dash}/>')
        lx, ly = _point(k, 1.18)
        label = AXIS_LABELS[name] + (" (not swept)" if name in missing else "")
        out.append(f'<text class="label" x="{_fmt(lx)}" y="{_fmt(ly)}" text-anchor="middle" '
                   f'dominant-baseline="middle" font-family="sans-serif" '
                   f'font-size="12">{escape(label)}</text>')
    vertices = []
    for k, name in enumerate(CHARACTERISTIC_ORDER):
        if name in present:
            vertices.append(_point(k, table[(algorithm_id, name)].plotted))
    points = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in vertices)
    values = " ".join(f"{name}={_fmt(table[(algorithm_id, name)].plotted)}" for name in present)
    out.append(f'<polygon class="profile" data-plotted="{values}" points="{points}" '
               f'fill="#3b75af" fill-opacity="0.45" stroke="#1f4e79" stroke-width="2"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_radar_svg(table: ResilienceTable, algorithm_id: str, path: str | os.PathLike,
                   require_all: bool = True) -> None:
    text = radar_svg(table, algorithm_id, require_all)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# -- tables ------------------------------------------------------------------

def _summary_row(s: MetricsSummary) -> list[str]:
    return [s.algorithm, s.characteristic, format_value(s.value), format_float(s.mean_error),
            format_float(s.std_error), format_float(s.success_rate), str(s.n_runs)]


def emit_summary_tables(summaries: Sequence[MetricsSummary], table: ResilienceTable | None,
                        out_dir: str | os.PathLike) -> list[Path]:
    """Write summary.csv, resilience.csv, summary.json and one radar SVG per algorithm.

    ``table`` may be ``None`` when the summaries cover fewer than two
    values per characteristic; the resilience outputs are then omitted.
    Radar plots for sweeps that cover only some characteristics mark the
    missing axes instead of failing.  Returns the written paths.
    """
    if not summaries:
        raise EmptyReport("no summaries to report")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    path = out / "summary.csv"
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SUMMARY_COLUMNS)
        writer.writerows(_summary_row(s) for s in summaries)
    written.append(path)

    if table is not None:
        path = out / "resilience.csv"
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(RESILIENCE_COLUMNS)
            for r in table:
                writer.writerow([r.algorithm, r.characteristic, format_float(r.raw_std),
                                 format_float(r.normalized), format_float(r.plotted)])
        written.append(path)

    payload = {
        "summaries": [asdict(s) for s in summaries],
        "resilience": [asdict(r) for r in table] if table is not None else [],
    }
    path = out / "summary.json"
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    written.append(path)

    if table is not None:
        for algorithm_id in table.algorithms:
            path = out / f"radar_{algorithm_id}.svg"
            emit_radar_svg(table, algorithm_id, path, require_all=False)
            written.append(path)
    return written


def read_summary_csv(path: str | os.PathLike) -> list[MetricsSummary]:
    from .harness import _parse_value

    with open(path, encoding="utf-8", newline="") as fh:
        return [
            MetricsSummary(
                algorithm=row["algorithm"],
                characteristic=row["characteristic"],
                value=_parse_value(row["characteristic"], row["value"]),
                mean_error=float(row["mean_error"]),
                std_error=float(row["std_error"]),
                success_rate=float(row["success_rate"]),
                n_runs=int(row["n_runs"]),
            )
            for row in csv.DictReader(fh)
        ]
