import math
import re

import numpy as np
import pytest

from msgbench.errors import EmptyReport, InsufficientValues, MissingCharacteristic
from msgbench.harness import CHARACTERISTIC_ORDER, MetricsSummary
from msgbench.report import (
    RADAR_RADIUS,
    emit_summary_tables,
    radar_svg,
    read_summary_csv,
    resilience,
)


def summary(alg, char, value, mean):
    return MetricsSummary(alg, char, value, mean, 0.0, 0.0, 10)


def summaries_from(errors):
    """errors: {(alg, char): [mean errors per value]}"""
    return [summary(a, c, float(i), m) for (a, c), ms in errors.items() for i, m in enumerate(ms)]


def full_table(seed=0):
    rng = np.random.default_rng(seed)
    return resilience(summaries_from({(a, c): list(rng.random(4))
                                      for a in ("rs", "ga", "pso") for c in CHARACTERISTIC_ORDER}))


class TestResilience:
    def test_two_algorithms_normalise_to_unit_range(self):
        table = resilience(summaries_from({("ga", "ratio"): [0.2, 0.2], ("rs", "ratio"): [0.0, 0.5 * math.sqrt(2)]}))
        assert table[("ga", "ratio")].normalized == 0.0
        assert table[("rs", "ratio")].normalized == 1.0
        assert table[("rs", "ratio")].raw_std == pytest.approx(0.5, abs=1e-15)
        assert table[("ga", "ratio")].plotted == 1.0 and table[("rs", "ratio")].plotted == 0.0

    def test_sample_deviation(self):
        table = resilience(summaries_from({("rs", "boundary"): [0.1, 0.2, 0.3],
                                           ("ga", "boundary"): [0.0, 0.0, 0.0]}))
        assert table[("rs", "boundary")].raw_std == pytest.approx(0.1, abs=1e-15)

    def test_all_tied_gives_zero(self):
        table = resilience(summaries_from({("rs", "ratio"): [0.25, 0.5], ("ga", "ratio"): [0.5, 0.75]}))
        assert {r.normalized for r in table} == {0.0}

    def test_scale_invariance(self):
        base = {("rs", "ratio"): [0.1, 0.4, 0.2], ("ga", "ratio"): [0.3, 0.3, 0.31],
                ("es", "ratio"): [0.0, 0.9, 0.5]}
        a = resilience(summaries_from(base))
        b = resilience(summaries_from({k: [7.5 * v for v in vs] for k, vs in base.items()}))
        for r in a:
            assert b[(r.algorithm, r.characteristic)].normalized == pytest.approx(r.normalized, abs=1e-12)

    def test_normalised_per_characteristic(self):
        table = full_table()
        for c in CHARACTERISTIC_ORDER:
            norms = [table[(a, c)].normalized for a in table.algorithms]
            assert min(norms) == 0.0 and max(norms) == 1.0

    def test_single_value_rejected(self):
        with pytest.raises(InsufficientValues):
            resilience([summary("rs", "ratio", 0.5, 0.1)])

    def test_ordering(self):
        table = full_table()
        assert table.algorithms == ["ga", "pso", "rs"]
        assert table.characteristics == list(CHARACTERISTIC_ORDER)


def _polygon(svg):
    (pts,) = re.findall(r'<polygon class="profile"[^>]* points="([^"]*)"', svg)
    return [tuple(map(float, p.split(","))) for p in pts.split()]


def _axes(svg):
    return re.findall(r'<line class="axis" data-characteristic="(\w+)" x1="([^"]+)" y1="([^"]+)" '
                      r'x2="([^"]+)" y2="([^"]+)"', svg)


class TestRadar:
    def test_vertex_radius_equals_plotted_value(self):
        table = full_table(3)
        svg = radar_svg(table, "pso")
        axes = _axes(svg)
        vertices = _polygon(svg)
        assert [a[0] for a in axes] == list(CHARACTERISTIC_ORDER)
        for (name, x1, y1, x2, y2), (vx, vy) in zip(axes, vertices):
            cx, cy, ex, ey = map(float, (x1, y1, x2, y2))
            axis_len = math.hypot(ex - cx, ey - cy)
            assert axis_len == pytest.approx(RADAR_RADIUS, abs=1e-9)
            assert math.hypot(vx - cx, vy - cy) / axis_len == \
                pytest.approx(table[("pso", name)].plotted, abs=1e-9)
            # vertex lies on its own axis
            assert abs((ex - cx) * (vy - cy) - (ey - cy) * (vx - cx)) <= 1e-6

    def test_first_axis_points_up(self):
        (name, x1, y1, x2, y2) = _axes(radar_svg(full_table(), "rs"))[0]
        assert name == "local_optima"
        assert float(x2) == pytest.approx(float(x1), abs=1e-9) and float(y2) < float(y1)

    def test_structure(self):
        svg = radar_svg(full_table(), "ga")
        assert svg.count('<polygon class="profile"') == 1
        assert svg.count('class="ring"') == 4
        assert svg.count('class="axis"') == 5
        assert "Genetic" in svg or "GA" in svg

    def test_byte_identical(self):
        assert radar_svg(full_table(1), "rs") == radar_svg(full_table(1), "rs")

    def test_missing_axis(self):
        rows = summaries_from({("rs", c): [0.1, 0.2] for c in ("ratio", "boundary")} |
                              {("ga", c): [0.3, 0.2] for c in ("ratio", "boundary")})
        table = resilience(rows)
        with pytest.raises(MissingCharacteristic):
            radar_svg(table, "rs")
        svg = radar_svg(table, "rs", require_all=False)
        assert svg.count("(not swept)") == 3
        assert len(_polygon(svg)) == 2

    def test_unknown_algorithm(self):
        with pytest.raises(MissingCharacteristic):
            radar_svg(full_table(), "bfoa", require_all=False)


class TestTables:
    def test_empty_report(self, tmp_path):
        with pytest.raises(EmptyReport):
            emit_summary_tables([], None, tmp_path)

    def test_written_files(self, tmp_path):
        table = full_table()
        rows = summaries_from({(a, c): [0.1, 0.2] for a in ("rs", "ga", "pso") for c in CHARACTERISTIC_ORDER})
        written = emit_summary_tables(rows, table, tmp_path)
        names = sorted(p.name for p in written)
        assert names == ["radar_ga.svg", "radar_pso.svg", "radar_rs.svg", "resilience.csv",
                         "summary.csv", "summary.json"]
        assert len((tmp_path / "resilience.csv").read_text().splitlines()) == 1 + 15

    def test_summary_csv_round_trip(self, tmp_path):
        rows = [MetricsSummary("hs", "ratio", 0.1, 0.1 + 0.2, 1 / 3, 0.37, 100),
                MetricsSummary("hs", "dimensions", 4, 2.5e-17, 0.0, 1.0, 100)]
        emit_summary_tables(rows, None, tmp_path)
        assert read_summary_csv(tmp_path / "summary.csv") == rows
        assert not (tmp_path / "resilience.csv").exists()
