"""Rendering: determinism, overlays, floors, and failure modes.

The fixtures under data/ are miniature harness runs (a handful of trials)
regenerated by make_fixtures.py; the renderer does not care how converged
a curve is.
"""

import pathlib
import subprocess
import sys

import pytest

from cajplot.records import InputError, Row, read_rows
from cajplot.render import LOG_FLOOR, _line_figure, render
from cajplot.specs import find_spec, load_specs

DATA = pathlib.Path(__file__).parent / "data"

EXTRA = {
    "fig6-outage": [DATA / "fig6-outage-analytic.csv"],
    "fig7-outage-k": [DATA / "fig7-outage-k-analytic.csv"],
}


def _inputs(spec_id):
    return [DATA / f"{spec_id}.csv"] + EXTRA.get(spec_id, [])


class TestEveryBundledSpecRenders:
    @pytest.mark.parametrize("spec_id", sorted(load_specs()))
    def test_renders_deterministic_svg(self, spec_id, tmp_path):
        spec = find_spec(spec_id)
        a = tmp_path / "a.svg"
        b = tmp_path / "b.svg"
        render(spec, _inputs(spec_id), a)
        render(spec, _inputs(spec_id), b)
        blob = a.read_bytes()
        assert blob.startswith(b"<?xml")
        assert b"</svg>" in blob
        assert blob == b.read_bytes()


class TestGoldenStability:
    """The three golden figures are byte-stable across repeated renders."""

    @pytest.mark.parametrize("spec_id", ["fig3-msad", "fig8-ser-k4", "fig15-contour"])
    def test_three_renders_identical(self, spec_id, tmp_path):
        spec = find_spec(spec_id)
        blobs = []
        for i in range(3):
            out = tmp_path / f"r{i}.svg"
            render(spec, _inputs(spec_id), out)
            blobs.append(out.read_bytes())
        assert blobs[0] == blobs[1] == blobs[2]

    def test_stable_across_processes(self, tmp_path):
        out1 = tmp_path / "p1.svg"
        out2 = tmp_path / "p2.svg"
        for out in (out1, out2):
            proc = subprocess.run(
                [sys.executable, "-m", "cajplot.cli",
                 "--spec", "fig3-msad", "--csv", str(DATA / "fig3-msad.csv"),
                 "--out", str(out)],
                capture_output=True, text=True,
            )
            assert proc.returncode == 0, proc.stderr
        assert out1.read_bytes() == out2.read_bytes()


class TestOverlay:
    def test_analytic_series_get_their_own_lines(self):
        spec = find_spec("fig6-outage")
        rows = read_rows(DATA / "fig6-outage.csv")
        rows += read_rows(DATA / "fig6-outage-analytic.csv")
        fig = _line_figure(spec, rows)
        labels = [t.get_text() for t in fig.axes[0].get_legend().get_texts()]
        assert "EV N=5 (MC)" in labels
        assert "EV N=5 (A)" in labels

    def test_without_analytic_rows_labels_stay_plain(self):
        spec = find_spec("fig6-outage")
        rows = read_rows(DATA / "fig6-outage.csv")
        fig = _line_figure(spec, rows)
        labels = [t.get_text() for t in fig.axes[0].get_legend().get_texts()]
        assert "EV N=5" in labels
        assert all("(MC)" not in lab for lab in labels)


class TestFloorsAndFailures:
    def _row(self, method, x, metric, value):
        return Row("s", method, "gamma_ts_db", x, metric, value, 4, 1)

    def test_log_plot_clamps_at_floor(self):
        spec = find_spec("fig8-ser-k4")
        rows = [self._row("EV-CAJ", x, "ser", v) for x, v in ((0, 1e-2), (2, 0.0))]
        fig = _line_figure(spec, rows)
        ys = fig.axes[0].lines[0].get_ydata()
        assert min(ys) == LOG_FLOOR

    def test_wrong_metric_lists_what_is_there(self, tmp_path):
        spec = find_spec("fig3-msad")
        out = tmp_path / "x.svg"
        with pytest.raises(InputError, match="ser"):
            render(spec, [DATA / "fig8-ser-k4.csv"], out)
        assert not out.exists()

    def test_header_only_writes_nothing(self, tmp_path):
        p = tmp_path / "empty.csv"
        p.write_text("scenario,method,sweep_name,sweep_value,metric,value,trials,seed\n")
        out = tmp_path / "x.svg"
        with pytest.raises(InputError, match="header only"):
            render(find_spec("fig3-msad"), [p], out)
        assert not out.exists()

    def test_contour_requires_grid_labels(self, tmp_path):
        spec = find_spec("fig15-contour")
        out = tmp_path / "x.svg"
        with pytest.raises(InputError, match="does not encode"):
            render(spec, [DATA / "fig8-ser-k4.csv"], out)
        assert not out.exists()

    def test_contour_requires_complete_grid(self, tmp_path):
        spec = find_spec("fig15-contour")
        rows = [
            self._row("EV tau_g=0 gamma_tj_db=0", 0.0, "ser", 1e-2),
            self._row("EV tau_g=0 gamma_tj_db=0", 2.0, "ser", 1e-3),
            self._row("EV tau_g=0 gamma_tj_db=10", 0.0, "ser", 1e-2),
        ]
        from cajplot.render import _contour_figure

        with pytest.raises(InputError, match="incomplete grid"):
            _contour_figure(spec, rows)
