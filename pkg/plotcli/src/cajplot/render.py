"""Deterministic SVG rendering for sweep CSV files.

Rendering is a pure function of (rows, spec): the same input bytes give
the same output bytes.  Everything that could drift is pinned, including
figure geometry, the color cycle, text drawn as paths, and the SVG hash
salt; no timestamp is written.  Values bound for a log scale are clamped
at LOG_FLOOR first, which sits below anything resolvable at the shipped
trial counts.  No metric is ever recomputed here; every plotted number
exists verbatim in a CSV row.
"""

import math
import re

import matplotlib as mpl
import numpy as np
from matplotlib.figure import Figure

from .records import InputError, read_rows, series_for_metric
from .specs import FigureSpec

LOG_FLOOR = 1e-5

_PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
    "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f",
)
_MARKERS = ("o", "s", "^", "d", "v", "x", "+", "*", "<", ">")

_RC = {
    "svg.hashsalt": "cajplot",
    "svg.fonttype": "path",
    "figure.dpi": 100,
    "font.family": "DejaVu Sans",
    "font.size": 9.0,
    "axes.grid": True,
    "grid.alpha": 0.35,
    "grid.linewidth": 0.6,
    "lines.linewidth": 1.3,
    "lines.markersize": 4.0,
    "legend.fontsize": 7.5,
    "legend.framealpha": 0.9,
    "axes.titlesize": 9.5,
    "path.simplify": False,
}


def render(spec: FigureSpec, csv_paths, out_path) -> None:
    """Draw one figure from the given CSV files.

    All validation happens before the output file is opened, so a bad
    input never leaves a partial artifact behind.
    """
    rows = []
    for p in csv_paths:
        rows.extend(read_rows(p))
    with mpl.rc_context(_RC):
        if spec.kind == "contour-log10":
            fig = _contour_figure(spec, rows)
        else:
            fig = _line_figure(spec, rows)
        fig.savefig(out_path, format="svg", metadata={"Date": None})


def _line_figure(spec: FigureSpec, rows) -> Figure:
    main = series_for_metric(rows, spec.metric)
    overlay = {}
    if spec.overlay_metric and any(r.metric == spec.overlay_metric for r in rows):
        overlay = series_for_metric(rows, spec.overlay_metric)

    fig = Figure(figsize=(6.4, 4.2))
    ax = fig.subplots()
    order = list(main)
    for label in overlay:
        if label not in main:
            order.append(label)

    for label, pts in main.items():
        i = order.index(label)
        xs = [x for x, _ in pts]
        ys = [v for _, v in pts]
        if spec.kind == "line-logy":
            ys = [max(v, LOG_FLOOR) for v in ys]
        name = f"{label} (MC)" if label in overlay else label
        ax.plot(
            xs, ys, label=name,
            color=_PALETTE[i % len(_PALETTE)], marker=_MARKERS[i % len(_MARKERS)],
        )
    # the closed-form companion of a measured series reuses its color
    for label, pts in overlay.items():
        i = order.index(label)
        xs = [x for x, _ in pts]
        ys = [v for _, v in pts]
        if spec.kind == "line-logy":
            ys = [max(v, LOG_FLOOR) for v in ys]
        ax.plot(
            xs, ys, label=f"{label} (A)",
            color=_PALETTE[i % len(_PALETTE)], linestyle="--",
        )

    if spec.kind == "line-logy":
        ax.set_yscale("log")
    ax.set_xlabel(spec.x_label)
    ax.set_ylabel(spec.y_label)
    if spec.title:
        ax.set_title(spec.title)
    ax.legend()
    return fig


def _param_value(label: str, param: str):
    m = re.search(rf"(?:^|\s){re.escape(param)}=([-+0-9.eE]+)(?:\s|$)", label)
    return float(m.group(1)) if m else None


def _contour_figure(spec: FigureSpec, rows) -> Figure:
    series = series_for_metric(rows, spec.metric)

    panels: dict = {}
    for label, pts in series.items():
        pv = _param_value(label, spec.panel_param)
        yv = _param_value(label, spec.y_param)
        if pv is None or yv is None:
            raise InputError(
                f"series label {label!r} does not encode {spec.panel_param}= and "
                f"{spec.y_param}=; labels present: {', '.join(series)}"
            )
        panels.setdefault(pv, {})[yv] = pts

    panel_keys = sorted(panels)
    ys = sorted({y for rows_ in panels.values() for y in rows_})
    xs = sorted({x for rows_ in panels.values() for pts in rows_.values() for x, _ in pts})
    grids = {}
    for pv in panel_keys:
        z = np.full((len(ys), len(xs)), np.nan)
        for yi, y in enumerate(ys):
            pts = dict(panels[pv].get(y, ()))
            for xi, x in enumerate(xs):
                if x not in pts:
                    raise InputError(
                        f"incomplete grid: {spec.panel_param}={pv:g} "
                        f"{spec.y_param}={y:g} has no value at sweep {x:g}"
                    )
                z[yi, xi] = pts[x]
        grids[pv] = np.log10(np.clip(z, LOG_FLOOR, None))

    ncols = min(3, len(panel_keys))
    nrows = math.ceil(len(panel_keys) / ncols)
    fig = Figure(figsize=(3.4 * ncols + 1.0, 2.9 * nrows))
    axes = fig.subplots(nrows, ncols, squeeze=False)
    fig.subplots_adjust(
        left=0.08, right=0.86, bottom=0.12, top=0.90, wspace=0.30, hspace=0.45
    )
    levels = np.linspace(math.log10(LOG_FLOOR), 0.0, 11)
    filled = None
    for idx in range(nrows * ncols):
        ax = axes[idx // ncols][idx % ncols]
        if idx >= len(panel_keys):
            ax.set_visible(False)
            continue
        pv = panel_keys[idx]
        filled = ax.contourf(xs, ys, grids[pv], levels=levels, cmap="viridis")
        ax.set_title(f"{spec.panel_param} = {pv:g}")
        ax.set_xlabel(spec.x_label)
        ax.set_ylabel(spec.y_label)
    cax = fig.add_axes([0.89, 0.15, 0.02, 0.70])
    fig.colorbar(filled, cax=cax, label=spec.value_label or spec.metric)
    if spec.title:
        fig.suptitle(spec.title)
    return fig
