"""Reading sweep CSV files without touching the simulator.

The renderer consumes the eight-column schema the sweep harness emits:

    scenario,method,sweep_name,sweep_value,metric,value,trials,seed

Everything on a plot has to exist verbatim in these rows; this module only
parses and groups, it never computes a metric.
"""

import csv
from dataclasses import dataclass

HEADER = (
    "scenario", "method", "sweep_name", "sweep_value",
    "metric", "value", "trials", "seed",
)


class InputError(ValueError):
    """A CSV file does not hold what the figure needs."""


@dataclass(frozen=True)
class Row:
    scenario: str
    method: str
    sweep_name: str
    sweep_value: float
    metric: str
    value: float
    trials: int
    seed: int


def read_rows(path) -> list[Row]:
    """Parse one CSV file; header-only or malformed input raises InputError."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise InputError(f"{path}: empty file, expected header {','.join(HEADER)}")
            if tuple(header) != HEADER:
                raise InputError(
                    f"{path}: header {','.join(header)} does not match "
                    f"expected {','.join(HEADER)}"
                )
            rows = []
            for lineno, rec in enumerate(reader, start=2):
                if len(rec) != len(HEADER):
                    raise InputError(f"{path}:{lineno}: expected {len(HEADER)} fields, got {len(rec)}")
                try:
                    rows.append(Row(
                        scenario=rec[0], method=rec[1], sweep_name=rec[2],
                        sweep_value=float(rec[3]), metric=rec[4],
                        value=float(rec[5]), trials=int(rec[6]), seed=int(rec[7]),
                    ))
                except ValueError as exc:
                    raise InputError(f"{path}:{lineno}: {exc}") from exc
    except OSError as exc:
        raise InputError(f"{path}: {exc}") from exc
    if not rows:
        raise InputError(f"{path}: header only, no data rows to plot")
    return rows


def series_for_metric(rows, metric: str) -> dict:
    """Group rows of one metric as label -> sorted list of (x, value).

    Raises InputError when the metric is absent, naming what is available
    so a wrong --csv/--spec pairing is visible at a glance.
    """
    out: dict = {}
    for r in rows:
        if r.metric == metric:
            out.setdefault(r.method, {})[r.sweep_value] = r.value
    if not out:
        have = sorted({r.metric for r in rows})
        raise InputError(
            f"no rows with metric {metric!r}; the supplied files hold: {', '.join(have)}"
        )
    return {
        label: sorted(points.items()) for label, points in sorted(out.items())
    }
