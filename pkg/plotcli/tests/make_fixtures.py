"""Regenerate the miniature CSV fixtures under tests/data/.

Run manually when the sweep schema or the presets change:

    python3 tests/make_fixtures.py

Needs the simulator package installed.  The test suite itself never
imports it; the committed CSV files are the only coupling between the
two packages.  Trial counts are tiny on purpose: the renderer does not
care how converged a curve is.
"""

import dataclasses
import pathlib
import sys

from cajsim.harness import analytic_records, emit_csv, load_scenario, run_scenario

DATA = pathlib.Path(__file__).parent / "data"
TRIALS = {"default": 4, "fig16-contour-k16": 2}


def main() -> int:
    DATA.mkdir(exist_ok=True)
    ids = [
        "fig3-msad", "fig4-msad-ntp", "fig5-angle", "fig6-outage",
        "fig7-outage-k", "fig8-ser-k4", "fig9-ser-k16", "fig10-2jn-k4",
        "fig11-2jn-k16", "fig12-multikj", "fig13-multitn", "fig14-tv",
        "fig15-contour", "fig16-contour-k16",
    ]
    for sid in ids:
        scn = load_scenario(sid, trials=TRIALS.get(sid, TRIALS["default"]))
        records, _ = run_scenario(scn)
        emit_csv(records, DATA / f"{sid}.csv")
        print(f"{sid}: {len(records)} rows", flush=True)
    for sid in ("fig6-outage", "fig7-outage-k"):
        scn = load_scenario(sid)
        emit_csv(analytic_records(scn), DATA / f"{sid}-analytic.csv")
        print(f"{sid}: analytic rows", flush=True)
    return 0


if __name__ == "__main__":
    sys.exit(main())
