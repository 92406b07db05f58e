"""Measured outage next to its closed-form prediction.

Runs a reduced-trial version of the fig7-outage-k preset for the small
cluster and prints the Monte Carlo outage probability side by side with
the closed-form value at every swept signal SNR.  The two columns should
agree to within Monte Carlo noise; the bundled acceptance suite holds the
full-trial gap under 0.02.

Also writes both record sets as CSV next to this script's working
directory (out/), in the same schema the CLI emits, so they can be fed to
external plotting.

Run:  python3 demos/outage_overlay.py      (about a minute)
"""

import dataclasses
import pathlib

from cajsim.harness import analytic_records, emit_csv, load_scenario, run_scenario

TRIALS = 4000

scn = load_scenario("fig7-outage-k", trials=TRIALS)
keep = tuple(s for s in scn.series if s.label in ("EV K=4 th=-10", "EV K=4 th=-5"))
scn = dataclasses.replace(scn, series=keep)

print(f"running {scn.id} at {TRIALS} trials per point "
      f"({len(keep)} series x {len(scn.sweep_values)} points)...")
records, manifest = run_scenario(scn)
analytic = analytic_records(scn)

mc = {(r.method, r.sweep_value): r.value for r in records if r.metric == "outage"}
an = {(r.method, r.sweep_value): r.value for r in analytic}

for label in (s.label for s in keep):
    print(f"\n{label}")
    print("gamma_ts [dB]   measured   closed form   |gap|")
    worst = 0.0
    for v in scn.sweep_values:
        gap = abs(mc[(label, v)] - an[(label, v)])
        worst = max(worst, gap)
        print(f"{v:13g}   {mc[(label, v)]:8.4f}   {an[(label, v)]:11.4f}   {gap:6.4f}")
    print(f"max gap {worst:.4f}")

out = pathlib.Path("out")
out.mkdir(exist_ok=True)
emit_csv(records, out / "outage-overlay-mc.csv")
emit_csv(analytic, out / "outage-overlay-analytic.csv")
print(f"\nwrote {out / 'outage-overlay-mc.csv'} and {out / 'outage-overlay-analytic.csv'}")
