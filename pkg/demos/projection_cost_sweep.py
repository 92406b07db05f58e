"""What one projected-out dimension costs at the symbol error level.

Sweeps signal SNR for the small cluster under a 40 dB jammer and compares
the subspace-projecting receivers against a no-jammer baseline of the
same array size.  The jammer itself is almost irrelevant once projected;
the visible penalty is the lost degree of freedom plus the direction
error of each estimator.  Reduced trial counts keep this demo around two
minutes; the full-trial numbers are pinned by the acceptance suite.

Run:  python3 demos/projection_cost_sweep.py
"""

import dataclasses
import pathlib

import numpy as np

from cajsim.harness import emit_csv, load_scenario, run_scenario

TRIALS = 2000
LABELS = ("EV-CAJ", "NLS-CAJ", "No JN K=4")

scn = load_scenario("fig8-ser-k4", trials=TRIALS)
scn = dataclasses.replace(
    scn, series=tuple(s for s in scn.series if s.label in LABELS)
)

print(f"running {scn.id} at {TRIALS} trials per point...")
records, _ = run_scenario(scn)

curves = {
    lab: [r.value for r in records if r.method == lab and r.metric == "ser"]
    for lab in LABELS
}
xs = list(scn.sweep_values)

print("\ngamma_ts [dB]   " + "   ".join(f"{lab:>9s}" for lab in LABELS))
for i, v in enumerate(xs):
    row = "   ".join(f"{curves[lab][i]:9.2e}" for lab in LABELS)
    print(f"{v:13g}   {row}")


def crossing(ys, target):
    """Sweep value where the curve first drops to target (log-linear)."""
    for (x0, y0), (x1, y1) in zip(zip(xs, ys), list(zip(xs, ys))[1:]):
        if y0 > target >= y1 and y1 > 0:
            return x0 + np.log10(target / y0) / np.log10(y1 / y0) * (x1 - x0)
    return None


base = crossing(curves["No JN K=4"], 1e-3)
print(f"\nSNR needed for SER 1e-3, no jammer: {base:.2f} dB")
for lab in ("EV-CAJ", "NLS-CAJ"):
    c = crossing(curves[lab], 1e-3)
    print(f"{lab}: {c:.2f} dB, extra {c - base:.2f} dB")

out = pathlib.Path("out")
out.mkdir(exist_ok=True)
emit_csv(records, out / "projection-cost-ser.csv")
print(f"\nwrote {out / 'projection-cost-ser.csv'}")
