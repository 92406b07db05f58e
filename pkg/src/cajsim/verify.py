"""Runtime invariant suite behind ``cajsim verify``.

Five self-contained checks, each fast enough for a pre-flight sanity run:

1. pilot basis plus its orthonormal complement preserves energy;
2. the direction metrics ignore a common phase on either argument;
3. a scenario run is bitwise identical for 1 and 2 workers;
4. time-varying gains reproduce the Bessel autocorrelation profile,
   through the reference sampler and through the engine draw path;
5. the measured direction-error variance of the subspace estimator sits
   on its information bound at high jammer power.

Checks raise :class:`VerificationError` with the offending numbers;
otherwise they return a one-line summary for the CLI to print.
"""

from __future__ import annotations

import numpy as np

from .analysis import AnalyticInputs, crlb_direction_var, cosine_angle_deg, msad, residual_error_variance
from .channel import FadingSpec, sample_jakes
from .harness import (
    ScenarioConfig,
    SeriesSpec,
    draw_chunk,
    format_records,
    process_chunk,
    run_scenario,
    stream_rng,
)
from .mathcore import NumericalFailure, bessel_j0, orthonormal_complement, orthonormalize, sample_cscg
from .signal import make_config, make_pilots

__all__ = [
    "VerificationError",
    "PARSEVAL_TOL",
    "PHASE_TOL",
    "JAKES_TOL",
    "CRLB_REL_TOL",
    "check_basis_completeness",
    "check_phase_invariance",
    "check_worker_determinism",
    "check_jakes_autocorrelation",
    "check_error_variance_bound",
    "run_all",
]

PARSEVAL_TOL = 1e-9
PHASE_TOL = 1e-12
JAKES_TOL = 0.03
CRLB_REL_TOL = 0.20

_SEED = 20260825


class VerificationError(NumericalFailure):
    """An invariant check found a violation."""


def check_basis_completeness() -> str:
    """Pilot basis plus complement is a complete orthonormal basis."""
    rng = np.random.default_rng(_SEED)
    worst = 0.0
    for n_tp, k_t in ((10, 1), (20, 1), (20, 2), (50, 4), (7, 3)):
        pilots = make_pilots(n_tp, k_t, per_symbol_power=2.0)
        basis = orthonormalize(pilots)
        full = np.hstack([basis, orthonormal_complement(basis)])
        for _ in range(40):
            x = sample_cscg(rng, (n_tp,))
            lhs = float(np.sum(np.abs(full.conj().T @ x) ** 2))
            rhs = float(np.sum(np.abs(x) ** 2))
            worst = max(worst, abs(lhs - rhs) / rhs)
    if worst > PARSEVAL_TOL:
        raise VerificationError(
            f"basis completeness: relative energy defect {worst:.3e} "
            f"exceeds {PARSEVAL_TOL:.0e}"
        )
    return f"basis completeness: max relative energy defect {worst:.3e} (<= {PARSEVAL_TOL:.0e})"


def check_phase_invariance() -> str:
    """msad and the subspace angle are blind to a common phase factor."""
    rng = np.random.default_rng(_SEED + 1)
    worst = 0.0
    for k in (4, 8, 16):
        for _ in range(60):
            g_hat = sample_cscg(rng, (k,))
            g_hat /= np.linalg.norm(g_hat)
            g_true = sample_cscg(rng, (k,))
            phase = np.exp(2j * np.pi * rng.random())
            worst = max(
                worst,
                abs(msad(g_hat * phase, g_true) - msad(g_hat, g_true)),
                abs(
                    cosine_angle_deg(g_hat * phase, g_true)
                    - cosine_angle_deg(g_hat, g_true * phase.conj())
                ),
            )
    if worst > PHASE_TOL:
        raise VerificationError(
            f"phase invariance: metric shift {worst:.3e} exceeds {PHASE_TOL:.0e}"
        )
    return f"phase invariance: max metric shift {worst:.3e} (<= {PHASE_TOL:.0e})"


def _worker_scenario() -> ScenarioConfig:
    return ScenarioConfig(
        id="verify-workers",
        title="worker-count determinism probe",
        metric="ser",
        sweep_name="gamma_ts_db",
        sweep_values=(6.0, 10.0),
        base=(
            ("k", 4), ("k_t", 1), ("k_j", 1), ("n_tp", 20), ("n_td", 60),
            ("gamma_ts_db", 10.0), ("gamma_tj_db", 30.0), ("gamma_th_db", -10.0),
        ),
        series=(
            SeriesSpec(label="EV", method="EV"),
            SeriesSpec(label="NLS", method="NLS"),
        ),
        trials=2560,
        master_seed=_SEED,
    )


def check_worker_determinism() -> str:
    """Serial and two-worker runs emit byte-identical CSV text."""
    scn = _worker_scenario()
    serial, _ = run_scenario(scn, worker_count=1)
    parallel, _ = run_scenario(scn, worker_count=2)
    a, b = format_records(serial), format_records(parallel)
    if a != b:
        diff = sum(1 for x, y in zip(a.splitlines(), b.splitlines()) if x != y)
        raise VerificationError(
            f"worker determinism: 1-worker and 2-worker CSV differ on {diff} lines"
        )
    return f"worker determinism: 1 vs 2 workers byte-identical over {len(a.splitlines()) - 1} rows"


def _lag_correlation(x: np.ndarray, lag: int) -> float:
    # x: (..., n) unit-variance complex gains
    prod = x[..., :-lag] * x[..., lag:].conj() if lag else np.abs(x) ** 2
    return float(np.mean(prod.real))


def check_jakes_autocorrelation() -> str:
    """Empirical gain autocorrelation tracks the Bessel profile.

    Covered twice: the per-frame reference sampler and the batched engine
    draw path (which uses the truncated covariance factor).
    """
    n_symbols, n_data, tau = 60, 50, 0.3
    lags = (1, 10, 25, 59)
    theory = {lag: float(bessel_j0(0.846 * np.pi * tau * lag / n_data)) for lag in lags}

    spec = FadingSpec(kind="jakes", tau=tau, n_symbols=n_symbols, n_data=n_data)
    rng = np.random.default_rng(_SEED + 2)
    ref = np.stack([sample_jakes(rng, 4, spec) for _ in range(1500)])

    cfg = make_config(4, 1, 1, n_symbols - n_data, n_data, 10.0, 30.0, -10.0, tau_h=tau)
    draws = draw_chunk(cfg, 6000, stream_rng(_SEED + 3), jam=False, with_data=True)
    eng = draws.h[0][:, :, :n_symbols]

    worst, where = 0.0, ""
    for path, x in (("reference", ref), ("engine", eng)):
        for lag in lags:
            gap = abs(_lag_correlation(x, lag) - theory[lag])
            if gap > worst:
                worst, where = gap, f"{path} lag {lag}"
    if worst > JAKES_TOL:
        raise VerificationError(
            f"autocorrelation: {where} off the Bessel profile by {worst:.4f} "
            f"(tolerance {JAKES_TOL})"
        )
    return f"autocorrelation: max deviation {worst:.4f} at {where or 'n/a'} (<= {JAKES_TOL})"


def check_error_variance_bound() -> str:
    """Measured subspace direction-error variance meets its bound.

    At 30 and 40 dB jammer SNR the estimator is information-limited, so the
    ensemble variance measured from projector leakage must sit within 20%
    of the closed-form bound evaluated at the mean projection energy.
    """
    scn = ScenarioConfig(
        id="verify-crlb",
        title="direction-error variance probe",
        metric="outage",
        sweep_name="gamma_tj_db",
        sweep_values=(30.0, 40.0),
        base=(
            ("k", 4), ("k_t", 1), ("k_j", 1), ("n_tp", 50), ("n_td", 100),
            ("gamma_ts_db", 10.0), ("gamma_tj_db", 40.0), ("gamma_th_db", -10.0),
        ),
        series=(SeriesSpec(label="EV", method="EV"),),
        trials=4000,
        master_seed=_SEED,
    )
    worst, where = 0.0, ""
    for vi, gamma_tj in enumerate(scn.sweep_values):
        cfg = scn.frame_config(vi, 0)
        _, detail = process_chunk(scn, vi, 0, 0, scn.trials, detail=True)
        measured = residual_error_variance(float(np.mean(detail["residual"])), cfg.k)
        bound = crlb_direction_var(
            AnalyticInputs(
                k=cfg.k,
                k_j=cfg.k_j,
                n_tp=cfg.n_tp,
                n_td=cfg.n_td,
                sigma2=cfg.sigma2,
                sig_power=cfg.p_s,
                jam_power=cfg.n_tp * cfg.p_j,
                jam_projection_energy=(cfg.n_tp - cfg.k_t) * cfg.p_j,
                gamma_th=cfg.gamma_th,
            )
        )
        rel = abs(measured / bound - 1.0)
        if rel > worst:
            worst, where = rel, f"{gamma_tj:g} dB"
    if worst > CRLB_REL_TOL:
        raise VerificationError(
            f"error-variance bound: measured/bound off by {worst:.1%} at "
            f"{where} (tolerance {CRLB_REL_TOL:.0%})"
        )
    return f"error-variance bound: max |measured/bound - 1| = {worst:.1%} (<= {CRLB_REL_TOL:.0%})"


CHECKS = (
    check_basis_completeness,
    check_phase_invariance,
    check_worker_determinism,
    check_jakes_autocorrelation,
    check_error_variance_bound,
)


def run_all() -> list[str]:
    """Run every check; returns their summary lines, raising on first failure."""
    return [check() for check in CHECKS]
