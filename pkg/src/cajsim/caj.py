"""Projection, transformed-channel estimation, and zero-forcing detection.

Given an estimated jamming subspace, detection works entirely in its
orthogonal complement: both the pilot block and the data block are projected
with g_perp, the effective (transformed) channel is fit by least squares on
the projected pilots, and the data symbols are recovered by zero forcing.

``run_pipeline`` chains the stages for one frame under one of four methods:

- "NLS": single-direction estimate (one pilot stream, one jammer);
- "EV": subspace estimate, any k_j < k;
- "PERFECT": the true jammer directions, orthonormalized (genie bound);
- "NONE": no projection at all, plain least squares plus zero forcing.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import analysis
from .estimator import EstimationResult, ev_estimate, multi_jam_estimate, nls_estimate
from .mathcore import orthonormal_complement, orthonormalize
from .signal import ConfigurationError, Frame, FrameConfig, qpsk_slice

__all__ = [
    "DetectionInfeasible",
    "CajState",
    "METHODS",
    "estimate_transformed_channel",
    "zf_detect",
    "true_jam_directions",
    "run_pipeline",
    "PipelineResult",
]

METHODS = ("NLS", "EV", "PERFECT", "NONE")

# zero forcing refuses transformed channels with condition number above this
CONDITION_LIMIT = 1e8


class DetectionInfeasible(RuntimeError):
    """The transformed channel is too ill conditioned to invert."""


@dataclass(frozen=True)
class CajState:
    """Projector plus fitted transformed channel, ready for detection."""

    g_perp: np.ndarray  # (k, k - k_j)
    f_hat: np.ndarray  # (k - k_j, k_t)


def estimate_transformed_channel(
    g_perp: np.ndarray, y_tp: np.ndarray, pilots: np.ndarray
) -> CajState:
    """Least-squares fit of the projected channel from the pilot block.

    Column i of the result is g_perp^H y_tp conj(s_i) / ||s_i||^2, the
    per-stream matched-filter estimate after projection.
    """
    g_perp = np.asarray(g_perp, dtype=np.complex128)
    y = np.asarray(y_tp, dtype=np.complex128)
    p = np.asarray(pilots, dtype=np.complex128)
    if p.ndim == 1:
        p = p[:, None]
    if y.shape[0] != g_perp.shape[0] or y.shape[1] != p.shape[0]:
        raise ConfigurationError(
            f"shape mismatch: projector {g_perp.shape}, pilot block {y.shape}, "
            f"pilots {p.shape}"
        )
    norms2 = np.sum(np.abs(p) ** 2, axis=0)
    if np.any(norms2 < 1e-12):
        raise ConfigurationError("a pilot waveform has (near) zero energy")
    h_ls = y @ p.conj() / norms2
    return CajState(g_perp=g_perp, f_hat=g_perp.conj().T @ h_ls)


def zf_detect(state: CajState, y_td: np.ndarray) -> np.ndarray:
    """Zero-forcing soft symbols (k_t, n_td) from the projected data block.

    Raises
    ------
    DetectionInfeasible
        When the fitted transformed channel has condition number above
        CONDITION_LIMIT, naming the offending value.
    """
    f = state.f_hat
    sv = np.linalg.svd(f, compute_uv=False)
    if sv[0] == 0.0 or sv[-1] == 0.0 or sv[0] / sv[-1] > CONDITION_LIMIT:
        cond = np.inf if sv[-1] == 0.0 else sv[0] / sv[-1]
        raise DetectionInfeasible(
            f"transformed channel condition number {cond:.3e} exceeds {CONDITION_LIMIT:.0e}"
        )
    w = state.g_perp.conj().T @ np.asarray(y_td, dtype=np.complex128)
    gram = f.conj().T @ f
    return np.linalg.solve(gram, f.conj().T @ w)


def true_jam_directions(frame: Frame, anchor: int) -> np.ndarray:
    """Unit-norm true jammer directions at one frame position, orthonormalized."""
    if frame.g_gains is None:
        raise ConfigurationError("frame carries no jammer truth")
    dirs = frame.g_gains[:, :, anchor].T  # (k, k_j)
    return orthonormalize(dirs)


@dataclass
class PipelineResult:
    """Outcome of one frame run: decisions plus diagnostics.

    ``angle_deg`` and ``jam_leakage`` compare the projector against the true
    jammer directions at the pilot-block anchor; they are NaN when no jammer
    truth exists.  ``jam_leakage`` is the squared Frobenius norm of
    g_perp^H G_true divided by k_j: 0 for a perfect projector, 1/k_j per
    fully missed direction.
    """

    method: str
    indices: np.ndarray  # (k_t, n_td) detected QPSK indices
    soft: np.ndarray  # (k_t, n_td) zero-forcing outputs
    state: CajState
    estimate: EstimationResult | None
    ser: float
    angle_deg: float
    jam_leakage: float


def _check_method_feasible(cfg: FrameConfig, method: str) -> None:
    if method not in METHODS:
        raise ConfigurationError(f"unknown method {method!r}, expected one of {METHODS}")
    if method == "NLS":
        if cfg.k_t != 1:
            raise ConfigurationError("NLS supports a single transmitting node")
        if cfg.k_j != 1:
            raise ConfigurationError("NLS estimates a single jammer direction")
    if method in ("NLS", "EV", "PERFECT") and cfg.k - cfg.k_j == cfg.k_t:
        warnings.warn(
            f"k - k_j = k_t = {cfg.k_t}: zero forcing has no diversity margin",
            RuntimeWarning,
            stacklevel=3,
        )


def run_pipeline(cfg: FrameConfig, frame: Frame, method: str) -> PipelineResult:
    """Estimate, project, fit, and detect one frame with the chosen method."""
    _check_method_feasible(cfg, method)
    anchor = cfg.n_tp - 1  # channel state at the end of the pilot block

    estimate: EstimationResult | None = None
    if method == "NLS":
        estimate = nls_estimate(frame.y_tp, frame.pilots[:, 0])
        g_perp = estimate.g_perp
    elif method == "EV":
        if cfg.k_j == 1:
            estimate = ev_estimate(frame.y_tp, frame.pilots)
        else:
            estimate = multi_jam_estimate(frame.y_tp, frame.pilots, cfg.k_j)
        g_perp = estimate.g_perp
    elif method == "PERFECT":
        g_true = true_jam_directions(frame, anchor)
        g_perp = orthonormal_complement(g_true)
    else:  # NONE: keep all dimensions
        g_perp = np.eye(cfg.k, dtype=np.complex128)

    state = estimate_transformed_channel(g_perp, frame.y_tp, frame.pilots)
    soft = zf_detect(state, frame.y_td)
    indices = qpsk_slice(soft)

    angle = float("nan")
    leakage = float("nan")
    if frame.g_gains is not None and method != "NONE":
        g_true = true_jam_directions(frame, anchor)
        leakage = float(np.linalg.norm(g_perp.conj().T @ g_true) ** 2) / cfg.k_j
        if cfg.k_j == 1 and estimate is not None:
            angle = analysis.cosine_angle_deg(estimate.g_hat[:, 0], g_true[:, 0])
        elif method == "PERFECT":
            angle = 0.0

    return PipelineResult(
        method=method,
        indices=indices,
        soft=soft,
        state=state,
        estimate=estimate,
        ser=analysis.ser(indices, frame.tn_indices),
        angle_deg=angle,
        jam_leakage=leakage,
    )
