"""Jamming-direction estimators.

All estimators consume only the received pilot block and the known pilot
waveforms.  They exploit the same structural fact: projecting the pilot
block onto the orthogonal complement of the pilot subspace removes the
transmitting nodes' contribution exactly, leaving jammer plus noise.

Two flavors differ in how much of that complement they use:

- the single-direction estimator correlates against one complement vector
  (cheap, but it sees only a 1/(n_tp - 1) slice of the jammer energy);
- the subspace estimator forms the full projected block and takes dominant
  left singular vectors (near the estimation-error floor).

Estimated directions follow the package phase convention: the
largest-modulus entry of each column is real positive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mathcore import fix_phase, orthonormal_complement, svd
from .signal import ConfigurationError

__all__ = [
    "DegenerateEstimate",
    "EstimationResult",
    "nls_estimate",
    "ev_estimate",
    "multi_jam_estimate",
]

DEGENERATE_NORM = 1e-12


class DegenerateEstimate(RuntimeError):
    """The observation carries no usable jammer component."""


@dataclass(frozen=True)
class EstimationResult:
    """Estimated jamming subspace.

    Attributes
    ----------
    g_hat : ndarray
        (k, k_j) unit columns spanning the estimated jamming subspace.
    g_perp : ndarray
        (k, k - k_j) orthonormal basis of its orthogonal complement; the
        projector used by the detection stage.
    residual_energy : float
        Projected pilot-block energy left outside the estimated subspace.
        Zero by definition for the single-direction estimator.
    """

    g_hat: np.ndarray
    g_perp: np.ndarray
    residual_energy: float


def _as_pilot_matrix(pilots: np.ndarray) -> np.ndarray:
    p = np.asarray(pilots, dtype=np.complex128)
    if p.ndim == 1:
        p = p[:, None]
    if p.ndim != 2:
        raise ConfigurationError(f"pilots must be a vector or matrix, got shape {p.shape}")
    return p


def nls_estimate(y_tp: np.ndarray, pilot: np.ndarray) -> EstimationResult:
    """Single-direction estimate from one pilot-orthogonal correlation.

    Parameters
    ----------
    y_tp : ndarray
        (k, n_tp) received pilot block.
    pilot : ndarray
        (n_tp,) pilot waveform of the single transmitting node.

    Raises
    ------
    DegenerateEstimate
        When the correlated observation is numerically zero (no jammer and
        no noise), so no direction is identifiable.
    """
    y = np.asarray(y_tp, dtype=np.complex128)
    p = _as_pilot_matrix(pilot)
    if p.shape[1] != 1:
        raise ConfigurationError(
            f"single-direction estimation supports one pilot stream, got {p.shape[1]}"
        )
    if y.ndim != 2 or y.shape[1] != p.shape[0]:
        raise ConfigurationError(
            f"pilot block {y.shape} does not match pilot length {p.shape[0]}"
        )
    s_perp = orthonormal_complement(p)[:, 0]
    raw = y @ s_perp.conj()
    norm = np.linalg.norm(raw)
    if norm < DEGENERATE_NORM:
        raise DegenerateEstimate(
            f"projected observation norm {norm:.3e} is below {DEGENERATE_NORM:.0e}"
        )
    g_hat = fix_phase((raw / norm)[:, None])
    g_perp = orthonormal_complement(g_hat)
    return EstimationResult(g_hat=g_hat, g_perp=g_perp, residual_energy=0.0)


def multi_jam_estimate(y_tp: np.ndarray, pilots: np.ndarray, k_j: int) -> EstimationResult:
    """Rank-k_j subspace estimate from the pilot-orthogonal projection.

    The received pilot block is projected onto the orthogonal complement of
    the pilot subspace; the top k_j left singular vectors of the projected
    block span the estimated jamming subspace (the best rank-k_j fit in the
    Frobenius sense), the remaining left singular vectors its complement.
    """
    y = np.asarray(y_tp, dtype=np.complex128)
    p = _as_pilot_matrix(pilots)
    if y.ndim != 2 or y.shape[1] != p.shape[0]:
        raise ConfigurationError(
            f"pilot block {y.shape} does not match pilot length {p.shape[0]}"
        )
    k = y.shape[0]
    if not 1 <= k_j < k:
        raise ConfigurationError(f"need 1 <= k_j < k, got k_j={k_j}, k={k}")
    s_perp = orthonormal_complement(p)
    z = y @ s_perp.conj()
    res = svd(z, full=True)
    g_hat = res.u[:, :k_j]
    g_perp = res.u[:, k_j:]
    residual = float(np.sum(res.s[k_j:] ** 2))
    return EstimationResult(g_hat=g_hat, g_perp=g_perp, residual_energy=residual)


def ev_estimate(y_tp: np.ndarray, pilots: np.ndarray) -> EstimationResult:
    """Dominant-direction subspace estimate, the k_j = 1 case."""
    return multi_jam_estimate(y_tp, pilots, 1)
