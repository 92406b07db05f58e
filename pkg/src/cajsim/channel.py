"""Rayleigh fading generators.

Two temporal models are supported:

- block fading: one CN(0, 1) draw per antenna, constant across the frame;
- time-correlated (Jakes) fading: per-symbol evolution with autocorrelation
  R(dn) = J0(0.846 * pi * tau * dn / n_data), where tau is the ratio of the
  data-interval duration to the channel coherence time and n_data is the
  number of data symbols per frame.

Correlated draws are produced by coloring white CN(0, 1) samples with the
Cholesky factor of the Toeplitz covariance.  Factors are cached per
(tau, length, n_data) because frames of one scenario share them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mathcore import NumericalFailure, bessel_j0, sample_cscg

__all__ = [
    "FadingSpec",
    "jakes_covariance",
    "reduced_factor",
    "sample_block",
    "sample_jakes",
    "coherence_time",
    "interval_ratio",
]

CHOLESKY_JITTER = 1e-10

# coherence time rule of thumb: t_c = 0.423 / f_d
COHERENCE_CONSTANT = 0.423


def coherence_time(doppler_hz: float) -> float:
    """Coherence time in seconds for a maximum Doppler shift in Hz."""
    if doppler_hz <= 0.0:
        raise ValueError(f"Doppler shift must be positive, got {doppler_hz}")
    return COHERENCE_CONSTANT / doppler_hz


def interval_ratio(doppler_hz: float, interval_s: float) -> float:
    """tau = data-interval duration over coherence time, the knob FadingSpec uses."""
    return interval_s / coherence_time(doppler_hz)


@dataclass(frozen=True)
class FadingSpec:
    """Temporal fading model for one link.

    Attributes
    ----------
    kind : str
        "block" (constant over the frame) or "jakes" (per-symbol evolution).
    tau : float
        Data interval over coherence time.  Must be 0 for block fading;
        tau = 0 with kind "jakes" degenerates to block fading.
    n_symbols : int
        Frame length N_tf the generated gains must cover.
    n_data : int
        Data symbols per frame; sets the lag normalization of the Jakes
        autocorrelation.
    freeze_pilot : bool
        When True the channel is held at its frame-start value across the
        pilot block and only evolves over the data block.
    """

    kind: str = "block"
    tau: float = 0.0
    n_symbols: int = 1
    n_data: int = 1
    freeze_pilot: bool = False

    def __post_init__(self):
        if self.kind not in ("block", "jakes"):
            raise ValueError(f"unknown fading kind {self.kind!r}")
        if self.kind == "block" and self.tau != 0.0:
            raise ValueError("block fading has no time constant; set tau = 0")
        if self.tau < 0.0:
            raise ValueError(f"tau must be nonnegative, got {self.tau}")
        if self.n_symbols < 1 or self.n_data < 1:
            raise ValueError("n_symbols and n_data must be positive")
        if self.n_data > self.n_symbols:
            raise ValueError(
                f"n_data = {self.n_data} exceeds frame length {self.n_symbols}"
            )

    @property
    def constant(self) -> bool:
        return self.kind == "block" or self.tau == 0.0


def jakes_covariance(tau: float, length: int, n_data: int) -> np.ndarray:
    """Toeplitz autocorrelation matrix R[i, j] = J0(0.846 pi tau |i - j| / n_data)."""
    lags = np.arange(length, dtype=np.float64)
    row = bessel_j0(0.846 * np.pi * tau * lags / n_data)
    idx = np.abs(lags[:, None] - lags[None, :]).astype(np.intp)
    return row[idx]


_CHOL_CACHE: dict[tuple[float, int, int], np.ndarray] = {}
_KL_CACHE: dict[tuple[float, int, int], np.ndarray] = {}

# eigenvalues below this fraction of the largest carry no sampling weight
KL_RELATIVE_FLOOR = 1e-12


def reduced_factor(tau: float, length: int, n_data: int) -> np.ndarray:
    """Thin factor F with F @ F.T equal to the Jakes covariance.

    A frame oversamples the fading process by orders of magnitude (well under
    one Doppler cycle per block), so the Toeplitz covariance is numerically
    low rank.  Keeping only eigenpairs above KL_RELATIVE_FLOOR reproduces it
    to float precision with a handful of columns, which makes batched
    coloring O(length * rank) instead of O(length^2) per sequence.
    """
    key = (float(tau), int(length), int(n_data))
    cached = _KL_CACHE.get(key)
    if cached is not None:
        return cached
    cov = jakes_covariance(tau, length, n_data)
    eigvals, eigvecs = np.linalg.eigh(cov)
    eigvals = eigvals[::-1]
    eigvecs = eigvecs[:, ::-1]
    if eigvals[0] <= 0.0:
        raise NumericalFailure(
            f"covariance for tau={tau}, length={length} has no positive spectrum"
        )
    rank = int(np.count_nonzero(eigvals > KL_RELATIVE_FLOOR * eigvals[0]))
    factor = eigvecs[:, :rank] * np.sqrt(eigvals[:rank])
    _KL_CACHE[key] = factor
    return factor


def _cholesky_factor(tau: float, length: int, n_data: int) -> np.ndarray:
    key = (float(tau), int(length), int(n_data))
    cached = _CHOL_CACHE.get(key)
    if cached is not None:
        return cached
    cov = jakes_covariance(tau, length, n_data)
    try:
        factor = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        # slow fading makes R numerically semidefinite; a tiny ridge fixes it
        try:
            factor = np.linalg.cholesky(cov + CHOLESKY_JITTER * np.eye(length))
        except np.linalg.LinAlgError as exc:
            raise NumericalFailure(
                f"covariance for tau={tau}, length={length} is not positive definite"
            ) from exc
    _CHOL_CACHE[key] = factor
    return factor


def sample_block(rng: np.random.Generator, k: int, n_symbols: int) -> np.ndarray:
    """Block-fading gains: one CN(0, 1) draw per antenna, repeated over the frame."""
    col = sample_cscg(rng, k)
    return np.repeat(col[:, None], n_symbols, axis=1)


def sample_jakes(rng: np.random.Generator, k: int, spec: FadingSpec) -> np.ndarray:
    """Per-symbol fading gains of shape (k, spec.n_symbols).

    Constant specs delegate to :func:`sample_block` so that tau = 0 consumes
    the random stream identically to explicit block fading.
    """
    if spec.constant:
        return sample_block(rng, k, spec.n_symbols)
    n_pilot = spec.n_symbols - spec.n_data
    if spec.freeze_pilot and n_pilot > 0:
        # one draw anchors the whole pilot block, then the data block evolves
        length = spec.n_data + 1
        factor = _cholesky_factor(spec.tau, length, spec.n_data)
        white = sample_cscg(rng, (k, length))
        path = white @ factor.T
        pilot = np.repeat(path[:, :1], n_pilot, axis=1)
        return np.concatenate([pilot, path[:, 1:]], axis=1)
    factor = _cholesky_factor(spec.tau, spec.n_symbols, spec.n_data)
    white = sample_cscg(rng, (k, spec.n_symbols))
    return white @ factor.T
