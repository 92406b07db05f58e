"""Closed-form predictions and Monte Carlo metrics.

The closed forms cover the estimation side (Fisher information and the
resulting error variance of the jamming-direction estimate) and the detection
side (post-projection SNR factor beta and the outage probability of the
zero-forcing receiver).  Conventions used throughout:

- sigma2 is the per-sample receiver noise variance;
- sig_power is the per-symbol transmit power of a transmitting node;
- jam_power is the jammer energy accumulated over the pilot block, i.e.
  per-symbol jammer power times N_tp;
- jam_projection_energy is the part of that energy visible to the estimator:
  the jammer pilot-block waveform energy inside the subspace the estimator
  actually observes.  It is bounded by jam_power.

The direction error variance assumes receive vectors normalized so that
E ||g||^2 = k, which is what unit-variance Rayleigh entries give.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mathcore import chi2_cdf

__all__ = [
    "MetricError",
    "MetricsRecord",
    "AnalyticInputs",
    "received_jam_snr_nls",
    "received_jam_snr_ev",
    "fim_diag",
    "crlb_direction_var",
    "beta_factor",
    "outage_analytical",
    "complexity_nrm",
    "residual_error_variance",
    "post_projection_snr",
    "msad",
    "cosine_angle_deg",
    "ser",
    "empirical_outage",
]


class MetricError(ValueError):
    """A metric was asked to summarize an empty or inconsistent sample."""


@dataclass(frozen=True)
class MetricsRecord:
    """One (scenario, series, sweep point) result row for CSV persistence."""

    scenario: str
    method: str
    sweep_name: str
    sweep_value: float
    metric: str
    value: float
    trials: int
    seed: int

    def __post_init__(self):
        if self.trials < 1:
            raise MetricError(f"record needs trials >= 1, got {self.trials}")
        if not np.isfinite(self.value):
            raise MetricError(
                f"non-finite value for {self.scenario}/{self.method}/{self.metric} "
                f"at {self.sweep_name}={self.sweep_value}"
            )


@dataclass(frozen=True)
class AnalyticInputs:
    """Inputs shared by the closed-form predictions."""

    k: int
    k_j: int
    n_tp: int
    n_td: int
    sigma2: float
    sig_power: float
    jam_power: float
    jam_projection_energy: float
    gamma_th: float

    def __post_init__(self):
        if self.k < 2 or not 1 <= self.k_j < self.k:
            raise MetricError(f"invalid cluster geometry k={self.k}, k_j={self.k_j}")
        if self.n_tp < 2 or self.n_td < 1:
            raise MetricError(f"invalid block lengths n_tp={self.n_tp}, n_td={self.n_td}")
        if self.sigma2 <= 0.0 or self.sig_power < 0.0 or self.jam_power < 0.0:
            raise MetricError("powers must be nonnegative and sigma2 positive")
        if self.jam_projection_energy < 0.0:
            raise MetricError("jam_projection_energy must be nonnegative")
        if self.jam_projection_energy > self.jam_power * (1.0 + 1e-9) + 1e-12:
            raise MetricError(
                f"projection energy {self.jam_projection_energy} exceeds the "
                f"pilot-block jammer energy {self.jam_power}"
            )


def received_jam_snr_nls(inputs: AnalyticInputs) -> float:
    """Received jamming SNR seen by the single-direction estimator.

    The estimator observes the jammer through one unit vector, so the
    relevant energy is the projection onto that vector.  The 1/k from
    averaging over receive nodes cancels against E ||g||^2 = k.
    """
    g_norm2 = float(inputs.k)
    return inputs.jam_projection_energy * g_norm2 / (inputs.k * inputs.sigma2)


def received_jam_snr_ev(inputs: AnalyticInputs) -> float:
    """Received jamming SNR per retained dimension for the subspace estimator.

    The pilot-orthogonal subspace has n_tp - 1 dimensions (single stream), so
    the same projected energy is spread over n_tp - 1 observations.
    """
    g_norm2 = float(inputs.k)
    return (
        inputs.jam_projection_energy
        * g_norm2
        / (inputs.k * (inputs.n_tp - 1) * inputs.sigma2)
    )


def fim_diag(inputs: AnalyticInputs) -> float:
    """Diagonal of the Fisher information for one entry of the jammer channel.

    The observation model behind it: z_n = g a_n + w_n with known a_n and
    CN(0, sigma2) noise gives information sum_n |a_n|^2 / sigma2, and
    sum_n |a_n|^2 is exactly the projection energy.
    """
    return inputs.jam_projection_energy / inputs.sigma2


def crlb_direction_var(inputs: AnalyticInputs) -> float:
    """Error variance bound for the normalized jamming direction.

    Normalizing by ||g||^2 = k converts the per-entry bound 1/fim into the
    direction-error variance sigma_eps^2.
    """
    info = fim_diag(inputs)
    if info <= 0.0:
        raise MetricError("Fisher information is zero; no jammer energy observed")
    return 1.0 / (inputs.k * info)


def beta_factor(inputs: AnalyticInputs, method: str) -> float:
    """Scale of the post-detection SNR: gamma_rs = beta * X with
    X ~ chi-squared_{2(k-1)} / 2.

    The method selects which projection energy convention the caller filled
    in; the formula itself is shared.  Returns 0 when the estimator saw no
    jammer energy while a jammer is active (detection is then jam-limited).
    """
    if method not in ("EV", "NLS"):
        raise MetricError(f"beta_factor knows methods EV and NLS, got {method!r}")
    if inputs.jam_projection_energy <= 0.0:
        if inputs.jam_power <= 0.0:
            ratio = 0.0
        else:
            return 0.0
    else:
        ratio = inputs.jam_power / inputs.jam_projection_energy
    return inputs.sig_power / (inputs.sigma2 * (inputs.k - 1) * (ratio + 1.0))


def outage_analytical(k: int, beta: float, gamma_th: float) -> float:
    """P(gamma_rs < gamma_th) for gamma_rs = beta * chi2_{2(k-1)} / 2."""
    if gamma_th < 0.0:
        raise MetricError(f"gamma_th must be nonnegative, got {gamma_th}")
    if beta <= 0.0:
        return 1.0
    return float(chi2_cdf(2.0 * gamma_th / beta, 2 * (k - 1)))


def complexity_nrm(method: str, k: int, k_j: int, n_tp: int, n_td: int) -> int:
    """Number of real multiplications per frame for each receiver front end."""
    n_tf = n_tp + n_td
    if method == "EV":
        return k * n_tp**2 + k**2 * (2 * n_tp + n_td) - k * k_j * n_tf
    if method == "NLS":
        return k**2 * (2 * n_tp + n_td) - k * k_j * n_tf
    if method == "NONE":
        return k * n_tf
    raise MetricError(f"complexity_nrm knows EV, NLS, NONE, got {method!r}")


def residual_error_variance(residual_energy: float, k: int) -> float:
    """Direction-error variance estimated from residual jamming energy.

    ``residual_energy`` is the mean over frames of ||G_perp^H g||^2 with the
    unnormalized jamming channel.  The projector removes the estimate but
    passes its error, whose energy spreads over k - 1 retained dimensions at
    k sigma_eps^2 each, so the per-entry variance is the mean divided by
    k (k - 1).  A variance is an ensemble quantity; a single frame only
    supplies one squared-error sample.
    """
    if k < 2:
        raise MetricError(f"error variance needs k >= 2, got {k}")
    if residual_energy < 0.0:
        raise MetricError(f"residual energy must be nonnegative, got {residual_energy}")
    return residual_energy / (k * (k - 1))


def post_projection_snr(
    f_energy, sigma_eps_sq, k: int, sig_power: float, jam_block_energy: float, sigma2: float
):
    """Per-frame received SNR proxy used for empirical outage.

    Combines the realized transformed-channel energy ||f||^2 with a
    direction-error variance, typically the measured one from
    residual_error_variance.
    """
    f_energy = np.asarray(f_energy, dtype=np.float64)
    eps2 = np.asarray(sigma_eps_sq, dtype=np.float64)
    denom = (k - 1) * (k * eps2 * jam_block_energy + sigma2)
    out = f_energy * sig_power / denom
    return float(out) if out.ndim == 0 else out


def msad(g_hat, g_true) -> float:
    """Mean squared amplitude deviation between estimated and true directions.

    Accepts single vectors or stacks with trailing axis k; the deviation is
    computed elementwise on moduli, then summed over k and averaged over the
    stack.
    """
    a = np.atleast_2d(np.asarray(g_hat))
    b = np.atleast_2d(np.asarray(g_true))
    if a.size == 0 or a.shape != b.shape:
        raise MetricError(f"incompatible or empty stacks {a.shape} vs {b.shape}")
    dev = np.abs(a) - np.abs(b)
    return float(np.mean(np.sum(dev * dev, axis=-1)))


def cosine_angle_deg(a, b) -> float:
    """Angle between complex vectors in degrees, invariant to phase and scale."""
    a = np.asarray(a).ravel()
    b = np.asarray(b).ravel()
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise MetricError("angle with a zero vector is undefined")
    c = np.abs(a.conj() @ b) / (na * nb)
    return float(np.degrees(np.arccos(np.clip(c, 0.0, 1.0))))


def ser(detected, truth) -> float:
    """Symbol error rate between integer index arrays of identical shape."""
    d = np.asarray(detected)
    t = np.asarray(truth)
    if d.size == 0 or d.shape != t.shape:
        raise MetricError(f"incompatible or empty index arrays {d.shape} vs {t.shape}")
    return float(np.mean(d != t))


def empirical_outage(snr_samples, gamma_th: float) -> float:
    """Fraction of per-frame SNR samples that fall below the threshold."""
    s = np.asarray(snr_samples, dtype=np.float64)
    if s.size == 0:
        raise MetricError("empirical outage of an empty sample")
    return float(np.mean(s < gamma_th))
