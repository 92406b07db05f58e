"""Frame geometry, modulation, pilots, and received-signal assembly.

A frame is N_tf = N_tp + N_td symbols long: an orthogonal pilot block of
N_tp symbols followed by N_td QPSK data symbols.  K_t transmitting nodes
share the frame; K_j jamming nodes emit independent QPSK at their own power
over the whole frame.  The receiving cluster has K nodes, so received blocks
are K x N_tp and K x N_td.

Transmit powers are parameterized as per-symbol SNRs against the receiver
noise floor: p = sigma2 * 10^(gamma_db / 10).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import FadingSpec, sample_jakes
from .mathcore import sample_cscg

__all__ = [
    "ConfigurationError",
    "FrameConfig",
    "make_config",
    "Frame",
    "QPSK_SYMBOLS",
    "qpsk_map",
    "qpsk_modulate",
    "qpsk_slice",
    "make_pilots",
    "assemble_frame",
    "simulate_frame",
]


class ConfigurationError(ValueError):
    """A frame or scenario configuration violates a structural invariant."""


# unit-power QPSK, indices walk the circle counterclockwise from +45 degrees
QPSK_SYMBOLS = np.array([1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j], dtype=np.complex128) / np.sqrt(2.0)


def db_to_linear(db: float) -> float:
    return float(10.0 ** (db / 10.0))


@dataclass(frozen=True)
class FrameConfig:
    """Static description of one simulated frame ensemble.

    gamma_ts_db and gamma_tj_db are per-symbol transmit SNRs of the
    transmitting and jamming nodes; gamma_th_db is the outage threshold
    on the post-detection SNR.
    """

    k: int
    k_t: int
    k_j: int
    n_tp: int
    n_td: int
    gamma_ts_db: float
    gamma_tj_db: float
    gamma_th_db: float = 0.0
    sigma2: float = 1.0
    fading_h: FadingSpec = field(default_factory=FadingSpec)
    fading_g: FadingSpec = field(default_factory=FadingSpec)

    def __post_init__(self):
        if self.k < 2:
            raise ConfigurationError(f"k must be at least 2, got {self.k}")
        if self.k_t < 1:
            raise ConfigurationError(f"k_t must be at least 1, got {self.k_t}")
        if not 1 <= self.k_j < self.k:
            raise ConfigurationError(
                f"k_j must satisfy 1 <= k_j < k, got k_j={self.k_j}, k={self.k}"
            )
        if self.k - self.k_j < self.k_t:
            raise ConfigurationError(
                f"need k - k_j >= k_t to separate {self.k_t} streams, "
                f"got k={self.k}, k_j={self.k_j}"
            )
        if self.n_tp <= self.k_t:
            raise ConfigurationError(
                f"pilot block n_tp={self.n_tp} must exceed k_t={self.k_t}"
            )
        if self.n_tp <= self.k:
            raise ConfigurationError(
                f"pilot block n_tp={self.n_tp} must exceed the cluster size k={self.k}"
            )
        if self.n_td < 1:
            raise ConfigurationError(f"n_td must be positive, got {self.n_td}")
        if self.sigma2 <= 0.0:
            raise ConfigurationError(f"sigma2 must be positive, got {self.sigma2}")
        for name, spec in (("fading_h", self.fading_h), ("fading_g", self.fading_g)):
            if spec.n_symbols != self.n_tf or spec.n_data != self.n_td:
                raise ConfigurationError(
                    f"{name} covers {spec.n_symbols} symbols with {spec.n_data} data "
                    f"symbols; the frame needs {self.n_tf} and {self.n_td}"
                )

    @property
    def n_tf(self) -> int:
        return self.n_tp + self.n_td

    @property
    def p_s(self) -> float:
        """Per-symbol transmit power of each transmitting node."""
        return self.sigma2 * db_to_linear(self.gamma_ts_db)

    @property
    def p_j(self) -> float:
        """Per-symbol transmit power of each jamming node."""
        return self.sigma2 * db_to_linear(self.gamma_tj_db)

    @property
    def gamma_th(self) -> float:
        return db_to_linear(self.gamma_th_db)


def make_config(
    k: int,
    k_t: int,
    k_j: int,
    n_tp: int,
    n_td: int,
    gamma_ts_db: float,
    gamma_tj_db: float,
    gamma_th_db: float = 0.0,
    sigma2: float = 1.0,
    tau_h: float = 0.0,
    tau_g: float = 0.0,
    freeze_pilot: bool = False,
) -> FrameConfig:
    """Build a FrameConfig with consistent fading specs from scalar knobs."""
    if n_td < 1:
        raise ConfigurationError(f"n_td must be positive, got {n_td}")
    if n_tp < 1:
        raise ConfigurationError(f"n_tp must be positive, got {n_tp}")
    n_tf = n_tp + n_td

    def spec(tau):
        if tau == 0.0:
            return FadingSpec(kind="block", n_symbols=n_tf, n_data=n_td)
        return FadingSpec(
            kind="jakes", tau=tau, n_symbols=n_tf, n_data=n_td, freeze_pilot=freeze_pilot
        )

    return FrameConfig(
        k=k,
        k_t=k_t,
        k_j=k_j,
        n_tp=n_tp,
        n_td=n_td,
        gamma_ts_db=gamma_ts_db,
        gamma_tj_db=gamma_tj_db,
        gamma_th_db=gamma_th_db,
        sigma2=sigma2,
        fading_h=spec(tau_h),
        fading_g=spec(tau_g),
    )


def qpsk_map(indices: np.ndarray, per_symbol_power: float = 1.0) -> np.ndarray:
    """Map integer indices in 0..3 onto the scaled constellation."""
    idx = np.asarray(indices)
    if idx.size and (idx.min() < 0 or idx.max() > 3):
        raise ValueError("QPSK indices must lie in 0..3")
    return QPSK_SYMBOLS[idx] * np.sqrt(per_symbol_power)


def qpsk_modulate(source, n: int, per_symbol_power: float = 1.0) -> np.ndarray:
    """Produce ``n`` QPSK symbols from a Generator or an explicit index stream."""
    if isinstance(source, np.random.Generator):
        indices = source.integers(0, 4, size=n)
    else:
        indices = np.asarray(source)[:n]
        if indices.size != n:
            raise ValueError(f"index stream provides {indices.size} of {n} symbols")
    return qpsk_map(indices, per_symbol_power)


def qpsk_slice(soft: np.ndarray) -> np.ndarray:
    """Nearest-symbol decision by quadrant; boundary ties fall toward re, im >= 0."""
    soft = np.asarray(soft)
    re = soft.real >= 0.0
    im = soft.imag >= 0.0
    return np.where(im, np.where(re, 0, 1), np.where(re, 3, 2))


def make_pilots(n_tp: int, k_t: int, per_symbol_power: float) -> np.ndarray:
    """Orthogonal pilot matrix (n_tp, k_t): scaled DFT columns.

    Column t carries exp(-2 pi i n t / n_tp), so node 0 transmits a constant
    pilot and distinct nodes are exactly orthogonal over the block.
    """
    if n_tp <= k_t:
        raise ConfigurationError(f"need n_tp > k_t, got n_tp={n_tp}, k_t={k_t}")
    n = np.arange(n_tp)[:, None]
    t = np.arange(k_t)[None, :]
    return np.exp(-2j * np.pi * n * t / n_tp) * np.sqrt(per_symbol_power)


@dataclass
class Frame:
    """One realized frame: received blocks plus ground truth.

    Truth fields exist for metric computation only; estimators and detectors
    must consume nothing beyond ``y_tp``, ``y_td``, and ``pilots``.
    """

    y_tp: np.ndarray  # (k, n_tp)
    y_td: np.ndarray  # (k, n_td)
    pilots: np.ndarray  # (n_tp, k_t)
    tn_indices: np.ndarray  # (k_t, n_td) transmitted QPSK indices
    h_gains: np.ndarray  # (k_t, k, n_tf) true channel gains
    g_gains: np.ndarray | None  # (k_j, k, n_tf), None when no jammer is active
    jn_indices: np.ndarray | None  # (k_j, n_tf)


def assemble_frame(
    cfg: FrameConfig,
    h_gains: np.ndarray,
    g_gains: np.ndarray | None,
    tn_indices: np.ndarray,
    jn_indices: np.ndarray | None,
    rng: np.random.Generator | None,
    noise: np.ndarray | None = None,
) -> Frame:
    """Superimpose pilots, data, jamming, and noise into received blocks.

    Parameters
    ----------
    h_gains : ndarray
        (k_t, k, n_tf) channel gains, one matrix per transmitting node.
    g_gains : ndarray or None
        (k_j, k, n_tf) jammer channel gains; None disables jamming.
    tn_indices : ndarray
        (k_t, n_td) QPSK indices for the data block.
    jn_indices : ndarray or None
        (k_j, n_tf) QPSK indices the jammers emit over the whole frame.
    rng : Generator or None
        Consumed only for receiver noise; required unless ``noise`` is given.
    noise : ndarray, optional
        (k, n_tf) additive noise override.  Passing zeros realizes the
        noiseless limit used by exactness tests.
    """
    k, k_t, n_tf = cfg.k, cfg.k_t, cfg.n_tf
    h_gains = np.asarray(h_gains)
    if h_gains.shape != (k_t, k, n_tf):
        raise ConfigurationError(
            f"h_gains shape {h_gains.shape} != {(k_t, k, n_tf)}"
        )
    tn_indices = np.asarray(tn_indices)
    if tn_indices.shape != (k_t, cfg.n_td):
        raise ConfigurationError(
            f"tn_indices shape {tn_indices.shape} != {(k_t, cfg.n_td)}"
        )

    pilots = make_pilots(cfg.n_tp, k_t, cfg.p_s)
    data = qpsk_map(tn_indices, cfg.p_s)
    x_full = np.concatenate([pilots.T, data], axis=1)  # (k_t, n_tf)

    y = np.einsum("tkn,tn->kn", h_gains, x_full)

    if g_gains is not None:
        g_gains = np.asarray(g_gains)
        if g_gains.shape != (cfg.k_j, k, n_tf):
            raise ConfigurationError(
                f"g_gains shape {g_gains.shape} != {(cfg.k_j, k, n_tf)}"
            )
        if jn_indices is None:
            raise ConfigurationError("jammer gains supplied without jammer symbols")
        jam = qpsk_map(np.asarray(jn_indices), cfg.p_j)
        y = y + np.einsum("jkn,jn->kn", g_gains, jam)

    if noise is None:
        if rng is None:
            raise ConfigurationError("rng is required when noise is not supplied")
        noise = sample_cscg(rng, (k, n_tf), cfg.sigma2)
    elif noise.shape != (k, n_tf):
        raise ConfigurationError(f"noise shape {noise.shape} != {(k, n_tf)}")
    y = y + noise

    return Frame(
        y_tp=y[:, : cfg.n_tp],
        y_td=y[:, cfg.n_tp :],
        pilots=pilots,
        tn_indices=tn_indices,
        h_gains=h_gains,
        g_gains=g_gains,
        jn_indices=None if jn_indices is None else np.asarray(jn_indices),
    )


def simulate_frame(
    cfg: FrameConfig, rng: np.random.Generator, jam: bool = True
) -> Frame:
    """Draw one complete frame.

    The draw order is fixed and load-bearing for reproducibility: channels of
    the transmitting nodes, jammer channels, data indices, jammer indices,
    then noise.
    """
    h = np.stack([sample_jakes(rng, cfg.k, cfg.fading_h) for _ in range(cfg.k_t)])
    g = None
    jn = None
    if jam:
        g = np.stack([sample_jakes(rng, cfg.k, cfg.fading_g) for _ in range(cfg.k_j)])
    tn = rng.integers(0, 4, size=(cfg.k_t, cfg.n_td))
    if jam:
        jn = rng.integers(0, 4, size=(cfg.k_j, cfg.n_tf))
    return assemble_frame(cfg, h, g, tn, jn, rng)
