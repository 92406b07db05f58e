"""Scenario catalog, Monte Carlo engine, seeding, and persistence.

A scenario is a sweep over one frame parameter with several series on top
(estimation method plus parameter overrides), a metric, and a trial count.
Presets live as YAML files next to this module, one per figure of the
reference result set.

Execution is deterministic by construction:

- every (sweep point, series) cell is cut into fixed-size trial chunks whose
  size depends only on the frame geometry, never on the worker count;
- each chunk owns an RNG stream seeded by :func:`seed_for` from the master
  seed and the chunk coordinates;
- chunk partials are merged in fixed chunk order.

Hence serial and parallel runs of the same scenario produce byte-identical
CSV output, and extending the trial count only appends chunks (estimates
converge without disturbing earlier draws).
"""

from __future__ import annotations

import hashlib
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from importlib import resources

import numpy as np
import yaml

from . import __version__
from .analysis import (
    AnalyticInputs,
    MetricsRecord,
    beta_factor,
    outage_analytical,
    post_projection_snr,
    residual_error_variance,
)
from .caj import CONDITION_LIMIT, METHODS
from .channel import FadingSpec, reduced_factor
from .estimator import DEGENERATE_NORM
from .mathcore import fix_phase, orthonormal_complement, sample_cscg
from .signal import (
    ConfigurationError,
    FrameConfig,
    make_config,
    make_pilots,
    qpsk_map,
    qpsk_slice,
)

__all__ = [
    "SeriesSpec",
    "ScenarioConfig",
    "RunManifest",
    "seed_for",
    "list_scenarios",
    "load_scenario",
    "run_scenario",
    "emit_csv",
    "emit_analytic",
    "CSV_HEADER",
]

CSV_HEADER = "scenario,method,sweep_name,sweep_value,metric,value,trials,seed"

METRICS = ("msad", "angle", "ser", "outage")

# chunk memory budget per (trials, k, n_tf) complex array, plus a hard cap so
# even tiny frames are split into several chunks
_CHUNK_BYTES = 64 * 2**20
_CHUNK_CAP = 1024

ANALYTIC_DRAWS = 4000


# ---------------------------------------------------------------------------
# seeding

_MASK = (1 << 64) - 1


def _mix64(x: int) -> int:
    # splitmix64 finalizer; avalanches every input bit across the word
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


def _scenario_token(scenario_id: str) -> int:
    digest = hashlib.blake2b(scenario_id.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def seed_for(
    master_seed: int, scenario_id: str, sweep_idx: int, method_idx: int, trial_idx: int
) -> int:
    """64-bit stream seed for one chunk of one catalog cell.

    The coordinates are folded one at a time through a splitmix64 step, so
    changing any single coordinate rewrites the whole seed.
    """
    x = _mix64(master_seed & _MASK)
    for part in (_scenario_token(scenario_id), sweep_idx, method_idx, trial_idx):
        x = _mix64(x ^ (int(part) & _MASK))
    return x


def stream_rng(seed: int) -> np.random.Generator:
    """Generator for one engine stream.

    SFC64 samples normals several times faster than the numpy default here,
    and noise generation is a large share of engine runtime.
    """
    return np.random.Generator(np.random.SFC64(seed))


# ---------------------------------------------------------------------------
# scenario catalog

_BASE_KNOBS = (
    "k", "k_t", "k_j", "n_tp", "n_td",
    "gamma_ts_db", "gamma_tj_db", "gamma_th_db",
    "sigma2", "tau_h", "tau_g", "freeze_pilot",
)


@dataclass(frozen=True)
class SeriesSpec:
    """One curve of a scenario: a method plus frame-parameter overrides."""

    label: str
    method: str
    jam: bool = True
    overrides: tuple = ()

    def kwargs(self) -> dict:
        return dict(self.overrides)


@dataclass(frozen=True)
class ScenarioConfig:
    """A runnable preset: sweep grid x series, one metric, one trial count."""

    id: str
    title: str
    metric: str
    sweep_name: str
    sweep_values: tuple
    base: tuple
    series: tuple
    trials: int
    master_seed: int

    def __post_init__(self):
        if not self.sweep_values:
            raise ConfigurationError(f"{self.id}: sweep grid is empty")
        if self.trials < 1:
            raise ConfigurationError(f"{self.id}: trials must be >= 1")
        if self.metric not in METRICS:
            raise ConfigurationError(
                f"{self.id}: metric {self.metric!r} not in {METRICS}"
            )
        if not self.series:
            raise ConfigurationError(f"{self.id}: no series defined")
        labels = [s.label for s in self.series]
        if len(set(labels)) != len(labels):
            raise ConfigurationError(f"{self.id}: duplicate series labels")
        for s in self.series:
            if "," in s.label:
                raise ConfigurationError(f"{self.id}: comma in label {s.label!r}")
            if s.method not in METHODS:
                raise ConfigurationError(
                    f"{self.id}: series {s.label!r} has unknown method {s.method!r}"
                )
            if not s.jam and s.method != "NONE":
                raise ConfigurationError(
                    f"{self.id}: jam-free series {s.label!r} must use method NONE"
                )
            if self.metric in ("msad", "angle") and s.method not in ("NLS", "EV"):
                raise ConfigurationError(
                    f"{self.id}: {self.metric} needs an estimating method"
                )
            if self.metric == "outage" and s.method not in ("NLS", "EV", "PERFECT"):
                raise ConfigurationError(
                    f"{self.id}: outage needs a projecting method"
                )
        # building every cell config front-loads FrameConfig validation
        for vi in range(len(self.sweep_values)):
            for si in range(len(self.series)):
                cfg = self.frame_config(vi, si)
                s = self.series[si]
                if s.method == "NLS" and (cfg.k_t != 1 or cfg.k_j != 1):
                    raise ConfigurationError(
                        f"{self.id}: NLS series {s.label!r} needs k_t = k_j = 1"
                    )
                if self.metric in ("msad", "angle") and cfg.k_j != 1:
                    raise ConfigurationError(
                        f"{self.id}: {self.metric} is defined for a single jammer"
                    )
                if self.metric == "outage" and cfg.k_t != 1:
                    raise ConfigurationError(
                        f"{self.id}: outage is defined for a single data source"
                    )

    def frame_config(self, sweep_idx: int, series_idx: int) -> FrameConfig:
        kwargs = dict(self.base)
        kwargs.update(self.series[series_idx].kwargs())
        if self.sweep_name not in _BASE_KNOBS:
            raise ConfigurationError(
                f"{self.id}: sweep parameter {self.sweep_name!r} is not a frame knob"
            )
        kwargs[self.sweep_name] = self.sweep_values[sweep_idx]
        unknown = set(kwargs) - set(_BASE_KNOBS)
        if unknown:
            raise ConfigurationError(f"{self.id}: unknown frame knobs {sorted(unknown)}")
        return make_config(**kwargs)


def _freeze(mapping: dict) -> tuple:
    return tuple(sorted(mapping.items()))


def _expand_series(raw: dict) -> list[SeriesSpec]:
    grid = raw.get("grid")
    overrides = dict(raw.get("overrides", {}))
    common = dict(
        method=raw["method"],
        jam=bool(raw.get("jam", True)),
    )
    if grid is None:
        return [SeriesSpec(label=raw["label"], overrides=_freeze(overrides), **common)]
    keys = list(grid)
    out = []
    combos = [()]
    for key in keys:
        combos = [c + (v,) for c in combos for v in grid[key]]
    for combo in combos:
        ov = dict(overrides)
        ov.update(dict(zip(keys, combo)))
        label = raw["label"] + "".join(f" {k}={v:g}" for k, v in zip(keys, combo))
        out.append(SeriesSpec(label=label, overrides=_freeze(ov), **common))
    return out


def _scenario_from_mapping(doc: dict) -> ScenarioConfig:
    try:
        series: list[SeriesSpec] = []
        for raw in doc["series"]:
            series.extend(_expand_series(raw))
        return ScenarioConfig(
            id=doc["id"],
            title=doc.get("title", ""),
            metric=doc["metric"],
            sweep_name=doc["sweep"]["name"],
            sweep_values=tuple(doc["sweep"]["values"]),
            base=_freeze(doc["base"]),
            series=tuple(series),
            trials=int(doc["trials"]),
            master_seed=int(doc.get("master_seed", 1729)),
        )
    except KeyError as exc:
        raise ConfigurationError(f"scenario file misses required key {exc}") from exc


def _catalog_files():
    root = resources.files("cajsim").joinpath("scenarios")
    return sorted(
        (p for p in root.iterdir() if p.name.endswith(".yaml")), key=lambda p: p.name
    )


def list_scenarios() -> list[ScenarioConfig]:
    """All presets shipped with the package, sorted by id."""
    out = []
    for path in _catalog_files():
        with path.open("r", encoding="utf-8") as fh:
            out.append(_scenario_from_mapping(yaml.safe_load(fh)))
    out.sort(key=lambda s: s.id)
    ids = [s.id for s in out]
    if len(set(ids)) != len(ids):
        raise ConfigurationError(f"duplicate scenario ids in catalog: {ids}")
    return out


def load_scenario(
    scenario_id: str, trials: int | None = None, master_seed: int | None = None
) -> ScenarioConfig:
    """Look up a preset by id, optionally overriding trials and master seed."""
    for scn in list_scenarios():
        if scn.id == scenario_id:
            if trials is not None:
                scn = replace(scn, trials=int(trials))
            if master_seed is not None:
                scn = replace(scn, master_seed=int(master_seed))
            return scn
    known = ", ".join(s.id for s in list_scenarios())
    raise ConfigurationError(f"unknown scenario {scenario_id!r}; available: {known}")


# ---------------------------------------------------------------------------
# engine

@dataclass
class ChunkDraws:
    """All randomness of one chunk, drawn up front in a fixed order."""

    h: np.ndarray  # (k_t, trials, k, >= n_used)
    g: np.ndarray | None  # (k_j, trials, k, >= n_used)
    tn_idx: np.ndarray | None  # (trials, k_t, n_td)
    jn_idx: np.ndarray | None  # (trials, k_j, n_used)
    noise: np.ndarray  # (trials, k, n_used)


def _chunk_size(cfg: FrameConfig) -> int:
    per_trial = cfg.k * cfg.n_tf * 16
    return max(64, min(_CHUNK_CAP, _CHUNK_BYTES // per_trial))


def _draw_gains(rng, count: int, trials: int, k: int, spec: FadingSpec, n_used: int):
    """Fading gains for `count` sources, batched over trials."""
    if spec.constant:
        cols = sample_cscg(rng, (count, trials, k))
        return np.broadcast_to(cols[..., None], (count, trials, k, n_used))
    # batched coloring through the thin covariance factor; one white draw
    # per retained eigenmode instead of one per symbol
    n_pilot = spec.n_symbols - spec.n_data
    if spec.freeze_pilot and n_pilot > 0:
        factor = reduced_factor(spec.tau, spec.n_data + 1, spec.n_data)
        white = sample_cscg(rng, (count, trials, k, factor.shape[1]))
        path = white @ factor.T
        pilot = np.repeat(path[..., :1], n_pilot, axis=-1)
        full = np.concatenate([pilot, path[..., 1:]], axis=-1)
    else:
        factor = reduced_factor(spec.tau, spec.n_symbols, spec.n_data)
        white = sample_cscg(rng, (count, trials, k, factor.shape[1]))
        full = white @ factor.T
    return full[..., :n_used] if n_used < full.shape[-1] else full


def draw_chunk(
    cfg: FrameConfig,
    trials: int,
    rng: np.random.Generator,
    jam: bool,
    with_data: bool,
) -> ChunkDraws:
    """Draw every random quantity of a chunk.

    Order is fixed and load-bearing: friendly channels, jammer channels,
    data indices, jammer indices, noise.  Estimation-only metrics skip the
    data block entirely (with_data=False), which halves memory and time for
    the estimation figures.
    """
    n_used = cfg.n_tf if with_data else cfg.n_tp
    h = _draw_gains(rng, cfg.k_t, trials, cfg.k, cfg.fading_h, n_used)
    g = None
    if jam:
        g = _draw_gains(rng, cfg.k_j, trials, cfg.k, cfg.fading_g, n_used)
    tn_idx = rng.integers(0, 4, size=(trials, cfg.k_t, cfg.n_td)) if with_data else None
    jn_idx = rng.integers(0, 4, size=(trials, cfg.k_j, n_used)) if jam else None
    noise = sample_cscg(rng, (trials, cfg.k, n_used), cfg.sigma2)
    return ChunkDraws(h=h, g=g, tn_idx=tn_idx, jn_idx=jn_idx, noise=noise)


@dataclass
class CellPartial:
    """Mergeable accumulator for one catalog cell.

    Outage keeps small per-frame arrays: the excess direction-error
    variance (estimation error beyond what receiver noise explains) is a
    cell-level ensemble quantity, so thresholding has to wait until every
    chunk of the cell has been merged.
    """

    stat_sum: float = 0.0
    stat_count: int = 0
    errors: int = 0
    symbols: int = 0
    resid_sum: float = 0.0
    f_energy: np.ndarray = field(default_factory=lambda: np.empty(0))
    noise_eps2: np.ndarray = field(default_factory=lambda: np.empty(0))
    bad: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=bool))
    trials: int = 0
    degenerate: int = 0

    def merge(self, other: "CellPartial") -> None:
        self.stat_sum += other.stat_sum
        self.stat_count += other.stat_count
        self.errors += other.errors
        self.symbols += other.symbols
        self.resid_sum += other.resid_sum
        self.f_energy = np.concatenate([self.f_energy, other.f_energy])
        self.noise_eps2 = np.concatenate([self.noise_eps2, other.noise_eps2])
        self.bad = np.concatenate([self.bad, other.bad])
        self.trials += other.trials
        self.degenerate += other.degenerate

    def value(self, metric: str, cfg: FrameConfig | None = None) -> float:
        if metric in ("msad", "angle"):
            if self.stat_count == 0:
                return float("nan")
            return self.stat_sum / self.stat_count
        if metric == "ser":
            return self.errors / self.symbols
        k = cfg.k
        noise_resid = float(np.mean(self.noise_eps2)) * k * (k - 1)
        excess = max(0.0, self.resid_sum / self.trials - noise_resid)
        eps2 = self.noise_eps2 + residual_error_variance(excess, k)
        gamma = post_projection_snr(
            self.f_energy, eps2, k, cfg.p_s, cfg.n_tp * cfg.p_j, cfg.sigma2
        )
        return float(np.mean((gamma < cfg.gamma_th) | self.bad))


def _orthonormalize_batched(dirs: np.ndarray) -> np.ndarray:
    """Gram-Schmidt over the last axis columns, batched over leading axes."""
    t, k, cols = dirs.shape
    q = np.empty_like(dirs)
    for i in range(cols):
        v = dirs[:, :, i]
        for j in range(i):
            coeff = np.einsum("tk,tk->t", q[:, :, j].conj(), v)
            v = v - q[:, :, j] * coeff[:, None]
        norm = np.linalg.norm(v, axis=1, keepdims=True)
        q[:, :, i] = v / norm
    return q


def _batched_estimate(cfg: FrameConfig, method: str, y_tp, pilots, draws, anchor):
    """Estimated jamming subspace basis (trials, k, k_j) plus degenerate mask."""
    trials = y_tp.shape[0]
    degen = np.zeros(trials, dtype=bool)
    if method == "NONE":
        return None, degen
    if method == "PERFECT":
        dirs = np.moveaxis(draws.g[:, :, :, anchor], 0, 2)  # (trials, k, k_j)
        return _orthonormalize_batched(dirs), degen
    if method == "NLS":
        s_perp = orthonormal_complement(pilots[:, :1])[:, 0]
        raw = y_tp @ s_perp.conj()  # (trials, k)
        norms = np.linalg.norm(raw, axis=1)
        degen = norms < DEGENERATE_NORM
        if np.any(degen):
            # placeholder direction keeps later algebra finite; the mask
            # already routes these frames to the degenerate tally
            raw = raw.copy()
            raw[degen] = 0.0
            raw[degen, 0] = 1.0
            norms = np.where(degen, 1.0, norms)
        return fix_phase((raw / norms[:, None])[:, :, None]), degen
    # EV / multi-jammer subspace: dominant eigenvectors of the projected Gram
    s_perp = orthonormal_complement(pilots)
    z = y_tp @ s_perp.conj()  # (trials, k, n_tp - k_t)
    gram = z @ z.conj().swapaxes(1, 2)
    _, vecs = np.linalg.eigh(gram)  # ascending eigenvalues
    top = vecs[:, :, ::-1][:, :, : cfg.k_j]
    return fix_phase(top), degen


def _project_out_batched(g_hat, x):
    """x - g_hat (g_hat^H x) for stacked matrices x (trials, k, cols)."""
    if g_hat is None:
        return x
    coeff = g_hat.conj().swapaxes(1, 2) @ x
    return x - g_hat @ coeff


def process_chunk(
    scn: ScenarioConfig,
    sweep_idx: int,
    series_idx: int,
    first_trial: int,
    trials: int,
    detail: bool = False,
):
    """Simulate one chunk and reduce it to a CellPartial.

    With detail=True, per-trial arrays are returned alongside for the
    engine-versus-reference equivalence tests.
    """
    series = scn.series[series_idx]
    cfg = scn.frame_config(sweep_idx, series_idx)
    # outage is scored on the pilot block alone, so only SER needs the data block
    with_data = scn.metric == "ser"
    seed = seed_for(scn.master_seed, scn.id, sweep_idx, series_idx, first_trial)
    rng = stream_rng(seed)
    draws = draw_chunk(cfg, trials, rng, series.jam, with_data)
    return _process_drawn_chunk(scn, cfg, series, draws, detail)


def _process_drawn_chunk(scn, cfg, series, draws, detail=False):
    method = series.method
    metric = scn.metric
    trials = draws.noise.shape[0]
    n_tp = cfg.n_tp
    anchor = n_tp - 1

    pilots = make_pilots(n_tp, cfg.k_t, cfg.p_s)
    # contributions accumulate in place on the chunk-local noise array
    y = draws.noise
    if draws.g is not None:
        jam_syms = qpsk_map(draws.jn_idx, cfg.p_j)
        if cfg.k_j == 1:
            y += draws.g[0] * jam_syms[:, 0][:, None, :]
        else:
            y += np.einsum("jtkn,tjn->tkn", draws.g, jam_syms)
    y_tp = y[:, :, :n_tp]
    y_tp += np.einsum("stkn,ns->tkn", draws.h[:, :, :, :n_tp], pilots)

    g_hat, degen = _batched_estimate(cfg, method, y_tp, pilots, draws, anchor)

    partial = CellPartial(trials=trials)
    detail_out: dict = {}

    if metric in ("msad", "angle"):
        g_true = draws.g[0, :, :, anchor]
        g_unit = g_true / np.linalg.norm(g_true, axis=1, keepdims=True)
        est = g_hat[:, :, 0]
        if metric == "msad":
            dev = np.abs(est) - np.abs(g_unit)
            stat = np.sum(dev * dev, axis=1)
        else:
            overlap = np.abs(np.einsum("tk,tk->t", est.conj(), g_unit))
            stat = np.degrees(np.arccos(np.clip(overlap, 0.0, 1.0)))
        ok = ~degen
        partial.stat_sum = float(np.sum(stat[ok]))
        partial.stat_count = int(np.count_nonzero(ok))
        partial.degenerate = int(np.count_nonzero(degen))
        if detail:
            detail_out = {"stat": stat, "degenerate": degen}
        return (partial, detail_out) if detail else partial

    # detection path: least-squares channel, projection, zero forcing
    h_ls = y_tp @ pilots.conj() / np.sum(np.abs(pilots) ** 2, axis=0)
    f = _project_out_batched(g_hat, h_ls)  # (trials, k, k_t)
    sv = np.linalg.svd(f, compute_uv=False)
    with np.errstate(divide="ignore", invalid="ignore"):
        cond = sv[:, 0] / sv[:, -1]
    infeasible = (sv[:, 0] == 0.0) | (sv[:, -1] == 0.0) | (cond > CONDITION_LIMIT)
    bad = degen | infeasible
    partial.degenerate = int(np.count_nonzero(bad))

    if metric == "outage":
        if g_hat is None:
            raise ConfigurationError("outage needs a projecting method")
        # score on the true friendly channel: noise in an estimated channel
        # would inflate ||f||^2 and bias the low-signal tail of the curve
        h_true = draws.h[0, :, :, anchor]
        f_true = _project_out_batched(g_hat, h_true[:, :, None])[:, :, 0]
        partial.f_energy = np.sum(np.abs(f_true) ** 2, axis=1)
        # noise part of the direction-error variance, conditioned on the
        # frame's realized pilot-block jamming waveform exactly like the
        # closed-form route; a waveform aligned with the pilot leaves no
        # complement energy and that frame is an outage outright
        if method == "PERFECT":
            partial.noise_eps2 = np.zeros(trials)
        else:
            if method == "NLS":
                basis = orthonormal_complement(pilots[:, :1])[:, :1]
            else:
                basis = orthonormal_complement(pilots)
            jp = jam_syms[:, :, :n_tp]
            proj = np.sum(np.abs(jp @ basis.conj()) ** 2, axis=2)
            with np.errstate(divide="ignore"):
                partial.noise_eps2 = np.sum(cfg.sigma2 / (cfg.k * proj), axis=1)
        # measured leakage of the true jamming channel through the projector
        # feeds the cell-level excess variance (time variation, mostly)
        g_true = np.moveaxis(draws.g[:, :, :, anchor], 0, 2)
        resid = np.sum(np.abs(_project_out_batched(g_hat, g_true)) ** 2, axis=(1, 2))
        partial.resid_sum = float(np.sum(resid))
        partial.bad = bad
        if detail:
            detail_out = {
                "f_energy": partial.f_energy,
                "noise_eps2": partial.noise_eps2,
                "residual": resid,
                "degenerate": bad,
            }
        return (partial, detail_out) if detail else partial

    # symbol error rate
    tn_syms = qpsk_map(draws.tn_idx, cfg.p_s)
    y_td = y[:, :, n_tp:]
    if cfg.k_t == 1:
        y_td += draws.h[0, :, :, n_tp:] * tn_syms[:, 0][:, None, :]
    else:
        y_td += np.einsum("stkn,tsn->tkn", draws.h[:, :, :, n_tp:], tn_syms)

    # f is orthogonal to the estimated jam basis, so applying the projector
    # to y_td before the matched filter would be a no-op; fold it away
    gram = f.conj().swapaxes(1, 2) @ f
    rhs = f.conj().swapaxes(1, 2) @ y_td
    safe_gram = np.where(bad[:, None, None], np.eye(cfg.k_t)[None], gram)
    soft = np.linalg.solve(safe_gram, rhs)
    decided = qpsk_slice(soft)
    errors = np.sum(decided != draws.tn_idx, axis=(1, 2))
    errors = np.where(bad, cfg.k_t * cfg.n_td, errors)
    partial.errors = int(np.sum(errors))
    partial.symbols = trials * cfg.k_t * cfg.n_td
    if detail:
        detail_out = {"errors": errors, "degenerate": bad, "soft": soft}
    return (partial, detail_out) if detail else partial


def _cell_chunks(scn: ScenarioConfig, sweep_idx: int, series_idx: int):
    cfg = scn.frame_config(sweep_idx, series_idx)
    size = _chunk_size(cfg)
    first = 0
    while first < scn.trials:
        yield first, min(size, scn.trials - first)
        first += size


@dataclass
class RunManifest:
    """Provenance sidecar written once per run."""

    scenario: str
    version: str
    started_at: str
    finished_at: str
    total_frames: int
    outputs: list = field(default_factory=list)

    def write(self, path) -> None:
        payload = {
            "scenario": self.scenario,
            "version": self.version,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "total_frames": self.total_frames,
            "outputs": [str(p) for p in self.outputs],
        }
        try:
            with open(path, "w", encoding="utf-8") as fh:
                json.dump(payload, fh, indent=2, sort_keys=True)
                fh.write("\n")
        except OSError as exc:
            raise OSError(f"writing manifest {path}: {exc}") from exc


def _utcnow() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def default_workers() -> int:
    env = os.environ.get("CAJSIM_WORKERS", "").strip()
    if env:
        return max(1, int(env))
    return 1


def run_scenario(scn: ScenarioConfig, worker_count: int | None = None):
    """Run every cell of a scenario; returns (records, manifest).

    Output is bitwise independent of worker_count for a fixed master seed.
    """
    workers = default_workers() if worker_count is None else max(1, int(worker_count))
    started = _utcnow()

    tasks = [
        (vi, si, first, count)
        for vi in range(len(scn.sweep_values))
        for si in range(len(scn.series))
        for first, count in _cell_chunks(scn, vi, si)
    ]

    partials: dict[tuple, CellPartial] = {}
    if workers == 1 or len(tasks) == 1:
        results = (process_chunk(scn, *t[:3], t[3]) for t in tasks)
        keyed = zip(tasks, results)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(process_chunk, scn, *t[:3], t[3]) for t in tasks]
            keyed = zip(tasks, (f.result() for f in futures))
    # merge in task order: chunk index is the slowest-varying part of the key
    for (vi, si, first, _count), part in keyed:
        cell = partials.setdefault((vi, si), CellPartial())
        cell.merge(part)

    records: list[MetricsRecord] = []
    for vi, value in enumerate(scn.sweep_values):
        for si, series in enumerate(scn.series):
            cell = partials[(vi, si)]
            cell_seed = seed_for(scn.master_seed, scn.id, vi, si, 0)
            records.append(
                MetricsRecord(
                    scenario=scn.id,
                    method=series.label,
                    sweep_name=scn.sweep_name,
                    sweep_value=float(value),
                    metric=scn.metric,
                    value=cell.value(scn.metric, scn.frame_config(vi, si)),
                    trials=scn.trials,
                    seed=cell_seed,
                )
            )
            records.append(
                MetricsRecord(
                    scenario=scn.id,
                    method=series.label,
                    sweep_name=scn.sweep_name,
                    sweep_value=float(value),
                    metric="degenerate_frames",
                    value=float(cell.degenerate),
                    trials=scn.trials,
                    seed=cell_seed,
                )
            )

    manifest = RunManifest(
        scenario=scn.id,
        version=__version__,
        started_at=started,
        finished_at=_utcnow(),
        total_frames=scn.trials * len(scn.sweep_values) * len(scn.series),
    )
    return records, manifest


# ---------------------------------------------------------------------------
# persistence

def format_records(records) -> str:
    """CSV text for a record set: exact header, %.9g values, stable order."""
    lines = [CSV_HEADER]
    for r in records:
        lines.append(
            f"{r.scenario},{r.method},{r.sweep_name},{r.sweep_value:.9g},"
            f"{r.metric},{r.value:.9g},{r.trials},{r.seed}"
        )
    return "\n".join(lines) + "\n"


def emit_csv(records, path) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(format_records(records))
    except OSError as exc:
        raise OSError(f"writing {path}: {exc}") from exc


def parse_csv(path) -> list[MetricsRecord]:
    """Read back an emitted file; the inverse of emit_csv up to %.9g rounding."""
    out = []
    try:
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline().strip()
            if header != CSV_HEADER:
                raise ConfigurationError(f"{path}: unexpected header {header!r}")
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                parts = line.split(",")
                if len(parts) != 8:
                    raise ConfigurationError(f"{path}: malformed row {line!r}")
                out.append(
                    MetricsRecord(
                        scenario=parts[0],
                        method=parts[1],
                        sweep_name=parts[2],
                        sweep_value=float(parts[3]),
                        metric=parts[4],
                        value=float(parts[5]),
                        trials=int(parts[6]),
                        seed=int(parts[7]),
                    )
                )
    except OSError as exc:
        raise OSError(f"reading {path}: {exc}") from exc
    return out


# ---------------------------------------------------------------------------
# analytic route

def analytic_records(scn: ScenarioConfig) -> list[MetricsRecord]:
    """Closed-form outage rows matching the scenario grid.

    The projection energy depends on the jammer's pilot-block waveform, so
    the closed form is averaged over seeded jammer draws per cell.
    """
    if scn.metric != "outage":
        raise ConfigurationError(
            f"{scn.id}: analytic route exists for outage scenarios only"
        )
    records = []
    for vi, value in enumerate(scn.sweep_values):
        for si, series in enumerate(scn.series):
            cfg = scn.frame_config(vi, si)
            if series.method not in ("EV", "NLS"):
                raise ConfigurationError(
                    f"{scn.id}: no analytic form for method {series.method}"
                )
            seed = seed_for(scn.master_seed, scn.id + "/analytic", vi, si, 0)
            rng = stream_rng(seed)
            pilots = make_pilots(cfg.n_tp, cfg.k_t, cfg.p_s)
            idx = rng.integers(0, 4, size=(ANALYTIC_DRAWS, cfg.n_tp))
            jvec = qpsk_map(idx, cfg.p_j)
            if series.method == "EV":
                basis = orthonormal_complement(pilots)
            else:
                basis = orthonormal_complement(pilots[:, :1])[:, :1]
            proj = np.sum(np.abs(jvec @ basis.conj()) ** 2, axis=1)
            jam_block = cfg.n_tp * cfg.p_j
            total = 0.0
            for p in proj:
                inputs = AnalyticInputs(
                    k=cfg.k,
                    k_j=cfg.k_j,
                    n_tp=cfg.n_tp,
                    n_td=cfg.n_td,
                    sigma2=cfg.sigma2,
                    sig_power=cfg.p_s,
                    jam_power=jam_block,
                    jam_projection_energy=float(p),
                    gamma_th=cfg.gamma_th,
                )
                beta = beta_factor(inputs, series.method)
                total += outage_analytical(cfg.k, beta, cfg.gamma_th)
            records.append(
                MetricsRecord(
                    scenario=scn.id,
                    method=series.label,
                    sweep_name=scn.sweep_name,
                    sweep_value=float(value),
                    metric="outage_analytic",
                    value=total / ANALYTIC_DRAWS,
                    trials=ANALYTIC_DRAWS,
                    seed=seed,
                )
            )
    return records


def emit_analytic(scn: ScenarioConfig, path) -> None:
    emit_csv(analytic_records(scn), path)
