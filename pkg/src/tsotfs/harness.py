"""Metrics, known-support baseline, and the Monte Carlo sweep machinery.

Two figures of merit:

- activity error rate: mean |alpha_hat - alpha| over all K terminals;
- channel NMSE: energy of (estimated - true) impulse response over the energy
  of the true one, summed over every terminal, antenna, frame sample and
  delay tap. False alarms contribute their full estimated energy, misses
  their full true energy.

Both impulse responses are finite sums of single-tap complex exponentials in
the sample index, so the NMSE sums are evaluated in closed form with a
Dirichlet kernel rather than by materializing the K*P*frame_len*L grid.

Sweeps are reproducible by construction: trial (i, t) derives its generator
from the entropy tuple (base seed, i, t), so results do not depend on
execution order or worker count.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .airlink import propagate
from .channel import ChannelRealization, draw_realization
from .config import SystemConfig
from .detector import (
    ChannelEstimate,
    RecoverySolution,
    StoppingRule,
    build_sensing_matrix,
    extract_isi_free,
    parametric_stage,
    run_pipeline,
    slot_anchors,
)
from .errors import DimensionMismatch, InvalidConfig, TsotfsError, UndefinedMetric
from .modem import TrainingSequence, build_frame, generate_ts
from .numerics import least_squares_solve

# ============================================================================
# Metrics
# ============================================================================


def aer(alpha_hat, alpha) -> float:
    """Activity error rate: mean absolute difference of the 0/1 vectors."""
    alpha_hat = np.asarray(alpha_hat, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    if alpha_hat.shape != alpha.shape or alpha_hat.ndim != 1:
        raise DimensionMismatch(f"shapes {alpha_hat.shape} vs {alpha.shape}")
    return float(np.mean(np.abs(alpha_hat - alpha)))


def _dirichlet(delta: np.ndarray, d_len: int) -> np.ndarray:
    """sum_{kappa=0}^{D-1} exp(j*2pi*delta*kappa/D), elementwise in delta."""
    delta = np.asarray(delta, dtype=float)
    tiny = np.abs(delta) < 1e-15
    safe = np.where(tiny, 1.0, delta)
    ratio = np.sin(np.pi * safe) / np.sin(np.pi * safe / d_len)
    phase = np.exp(1j * np.pi * safe * (d_len - 1) / d_len)
    return np.where(tiny, float(d_len) + 0j, ratio * phase)


def nmse(estimate: ChannelEstimate, truth: ChannelRealization, cfg: SystemConfig) -> float:
    """Normalized MSE of the reconstructed impulse response.

    Equivalent to evaluating both responses over k in [0,K), p in [0,P),
    kappa in [0, frame_len), ell in [0,L) and forming the energy ratio; the
    kappa sum is done analytically since every tap is a pure exponential.
    """
    if truth.active_set.size == 0:
        raise UndefinedMetric("NMSE undefined with no active terminal")
    d_len = cfg.frame_len

    denom = 0.0
    for k in truth.active_set:
        prof = truth.profiles[k]
        denom += abs(prof.gain) ** 2 * float(np.sum(np.abs(prof.steering) ** 2)) * d_len

    numer = 0.0
    for k in range(cfg.K):
        prof = truth.profiles[k]
        # Terms per delay tap: (doppler, per-antenna coefficient vector, sign).
        by_delay: dict[int, list[tuple[float, np.ndarray]]] = {}
        if prof.alpha:
            w = -prof.gain * prof.steering * np.exp(
                -2j * np.pi * prof.doppler * prof.delay / d_len
            )
            by_delay.setdefault(prof.delay, []).append((prof.doppler, w))
        if estimate.alpha_hat[k]:
            for path in estimate.paths[k]:
                w = path.gains * np.exp(-2j * np.pi * path.doppler * path.delay / d_len)
                by_delay.setdefault(path.delay, []).append((path.doppler, w))
        for terms in by_delay.values():
            ups = np.array([t[0] for t in terms])
            w_mat = np.vstack([t[1] for t in terms])  # (n_terms, P)
            gram = w_mat @ w_mat.conj().T
            kernel = _dirichlet(ups[:, None] - ups[None, :], d_len)
            numer += float(np.real(np.sum(gram * kernel)))
    return max(numer, 0.0) / denom


# ============================================================================
# Ground-truth views of the stacked model (testing and baseline support)
# ============================================================================


def true_support(real: ChannelRealization, L: int) -> list[int]:
    """Dictionary column of every active terminal's tap: omega = k*L + ell."""
    return [int(k) * L + real.profiles[k].delay for k in real.active_set]


def true_stacked_coeffs(
    real: ChannelRealization, cfg: SystemConfig, support: list[int] | None = None
) -> np.ndarray:
    """Exact per-slot tap values at the ISI-free anchors, (Q, N*P).

    Row q follows support[q] (defaults to the true support): entry at column
    s*P + p is h_{k,p}[anchor_s, ell_k], the coefficient the stacked linear
    model assigns to that path in slot s at antenna p.
    """
    if support is None:
        support = true_support(real, cfg.L)
    anchors = slot_anchors(cfg)
    out = np.zeros((len(support), cfg.N * cfg.P), dtype=np.complex128)
    for row, omega in enumerate(support):
        k, ell = divmod(omega, cfg.L)
        prof = real.profiles[k]
        if not prof.alpha or prof.delay != ell:
            continue
        slot_phase = np.exp(2j * np.pi * prof.doppler * (anchors - ell) / cfg.frame_len)
        out[row] = np.outer(prof.gain * slot_phase, prof.steering).ravel()
    return out


def oracle_ls(
    rx, truth: ChannelRealization, ts_list: list[TrainingSequence], cfg: SystemConfig
) -> ChannelEstimate:
    """Known-support lower bound: skip the pursuit, least-squares the true
    support, then run the identical parametric stage."""
    sensing = build_sensing_matrix(ts_list, cfg.L)
    meas = extract_isi_free(rx, cfg)
    support = true_support(truth, cfg.L)
    if not support:
        return parametric_stage(
            RecoverySolution(
                support=(),
                coeffs=np.zeros((0, cfg.N * cfg.P), dtype=np.complex128),
                residual_norm=float(np.linalg.norm(meas.r_ts)),
                residual_history=(),
            ),
            sensing,
            cfg,
        )
    coeffs = least_squares_solve(sensing.psi[:, support], meas.r_ts)
    coeffs = coeffs.reshape(len(support), -1)
    residual = float(np.linalg.norm(meas.r_ts - sensing.psi[:, support] @ coeffs))
    sol = RecoverySolution(
        support=tuple(support),
        coeffs=coeffs,
        residual_norm=residual,
        residual_history=(),
    )
    return parametric_stage(sol, sensing, cfg, meas=meas)


# ============================================================================
# Trials and sweeps
# ============================================================================


@dataclass(frozen=True)
class TrialResult:
    snr_db: float
    aer: float
    nmse: float
    nmse_oracle: float
    detected_count: int
    runtime_ms: float


@dataclass(frozen=True)
class SweepSpec:
    """Sweep definition: base config, SNR grid, trials per point."""

    cfg: SystemConfig
    snr_grid_db: tuple[float, ...]
    trials: int
    workers: int = 1
    stop: StoppingRule | None = None

    def __post_init__(self) -> None:
        if len(self.snr_grid_db) == 0:
            raise InvalidConfig("SNR grid must be nonempty")
        if self.trials < 1:
            raise InvalidConfig("trials must be >= 1")
        if self.workers < 1:
            raise InvalidConfig("workers must be >= 1")


def make_ts_list(cfg: SystemConfig) -> list[TrainingSequence]:
    return [generate_ts(k, cfg.M_t, cfg.rng_seed) for k in range(cfg.K)]


def run_trial(
    cfg: SystemConfig,
    snr_db: float,
    seed_parts: tuple[int, ...],
    ts_list: list[TrainingSequence] | None = None,
    stop: StoppingRule | None = None,
) -> tuple[TrialResult, ChannelEstimate]:
    """One end-to-end realization: draw, transmit, receive, detect, score.

    seed_parts feeds a SeedSequence, so any tuple of integers is a valid,
    reproducible trial identity. The baseline shares the pipeline's RxFrame
    (paired comparison, no fresh noise draw).
    """
    cfg = cfg.with_snr(snr_db)
    if ts_list is None:
        ts_list = make_ts_list(cfg)
    ch_entropy, data_entropy, noise_entropy = np.random.SeedSequence(
        [int(s) for s in seed_parts]
    ).spawn(3)

    t0 = time.perf_counter()
    real = draw_realization(cfg, np.random.default_rng(ch_entropy))
    data_rng = np.random.default_rng(data_entropy)
    frames = {
        int(k): build_frame(int(k), cfg, rng=data_rng, ts=ts_list[int(k)])
        for k in real.active_set
    }
    rx = propagate(frames, real, cfg, np.random.default_rng(noise_entropy))
    estimate = run_pipeline(rx, ts_list, cfg, stop)
    baseline = oracle_ls(rx, real, ts_list, cfg)
    runtime_ms = (time.perf_counter() - t0) * 1e3

    result = TrialResult(
        snr_db=snr_db,
        aer=aer(estimate.alpha_hat, real.alpha_vector()),
        nmse=nmse(estimate, real, cfg),
        nmse_oracle=nmse(baseline, real, cfg),
        detected_count=int(np.sum(estimate.alpha_hat)),
        runtime_ms=runtime_ms,
    )
    return result, estimate


def _sweep_task(args) -> TrialResult | None:
    cfg, snr_db, seed_parts, stop = args
    try:
        result, _ = run_trial(cfg, snr_db, seed_parts, stop=stop)
        return result
    except (TsotfsError, np.linalg.LinAlgError, FloatingPointError):
        return None


def run_sweep(spec: SweepSpec) -> list[dict]:
    """Monte Carlo sweep over the SNR grid; one aggregate row per point.

    Trial (i, t) is seeded by (cfg.rng_seed, i, t). Failed trials (numerical
    errors) are excluded from the means and counted in `failures`; a point
    where every trial failed reports NaN means. Aggregation happens in trial
    index order whatever the worker count, keeping output bytes identical.
    """
    cfg = spec.cfg
    tasks = [
        (cfg, float(snr), (cfg.rng_seed, i, t), spec.stop)
        for i, snr in enumerate(spec.snr_grid_db)
        for t in range(spec.trials)
    ]
    if spec.workers > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            outcomes = list(pool.map(_sweep_task, tasks, chunksize=1))
    else:
        outcomes = [_sweep_task(t) for t in tasks]

    rows = []
    for i, snr in enumerate(spec.snr_grid_db):
        chunk = outcomes[i * spec.trials : (i + 1) * spec.trials]
        ok = [r for r in chunk if r is not None]
        failures = spec.trials - len(ok)

        def stats(values: list[float]) -> tuple[float, float]:
            if not values:
                return float("nan"), float("nan")
            arr = np.asarray(values, dtype=float)
            mean = float(arr.mean())
            ci = float(1.96 * arr.std(ddof=1) / np.sqrt(arr.size)) if arr.size > 1 else 0.0
            return mean, ci

        aer_mean, aer_ci = stats([r.aer for r in ok])
        nmse_mean, nmse_ci = stats([r.nmse for r in ok])
        orc_mean, orc_ci = stats([r.nmse_oracle for r in ok])
        rows.append(
            {
                "snr_db": float(snr),
                "aer_mean": aer_mean,
                "aer_ci": aer_ci,
                "nmse_mean": nmse_mean,
                "nmse_ci": nmse_ci,
                "nmse_oracle_mean": orc_mean,
                "nmse_oracle_ci": orc_ci,
                "failures": failures,
                "trials": spec.trials,
            }
        )
    return rows


CSV_COLUMNS = (
    "snr_db",
    "aer_mean",
    "aer_ci",
    "nmse_mean",
    "nmse_ci",
    "nmse_oracle_mean",
    "nmse_oracle_ci",
    "failures",
    "trials",
)


def format_sweep_csv(rows: list[dict]) -> str:
    """Render sweep rows: floats at 9 significant digits, counts as ints."""
    lines = [",".join(CSV_COLUMNS)]
    for row in rows:
        cells = []
        for col in CSV_COLUMNS:
            val = row[col]
            cells.append(str(int(val)) if col in ("failures", "trials") else f"{val:.9g}")
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def write_sweep_csv(rows: list[dict], path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(format_sweep_csv(rows))


# ============================================================================
# Config file ingestion
# ============================================================================

_SYSTEM_REQUIRED = (
    "M",
    "N",
    "M_t",
    "L",
    "K",
    "K_a",
    "P_x",
    "P_y",
    "carrier_freq",
    "bandwidth",
    "snr_db",
)
_SYSTEM_OPTIONAL = ("rng_seed", "max_doppler_hz")
_SWEEP_REQUIRED = ("snr_grid_db", "trials")
_SWEEP_OPTIONAL = ("workers",)


def load_config(path: str) -> tuple[SystemConfig, SweepSpec]:
    """Parse a TOML config file into (SystemConfig, SweepSpec).

    Every SystemConfig field is mandatory except the seeds and the Doppler
    range; the [sweep] table needs the SNR grid and the trial count.
    """
    try:
        import tomllib  # Python >= 3.11
    except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
        import tomli as tomllib

    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise InvalidConfig(f"cannot read config file: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise InvalidConfig(f"malformed config file: {exc}") from exc

    for table in ("system", "sweep"):
        if table not in data or not isinstance(data[table], dict):
            raise InvalidConfig(f"config must contain a [{table}] table")

    system = dict(data["system"])
    missing = [key for key in _SYSTEM_REQUIRED if key not in system]
    if missing:
        raise InvalidConfig(f"[system] missing required keys: {', '.join(missing)}")
    unknown = set(system) - set(_SYSTEM_REQUIRED) - set(_SYSTEM_OPTIONAL)
    if unknown:
        raise InvalidConfig(f"[system] unknown keys: {', '.join(sorted(unknown))}")
    try:
        cfg = SystemConfig(**system)
    except (TypeError, ValueError) as exc:
        raise InvalidConfig(f"[system] bad value: {exc}") from exc

    sweep = dict(data["sweep"])
    missing = [key for key in _SWEEP_REQUIRED if key not in sweep]
    if missing:
        raise InvalidConfig(f"[sweep] missing required keys: {', '.join(missing)}")
    unknown = set(sweep) - set(_SWEEP_REQUIRED) - set(_SWEEP_OPTIONAL)
    if unknown:
        raise InvalidConfig(f"[sweep] unknown keys: {', '.join(sorted(unknown))}")
    grid = sweep["snr_grid_db"]
    if not isinstance(grid, (list, tuple)) or not grid:
        raise InvalidConfig("[sweep] snr_grid_db must be a nonempty list")
    try:
        spec = SweepSpec(
            cfg=cfg,
            snr_grid_db=tuple(float(v) for v in grid),
            trials=int(sweep["trials"]),
            workers=int(sweep.get("workers", 1)),
        )
    except (TypeError, ValueError) as exc:
        raise InvalidConfig(f"[sweep] bad value: {exc}") from exc
    return cfg, spec
