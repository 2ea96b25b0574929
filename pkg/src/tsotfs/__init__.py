"""Grant-free NOMA-OTFS uplink receiver and link-level simulator.

A numpy/scipy library for LEO satellite IoT uplinks: OTFS modulation with
per-block training, a sparse single-tap channel truth model, and a two-stage
receiver (simultaneous orthogonal matching pursuit for joint activity
detection and delay recovery, then rotational-invariance Doppler estimation
and least-squares gain fitting), plus a reproducible Monte Carlo harness.
"""

from .airlink import RxFrame, calibrate_noise, propagate
from .channel import (
    ChannelRealization,
    TerminalProfile,
    cir,
    compose_realization,
    draw_realization,
    steering_vector,
    write_realization_csv,
)
from .config import SystemConfig
from .detector import (
    ChannelEstimate,
    FixedSparsity,
    PathEstimate,
    RecoverySolution,
    ResidualThreshold,
    SensingMatrix,
    StackedMeasurement,
    build_sensing_matrix,
    detect_activity,
    effective_cir_matrix,
    esprit_doppler,
    estimate_gains,
    estimate_to_dicts,
    extract_delays,
    extract_isi_free,
    parametric_stage,
    reconstruct_cir,
    run_pipeline,
    slot_anchors,
    somp,
    write_estimate_json,
)
from .errors import (
    DegenerateSubspace,
    DimensionMismatch,
    IndexNotInSupport,
    InvalidConfig,
    IterationBudgetExhausted,
    NoActiveTerminals,
    NotHermitian,
    RankDeficient,
    TerminalInactive,
    TsotfsError,
    UndefinedMetric,
)
from .harness import (
    SweepSpec,
    TrialResult,
    aer,
    format_sweep_csv,
    load_config,
    make_ts_list,
    nmse,
    oracle_ls,
    run_sweep,
    run_trial,
    true_stacked_coeffs,
    true_support,
    write_sweep_csv,
)
from .modem import (
    OtfsFrame,
    TrainingSequence,
    build_frame,
    deserialize_samples,
    generate_ts,
    heisenberg,
    isfft,
    random_qpsk_grid,
    read_samples,
    serialize_samples,
    sfft,
    wigner,
    write_samples,
    write_samples_csv,
)
from .numerics import hermitian_eig, least_squares_solve
from .selftest import run_selftest

__version__ = "0.1.0"

__all__ = [
    "ChannelEstimate",
    "ChannelRealization",
    "DegenerateSubspace",
    "DimensionMismatch",
    "FixedSparsity",
    "IndexNotInSupport",
    "InvalidConfig",
    "IterationBudgetExhausted",
    "NoActiveTerminals",
    "NotHermitian",
    "OtfsFrame",
    "PathEstimate",
    "RankDeficient",
    "RecoverySolution",
    "ResidualThreshold",
    "RxFrame",
    "SensingMatrix",
    "StackedMeasurement",
    "SweepSpec",
    "SystemConfig",
    "TerminalInactive",
    "TerminalProfile",
    "TrainingSequence",
    "TrialResult",
    "TsotfsError",
    "UndefinedMetric",
    "aer",
    "build_frame",
    "build_sensing_matrix",
    "calibrate_noise",
    "cir",
    "compose_realization",
    "deserialize_samples",
    "detect_activity",
    "draw_realization",
    "effective_cir_matrix",
    "esprit_doppler",
    "estimate_gains",
    "estimate_to_dicts",
    "extract_delays",
    "extract_isi_free",
    "format_sweep_csv",
    "generate_ts",
    "heisenberg",
    "hermitian_eig",
    "isfft",
    "least_squares_solve",
    "load_config",
    "make_ts_list",
    "nmse",
    "oracle_ls",
    "parametric_stage",
    "propagate",
    "random_qpsk_grid",
    "read_samples",
    "reconstruct_cir",
    "run_pipeline",
    "run_selftest",
    "run_sweep",
    "run_trial",
    "serialize_samples",
    "sfft",
    "slot_anchors",
    "somp",
    "steering_vector",
    "true_stacked_coeffs",
    "true_support",
    "wigner",
    "write_estimate_json",
    "write_realization_csv",
    "write_samples",
    "write_samples_csv",
    "write_sweep_csv",
    "__version__",
]
