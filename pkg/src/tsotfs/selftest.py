"""Fast built-in checks that exercise every stage against analytic truths.

Each check prints one [ ok ]/[FAIL] line; run_selftest returns True only if
all pass. The whole battery is sized to finish in a few seconds so it can
gate installs and batch jobs.
"""

from __future__ import annotations

import sys

import numpy as np

from .airlink import propagate
from .channel import compose_realization
from .config import SystemConfig
from .detector import (
    FixedSparsity,
    build_sensing_matrix,
    esprit_doppler,
    extract_isi_free,
    run_pipeline,
    somp,
)
from .harness import aer, nmse, true_stacked_coeffs, true_support
from .modem import build_frame, generate_ts, isfft, random_qpsk_grid, sfft
from .numerics import hermitian_eig, least_squares_solve

_SMALL = SystemConfig(
    M=32,
    N=4,
    M_t=16,
    L=5,
    K=12,
    K_a=3,
    P_x=2,
    P_y=2,
    carrier_freq=10.0e9,
    bandwidth=122.88e6,
    snr_db=20.0,
    rng_seed=7,
    max_doppler_hz=1.25e6,
)


def _check_numerics() -> bool:
    rng = np.random.default_rng(0)
    a = rng.standard_normal((8, 3)) + 1j * rng.standard_normal((8, 3))
    x = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
    x_hat = least_squares_solve(a, a @ x)
    if not np.allclose(x_hat, x, atol=1e-10):
        return False
    h = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    h = h @ h.conj().T
    w, v = hermitian_eig(h)
    return bool(
        np.allclose(h @ v, v * w, atol=1e-9) and np.all(np.diff(w) <= 1e-12)
    )


def _check_modem() -> bool:
    rng = np.random.default_rng(1)
    grid = random_qpsk_grid(_SMALL.M, _SMALL.N, rng)
    round_trip = sfft(isfft(grid))
    return bool(np.allclose(round_trip, grid, atol=1e-12))


def _check_static_identity() -> bool:
    cfg = _SMALL
    rng = np.random.default_rng(2)
    terminals = {
        1: {"gain": 0.8 - 0.3j, "doppler": 0.0, "delay": 2},
        4: {"gain": -0.5 + 1.1j, "doppler": 0.0, "delay": 0},
        9: {"gain": 0.2 + 0.9j, "doppler": 0.0, "delay": 4},
    }
    real = compose_realization(cfg, terminals)
    frames = {k: build_frame(k, cfg, rng=rng) for k in terminals}
    rx = propagate(frames, real, cfg.with_snr(float("inf")), rng)
    meas = extract_isi_free(rx, cfg)
    ts_list = [generate_ts(k, cfg.M_t, cfg.rng_seed) for k in range(cfg.K)]
    sensing = build_sensing_matrix(ts_list, cfg.L)
    support = true_support(real, cfg.L)
    h_true = true_stacked_coeffs(real, cfg, support)
    resid = meas.r_ts - sensing.psi[:, support] @ h_true
    rel = np.linalg.norm(resid) / np.linalg.norm(meas.r_ts)
    return bool(rel <= 1e-10)


def _check_esprit() -> bool:
    n, p = 8, 4
    rng = np.random.default_rng(3)
    for ups in (-3.5, -1.0, 0.0, 0.25, 1.5, 3.9):
        phases = np.exp(2j * np.pi * ups * np.arange(n) / n)
        mat = np.outer(phases, rng.standard_normal(p) + 1j * rng.standard_normal(p))
        if abs(esprit_doppler(mat) - ups) > 1e-6:
            return False
    return True


def _check_sparse_recovery() -> bool:
    cfg = _SMALL
    rng = np.random.default_rng(4)
    terminals = {
        0: {"gain": 1.0 + 0.2j, "doppler": 0.0, "delay": 1},
        7: {"gain": -0.4 - 0.9j, "doppler": 0.0, "delay": 3},
    }
    real = compose_realization(cfg, terminals)
    frames = {k: build_frame(k, cfg, rng=rng) for k in terminals}
    rx = propagate(frames, real, cfg.with_snr(float("inf")), rng)
    ts_list = [generate_ts(k, cfg.M_t, cfg.rng_seed) for k in range(cfg.K)]
    sensing = build_sensing_matrix(ts_list, cfg.L)
    meas = extract_isi_free(rx, cfg)
    sol = somp(sensing, meas, FixedSparsity(len(terminals)))
    return sorted(sol.support) == sorted(true_support(real, cfg.L))


def _check_end_to_end() -> bool:
    cfg = _SMALL
    rng = np.random.default_rng(5)
    terminals = {
        2: {"gain": 0.9 + 0.1j, "doppler": 0.35, "delay": 1, "theta": 0.4, "phi": 1.0},
        5: {"gain": -0.6 + 0.7j, "doppler": -1.2, "delay": 4, "theta": 1.1, "phi": 4.2},
        11: {"gain": 0.3 - 1.0j, "doppler": 1.8, "delay": 0, "theta": 0.8, "phi": 2.5},
    }
    real = compose_realization(cfg, terminals)
    frames = {k: build_frame(k, cfg, rng=rng) for k in terminals}
    rx = propagate(frames, real, cfg.with_snr(float("inf")), rng)
    ts_list = [generate_ts(k, cfg.M_t, cfg.rng_seed) for k in range(cfg.K)]
    estimate = run_pipeline(rx, ts_list, cfg)
    if aer(estimate.alpha_hat, real.alpha_vector()) != 0.0:
        return False
    return nmse(estimate, real, cfg) <= 1e-6


_CHECKS = (
    ("linear algebra kernels", _check_numerics),
    ("modem transform round trip", _check_modem),
    ("static stacked-model identity", _check_static_identity),
    ("rotational Doppler estimate", _check_esprit),
    ("noiseless support recovery", _check_sparse_recovery),
    ("noiseless end-to-end pipeline", _check_end_to_end),
)


def run_selftest(stream=None) -> bool:
    """Run every check, print one status line each, return overall pass."""
    stream = stream if stream is not None else sys.stdout
    all_ok = True
    for label, check in _CHECKS:
        try:
            ok = bool(check())
        except Exception as exc:  # noqa: BLE001 - report, do not crash the battery
            print(f"[FAIL] {label}: {type(exc).__name__}: {exc}", file=stream)
            all_ok = False
            continue
        print(f"[{' ok ' if ok else 'FAIL'}] {label}", file=stream)
        all_ok = all_ok and ok
    return all_ok
