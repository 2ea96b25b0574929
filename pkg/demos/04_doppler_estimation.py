"""Doppler recovery from the per-slot rotation of recovered coefficients.

Stage one fits static dictionary columns, so each recovered coefficient row,
reshaped to slots x antennas, rotates by exp(j2pi*ups/N) per slot. Stage two
reads that rotation off with a total-least-squares subspace estimate. This
script shows the estimator alone on clean data, then the full two-stage
pipeline with interference-cancellation refinement on a three-terminal
scene, comparing Doppler error before and after refinement.
"""

import numpy as np

from tsotfs import (
    SystemConfig,
    build_frame,
    compose_realization,
    esprit_doppler,
    make_ts_list,
    propagate,
    run_pipeline,
)

# ============================================================================
# The estimator alone: exact on a clean rank-one exponential grid
# ============================================================================

rng = np.random.default_rng(9)
n_slots, n_ant = 8, 4
print("clean rank-one grids, N = 8 slots, P = 4 antennas:")
for ups in (-3.5, -0.7, 0.0, 1.25, 3.9):
    a = rng.standard_normal(n_ant) + 1j * rng.standard_normal(n_ant)
    grid = np.exp(2j * np.pi * ups * np.arange(n_slots)[:, None] / n_slots) * a
    est = esprit_doppler(grid)
    print(f"  ups = {ups:+6.3f}  estimate = {est:+9.6f}  |err| = {abs(est - ups):.2e}")

# ============================================================================
# Through the pipeline: leakage between paths, then refinement
# ============================================================================

cfg = SystemConfig(
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
terminals = {
    2: {"gain": 0.9 + 0.1j, "doppler": 0.35, "delay": 1, "theta": 0.4, "phi": 1.0},
    5: {"gain": -0.6 + 0.7j, "doppler": -1.2, "delay": 4, "theta": 1.1, "phi": 4.2},
    11: {"gain": 0.3 - 1.0j, "doppler": 1.8, "delay": 0, "theta": 0.8, "phi": 2.5},
}
real = compose_realization(cfg, terminals)
ts_list = make_ts_list(cfg)
rng = np.random.default_rng(3)
frames = {k: build_frame(k, cfg, rng=rng, ts=ts_list[k]) for k in terminals}
rx = propagate(frames, real, cfg.with_snr(float("inf")), rng)

print()
print("noiseless three-terminal scene, Doppler error vs refinement sweeps:")
print(f"{'sweeps':>7}" + "".join(f"  terminal {k:>2}" for k in sorted(terminals)))
for iters in (0, 1, 2, 4):
    est = run_pipeline(rx, ts_list, cfg, refine_iters=iters)
    errs = [
        abs(est.paths[k][0].doppler - terminals[k]["doppler"])
        for k in sorted(terminals)
    ]
    print(f"{iters:>7}" + "".join(f"  {e:11.2e}" for e in errs))
print()
print("each sweep re-estimates every path on the measurement minus the")
print("reconstruction of all other paths, so cross-path leakage contracts")
print("geometrically toward the single-path (exact) case.")
