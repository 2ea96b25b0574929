"""Shared test fixtures: a small fast configuration and scene builders."""

from __future__ import annotations

import numpy as np
import pytest

from tsotfs import (
    SystemConfig,
    build_frame,
    compose_realization,
    make_ts_list,
    propagate,
)


@pytest.fixture
def small_cfg() -> SystemConfig:
    return SystemConfig(
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


@pytest.fixture
def tiny_cfg() -> SystemConfig:
    return SystemConfig(
        M=8,
        N=2,
        M_t=6,
        L=3,
        K=4,
        K_a=2,
        P_x=2,
        P_y=1,
        carrier_freq=10.0e9,
        bandwidth=122.88e6,
        snr_db=20.0,
        rng_seed=3,
        max_doppler_hz=3.0e6,
    )


def make_scene(cfg: SystemConfig, terminals: dict, seed: int, snr_db: float = float("inf")):
    """Composed realization, frames, noiseless-or-noisy rx and the TS list."""
    rng = np.random.default_rng(seed)
    real = compose_realization(cfg, terminals)
    frames = {k: build_frame(k, cfg, rng=rng) for k in terminals}
    rx = propagate(frames, real, cfg.with_snr(snr_db), rng)
    return real, frames, rx, make_ts_list(cfg)
