"""SystemConfig validation and derived dimensions."""

import dataclasses

import numpy as np
import pytest

from tsotfs import InvalidConfig, SystemConfig


def test_default_derived_dimensions():
    cfg = SystemConfig()
    assert cfg.P == 100
    assert cfg.G == 32
    assert cfg.block_len == 320
    assert cfg.frame_len == 2560


def test_small_derived_dimensions(small_cfg):
    assert small_cfg.P == 4
    assert small_cfg.G == small_cfg.M_t - small_cfg.L + 1 == 12
    assert small_cfg.frame_len == small_cfg.N * (small_cfg.M + small_cfg.M_t)


def test_normalized_doppler_default_scale():
    cfg = SystemConfig()
    # 178.2 kHz over a 2560-sample frame at 122.88 MHz: 3.7125 cycles/frame.
    np.testing.assert_allclose(cfg.normalized_doppler(178.2e3), 3.7125, rtol=1e-12)
    assert cfg.normalized_doppler(0.0) == 0.0
    assert cfg.normalized_doppler(178.2e3) < cfg.N / 2.0


@pytest.mark.parametrize(
    "overrides",
    [
        {"M": 0},
        {"N": 1},
        {"L": 0},
        {"M_t": 33},  # must exceed L = 33
        {"K": 0},
        {"K_a": -1},
        {"K_a": 101},
        {"P_x": 0},
        {"P_y": 0},
        {"carrier_freq": 0.0},
        {"bandwidth": -1.0},
        {"max_doppler_hz": -1.0},
    ],
)
def test_invalid_fields_raise(overrides):
    with pytest.raises(InvalidConfig):
        SystemConfig(**overrides)


def test_k_a_zero_is_allowed():
    cfg = SystemConfig(K_a=0)
    assert cfg.K_a == 0


def test_with_snr_returns_new_frozen_instance():
    cfg = SystemConfig()
    noisy = cfg.with_snr(3.0)
    assert noisy.snr_db == 3.0
    assert cfg.snr_db == 20.0
    with pytest.raises(dataclasses.FrozenInstanceError):
        cfg.snr_db = 1.0
