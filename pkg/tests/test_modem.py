"""Frame construction: transforms against direct DFT oracles, layout, dumps."""

import numpy as np
import pytest

from tsotfs import (
    DimensionMismatch,
    InvalidConfig,
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

_QPSK_SET = np.exp(1j * (np.pi / 4 + np.pi / 2 * np.arange(4)))


def _isfft_direct(x_dd):
    """Brute-force ISFFT definition, quadratic in the grid size."""
    m, n = x_dd.shape
    out = np.zeros((m, n), dtype=np.complex128)
    for mm in range(m):
        for nn in range(n):
            acc = 0.0
            for l in range(m):
                for q in range(n):
                    acc += x_dd[l, q] * np.exp(2j * np.pi * (nn * q / n - mm * l / m))
            out[mm, nn] = acc / np.sqrt(m * n)
    return out


def test_isfft_matches_direct_definition():
    rng = np.random.default_rng(0)
    x_dd = rng.standard_normal((4, 3)) + 1j * rng.standard_normal((4, 3))
    np.testing.assert_allclose(isfft(x_dd), _isfft_direct(x_dd), atol=1e-12)


def test_transforms_are_unitary_and_invertible():
    rng = np.random.default_rng(1)
    x = rng.standard_normal((16, 6)) + 1j * rng.standard_normal((16, 6))
    for fwd, inv in [(isfft, sfft), (heisenberg, wigner)]:
        y = fwd(x)
        np.testing.assert_allclose(np.linalg.norm(y), np.linalg.norm(x), rtol=1e-12)
        np.testing.assert_allclose(inv(y), x, atol=1e-12)


def test_heisenberg_is_per_column_unitary_idft():
    rng = np.random.default_rng(2)
    x = rng.standard_normal((8, 3)) + 1j * rng.standard_normal((8, 3))
    ref = np.column_stack(
        [np.fft.ifft(x[:, n]) * np.sqrt(x.shape[0]) for n in range(x.shape[1])]
    )
    np.testing.assert_allclose(heisenberg(x), ref, atol=1e-12)


@pytest.mark.parametrize("fn", [isfft, sfft, heisenberg, wigner])
def test_transforms_reject_non_2d(fn):
    with pytest.raises(DimensionMismatch):
        fn(np.ones(8, dtype=complex))


def test_training_sequence_deterministic_qpsk():
    a = generate_ts(3, 64, seed=9)
    b = generate_ts(3, 64, seed=9)
    c = generate_ts(4, 64, seed=9)
    d = generate_ts(3, 64, seed=10)
    np.testing.assert_array_equal(a.samples, b.samples)
    assert not np.array_equal(a.samples, c.samples)
    assert not np.array_equal(a.samples, d.samples)
    np.testing.assert_allclose(np.abs(a.samples), 1.0, rtol=1e-12)
    # Every sample is drawn from the QPSK alphabet.
    dists = np.min(np.abs(a.samples[:, None] - _QPSK_SET[None, :]), axis=1)
    assert dists.max() < 1e-12
    with pytest.raises(InvalidConfig):
        generate_ts(0, 1, seed=0)


def test_random_qpsk_grid_alphabet():
    grid = random_qpsk_grid(16, 4, np.random.default_rng(5))
    assert grid.shape == (16, 4)
    dists = np.min(np.abs(grid.ravel()[:, None] - _QPSK_SET[None, :]), axis=1)
    assert dists.max() < 1e-12


def test_build_frame_layout(small_cfg):
    cfg = small_cfg
    rng = np.random.default_rng(3)
    data = random_qpsk_grid(cfg.M, cfg.N, rng)
    frame = build_frame(2, cfg, data=data)
    assert frame.time_signal.shape == (cfg.frame_len,)
    slots = heisenberg(isfft(data))
    ts = generate_ts(2, cfg.M_t, cfg.rng_seed)
    blk = cfg.block_len
    for n in range(cfg.N):
        np.testing.assert_allclose(
            frame.time_signal[n * blk : n * blk + cfg.M], slots[:, n], atol=1e-12
        )
        np.testing.assert_allclose(
            frame.time_signal[n * blk + cfg.M : (n + 1) * blk], ts.samples, atol=1e-12
        )


def test_build_frame_unit_average_power(small_cfg):
    frame = build_frame(0, small_cfg, rng=np.random.default_rng(4))
    np.testing.assert_allclose(
        np.mean(np.abs(frame.time_signal) ** 2), 1.0, rtol=1e-12
    )


def test_build_frame_errors(small_cfg):
    cfg = small_cfg
    with pytest.raises(InvalidConfig):
        build_frame(0, cfg)  # neither data nor rng
    with pytest.raises(DimensionMismatch):
        build_frame(0, cfg, data=np.ones((cfg.M, cfg.N + 1), dtype=complex))
    with pytest.raises(DimensionMismatch):
        build_frame(0, cfg, rng=np.random.default_rng(0), ts=generate_ts(0, cfg.M_t + 1, 0))


def test_sample_serialization_round_trip(tmp_path):
    rng = np.random.default_rng(6)
    for shape in [(7,), (5, 3)]:
        z = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        back = deserialize_samples(serialize_samples(z))
        assert back.shape == z.shape
        np.testing.assert_array_equal(back, z)  # bit-exact

    z = rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2))
    path = tmp_path / "samples.bin"
    write_samples(z, str(path))
    np.testing.assert_array_equal(read_samples(str(path)), z)


def test_sample_csv_dump(tmp_path):
    z = np.array([1.5 - 0.25j, -2.0 + 3.0j])
    path = tmp_path / "samples.csv"
    write_samples_csv(z, str(path))
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "index,re,im"
    assert len(lines) == 3
    idx, re, im = lines[2].split(",")
    assert int(idx) == 1 and float(re) == -2.0 and float(im) == 3.0
