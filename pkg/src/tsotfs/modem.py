"""Transmit-side frame construction.

Each terminal maps QPSK data onto an M x N delay-Doppler grid, converts it to
the time-frequency grid with the inverse symplectic finite Fourier transform,
then to M time samples per slot with a unitary Heisenberg transform
(rectangular pulse), and appends its training sequence after every slot:

    frame = [ s_1 | c_k | s_2 | c_k | ... | s_N | c_k ]

giving N*(M+M_t) samples with unit average power. The training sequence is a
pseudo-random QPSK vector regenerable from (terminal id, seed), so the
receiver can rebuild it without side information.

All transforms here are unitary, which makes the power accounting exact:
a unit-power delay-Doppler grid yields a unit-power time signal.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .config import SystemConfig
from .errors import DimensionMismatch, InvalidConfig

_QPSK_PHASES = np.exp(1j * (np.pi / 4 + np.pi / 2 * np.arange(4)))


@dataclass(frozen=True)
class TrainingSequence:
    """Known unit-modulus QPSK training block for one terminal."""

    terminal: int
    seed: int
    samples: np.ndarray  # (M_t,) complex, |c[m]| = 1

    def __post_init__(self) -> None:
        if self.samples.ndim != 1 or self.samples.size < 2:
            raise InvalidConfig("training sequence must be a vector of length >= 2")


@dataclass(frozen=True)
class OtfsFrame:
    """One terminal's transmit frame and its intermediate grids."""

    terminal: int
    dd_symbols: np.ndarray  # (M, N) delay-Doppler grid
    tf_symbols: np.ndarray  # (M, N) time-frequency grid
    time_signal: np.ndarray  # (N*(M+M_t),) serialized samples


def generate_ts(terminal: int, m_t: int, seed: int) -> TrainingSequence:
    """Draw the pseudo-random QPSK training sequence for one terminal.

    Deterministic in (terminal, seed); distinct terminals get statistically
    independent sequences, which keeps the cross-correlation between any two
    training blocks low and the sensing dictionary incoherent.
    """
    if m_t < 2:
        raise InvalidConfig(f"M_t must be >= 2, got {m_t}")
    rng = np.random.default_rng([int(seed), int(terminal)])
    symbols = _QPSK_PHASES[rng.integers(0, 4, size=m_t)]
    return TrainingSequence(terminal=terminal, seed=seed, samples=symbols)


def random_qpsk_grid(m: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """Unit-power QPSK payload grid of shape (m, n)."""
    return _QPSK_PHASES[rng.integers(0, 4, size=(m, n))]


def isfft(x_dd: np.ndarray) -> np.ndarray:
    """Inverse symplectic finite Fourier transform, delay-Doppler to TF.

    X_tf[m, n] = (1/sqrt(MN)) * sum_{l,q} X_dd[l, q] exp(j2pi(nq/N - ml/M)).
    Unitary, so Frobenius norms are preserved.
    """
    x_dd = np.asarray(x_dd, dtype=np.complex128)
    if x_dd.ndim != 2:
        raise DimensionMismatch(f"expected an M x N grid, got shape {x_dd.shape}")
    m, n = x_dd.shape
    return np.fft.fft(np.fft.ifft(x_dd, axis=1), axis=0) * np.sqrt(n / m)


def sfft(x_tf: np.ndarray) -> np.ndarray:
    """Symplectic finite Fourier transform, TF back to delay-Doppler."""
    x_tf = np.asarray(x_tf, dtype=np.complex128)
    if x_tf.ndim != 2:
        raise DimensionMismatch(f"expected an M x N grid, got shape {x_tf.shape}")
    m, n = x_tf.shape
    return np.fft.fft(np.fft.ifft(x_tf, axis=0), axis=1) * np.sqrt(m / n)


def heisenberg(x_tf: np.ndarray) -> np.ndarray:
    """Per-slot unitary IDFT of length M (rectangular transmit pulse)."""
    x_tf = np.asarray(x_tf, dtype=np.complex128)
    if x_tf.ndim != 2:
        raise DimensionMismatch(f"expected an M x N grid, got shape {x_tf.shape}")
    return np.fft.ifft(x_tf, axis=0) * np.sqrt(x_tf.shape[0])


def wigner(s_time: np.ndarray) -> np.ndarray:
    """Inverse of heisenberg: per-slot unitary DFT."""
    s_time = np.asarray(s_time, dtype=np.complex128)
    if s_time.ndim != 2:
        raise DimensionMismatch(f"expected an M x N matrix, got shape {s_time.shape}")
    return np.fft.fft(s_time, axis=0) / np.sqrt(s_time.shape[0])


def build_frame(
    terminal: int,
    cfg: SystemConfig,
    rng: np.random.Generator | None = None,
    data: np.ndarray | None = None,
    ts: TrainingSequence | None = None,
) -> OtfsFrame:
    """Assemble one terminal's transmit frame.

    Parameters
    ----------
    terminal : terminal id in [0, K).
    cfg : system configuration.
    rng : source for the QPSK payload when `data` is not given.
    data : optional (M, N) payload grid; drawn from `rng` if omitted.
    ts : optional training sequence; regenerated from (terminal,
        cfg.rng_seed) if omitted.

    Returns
    -------
    OtfsFrame with time_signal of length N*(M+M_t).
    """
    if data is None:
        if rng is None:
            raise InvalidConfig("build_frame needs either a data grid or an rng")
        data = random_qpsk_grid(cfg.M, cfg.N, rng)
    data = np.asarray(data, dtype=np.complex128)
    if data.shape != (cfg.M, cfg.N):
        raise DimensionMismatch(f"data grid {data.shape}, expected {(cfg.M, cfg.N)}")
    if ts is None:
        ts = generate_ts(terminal, cfg.M_t, cfg.rng_seed)
    if ts.samples.size != cfg.M_t:
        raise DimensionMismatch(f"TS length {ts.samples.size}, expected {cfg.M_t}")

    tf = isfft(data)
    s_slots = heisenberg(tf)  # (M, N), column per slot
    frame = np.empty(cfg.frame_len, dtype=np.complex128)
    blk = cfg.block_len
    for n in range(cfg.N):
        frame[n * blk : n * blk + cfg.M] = s_slots[:, n]
        frame[n * blk + cfg.M : (n + 1) * blk] = ts.samples
    return OtfsFrame(terminal=terminal, dd_symbols=data, tf_symbols=tf, time_signal=frame)


# ---------------------------------------------------------------------------
# Sample dumps: binary little-endian interleaved (re, im) float64 with a
# shape prefix, plus a CSV variant for eyeballing. Round-trips bit-exactly.
# ---------------------------------------------------------------------------


def serialize_samples(z: np.ndarray) -> bytes:
    """Encode a complex array: uint64 ndim, uint64 dims, then (re, im) pairs."""
    z = np.asarray(z, dtype=np.complex128)
    header = struct.pack("<Q", z.ndim) + struct.pack(f"<{z.ndim}Q", *z.shape)
    inter = np.empty(z.size * 2, dtype="<f8")
    inter[0::2] = z.real.ravel()
    inter[1::2] = z.imag.ravel()
    return header + inter.tobytes()


def deserialize_samples(blob: bytes) -> np.ndarray:
    """Inverse of serialize_samples."""
    (ndim,) = struct.unpack_from("<Q", blob, 0)
    shape = struct.unpack_from(f"<{ndim}Q", blob, 8)
    inter = np.frombuffer(blob, dtype="<f8", offset=8 + 8 * ndim)
    z = inter[0::2] + 1j * inter[1::2]
    return z.reshape(shape)


def write_samples(z: np.ndarray, path: str) -> None:
    with open(path, "wb") as fh:
        fh.write(serialize_samples(z))


def read_samples(path: str) -> np.ndarray:
    with open(path, "rb") as fh:
        return deserialize_samples(fh.read())


def write_samples_csv(z: np.ndarray, path: str) -> None:
    """Flat CSV dump: index, re, im (row-major over the array)."""
    z = np.asarray(z, dtype=np.complex128).ravel()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("index,re,im\n")
        for i, val in enumerate(z):
            fh.write(f"{i},{float(val.real)!r},{float(val.imag)!r}\n")
