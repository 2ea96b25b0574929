"""System configuration for the uplink simulator.

All dimensioning follows the same sample-level layout: each of the N OTFS
symbols occupies M data samples followed by an M_t-sample training block,
so one frame spans N*(M+M_t) samples at the configured bandwidth (which is
also the complex sample rate).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import InvalidConfig


@dataclass(frozen=True)
class SystemConfig:
    """Static system parameters shared by transmitter, channel and receiver.

    Parameters
    ----------
    M : int
        Subcarriers per OTFS symbol (data samples per symbol).
    N : int
        Time slots (OTFS symbols) per frame. Needs N >= 2 so the Doppler
        estimator has two shifted subarrays to compare.
    M_t : int
        Training-sequence length in samples, appended after every symbol.
    L : int
        Exclusive upper bound on the discrete path delay: ell_k in [0, L).
        Must satisfy M_t > L so the ISI-free window G = M_t - L + 1 >= 2.
    K : int
        Number of potential terminals.
    K_a : int
        Number of simultaneously active terminals (K_a <= K).
    P_x, P_y : int
        Receive uniform planar array dimensions; P = P_x * P_y antennas.
    carrier_freq : float
        Carrier frequency in Hz (sets the Doppler scale).
    bandwidth : float
        Occupied bandwidth == complex sample rate, in Hz.
    snr_db : float
        Receive SNR in dB: average per-antenna signal power over noise
        variance. May be math.inf for the noiseless case.
    rng_seed : int
        Base seed. Also seeds the training-sequence family, which both
        transmitter and receiver must be able to regenerate.
    max_doppler_hz : float
        Upper edge of the physical Doppler range terminals are drawn from.
        The default corresponds to the combined satellite and terminal
        motion at a 10 GHz carrier for a low-orbit pass.
    """

    M: int = 256
    N: int = 8
    M_t: int = 64
    L: int = 33
    K: int = 100
    K_a: int = 10
    P_x: int = 10
    P_y: int = 10
    carrier_freq: float = 10.0e9
    bandwidth: float = 122.88e6
    snr_db: float = 20.0
    rng_seed: int = 0
    max_doppler_hz: float = 178.2e3

    def __post_init__(self) -> None:
        checks = [
            (self.M >= 1, "M must be >= 1"),
            (self.N >= 2, "N must be >= 2 (two subarrays needed for Doppler)"),
            (self.L >= 1, "L must be >= 1"),
            (self.M_t > self.L, "M_t must exceed L so the ISI-free window is nonempty"),
            (self.K >= 1, "K must be >= 1"),
            (0 <= self.K_a <= self.K, "K_a must lie in [0, K]"),
            (self.P_x >= 1 and self.P_y >= 1, "array dimensions must be >= 1"),
            (self.carrier_freq > 0, "carrier_freq must be positive"),
            (self.bandwidth > 0, "bandwidth must be positive"),
            (self.max_doppler_hz >= 0, "max_doppler_hz must be nonnegative"),
        ]
        for ok, msg in checks:
            if not ok:
                raise InvalidConfig(msg)

    # ---- derived dimensions -------------------------------------------------

    @property
    def P(self) -> int:
        """Total receive antennas."""
        return self.P_x * self.P_y

    @property
    def G(self) -> int:
        """ISI-free samples per training block: G = M_t - L + 1."""
        return self.M_t - self.L + 1

    @property
    def block_len(self) -> int:
        """Samples per symbol-plus-training block: M + M_t."""
        return self.M + self.M_t

    @property
    def frame_len(self) -> int:
        """Samples per frame: N * (M + M_t)."""
        return self.N * self.block_len

    def normalized_doppler(self, f_d_hz: float) -> float:
        """Map a physical Doppler shift in Hz to cycles per frame duration."""
        return f_d_hz * self.frame_len / self.bandwidth

    def with_snr(self, snr_db: float) -> "SystemConfig":
        return replace(self, snr_db=snr_db)
