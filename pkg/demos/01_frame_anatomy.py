"""Anatomy of one transmit frame.

Builds a single terminal's frame at small dimensions and verifies, by direct
computation, the properties the receiver relies on: the delay-Doppler to
time-frequency transform round-trips, each block is [M data samples | M_t
training samples], and the average frame power is one.
"""

import numpy as np

from tsotfs import SystemConfig, build_frame, generate_ts, isfft, sfft

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

rng = np.random.default_rng(0)
frame = build_frame(terminal=2, cfg=cfg, rng=rng)

print("frame length      :", frame.time_signal.size, "=", f"N*(M+M_t) = {cfg.N}*({cfg.M}+{cfg.M_t})")
print("payload grid      :", frame.dd_symbols.shape, "QPSK symbols (delay-Doppler domain)")

# The two-dimensional symplectic transform pair is unitary.
round_trip = sfft(isfft(frame.dd_symbols))
print("ISFFT/SFFT round trip max |err| :", np.max(np.abs(round_trip - frame.dd_symbols)))

# Block layout: data slot, then the terminal's training sequence.
ts = generate_ts(2, cfg.M_t, cfg.rng_seed)
blk = cfg.block_len
for n in range(cfg.N):
    tail = frame.time_signal[n * blk + cfg.M : (n + 1) * blk]
    assert np.array_equal(tail, ts.samples)
print("training sequence repeats at the tail of every block: verified")

power = np.mean(np.abs(frame.time_signal) ** 2)
print("average frame power:", f"{power:.12f} (unit by construction)")
