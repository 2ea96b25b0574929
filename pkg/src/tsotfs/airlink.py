"""Received-signal synthesis at the satellite array.

The observation at antenna p is the superposition of every active terminal's
frame pushed through its single-tap time-varying channel, plus AWGN:

    r_p(kappa) = sum_{k active} h_{k,p}[kappa, ell_k] * s_k[kappa - ell_k]
                 + w_p(kappa),      w ~ CN(0, sigma_w^2) iid over (kappa, p).

Samples before the frame start (kappa < ell_k) are taken as zero: the
receiver only ever consumes ISI-free regions, so this cold-start convention
never reaches the detector.

SNR convention: snr_db relates the noiseless average per-antenna receive
power (measured over the synthesized frame, all kappa and p) to the noise
variance, sigma_w^2 = P_sig * 10^(-snr_db/10). With no active terminal the
SNR is undefined; sigma_w^2 falls back to 0 and a warning is emitted.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .channel import ChannelRealization
from .config import SystemConfig
from .errors import DimensionMismatch, NoActiveTerminals
from .modem import OtfsFrame


@dataclass(frozen=True)
class RxFrame:
    """Received samples (frame_len x P) plus the noise level baked into them."""

    samples: np.ndarray  # (N*(M+M_t), P) complex
    noise_var: float  # sigma_w^2 actually applied
    signal_power: float  # noiseless average per-antenna power
    snr_db: float


def _frame_lookup(frames, terminal: int) -> OtfsFrame:
    if isinstance(frames, Mapping):
        if terminal in frames:
            return frames[terminal]
    elif isinstance(frames, Sequence):
        for f in frames:
            if f.terminal == terminal:
                return f
    raise DimensionMismatch(f"no frame supplied for active terminal {terminal}")


def _noiseless_rx(frames, real: ChannelRealization, cfg: SystemConfig) -> np.ndarray:
    t_len = cfg.frame_len
    r = np.zeros((t_len, cfg.P), dtype=np.complex128)
    kappa = np.arange(t_len)
    for k in real.active_set:
        prof = real.profiles[k]
        s = _frame_lookup(frames, int(k)).time_signal
        if s.shape != (t_len,):
            raise DimensionMismatch(f"frame {k} has shape {s.shape}, expected ({t_len},)")
        delayed = np.zeros(t_len, dtype=np.complex128)
        if prof.delay:
            delayed[prof.delay :] = s[: t_len - prof.delay]
        else:
            delayed[:] = s
        phase = np.exp(2j * np.pi * prof.doppler * (kappa - prof.delay) / t_len)
        r += np.outer(prof.gain * phase * delayed, prof.steering)
    return r


def calibrate_noise(cfg: SystemConfig, real: ChannelRealization, frames) -> float:
    """Noise variance hitting the configured SNR for this realization.

    Measures the noiseless receive power empirically on the supplied frames
    rather than assuming unit-power inputs.
    """
    if real.active_set.size == 0:
        warnings.warn("no active terminal: SNR undefined, using sigma_w^2 = 0", NoActiveTerminals)
        return 0.0
    p_sig = float(np.mean(np.abs(_noiseless_rx(frames, real, cfg)) ** 2))
    return p_sig * 10.0 ** (-cfg.snr_db / 10.0)


def propagate(
    frames,
    real: ChannelRealization,
    cfg: SystemConfig,
    rng: np.random.Generator | None = None,
) -> RxFrame:
    """Synthesize the received frame at all P antennas.

    Parameters
    ----------
    frames : mapping or sequence of OtfsFrame covering every active terminal.
    real : channel ground truth for this frame.
    cfg : system configuration (snr_db sets the noise level).
    rng : noise source; required unless the configuration is noiseless.
    """
    r = _noiseless_rx(frames, real, cfg)
    p_sig = float(np.mean(np.abs(r) ** 2))
    if real.active_set.size == 0:
        warnings.warn("no active terminal: SNR undefined, using sigma_w^2 = 0", NoActiveTerminals)
        sigma2 = 0.0
    else:
        sigma2 = p_sig * 10.0 ** (-cfg.snr_db / 10.0)
    if sigma2 > 0.0:
        if rng is None:
            raise DimensionMismatch("propagate needs an rng when noise variance is nonzero")
        w = rng.standard_normal(r.shape) + 1j * rng.standard_normal(r.shape)
        r = r + w * np.sqrt(sigma2 / 2.0)
    return RxFrame(samples=r, noise_var=sigma2, signal_power=p_sig, snr_db=cfg.snr_db)
