"""Ground-truth channel model for the terrestrial-to-satellite uplink.

Each terminal sees a single line-of-sight tap with three parameters: an
integer delay ell_k, a complex small-scale gain g_k, and a Doppler shift
expressed in normalized form

    upsilon_k = f_d * N*(M+M_t) / bandwidth    (cycles per frame duration),

so the per-sample phase progression is exp(j*2*pi*upsilon_k*kappa / (N*(M+M_t))).
The satellite receives through a P_x x P_y planar array; the array response
enters only as a per-antenna unit-modulus factor [v_k]_p, and the receiver
never exploits its structure, so the exact steering convention is not
load-bearing.

The discrete impulse response for terminal k at antenna p is

    h_{k,p}[kappa, ell] = g_k * exp(j2pi upsilon_k (kappa - ell_k) / (N(M+M_t)))
                          * delta[ell - ell_k] * [v_k]_p.

Doppler magnitudes are capped below N/2: the estimator reads one phase step
per slot, which is unambiguous only inside that range.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .config import SystemConfig
from .errors import InvalidConfig

# Safety margin keeping |upsilon| strictly inside the identifiable range.
_DOPPLER_CLIP = 1.0 - 1e-9


@dataclass(frozen=True)
class TerminalProfile:
    """Ground truth for one terminal (0-based id)."""

    terminal: int
    alpha: int  # 1 if transmitting in this frame
    gain: complex  # g_k, CN(0, 1) small-scale fading
    doppler: float  # upsilon_k, cycles per frame duration, |.| < N/2
    delay: int  # ell_k in [0, L)
    theta: float  # boresight angle, radians
    phi: float  # azimuth angle, radians
    steering: np.ndarray  # (P,) unit-modulus array response


@dataclass(frozen=True)
class ChannelRealization:
    """One frame's worth of ground truth across all K terminals."""

    profiles: tuple[TerminalProfile, ...]
    active_set: np.ndarray  # sorted 0-based ids with alpha == 1

    @property
    def K(self) -> int:
        return len(self.profiles)

    def alpha_vector(self) -> np.ndarray:
        return np.array([p.alpha for p in self.profiles], dtype=int)


def steering_vector(p_x: int, p_y: int, theta: float, phi: float) -> np.ndarray:
    """Planar-array response at half-wavelength spacing.

    Entry for element (a, b) is exp(j*pi*(a*sin(theta)cos(phi) +
    b*sin(theta)sin(phi))), flattened with a as the major index. Unit modulus
    by construction, so ||v||^2 = P.
    """
    if p_x < 1 or p_y < 1:
        raise InvalidConfig("array dimensions must be >= 1")
    a = np.arange(p_x)[:, None]
    b = np.arange(p_y)[None, :]
    phase = np.pi * (a * np.sin(theta) * np.cos(phi) + b * np.sin(theta) * np.sin(phi))
    return np.exp(1j * phase).ravel()


def draw_realization(cfg: SystemConfig, rng: np.random.Generator) -> ChannelRealization:
    """Sample a full channel realization.

    Exactly K_a terminals are active, chosen uniformly without replacement.
    Every terminal (active or not) gets a parameter draw so the stream of
    random variates consumed is independent of which ids come up active:

    - delay uniform on {0, ..., L-1},
    - gain circularly-symmetric complex Gaussian, unit variance,
    - physical Doppler uniform on [0, max_doppler_hz], normalized to cycles
      per frame and clipped just inside +-N/2,
    - array angles uniform over the field of view.
    """
    k = cfg.K
    active = np.sort(rng.choice(k, size=cfg.K_a, replace=False)) if cfg.K_a else np.array([], dtype=int)
    alpha = np.zeros(k, dtype=int)
    alpha[active] = 1

    delays = rng.integers(0, cfg.L, size=k)
    gains = (rng.standard_normal(k) + 1j * rng.standard_normal(k)) / np.sqrt(2.0)
    f_d = rng.uniform(0.0, cfg.max_doppler_hz, size=k)
    limit = (cfg.N / 2.0) * _DOPPLER_CLIP
    dopplers = np.clip(cfg.normalized_doppler(1.0) * f_d, -limit, limit)
    thetas = rng.uniform(0.0, np.pi / 2.0, size=k)
    phis = rng.uniform(0.0, 2.0 * np.pi, size=k)

    profiles = tuple(
        TerminalProfile(
            terminal=i,
            alpha=int(alpha[i]),
            gain=complex(gains[i]),
            doppler=float(dopplers[i]),
            delay=int(delays[i]),
            theta=float(thetas[i]),
            phi=float(phis[i]),
            steering=steering_vector(cfg.P_x, cfg.P_y, thetas[i], phis[i]),
        )
        for i in range(k)
    )
    return ChannelRealization(profiles=profiles, active_set=active)


def compose_realization(cfg: SystemConfig, terminals: dict) -> ChannelRealization:
    """Build a realization from explicit per-terminal parameters.

    terminals maps terminal id to a dict with keys gain, doppler, delay and
    optional theta, phi (default broadside). Ids absent from the mapping are
    inactive with zeroed parameters. Intended for controlled experiments
    where randomness would get in the way.
    """
    profiles = []
    for k in range(cfg.K):
        spec = terminals.get(k)
        if spec is None:
            profiles.append(
                TerminalProfile(
                    terminal=k,
                    alpha=0,
                    gain=0.0 + 0.0j,
                    doppler=0.0,
                    delay=0,
                    theta=0.0,
                    phi=0.0,
                    steering=steering_vector(cfg.P_x, cfg.P_y, 0.0, 0.0),
                )
            )
            continue
        delay = int(spec["delay"])
        if not 0 <= delay < cfg.L:
            raise InvalidConfig(f"terminal {k}: delay {delay} outside [0, {cfg.L})")
        doppler = float(spec["doppler"])
        if abs(doppler) >= cfg.N / 2.0:
            raise InvalidConfig(
                f"terminal {k}: normalized Doppler {doppler} outside (-N/2, N/2)"
            )
        theta = float(spec.get("theta", 0.0))
        phi = float(spec.get("phi", 0.0))
        profiles.append(
            TerminalProfile(
                terminal=k,
                alpha=1,
                gain=complex(spec["gain"]),
                doppler=doppler,
                delay=delay,
                theta=theta,
                phi=phi,
                steering=steering_vector(cfg.P_x, cfg.P_y, theta, phi),
            )
        )
    active = np.array(sorted(int(k) for k in terminals), dtype=int)
    if active.size and (active.min() < 0 or active.max() >= cfg.K):
        raise InvalidConfig("terminal id outside [0, K)")
    return ChannelRealization(profiles=tuple(profiles), active_set=active)


def cir(profile: TerminalProfile, p: int, kappa, ell: int, cfg: SystemConfig):
    """Evaluate h_{k,p}[kappa, ell]; kappa may be a scalar or an array.

    Zero unless ell is the terminal's tap. The nonzero tap is a single
    complex exponential in kappa with |h| = |g_k| everywhere.
    """
    kappa = np.asarray(kappa, dtype=float)
    if ell != profile.delay:
        out = np.zeros(kappa.shape, dtype=np.complex128)
        return out if out.ndim else complex(out)
    phase = 2.0 * np.pi * profile.doppler * (kappa - profile.delay) / cfg.frame_len
    out = profile.gain * np.exp(1j * phase) * profile.steering[p]
    return out if out.ndim else complex(out)


def write_realization_csv(real: ChannelRealization, path: str) -> None:
    """Debug dump, one row per (terminal, antenna)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["k", "p", "alpha", "ell", "upsilon_re", "gain_re", "gain_im", "steer_re", "steer_im"]
        )
        for prof in real.profiles:
            for p in range(prof.steering.size):
                writer.writerow(
                    [
                        prof.terminal,
                        p,
                        prof.alpha,
                        prof.delay,
                        repr(prof.doppler),
                        repr(prof.gain.real),
                        repr(prof.gain.imag),
                        repr(prof.steering[p].real),
                        repr(prof.steering[p].imag),
                    ]
                )
