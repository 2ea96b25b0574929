"""Two-stage receiver: joint activity detection and channel estimation.

Stage one treats the tails of the received training blocks as a compressive
observation of a block-sparse vector. Within one received training block the
last G = M_t - L + 1 samples are free of data ISI, and stacking those windows
across the N slots and P antennas gives

    R_ts ~= Psi @ H + W,            Psi = [Psi_1 | Psi_2 | ... | Psi_K],

where Psi_k is the G x L Toeplitz matrix of terminal k's training sequence
and H is nonzero only in rows belonging to transmitting terminals. Every
column of R_ts shares that support (same terminals, same delays, whatever the
slot or antenna), which is the multiple-measurement-vector structure that a
simultaneous orthogonal matching pursuit exploits. Support indices decode
directly: omega = k*L + ell.

The equality above is exact for a static channel; Doppler makes the effective
column for a path a phase-drifted copy of psi (drift exp(j2pi*ups*r/(N(M+M_t)))
across the G window rows), a relative perturbation bounded by
2pi*|ups|*G/(N(M+M_t)). Stage two estimates that drift: the recovered
coefficient row of a path, reshaped to slots x antennas, is a single complex
exponential across slots (one phase step of 2pi*ups/N per slot), whose
frequency a TLS flavor of the rotational-invariance estimator extracts.
Per-antenna effective gains then come from one joint least squares that
models the pursuit's coefficients as seen through the drifted dictionary.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.linalg import toeplitz

from .airlink import RxFrame
from .config import SystemConfig
from .errors import (
    DegenerateSubspace,
    DimensionMismatch,
    IndexNotInSupport,
    InvalidConfig,
    IterationBudgetExhausted,
    RankDeficient,
    TerminalInactive,
)
from .modem import TrainingSequence
from .numerics import hermitian_eig, least_squares_solve

# ============================================================================
# Types
# ============================================================================


@dataclass(frozen=True)
class SensingMatrix:
    """Concatenated per-terminal Toeplitz blocks, shape (G, K*L)."""

    psi: np.ndarray
    K: int
    L: int

    @property
    def G(self) -> int:
        return self.psi.shape[0]


@dataclass(frozen=True)
class StackedMeasurement:
    """ISI-free windows stacked column-wise, shape (G, N*P).

    Column s*P + p holds the window of slot s (0-based) at antenna p.
    ups_bound is the receiver's prior on |Doppler| (cycles per frame),
    used by the residual stopping rule to budget for model drift.
    """

    r_ts: np.ndarray
    N: int
    P: int
    block_len: int  # M + M_t
    noise_var: float
    ups_bound: float

    @property
    def G(self) -> int:
        return self.r_ts.shape[0]


@dataclass(frozen=True)
class RecoverySolution:
    """SOMP output: support in selection order plus joint LS coefficients."""

    support: tuple[int, ...]
    coeffs: np.ndarray  # (len(support), N*P), rows aligned with support
    residual_norm: float
    residual_history: tuple[float, ...]  # squared Frobenius norms, per iteration


@dataclass(frozen=True)
class PathEstimate:
    delay: int
    doppler: float
    gains: np.ndarray  # (P,) effective per-antenna gains


@dataclass(frozen=True)
class ChannelEstimate:
    """Receiver verdict: activity flags and per-path parametric estimates."""

    K: int
    alpha_hat: np.ndarray  # (K,) 0/1
    paths: tuple[tuple[PathEstimate, ...], ...]  # length K, empty for inactive


# ---- stopping rules --------------------------------------------------------


@dataclass(frozen=True)
class FixedSparsity:
    """Stop after exactly `sparsity` selections (activity level known)."""

    sparsity: int


@dataclass(frozen=True)
class ResidualThreshold:
    """Stop once the residual is consistent with noise plus model drift.

    Stops when ||residual||_F^2 <= (1 + margin) * (G*NP*sigma^2 + drift
    allowance). sigma^2 comes from `noise_var`, falling back to the
    measurement's calibrated value. The drift allowance budgets for the
    Doppler phase drift across the G-sample window, which a static
    dictionary can never fit: its worst-case residual energy fraction for a
    path at |ups| = ups_bound is (2pi*ups_bound*G / (N(M+M_t)))^2 / 12
    (best-constant-fit residual of a linear phase ramp), applied to the
    signal energy captured so far and scaled by `drift_safety`.
    """

    noise_var: float | None = None
    margin: float = 0.1
    drift_safety: float = 1.0


StoppingRule = FixedSparsity | ResidualThreshold

# Relative numerical floor so exactly-modeled noiseless problems terminate.
_RESIDUAL_REL_FLOOR = 1e-9


# ============================================================================
# Stage one: stacked measurement, sensing matrix, sparse recovery
# ============================================================================


def slot_anchors(cfg: SystemConfig) -> np.ndarray:
    """Sample index of the first ISI-free row of each slot's training block.

    Slot s (0-based) occupies samples [s*(M+M_t), (s+1)*(M+M_t)); its
    training block starts at offset M, and the first sample clear of data
    ISI for every delay < L is M + L - 1. The stacked model references each
    slot's channel phase at exactly this anchor.
    """
    s = np.arange(cfg.N)
    return s * cfg.block_len + cfg.M + cfg.L - 1


def build_sensing_matrix(ts_list: list[TrainingSequence], L: int) -> SensingMatrix:
    """Assemble Psi = [Psi_1 | ... | Psi_K] from the known training sequences.

    Block k is G x L Toeplitz with [Psi_k]_{r, ell} = c_k[L-1+r-ell]: row r
    holds the training samples that multiply a path of delay ell at ISI-free
    row r. First column (ell = 0) is c[L-1:], first row is c[L-1::-1].
    """
    if not ts_list:
        raise InvalidConfig("need at least one training sequence")
    m_t = ts_list[0].samples.size
    if m_t <= L:
        raise InvalidConfig(f"M_t = {m_t} must exceed L = {L}")
    blocks = []
    for ts in ts_list:
        if ts.samples.size != m_t:
            raise DimensionMismatch("training sequences must share one length")
        c = ts.samples
        blocks.append(toeplitz(c[L - 1 :], c[L - 1 :: -1]))
    return SensingMatrix(psi=np.hstack(blocks), K=len(ts_list), L=L)


def extract_isi_free(rx: RxFrame, cfg: SystemConfig) -> StackedMeasurement:
    """Collect the last G samples of every received training block.

    Output column s*P + p is the window of slot s at antenna p, i.e. samples
    s*(M+M_t) + M + L - 1 ... s*(M+M_t) + M + M_t - 1 of antenna column p.
    """
    if rx.samples.shape != (cfg.frame_len, cfg.P):
        raise DimensionMismatch(
            f"rx shape {rx.samples.shape}, expected {(cfg.frame_len, cfg.P)}"
        )
    g = cfg.G
    out = np.empty((g, cfg.N * cfg.P), dtype=np.complex128)
    window = np.arange(g)
    for s, anchor in enumerate(slot_anchors(cfg)):
        out[:, s * cfg.P : (s + 1) * cfg.P] = rx.samples[anchor + window, :]
    ups_bound = min(cfg.N / 2.0, cfg.normalized_doppler(cfg.max_doppler_hz))
    return StackedMeasurement(
        r_ts=out,
        N=cfg.N,
        P=cfg.P,
        block_len=cfg.block_len,
        noise_var=rx.noise_var,
        ups_bound=ups_bound,
    )


def _drift_fraction(meas: StackedMeasurement) -> float:
    # Residual energy fraction left by the best constant fit to a linear
    # phase ramp spanning 2pi*ups_bound*G/(N*(M+M_t)) radians.
    span = 2.0 * np.pi * meas.ups_bound * meas.G / (meas.N * meas.block_len)
    return span * span / 12.0


def somp(
    sensing: SensingMatrix, meas: StackedMeasurement, stop: StoppingRule
) -> RecoverySolution:
    """Simultaneous orthogonal matching pursuit over all N*P columns.

    Per iteration, selects the dictionary column maximizing the sum over
    measurement columns of |<psi_j, residual column>| / ||psi_j||, re-solves
    the joint least squares on the selected set, and updates the residual.
    The iteration budget is capped at G - 1 regardless of the rule, keeping
    the support solve overdetermined.

    Internally the residual is tracked through an incrementally built
    orthonormal basis of the selected columns, which makes the per-iteration
    cost one rank-1 correlation update; the returned coefficients are a
    fresh QR solve on the final support.
    """
    psi = sensing.psi
    r_mat = meas.r_ts
    g, kl = psi.shape
    if r_mat.shape[0] != g:
        raise DimensionMismatch(f"measurement rows {r_mat.shape[0]} != G = {g}")
    n_cols = r_mat.shape[1]
    col_norms = np.linalg.norm(psi, axis=0)
    if np.any(col_norms == 0.0):
        raise InvalidConfig("sensing matrix has a zero column")

    max_iter = min(g - 1, kl)
    target = None
    if isinstance(stop, FixedSparsity):
        if not 0 <= stop.sparsity <= max_iter:
            raise IterationBudgetExhausted(
                f"requested sparsity {stop.sparsity} exceeds budget {max_iter}"
            )
        target = stop.sparsity

    total2 = float(np.sum(np.abs(r_mat) ** 2))
    r2 = total2
    floor = (_RESIDUAL_REL_FLOOR * np.sqrt(total2)) ** 2
    if isinstance(stop, ResidualThreshold):
        sigma2 = meas.noise_var if stop.noise_var is None else stop.noise_var
        noise_term = g * n_cols * float(sigma2)
        drift_coef = stop.drift_safety * _drift_fraction(meas)

    res = r_mat.copy()  # live residual; its energy is cancellation-free
    corr = psi.conj().T @ res  # (KL, NP), kept in sync with the residual
    basis = np.zeros((g, max_iter), dtype=np.complex128)
    support: list[int] = []
    history = [r2]

    while True:
        if target is not None:
            if len(support) >= target:
                break
        else:
            captured = total2 - r2
            threshold = (1.0 + stop.margin) * (noise_term + drift_coef * captured) + floor
            if r2 <= threshold:
                break
            if len(support) >= max_iter:
                break
        scores = np.abs(corr).sum(axis=1) / col_norms
        if support:
            scores[support] = -np.inf
        j = int(np.argmax(scores))

        # Orthonormalize the new column against the basis (repeated
        # Gram-Schmidt for stability at small G).
        v = psi[:, j].copy()
        for _ in range(2):
            if support:
                sel = basis[:, : len(support)]
                v -= sel @ (sel.conj().T @ v)
        nv = float(np.linalg.norm(v))
        if nv < 1e-10 * col_norms[j]:
            raise RankDeficient(f"column {j} numerically dependent on selected set")
        q = v / nv
        basis[:, len(support)] = q
        support.append(j)

        proj = q.conj() @ res  # (NP,)
        corr -= np.outer(psi.conj().T @ q, proj)
        res -= np.outer(q, proj)
        r2 = float(np.sum(np.abs(res) ** 2))
        history.append(r2)

    if support:
        coeffs = least_squares_solve(psi[:, support], r_mat)
        residual_norm = float(np.linalg.norm(r_mat - psi[:, support] @ coeffs))
    else:
        coeffs = np.zeros((0, n_cols), dtype=np.complex128)
        residual_norm = float(np.sqrt(r2))
    return RecoverySolution(
        support=tuple(support),
        coeffs=coeffs,
        residual_norm=residual_norm,
        residual_history=tuple(history),
    )


# ============================================================================
# Support bookkeeping: activity flags, delays, per-path coefficient matrices
# ============================================================================


def detect_activity(sol: RecoverySolution, K: int, L: int) -> tuple[np.ndarray, np.ndarray]:
    """Terminal k is declared active iff some support index falls in its block.

    Support index omega belongs to terminal omega // L; the in-block offset
    is the delay estimate.
    """
    alpha_hat = np.zeros(K, dtype=int)
    for omega in sol.support:
        k = omega // L
        if not 0 <= k < K:
            raise IndexNotInSupport(f"support index {omega} outside [0, {K * L})")
        alpha_hat[k] = 1
    return alpha_hat, np.flatnonzero(alpha_hat)


def extract_delays(sol: RecoverySolution, k: int, L: int) -> list[int]:
    """Delays claimed for terminal k, one per support index in its block.

    May be multi-valued when the pursuit picked several offsets for one
    terminal; every one is carried forward as its own path.
    """
    delays = [omega - k * L for omega in sol.support if k * L <= omega < (k + 1) * L]
    if not delays:
        raise TerminalInactive(f"terminal {k} has no support index")
    return delays


def effective_cir_matrix(sol: RecoverySolution, omega: int, N: int, P: int) -> np.ndarray:
    """Reshape one recovered coefficient row into its N x P slot/antenna grid.

    Row layout follows StackedMeasurement: entry [s, p] is the coefficient
    for slot s, antenna p, i.e. the channel tap sampled at slot s's anchor
    instant. Across s it is (up to recovery error) a single complex
    exponential at the path's Doppler.
    """
    try:
        row = sol.support.index(omega)
    except ValueError:
        raise IndexNotInSupport(f"support index {omega} was not selected") from None
    if sol.coeffs.shape[1] != N * P:
        raise DimensionMismatch(f"coefficient row length {sol.coeffs.shape[1]} != N*P")
    return sol.coeffs[row].reshape(N, P).copy()


# ============================================================================
# Stage two: Doppler via TLS rotational invariance, then gain least squares
# ============================================================================


def esprit_doppler(upsilon_mat: np.ndarray) -> float:
    """Estimate the per-slot phase step of a noisy rank-one exponential grid.

    Input is the N x P matrix whose column p should follow
    g_p * exp(j2pi*ups*s/N) across slots s. Procedure: stack the two
    (N-1)-sample shifted subarrays of every antenna column, form their
    2(N-1) x 2(N-1) sample covariance, subtract its minimum eigenvalue (noise
    floor; the matrix may go indefinite, which is harmless), take the
    dominant eigenvector, and solve the total-least-squares rotation between
    its two halves via the 2 x 2 eigenproblem of the stacked Gram matrix.
    The minor eigenvector (e12, e22) gives the rotation, and

        ups_hat = (N / 2pi) * arg(-e12 / e22).

    Resolves |ups| < N/2 only; beyond that the per-slot phase aliases.
    """
    u_mat = np.asarray(upsilon_mat, dtype=np.complex128)
    if u_mat.ndim != 2 or u_mat.shape[0] < 2:
        raise DimensionMismatch(f"need an N x P matrix with N >= 2, got {u_mat.shape}")
    n_slots, n_ant = u_mat.shape

    x = np.vstack([u_mat[:-1, :], u_mat[1:, :]])  # (2(N-1), P)
    r_xx = x @ x.conj().T / n_ant
    r_xx = (r_xx + r_xx.conj().T) / 2.0
    eigvals, _ = hermitian_eig(r_xx)
    r_hat = r_xx - eigvals[-1] * np.eye(r_xx.shape[0])
    _, vecs = hermitian_eig((r_hat + r_hat.conj().T) / 2.0)
    u1 = vecs[:, 0]

    half = n_slots - 1
    e_stack = np.column_stack([u1[:half], u1[half:]])  # (N-1, 2)
    gram = e_stack.conj().T @ e_stack
    _, e_vecs = hermitian_eig(gram)
    minor = e_vecs[:, 1]
    e12, e22 = minor[0], minor[1]
    if abs(e22) < 1e-12:
        raise DegenerateSubspace("TLS rotation undefined: |e22| below 1e-12")
    return float(n_slots / (2.0 * np.pi) * np.angle(-e12 / e22))


def estimate_gains(
    sol: RecoverySolution,
    paths: list[tuple[int, int, float]],
    sensing: SensingMatrix,
    cfg: SystemConfig,
) -> np.ndarray:
    """Joint per-antenna effective gains for all detected paths.

    Parameters
    ----------
    sol : recovery solution whose coefficient rows are the LS targets.
    paths : list of (omega, ell_hat, ups_hat) for every retained path.
    sensing, cfg : dictionary and dimensions.

    Returns
    -------
    (Q, P) array, row q holding path q's effective gains across antennas.

    Notes
    -----
    The pursuit fitted static columns psi to drifted data, so its slot-s
    coefficient vector is modeled as Gamma @ (eta_s * g), where column q of
    Gamma = pinv(Psi_sel) @ [drift_1*psi_1, ..., drift_Q*psi_Q] captures how
    path q's drifted column smears across the selected static columns, and
    eta_s[q] = exp(j2pi*ups_q*(anchor_s - ell_q)/(N(M+M_t))) carries the
    phase accumulated by slot s's anchor instant. Solving all N slots in one
    stacked least squares per antenna inverts that smearing.
    """
    if not paths:
        return np.zeros((0, cfg.P), dtype=np.complex128)
    support_pos = {omega: i for i, omega in enumerate(sol.support)}
    try:
        rows = [support_pos[omega] for omega, _, _ in paths]
    except KeyError as exc:
        raise IndexNotInSupport(f"path column {exc.args[0]} not in support") from None

    omegas = np.array([omega for omega, _, _ in paths])
    ells = np.array([ell for _, ell, _ in paths], dtype=float)
    upss = np.array([ups for _, _, ups in paths], dtype=float)
    q_len = len(paths)
    d_len = float(cfg.frame_len)

    psi_sel = sensing.psi[:, omegas]  # (G, Q)
    window = np.arange(cfg.G)[:, None]
    drifted = psi_sel * np.exp(2j * np.pi * window * upss[None, :] / d_len)
    gamma = least_squares_solve(psi_sel, drifted)  # (Q, Q)
    if q_len == 1:
        gamma = gamma.reshape(1, 1)

    anchors = slot_anchors(cfg)[:, None]  # (N, 1)
    eta = np.exp(2j * np.pi * upss[None, :] * (anchors - ells[None, :]) / d_len)  # (N, Q)
    a_stack = (gamma[None, :, :] * eta[:, None, :]).reshape(cfg.N * q_len, q_len)

    targets = sol.coeffs[rows, :]  # (Q, N*P)
    b_stack = targets.reshape(q_len, cfg.N, cfg.P).transpose(1, 0, 2).reshape(
        cfg.N * q_len, cfg.P
    )
    gains = least_squares_solve(a_stack, b_stack)
    return gains.reshape(q_len, cfg.P)


def reconstruct_cir(
    estimate: ChannelEstimate, k: int, p: int, kappa, ell: int, cfg: SystemConfig
):
    """Evaluate the estimated impulse response; mirrors channel.cir.

    Sums every retained path of terminal k at delay ell:
    sum_q g_eff_q[p] * exp(j2pi*ups_q*(kappa - ell_q)/(N(M+M_t))). Inactive
    terminals evaluate to zero everywhere.
    """
    kappa = np.asarray(kappa, dtype=float)
    out = np.zeros(kappa.shape, dtype=np.complex128)
    if estimate.alpha_hat[k]:
        for path in estimate.paths[k]:
            if path.delay != ell:
                continue
            phase = 2.0 * np.pi * path.doppler * (kappa - path.delay) / cfg.frame_len
            out = out + path.gains[p] * np.exp(1j * phase)
    return out if out.ndim else complex(out)


# ============================================================================
# Pipeline
# ============================================================================


def _empty_estimate(K: int) -> ChannelEstimate:
    return ChannelEstimate(
        K=K, alpha_hat=np.zeros(K, dtype=int), paths=tuple(() for _ in range(K))
    )


def _path_contribution(
    omega: int,
    ell: int,
    ups: float,
    gains: np.ndarray,
    sensing: SensingMatrix,
    cfg: SystemConfig,
) -> np.ndarray:
    """Stacked (G, N*P) measurement this single path would produce."""
    d_len = float(cfg.frame_len)
    col = sensing.psi[:, omega] * np.exp(2j * np.pi * np.arange(cfg.G) * ups / d_len)
    eta = np.exp(2j * np.pi * ups * (slot_anchors(cfg) - ell) / d_len)
    return np.outer(col, (eta[:, None] * gains[None, :]).ravel())


def stacked_reconstruction(
    estimate: ChannelEstimate, sensing: SensingMatrix, cfg: SystemConfig
) -> np.ndarray:
    """Noiseless stacked measurement implied by a channel estimate."""
    recon = np.zeros((cfg.G, cfg.N * cfg.P), dtype=np.complex128)
    for k in range(estimate.K):
        if not estimate.alpha_hat[k]:
            continue
        for path in estimate.paths[k]:
            omega = k * sensing.L + path.delay
            recon += _path_contribution(omega, path.delay, path.doppler, path.gains, sensing, cfg)
    return recon


def parametric_stage(
    sol: RecoverySolution,
    sensing: SensingMatrix,
    cfg: SystemConfig,
    meas: StackedMeasurement | None = None,
    refine_iters: int = 4,
) -> ChannelEstimate:
    """Doppler + gain estimation on an existing support; shared by the
    pursuit pipeline and the known-support baseline.

    A path whose Doppler step degenerates is dropped individually; a
    rank-deficient joint gain solve drops the weakest remaining path and
    retries, so one bad path cannot abort the whole frame.

    When the stacked measurement is supplied, the first-cut estimates are
    polished by interference cancellation: each path's Doppler is re-derived
    from the measurement with every other fitted path subtracted, which
    removes the cross-path leakage that biases the initial slot coefficients,
    then the joint gain solve is repeated. Two sweeps make the noiseless
    parameter errors collapse toward machine precision.
    """
    if not sol.support:
        return _empty_estimate(sensing.K)

    kept: list[tuple[int, int, float]] = []  # (omega, ell_hat, ups_hat)
    energies: list[float] = []
    for row, omega in enumerate(sol.support):
        k, ell = divmod(omega, sensing.L)
        ups_mat = sol.coeffs[row].reshape(cfg.N, cfg.P)
        try:
            ups_hat = esprit_doppler(ups_mat)
        except DegenerateSubspace:
            continue
        kept.append((omega, ell, ups_hat))
        energies.append(float(np.sum(np.abs(sol.coeffs[row]) ** 2)))

    def solve_gains(
        paths: list[tuple[int, int, float]], weights: list[float]
    ) -> tuple[list[tuple[int, int, float]], list[float], np.ndarray | None]:
        while paths:
            try:
                return paths, weights, estimate_gains(sol, paths, sensing, cfg)
            except RankDeficient:
                if len(paths) == 1:
                    return [], [], None
                weakest = int(np.argmin(weights))
                paths = paths[:weakest] + paths[weakest + 1 :]
                weights = weights[:weakest] + weights[weakest + 1 :]
        return [], [], None

    kept, energies, gains = solve_gains(kept, energies)
    if not kept:
        return _empty_estimate(sensing.K)

    if meas is not None:
        for _ in range(max(0, refine_iters)):
            contribs = [
                _path_contribution(omega, ell, ups, gains[i], sensing, cfg)
                for i, (omega, ell, ups) in enumerate(kept)
            ]
            total = np.sum(contribs, axis=0)
            polished: list[tuple[int, int, float]] = []
            for i, (omega, ell, ups) in enumerate(kept):
                cleaned = meas.r_ts - (total - contribs[i])
                psi_col = sensing.psi[:, omega]
                u_flat = psi_col.conj() @ cleaned / np.vdot(psi_col, psi_col).real
                try:
                    ups = esprit_doppler(u_flat.reshape(cfg.N, cfg.P))
                except DegenerateSubspace:
                    pass
                polished.append((omega, ell, ups))
            kept, energies, gains = solve_gains(polished, energies)
            if not kept:
                return _empty_estimate(sensing.K)

    per_terminal: list[list[PathEstimate]] = [[] for _ in range(sensing.K)]
    for (omega, ell, ups_hat), g_row in zip(kept, gains):
        k = omega // sensing.L
        per_terminal[k].append(PathEstimate(delay=ell, doppler=ups_hat, gains=g_row.copy()))
    alpha_hat = np.array([1 if lst else 0 for lst in per_terminal], dtype=int)
    return ChannelEstimate(
        K=sensing.K, alpha_hat=alpha_hat, paths=tuple(tuple(lst) for lst in per_terminal)
    )


def run_pipeline(
    rx: RxFrame,
    ts_list: list[TrainingSequence],
    cfg: SystemConfig,
    stop: StoppingRule | None = None,
    rounds: int = 3,
    refine_iters: int = 4,
) -> ChannelEstimate:
    """Full receiver: extraction, sparse recovery, parametric fit, and
    detect-cancel-redetect rounds.

    After each parametric fit the fitted signal is subtracted and the pursuit
    runs again on the remainder, so a weak terminal masked by the Doppler
    mismatch of stronger ones gets a second chance once those are cancelled.
    Rounds end when no new support enters (a clean residual stops the
    pursuit immediately).
    """
    meas = extract_isi_free(rx, cfg)
    sensing = build_sensing_matrix(ts_list, cfg.L)
    stop_rule = stop if stop is not None else ResidualThreshold()
    max_cols = min(cfg.G - 1, sensing.K * sensing.L)

    support: list[int] = []
    estimate = _empty_estimate(sensing.K)
    residual = meas
    for _ in range(max(1, rounds)):
        sol = somp(sensing, residual, stop_rule)
        new = [omega for omega in sol.support if omega not in support]
        if not new or len(support) >= max_cols:
            break
        support = support + new[: max_cols - len(support)]
        coeffs = least_squares_solve(sensing.psi[:, support], meas.r_ts)
        coeffs = coeffs.reshape(len(support), -1)
        merged = RecoverySolution(
            support=tuple(support),
            coeffs=coeffs,
            residual_norm=float(
                np.linalg.norm(meas.r_ts - sensing.psi[:, support] @ coeffs)
            ),
            residual_history=sol.residual_history,
        )
        estimate = parametric_stage(merged, sensing, cfg, meas=meas, refine_iters=refine_iters)
        recon = stacked_reconstruction(estimate, sensing, cfg)
        residual = StackedMeasurement(
            r_ts=meas.r_ts - recon,
            N=meas.N,
            P=meas.P,
            block_len=meas.block_len,
            noise_var=meas.noise_var,
            ups_bound=meas.ups_bound,
        )
    return estimate


# ============================================================================
# Serialization
# ============================================================================


def estimate_to_dicts(estimate: ChannelEstimate) -> list[dict]:
    """JSON-ready view: one object per terminal."""
    out = []
    for k in range(estimate.K):
        out.append(
            {
                "terminal": k,
                "alpha_hat": int(estimate.alpha_hat[k]),
                "paths": [
                    {
                        "delay": int(path.delay),
                        "doppler": float(path.doppler),
                        "gains_re": [float(v) for v in path.gains.real],
                        "gains_im": [float(v) for v in path.gains.imag],
                    }
                    for path in estimate.paths[k]
                ],
            }
        )
    return out


def write_estimate_json(estimate: ChannelEstimate, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(estimate_to_dicts(estimate), fh, indent=1)
        fh.write("\n")
