"""Classical mean-field simulation of static and dynamical KPO networks.

Time is in units of 1/chi and amplitudes are dimensionless.  The static
system evolves

    dalpha_i/dt = -kappa alpha_i + i (delta_i + |alpha_i|^2) alpha_i
                  - i r(t) alpha_i* + i lambda_C sum_j C_ij alpha_j

and the dynamically coupled system replaces the coupling term by

    + i sum_j J_ij exp[-i (Lambda (i-j) t + dphi_j(t) - dphi_i(t))] alpha_j

with dphi_i(t) = -sum_k F_i^(k) sin(k Lambda t).  The pump ramp is
r(t) = r_max min(t/T_ramp, 1).  Trajectories start from
alpha_i(0) = sqrt(n0/2) z_i exp(2 pi i u_i) with z standard normal and u
uniform, one substream per trajectory index.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from numba import njit

from .design import ModulationMatrix
from .errors import InvalidInput, NumericalFailure
from .prescription import AnnealerParams
from .problems import CouplingMatrix, GroundStateSet, trajectory_rng

DT_STATIC_DEFAULT = 0.01


@dataclass(frozen=True)
class ClassicalConfig:
    n_traj: int
    t_ramp_tilde: float
    t_final_tilde: float | None = None  # defaults to t_ramp
    r_max_tilde: float = 5.0
    n0: float = 1e-2
    kappa_tilde: float = 0.0
    dt_tilde: float | None = None  # defaults: 0.01 static, 2 pi/(40 Lambda) dynamical
    seed: int = 0
    n_records: int = 101

    def __post_init__(self):
        if self.n_traj < 1 or self.t_ramp_tilde <= 0:
            raise InvalidInput("n_traj >= 1 and t_ramp > 0 required")
        if self.t_final_tilde is not None and self.t_final_tilde < self.t_ramp_tilde:
            raise InvalidInput("t_final must be >= t_ramp")

    @property
    def t_final(self) -> float:
        return self.t_final_tilde if self.t_final_tilde is not None else self.t_ramp_tilde


@dataclass(frozen=True)
class ClassicalTrajectory:
    times: np.ndarray  # (n_rec,)
    amplitudes: np.ndarray  # (n_rec, n_traj, n) complex


@dataclass(frozen=True)
class SuccessSeries:
    times: np.ndarray
    p: np.ndarray
    sem: np.ndarray


def sample_initial(cfg: ClassicalConfig, traj_index: int, n: int) -> np.ndarray:
    rng = trajectory_rng(cfg.seed, traj_index)
    z = rng.standard_normal(n)
    u = rng.uniform(size=n)
    return np.sqrt(cfg.n0 / 2.0) * z * np.exp(2j * np.pi * u)


def initial_ensemble(cfg: ClassicalConfig, n: int) -> np.ndarray:
    return np.stack([sample_initial(cfg, m, n) for m in range(cfg.n_traj)])


def pump_ramp(t: float, r_max: float, t_ramp: float) -> float:
    return r_max * min(t / t_ramp, 1.0)


def eom_static_rhs(alpha: np.ndarray, t: float, cfg: ClassicalConfig, params: AnnealerParams, c: CouplingMatrix) -> np.ndarray:
    """Reference (pure numpy) static RHS; alpha has shape (n,) or (m, n)."""
    r = pump_ramp(t, cfg.r_max_tilde, cfg.t_ramp_tilde)
    coupling = alpha @ c.entries  # C symmetric
    return (
        -cfg.kappa_tilde * alpha
        + 1j * (params.delta_tilde + np.abs(alpha) ** 2) * alpha
        - 1j * r * np.conj(alpha)
        + 1j * params.lambda_c_tilde * coupling
    )


def modulation_phases(f: ModulationMatrix, lambda_big: float, t: float) -> np.ndarray:
    """dphi_i(t) = -sum_k F_i^(k) sin(k Lambda t)."""
    k = np.arange(1, f.n)
    return -f.f @ np.sin(k * lambda_big * t)


def eom_dynamical_rhs(alpha: np.ndarray, t: float, cfg: ClassicalConfig, params: AnnealerParams, design_f: ModulationMatrix) -> np.ndarray:
    """Reference (pure numpy) dynamical RHS; alpha has shape (n,) or (m, n)."""
    r = pump_ramp(t, cfg.r_max_tilde, cfg.t_ramp_tilde)
    dphi = modulation_phases(design_f, params.lambda_big_tilde, t)
    p = np.exp(-1j * (params.lambda_big_tilde * np.arange(design_f.n) * t - dphi))
    coupling = ((np.conj(p) * alpha) @ params.j_tilde.entries) * p
    return (
        -cfg.kappa_tilde * alpha
        + 1j * (params.delta_tilde + np.abs(alpha) ** 2) * alpha
        - 1j * r * np.conj(alpha)
        + 1j * coupling
    )


@njit(cache=True)
def _rhs_static_kernel(alpha, coup, delta, lam_c, r, kappa):
    return (
        -kappa * alpha
        + 1j * (delta + np.abs(alpha) ** 2) * alpha
        - 1j * r * np.conj(alpha)
        + 1j * lam_c * coup
    )


@njit(cache=True)
def _rk4_static(alpha, c, delta, lam_c, r_max, t_ramp, kappa, dt, rec_stride, out):
    n_rec = out.shape[0]
    out[0] = alpha
    t = 0.0
    for rec in range(1, n_rec):
        for _ in range(rec_stride):
            r1 = min(t / t_ramp, 1.0) * r_max
            r2 = min((t + 0.5 * dt) / t_ramp, 1.0) * r_max
            r4 = min((t + dt) / t_ramp, 1.0) * r_max
            k1 = _rhs_static_kernel(alpha, alpha @ c, delta, lam_c, r1, kappa)
            a2 = alpha + 0.5 * dt * k1
            k2 = _rhs_static_kernel(a2, a2 @ c, delta, lam_c, r2, kappa)
            a3 = alpha + 0.5 * dt * k2
            k3 = _rhs_static_kernel(a3, a3 @ c, delta, lam_c, r2, kappa)
            a4 = alpha + dt * k3
            k4 = _rhs_static_kernel(a4, a4 @ c, delta, lam_c, r4, kappa)
            alpha = alpha + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            t += dt
        out[rec] = alpha


@njit(cache=True)
def _phase_vector(n, f, lam_big, t):
    p = np.empty(n, dtype=np.complex128)
    for i in range(n):
        dphi = 0.0
        for k in range(1, n):
            dphi -= f[i, k - 1] * np.sin(k * lam_big * t)
        p[i] = np.exp(-1j * (lam_big * i * t - dphi))
    return p


@njit(cache=True)
def _rhs_dynamical_kernel(alpha, j_mat, p, delta, r, kappa):
    coup = ((np.conj(p) * alpha) @ j_mat) * p
    return (
        -kappa * alpha
        + 1j * (delta + np.abs(alpha) ** 2) * alpha
        - 1j * r * np.conj(alpha)
        + 1j * coup
    )


@njit(cache=True)
def _rk4_dynamical(alpha, j_mat, f, lam_big, delta, r_max, t_ramp, kappa, dt, rec_stride, out):
    n_rec = out.shape[0]
    n = alpha.shape[1]
    out[0] = alpha
    t = 0.0
    for rec in range(1, n_rec):
        for _ in range(rec_stride):
            r1 = min(t / t_ramp, 1.0) * r_max
            r2 = min((t + 0.5 * dt) / t_ramp, 1.0) * r_max
            r4 = min((t + dt) / t_ramp, 1.0) * r_max
            p1 = _phase_vector(n, f, lam_big, t)
            p2 = _phase_vector(n, f, lam_big, t + 0.5 * dt)
            p4 = _phase_vector(n, f, lam_big, t + dt)
            k1 = _rhs_dynamical_kernel(alpha, j_mat, p1, delta, r1, kappa)
            a2 = alpha + 0.5 * dt * k1
            k2 = _rhs_dynamical_kernel(a2, j_mat, p2, delta, r2, kappa)
            a3 = alpha + 0.5 * dt * k2
            k3 = _rhs_dynamical_kernel(a3, j_mat, p2, delta, r2, kappa)
            a4 = alpha + dt * k3
            k4 = _rhs_dynamical_kernel(a4, j_mat, p4, delta, r4, kappa)
            alpha = alpha + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            t += dt
        out[rec] = alpha


def _grid(cfg: ClassicalConfig, dt_default: float) -> tuple[float, int, np.ndarray]:
    dt = cfg.dt_tilde if cfg.dt_tilde is not None else dt_default
    spans = cfg.n_records - 1
    rec_stride = max(1, int(np.ceil(cfg.t_final / (dt * spans))))
    n_steps = rec_stride * spans
    dt_eff = cfg.t_final / n_steps
    times = np.linspace(0.0, cfg.t_final, cfg.n_records)
    return dt_eff, rec_stride, times


def integrate_static(cfg: ClassicalConfig, params: AnnealerParams, c: CouplingMatrix, alpha0: np.ndarray | None = None) -> ClassicalTrajectory:
    if alpha0 is None:
        alpha0 = initial_ensemble(cfg, c.n)
    dt, rec_stride, times = _grid(cfg, DT_STATIC_DEFAULT)
    out = np.empty((cfg.n_records, cfg.n_traj, c.n), dtype=np.complex128)
    _rk4_static(
        np.ascontiguousarray(alpha0, dtype=np.complex128),
        np.ascontiguousarray(c.entries, dtype=np.complex128),
        params.delta_tilde,
        params.lambda_c_tilde,
        cfg.r_max_tilde,
        cfg.t_ramp_tilde,
        cfg.kappa_tilde,
        dt,
        rec_stride,
        out,
    )
    _check_finite(out)
    return ClassicalTrajectory(times=times, amplitudes=out)


def integrate_dynamical(cfg: ClassicalConfig, params: AnnealerParams, design_f: ModulationMatrix, alpha0: np.ndarray | None = None) -> ClassicalTrajectory:
    n = design_f.n
    if alpha0 is None:
        alpha0 = initial_ensemble(cfg, n)
    dt_default = 2.0 * np.pi / (40.0 * params.lambda_big_tilde)
    if cfg.dt_tilde is not None and cfg.dt_tilde > 2.0 * np.pi / (20.0 * params.lambda_big_tilde):
        raise InvalidInput("dt too coarse to resolve the Floquet frequency")
    dt, rec_stride, times = _grid(cfg, dt_default)
    out = np.empty((cfg.n_records, cfg.n_traj, n), dtype=np.complex128)
    _rk4_dynamical(
        np.ascontiguousarray(alpha0, dtype=np.complex128),
        np.ascontiguousarray(params.j_tilde.entries, dtype=np.complex128),
        np.ascontiguousarray(design_f.f),
        params.lambda_big_tilde,
        params.delta_tilde,
        cfg.r_max_tilde,
        cfg.t_ramp_tilde,
        cfg.kappa_tilde,
        dt,
        rec_stride,
        out,
    )
    _check_finite(out)
    return ClassicalTrajectory(times=times, amplitudes=out)


def _check_finite(out: np.ndarray):
    if not np.all(np.isfinite(out)):
        bad = np.argwhere(~np.isfinite(out))[0]
        raise NumericalFailure(f"non-finite amplitude at record {bad[0]}, trajectory {bad[1]}")


def spins_from_amplitudes(amplitudes: np.ndarray) -> np.ndarray:
    """sigma_i = sgn(Re alpha_i) with the sgn(0) = +1 tie-break."""
    return np.where(amplitudes.real >= 0.0, 1, -1)


def success_probability(traj: ClassicalTrajectory, ground: GroundStateSet) -> SuccessSeries:
    spins = spins_from_amplitudes(traj.amplitudes)  # (n_rec, n_traj, n)
    ground_arr = np.array(sorted(c.spins for c in ground.configurations))  # (g, n)
    hits = (spins[:, :, None, :] == ground_arr[None, None, :, :]).all(axis=3).any(axis=2)
    p = hits.mean(axis=1)
    n_traj = spins.shape[1]
    sem = np.sqrt(p * (1.0 - p) / n_traj)
    return SuccessSeries(times=traj.times, p=p, sem=sem)


@dataclass(frozen=True)
class PairedResult:
    static: SuccessSeries
    dynamical: SuccessSeries
    static_traj: ClassicalTrajectory
    dynamical_traj: ClassicalTrajectory


def paired_run(
    c: CouplingMatrix,
    params: AnnealerParams,
    design_f: ModulationMatrix,
    cfg: ClassicalConfig,
    ground: GroundStateSet,
) -> PairedResult:
    """Static and dynamical runs sharing initial conditions per trajectory."""
    alpha0 = initial_ensemble(cfg, c.n)
    static = integrate_static(cfg, params, c, alpha0)
    dynamical = integrate_dynamical(cfg, params, design_f, alpha0)
    return PairedResult(
        static=success_probability(static, ground),
        dynamical=success_probability(dynamical, ground),
        static_traj=static,
        dynamical_traj=dynamical,
    )
