"""Truncated-Fock quantum simulation of static and dynamical KPO networks.

Dimensionless units (hbar = 1, time in 1/chi).  The static Hamiltonian is

    H = -sum_i [delta_i n_i + (1/2) a_i^dag^2 a_i^2]
        + sum_i (r(t)/2) (a_i^2 + a_i^dag^2)
        - lambda_C sum_ij C_ij a_i^dag a_j

and the dynamically coupled system replaces the last term by

    - sum_{i != j} J_ij exp[-i (Lambda (i-j) t + dphi_j(t) - dphi_i(t))] a_i^dag a_j.

Lossless evolution is RK4 on the Schrodinger equation with a per-step
renormalization guard; photon loss uses the quantum-jump (Monte-Carlo
wavefunction) unraveling with jump operators L_i = sqrt(2 kappa) a_i, a
norm^2-threshold jump condition with bisection refinement to dt/16, and
jump channels chosen proportional to <n_i>.

Position measurements use x = (a + a^dag)/2, under which the vacuum has
sigma_x = 1/2 and the Fock wavefunctions are psi_n(x) = 2^(1/4) h_n(sqrt(2) x)
with h_n the standard normalized Hermite functions.  Half-line projectors are
midpoint discretizations of |x><x| over [0, 6] and [-6, 0].
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.sparse as sp

from .design import ModulationMatrix
from .errors import InvalidInput, NumericalFailure, ResourceLimit
from .prescription import AnnealerParams
from .problems import CouplingMatrix, GroundStateSet, SpinConfiguration, trajectory_rng

FOCK_TRUNCATION_DEFAULT = 12
X_MAX_DEFAULT = 6.0
PROJECTOR_POINTS_DEFAULT = 200
STATIC_N_LIMIT = 4
DYNAMICAL_N_LIMIT = 3
DT_STATIC_QUANTUM_DEFAULT = 2e-4
NORM_DRIFT_BOUND = 1e-8


@dataclass(frozen=True)
class QuantumConfig:
    t_ramp_tilde: float
    t_final_tilde: float | None = None
    kappa_tilde: float = 0.0
    n_traj: int = 1
    r_max_tilde: float = 5.0
    dt_tilde: float | None = None
    seed: int = 0
    a_factor: float = 100.0
    m: int = FOCK_TRUNCATION_DEFAULT
    n_records: int = 101

    def __post_init__(self):
        if self.t_ramp_tilde <= 0 or self.n_traj < 1 or self.m < 2:
            raise InvalidInput("t_ramp > 0, n_traj >= 1 and m >= 2 required")
        if self.kappa_tilde == 0.0 and self.n_traj != 1:
            raise InvalidInput("lossless evolution is deterministic: use n_traj = 1")
        if self.t_final_tilde is not None and self.t_final_tilde < self.t_ramp_tilde:
            raise InvalidInput("t_final must be >= t_ramp")

    @property
    def t_final(self) -> float:
        return self.t_final_tilde if self.t_final_tilde is not None else self.t_ramp_tilde


@dataclass(frozen=True)
class QuantumTrajectory:
    times: np.ndarray  # (n_rec,)
    states: np.ndarray  # (n_rec, n_traj, dim) normalized
    n_modes: int
    m: int
    norm_drift: float  # accumulated |norm - 1| (lossless runs)
    n_jumps: np.ndarray  # (n_traj,)


# ---------------------------------------------------------------------------
# operators


def destroy(m: int) -> sp.csr_matrix:
    return sp.diags(np.sqrt(np.arange(1, m)), 1, format="csr")


def mode_operator(op: sp.spmatrix, i: int, n: int, m: int) -> sp.csr_matrix:
    """Embed a single-mode operator at mode i (mode 0 is the slowest index)."""
    left = sp.identity(m**i, format="csr")
    right = sp.identity(m ** (n - i - 1), format="csr")
    return sp.kron(sp.kron(left, op, format="csr"), right, format="csr")


def _number_diagonals(n: int, m: int) -> np.ndarray:
    """(n, dim) array of photon numbers of mode i along the product basis."""
    dim = m**n
    idx = np.arange(dim)
    out = np.empty((n, dim))
    for i in range(n):
        out[i] = (idx // m ** (n - i - 1)) % m
    return out


def _single_mode_parts(params: AnnealerParams, n: int, m: int):
    """Diagonal (-delta n - n(n-1)/2) and pump operator sum (a^2 + a^dag^2)/2."""
    nums = _number_diagonals(n, m)
    diag = -(params.delta_tilde[:, None] * nums).sum(axis=0) - (nums * (nums - 1.0)).sum(axis=0) / 2.0
    a = destroy(m)
    a2 = (a @ a).tocsr()
    pump = sum(mode_operator(a2, i, n, m) for i in range(n))
    pump = 0.5 * (pump + pump.conj().T)
    return diag, pump.tocsr()


def build_static_hamiltonian(params: AnnealerParams, c: CouplingMatrix, t: float, cfg: QuantumConfig) -> sp.csr_matrix:
    """Full sparse static Hamiltonian at time t (time enters through r(t))."""
    n, m = c.n, cfg.m
    diag, pump = _single_mode_parts(params, n, m)
    r = cfg.r_max_tilde * min(t / cfg.t_ramp_tilde, 1.0)
    h = sp.diags(diag.astype(complex)) + r * pump.astype(complex)
    a = destroy(m)
    for i in range(n):
        for j in range(n):
            if i != j and c.entries[i, j] != 0.0:
                k = mode_operator(a.conj().T, i, n, m) @ mode_operator(a, j, n, m)
                h = h - params.lambda_c_tilde * c.entries[i, j] * k
    return h.tocsr()


def _pair_phase(params: AnnealerParams, design_f: ModulationMatrix, i: int, j: int, t: float) -> complex:
    lam = params.lambda_big_tilde
    k = np.arange(1, design_f.n)
    s = np.sin(k * lam * t)
    dphi_i = -float(design_f.f[i] @ s)
    dphi_j = -float(design_f.f[j] @ s)
    return np.exp(-1j * (lam * (i - j) * t + dphi_j - dphi_i))


def build_dynamical_hamiltonian(params: AnnealerParams, design_f: ModulationMatrix, t: float, cfg: QuantumConfig) -> sp.csr_matrix:
    """Full sparse dynamical Hamiltonian at time t."""
    n, m = design_f.n, cfg.m
    diag, pump = _single_mode_parts(params, n, m)
    r = cfg.r_max_tilde * min(t / cfg.t_ramp_tilde, 1.0)
    h = sp.diags(diag.astype(complex)) + r * pump.astype(complex)
    a = destroy(m)
    j_mat = params.j_tilde.entries
    for i in range(n):
        for j in range(n):
            if i != j:
                k = mode_operator(a.conj().T, i, n, m) @ mode_operator(a, j, n, m)
                h = h - j_mat[i, j] * _pair_phase(params, design_f, i, j, t) * k
    return h.tocsr()


# ---------------------------------------------------------------------------
# Hamiltonian application closures (avoid rebuilding matrices every step)


def _static_apply(params: AnnealerParams, c: CouplingMatrix, cfg: QuantumConfig) -> Callable:
    n, m = c.n, cfg.m
    diag, pump = _single_mode_parts(params, n, m)
    a = destroy(m)
    coupling = sp.csr_matrix((m**n, m**n), dtype=complex)
    for i in range(n):
        for j in range(n):
            if i != j and c.entries[i, j] != 0.0:
                k = mode_operator(a.conj().T, i, n, m) @ mode_operator(a, j, n, m)
                coupling = coupling - params.lambda_c_tilde * c.entries[i, j] * k
    coupling = coupling.tocsr()

    def apply_h(t: float, psi: np.ndarray) -> np.ndarray:
        r = cfg.r_max_tilde * min(t / cfg.t_ramp_tilde, 1.0)
        return diag * psi + r * (pump @ psi) + coupling @ psi

    return apply_h


def _dynamical_apply(params: AnnealerParams, design_f: ModulationMatrix, cfg: QuantumConfig) -> Callable:
    n, m = design_f.n, cfg.m
    diag, pump = _single_mode_parts(params, n, m)
    a = destroy(m)
    pairs = []
    j_mat = params.j_tilde.entries
    for i in range(n):
        for j in range(i + 1, n):
            k = (mode_operator(a.conj().T, i, n, m) @ mode_operator(a, j, n, m)).tocsr()
            pairs.append((i, j, j_mat[i, j], k, k.conj().T.tocsr()))
    lam = params.lambda_big_tilde
    harmonics = np.arange(1, n)
    f = design_f.f

    def apply_h(t: float, psi: np.ndarray) -> np.ndarray:
        r = cfg.r_max_tilde * min(t / cfg.t_ramp_tilde, 1.0)
        out = diag * psi + r * (pump @ psi)
        s = np.sin(harmonics * lam * t)
        dphi = -(f @ s)
        for i, j, jij, k, k_dag in pairs:
            phase = np.exp(-1j * (lam * (i - j) * t + dphi[j] - dphi[i]))
            coeff = -jij * phase
            out = out + coeff * (k @ psi) + np.conj(coeff) * (k_dag @ psi)
        return out

    return apply_h


# ---------------------------------------------------------------------------
# integrators


def _rk4_psi(apply_h: Callable, psi: np.ndarray, t: float, dt: float) -> np.ndarray:
    k1 = -1j * apply_h(t, psi)
    k2 = -1j * apply_h(t + 0.5 * dt, psi + 0.5 * dt * k1)
    k3 = -1j * apply_h(t + 0.5 * dt, psi + 0.5 * dt * k2)
    k4 = -1j * apply_h(t + dt, psi + dt * k3)
    return psi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def vacuum_state(n: int, m: int) -> np.ndarray:
    psi = np.zeros(m**n, dtype=complex)
    psi[0] = 1.0
    return psi


def strobe_times(params: AnnealerParams, t_final: float, n_records: int) -> np.ndarray:
    """Record grid snapped to multiples of the Floquet period 2 pi/Lambda."""
    period = 2.0 * np.pi / params.lambda_big_tilde
    total = int(np.floor(t_final / period + 1e-9))
    strides = np.unique(np.round(np.linspace(0, total, n_records)).astype(int))
    return strides * period


def schrodinger_evolve(
    cfg: QuantumConfig,
    n_modes: int,
    apply_h: Callable,
    record_times: np.ndarray,
    dt: float,
    psi0: np.ndarray | None = None,
) -> QuantumTrajectory:
    """Lossless RK4 evolution with a per-step renormalization guard."""
    if psi0 is None:
        psi0 = vacuum_state(n_modes, cfg.m)
    psi = psi0.astype(complex)
    record_times = np.asarray(record_times, dtype=float)
    out = np.empty((record_times.size, 1, psi.size), dtype=complex)
    out[0, 0] = psi
    drift = 0.0
    for rec in range(1, record_times.size):
        t0, t1 = record_times[rec - 1], record_times[rec]
        n_sub = max(1, int(np.ceil((t1 - t0) / dt - 1e-12)))
        h = (t1 - t0) / n_sub
        t = t0
        for _ in range(n_sub):
            psi = _rk4_psi(apply_h, psi, t, h)
            norm = np.linalg.norm(psi)
            drift += abs(norm - 1.0)
            if drift > NORM_DRIFT_BOUND:
                raise NumericalFailure(
                    f"norm drift {drift:.2e} exceeds {NORM_DRIFT_BOUND:.0e} at t = {t + h:.4f}; reduce dt"
                )
            psi = psi / norm
            t += h
        out[rec, 0] = psi
    return QuantumTrajectory(times=record_times, states=out, n_modes=n_modes, m=cfg.m, norm_drift=drift, n_jumps=np.zeros(1, dtype=int))


def quantum_jump_evolve(
    cfg: QuantumConfig,
    n_modes: int,
    apply_h: Callable,
    record_times: np.ndarray,
    dt: float,
    psi0: np.ndarray | None = None,
) -> QuantumTrajectory:
    """Quantum-jump unraveling of photon loss with L_i = sqrt(2 kappa) a_i.

    The non-Hermitian drift adds -i kappa sum_i n_i; a jump fires when the
    squared norm falls below a uniform draw, with the jump time refined by
    bisection to dt/16 and the channel drawn proportional to <n_i>.
    One PCG64 substream per trajectory index, so paired static/dynamical
    runs see identical noise processes.
    """
    if cfg.kappa_tilde <= 0.0:
        raise InvalidInput("quantum_jump_evolve requires kappa > 0")
    if psi0 is None:
        psi0 = vacuum_state(n_modes, cfg.m)
    record_times = np.asarray(record_times, dtype=float)
    nums = _number_diagonals(n_modes, cfg.m)
    kappa = cfg.kappa_tilde
    a_ops = [mode_operator(destroy(cfg.m), i, n_modes, cfg.m) for i in range(n_modes)]

    def apply_drift(t: float, psi: np.ndarray) -> np.ndarray:
        # -i H_eff psi = -i H psi - kappa (sum_i n_i) psi; fold the loss term
        # into the Hermitian application by returning H - i kappa n_total
        return apply_h(t, psi) - 1j * kappa * (nums.sum(axis=0) * psi)

    out = np.empty((record_times.size, cfg.n_traj, psi0.size), dtype=complex)
    n_jumps = np.zeros(cfg.n_traj, dtype=int)
    for traj in range(cfg.n_traj):
        rng = trajectory_rng(cfg.seed, traj)
        psi = psi0.astype(complex)
        threshold = rng.uniform()
        out[0, traj] = psi
        for rec in range(1, record_times.size):
            t0, t1 = record_times[rec - 1], record_times[rec]
            n_sub = max(1, int(np.ceil((t1 - t0) / dt - 1e-12)))
            h = (t1 - t0) / n_sub
            t = t0
            for _ in range(n_sub):
                psi_new = _rk4_psi(apply_drift, psi, t, h)
                if np.vdot(psi_new, psi_new).real < threshold:
                    # bisect the jump time within [t, t + h] to h/16
                    lo, hi = 0.0, h
                    for _ in range(4):
                        mid = 0.5 * (lo + hi)
                        trial = _rk4_psi(apply_drift, psi, t, mid)
                        if np.vdot(trial, trial).real < threshold:
                            hi = mid
                        else:
                            lo = mid
                    t_jump = 0.5 * (lo + hi)
                    at_jump = _rk4_psi(apply_drift, psi, t, t_jump)
                    weights = nums @ (np.abs(at_jump) ** 2)
                    channel = rng.choice(n_modes, p=weights / weights.sum())
                    jumped = a_ops[channel] @ at_jump
                    jumped = jumped / np.linalg.norm(jumped)
                    n_jumps[traj] += 1
                    threshold = rng.uniform()
                    psi_new = _rk4_psi(apply_drift, jumped, t + t_jump, h - t_jump)
                psi = psi_new
                t += h
            out[rec, traj] = psi / np.linalg.norm(psi)
    return QuantumTrajectory(times=record_times, states=out, n_modes=n_modes, m=cfg.m, norm_drift=0.0, n_jumps=n_jumps)


def run_static_quantum(
    cfg: QuantumConfig,
    params: AnnealerParams,
    c: CouplingMatrix,
    record_times: np.ndarray | None = None,
    psi0: np.ndarray | None = None,
    allow_large: bool = False,
) -> QuantumTrajectory:
    if c.n > STATIC_N_LIMIT and not allow_large:
        raise ResourceLimit(f"static quantum runs limited to N <= {STATIC_N_LIMIT} (override with allow_large)")
    if record_times is None:
        record_times = strobe_times(params, cfg.t_final, cfg.n_records)
    dt = cfg.dt_tilde if cfg.dt_tilde is not None else DT_STATIC_QUANTUM_DEFAULT
    apply_h = _static_apply(params, c, cfg)
    if cfg.kappa_tilde > 0.0:
        return quantum_jump_evolve(cfg, c.n, apply_h, record_times, dt, psi0)
    return schrodinger_evolve(cfg, c.n, apply_h, record_times, dt, psi0)


def run_dynamical_quantum(
    cfg: QuantumConfig,
    params: AnnealerParams,
    design_f: ModulationMatrix,
    record_times: np.ndarray | None = None,
    psi0: np.ndarray | None = None,
    allow_large: bool = False,
) -> QuantumTrajectory:
    n = design_f.n
    if n > DYNAMICAL_N_LIMIT and not allow_large:
        raise ResourceLimit(f"dynamical quantum runs limited to N <= {DYNAMICAL_N_LIMIT} (override with allow_large)")
    if record_times is None:
        record_times = strobe_times(params, cfg.t_final, cfg.n_records)
    # 320 steps per Floquet period keeps the RK4 norm drift under the 1e-8
    # guard out to t = 100 periods of ramping; 80 steps (the classical rule
    # times two) breaches it partway through.
    dt_default = 2.0 * np.pi / (320.0 * params.lambda_big_tilde)
    dt = cfg.dt_tilde if cfg.dt_tilde is not None else dt_default
    if dt > 2.0 * np.pi / (20.0 * params.lambda_big_tilde):
        raise InvalidInput("dt too coarse to resolve the Floquet frequency")
    apply_h = _dynamical_apply(params, design_f, cfg)
    if cfg.kappa_tilde > 0.0:
        return quantum_jump_evolve(cfg, n, apply_h, record_times, dt, psi0)
    return schrodinger_evolve(cfg, n, apply_h, record_times, dt, psi0)


# ---------------------------------------------------------------------------
# position projectors and probabilities


def hermite_functions(m: int, x: np.ndarray) -> np.ndarray:
    """(m, len(x)) matrix of psi_n(x) in the x = (a + a^dag)/2 convention."""
    x = np.asarray(x, dtype=float)
    y = np.sqrt(2.0) * x
    out = np.empty((m, x.size))
    h_prev = np.pi**-0.25 * np.exp(-0.5 * y * y)
    out[0] = h_prev
    if m > 1:
        h = np.sqrt(2.0) * y * h_prev
        out[1] = h
        for n in range(1, m - 1):
            h, h_prev = np.sqrt(2.0 / (n + 1.0)) * y * h - np.sqrt(n / (n + 1.0)) * h_prev, h
            out[n + 1] = h
    return 2.0**0.25 * out


@dataclass(frozen=True)
class PositionProjector:
    x_min: float
    x_max: float
    l: int
    matrix: np.ndarray  # (m, m) Hermitian

    @classmethod
    def build(cls, m: int, x_min: float, x_max: float, l: int = PROJECTOR_POINTS_DEFAULT) -> "PositionProjector":
        dx = (x_max - x_min) / l
        grid = x_min + (np.arange(l) + 0.5) * dx
        basis = hermite_functions(m, grid) * np.sqrt(dx)
        return cls(x_min=x_min, x_max=x_max, l=l, matrix=basis @ basis.T)


def half_line_projectors(m: int, x_max: float = X_MAX_DEFAULT, l: int = PROJECTOR_POINTS_DEFAULT):
    """(positive, negative) half-line projectors; sgn(0) = +1 maps the
    boundary into the positive side (midpoint grids never sample x = 0)."""
    pos = PositionProjector.build(m, 0.0, x_max, l)
    neg = PositionProjector.build(m, -x_max, 0.0, l)
    return pos, neg


def _apply_mode(psi_t: np.ndarray, op: np.ndarray, axis: int) -> np.ndarray:
    return np.moveaxis(np.tensordot(op, psi_t, axes=([1], [axis])), 0, axis)


def configuration_probability(
    psi: np.ndarray,
    sigma: SpinConfiguration | np.ndarray,
    n: int,
    m: int,
    projectors=None,
) -> float:
    """Expectation of the tensor product of half-line projectors for sigma."""
    spins = sigma.spins if isinstance(sigma, SpinConfiguration) else tuple(sigma)
    if projectors is None:
        projectors = half_line_projectors(m)
    pos, neg = projectors
    psi_t = psi.reshape((m,) * n)
    proj = psi_t
    for i, s in enumerate(spins):
        proj = _apply_mode(proj, pos.matrix if s > 0 else neg.matrix, i)
    return float(np.vdot(psi_t, proj).real)


def success_probability_quantum(traj: QuantumTrajectory, ground: GroundStateSet, projectors=None):
    """Ensemble success series: sum of ground-configuration probabilities."""
    from .classical import SuccessSeries

    if projectors is None:
        projectors = half_line_projectors(traj.m)
    n_rec, n_traj, _ = traj.states.shape
    p_traj = np.zeros((n_rec, n_traj))
    for rec in range(n_rec):
        for l in range(n_traj):
            psi = traj.states[rec, l]
            p_traj[rec, l] = sum(
                configuration_probability(psi, conf, traj.n_modes, traj.m, projectors)
                for conf in ground.configurations
            )
    p = p_traj.mean(axis=1)
    sem = p_traj.std(axis=1, ddof=1) / np.sqrt(n_traj) if n_traj > 1 else np.zeros(n_rec)
    return SuccessSeries(times=traj.times, p=p, sem=sem)


def all_configuration_probabilities(psi: np.ndarray, n: int, m: int, projectors=None) -> dict[tuple, float]:
    from itertools import product

    if projectors is None:
        projectors = half_line_projectors(m)
    return {
        spins: configuration_probability(psi, np.array(spins), n, m, projectors)
        for spins in product((1, -1), repeat=n)
    }


def position_momentum_density(psi: np.ndarray, grid: np.ndarray, m: int):
    """N = 2 joint densities |psi(x1, x2)|^2 and |psi(p1, p2)|^2 on the grid.

    Momentum wavefunctions follow from phi_n^(p) = (-i)^n phi_n^(x).
    """
    if psi.size != m * m:
        raise InvalidInput("position_momentum_density supports N = 2 only")
    grid = np.asarray(grid, dtype=float)
    basis = hermite_functions(m, grid)  # (m, n_x)
    coeff = psi.reshape(m, m)
    wave_x = basis.T @ coeff @ basis
    phase = (-1j) ** np.arange(m)
    coeff_p = phase[:, None] * coeff * phase[None, :]
    wave_p = basis.T @ coeff_p @ basis
    return np.abs(wave_x) ** 2, np.abs(wave_p) ** 2
