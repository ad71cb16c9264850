"""Floquet design: integral evaluation, first-order/optimized modulation solve.

Conventions (1-based in formulas, 0-based in code): the modulation matrix F
has shape (N, N-1); F[i, k-1] is the index of harmonic k on oscillator i and
defines the phase modulation dphi_i(t) = -sum_k F_i^(k) sin(k Lambda t).
After scaling time by Lambda, the effective coupling between oscillators
i > j is the period average

    I_ij = (1/2pi) int_0^2pi J_ij cos[(i-j) t + sum_k (F_i^(k)-F_j^(k)) sin(k t)] dt

and the design equation is I_ij = lambda_C C_ij.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidInput
from .problems import CUBIC_MAXCUT, CUSTOM, DENSE_MAXCUT, SK7, CouplingMatrix

FIRST_ORDER = "FirstOrder"
SECOND_ORDER = "SecondOrder"
FULL_ORDER = "FullOrder"

_FULL_ORDER_MAX_N = 100  # auto mode switches to SecondOrder above this


def default_samples(n: int) -> int:
    return max(256, 16 * n)


@dataclass(frozen=True)
class ModulationMatrix:
    """N x (N-1) phase-modulation indices F_i^(k), dimensionless radians."""

    n: int
    f: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.f, dtype=float)
        object.__setattr__(self, "f", f)
        if f.shape != (self.n, self.n - 1):
            raise InvalidInput(f"modulation matrix shape {f.shape} != ({self.n}, {self.n - 1})")
        if not np.all(np.isfinite(f)):
            raise InvalidInput("modulation matrix entries must be finite")

    @classmethod
    def zeros(cls, n: int) -> "ModulationMatrix":
        return cls(n=n, f=np.zeros((n, n - 1)))


@dataclass(frozen=True)
class NativeCouplingMatrix:
    """Symmetric native (bus-mediated) coupling rates, in units of chi."""

    n: int
    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=float)
        object.__setattr__(self, "entries", entries)
        if entries.shape != (self.n, self.n):
            raise InvalidInput("native coupling matrix shape mismatch")
        if not np.allclose(entries, entries.T, atol=0, rtol=0):
            raise InvalidInput("native coupling matrix must be symmetric")
        off = entries[~np.eye(self.n, dtype=bool)]
        if np.any(off <= 0):
            raise InvalidInput("native couplings must be strictly positive off-diagonal")

    @classmethod
    def uniform(cls, n: int, value: float) -> "NativeCouplingMatrix":
        entries = value * (1.0 - np.eye(n))
        return cls(n=n, entries=entries)


@dataclass(frozen=True)
class DesignProblem:
    c: CouplingMatrix
    lambda_c: float
    j: NativeCouplingMatrix

    def __post_init__(self):
        if self.lambda_c <= 0:
            raise InvalidInput("lambda_c must be positive")
        if self.c.n != self.j.n:
            raise InvalidInput("dimension mismatch between C and J")

    @property
    def n(self) -> int:
        return self.c.n

    def target_ratios(self) -> np.ndarray:
        """lambda_C C_ij / J_ij with zeros where C is zero."""
        out = np.zeros_like(self.c.entries)
        mask = self.c.entries != 0
        out[mask] = self.lambda_c * self.c.entries[mask] / self.j.entries[mask]
        return out


@dataclass(frozen=True)
class DesignSolution:
    f: ModulationMatrix
    c_eff: np.ndarray | None
    error: float | None
    modulation_depth: float
    method_tag: str


def floquet_integral(j: NativeCouplingMatrix, f: ModulationMatrix, i: int, jx: int, samples: int | None = None) -> float:
    """Period average of J_ij cos[(i-j) t + sum_k (F_i^(k)-F_j^(k)) sin(k t)].

    Indices are 0-based; trapezoid quadrature on a uniform grid over [0, 2pi].
    """
    if i == jx:
        raise InvalidInput("floquet_integral requires i != j")
    n = f.n
    if samples is None:
        samples = default_samples(n)
    t = np.linspace(0.0, 2.0 * np.pi, samples + 1)
    k = np.arange(1, n)
    diff = f.f[i] - f.f[jx]
    arg = (i - jx) * t + diff @ np.sin(np.outer(k, t))
    return float(j.entries[i, jx] * np.trapezoid(np.cos(arg), t) / (2.0 * np.pi))


def _phase_factors(f: ModulationMatrix, samples: int) -> np.ndarray:
    """z_i(t) = exp(i [i t + phi_i(t)]) on a periodic uniform grid (endpoint excluded)."""
    n = f.n
    t = 2.0 * np.pi * np.arange(samples) / samples
    k = np.arange(1, n)
    phases = f.f @ np.sin(np.outer(k, t))  # (n, T)
    phases += np.outer(np.arange(n), t)
    return np.exp(1j * phases)


def effective_couplings(prob: DesignProblem, f: ModulationMatrix, samples: int | None = None) -> np.ndarray:
    """C_eff_ij = floquet_integral(i, j) / lambda_C; symmetric, zero diagonal.

    Uses C_eff_ij proportional to Re < z_i conj(z_j) > with one complex matrix
    product; on the periodic grid this equals the closed trapezoid rule to
    machine precision.
    """
    n = prob.n
    if samples is None:
        samples = default_samples(n)
    z = _phase_factors(f, samples)
    avg = (z @ z.conj().T).real / samples
    c_eff = prob.j.entries * avg / prob.lambda_c
    np.fill_diagonal(c_eff, 0.0)
    return c_eff


def coupling_error(c_eff: np.ndarray, c: CouplingMatrix) -> float:
    """Max absolute off-diagonal deviation between C_eff and the target C."""
    if c_eff.shape != c.entries.shape:
        raise InvalidInput("shape mismatch")
    diff = np.abs(c_eff - c.entries)
    np.fill_diagonal(diff, 0.0)
    return float(diff.max())


def modulation_depth(f: ModulationMatrix) -> float:
    """Diagnostic zeta estimate: 2 * sum_k |F_1^(k)| (first oscillator)."""
    return float(2.0 * np.sum(np.abs(f.f[0])))


# ---------------------------------------------------------------------------
# First-order analytic solution
# ---------------------------------------------------------------------------


def _column_targets(prob: DesignProblem, k: int) -> np.ndarray:
    """b_j = lambda_C C_{j, j+k} / J_{j, j+k} for j = 0..n-k-1 (0-based)."""
    n = prob.n
    rows = np.arange(n - k)
    c = prob.c.entries[rows, rows + k]
    j = prob.j.entries[rows, rows + k]
    out = np.zeros(n - k)
    mask = c != 0
    out[mask] = prob.lambda_c * c[mask] / j[mask]
    return out


def symmetric_structure(n: int, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Mapping from the N-k free variables of column k to the full column.

    Returns (idx, sign): column[p] = sign[p] * x[idx[p]], with sign 0 for the
    identically-zero block.  Free block is p in [0, n-k); the mirror block
    p >= max(n-k, k) maps to p mod k with sign -1.
    """
    idx = np.zeros(n, dtype=np.int64)
    sign = np.zeros(n)
    free = n - k
    idx[:free] = np.arange(free)
    sign[:free] = 1.0
    lo = max(free, k)
    p = np.arange(lo, n)
    idx[p] = p % k
    sign[p] = -1.0
    return idx, sign


def expand_column(x: np.ndarray, n: int, k: int) -> np.ndarray:
    idx, sign = symmetric_structure(n, k)
    return sign * x[idx]


def first_order_solution(prob: DesignProblem) -> ModulationMatrix:
    """Analytic linear-order solution with the symmetric/centered structure.

    Solves -(1/2) J_ij (F_i^(i-j) - F_j^(i-j)) = lambda_C C_ij for i > j.
    """
    n = prob.n
    f = np.zeros((n, n - 1))
    for k in range(1, n):
        b = _column_targets(prob, k)
        col = np.zeros(n)
        top = min(k, n - k)
        for p in range(top):  # summed head block
            col[p] = b[p::k].sum()
        for p in range(k, n - k):  # recursion block
            col[p] = col[p - k] - 2.0 * b[p - k]
        lo = max(n - k, k)
        p = np.arange(lo, n)
        col[p] = -col[p % k]  # mirror block
        f[:, k - 1] = col
    return ModulationMatrix(n=n, f=f)


def first_order_residual(prob: DesignProblem, f: ModulationMatrix) -> np.ndarray:
    """Residual -(1/2) J_ij (F_i^(i-j) - F_j^(i-j)) - lambda_C C_ij for i > j."""
    n = prob.n
    res = np.zeros((n, n))
    for i in range(n):
        for j in range(i):
            k = i - j
            res[i, j] = (
                -0.5 * prob.j.entries[i, j] * (f.f[i, k - 1] - f.f[j, k - 1])
                - prob.lambda_c * prob.c.entries[i, j]
            )
    return res


# ---------------------------------------------------------------------------
# Second-order expansion
# ---------------------------------------------------------------------------


def second_order_residual(prob: DesignProblem, f: ModulationMatrix, i: int, j: int) -> float:
    """lambda_C C_ij / J_ij minus the second-order Taylor form of I_ij / J_ij.

    For k0 = i - j and D_l = F_i^(l) - F_j^(l), the expansion is
    I/J = -(1/2) D_k0 - (1/4) sum_l D_l D_{l+k0} + (1/8) sum_{l<k0} D_l D_{k0-l}.
    Indices 0-based, requires i > j.
    """
    if i <= j:
        raise InvalidInput("requires i > j")
    n = prob.n
    k0 = i - j
    d = f.f[i] - f.f[j]  # d[l-1] = D_l
    target = prob.target_ratios()[i, j]
    rhs = -0.5 * d[k0 - 1]
    ls = np.arange(1, n - k0)
    rhs -= 0.25 * np.dot(d[ls - 1], d[ls + k0 - 1])
    ls = np.arange(1, k0)
    rhs += 0.125 * np.dot(d[ls - 1], d[k0 - ls - 1])
    return target - rhs


# ---------------------------------------------------------------------------
# Column objectives (cached non-k terms) and gradients
# ---------------------------------------------------------------------------


class _ColumnWorkspace:
    """Cached per-column quantities for the k-diagonal objective.

    For pair index j (0-based, j = 0..n-k-1) the pair is (j, j+k) and
    G[j, l-1] = F_{j+k}^(l) - F_j^(l).
    """

    def __init__(self, prob: DesignProblem, f: np.ndarray, k: int, samples: int | None = None):
        n = prob.n
        self.n = n
        self.k = k
        self.b = _column_targets(prob, k)
        self.idx, self.sign = symmetric_structure(n, k)
        g = f[k:, :] - f[:-k, :]  # (n-k, n-1)
        self.theta = 1.0 if 2 * k <= n - 1 else 0.0
        self.d2k = g[:, 2 * k - 1] if self.theta else np.zeros(n - k)
        # quadratic cache: (1/4) sum_{l != k} G_l G_{l+k} - (1/8) sum_{l<k} G_l G_{k-l}
        u = np.zeros(n - k)
        ls = np.arange(1, n - k)
        if len(ls):
            mask = ls != k
            u += 0.25 * np.einsum("jl,jl->j", g[:, ls[mask] - 1], g[:, ls[mask] + k - 1])
        ls = np.arange(1, k)
        if len(ls):
            u -= 0.125 * np.einsum("jl,jl->j", g[:, ls - 1], g[:, k - ls - 1])
        self.u = u
        self.samples = samples
        self._grid_cache = None

    def _grid(self):
        # full-order cache: u_j(t) = k t + sum_{l != k} G_l sin(l t), on the grid
        if self._grid_cache is None:
            n, k = self.n, self.k
            samples = self.samples or default_samples(n)
            t = 2.0 * np.pi * np.arange(samples) / samples
            sin_lt = np.sin(np.outer(np.arange(1, n), t))  # (n-1, T)
            self._sin_kt = sin_lt[k - 1]
            self._u_t = k * t[None, :] + self._gmask @ sin_lt
            self._grid_cache = True
        return self._u_t, self._sin_kt

    def attach_full(self, f: np.ndarray):
        g = f[self.k:, :] - f[: -self.k, :]
        gmask = g.copy()
        gmask[:, self.k - 1] = 0.0
        self._gmask = gmask
        self._grid_cache = None

    def delta(self, x: np.ndarray) -> np.ndarray:
        col = self.sign * x[self.idx]
        return col[self.k:] - col[: -self.k]

    def taylor2_residual(self, x: np.ndarray) -> np.ndarray:
        d = self.delta(x)
        return self.b + 0.25 * d * (2.0 + self.theta * self.d2k) + self.u

    def taylor2_value(self, x: np.ndarray) -> float:
        r = self.taylor2_residual(x)
        return float(r @ r)

    def taylor2_value_grad(self, x: np.ndarray) -> tuple[float, np.ndarray]:
        r = self.taylor2_residual(x)
        v = 0.5 * r * (2.0 + self.theta * self.d2k)
        return float(r @ r), self._scatter(v)

    def full_value(self, x: np.ndarray) -> float:
        u_t, sin_kt = self._grid()
        d = self.delta(x)
        integral = np.cos(d[:, None] * sin_kt[None, :] + u_t).mean(axis=1)
        r = self.b - integral
        return float(r @ r)

    def full_value_grad(self, x: np.ndarray) -> tuple[float, np.ndarray]:
        u_t, sin_kt = self._grid()
        d = self.delta(x)
        arg = d[:, None] * sin_kt[None, :] + u_t
        integral = np.cos(arg).mean(axis=1)
        r = self.b - integral
        v = 2.0 * r * (np.sin(arg) @ sin_kt) / sin_kt.shape[0]
        return float(r @ r), self._scatter(v)

    def _scatter(self, v: np.ndarray) -> np.ndarray:
        """Chain v_j through d(F_{j+k} - F_j)/dx with the symmetric structure."""
        n, k = self.n, self.k
        grad = np.zeros(n - k)
        hi = np.arange(k, n)
        np.add.at(grad, self.idx[hi], v * self.sign[hi])
        lo = np.arange(0, n - k)
        np.subtract.at(grad, self.idx[lo], v * self.sign[lo])
        return grad


def column_objective_full(prob: DesignProblem, f: ModulationMatrix, k: int, samples: int | None = None) -> float:
    """Squared mismatch of the k-diagonal, full-order (quadrature) form."""
    _check_k(prob.n, k)
    ws = _ColumnWorkspace(prob, f.f, k, samples)
    ws.attach_full(f.f)
    return ws.full_value(f.f[: prob.n - k, k - 1])


def column_objective_taylor2(prob: DesignProblem, f: ModulationMatrix, k: int) -> tuple[float, np.ndarray]:
    """Second-order column objective and its analytic gradient.

    The gradient is with respect to the N-k free variables of column k in the
    symmetric parametrization; f must carry that structure in column k.
    """
    _check_k(prob.n, k)
    ws = _ColumnWorkspace(prob, f.f, k)
    return ws.taylor2_value_grad(f.f[: prob.n - k, k - 1])


def _check_k(n: int, k: int):
    if not 1 <= k <= n - 1:
        raise InvalidInput(f"column index k={k} outside [1, {n - 1}]")


# ---------------------------------------------------------------------------
# Nonlinear conjugate gradient (Polak-Ribiere with restart, backtracking)
# ---------------------------------------------------------------------------


def cg_minimize(value, value_grad, x0, max_iter=250, target=0.0, gtol=1e-14):
    """Minimize with PR+ nonlinear CG and Armijo backtracking line search.

    Stops early when the objective falls below `target` or the gradient is
    flat.  Returns (x, value).
    """
    x = np.array(x0, dtype=float)
    fval, g = value_grad(x)
    d = -g
    alpha = 1.0
    for _ in range(max_iter):
        if fval <= target:
            break
        gnorm2 = float(g @ g)
        if gnorm2 <= gtol * gtol:
            break
        gd = float(g @ d)
        if gd >= 0.0:  # restart on non-descent direction
            d = -g
            gd = -gnorm2
        alpha = max(alpha * 2.0, 1e-12)
        accepted = False
        for _ls in range(60):
            trial = x + alpha * d
            ftrial = value(trial)
            if ftrial <= fval + 1e-4 * alpha * gd:
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            break
        x = x + alpha * d
        fnew, gnew = value_grad(x)
        beta = max(0.0, float(gnew @ (gnew - g)) / gnorm2)
        d = -gnew + beta * d
        fval, g = fnew, gnew
    return x, fval


# ---------------------------------------------------------------------------
# Full solver (column-by-column passes)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SolveOptions:
    mode: str = "auto"  # auto | FirstOrder | SecondOrder | FullOrder
    max_cg_iters: int = 250
    max_passes: int = 25
    samples: int | None = None
    eta: float | None = None  # tolerance scale; default lambda_c / mean(J)
    compute_error: bool = True
    stagnation_fraction: float = 0.01


def _tolerance_eta(prob: DesignProblem, opts: SolveOptions) -> float:
    if opts.eta is not None:
        return opts.eta
    off = prob.j.entries[~np.eye(prob.n, dtype=bool)]
    return prob.lambda_c / float(off.mean())


def solve_design(prob: DesignProblem, opts: SolveOptions = SolveOptions()) -> DesignSolution:
    """Column-by-column optimization from the first-order starting point.

    Each pass visits active columns in ascending k, refreshing cached non-k
    terms, and runs CG (at most `max_cg_iters` iterations) on the column's
    objective; a column converges when its objective falls below
    (1e-3 eta)^2 (N-k).  Converged columns are rechecked each pass and
    re-activated if the moving caches pushed them back above tolerance;
    columns improving by less than 1% of their objective on two consecutive
    passes are dropped for good.  If any final column objective exceeds the
    first-order solution's by more than 1% of tolerance, or the full-integral
    error got worse, the first-order solution is returned instead.
    """
    n = prob.n
    mode = opts.mode
    if mode == "auto":
        mode = FULL_ORDER if n <= _FULL_ORDER_MAX_N else SECOND_ORDER
    f0 = first_order_solution(prob)
    if mode == FIRST_ORDER:
        return _finish(prob, f0, FIRST_ORDER, opts)

    eta = _tolerance_eta(prob, opts)
    tol = np.array([(1e-3 * eta) ** 2 * (n - k) for k in range(1, n)])

    def col_value_grad(ws, full):
        return (ws.full_value, ws.full_value_grad) if full else (ws.taylor2_value, ws.taylor2_value_grad)

    full = mode == FULL_ORDER

    def objective_at(f, k):
        ws = _ColumnWorkspace(prob, f, k, opts.samples)
        if full:
            ws.attach_full(f)
            return ws.full_value(f[: n - k, k - 1])
        return ws.taylor2_value(f[: n - k, k - 1])

    f = f0.f.copy()
    obj_first = np.array([objective_at(f0.f, k) for k in range(1, n)])
    active = set(range(1, n))
    dropped: set[int] = set()
    last_obj = obj_first.copy()
    stagnant = np.zeros(n - 1, dtype=int)

    for _pass in range(opts.max_passes):
        if not active:
            break
        converged_this_pass = set()
        for k in sorted(active):
            ws = _ColumnWorkspace(prob, f, k, opts.samples)
            if full:
                ws.attach_full(f)
            value, value_grad = col_value_grad(ws, full)
            x0 = f[: n - k, k - 1]
            x, fval = cg_minimize(value, value_grad, x0, max_iter=opts.max_cg_iters, target=tol[k - 1])
            f[:, k - 1] = expand_column(x, n, k)
            if fval < tol[k - 1]:
                converged_this_pass.add(k)
            if last_obj[k - 1] - fval < opts.stagnation_fraction * last_obj[k - 1]:
                stagnant[k - 1] += 1
                if stagnant[k - 1] >= 2:
                    dropped.add(k)
            else:
                stagnant[k - 1] = 0
            last_obj[k - 1] = fval
        active -= converged_this_pass
        active -= dropped
        # recheck previously converged columns against the updated caches
        recheck = [k for k in range(1, n) if k not in active and k not in dropped]
        for k in recheck:
            val = objective_at(f, k)
            last_obj[k - 1] = val
            if val >= tol[k - 1]:
                active.add(k)
        if not active:
            break

    final_obj = np.array([objective_at(f, k) for k in range(1, n)])
    if np.any(final_obj > obj_first + 0.01 * tol):
        return _finish(prob, f0, FIRST_ORDER, opts)
    solution = ModulationMatrix(n=n, f=f)
    result = _finish(prob, solution, mode, opts)
    if opts.compute_error:
        fallback = _finish(prob, f0, FIRST_ORDER, opts)
        if fallback.error < result.error:
            return fallback
    return result


def _finish(prob: DesignProblem, f: ModulationMatrix, tag: str, opts: SolveOptions) -> DesignSolution:
    if opts.compute_error:
        c_eff = effective_couplings(prob, f, opts.samples)
        err = coupling_error(c_eff, prob.c)
    else:
        c_eff, err = None, None
    return DesignSolution(f=f, c_eff=c_eff, error=err, modulation_depth=modulation_depth(f), method_tag=tag)


# ---------------------------------------------------------------------------
# Class-dependent closed forms (eta prescriptions and design statistics)
# ---------------------------------------------------------------------------


def eta_prescription(n: int, class_tag: str) -> float:
    """Recommended dynamical-coupling parameter eta per problem class."""
    if n < 2:
        raise InvalidInput("n >= 2 required")
    if class_tag == SK7:
        return 0.8 / n
    if class_tag == DENSE_MAXCUT:
        return 1.2 / (n * (1.0 + np.log(n)))
    if class_tag == CUBIC_MAXCUT:
        return 0.12 / (1.0 + np.log(n))
    raise InvalidInput(f"no eta prescription for class {class_tag!r}")


def eta_bound(n: int, class_tag: str, zeta_max: float) -> float:
    """Largest eta keeping the modulation depth below zeta_max."""
    if n < 2 or zeta_max <= 0:
        raise InvalidInput("n >= 2 and zeta_max > 0 required")
    if class_tag == SK7:
        return zeta_max / (2.0 * n)
    if class_tag == DENSE_MAXCUT:
        return zeta_max / (n * (1.0 + np.log(n)))
    if class_tag == CUBIC_MAXCUT:
        return zeta_max / (6.0 * (1.0 + np.log(n)))
    raise InvalidInput(f"no eta bound for class {class_tag!r}")


def mean_f1k_magnitude(n: int, k: int, class_tag: str, eta: float) -> float:
    """Expected |F_1^(k)| of the first-order solution, per problem class."""
    _check_k(n, k)
    if class_tag == SK7:
        return eta / 2.0 * np.sqrt(n - 1.0) / np.sqrt(k)
    if class_tag == DENSE_MAXCUT:
        return eta / 2.0 * (n - 1.0) / k
    if class_tag == CUBIC_MAXCUT:
        return 3.0 * eta * (n - 1.0) / n / k
    raise InvalidInput(f"no magnitude formula for class {class_tag!r}")
