"""Dimensionless annealer parameter prescription (12-step procedure).

All quantities are in units of the Kerr rate chi unless noted.  The steps:
lambda_C and r_max by problem class, frame detunings delta_i, eta, the native
strength lambda_J = lambda_C / eta, the Floquet frequency Lambda, the
slow-band bound delta_omega, the filling ratio d, nominal detunings, bus
couplings g_i, native couplings J_ij, and finally the modulation matrix F.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import design
from .errors import InvalidInput
from .problems import CUBIC_MAXCUT, DENSE_MAXCUT, SK7, CouplingMatrix

R_MAX_DEFAULT = 5.0


@dataclass(frozen=True)
class Tolerances:
    eps_sw: float = 0.1
    eps_ti: float = 0.1
    eps_uni: float = 0.1
    a_factor: float = 100.0  # 100 for quantum runs, 200 for classical runs

    def __post_init__(self):
        if min(self.eps_sw, self.eps_ti, self.eps_uni, self.a_factor) <= 0:
            raise InvalidInput("tolerances must be positive")


@dataclass(frozen=True)
class AnnealerParams:
    n: int
    class_tag: str
    lambda_c_tilde: float
    r_max_tilde: float
    eta: float
    lambda_j_tilde: float
    lambda_big_tilde: float
    d: float
    delta_tilde: np.ndarray
    delta_omega_bound_tilde: float
    delta_nom_tilde: np.ndarray
    g_tilde: np.ndarray
    j_tilde: design.NativeCouplingMatrix

    def to_json(self) -> str:
        return json.dumps(
            {
                "units": "chi",
                "n": self.n,
                "class": self.class_tag,
                "lambda_c_tilde": self.lambda_c_tilde,
                "r_max_tilde": self.r_max_tilde,
                "eta": self.eta,
                "lambda_j_tilde": self.lambda_j_tilde,
                "lambda_big_tilde": self.lambda_big_tilde,
                "d": self.d,
                "delta_tilde": list(self.delta_tilde),
                "delta_omega_bound_tilde": self.delta_omega_bound_tilde,
                "delta_nom_tilde": list(self.delta_nom_tilde),
                "g_tilde": list(self.g_tilde),
                "j_tilde_upper": list(self.j_tilde.entries[np.triu_indices(self.n, k=1)]),
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "AnnealerParams":
        data = json.loads(text)
        n = int(data["n"])
        j = np.zeros((n, n))
        iu = np.triu_indices(n, k=1)
        j[iu] = np.asarray(data["j_tilde_upper"], dtype=float)
        j += j.T
        return cls(
            n=n,
            class_tag=data["class"],
            lambda_c_tilde=data["lambda_c_tilde"],
            r_max_tilde=data["r_max_tilde"],
            eta=data["eta"],
            lambda_j_tilde=data["lambda_j_tilde"],
            lambda_big_tilde=data["lambda_big_tilde"],
            d=data["d"],
            delta_tilde=np.asarray(data["delta_tilde"], dtype=float),
            delta_omega_bound_tilde=data["delta_omega_bound_tilde"],
            delta_nom_tilde=np.asarray(data["delta_nom_tilde"], dtype=float),
            g_tilde=np.asarray(data["g_tilde"], dtype=float),
            j_tilde=design.NativeCouplingMatrix(n=n, entries=j),
        )


def lambda_c_tilde(n: int, class_tag: str) -> float:
    """Recommended target coupling strength per problem class."""
    if class_tag == SK7:
        return 4.0 / n
    if class_tag == DENSE_MAXCUT:
        return 8.0 / n
    if class_tag == CUBIC_MAXCUT:
        return 2.0
    raise InvalidInput(f"no lambda_C recommendation for class {class_tag!r}")


def frame_detunings(c: CouplingMatrix, lam_c: float) -> np.ndarray:
    """delta_i = lambda_C sum_j |C_ij| per oscillator."""
    return lam_c * np.sum(np.abs(c.entries), axis=1)


def floquet_frequency(delta_tilde: np.ndarray, r_max: float, lambda_j: float, a_factor: float) -> float:
    """Lambda = A max(1, delta_i, r_max, lambda_J)."""
    return a_factor * max(1.0, float(np.max(delta_tilde)), r_max, lambda_j)


def delta_omega_bound(n: int, class_tag: str, eta: float, lambda_big: float) -> float:
    """Heuristic bound on the slow-band frequency excursion, per class."""
    if class_tag == SK7:
        return eta * lambda_big * (n - 1.0) ** 1.5
    if class_tag == DENSE_MAXCUT:
        return 0.5 * eta * lambda_big * (n - 1.0) ** 2
    if class_tag == CUBIC_MAXCUT:
        return 3.0 * eta * lambda_big * (n - 1.0) ** 2 / n
    raise InvalidInput(f"no slow-band bound for class {class_tag!r}")


def delta_omega_bound_exact(f: design.ModulationMatrix, lambda_big: float) -> float:
    """Instance-exact diagnostic: Lambda sum_k k |F_1^(k)| (first oscillator)."""
    k = np.arange(1, f.n)
    return float(lambda_big * np.sum(k * np.abs(f.f[0])))


def filling_ratio(n: int, tol: Tolerances, lambda_big: float, lambda_j: float, d_omega_bound: float) -> float:
    """Minimum of the Schrieffer-Wolff, time-independence, and uniformity branches."""
    d_sw_ratio = 2.0 * tol.eps_sw**2 * (n - 1.0) * lambda_big / lambda_j
    d_ti_ratio = tol.eps_ti * (n - 1.0) * lambda_big / d_omega_bound
    d_sw = d_sw_ratio / (1.0 + d_sw_ratio)
    d_ti = d_ti_ratio / (1.0 + d_ti_ratio)
    d_uni = 1.0 - (1.0 + np.sqrt((1.0 + tol.eps_uni) ** 2 - 1.0) + tol.eps_uni) ** -2
    return float(min(d_sw, d_ti, d_uni))


def non_uniformity(d: float) -> float:
    """Worst-case relative spread of the native couplings at filling ratio d."""
    return (2.0 - d) / (2.0 * np.sqrt(1.0 - d)) - 1.0


def nominal_detunings(n: int, d: float, lambda_big: float) -> np.ndarray:
    """Delta_nom_i = Lambda [(1-d)/d (N-1) + (i-1)], uniformly spaced by Lambda.

    The offset realizes the filling-ratio definition
    d = (Delta_N - Delta_1)/Delta_N, i.e. Delta_N = (N-1) Lambda / d, which is
    the form consistent with the constraint branches, the non-uniformity
    measure (2-d)/(2 sqrt(1-d)), and the bandwidth-limited nonlinear rate.
    """
    if not 0.0 < d < 1.0:
        raise InvalidInput("filling ratio must be in (0, 1)")
    return lambda_big * ((1.0 - d) / d * (n - 1.0) + np.arange(n))


def native_couplings(delta_nom: np.ndarray, lambda_j: float) -> design.NativeCouplingMatrix:
    """J_ij = (lambda_J/2)(Delta_i + Delta_j)/sqrt(Delta_i Delta_j)."""
    n = len(delta_nom)
    entries = 0.5 * lambda_j * (delta_nom[:, None] + delta_nom[None, :]) / np.sqrt(
        np.outer(delta_nom, delta_nom)
    )
    np.fill_diagonal(entries, 0.0)
    return design.NativeCouplingMatrix(n=n, entries=entries)


def t_ramp(kappa_tilde: float) -> float:
    """Ramp duration min(1/kappa, 100) in units of 1/chi; 100 when lossless."""
    if kappa_tilde < 0:
        raise InvalidInput("kappa must be nonnegative")
    if kappa_tilde == 0:
        return 100.0
    return min(1.0 / kappa_tilde, 100.0)


def prescribe(
    c: CouplingMatrix,
    class_tag: str | None = None,
    tol: Tolerances = Tolerances(),
    r_max_tilde: float = R_MAX_DEFAULT,
    lambda_c_override: float | None = None,
    eta_override: float | None = None,
) -> AnnealerParams:
    """Steps 1-11 of the parameter prescription (step 12, F, is solve_design).

    Class-specific closed forms exist only for the named problem classes; for
    class "custom", lambda_c_override and eta_override are required.
    """
    n = c.n
    if class_tag is None:
        class_tag = c.class_tag
    if lambda_c_override is not None:
        lam_c = lambda_c_override
    else:
        lam_c = lambda_c_tilde(n, class_tag)
    if eta_override is not None:
        eta = eta_override
    else:
        eta = design.eta_prescription(n, class_tag)
    delta = frame_detunings(c, lam_c)
    lambda_j = lam_c / eta
    lambda_big = floquet_frequency(delta, r_max_tilde, lambda_j, tol.a_factor)
    if class_tag in (SK7, DENSE_MAXCUT, CUBIC_MAXCUT):
        d_omega = delta_omega_bound(n, class_tag, eta, lambda_big)
    else:
        # custom class: instance-exact bound from the first-order solution
        # with a uniform-J stand-in
        prob = design.DesignProblem(c=c, lambda_c=lam_c, j=design.NativeCouplingMatrix.uniform(n, lambda_j))
        f = design.first_order_solution(prob)
        d_omega = delta_omega_bound_exact(f, lambda_big)
        if d_omega == 0.0:
            d_omega = eta * lambda_big  # C = 0 fallback keeps branches finite
    d = filling_ratio(n, tol, lambda_big, lambda_j, d_omega)
    delta_nom = nominal_detunings(n, d, lambda_big)
    g = np.sqrt(delta_nom * lambda_j)
    j = native_couplings(delta_nom, lambda_j)
    return AnnealerParams(
        n=n,
        class_tag=class_tag,
        lambda_c_tilde=lam_c,
        r_max_tilde=r_max_tilde,
        eta=eta,
        lambda_j_tilde=lambda_j,
        lambda_big_tilde=lambda_big,
        d=d,
        delta_tilde=delta,
        delta_omega_bound_tilde=d_omega,
        delta_nom_tilde=delta_nom,
        g_tilde=g,
        j_tilde=j,
    )


def design_problem(c: CouplingMatrix, params: AnnealerParams) -> design.DesignProblem:
    """Step-12 input: solve the design equation with lambda_C / J_ij targets."""
    return design.DesignProblem(c=c, lambda_c=params.lambda_c_tilde, j=params.j_tilde)
