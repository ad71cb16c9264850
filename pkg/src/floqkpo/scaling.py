"""Hardware-scaling analysis: maximum nonlinear rate and cavity lifetime.

Given per-class native-coupling requirements and hardware limits (maximum
bus-resonator coupling g_max and maximum bus detuning Delta_max), the
nonlinear rate is bounded by

    chi_max = min( g_max sqrt(2 d / (Lambda lambda_J (N-1))),
                   Delta_max d / ((N-1) Lambda) )

with the filling ratio d recomputed per N through the full constraint set.
The cavity lifetime requirement follows from kappa = chi/10 and
T_cav = 1/(2 kappa) = 5/chi.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .design import eta_prescription
from .errors import InvalidInput
from .prescription import R_MAX_DEFAULT, Tolerances, delta_omega_bound, filling_ratio
from .problems import CUBIC_MAXCUT, DENSE_MAXCUT, SK7

COUPLING_LIMITED = "CouplingLimited"
BANDWIDTH_LIMITED = "BandwidthLimited"


@dataclass(frozen=True)
class HardwareLimits:
    g_max: float  # rad/s
    delta_max: float  # rad/s

    def __post_init__(self):
        if self.g_max <= 0 or self.delta_max <= 0:
            raise InvalidInput("hardware limits must be positive")


@dataclass(frozen=True)
class ScalingPoint:
    n: int
    chi_max: float  # rad/s
    t_cav_min: float  # seconds
    limiting_constraint: str
    coupling_branch: float
    bandwidth_branch: float
    d: float
    lambda_big_tilde: float
    lambda_j_tilde: float


def lambda_j_requirement(n: int, class_tag: str) -> float:
    """Smallest native coupling strength meeting the eta prescription."""
    if class_tag == SK7:
        return 5.0  # (4/N) / (0.8/N)
    if class_tag == DENSE_MAXCUT:
        return 20.0 / 3.0 * (1.0 + np.log(n))
    if class_tag == CUBIC_MAXCUT:
        return 50.0 / 3.0 * (1.0 + np.log(n))
    raise InvalidInput(f"no native-coupling requirement for class {class_tag!r}")


def _dimensionless_point(n: int, class_tag: str, tol: Tolerances) -> tuple[float, float, float]:
    """(lambda_J, Lambda, d) from the prescription closed forms at size n."""
    lambda_j = lambda_j_requirement(n, class_tag)
    lambda_big = tol.a_factor * max(1.0, R_MAX_DEFAULT, lambda_j)
    eta = eta_prescription(n, class_tag)
    d_omega = delta_omega_bound(n, class_tag, eta, lambda_big)
    d = filling_ratio(n, tol, lambda_big, lambda_j, d_omega)
    return lambda_j, lambda_big, d


def chi_max(n: int, class_tag: str, limits: HardwareLimits, tol: Tolerances = Tolerances()) -> ScalingPoint:
    """Both chi bounds, their minimum, and which hardware limit binds."""
    if n < 2:
        raise InvalidInput("n >= 2 required")
    lambda_j, lambda_big, d = _dimensionless_point(n, class_tag, tol)
    coupling = limits.g_max * np.sqrt(2.0 * d / (lambda_big * lambda_j * (n - 1.0)))
    bandwidth = limits.delta_max * d / ((n - 1.0) * lambda_big)
    chi = min(coupling, bandwidth)
    tag = COUPLING_LIMITED if coupling <= bandwidth else BANDWIDTH_LIMITED
    return ScalingPoint(
        n=n,
        chi_max=chi,
        t_cav_min=5.0 / chi,  # kappa = chi/10, T_cav = 1/(2 kappa)
        limiting_constraint=tag,
        coupling_branch=coupling,
        bandwidth_branch=bandwidth,
        d=d,
        lambda_big_tilde=lambda_big,
        lambda_j_tilde=lambda_j,
    )


def asymptotic_chi(n: int, class_tag: str, regime: str) -> float:
    """Large-N proportional form of chi_max (unnormalized).

    Coupling-limited: N^{-1/2} with a (1+log N)^{-1} factor for the MAX-CUT
    classes; bandwidth-limited: N^{-1} with (1+log N)^{-1} for MAX-CUT.
    """
    if regime == COUPLING_LIMITED:
        base = n ** -0.5
    elif regime == BANDWIDTH_LIMITED:
        base = 1.0 / n
    else:
        raise InvalidInput(f"unknown regime {regime!r}")
    if class_tag == SK7:
        return base
    if class_tag in (DENSE_MAXCUT, CUBIC_MAXCUT):
        return base / (1.0 + np.log(n))
    raise InvalidInput(f"no asymptotic form for class {class_tag!r}")


def sweep(
    n_grid,
    class_tag: str,
    g_grid=None,
    delta_grid=None,
    g_max: float | None = None,
    delta_max: float | None = None,
    tol: Tolerances = Tolerances(),
) -> str:
    """CSV table of ScalingPoints over (N, g_max) or (N, Delta_max) grids."""
    if g_grid is None and delta_grid is None:
        raise InvalidInput("provide a g_max grid or a Delta_max grid")
    rows = []
    for n in n_grid:
        if g_grid is not None:
            pairs = [(g, delta_max) for g in g_grid]
        else:
            pairs = [(g_max, delt) for delt in delta_grid]
        for g, delt in pairs:
            point = chi_max(int(n), class_tag, HardwareLimits(g_max=g, delta_max=delt), tol)
            rows.append(
                {
                    "n": point.n,
                    "g_max": g,
                    "delta_max": delt,
                    "chi_max": point.chi_max,
                    "t_cav_min": point.t_cav_min,
                    "limiting_constraint": point.limiting_constraint,
                    "d": point.d,
                }
            )
    out = io.StringIO()
    writer = csv.DictWriter(out, fieldnames=list(rows[0].keys()))
    writer.writeheader()
    writer.writerows(rows)
    return out.getvalue()
