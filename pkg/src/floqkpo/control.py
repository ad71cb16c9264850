"""JPO instantaneous-frequency control signals from the Floquet design.

The target frequency schedule for oscillator i is the dressed frequency

    omega_dc_i - g_i^2/(omega_bus - omega_dc_i) + delta_i = omega_0 - i Lambda

(0-based i) with the slow band adding the modulation derivative

    m_i(t) = -sum_k F_i^(k) k Lambda cos(k Lambda t)

on top of the dressed frequency, and the fast (pumping) band

    omega_fast_i(t) = 2 r(t) cos[2 (omega_dc_i + delta_i) t + 2 phi_i(t)],
    phi_i(t) = int_0^t (omega_slow_i - g_i^2/(omega_bus - omega_dc_i - omega_slow_i)) dt'.

Both the DC and slow-band conditions reduce to quadratics whose physical
branch is the root continuous with the g -> 0 limit.  All quantities here
are in SI angular-frequency units (rad/s); dimensionless prescription
values are scaled by the nonlinear rate chi.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.signal import periodogram

from .design import ModulationMatrix
from .errors import InvalidInput, NumericalFailure
from .prescription import AnnealerParams

SLOW_BOUND_MARGIN = 1.5


@dataclass(frozen=True)
class HardwareFrame:
    """Physical bus/oscillator frame: bus frequency, nonlinear rate, couplings."""

    omega_bus: float  # rad/s
    chi: float  # rad/s
    g: np.ndarray  # (n,) rad/s
    e_c: float | None = None  # rad/s
    e_j: float | None = None  # rad/s
    phi_dc: float | None = None  # dimensionless flux

    def __post_init__(self):
        object.__setattr__(self, "g", np.asarray(self.g, dtype=float))
        if self.omega_bus <= 0 or self.chi <= 0:
            raise InvalidInput("omega_bus and chi must be positive")
        if np.any(self.g <= 0):
            raise InvalidInput("bus couplings g_i must be positive")


def frame_from_params(
    params: AnnealerParams,
    omega_bus: float,
    chi: float,
    e_c: float | None = None,
    e_j: float | None = None,
    phi_dc: float | None = None,
) -> HardwareFrame:
    """Physical frame with g_i = g_tilde_i chi from the prescription."""
    return HardwareFrame(omega_bus=omega_bus, chi=chi, g=params.g_tilde * chi, e_c=e_c, e_j=e_j, phi_dc=phi_dc)


def omega_reference(params: AnnealerParams, frame: HardwareFrame) -> float:
    """omega_0 = omega_bus - Delta_nom_1."""
    return frame.omega_bus - params.delta_nom_tilde[0] * frame.chi


def _minus_root(b: float, c: float) -> float:
    disc = b * b - 4.0 * c
    if disc < 0:
        raise NumericalFailure("negative discriminant: unphysical control parameters")
    return 0.5 * (b - np.sqrt(disc))


def solve_dc_frequency(params: AnnealerParams, frame: HardwareFrame, i: int) -> float:
    """DC frequency of oscillator i (0-based) on the physical branch.

    Solves omega_dc - g^2/(omega_bus - omega_dc) + delta = omega_0 - i Lambda;
    the minus root of the quadratic is continuous with the g -> 0 limit
    omega_dc = omega_0 - i Lambda - delta.
    """
    lam = params.lambda_big_tilde * frame.chi
    delta = params.delta_tilde[i] * frame.chi
    target = omega_reference(params, frame) - i * lam
    g = frame.g[i]
    b = frame.omega_bus + target - delta
    c = (target - delta) * frame.omega_bus + g * g
    return _minus_root(b, c)


def slow_modulation_rate(design_f: ModulationMatrix, lam: float, i: int, t: np.ndarray) -> np.ndarray:
    """m_i(t) = -sum_k F_i^(k) k Lambda cos(k Lambda t)."""
    t = np.asarray(t, dtype=float)
    k = np.arange(1, design_f.n)
    return -(design_f.f[i] * k * lam) @ np.cos(np.multiply.outer(k * lam, t))


def solve_slow_frequency(
    params: AnnealerParams,
    frame: HardwareFrame,
    design_f: ModulationMatrix,
    i: int,
    t: np.ndarray,
    omega_dc: float | None = None,
) -> np.ndarray:
    """Slow-band frequency of oscillator i on the physical branch.

    With D = omega_bus - omega_dc_i the condition that the slow band shifts
    the dressed frequency by m_i(t) is the quadratic
    y^2 - (D + m - g^2/D) y + m D = 0; the minus root tends to y = m as
    g -> 0.
    """
    if omega_dc is None:
        omega_dc = solve_dc_frequency(params, frame, i)
    lam = params.lambda_big_tilde * frame.chi
    m = slow_modulation_rate(design_f, lam, i, t)
    d_bus = frame.omega_bus - omega_dc
    g = frame.g[i]
    b = d_bus + m - g * g / d_bus
    disc = b * b - 4.0 * m * d_bus
    if np.any(disc < 0):
        raise NumericalFailure("negative discriminant in slow-band quadratic")
    return 0.5 * (b - np.sqrt(disc))


def pump_fast_frequency(
    params: AnnealerParams,
    frame: HardwareFrame,
    i: int,
    times: np.ndarray,
    omega_slow: np.ndarray,
    r_of_t: Callable[[np.ndarray], np.ndarray],
    omega_dc: float | None = None,
) -> np.ndarray:
    """Pumping-band signal 2 r(t) cos[2 (omega_dc + delta) t + 2 phi(t)].

    phi(t) accumulates int (omega_slow - g^2/(omega_bus - omega_dc -
    omega_slow)) dt' by the trapezoid rule on the sampling grid, so the
    fast band stays phase-locked to the slow band.
    """
    if omega_dc is None:
        omega_dc = solve_dc_frequency(params, frame, i)
    times = np.asarray(times, dtype=float)
    g = frame.g[i]
    integrand = omega_slow - g * g / (frame.omega_bus - omega_dc - omega_slow)
    phase = cumulative_trapezoid(integrand, times, initial=0.0)
    delta = params.delta_tilde[i] * frame.chi
    r = np.asarray(r_of_t(times), dtype=float)
    return 2.0 * r * np.cos(2.0 * (omega_dc + delta) * times + 2.0 * phase)


def flux_from_frequency(omega_ac: float, frame: HardwareFrame) -> float:
    """Phi_ac = -omega_ac sqrt(cos Phi_dc/(E_C E_J))/(2 sin Phi_dc)."""
    if frame.e_c is None or frame.e_j is None or frame.phi_dc is None:
        raise InvalidInput("flux map needs e_c, e_j and phi_dc")
    s = np.sin(frame.phi_dc)
    if s == 0.0:
        raise InvalidInput("zero flux sensitivity at Phi_dc in {0, pi}")
    return -omega_ac * np.sqrt(np.cos(frame.phi_dc) / (frame.e_c * frame.e_j)) / (2.0 * s)


def frequency_from_flux(phi_ac: float, frame: HardwareFrame) -> float:
    """Inverse of the linear flux map."""
    if frame.e_c is None or frame.e_j is None or frame.phi_dc is None:
        raise InvalidInput("flux map needs e_c, e_j and phi_dc")
    s = np.sin(frame.phi_dc)
    if s == 0.0:
        raise InvalidInput("zero flux sensitivity at Phi_dc in {0, pi}")
    return -phi_ac * 2.0 * s / np.sqrt(np.cos(frame.phi_dc) / (frame.e_c * frame.e_j))


@dataclass(frozen=True)
class ControlSignals:
    omega_0: float
    omega_dc: np.ndarray  # (n,)
    omega_slow: Callable[[int, np.ndarray], np.ndarray]
    omega_fast: Callable[[int, np.ndarray, Callable], np.ndarray]


def make_control_signals(params: AnnealerParams, frame: HardwareFrame, design_f: ModulationMatrix) -> ControlSignals:
    """Solve all DC frequencies and bundle the per-oscillator band callables.

    Validates the DC ladder (strictly decreasing, spacing close to Lambda)
    and the slow-band amplitude bound |omega_slow| <= 1.5 delta_omega_bound.
    """
    n = params.n
    lam = params.lambda_big_tilde * frame.chi
    omega_dc = np.array([solve_dc_frequency(params, frame, i) for i in range(n)])
    if np.any(np.diff(omega_dc) >= 0):
        raise NumericalFailure("DC frequencies are not strictly decreasing")
    if np.any(np.abs(np.diff(omega_dc) + lam) > 0.05 * lam):
        raise NumericalFailure("DC frequency spacing deviates from Lambda by more than 5%")

    def omega_slow(i: int, t: np.ndarray) -> np.ndarray:
        return solve_slow_frequency(params, frame, design_f, i, t, omega_dc=omega_dc[i])

    def omega_fast(i: int, times: np.ndarray, r_of_t: Callable) -> np.ndarray:
        slow = omega_slow(i, times)
        return pump_fast_frequency(params, frame, i, times, slow, r_of_t, omega_dc=omega_dc[i])

    bound = SLOW_BOUND_MARGIN * params.delta_omega_bound_tilde * frame.chi
    probe = np.linspace(0.0, 2.0 * np.pi / lam, 512, endpoint=False)
    for i in range(n):
        if np.max(np.abs(omega_slow(i, probe))) > bound:
            raise NumericalFailure(f"slow-band amplitude of oscillator {i} exceeds the heuristic bound")
    return ControlSignals(omega_0=omega_reference(params, frame), omega_dc=omega_dc, omega_slow=omega_slow, omega_fast=omega_fast)


@dataclass(frozen=True)
class SignalReport:
    times: np.ndarray  # (n_t,) seconds
    omega: np.ndarray  # (n_t, n) rad/s, relative to the reference
    x: np.ndarray  # (n_t, n) in-phase component
    psd_freqs: np.ndarray  # (n_f,) rad/s
    psd: np.ndarray  # (n_f, n)
    bin_width: float  # rad/s
    reference: float  # rad/s subtracted before sampling

    def traces_csv(self) -> str:
        n = self.omega.shape[1]
        header = "t," + ",".join(f"omega_{i}" for i in range(n)) + "," + ",".join(f"x_{i}" for i in range(n))
        rows = [header]
        for row_t, row_w, row_x in zip(self.times, self.omega, self.x):
            rows.append(",".join([f"{row_t:.9e}"] + [f"{v:.9e}" for v in row_w] + [f"{v:.9e}" for v in row_x]))
        return "\n".join(rows) + "\n"

    def psd_csv(self) -> str:
        n = self.psd.shape[1]
        header = "omega," + ",".join(f"psd_{i}" for i in range(n))
        rows = [header]
        for f, row in zip(self.psd_freqs, self.psd):
            rows.append(",".join([f"{f:.9e}"] + [f"{v:.9e}" for v in row]))
        return "\n".join(rows) + "\n"

    def carrier_frequencies(self) -> np.ndarray:
        return self.psd_freqs[np.argmax(self.psd, axis=0)]


def emit_signal_report(
    params: AnnealerParams,
    frame: HardwareFrame,
    design_f: ModulationMatrix,
    n_periods: int = 32,
    oversample: float = 8.0,
    reference: float | None = None,
) -> SignalReport:
    """Sample omega_i(t) = omega_dc_i + omega_slow_i(t) and x_i(t), with PSD.

    The carriers sit near omega_bus - Delta_nom_i, so sampling at the
    absolute frequency is impractical; traces are emitted relative to a
    reference frequency (default omega_bus), which shifts every carrier
    and sideband without changing spacings.  x_i(t) = cos(int omega_i dt')
    of the shifted frequency; PSD is a Hann-window periodogram.
    """
    signals = make_control_signals(params, frame, design_f)
    if reference is None:
        reference = frame.omega_bus
    lam = params.lambda_big_tilde * frame.chi
    f_max = abs(frame.omega_bus - reference) + params.delta_nom_tilde[-1] * frame.chi + params.n * lam
    dt = np.pi / (oversample * f_max)  # Nyquist margin = oversample
    t_total = n_periods * 2.0 * np.pi / lam
    n_t = int(np.ceil(t_total / dt))
    times = np.arange(n_t) * dt
    omega = np.empty((n_t, params.n))
    for i in range(params.n):
        omega[:, i] = signals.omega_dc[i] + signals.omega_slow(i, times) - reference
    phase = cumulative_trapezoid(omega, times, axis=0, initial=0.0)
    x = np.cos(phase)
    freqs_hz, psd = periodogram(x, fs=1.0 / dt, window="hann", axis=0, detrend=False)
    return SignalReport(
        times=times,
        omega=omega,
        x=x,
        psd_freqs=2.0 * np.pi * freqs_hz,
        psd=psd / (2.0 * np.pi),  # density per rad/s
        bin_width=2.0 * np.pi / t_total,
        reference=reference,
    )
