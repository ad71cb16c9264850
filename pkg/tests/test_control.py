import numpy as np
import pytest

from floqkpo import design
from floqkpo.control import (
    HardwareFrame,
    emit_signal_report,
    flux_from_frequency,
    frame_from_params,
    frequency_from_flux,
    make_control_signals,
    omega_reference,
    pump_fast_frequency,
    slow_modulation_rate,
    solve_dc_frequency,
    solve_slow_frequency,
)
from floqkpo.errors import InvalidInput
from floqkpo.prescription import prescribe
from floqkpo.problems import SK7, gen_sk7

GHZ = 2 * np.pi * 1e9
MHZ = 2 * np.pi * 1e6


def fig1_setup(n=5, seed=0, chi=2 * np.pi * 1e5, omega_bus=10 * GHZ):
    c = gen_sk7(n, seed)
    params = prescribe(c, SK7)
    sol = design.solve_design(design.DesignProblem(c=c, lambda_c=params.lambda_c_tilde, j=params.j_tilde))
    frame = frame_from_params(params, omega_bus=omega_bus, chi=chi)
    return c, params, sol.f, frame


def tiny_g_frame(params, chi=2 * np.pi * 1e5, omega_bus=10 * GHZ, g_scale=1e-6):
    g = params.g_tilde * chi * g_scale
    return HardwareFrame(omega_bus=omega_bus, chi=chi, g=g)


def test_dc_small_g_limit():
    # g -> 0: quadratic degenerates, omega_dc = omega_0 - i Lambda - delta
    _, params, _, _ = fig1_setup()
    frame = tiny_g_frame(params, g_scale=1e-9)
    lam = params.lambda_big_tilde * frame.chi
    omega_0 = omega_reference(params, frame)
    for i in range(params.n):
        expect = omega_0 - i * lam - params.delta_tilde[i] * frame.chi
        assert solve_dc_frequency(params, frame, i) == pytest.approx(expect, abs=1e-6 * lam)


def test_dc_back_substitution_residual():
    _, params, _, frame = fig1_setup()
    lam = params.lambda_big_tilde * frame.chi
    omega_0 = omega_reference(params, frame)
    for i in range(params.n):
        w = solve_dc_frequency(params, frame, i)
        g = frame.g[i]
        delta = params.delta_tilde[i] * frame.chi
        residual = w - g * g / (frame.omega_bus - w) + delta - (omega_0 - i * lam)
        assert abs(residual) < 1e-9 * lam
        assert w < frame.omega_bus


def test_dc_approximately_evenly_spaced():
    _, params, _, frame = fig1_setup()
    lam = params.lambda_big_tilde * frame.chi
    omega_0 = omega_reference(params, frame)
    for i in range(params.n):
        w = solve_dc_frequency(params, frame, i)
        assert abs(w - (omega_0 - i * lam)) < 0.01 * lam


def test_slow_small_g_matches_modulation_rate():
    _, params, f, _ = fig1_setup()
    frame = tiny_g_frame(params, g_scale=1e-9)
    lam = params.lambda_big_tilde * frame.chi
    t = np.linspace(0.0, 2 * np.pi / lam, 64)
    for i in (0, 2, 4):
        m = slow_modulation_rate(f, lam, i, t)
        slow = solve_slow_frequency(params, frame, f, i, t)
        assert np.allclose(slow, m, atol=1e-6 * lam)
        # t = 0: cos(0) = 1 for every harmonic
        k = np.arange(1, f.n)
        assert m[0] == pytest.approx(-(f.f[i] * k * lam).sum())


def test_slow_back_substitution_residual():
    # dressed instantaneous frequency shifts by exactly m(t) at the root
    _, params, f, frame = fig1_setup()
    lam = params.lambda_big_tilde * frame.chi
    t = np.linspace(0.0, 4 * np.pi / lam, 257)
    for i in range(params.n):
        w_dc = solve_dc_frequency(params, frame, i)
        slow = solve_slow_frequency(params, frame, f, i, t, omega_dc=w_dc)
        m = slow_modulation_rate(f, lam, i, t)
        g = frame.g[i]
        d = frame.omega_bus - w_dc
        residual = slow - g * g / (d - slow) + g * g / d - m
        assert np.max(np.abs(residual)) < 1e-9 * lam


def test_pump_fast_zero_at_zero_ramp():
    _, params, f, frame = fig1_setup()
    lam = params.lambda_big_tilde * frame.chi
    t = np.linspace(0.0, 2 * np.pi / lam, 100)
    slow = solve_slow_frequency(params, frame, f, 0, t)
    fast = pump_fast_frequency(params, frame, 0, t, slow, lambda tt: np.zeros_like(tt))
    assert np.allclose(fast, 0.0)


def test_pump_fast_pure_cosine_when_unmodulated():
    # constant r, F = 0, g -> 0: pure cosine at 2 (omega_dc + delta)
    _, params, _, _ = fig1_setup()
    frame = tiny_g_frame(params, g_scale=1e-9)
    f0 = design.ModulationMatrix.zeros(params.n)
    w_dc = solve_dc_frequency(params, frame, 0)
    delta = params.delta_tilde[0] * frame.chi
    t = np.linspace(0.0, 20 * np.pi / (2 * (w_dc + delta)), 4001)
    slow = solve_slow_frequency(params, frame, f0, 0, t, omega_dc=w_dc)
    assert np.max(np.abs(slow)) < 1e-6 * frame.chi
    fast = pump_fast_frequency(params, frame, 0, t, slow, lambda tt: np.full_like(tt, 3.0), omega_dc=w_dc)
    assert np.allclose(fast, 2 * 3.0 * np.cos(2 * (w_dc + delta) * t), atol=1e-6)


def test_phase_accumulator_vs_analytic():
    # single-harmonic omega_slow = A cos(Lambda t): the accumulated phase is
    # (A/Lambda) sin(Lambda t), a closed form the trapezoid must reproduce
    _, params, _, _ = fig1_setup()
    frame = tiny_g_frame(params, g_scale=1e-12)
    w_dc = solve_dc_frequency(params, frame, 0)
    delta = params.delta_tilde[0] * frame.chi
    lam = 2 * np.pi * 100.0
    amp = 2 * np.pi * 10.0
    t = np.linspace(0.0, 2 * np.pi / lam, 6001)
    slow = amp * np.cos(lam * t)
    fast = pump_fast_frequency(params, frame, 0, t, slow, lambda tt: np.full_like(tt, 1.0), omega_dc=w_dc)
    phase_exact = (amp / lam) * np.sin(lam * t)
    expect = 2.0 * np.cos(2 * (w_dc + delta) * t + 2 * phase_exact)
    # amplitude error 2 r * phase error; phase error target 1e-8 rad
    assert np.max(np.abs(fast - expect)) < 2 * 1.0 * 1e-8 * 10


def test_flux_map():
    frame = HardwareFrame(
        omega_bus=10 * GHZ,
        chi=2 * np.pi * 1e6,
        g=np.array([20 * MHZ]),
        e_c=2 * np.pi * 250e6,
        e_j=2 * np.pi * 12e9,
        phi_dc=0.8,
    )
    assert flux_from_frequency(0.0, frame) == 0.0
    w = 2 * np.pi * 5e6
    assert frequency_from_flux(flux_from_frequency(w, frame), frame) == pytest.approx(w, rel=1e-12)
    # positive omega_ac with Phi_dc in (0, pi/2) gives negative flux
    assert flux_from_frequency(w, frame) < 0.0
    bad = HardwareFrame(omega_bus=10 * GHZ, chi=2 * np.pi * 1e6, g=np.array([20 * MHZ]), e_c=1.0, e_j=1.0, phi_dc=0.0)
    with pytest.raises(InvalidInput):
        flux_from_frequency(w, bad)
    with pytest.raises(InvalidInput):
        flux_from_frequency(w, HardwareFrame(omega_bus=10 * GHZ, chi=2 * np.pi * 1e6, g=np.array([20 * MHZ])))


def test_control_signals_ladder_and_bound():
    _, params, f, frame = fig1_setup()
    signals = make_control_signals(params, frame, f)
    lam = params.lambda_big_tilde * frame.chi
    spacing = -np.diff(signals.omega_dc)
    assert np.all(spacing > 0)
    assert np.allclose(spacing, lam, rtol=0.05)
    # two-band separation: slow band below (N-1) Lambda, fast band at 2 omega_dc
    assert 2 * signals.omega_dc.min() > 10 * params.n * lam


def test_report_carrier_spacing():
    _, params, f, frame = fig1_setup()
    report = emit_signal_report(params, frame, f)
    carriers = np.sort(report.carrier_frequencies())
    lam = params.lambda_big_tilde * frame.chi
    spacing = np.diff(carriers)
    assert np.all(np.abs(spacing - lam) <= report.bin_width + 1e-9)


def test_report_single_carrier_when_unmodulated():
    _, params, _, frame = fig1_setup()
    f0 = design.ModulationMatrix.zeros(params.n)
    report = emit_signal_report(params, frame, f0)
    for i in range(params.n):
        psd = report.psd[:, i]
        peak = np.argmax(psd)
        mask = np.abs(np.arange(psd.size) - peak) > 3
        assert psd[mask].max() < 1e-4 * psd[peak]


def test_report_parseval():
    _, params, f, frame = fig1_setup()
    report = emit_signal_report(params, frame, f)
    df = report.psd_freqs[1] - report.psd_freqs[0]
    for i in range(params.n):
        power_time = np.mean(report.x[:, i] ** 2)
        power_freq = np.sum(report.psd[:, i]) * df
        assert power_freq == pytest.approx(power_time, rel=0.01)


def test_report_sidebands_at_harmonics():
    # modulated oscillators carry sidebands offset by multiples of Lambda
    _, params, f, frame = fig1_setup()
    report = emit_signal_report(params, frame, f)
    lam = params.lambda_big_tilde * frame.chi
    df = report.psd_freqs[1] - report.psd_freqs[0]
    floor = np.median(report.psd)
    i = 2
    carrier = report.carrier_frequencies()[i]
    for k in (1, 2):
        for sign in (+1, -1):
            target = carrier + sign * k * lam
            j = int(round(target / df))
            window = report.psd[max(j - 2, 0) : j + 3, i]
            assert window.max() > 10 * floor
