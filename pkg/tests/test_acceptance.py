"""End-to-end acceptance checks, one per shipped guarantee.

Each test exercises one numbered claim at its stated tolerance and prints a
single PASS/FAIL line to the terminal (bypassing capture) so a full run
yields a compact scoreboard.  These are deliberately heavier than the unit
suites; the whole file runs in roughly an hour on one core.
"""

import time

import numpy as np
from scipy.special import jv

from floqkpo import design
from floqkpo.classical import ClassicalConfig, integrate_static, paired_run, success_probability
from floqkpo.prescription import Tolerances, design_problem, prescribe, t_ramp
from floqkpo.problems import CouplingMatrix, brute_force_ground_states, gen_sk7, generate
from floqkpo.quantum import (
    QuantumConfig,
    all_configuration_probabilities,
    run_dynamical_quantum,
    run_static_quantum,
    strobe_times,
    success_probability_quantum,
    vacuum_state,
)
from floqkpo.scaling import HardwareLimits, chi_max


def report(capsys, num, name, ok, detail=""):
    with capsys.disabled():
        status = "PASS" if ok else "FAIL"
        suffix = f"  [{detail}]" if detail else ""
        print(f"\nACCEPTANCE {num:02d} {name}: {status}{suffix}")
    assert ok, f"criterion {num} ({name}) failed: {detail}"


def uniform_problem(c, eta):
    return design.DesignProblem(
        c=c, lambda_c=1.0, j=design.NativeCouplingMatrix.uniform(c.n, 1.0 / eta)
    )


_PAIR_CACHE = {}


def antiferro_pair_setup():
    if "pair" not in _PAIR_CACHE:
        c = CouplingMatrix(n=2, entries=np.array([[0.0, 1.0], [1.0, 0.0]]))
        params = prescribe(c, "sk7")  # A = 100, lambda_C = 2, r_max = 5
        sol = design.solve_design(design_problem(c, params))
        _PAIR_CACHE["pair"] = (c, params, sol.f, brute_force_ground_states(c))
    return _PAIR_CACHE["pair"]


def test_criterion_01_bessel_oracle(capsys):
    # single-harmonic differential modulation of depth m on harmonic (i-j)
    # must give an effective coupling of -J1(m) times the native coupling
    t0 = time.time()
    n = 6
    j = design.NativeCouplingMatrix.uniform(n, 1.0)
    worst = 0.0
    for m_depth in (0.1, 0.5, 1.0, 1.8):
        for (i, jx) in ((1, 0), (3, 1), (5, 0)):
            f = np.zeros((n, n - 1))
            k = i - jx
            f[i, k - 1] = +0.5 * m_depth
            f[jx, k - 1] = -0.5 * m_depth
            fmat = design.ModulationMatrix(n=n, f=f)
            val = design.floquet_integral(j, fmat, i, jx, samples=4096)
            worst = max(worst, abs(val - (-jv(1, m_depth))))
    elapsed = time.time() - t0
    report(capsys, 1, "bessel oracle", worst < 1e-9, f"max dev {worst:.2e}, {elapsed:.2f} s")


def test_criterion_02_first_order_exactness(capsys):
    t0 = time.time()
    worst = 0.0
    count = 0
    for n in (4, 8, 16):
        for class_tag in ("sk7", "dense", "cubic"):
            for seed in range(6):
                c = generate(class_tag, n, seed)
                prob = uniform_problem(c, design.eta_prescription(n, class_tag))
                f = design.first_order_solution(prob)
                res = design.first_order_residual(prob, f)
                worst = max(worst, float(np.max(np.abs(res))))
                count += 1
    elapsed = time.time() - t0
    report(
        capsys, 2, "first-order exactness", worst < 1e-12,
        f"{count} instances, max residual {worst:.2e}, {elapsed:.1f} s",
    )


def test_criterion_03_design_error_at_prescribed_eta(capsys):
    details = []
    ok = True
    for n in (8, 16, 32):
        errors = []
        for seed in range(10):
            prob = uniform_problem(gen_sk7(n, seed), 0.8 / n)
            sol = design.solve_design(prob, design.SolveOptions(mode="FullOrder"))
            errors.append(sol.error)
        mean_err = float(np.mean(errors))
        ok = ok and mean_err <= 0.03
        details.append(f"N={n}: {mean_err:.4f}")
    n = 128
    prob = uniform_problem(gen_sk7(n, 0), design.eta_prescription(n, "sk7"))
    sol = design.solve_design(prob, design.SolveOptions(mode="SecondOrder"))
    ok = ok and sol.error <= 0.05
    details.append(f"N=128 2nd-order: {sol.error:.4f}")
    report(capsys, 3, "design error at prescribed eta", ok, "; ".join(details))


def test_criterion_04_gradient_correctness(capsys):
    t0 = time.time()
    worst = 0.0
    for n in (4, 8, 16):
        rng = np.random.default_rng(n)
        prob = uniform_problem(gen_sk7(n, n), eta=0.1)
        for _ in range(20):
            f = np.zeros((n, n - 1))
            for k in range(1, n):
                f[:, k - 1] = design.expand_column(rng.normal(scale=0.1, size=n - k), n, k)
            fmat = design.ModulationMatrix(n=n, f=f)
            k = int(rng.integers(1, n))
            _, grad = design.column_objective_taylor2(prob, fmat, k)
            h = 1e-6
            fd = np.zeros(n - k)
            for m in range(n - k):
                for s, out in ((+1, 1.0), (-1, -1.0)):
                    x = f[: n - k, k - 1].copy()
                    x[m] += s * h
                    fp = f.copy()
                    fp[:, k - 1] = design.expand_column(x, n, k)
                    v, _ = design.column_objective_taylor2(prob, design.ModulationMatrix(n=n, f=fp), k)
                    fd[m] += out * v
            fd /= 2 * h
            scale = max(np.max(np.abs(fd)), 1e-12)
            worst = max(worst, float(np.max(np.abs(grad - fd)) / scale))
    elapsed = time.time() - t0
    report(
        capsys, 4, "analytic gradient vs finite differences", worst < 1e-5,
        f"max rel dev {worst:.2e}, {elapsed:.1f} s",
    )


def test_criterion_05_solver_scaling(capsys):
    sizes = (250, 500, 1000)
    means = []
    for n in sizes:
        times = []
        for seed in range(3):
            prob = uniform_problem(gen_sk7(n, seed), design.eta_prescription(n, "sk7"))
            t0 = time.time()
            design.solve_design(prob, design.SolveOptions(mode="SecondOrder", compute_error=False))
            times.append(time.time() - t0)
        means.append(float(np.mean(times)))
    slope = float(np.polyfit(np.log(sizes), np.log(means), 1)[0])
    ok = 2.3 <= slope <= 3.5 and means[-1] <= 600.0
    report(capsys, 5, "solver scaling", ok, f"slope {slope:.2f}, t(1000) = {means[-1]:.1f} s")


def test_criterion_06_quantum_pair_annealing(capsys):
    c, params, f, ground = antiferro_pair_setup()
    assert abs(params.lambda_c_tilde - 2.0) < 1e-12
    cfg = QuantumConfig(t_ramp_tilde=100.0, m=12, n_records=41)
    times = strobe_times(params, cfg.t_final, cfg.n_records)
    static = success_probability_quantum(run_static_quantum(cfg, params, c, record_times=times), ground)
    dynamical = success_probability_quantum(run_dynamical_quantum(cfg, params, f, record_times=times), ground)
    strobe_dev = float(np.max(np.abs(static.p - dynamical.p)))
    ok = static.p[-1] >= 0.95 and dynamical.p[-1] >= 0.95 and strobe_dev <= 0.05
    report(
        capsys, 6, "quantum N=2 annealing", ok,
        f"P_static {static.p[-1]:.4f}, P_dyn {dynamical.p[-1]:.4f}, strobe |dP| {strobe_dev:.4f}",
    )


def test_criterion_07_quantum_vacuum_probabilities(capsys):
    probs = all_configuration_probabilities(vacuum_state(2, 12), 2, 12)
    worst = max(abs(v - 0.25) for v in probs.values())
    report(capsys, 7, "vacuum configuration probabilities", worst < 1e-6, f"max dev {worst:.2e}")


def test_criterion_08_lossy_quantum_pairing(capsys):
    c, params, f, ground = antiferro_pair_setup()
    kappa = 0.1
    cfg = QuantumConfig(
        t_ramp_tilde=t_ramp(kappa), kappa_tilde=kappa, n_traj=20, m=12, n_records=9, seed=0
    )
    times = strobe_times(params, cfg.t_final, cfg.n_records)
    static = success_probability_quantum(run_static_quantum(cfg, params, c, record_times=times), ground)
    dynamical = success_probability_quantum(run_dynamical_quantum(cfg, params, f, record_times=times), ground)
    diff = abs(static.p[-1] - dynamical.p[-1])
    sem = float(np.hypot(static.sem[-1], dynamical.sem[-1]))
    ok = diff <= 0.1 + 2.0 * sem
    report(capsys, 8, "lossy quantum pairing", ok, f"|dP| {diff:.4f} vs 0.1 + 2 SEM = {0.1 + 2 * sem:.4f}")


def test_criterion_09_classical_static_vs_dynamical(capsys):
    p_s, p_d, sems = [], [], []
    for seed in range(20):
        c = gen_sk7(8, seed)
        params = prescribe(c, "sk7", Tolerances(a_factor=200.0))
        sol = design.solve_design(design_problem(c, params))
        ground = brute_force_ground_states(c)
        cfg = ClassicalConfig(n_traj=100, t_ramp_tilde=t_ramp(0.0), seed=seed)
        result = paired_run(c, params, sol.f, cfg, ground)
        p_s.append(result.static.p[-1])
        p_d.append(result.dynamical.p[-1])
        sems.append(np.hypot(result.static.sem[-1], result.dynamical.sem[-1]))
    corr = float(np.corrcoef(p_s, p_d)[0, 1])
    mean_dp = float(np.mean(np.abs(np.array(p_s) - np.array(p_d))))
    bound = 0.05 + 2.0 * float(np.mean(sems))
    ok = corr >= 0.9 and mean_dp <= bound

    c = gen_sk7(10, 0)
    params = prescribe(c, "sk7", Tolerances(a_factor=200.0))
    sol = design.solve_design(design_problem(c, params))
    ground = brute_force_ground_states(c)
    cfg = ClassicalConfig(n_traj=1000, t_ramp_tilde=t_ramp(0.0), seed=0)
    result = paired_run(c, params, sol.f, cfg, ground)
    dp10 = abs(result.static.p[-1] - result.dynamical.p[-1])
    ok = ok and dp10 <= 0.05
    report(
        capsys, 9, "classical static vs dynamical", ok,
        f"pearson {corr:.3f}, mean |dP| {mean_dp:.4f} <= {bound:.4f}, N=10 |dP| {dp10:.4f}",
    )


def test_criterion_10_scaling_endpoint(capsys):
    point = chi_max(1000, "sk7", HardwareLimits(g_max=2 * np.pi * 20e6, delta_max=2 * np.pi * 5e9))
    t_us = point.t_cav_min * 1e6
    report(
        capsys, 10, "scaling endpoint", 70.0 <= t_us <= 200.0,
        f"T_cav {t_us:.1f} us, chi/2pi {point.chi_max / (2 * np.pi) / 1e3:.2f} kHz",
    )


def test_criterion_11_lambda_c_sweep(capsys):
    details = []
    ok = True
    for n in (8, 16):
        base = 4.0 / n
        success = {}
        for factor in (1.0, 10.0, 0.1):
            vals = []
            for seed in range(10):
                c = gen_sk7(n, seed)
                params = prescribe(c, "sk7", Tolerances(a_factor=200.0), lambda_c_override=factor * base)
                ground = brute_force_ground_states(c)
                cfg = ClassicalConfig(n_traj=50, t_ramp_tilde=t_ramp(0.0), seed=seed)
                traj = integrate_static(cfg, params, c)
                vals.append(success_probability(traj, ground).p[-1])
            success[factor] = float(np.mean(vals))
        ok = ok and success[1.0] > success[10.0] and success[1.0] > success[0.1]
        details.append(f"N={n}: 1x {success[1.0]:.3f}, 10x {success[10.0]:.3f}, 0.1x {success[0.1]:.3f}")
    report(capsys, 11, "lambda_C sweep", ok, "; ".join(details))
