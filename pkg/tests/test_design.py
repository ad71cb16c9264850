import numpy as np
import pytest
from scipy.special import jv

from floqkpo.design import (
    DesignProblem,
    ModulationMatrix,
    NativeCouplingMatrix,
    SolveOptions,
    column_objective_full,
    column_objective_taylor2,
    coupling_error,
    effective_couplings,
    eta_bound,
    eta_prescription,
    expand_column,
    first_order_residual,
    first_order_solution,
    floquet_integral,
    mean_f1k_magnitude,
    modulation_depth,
    second_order_residual,
    solve_design,
)
from floqkpo.problems import CUBIC_MAXCUT, DENSE_MAXCUT, SK7, CouplingMatrix, gen_sk7, generate


def uniform_problem(c: CouplingMatrix, eta: float, lambda_c: float = 1.0) -> DesignProblem:
    j = NativeCouplingMatrix.uniform(c.n, lambda_c / eta)
    return DesignProblem(c=c, lambda_c=lambda_c, j=j)


def pair_problem(eta=0.1):
    c = CouplingMatrix(n=2, entries=np.array([[0.0, 1.0], [1.0, 0.0]]))
    return uniform_problem(c, eta)


def test_floquet_integral_zero_modulation():
    f = ModulationMatrix.zeros(4)
    j = NativeCouplingMatrix.uniform(4, 1.0)
    for i, jx in [(1, 0), (3, 1), (2, 0)]:
        assert abs(floquet_integral(j, f, i, jx)) < 1e-12


@pytest.mark.parametrize("m", [0.1, 0.2, 0.5, 1.0])
def test_floquet_integral_bessel_oracle(m):
    # single-harmonic differential modulation m on harmonic (i-j) -> -J1(m)
    n = 5
    j = NativeCouplingMatrix.uniform(n, 1.0)
    for i, jx in [(1, 0), (3, 1), (4, 0)]:
        f = np.zeros((n, n - 1))
        f[i, i - jx - 1] = m
        val = floquet_integral(j, ModulationMatrix(n=n, f=f), i, jx, samples=512)
        assert abs(val - (-jv(1, m))) < 1e-9


def test_floquet_integral_quadrature_convergence():
    prob = uniform_problem(gen_sk7(8, 0), eta=0.1)
    f = first_order_solution(prob)
    base = 16 * 8 * 4
    a = floquet_integral(prob.j, f, 5, 2, samples=base)
    b = floquet_integral(prob.j, f, 5, 2, samples=base * 2)
    assert abs(a - b) < 1e-12


def test_effective_couplings_zero_modulation():
    prob = uniform_problem(gen_sk7(5, 1), eta=0.1)
    c_eff = effective_couplings(prob, ModulationMatrix.zeros(5))
    assert np.max(np.abs(c_eff)) < 1e-12


def test_effective_couplings_matches_scalar_integral():
    prob = uniform_problem(gen_sk7(6, 2), eta=0.1)
    f = first_order_solution(prob)
    c_eff = effective_couplings(prob, f, samples=512)
    for i in range(6):
        for j in range(i):
            scalar = floquet_integral(prob.j, f, i, j, samples=512) / prob.lambda_c
            assert abs(c_eff[i, j] - scalar) < 1e-12
    assert np.max(np.abs(c_eff - c_eff.T)) < 1e-14


def test_effective_couplings_small_modulation_limit():
    # The first-order design error is linear in eta (quadratic integral terms
    # divided by lambda_C = eta * J): small at small eta and ~halving with eta.
    c = gen_sk7(4, 3)
    errs = {}
    for eta in (0.01, 0.005):
        prob = uniform_problem(c, eta)
        f = first_order_solution(prob)
        errs[eta] = coupling_error(effective_couplings(prob, f), prob.c)
    assert errs[0.01] < 3e-2
    assert 1.7 < errs[0.01] / errs[0.005] < 2.3


def test_coupling_error_basics():
    c = gen_sk7(4, 4)
    assert coupling_error(c.entries.copy(), c) == 0.0
    perturbed = c.entries.copy()
    perturbed[0, 1] += 1e-3
    perturbed[1, 0] += 1e-3
    assert abs(coupling_error(perturbed, c) - 1e-3) < 1e-15


def test_first_order_two_spins():
    f = first_order_solution(pair_problem(eta=0.1))
    assert np.allclose(f.f[:, 0], [0.1, -0.1], atol=1e-15)


def test_first_order_residual_suite():
    for seed in range(5):
        for n in (4, 8, 16):
            for eta in (0.01, 0.1, 0.3):
                prob = uniform_problem(gen_sk7(n, seed), eta)
                res = first_order_residual(prob, first_order_solution(prob))
                assert np.max(np.abs(res)) < 1e-12


def test_first_order_symmetric_structure():
    prob = uniform_problem(gen_sk7(9, 5), eta=0.1)
    f = first_order_solution(prob).f
    n = 9
    for k in range(1, n):
        col = f[:, k - 1]
        assert np.allclose(col, expand_column(col[: n - k], n, k))


def test_second_order_residual_scaling():
    # first-order F leaves an O(eta^2) residual: halving eta quarters it
    c = gen_sk7(6, 6)
    res = {}
    for eta in (0.2, 0.1):
        prob = uniform_problem(c, eta)
        f = first_order_solution(prob)
        res[eta] = max(abs(second_order_residual(prob, f, i, j)) for i in range(6) for j in range(i))
    ratio = res[0.2] / res[0.1]
    assert 3.0 < ratio < 5.0


def test_second_order_residual_matches_full_integral():
    # agreement with the quadrature integral to O(zeta^3)
    for seed in range(3):
        prob = uniform_problem(gen_sk7(6, seed), eta=0.02)
        f = first_order_solution(prob)
        zeta = modulation_depth(f)
        assert zeta <= 0.2
        for i in range(6):
            for j in range(i):
                full = (prob.lambda_c * prob.c.entries[i, j] - floquet_integral(prob.j, f, i, j, samples=1024)) / prob.j.entries[i, j]
                taylor = second_order_residual(prob, f, i, j)
                assert abs(full - taylor) < zeta**3


def test_column_objective_full_matches_direct_slice():
    # equals the k-diagonal slice of the unrestricted least-squares objective
    prob = uniform_problem(gen_sk7(6, 7), eta=0.15)
    f = first_order_solution(prob)
    targets = prob.target_ratios()
    for k in range(1, 6):
        direct = 0.0
        for j in range(6 - k):
            i = j + k
            direct += (targets[i, j] - floquet_integral(prob.j, f, i, j, samples=256) / prob.j.entries[i, j]) ** 2
        assert abs(column_objective_full(prob, f, k, samples=256) - direct) < 1e-12


def test_column_objective_taylor2_nonnegative_and_zero():
    prob = uniform_problem(gen_sk7(8, 8), eta=0.1)
    f = first_order_solution(prob)
    for k in range(1, 8):
        value, grad = column_objective_taylor2(prob, f, k)
        assert value >= 0.0
        assert grad.shape == (8 - k,)


@pytest.mark.parametrize("n", [4, 8, 16])
def test_taylor2_gradient_vs_finite_differences(n):
    rng = np.random.default_rng(n)
    prob = uniform_problem(gen_sk7(n, n), eta=0.1)
    for _ in range(20):
        f = np.zeros((n, n - 1))
        for k in range(1, n):
            f[:, k - 1] = expand_column(rng.normal(scale=0.1, size=n - k), n, k)
        fmat = ModulationMatrix(n=n, f=f)
        k = int(rng.integers(1, n))
        value, grad = column_objective_taylor2(prob, fmat, k)
        h = 1e-6
        fd = np.zeros(n - k)
        for m in range(n - k):
            for s, out in ((+1, 1.0), (-1, -1.0)):
                x = f[: n - k, k - 1].copy()
                x[m] += s * h
                fp = f.copy()
                fp[:, k - 1] = expand_column(x, n, k)
                v, _ = column_objective_taylor2(prob, ModulationMatrix(n=n, f=fp), k)
                fd[m] += out * v
        fd /= 2 * h
        scale = max(np.max(np.abs(fd)), 1e-12)
        assert np.max(np.abs(grad - fd)) / scale < 1e-5


def test_solve_design_pair():
    # column tolerance (1e-3 eta)^2 (N-k) corresponds to ~1e-3 in C units
    prob = pair_problem(eta=0.05)
    sol = solve_design(prob)
    assert sol.error < 2e-3
    assert sol.method_tag in ("FullOrder", "FirstOrder")


def test_solve_design_small_sk7():
    prob = uniform_problem(gen_sk7(4, 9), eta=0.2)
    sol = solve_design(prob)
    assert sol.error <= 0.03


def test_solve_design_never_worse_than_first_order():
    for seed in range(4):
        prob = uniform_problem(gen_sk7(8, seed), eta=0.3)
        f0 = first_order_solution(prob)
        e0 = coupling_error(effective_couplings(prob, f0), prob.c)
        sol = solve_design(prob)
        assert sol.error <= e0 + 1e-12


def test_solve_design_second_order_mode():
    prob = uniform_problem(gen_sk7(12, 1), eta=0.05)
    sol = solve_design(prob, SolveOptions(mode="SecondOrder"))
    f0 = first_order_solution(prob)
    e0 = coupling_error(effective_couplings(prob, f0), prob.c)
    assert sol.error <= e0 + 1e-12


def test_eta_prescription_values():
    assert np.isclose(eta_prescription(8, SK7), 0.1)
    assert np.isclose(eta_prescription(1000, SK7), 8e-4)
    assert np.isclose(eta_prescription(8, CUBIC_MAXCUT), 0.12 / (1 + np.log(8)))
    assert np.isclose(eta_prescription(8, DENSE_MAXCUT), 1.2 / (8 * (1 + np.log(8))))


def test_eta_bound_values():
    assert np.isclose(eta_bound(10, SK7, 2.0), 0.1)
    assert np.isclose(eta_bound(8, CUBIC_MAXCUT, 1.0), 1.0 / (6 * (1 + np.log(8))))
    assert eta_bound(20, DENSE_MAXCUT, 1.0) < eta_bound(10, DENSE_MAXCUT, 1.0)


def test_mean_f1k_magnitude_values():
    assert np.isclose(mean_f1k_magnitude(101, 1, SK7, 0.01), 0.05)
    assert np.isclose(mean_f1k_magnitude(101, 2, DENSE_MAXCUT, 0.01), 0.25)
    assert mean_f1k_magnitude(8, 2, CUBIC_MAXCUT, 0.1) == pytest.approx(3 * 0.1 * 7 / 8 / 2)


def test_mean_f1k_magnitude_empirical_sk7():
    n, eta = 16, 0.05
    samples = {k: [] for k in (1, 5, 10)}
    for seed in range(300):
        prob = uniform_problem(gen_sk7(n, seed), eta)
        f = first_order_solution(prob)
        for k in samples:
            samples[k].append(abs(f.f[0, k - 1]))
    for k, vals in samples.items():
        formula = mean_f1k_magnitude(n, k, SK7, eta)
        assert abs(np.mean(vals) - formula) / formula < 0.15


def test_error_decreases_with_eta():
    means = []
    for eta in (0.3, 0.03):
        errs = []
        for seed in range(10):
            prob = uniform_problem(gen_sk7(6, seed), eta)
            sol = solve_design(prob)
            errs.append(sol.error)
        means.append(np.mean(errs))
    assert means[1] < means[0]
