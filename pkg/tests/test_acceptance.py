"""Acceptance gate: one pass/fail line per criterion.

Run with -s (or read the captured output) to see the lines.  Each criterion
is a separate test at its stated tolerance; shared ladders are computed once
and cached at module scope.
"""

import functools
import math

import numpy as np

from shearflow import (FlowSpec, TrigPoly, commutator_bracket_flow,
                       compile_problem, decompose, double_bracket_flow,
                       fit_convergence, integrate_grid, lipschitz_estimate,
                       phase_grid, preset_problem, run_ladder, shear_flow,
                       sup_error, symplecticity_residual, trotter_sum_flow)
from shearflow.pipeline import TROTTER_LADDER_TIME
from conftest import fd_bracket, random_poly


def report(name, ok, detail):
    print(f"\n[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


GRID = phase_grid(1, 64)


@functools.lru_cache(maxsize=None)
def trotter_ladder():
    problem = preset_problem("two_term")
    steps = [8, 16, 32, 64, 128, 256, 512]
    rows, fit = run_ladder(problem, "trotter", steps, grid=GRID)
    return rows, fit


def test_criterion_1_symplecticity():
    """100 compiled words (length up to 1e4), 50 points, residual < 1e-8."""
    rng = np.random.default_rng(1)
    worst = 0.0
    longest = 0
    for i in range(100):
        # amplitudes in the range the decomposer emits (<= 1/(2 pi A))
        amp = rng.uniform(0.1, 0.5)
        v = TrigPoly.harmonic(1, [int(rng.integers(1, 3))], [0], amp)
        tau = TrigPoly.harmonic(1, [0], [int(rng.integers(1, 3))], amp,
                                rng.uniform(0, 2 * np.pi))
        kind = i % 3
        if kind == 0:
            M = int(2 ** rng.uniform(0, 11.3))  # lengths up to ~1e4
            word = commutator_bracket_flow(v, tau, 0.001, M)
        elif kind == 1:
            N = int(2 ** rng.uniform(0, 11.3))
            word = trotter_sum_flow([lambda s: shear_flow(v, s),
                                     lambda s: shear_flow(tau, s)], 0.05, N)
        else:
            term = decompose(TrigPoly.harmonic(1, [0], [1], amp)).terms[i % 4]
            Mo = int(2 ** rng.uniform(0, 8.3))
            word = double_bracket_flow(term, 0.001, Mo, 2)
        longest = max(longest, len(word))
        Q = rng.random((50, 1))
        P = rng.random((50, 1))
        worst = max(worst, symplecticity_residual(word, Q, P))
    report("criterion 1 (symplecticity)", worst < 1e-8,
           f"max residual {worst:.3e} over 100 words "
           f"(longest {longest}), tolerance 1e-8")


def test_criterion_2_decomposition_reconstruction():
    """50 random polynomials reconstruct to coefficient distance < 1e-9."""
    rng = np.random.default_rng(2)
    worst = 0.0
    for i in range(50):
        dim = 1 if i % 2 == 0 else 2
        H = random_poly(rng, dim, degree=3, n_modes=5)
        worst = max(worst, decompose(H).reconstruct().coeff_distance(H))
    report("criterion 2 (bracket reconstruction)", worst < 1e-9,
           f"max coefficient distance {worst:.3e} over 50 polys, "
           f"tolerance 1e-9")


def test_criterion_3_trotter_rate():
    """Trotter ladder slope in [-1.3, -0.85] with r^2 >= 0.98."""
    _, fit = trotter_ladder()
    ok = -1.3 <= fit.slope <= -0.85 and fit.r2 >= 0.98
    report("criterion 3 (splitting rate)", ok,
           f"slope {fit.slope:.3f} (want [-1.3, -0.85]), r2 {fit.r2:.4f}")


def test_criterion_4_commutator_rate():
    """Commutator ladder slope <= -0.45, errors monotone within 10%."""
    problem = preset_problem("two_term")
    steps = [16, 32, 64, 128, 256, 512, 1024, 2048, 4096]
    rows, fit = run_ladder(problem, "commutator", steps, grid=GRID)
    errs = [e for _, e, _, _ in rows]
    monotone = all(errs[i + 1] <= 1.1 * errs[i] for i in range(len(errs) - 1))
    ok = fit.slope <= -0.45 and monotone
    report("criterion 4 (commutator rate)", ok,
           f"slope {fit.slope:.3f} (want <= -0.45), monotone(10%)={monotone}")


def test_criterion_5_slicing_rate():
    """Time-slicing ladder slope <= -0.85."""
    problem = preset_problem("interp")
    rows, fit = run_ladder(problem, "slicing", [4, 8, 16, 32, 64, 128, 256],
                           grid=GRID)
    report("criterion 5 (time-slicing rate)", fit.slope <= -0.85,
           f"slope {fit.slope:.3f} (want <= -0.85) over N in [4, 256]")


def test_criterion_6_end_to_end():
    """Compile cos(2 pi p) to error <= 1e-2 under the 1e6-shear cap with a
    monotone budget ladder.

    The pinned first-order nested-commutator construction has a measured
    error constant of roughly 2.5e2 for this Hamiltonian, so the ladder's
    sup error stays near saturation for every budget the cap admits; the
    criterion is implemented faithfully and reported as measured.
    """
    problem = preset_problem("cos_p")
    word, rep = compile_problem(problem, grid=GRID, max_levels=6)
    errs = [e for _, e, _ in rep.budget_ladder]
    monotone = all(errs[i + 1] <= errs[i] for i in range(len(errs) - 1))
    ok = rep.measured_error <= 1e-2 and monotone
    report("criterion 6 (end-to-end compile)", ok,
           f"best error {rep.measured_error:.3e} (want <= 1e-2) at length "
           f"{rep.word_length}, ladder {['%.3f' % e for e in errs]}, "
           f"monotone={monotone}")


def test_criterion_7_discretization_budget():
    """Measured total error <= exp(L') * N * per-step error on the ladder.

    L' is the Lipschitz estimate of the unit-interval rescaled problem,
    i.e. flow time times the sup of the vector-field Jacobian norm.
    """
    problem = preset_problem("two_term")
    t = TROTTER_LADDER_TIME
    L = t * lipschitz_estimate(FlowSpec(problem.autonomous, 0.0, t), GRID)
    amplification = math.exp(L)
    rows, _ = trotter_ladder()
    from shearflow.pipeline import _split_separable
    from shearflow import trotter_sum_flow
    Hq, Hp = _split_separable(problem.autonomous)
    fac = [lambda s: shear_flow(Hq, s), lambda s: shear_flow(Hp, s)]
    violations = []
    for N, total, _, _ in rows:
        step_word = trotter_sum_flow(fac, t / N, 1)
        e_step = sup_error(step_word, FlowSpec(problem.autonomous, 0.0, t / N),
                           GRID)
        budget = amplification * N * e_step
        if total > budget:
            violations.append((N, total, budget))
    report("criterion 7 (discretization budget)", not violations,
           f"exp(L')={amplification:.2f}; all {len(rows)} ladder points "
           f"within budget" if not violations else
           f"violations {violations}")


def test_criterion_8_oracle_agreement():
    """Bracket vs finite differences < 1e-5; integrator vs exact shear
    < 10x integrator tolerance."""
    rng = np.random.default_rng(8)
    Q = rng.random((200, 1))
    P = rng.random((200, 1))
    worst_fd = 0.0
    for _ in range(50):
        f = random_poly(rng, 1, degree=2, n_modes=3)
        g = random_poly(rng, 1, degree=2, n_modes=3)
        diff = f.poisson(g).evaluate_grid(Q, P) - fd_bracket(f, g, Q, P)
        worst_fd = max(worst_fd, float(np.max(np.abs(diff))))

    tol = 1e-11
    H = TrigPoly.harmonic(1, [1], [0], 0.8, 0.3)
    e_int = sup_error(shear_flow(H, 1.0), FlowSpec(H, 0.0, 1.0, tol),
                      phase_grid(1, 32))
    ok = worst_fd < 1e-5 and e_int < 10 * tol
    report("criterion 8 (oracle agreement)", ok,
           f"bracket-vs-FD {worst_fd:.3e} (want < 1e-5); "
           f"integrator-vs-exact-shear {e_int:.3e} (want < {10 * tol:.0e})")
