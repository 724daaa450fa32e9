"""Compile torus Hamiltonian flows into finite compositions of shear maps."""

from .trigpoly import (PeriodizedResult, PhasePoint, TrigPoly, periodize,
                       project_from_samples)
from .shears import (HORIZONTAL, VERTICAL, Shear, ShearWord, symplectic_form,
                     symplecticity_residual)
from .decompose import (BracketTerm, Decomposition, choose_sigma_j, decompose,
                        sin_triple_term)
from .reference import (ConvergenceFit, FlowSpec, TimePolyHamiltonian,
                        default_grid, fit_convergence, integrate,
                        integrate_grid, lipschitz_estimate,
                        low_discrepancy_grid, phase_grid, sup_error,
                        torus_distance)
from .schemes import (DEFAULT_WORD_CAP, BudgetResult, ErrorBudget,
                      SchemeParams, apriori_steps, commutator_bracket_flow,
                      double_bracket_flow, empirical_budget, shear_flow,
                      time_sliced_flow, trotter_sum_flow)
from .pipeline import (CompileReport, ProblemFile, autonomous_word,
                       compile_problem, compile_word, ladder_csv,
                       params_for_level, preset_problem, run_ladder,
                       verify_word)

__version__ = "0.1.0"

__all__ = [
    "TrigPoly", "PhasePoint", "PeriodizedResult", "periodize",
    "project_from_samples",
    "Shear", "ShearWord", "HORIZONTAL", "VERTICAL", "symplectic_form",
    "symplecticity_residual",
    "BracketTerm", "Decomposition", "choose_sigma_j", "decompose",
    "sin_triple_term",
    "FlowSpec", "TimePolyHamiltonian", "ConvergenceFit", "integrate",
    "integrate_grid", "sup_error", "torus_distance", "fit_convergence",
    "lipschitz_estimate", "phase_grid", "low_discrepancy_grid", "default_grid",
    "shear_flow", "trotter_sum_flow", "commutator_bracket_flow",
    "double_bracket_flow", "time_sliced_flow", "SchemeParams", "ErrorBudget",
    "BudgetResult", "apriori_steps", "empirical_budget", "DEFAULT_WORD_CAP",
    "ProblemFile", "CompileReport", "preset_problem", "compile_problem",
    "compile_word", "autonomous_word", "verify_word", "run_ladder",
    "ladder_csv", "params_for_level",
    "__version__",
]
