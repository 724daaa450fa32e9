"""Splitting schemes: compile flows of sums and brackets into shear words.

The two constructive ingredients are first-order Lie-Trotter splitting for
sums and the group-commutator word

    phi_{H1}^{-s} o phi_{H2}^{-s} o phi_{H1}^{s} o phi_{H2}^{s}
    = id + s^2 * X_{{H1,H2}} + O(s^3)

for Poisson brackets, repeated M times with s = sqrt(t/M).  Negative flow
times are realized by exact word inversion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .decompose import BracketTerm
from .shears import HORIZONTAL, VERTICAL, Shear, ShearWord
from .trigpoly import TrigPoly

# Word-length cap: keeps desk-scale compiles under minutes.
DEFAULT_WORD_CAP = 10 ** 6


def shear_flow(g: TrigPoly, t: float) -> ShearWord:
    """Exact time-t flow of a generator depending on only one variable kind."""
    if g.is_constant() or t == 0.0:
        return ShearWord(g.dim)
    if g.is_p_only():
        kind = HORIZONTAL
    elif g.is_q_only():
        kind = VERTICAL
    else:
        raise ValueError("generator mixes q and p modes; not a shear flow")
    return ShearWord(g.dim, [Shear(kind, g * t)])


def trotter_sum_flow(factories, t: float, N: int, merge: bool = True) -> ShearWord:
    """First-order sequential splitting of a sum of Hamiltonians.

    Each factory maps a time s to a word approximating the time-s flow of its
    Hamiltonian; the result is the N-fold repetition of the time-t/N factor
    words (first factory applied first within each step).
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    factories = list(factories)
    if not factories:
        raise ValueError("need at least one flow factory")
    parts = [f(t / N) for f in factories]
    dim = parts[0].dim
    step_shears = []
    for w in parts:
        step_shears.extend(w.shears)
    word = ShearWord(dim, tuple(step_shears) * N)
    return word.merged() if merge else word


def commutator_bracket_flow(v: TrigPoly, tau: TrigPoly, t: float, M: int,
                            merge: bool = True) -> ShearWord:
    """Approximate the time-t flow of {v, tau} by M group-commutator steps.

    One step is the 4-shear word [H_tau(s), V_v(s), H_tau(-s), V_v(-s)]
    (application order) with s = sqrt(t/M); its orientation realizes the flow
    of +{v, tau} as computed by the coefficient-space bracket, which is pinned
    by a test against the reference integrator.
    """
    if M < 1:
        raise ValueError("M must be >= 1")
    if not v.is_q_only():
        raise ValueError("v must depend only on q")
    if not tau.is_p_only():
        raise ValueError("tau must depend only on p")
    if t < 0:
        return commutator_bracket_flow(v, tau, -t, M, merge=merge).inverse()
    if t == 0.0 or v.is_constant() or tau.is_constant():
        return ShearWord(v.dim)
    s = math.sqrt(t / M)
    step = (
        Shear(HORIZONTAL, tau * s),
        Shear(VERTICAL, v * s),
        Shear(HORIZONTAL, tau * (-s)),
        Shear(VERTICAL, v * (-s)),
    )
    word = ShearWord(v.dim, step * M)
    return word.merged() if merge else word


def double_bracket_flow(term: BracketTerm, t: float, M_outer: int,
                        M_inner: int, merge: bool = True) -> ShearWord:
    """Approximate the time-t flow of weight * {w, {v, tau}}.

    Outer group commutator of the exact w-shear with the inner commutator
    word for {v, tau}: M_outer repetitions at outer time s =
    sqrt(|weight * t| / M_outer), the inner flows at times +-s realized with
    M_inner steps each; a negative total time is absorbed by word inversion.
    """
    if M_outer < 1 or M_inner < 1:
        raise ValueError("step counts must be >= 1")
    T = term.weight * t
    dim = term.w.dim
    if T == 0.0 or term.w.is_constant():
        return ShearWord(dim)
    s = math.sqrt(abs(T) / M_outer)
    inner = commutator_bracket_flow(term.v, term.tau, s, M_inner, merge=merge)
    if len(inner) == 0:
        # {v, tau} = 0: the outer commutator cancels exactly
        return ShearWord(dim)
    inner_rev = inner.inverse()
    w_shear = Shear(VERTICAL, term.w * s)
    step = inner.shears + (w_shear,) + inner_rev.shears + (w_shear.inverse(),)
    word = ShearWord(dim, step * M_outer)
    if T < 0:
        word = word.inverse()
    return word.merged() if merge else word


def time_sliced_flow(H_family, autonomous_compiler, N_slices: int,
                     merge: bool = True) -> ShearWord:
    """Freeze a time-dependent Hamiltonian on N slices and compile each.

    Concatenates autonomous_compiler(H at j/N, 1/N) for j = 0..N-1, the j=0
    slice applied first.
    """
    if N_slices < 1:
        raise ValueError("N_slices must be >= 1")
    shears = []
    dim = H_family.dim
    for j in range(N_slices):
        w = autonomous_compiler(H_family.at(j / N_slices), 1.0 / N_slices)
        shears.extend(w.shears)
    word = ShearWord(dim, shears)
    return word.merged() if merge else word


# -- error budgeting --------------------------------------------------------

@dataclass
class SchemeParams:
    """Step counts for the pipeline stages plus the Lipschitz bound in use."""

    N_sum: int = 1
    N_comm_outer: int = 1
    N_comm_inner: int = 1
    N_slices: int = 1
    L_bound: float = 0.0

    def __post_init__(self):
        for name in ("N_sum", "N_comm_outer", "N_comm_inner", "N_slices"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")

    def to_dict(self) -> dict:
        return {"N_sum": self.N_sum, "N_comm_outer": self.N_comm_outer,
                "N_comm_inner": self.N_comm_inner, "N_slices": self.N_slices,
                "L_bound": self.L_bound}


@dataclass
class ErrorBudget:
    """Per-step allotment and its Gronwall-amplified total."""

    eps_N: float
    predicted_total: float
    measured_total: float | None = None

    @classmethod
    def from_eps(cls, eps_N: float, L_bound: float) -> "ErrorBudget":
        return cls(eps_N=eps_N, predicted_total=math.exp(L_bound) * eps_N)

    def to_dict(self) -> dict:
        return {"eps_N": self.eps_N, "predicted_total": self.predicted_total,
                "measured_total": self.measured_total}


def apriori_steps(eps_target: float, L_bound: float, rate: float = 1.0,
                  probe=None, N_probe: int = 16) -> int:
    """Smallest N with exp(L) * c / N^rate <= eps_target.

    The constant c is calibrated from a probe run at N_probe (the probe maps
    a step count to a measured per-unit error); without a probe c = 1.
    """
    if eps_target <= 0:
        raise ValueError("eps_target must be positive")
    if math.isinf(eps_target):
        return 1
    c = probe(N_probe) * N_probe ** rate if probe is not None else 1.0
    if c <= 0:
        return 1
    return max(1, math.ceil((math.exp(L_bound) * c / eps_target) ** (1.0 / rate)))


@dataclass
class BudgetResult:
    """Outcome of an empirical doubling ladder."""

    level: int
    error: float
    word_length: int
    met: bool
    history: list  # (level, error, word_length)


def empirical_budget(measure, eps_target: float,
                     length_cap: int = DEFAULT_WORD_CAP,
                     max_levels: int = 12) -> BudgetResult:
    """Double the budget level until the target is met or a cap is hit.

    ``measure(level)`` returns (error, word_length).  If the cap stops the
    ladder the best achieved result is returned with met=False.
    """
    history = []
    best = None
    for level in range(max_levels):
        err, length = measure(level)
        history.append((level, err, length))
        if best is None or err < best[1]:
            best = (level, err, length)
        if err <= eps_target:
            return BudgetResult(level, err, length, True, history)
        if length >= length_cap:
            break
    level, err, length = best
    return BudgetResult(level, err, length, False, history)
