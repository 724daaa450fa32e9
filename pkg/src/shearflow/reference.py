"""Ground-truth Hamiltonian flow integration and error metrology.

The reference integrator is a non-symplectic adaptive Runge-Kutta pair
(DOP853) run at tight tolerance: over a single time unit, trajectory accuracy
beats structure preservation.  Errors between a shear word and the reference
flow are measured as the max over a fixed grid of the per-point torus
distance.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.stats import qmc

from .shears import ShearWord
from .trigpoly import PhasePoint, TrigPoly

DEFAULT_TOL = 1e-11
ERROR_FLOOR = 1e-13


class TimePolyHamiltonian:
    """Time-dependent Hamiltonian H_t = sum_d poly_d * t^d."""

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms):
        self.dim = dim
        self.terms = tuple((poly, int(power)) for poly, power in terms)
        for poly, _ in self.terms:
            if poly.dim != dim:
                raise ValueError("dimension mismatch in time-polynomial family")

    def at(self, t: float) -> TrigPoly:
        out = TrigPoly.zero(self.dim)
        for poly, power in self.terms:
            out = out + poly * (t ** power)
        return out

    def to_dict(self) -> dict:
        return {"dim": self.dim,
                "terms": [{"poly": poly.to_dict(), "power": power}
                          for poly, power in self.terms]}

    @classmethod
    def from_dict(cls, d: dict) -> "TimePolyHamiltonian":
        return cls(int(d["dim"]),
                   [(TrigPoly.from_dict(t["poly"]), t["power"])
                    for t in d["terms"]])


@dataclass
class FlowSpec:
    """An integration problem: Hamiltonian, time interval, local tolerance."""

    H: object  # TrigPoly or TimePolyHamiltonian
    t0: float = 0.0
    t1: float = 1.0
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if self.t0 > self.t1:
            raise ValueError("t0 must not exceed t1")
        if self.tol <= 0:
            raise ValueError("tol must be positive")

    @property
    def dim(self) -> int:
        return self.H.dim

    def hamiltonian_at(self, t: float) -> TrigPoly:
        if isinstance(self.H, TimePolyHamiltonian):
            return self.H.at(t)
        return self.H

    def _field_terms(self):
        if isinstance(self.H, TimePolyHamiltonian):
            return self.H.terms
        return ((self.H, 0),)


def integrate(spec: FlowSpec, x0: PhasePoint) -> PhasePoint:
    """Solve dq/dt = dH/dp, dp/dt = -dH/dq from t0 to t1 for one point."""
    Q, P = integrate_grid(spec, x0.q[None, :], x0.p[None, :])
    return PhasePoint(Q[0], P[0])


def integrate_grid(spec: FlowSpec, Q: np.ndarray, P: np.ndarray):
    """Vectorized reference flow over a batch of initial points."""
    n = spec.dim
    Q = np.asarray(Q, dtype=float)
    P = np.asarray(P, dtype=float)
    npts = Q.shape[0]
    terms = spec._field_terms()

    def rhs(t, y):
        q = y[: npts * n].reshape(npts, n)
        p = y[npts * n:].reshape(npts, n)
        dq = np.zeros_like(q)
        dp = np.zeros_like(p)
        for poly, power in terms:
            s = t ** power if power else 1.0
            dq += s * poly.grad_p_grid(q, p)
            dp -= s * poly.grad_q_grid(q, p)
        return np.concatenate([dq.ravel(), dp.ravel()])

    y0 = np.concatenate([Q.ravel(), P.ravel()])
    sol = solve_ivp(rhs, (spec.t0, spec.t1), y0, method="DOP853",
                    rtol=spec.tol, atol=spec.tol, dense_output=False)
    if not sol.success:
        raise RuntimeError(f"reference integration failed: {sol.message}")
    y1 = sol.y[:, -1]
    return (y1[: npts * n].reshape(npts, n) % 1.0,
            y1[npts * n:].reshape(npts, n) % 1.0)


# -- grids ------------------------------------------------------------------

def phase_grid(dim: int, points_per_axis: int = 64):
    """Uniform product grid on T^n x T^n, returned as (Q, P) point lists."""
    G = points_per_axis
    axes = np.meshgrid(*[np.arange(G) / G] * (2 * dim), indexing="ij")
    pts = np.stack([a.ravel() for a in axes], axis=1)
    return pts[:, :dim], pts[:, dim:]

def low_discrepancy_grid(dim: int, count: int = 4096):
    """Deterministic low-discrepancy point set on T^n x T^n."""
    sampler = qmc.Halton(d=2 * dim, scramble=False)
    pts = sampler.random(count)
    return pts[:, :dim], pts[:, dim:]


def default_grid(dim: int):
    """64 points per axis for n=1; low-discrepancy cloud for n>=2."""
    if dim == 1:
        return phase_grid(1, 64)
    return low_discrepancy_grid(dim, 20 ** 4 if dim == 2 else 4096)


def torus_distance(Qa, Pa, Qb, Pb) -> np.ndarray:
    """Per-point Euclidean norm of component-wise circular distances."""
    d = np.concatenate([Qa - Qb, Pa - Pb], axis=1)
    d = np.abs(d) % 1.0
    d = np.minimum(d, 1.0 - d)
    return np.sqrt(np.sum(d * d, axis=1))


def sup_error(word: ShearWord, spec: FlowSpec, grid=None,
              reference=None) -> float:
    """Max torus distance between the word and the reference flow on a grid.

    ``reference`` may carry a precomputed (Q1, P1) reference image of the
    grid so that ladder sweeps integrate only once.
    """
    if word.dim != spec.dim:
        raise ValueError("dimension mismatch")
    Q, P = grid if grid is not None else default_grid(word.dim)
    Qr, Pr = reference if reference is not None else integrate_grid(spec, Q, P)
    Qw, Pw = word.apply_grid(Q, P)
    return float(np.max(torus_distance(Qw, Pw, Qr, Pr)))


# -- convergence fits -------------------------------------------------------

@dataclass
class ConvergenceFit:
    """Least-squares slope of log(error) against log(steps)."""

    ladder: list  # (steps, error) pairs actually used in the fit
    slope: float
    intercept: float
    r2: float
    excluded: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"slope": self.slope, "intercept": self.intercept,
                "r2": self.r2,
                "ladder": [[s, e] for s, e in self.ladder],
                "excluded": [[s, e] for s, e in self.excluded]}


def fit_convergence(ladder) -> ConvergenceFit:
    """OLS fit on (log steps, log error); near-floor points are excluded."""
    used, excluded = [], []
    for steps, err in ladder:
        if err > ERROR_FLOOR:
            used.append((float(steps), float(err)))
        else:
            excluded.append((float(steps), float(err)))
    if len(used) < 4:
        raise ValueError("need at least 4 ladder points above the error floor")
    x = np.log(np.array([s for s, _ in used]))
    y = np.log(np.array([e for _, e in used]))
    slope, intercept = np.polyfit(x, y, 1)
    yhat = slope * x + intercept
    ss_res = float(np.sum((y - yhat) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return ConvergenceFit(used, float(slope), float(intercept), r2, excluded)


def lipschitz_estimate(spec: FlowSpec, grid=None, time_samples: int = 5) -> float:
    """Measured sup over the grid of the vector-field Jacobian spectral norm."""
    n = spec.dim
    Q, P = grid if grid is not None else default_grid(n)
    if isinstance(spec.H, TimePolyHamiltonian):
        times = np.linspace(spec.t0, spec.t1, time_samples)
    else:
        times = [spec.t0]
    worst = 0.0
    for t in times:
        H = spec.hamiltonian_at(float(t))
        # DX = [[H_pq, H_pp], [-H_qq, -H_qp]] in (q, p) block order
        Hqq = H.hess_q_grid(Q, P)
        Hpp = H.hess_p_grid(Q, P)
        Hqp = _cross_hessian(H, Q, P)
        DX = np.zeros((Q.shape[0], 2 * n, 2 * n))
        DX[:, :n, :n] = np.swapaxes(Hqp, 1, 2)
        DX[:, :n, n:] = Hpp
        DX[:, n:, :n] = -Hqq
        DX[:, n:, n:] = -Hqp
        worst = max(worst, float(np.max(np.linalg.norm(DX, ord=2, axis=(1, 2)))))
    return worst


def _cross_hessian(H: TrigPoly, Q, P) -> np.ndarray:
    """Mixed second derivatives d^2 H / (dq_a dp_b), shape (npts, n, n)."""
    n = H.dim
    M, K, C = H._get_arrays()
    if len(C) == 0:
        return np.zeros((np.shape(Q)[0], n, n))
    E = np.exp(2j * math.pi * (Q @ M.T + P @ K.T))
    T = (-(2.0 * math.pi) ** 2) * C[:, None, None] * M[:, :, None] * K[:, None, :]
    return np.einsum("xm,mab->xab", E, T).real
