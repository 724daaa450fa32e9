"""Exact algebra of real trigonometric polynomials on the 2n-torus.

A polynomial is stored as a finite set of integer modes (m, k) with complex
amplitudes c, representing

    f(q, p) = sum over modes of Re(c * exp(2*pi*i*(<m,q> + <k,p>)))

Modes are kept in a sign-normalized canonical form: of the pair
{(m, k), (-m, -k)} only the representative whose first nonzero component is
positive is stored (the zero mode holds a real constant).  This makes reality
structural and lets antisymmetry-type identities hold coefficient-wise.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from math import comb
from typing import Callable, Iterable

import numpy as np

TWO_PI = 2.0 * math.pi

# Relative amplitude below which a mode is considered an exact cancellation.
PRUNE_REL_TOL = 1e-14


def _canonical_mode(m: tuple, k: tuple, c: complex) -> tuple:
    """Map a (mode, amplitude) pair to its sign-normalized representative."""
    for x in m + k:
        if x > 0:
            return m, k, c
        if x < 0:
            return tuple(-y for y in m), tuple(-y for y in k), c.conjugate()
    # zero mode: the function value is Re(c)
    return m, k, complex(c.real, 0.0)


@dataclass(frozen=True)
class PhasePoint:
    """A point (q, p) on T^n x T^n with components reduced to [0, 1)."""

    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "q", np.asarray(self.q, dtype=float) % 1.0)
        object.__setattr__(self, "p", np.asarray(self.p, dtype=float) % 1.0)
        if self.q.shape != self.p.shape or self.q.ndim != 1:
            raise ValueError("q and p must be 1-d arrays of equal length")

    @property
    def dim(self) -> int:
        return self.q.shape[0]


class TrigPoly:
    """Real trigonometric polynomial on T^n x T^n in canonical mode form."""

    __slots__ = ("dim", "coeffs", "_arrays")

    def __init__(self, dim: int, coeffs: dict | None = None, prune: bool = True):
        if dim < 1:
            raise ValueError("torus dimension must be >= 1")
        self.dim = dim
        acc: dict = {}
        if coeffs:
            for (m, k), c in coeffs.items():
                m = tuple(int(x) for x in m)
                k = tuple(int(x) for x in k)
                if len(m) != dim or len(k) != dim:
                    raise ValueError("mode length does not match dim")
                m, k, c = _canonical_mode(m, k, complex(c))
                acc[(m, k)] = acc.get((m, k), 0.0 + 0.0j) + c
        if prune:
            scale = sum(abs(c) for c in acc.values())
            tol = PRUNE_REL_TOL * max(1.0, scale)
            acc = {mk: c for mk, c in acc.items() if abs(c) > tol}
        zero = (0,) * dim
        if (zero, zero) in acc:
            acc[(zero, zero)] = complex(acc[(zero, zero)].real, 0.0)
            if acc[(zero, zero)] == 0:
                del acc[(zero, zero)]
        self.coeffs = acc
        self._arrays = None

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, dim: int) -> "TrigPoly":
        return cls(dim)

    @classmethod
    def constant(cls, dim: int, value: float) -> "TrigPoly":
        zero = (0,) * dim
        return cls(dim, {(zero, zero): complex(value)})

    @classmethod
    def harmonic(cls, dim: int, m, k, amplitude: float = 1.0,
                 phase: float = 0.0) -> "TrigPoly":
        """amplitude * cos(2*pi*(<m,q> + <k,p>) + phase)."""
        c = amplitude * complex(math.cos(phase), math.sin(phase))
        return cls(dim, {(tuple(m), tuple(k)): c})

    @classmethod
    def sine(cls, dim: int, m, k, amplitude: float = 1.0,
             phase: float = 0.0) -> "TrigPoly":
        """amplitude * sin(2*pi*(<m,q> + <k,p>) + phase)."""
        return cls.harmonic(dim, m, k, amplitude, phase - math.pi / 2.0)

    # -- structure ----------------------------------------------------------

    @property
    def degree(self) -> int:
        if not self.coeffs:
            return 0
        return max(max(max(abs(x) for x in m), max(abs(x) for x in k))
                   for (m, k) in self.coeffs)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def is_q_only(self) -> bool:
        return all(all(x == 0 for x in k) for (_, k) in self.coeffs)

    def is_p_only(self) -> bool:
        return all(all(x == 0 for x in m) for (m, _) in self.coeffs)

    def is_constant(self) -> bool:
        return self.is_q_only() and self.is_p_only()

    def sup_norm_bound(self) -> float:
        """l1 coefficient bound on sup |f|."""
        return sum(abs(c) for c in self.coeffs.values())

    def _get_arrays(self):
        if self._arrays is None:
            n = self.dim
            if self.coeffs:
                keys = sorted(self.coeffs)
                M = np.array([mk[0] for mk in keys], dtype=float)
                K = np.array([mk[1] for mk in keys], dtype=float)
                C = np.array([self.coeffs[mk] for mk in keys], dtype=complex)
            else:
                M = np.zeros((0, n))
                K = np.zeros((0, n))
                C = np.zeros(0, dtype=complex)
            self._arrays = (M, K, C)
        return self._arrays

    # -- evaluation ---------------------------------------------------------

    def evaluate(self, x: PhasePoint) -> float:
        if x.dim != self.dim:
            raise ValueError("dimension mismatch")
        return float(self.evaluate_grid(x.q[None, :], x.p[None, :])[0])

    def evaluate_grid(self, Q: np.ndarray, P: np.ndarray) -> np.ndarray:
        """Evaluate on a batch of points; Q, P have shape (npts, n)."""
        M, K, C = self._get_arrays()
        if len(C) == 0:
            return np.zeros(np.shape(Q)[0])
        phases = Q @ M.T + P @ K.T
        return (np.exp((2j * math.pi) * phases) @ C).real

    def __call__(self, q, p) -> float:
        return self.evaluate(PhasePoint(np.atleast_1d(q), np.atleast_1d(p)))

    def gradient_q(self, x: PhasePoint) -> np.ndarray:
        if x.dim != self.dim:
            raise ValueError("dimension mismatch")
        return self.grad_q_grid(x.q[None, :], x.p[None, :])[0]

    def gradient_p(self, x: PhasePoint) -> np.ndarray:
        if x.dim != self.dim:
            raise ValueError("dimension mismatch")
        return self.grad_p_grid(x.q[None, :], x.p[None, :])[0]

    def grad_q_grid(self, Q: np.ndarray, P: np.ndarray) -> np.ndarray:
        M, K, C = self._get_arrays()
        if len(C) == 0:
            return np.zeros_like(np.asarray(Q, dtype=float))
        E = np.exp((2j * math.pi) * (Q @ M.T + P @ K.T))
        return (E @ ((2j * math.pi) * C[:, None] * M)).real

    def grad_p_grid(self, Q: np.ndarray, P: np.ndarray) -> np.ndarray:
        M, K, C = self._get_arrays()
        if len(C) == 0:
            return np.zeros_like(np.asarray(P, dtype=float))
        E = np.exp((2j * math.pi) * (Q @ M.T + P @ K.T))
        return (E @ ((2j * math.pi) * C[:, None] * K)).real

    def hess_q_grid(self, Q: np.ndarray, P: np.ndarray) -> np.ndarray:
        """Hessian in q over a batch of points, shape (npts, n, n)."""
        M, K, C = self._get_arrays()
        n = self.dim
        npts = np.shape(Q)[0]
        if len(C) == 0:
            return np.zeros((npts, n, n))
        E = np.exp((2j * math.pi) * (Q @ M.T + P @ K.T))
        T = (-(TWO_PI ** 2)) * C[:, None, None] * M[:, :, None] * M[:, None, :]
        return np.einsum("xm,mab->xab", E, T).real

    def hess_p_grid(self, Q: np.ndarray, P: np.ndarray) -> np.ndarray:
        M, K, C = self._get_arrays()
        n = self.dim
        npts = np.shape(Q)[0]
        if len(C) == 0:
            return np.zeros((npts, n, n))
        E = np.exp((2j * math.pi) * (Q @ M.T + P @ K.T))
        T = (-(TWO_PI ** 2)) * C[:, None, None] * K[:, :, None] * K[:, None, :]
        return np.einsum("xm,mab->xab", E, T).real

    # -- calculus and algebra ----------------------------------------------

    def deriv_q(self, j: int) -> "TrigPoly":
        return TrigPoly(self.dim, {
            (m, k): c * (2j * math.pi * m[j]) for (m, k), c in self.coeffs.items()
        })

    def deriv_p(self, j: int) -> "TrigPoly":
        return TrigPoly(self.dim, {
            (m, k): c * (2j * math.pi * k[j]) for (m, k), c in self.coeffs.items()
        })

    def __add__(self, other: "TrigPoly") -> "TrigPoly":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        acc = dict(self.coeffs)
        for mk, c in other.coeffs.items():
            acc[mk] = acc.get(mk, 0.0 + 0.0j) + c
        return TrigPoly(self.dim, acc)

    def __sub__(self, other: "TrigPoly") -> "TrigPoly":
        return self + (-other)

    def __neg__(self) -> "TrigPoly":
        return TrigPoly(self.dim, {mk: -c for mk, c in self.coeffs.items()},
                        prune=False)

    def __mul__(self, other):
        if isinstance(other, TrigPoly):
            return self._mul_poly(other)
        s = float(other)
        return TrigPoly(self.dim, {mk: c * s for mk, c in self.coeffs.items()})

    __rmul__ = __mul__

    def _mul_poly(self, other: "TrigPoly") -> "TrigPoly":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        # Re(A)Re(B) = Re(AB)/2 + Re(A conj(B))/2 with A = c1 e^{i t1} etc.
        acc: dict = {}
        for (m1, k1), c1 in self.coeffs.items():
            for (m2, k2), c2 in other.coeffs.items():
                for mm, kk, cc in (
                    (tuple(a + b for a, b in zip(m1, m2)),
                     tuple(a + b for a, b in zip(k1, k2)), 0.5 * c1 * c2),
                    (tuple(a - b for a, b in zip(m1, m2)),
                     tuple(a - b for a, b in zip(k1, k2)),
                     0.5 * c1 * c2.conjugate()),
                ):
                    mm, kk, cc = _canonical_mode(mm, kk, cc)
                    acc[(mm, kk)] = acc.get((mm, kk), 0.0 + 0.0j) + cc
        return TrigPoly(self.dim, acc)

    def poisson(self, other: "TrigPoly") -> "TrigPoly":
        """Poisson bracket {self, other}, exact in coefficient space."""
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        out = TrigPoly.zero(self.dim)
        for i in range(self.dim):
            out = out + self.deriv_q(i) * other.deriv_p(i)
            out = out - other.deriv_q(i) * self.deriv_p(i)
        return out

    # -- comparison helpers -------------------------------------------------

    def coeff_distance(self, other: "TrigPoly") -> float:
        keys = set(self.coeffs) | set(other.coeffs)
        if not keys:
            return 0.0
        return max(abs(self.coeffs.get(mk, 0) - other.coeffs.get(mk, 0))
                   for mk in keys)

    def __repr__(self):
        return f"TrigPoly(dim={self.dim}, modes={len(self.coeffs)}, " \
               f"degree={self.degree})"

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        modes = []
        for (m, k) in sorted(self.coeffs):
            c = self.coeffs[(m, k)]
            modes.append({"m": list(m), "k": list(k),
                          "re": c.real, "im": c.imag})
        return {"dim": self.dim, "modes": modes}

    @classmethod
    def from_dict(cls, d: dict) -> "TrigPoly":
        coeffs = {
            (tuple(mode["m"]), tuple(mode["k"])): complex(mode["re"], mode["im"])
            for mode in d["modes"]
        }
        return cls(int(d["dim"]), coeffs, prune=False)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, s: str) -> "TrigPoly":
        return cls.from_dict(json.loads(s))


def poisson_bracket(f: TrigPoly, g: TrigPoly) -> TrigPoly:
    return f.poisson(g)


# -- sampling / projection --------------------------------------------------

def project_from_samples(sampler: Callable, dim: int, degree: int,
                         points_per_axis: int | None = None) -> TrigPoly:
    """Degree-K Fourier truncation of ``sampler`` via discrete Fourier sums.

    ``sampler(q, p)`` is evaluated on a uniform grid with ``points_per_axis``
    points per torus axis (default 2K+2); the grid must oversample the
    requested degree (points per axis > 2K+1) to avoid aliasing.
    """
    n, K = dim, degree
    G = points_per_axis if points_per_axis is not None else 2 * K + 2
    if G <= 2 * K + 1:
        raise ValueError(
            f"grid too coarse: need more than {2 * K + 1} points per axis "
            f"for degree {K}, got {G}")
    axes = 2 * n
    grid = np.arange(G) / G
    S = np.empty((G,) * axes)
    for idx in np.ndindex(*S.shape):
        u = grid[list(idx)]
        S[idx] = sampler(u[:n], u[n:])
    freqs = np.arange(-K, K + 1)
    E = np.exp(-2j * math.pi * np.outer(grid, freqs)) / G  # (G, 2K+1)
    F = S.astype(complex)
    for _ in range(axes):
        # contract current leading axis, append mode axis at the end
        F = np.tensordot(F, E, axes=([0], [0]))
    scale = float(np.max(np.abs(F))) if F.size else 0.0
    tol = 1e-13 * max(1.0, scale)
    coeffs: dict = {}
    for idx in np.ndindex(*F.shape):
        c = F[idx]
        if abs(c) <= tol:
            continue
        vec = tuple(int(freqs[i]) for i in idx)
        m, k = vec[:n], vec[n:]
        first = next((x for x in vec if x != 0), 0)
        if first < 0:
            continue  # covered by the mirror mode
        if first == 0:
            coeffs[(m, k)] = complex(c.real, 0.0)
        else:
            coeffs[(m, k)] = 2.0 * c
    return TrigPoly(n, coeffs)


def _smoothstep(t: np.ndarray, order: int) -> np.ndarray:
    """Generalized smoothstep S_order on [0,1] (C^order at both ends)."""
    t = np.clip(t, 0.0, 1.0)
    out = np.zeros_like(t)
    for i in range(order + 1):
        out = out + comb(order + i, i) * comb(2 * order + 1, order - i) * (-t) ** i
    return t ** (order + 1) * out


@dataclass
class PeriodizedResult:
    """Result of mapping a box-supported function onto the torus."""

    poly: TrigPoly
    scale: float  # box coordinate = scale * wrapped torus coordinate
    window: str

    def __iter__(self):
        return iter((self.poly, self.scale))


def periodize(f: Callable, box_halfwidth: float, dim: int, degree: int,
              window_order: int = 6,
              points_per_axis: int | None = None) -> PeriodizedResult:
    """Embed a function on [-b, b]^{2n} into the torus and project to degree K.

    The box is rescaled with margin factor 2 (period 4b); f is multiplied by a
    C^{window_order} polynomial bump which is identically 1 on the inner
    half-box |x_i| <= b and vanishes at the seam |x_i| = 2b.
    """
    b = float(box_halfwidth)
    if b <= 0:
        raise ValueError("box_halfwidth must be positive")
    period = 4.0 * b

    def window_1d(x):
        t = (np.abs(x) - b) / b
        return 1.0 - _smoothstep(t, window_order)

    def sampler(q, p):
        u = np.concatenate([q, p])
        x = period * (u - np.round(u))  # wrap to [-period/2, period/2)
        w = float(np.prod(window_1d(x)))
        if w == 0.0:
            return 0.0
        return f(x[:dim], x[dim:]) * w

    poly = project_from_samples(sampler, dim, degree,
                                points_per_axis=points_per_axis)
    return PeriodizedResult(
        poly=poly, scale=period,
        window=f"polynomial smoothstep bump, C^{window_order}, "
               f"flat on inner half-box |x|<={b}")
