"""Rewrite a trig polynomial as v0(q) + sum of double Poisson brackets.

Every Fourier mode with a nonzero momentum frequency vector k is expanded
into exactly four terms of the form weight * {w(q), {v(q), tau(p)}} with
explicit single-harmonic generators; modes with k = 0 are collected into the
position-only part v0, whose flow is already an exact shear.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

from .trigpoly import TrigPoly

HALF_PI = math.pi / 2.0


def choose_sigma_j(m, k):
    """Pick the split index j and sign sigma for a mode with k != 0.

    j is the smallest index with k_j != 0; sigma maximizes
    |A| = |<m,k> - sigma*k_j| (ties broken toward +1), which guarantees
    A != 0 and keeps the 1/(2 pi A) generator amplitude small.
    Returns (j, sigma, A, m') with m' = m - sigma*e_j.
    """
    m = tuple(int(x) for x in m)
    k = tuple(int(x) for x in k)
    if all(x == 0 for x in k):
        raise ValueError("k = 0: mode belongs to v0, not the bracket expansion")
    j = next(i for i, x in enumerate(k) if x != 0)
    mk = sum(a * b for a, b in zip(m, k))
    a_plus = mk - k[j]
    a_minus = mk + k[j]
    sigma = 1 if abs(a_plus) >= abs(a_minus) else -1
    A = a_plus if sigma == 1 else a_minus
    m_prime = tuple(x - sigma if i == j else x for i, x in enumerate(m))
    return j, sigma, A, m_prime


@dataclass
class BracketTerm:
    """One weight * {w(q), {v(q), tau(p)}} summand with its provenance."""

    weight: float
    w: TrigPoly
    v: TrigPoly
    tau: TrigPoly
    provenance: dict = field(default_factory=dict)

    def double_bracket(self) -> TrigPoly:
        """Exact weight * {w, {v, tau}} via the coefficient-space bracket."""
        return self.weight * self.w.poisson(self.v.poisson(self.tau))

    def to_dict(self) -> dict:
        return {"weight": self.weight, "w": self.w.to_dict(),
                "v": self.v.to_dict(), "tau": self.tau.to_dict(),
                "provenance": self.provenance}

    @classmethod
    def from_dict(cls, d: dict) -> "BracketTerm":
        return cls(float(d["weight"]), TrigPoly.from_dict(d["w"]),
                   TrigPoly.from_dict(d["v"]), TrigPoly.from_dict(d["tau"]),
                   dict(d.get("provenance", {})))


def sin_triple_term(m_prime, k, j, sigma, A, alpha, beta, gamma,
                    weight: float) -> BracketTerm:
    """Build the term whose double bracket equals

        sin(2 pi <m',q> + alpha) sin(2 pi <k,p> + beta) sin(2 pi sigma q_j + gamma)

    times ``weight``, using the closed-form generators
    v = cos(2 pi <m',q> + alpha)/(2 pi A), tau = -sin(2 pi <k,p> + beta)/(2 pi),
    w = cos(2 pi sigma q_j + gamma)/(4 pi^2 k_j sigma).
    """
    if A == 0:
        raise ValueError("A must be nonzero")
    k = tuple(int(x) for x in k)
    if k[j] == 0:
        raise ValueError("k_j must be nonzero")
    n = len(k)
    zero = (0,) * n
    e_j = tuple(sigma if i == j else 0 for i in range(n))
    v = TrigPoly.harmonic(n, m_prime, zero, 1.0 / (2.0 * math.pi * A), alpha)
    tau = TrigPoly.sine(n, zero, k, -1.0 / (2.0 * math.pi), beta)
    w = TrigPoly.harmonic(n, e_j, zero,
                          1.0 / (4.0 * math.pi ** 2 * k[j] * sigma), gamma)
    # note: cos(2 pi sigma q_j + gamma) is the harmonic of mode sigma*e_j
    return BracketTerm(
        weight=weight, w=w, v=v, tau=tau,
        provenance={"m_prime": list(m_prime), "k": list(k), "j": j,
                    "sigma": sigma, "A": A,
                    "alpha": alpha, "beta": beta, "gamma": gamma})


@dataclass
class Decomposition:
    """H = v0(q) + sum of weight * {w, {v, tau}} over terms."""

    v0: TrigPoly
    terms: list

    def reconstruct(self) -> TrigPoly:
        out = self.v0
        for t in self.terms:
            out = out + t.double_bracket()
        return out

    def to_dict(self) -> dict:
        return {"schema": "decomposition/1", "v0": self.v0.to_dict(),
                "terms": [t.to_dict() for t in self.terms]}

    @classmethod
    def from_dict(cls, d: dict) -> "Decomposition":
        return cls(TrigPoly.from_dict(d["v0"]),
                   [BracketTerm.from_dict(t) for t in d["terms"]])


def decompose(H: TrigPoly) -> Decomposition:
    """Expand H into v0 plus four bracket terms per mode with k != 0.

    Writing a mode as |c| cos(X + Y + Z + phi) with X = 2 pi <m',q>,
    Y = 2 pi <k,p>, Z = 2 pi sigma q_j and phi the coefficient phase, the
    product identity

        cos(a+b+c) = cos a cos b cos c - cos a sin b sin c
                     - sin a cos b sin c - sin a sin b cos c

    (with a = X + phi) yields four sin-triple terms; cosines are folded in as
    sines shifted by pi/2.
    """
    n = H.dim
    v0_coeffs = {}
    terms: list[BracketTerm] = []
    for (m, k) in sorted(H.coeffs):
        c = H.coeffs[(m, k)]
        if all(x == 0 for x in k):
            v0_coeffs[(m, k)] = c
            continue
        j, sigma, A, m_prime = choose_sigma_j(m, k)
        amp = abs(c)
        phi = cmath.phase(c)
        # (alpha offset, beta offset, gamma offset, sign); an offset of pi/2
        # turns the sine factor into the corresponding cosine.
        for d_alpha, d_beta, d_gamma, sign in (
            (HALF_PI, HALF_PI, HALF_PI, 1.0),
            (HALF_PI, 0.0, 0.0, -1.0),
            (0.0, HALF_PI, 0.0, -1.0),
            (0.0, 0.0, HALF_PI, -1.0),
        ):
            terms.append(sin_triple_term(
                m_prime, k, j, sigma, A,
                alpha=phi + d_alpha, beta=d_beta, gamma=d_gamma,
                weight=sign * amp))
    return Decomposition(TrigPoly(n, v0_coeffs), terms)
