"""Shear maps on the torus and finite shear words.

A horizontal shear moves q by the gradient of a momentum-only generator,
(q, p) -> (q + grad tau(p), p); a vertical shear moves p the opposite way,
(q, p) -> (q, p - grad v(q)).  Both are exact symplectic maps.  A time-t
shear flow is stored as a time-1 shear with the generator scaled by t.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .trigpoly import PhasePoint, TrigPoly

HORIZONTAL = "H"
VERTICAL = "V"


class Shear:
    """One exact symplectic shear map with a trig-polynomial generator."""

    __slots__ = ("kind", "generator")

    def __init__(self, kind: str, generator: TrigPoly):
        if kind not in (HORIZONTAL, VERTICAL):
            raise ValueError(f"unknown shear kind {kind!r}")
        if kind == HORIZONTAL and not generator.is_p_only():
            raise ValueError("horizontal generator must depend only on p")
        if kind == VERTICAL and not generator.is_q_only():
            raise ValueError("vertical generator must depend only on q")
        self.kind = kind
        self.generator = generator

    @property
    def dim(self) -> int:
        return self.generator.dim

    def scaled(self, t: float) -> "Shear":
        return Shear(self.kind, self.generator * t)

    def inverse(self) -> "Shear":
        return Shear(self.kind, -self.generator)

    def apply_grid(self, Q: np.ndarray, P: np.ndarray):
        if self.kind == HORIZONTAL:
            return (Q + self.generator.grad_p_grid(Q, P)) % 1.0, P
        return Q, (P - self.generator.grad_q_grid(Q, P)) % 1.0

    def jacobian_grid(self, Q: np.ndarray, P: np.ndarray) -> np.ndarray:
        """Per-point 2n x 2n Jacobians, shape (npts, 2n, 2n)."""
        n = self.dim
        npts = np.shape(Q)[0]
        J = np.tile(np.eye(2 * n), (npts, 1, 1))
        if self.kind == HORIZONTAL:
            J[:, :n, n:] = self.generator.hess_p_grid(Q, P)
        else:
            J[:, n:, :n] = -self.generator.hess_q_grid(Q, P)
        return J

    def to_dict(self) -> dict:
        return {"kind": self.kind, "generator": self.generator.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> "Shear":
        return cls(d["kind"], TrigPoly.from_dict(d["generator"]))


class ShearWord:
    """Ordered finite composition of shears; first listed is applied first."""

    __slots__ = ("dim", "shears")

    def __init__(self, dim: int, shears=()):
        self.dim = dim
        shears = tuple(shears)
        for s in shears:
            if s.dim != dim:
                raise ValueError("shear dimension mismatch in word")
        self.shears = shears

    def __len__(self) -> int:
        return len(self.shears)

    def __add__(self, other: "ShearWord") -> "ShearWord":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        return ShearWord(self.dim, self.shears + other.shears)

    def apply(self, x: PhasePoint) -> PhasePoint:
        if x.dim != self.dim:
            raise ValueError("dimension mismatch")
        Q, P = self.apply_grid(x.q[None, :], x.p[None, :])
        return PhasePoint(Q[0], P[0])

    def apply_grid(self, Q: np.ndarray, P: np.ndarray):
        Q = np.asarray(Q, dtype=float) % 1.0
        P = np.asarray(P, dtype=float) % 1.0
        for s in self.shears:
            Q, P = s.apply_grid(Q, P)
        return Q, P

    def jacobian(self, x: PhasePoint) -> np.ndarray:
        return self.jacobian_grid(x.q[None, :], x.p[None, :])[0]

    def jacobian_grid(self, Q: np.ndarray, P: np.ndarray) -> np.ndarray:
        """Chain-rule product of the exact per-shear Jacobians."""
        n = self.dim
        Q = np.asarray(Q, dtype=float) % 1.0
        P = np.asarray(P, dtype=float) % 1.0
        npts = np.shape(Q)[0]
        J = np.tile(np.eye(2 * n), (npts, 1, 1))
        for s in self.shears:
            if s.kind == HORIZONTAL:
                H = s.generator.hess_p_grid(Q, P)
                J[:, :n, :] += np.einsum("xab,xbc->xac", H, J[:, n:, :])
            else:
                H = s.generator.hess_q_grid(Q, P)
                J[:, n:, :] -= np.einsum("xab,xbc->xac", H, J[:, :n, :])
            Q, P = s.apply_grid(Q, P)
        return J

    def inverse(self) -> "ShearWord":
        return ShearWord(self.dim, tuple(s.inverse() for s in reversed(self.shears)))

    def merged(self) -> "ShearWord":
        """Merge adjacent same-kind shears and drop identity shears."""
        out: list[Shear] = []
        for s in self.shears:
            if out and out[-1].kind == s.kind:
                g = out[-1].generator + s.generator
                out.pop()
                if not g.is_constant():
                    out.append(Shear(s.kind, g))
            elif not s.generator.is_constant():
                out.append(s)
        return ShearWord(self.dim, out)

    def to_dict(self) -> dict:
        return {"schema": "shearword/1", "dim": self.dim,
                "shears": [s.to_dict() for s in self.shears]}

    @classmethod
    def from_dict(cls, d: dict) -> "ShearWord":
        return cls(int(d["dim"]), [Shear.from_dict(s) for s in d["shears"]])

    def save(self, path, metrics: dict | None = None):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh)
        if metrics is not None:
            with open(str(path) + ".metrics.json", "w") as fh:
                json.dump(metrics, fh, indent=2)

    @classmethod
    def load(cls, path) -> "ShearWord":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def symplectic_form(n: int) -> np.ndarray:
    """Standard symplectic matrix Omega in (q, p) block order."""
    O = np.zeros((2 * n, 2 * n))
    O[:n, n:] = np.eye(n)
    O[n:, :n] = -np.eye(n)
    return O


def symplecticity_residual(word: ShearWord, Q: np.ndarray,
                           P: np.ndarray) -> float:
    """max over points of || J^T Omega J - Omega ||_inf."""
    O = symplectic_form(word.dim)
    J = word.jacobian_grid(Q, P)
    R = np.einsum("xba,bc,xcd->xad", J, O, J) - O
    return float(np.max(np.abs(R)))
