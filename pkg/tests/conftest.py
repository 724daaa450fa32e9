import numpy as np
import pytest

from shearflow import TrigPoly


def random_poly(rng, dim, degree=2, n_modes=3, amplitude=1.0,
                q_only=False, p_only=False) -> TrigPoly:
    """Sparse random real trig polynomial with the given mode budget."""
    out = TrigPoly.zero(dim)
    for _ in range(n_modes):
        m = rng.integers(-degree, degree + 1, size=dim)
        k = rng.integers(-degree, degree + 1, size=dim)
        if q_only:
            k = np.zeros(dim, dtype=int)
        if p_only:
            m = np.zeros(dim, dtype=int)
        if not np.any(m) and not np.any(k):
            continue
        amp = amplitude * rng.uniform(0.2, 1.0)
        phase = rng.uniform(0.0, 2.0 * np.pi)
        out = out + TrigPoly.harmonic(dim, m.tolist(), k.tolist(), amp, phase)
    return out


def fd_grad(f, Q, P, wrt, h=1e-5):
    """Central finite-difference gradient on a batch of points."""
    n = Q.shape[1]
    out = np.zeros_like(Q)
    for j in range(n):
        dQp, dQm, dPp, dPm = Q.copy(), Q.copy(), P.copy(), P.copy()
        if wrt == "q":
            dQp[:, j] += h
            dQm[:, j] -= h
        else:
            dPp[:, j] += h
            dPm[:, j] -= h
        out[:, j] = (f.evaluate_grid(dQp, dPp)
                     - f.evaluate_grid(dQm, dPm)) / (2 * h)
    return out


def fd_bracket(f, g, Q, P, h=1e-5):
    """{f, g} via finite differences, the bracket oracle."""
    fq, fp = fd_grad(f, Q, P, "q", h), fd_grad(f, Q, P, "p", h)
    gq, gp = fd_grad(g, Q, P, "q", h), fd_grad(g, Q, P, "p", h)
    return np.sum(fq * gp - gq * fp, axis=1)


@pytest.fixture
def rng():
    return np.random.default_rng(20260823)
