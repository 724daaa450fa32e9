"""Shear maps and words: closed-form oracles, symplecticity, inversion."""

import numpy as np

from shearflow import (HORIZONTAL, VERTICAL, Shear, ShearWord, TrigPoly,
                       shear_flow, symplectic_form, symplecticity_residual,
                       torus_distance)
from conftest import random_poly


def kicked_pair(K=0.9):
    """Vertical kick then horizontal twist, both with closed-form actions."""
    v = TrigPoly.harmonic(1, [1], [0], K / (4 * np.pi ** 2))
    tau = TrigPoly.harmonic(1, [0], [1], -1.0 / (4 * np.pi ** 2))
    return ShearWord(1, [Shear(VERTICAL, v), Shear(HORIZONTAL, tau)])


def kicked_pair_oracle(Q, P, K=0.9):
    # hand-coded composition of the two closed-form shear actions
    P1 = (P + (K / (2 * np.pi)) * np.sin(2 * np.pi * Q)) % 1.0
    Q1 = (Q + (1.0 / (2 * np.pi)) * np.sin(2 * np.pi * P1)) % 1.0
    return Q1, P1


def test_word_matches_closed_form_composition(rng):
    word = kicked_pair()
    Q = rng.random((100, 1))
    P = rng.random((100, 1))
    Qw, Pw = word.apply_grid(Q, P)
    Qo, Po = kicked_pair_oracle(Q, P)
    assert np.max(torus_distance(Qw, Pw, Qo, Po)) < 1e-14


def test_shear_kind_validation(rng):
    mixed = TrigPoly.harmonic(1, [1], [1])
    for kind in (HORIZONTAL, VERTICAL):
        try:
            Shear(kind, mixed)
        except ValueError:
            continue
        raise AssertionError("mixed-variable generator accepted")


def random_word(rng, dim, length, amplitude=2e-3):
    # mild generators: compiled words take many small steps, and large
    # Hessians would blow up the Jacobian norms (and roundoff with them)
    shears = []
    for _ in range(length):
        if rng.random() < 0.5:
            g = random_poly(rng, dim, degree=1, n_modes=2,
                            amplitude=amplitude, p_only=True)
            shears.append(Shear(HORIZONTAL, g))
        else:
            g = random_poly(rng, dim, degree=1, n_modes=2,
                            amplitude=amplitude, q_only=True)
            shears.append(Shear(VERTICAL, g))
    return ShearWord(dim, shears)


def test_jacobian_is_symplectic(rng):
    for dim in (1, 2):
        word = random_word(rng, dim, 20)
        Q = rng.random((30, dim))
        P = rng.random((30, dim))
        assert symplecticity_residual(word, Q, P) < 1e-11


def test_jacobian_matches_finite_differences(rng):
    word = random_word(rng, 1, 6)
    Q = rng.random((5, 1))
    P = rng.random((5, 1))
    J = word.jacobian_grid(Q, P)
    h = 1e-6
    for col, (dQ, dP) in enumerate([(h, 0.0), (0.0, h)]):
        Qp, Pp = word.apply_grid(Q + dQ, P + dP)
        Qm, Pm = word.apply_grid(Q - dQ, P - dP)
        dq = (Qp - Qm + 0.5) % 1.0 - 0.5
        dp = (Pp - Pm + 0.5) % 1.0 - 0.5
        fd = np.concatenate([dq, dp], axis=1) / (2 * h)
        assert np.max(np.abs(J[:, :, col] - fd)) < 1e-5


def test_inverse_round_trip(rng):
    word = random_word(rng, 2, 15)
    Q = rng.random((40, 2))
    P = rng.random((40, 2))
    Qf, Pf = word.apply_grid(Q, P)
    Qb, Pb = word.inverse().apply_grid(Qf, Pf)
    assert np.max(torus_distance(Qb, Pb, Q, P)) < 1e-11


def test_merged_word_equivalent_and_shorter(rng):
    g1 = random_poly(rng, 1, n_modes=2, q_only=True)
    g2 = random_poly(rng, 1, n_modes=2, q_only=True)
    tau = random_poly(rng, 1, n_modes=2, p_only=True)
    word = ShearWord(1, [Shear(VERTICAL, g1), Shear(VERTICAL, g2),
                         Shear(HORIZONTAL, tau),
                         Shear(HORIZONTAL, -tau)])
    m = word.merged()
    assert len(m) == 1
    Q = rng.random((20, 1))
    P = rng.random((20, 1))
    Qa, Pa = word.apply_grid(Q, P)
    Qb, Pb = m.apply_grid(Q, P)
    assert np.max(torus_distance(Qa, Pa, Qb, Pb)) < 1e-13


def test_shear_flow_additivity(rng):
    g = random_poly(rng, 1, n_modes=3, p_only=True)
    combined = (shear_flow(g, 0.3) + shear_flow(g, 0.45)).merged()
    direct = shear_flow(g, 0.75)
    assert len(combined) == len(direct) == 1
    assert combined.shears[0].generator.coeff_distance(
        direct.shears[0].generator) < 1e-14


def test_symplectic_form_shape():
    O = symplectic_form(2)
    assert np.array_equal(O @ O, -np.eye(4))


def test_word_serialization_round_trip(rng, tmp_path):
    word = random_word(rng, 1, 8)
    path = tmp_path / "word.json"
    word.save(path, metrics={"note": "test"})
    loaded = ShearWord.load(path)
    assert len(loaded) == len(word)
    Q = rng.random((10, 1))
    P = rng.random((10, 1))
    Qa, Pa = word.apply_grid(Q, P)
    Qb, Pb = loaded.apply_grid(Q, P)
    assert np.max(torus_distance(Qa, Pa, Qb, Pb)) == 0.0
    assert (tmp_path / "word.json.metrics.json").exists()
