import math

import numpy as np
import pytest

from qpcocycle.operators import (
    build_blocks,
    cyclic_fourier,
    cyclic_operators,
    dirichlet_matrix,
    duality_conjugation_residual,
    periodic_matrix,
    scalar_dirichlet_matrix,
)
from qpcocycle.potentials import TrigPotential, amo, pamo, potential_from_config, random_real_potential

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def test_potential_eval_amo():
    v = amo(1.0)
    assert v.eval(0.0) == pytest.approx(2.0)
    assert abs(v.eval(0.25)) < 1e-15


def test_potential_eval_degree_two_cosine_sum():
    v = TrigPotential({1: 1.0, -1: 1.0, 2: 0.3, -2: 0.3})
    expect = 2 * math.cos(0.4 * math.pi) + 0.6 * math.cos(0.8 * math.pi)
    assert v.eval(0.2) == pytest.approx(expect, abs=1e-14)


def test_potential_real_on_axis():
    rng = np.random.default_rng(0)
    v = random_real_potential(3, rng)
    xs = rng.uniform(size=12)
    assert np.max(np.abs(np.imag(v.eval(xs)))) < 1e-12


def test_potential_guards():
    with pytest.raises(ValueError):
        TrigPotential({1: 1.0, -1: 1.0, 2: 0.0, -2: 0.0, 0: 0.0}, real_symmetric=True).eval  # top zero
    with pytest.raises(ValueError):
        TrigPotential({1: 1.0, -1: 2.0})  # breaks real symmetry
    with pytest.raises(ValueError):
        amo(0.0)


def test_pamo_and_config_roundtrip():
    w = TrigPotential({2: 0.5, -2: 0.5})
    v = pamo(0.8, 0.1, w)
    assert v.coeff(1) == pytest.approx(0.8)
    assert v.coeff(2) == pytest.approx(0.05)
    v2 = potential_from_config(v.to_config())
    assert v2.coeffs == v.coeffs
    v3 = potential_from_config("amo:2.5")
    assert v3.coeff(1) == 2.5


def test_blocks_structure_and_conjugations():
    rng = np.random.default_rng(2)
    v = random_real_potential(3, rng)
    d = 3
    eps = 0.07
    blocks = build_blocks(v, GOLDEN, 0.3, eps)
    # B upper triangular with constant diagonal v_{-d} e^{2 pi d eps}
    assert np.allclose(np.tril(blocks.B, -1), 0.0)
    want = v.coeff(-d) * math.exp(2 * math.pi * d * eps)
    assert np.allclose(np.diag(blocks.B), want)
    assert np.allclose(np.triu(blocks.B_tilde, 1), 0.0)
    # B_eps = e^{2 pi d eps} F B_0 F^{-1}
    blocks0 = build_blocks(v, GOLDEN, 0.3, 0.0)
    f, finv = blocks.F, np.linalg.inv(blocks.F)
    lhs = math.exp(2 * math.pi * d * eps) * f @ blocks0.B @ finv
    assert np.linalg.norm(lhs - blocks.B) <= 1e-12 * np.linalg.norm(blocks.B)
    # C_eps(theta) = F C_0(theta) F^{-1}
    lhs = f @ blocks0.C(0.3) @ finv
    assert np.linalg.norm(lhs - blocks.C(0.3)) <= 1e-12 * np.linalg.norm(blocks.C(0.3))
    # C_0 Hermitian for real theta
    c0 = blocks0.C(0.77)
    assert np.linalg.norm(c0 - c0.conj().T) <= 1e-14 * np.linalg.norm(c0)


def test_blocks_d1_amo_collapse():
    blocks = build_blocks(amo(2.0), GOLDEN, 0.0, 0.1)
    assert blocks.B.shape == (1, 1)
    assert blocks.B[0, 0] == pytest.approx(2.0 * math.exp(2 * math.pi * 0.1))
    assert blocks.C(0.2)[0, 0] == pytest.approx(2 * math.cos(2 * math.pi * 0.2))


def test_dirichlet_constant_case():
    got = dirichlet_matrix(0.0, 0.0, amo(1.0), 3)
    want = np.array([[2.0, 1, 0], [1, 2, 1], [0, 1, 2]])
    assert np.allclose(got, want)


def test_periodic_constant_case_and_corners():
    got = periodic_matrix(0.0, 0.0, amo(1.0), 3)
    want = np.array([[2.0, 1, 1], [1, 2, 1], [1, 1, 2]])
    assert np.allclose(got, want)
    # difference from Dirichlet is supported on the corner blocks only
    rng = np.random.default_rng(4)
    v = random_real_potential(2, rng)
    d = 2
    pm = periodic_matrix(GOLDEN, 0.123, v, 5)
    dm = dirichlet_matrix(GOLDEN, 0.123, v, 5)
    diff = pm - dm
    corner = np.zeros_like(diff)
    corner[:d, -d:] = diff[:d, -d:]
    corner[-d:, :d] = diff[-d:, :d]
    assert np.array_equal(diff, corner)
    assert np.linalg.norm(diff[:d, -d:]) > 0


def test_hermiticity_eps0():
    rng = np.random.default_rng(6)
    for d in (1, 2, 3):
        v = random_real_potential(d, rng)
        dm = dirichlet_matrix(GOLDEN, 0.37, v, 4)
        pm = periodic_matrix(GOLDEN, 0.37, v, 5)
        _, _, hh = cyclic_operators(3, 8 if d < 3 else 7, 0.21, 0.0, v)
        for m in (dm, pm, hh):
            assert np.linalg.norm(m - m.conj().T) <= 1e-13 * max(1.0, np.linalg.norm(m))


def test_periodic_needs_three_blocks():
    with pytest.raises(ValueError):
        periodic_matrix(GOLDEN, 0.0, amo(1.0), 2)


def test_cyclic_theta_zero_identity():
    v = amo(1.5)
    h, ht, _ = cyclic_operators(2, 5, 0.0, 0.07, v)
    assert np.linalg.norm(h - ht) == 0.0


def test_cyclic_hand_computed_q3():
    h, _, hh = cyclic_operators(1, 3, 0.2, 0.0, amo(1.0))
    n = np.arange(3)
    want = np.zeros((3, 3), dtype=complex)
    want[n, n] = 2 * np.cos(2 * np.pi * (0.2 + n / 3.0))
    want[n, (n + 1) % 3] += 1.0
    want[n, (n - 1) % 3] += 1.0
    assert np.allclose(hh, want)


def test_cyclic_coprime_guard():
    with pytest.raises(ValueError):
        cyclic_operators(2, 4, 0.1, 0.0, amo(1.0))


def test_fourier_unitarity():
    for p, q in [(1, 1), (1, 4), (5, 12), (7, 48)]:
        f = cyclic_fourier(p, q)
        assert np.linalg.norm(f @ f.conj().T - np.eye(q)) <= 1e-12
    f = cyclic_fourier(1, 4)
    dft = np.exp(2j * np.pi * np.outer(np.arange(4), np.arange(4)) / 4) / 2.0
    assert np.allclose(f, dft)


def test_duality_exact_examples():
    assert duality_conjugation_residual(1, 4, 0.3, 0.0, amo(2.0)) <= 1e-12
    rng = np.random.default_rng(9)
    v2 = random_real_potential(2, rng)
    assert duality_conjugation_residual(5, 12, 0.17, 0.05, v2) <= 1e-11
    v3 = random_real_potential(3, rng)
    assert duality_conjugation_residual(3, 7, 0.6, 0.0, v3) <= 1e-11


def test_duality_hundred_random_configs():
    rng = np.random.default_rng(123)
    for _ in range(100):
        d = int(rng.integers(1, 4))
        v = random_real_potential(d, rng)
        q = int(rng.integers(max(3, 2 * d + 1), 49))
        p = int(rng.integers(1, q))
        while math.gcd(p, q) != 1:
            p = int(rng.integers(1, q))
        theta = float(rng.uniform())
        eps = float(rng.uniform(-0.2, 0.2))
        _, _, hh = cyclic_operators(p, q, theta, eps, v)
        resid = duality_conjugation_residual(p, q, theta, eps, v)
        assert resid <= 1e-10 * max(1.0, np.linalg.norm(hh, 2))


def test_scalar_dirichlet_matrix():
    h = scalar_dirichlet_matrix(GOLDEN, 0.1, amo(2.0), 5)
    m = np.arange(5)
    assert np.allclose(np.diag(h), 4.0 * np.cos(2 * np.pi * (0.1 + m * GOLDEN)))
    assert np.allclose(np.diag(h, 1), 1.0)


def test_block_scalar_roundtrip():
    # the block layout is the site-reversed scalar dual operator
    rng = np.random.default_rng(11)
    v = random_real_potential(2, rng)
    d, n = 2, 4
    dm = dirichlet_matrix(GOLDEN, 0.29, v, n)
    size = n * d
    scalar = np.zeros((size, size), dtype=complex)
    s = np.arange(size)
    scalar[s, s] = 2 * np.cos(2 * np.pi * (0.29 + s * GOLDEN))
    for k in range(1, d + 1):
        for m in range(size - k):
            scalar[m + k, m] += v.coeff(k)
            scalar[m, m + k] += v.coeff(-k)
    rev = scalar[::-1, ::-1]
    assert np.linalg.norm(rev - dm) <= 1e-12 * np.linalg.norm(dm)
