import math

import numpy as np
import pytest

from qpcocycle.cocycles import CocycleSpec, cocycle_product
from qpcocycle.duality import (
    _unit_product_roots,
    haro_puig_residual,
    acceleration_count_residual,
    chambers_decomposition,
    det_identity_dual,
    det_identity_periodic,
    det_identity_scalar,
    finite_dos,
    herman_lower_bound,
    ids_relation_residual,
    jensen_average,
    rotation_number,
    thouless_residual,
)
from qpcocycle.operators import cyclic_operators, periodic_matrix
from qpcocycle.potentials import amo, random_real_potential

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


# ---------------------------------------------------------------------------
# Chambers

def test_chambers_exact_q3():
    rep = chambers_decomposition(1, 3, 0.5, 0.0, amo(2.0), grid=64)
    assert rep.max_deviation <= 1e-10
    assert rep.a_vs_D0_residual <= 1e-10


def test_chambers_d2_nonzero_eps():
    rng = np.random.default_rng(17)
    v = random_real_potential(2, rng)
    rep = chambers_decomposition(5, 12, 0.9, 0.07, v, grid=128)
    assert rep.max_deviation <= 1e-9 * rep.scale
    assert rep.passed


# ---------------------------------------------------------------------------
# determinant identities

def test_det_identity_scalar_exact():
    r = det_identity_scalar(2, 5, 0.13, 0.0, 0.4, amo(2.0))
    assert r.residual_rel <= 1e-9
    r = det_identity_scalar(3, 8, float(np.random.default_rng(0).uniform()), 0.1,
                            0.7, amo(1.5))
    assert r.residual_rel <= 1e-9


def test_det_identity_scalar_at_periodic_eigenvalue():
    # pick E equal to an eigenvalue of the q x q operator: common zero branch
    h, _, _ = cyclic_operators(2, 5, 0.13, 0.0, amo(2.0))
    e0 = float(np.linalg.eigvalsh(h.real)[2])
    r = det_identity_scalar(2, 5, 0.13, 0.0, e0, amo(2.0))
    assert "near-common-zero" in r.flags or r.residual_rel <= 1e-8
    assert r.residual_abs <= 1e-6


def test_det_identity_dual_d1_and_d2():
    r = det_identity_dual(2, 5, 0.3, 0.0, 0.1, amo(2.0))
    assert r.residual_rel <= 1e-9
    rng = np.random.default_rng(31)
    v = random_real_potential(2, rng)
    r = det_identity_dual(5, 12, 0.21, 0.05, 0.6, v)
    assert r.residual_rel <= 1e-8


def test_det_identity_dual_requires_divisibility():
    v = random_real_potential(2, np.random.default_rng(1))
    with pytest.raises(ValueError):
        det_identity_dual(2, 5, 0.1, 0.0, 0.3, v)


def test_det_identity_periodic():
    r = det_identity_periodic(GOLDEN, 0.13, amo(2.0), 6, 0.5)
    assert r.residual_rel <= 1e-8
    r = det_identity_periodic(GOLDEN, 0.2, amo(1.5), 3, -0.4)
    assert r.residual_rel <= 1e-9
    v3 = random_real_potential(3, np.random.default_rng(4))
    r = det_identity_periodic(GOLDEN, 0.07, v3, 8, -0.2)
    assert r.residual_rel <= 1e-8


# ---------------------------------------------------------------------------
# Jensen

def test_jensen_root_product_and_accuracy():
    rep = jensen_average(2, 5, 0.3 + 0.4j, 0.0, amo(2.0), grid=1024)
    assert abs(rep.root_product - 1.0) <= 1e-12
    if "near-singular-quadrature" not in rep.flags:
        assert rep.residual <= 1e-3


def test_jensen_unimodular_roots_forced_zero():
    # scan for an energy whose Jensen quadratic has both roots on the circle
    v = amo(2.0)
    target = None
    for e in np.linspace(-1.0, 1.0, 81):
        h, _, _ = cyclic_operators(2, 5, 0.0, 0.0, v)
        d0 = complex(np.linalg.det(h - e * np.eye(5)))
        beta = (-1.0) ** 6 * d0 - 2.0
        if abs(beta.imag) < 1e-12 and abs(beta.real) < 2.0:
            target = float(e)
            break
    assert target is not None
    rep = jensen_average(2, 5, target, 0.0, v, grid=4096)
    assert abs(rep.rhs) <= 1e-12
    assert abs(rep.lhs) <= 5e-3


def test_unit_product_roots_extreme_beta():
    z1, z2 = _unit_product_roots(1e30 + 0j)
    assert abs(z1 * z2 - 1.0) <= 1e-12
    z1, z2 = _unit_product_roots(0.5 + 0.1j)
    assert abs(z1 * z2 - 1.0) <= 1e-12


# ---------------------------------------------------------------------------
# DOS, Thouless

def test_finite_dos_free_laplacian():
    dos = finite_dos(0.0, 0.25, amo(1.0), 40)
    expect = np.sort(2.0 * np.cos(np.arange(1, 41) * math.pi / 41.0))
    assert np.allclose(dos.eigenvalues, expect, atol=1e-10)


def test_finite_dos_trace_and_cdf():
    rng = np.random.default_rng(2)
    v = random_real_potential(2, rng)
    from qpcocycle.operators import dirichlet_matrix

    n = 30
    dos = finite_dos(GOLDEN, 0.1, v, n)
    tr = np.trace(dirichlet_matrix(GOLDEN, 0.1, v, n)).real
    assert np.sum(dos.eigenvalues) == pytest.approx(tr, rel=1e-9)
    assert dos.cdf(-1e9) == 0.0 and dos.cdf(1e9) == 1.0


def test_dos_scale_doubling_sup_distance():
    v = amo(2.0)
    d200 = finite_dos(GOLDEN, 0.0, v, 200)
    d400 = finite_dos(GOLDEN, 0.0, v, 400)
    es = np.linspace(-6.0, 6.0, 50)
    gap = np.max(np.abs(d200.cdf(es) - d400.cdf(es)))
    assert gap <= 0.02


def test_thouless_off_axis():
    rep = thouless_residual(GOLDEN, amo(1.0), 5j, 400, lyap_scale=800, grid=129)
    assert rep.residual <= 5e-2


def test_thouless_large_energy():
    rep = thouless_residual(GOLDEN, amo(1.0), 100.0 + 1j, 400, lyap_scale=200, grid=65)
    assert rep.residual <= 1e-2
    assert rep.lhs == pytest.approx(math.log(100.0), abs=0.05)


def test_thouless_real_energy_regularized():
    rep = thouless_residual(GOLDEN, amo(2.0), 0.1, 300, lyap_scale=800, grid=129)
    assert "regularized" in rep.flags
    assert rep.residual <= 1e-1


# ---------------------------------------------------------------------------
# rotation number / IDS

def test_rotation_number_constant_rotation():
    th0 = 0.2345

    def rot(_x):
        c, s = math.cos(2 * math.pi * th0), math.sin(2 * math.pi * th0)
        return np.array([[c, -s], [s, c]])

    rr = rotation_number(GOLDEN, rot, iterations=100_000, burn_in=100)
    assert rr.rho == pytest.approx(th0, abs=1e-6)


def test_rotation_number_identity():
    rr = rotation_number(GOLDEN, lambda x: np.eye(2), iterations=2000, burn_in=10)
    assert rr.rho == 0.0


def test_rotation_number_below_spectrum():
    v = amo(1.0)

    def a_fun(x):
        return np.array([[-5.0 - float(v.eval(x).real), -1.0], [1.0, 0.0]])

    rr = rotation_number(GOLDEN, a_fun, iterations=30_000, burn_in=100)
    assert rr.rho == pytest.approx(0.5, abs=2e-2)


def test_ids_relation_extremes():
    rep = ids_relation_residual(GOLDEN, amo(1.0), -10.0, n=200, iterations=30_000)
    assert rep["residual"] <= 2e-2
    rep = ids_relation_residual(GOLDEN, amo(1.0), 10.0, n=200, iterations=30_000)
    assert rep["residual"] <= 2e-2


def test_rotation_monotone_in_energy():
    v = amo(2.0)
    es = [-5.0, -2.0, 0.0, 2.0, 5.0]
    rhos = []
    for e in es:
        def a_fun(x, e=e):
            return np.array([[e - float(v.eval(x).real), -1.0], [1.0, 0.0]])
        r = rotation_number(GOLDEN, a_fun, iterations=30_000, burn_in=100).rho
        rhos.append(min(r, 1.0 - r))  # canonical representative in [0, 1/2]
    for a, b in zip(rhos, rhos[1:]):
        assert b <= a + 2e-2


# ---------------------------------------------------------------------------
# Herman

def test_herman_examples():
    rep = herman_lower_bound(GOLDEN, amo(2.0), 0.0, 8, grid=512)
    assert rep.value >= -1e-2
    v = random_real_potential(2, np.random.default_rng(5))
    rep = herman_lower_bound(GOLDEN, v, 0.37, 6, grid=512)
    assert rep.value >= -1e-2


def test_herman_degenerate_grid_matches_pointwise():
    # a one-point grid evaluates log|det(P(theta_0) - E)| / n exactly
    v = amo(1.5)
    rep = herman_lower_bound(0.0, v, 0.3, 3, grid=1)
    m = periodic_matrix(0.0, 0.0, v, 3) - 0.3 * np.eye(3)
    want = math.log(abs(np.linalg.det(m))) / 3.0
    assert rep.value == pytest.approx(want, rel=1e-12)


# ---------------------------------------------------------------------------
# acceleration count (cheap scales)

def test_acceleration_count_constant_like():
    # far outside the spectrum: kappa = 0 and no dual exponent in [0, 2 pi eps]
    rep = acceleration_count_residual(GOLDEN, 10.0, 0.03, amo(0.5), n=400, grid=65)
    assert rep.residual <= 0.1
    assert rep.count == 0.0


def test_haro_puig_rational_mode():
    from qpcocycle.harness import mid_spectrum_energy
    from qpcocycle.potentials import random_real_potential

    e = mid_spectrum_energy(GOLDEN, amo(2.0))
    rep = haro_puig_residual(GOLDEN, e, 0.0, amo(2.0), mode="rational",
                             rational_grid=64, rational_qmax=150)
    assert rep.mode == "rational"
    assert rep.scale >= 100  # a deep convergent, not a collapsed one
    assert rep.residual <= 5e-2
    v2 = random_real_potential(2, np.random.default_rng(9))
    rep = haro_puig_residual(GOLDEN, 0.5, 0.05, v2, mode="rational",
                             rational_grid=32, rational_qmax=120)
    assert rep.scale % 2 == 0  # d | q preserved
    assert rep.residual <= 5e-2
