"""Rational-frequency duality identities, Haro-Puig formulas and DOS links.

The determinant identities here are exact pointwise statements; everything
Lyapunov-flavored is a finite-scale measurement with its uncertainty carried
along (cross-method gap, dead-bands around vanishing exponents).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable

import numpy as np

from .arithmetic import continued_fraction, rational_approx_divisible
from .cocycles import (
    CocycleSpec,
    acceleration,
    det_minus_identity_log,
    finite_lyapunov_spectrum,
    rational_lyapunov,
    theta_grid,
    top_lyapunov,
)
from .linalg import hermitian_eigen
from .operators import cyclic_operators, dirichlet_matrix, periodic_matrix, scalar_dirichlet_matrix
from .potentials import TrigPotential
from .reports import IdentityResidualReport

__all__ = [
    "ChambersReport",
    "DosSample",
    "HaroPuigReport",
    "chambers_decomposition",
    "det_identity_scalar",
    "det_identity_dual",
    "det_identity_periodic",
    "jensen_average",
    "haro_puig_residual",
    "acceleration_count_residual",
    "finite_dos",
    "thouless_residual",
    "rotation_number",
    "ids_relation_residual",
    "herman_lower_bound",
]


# ---------------------------------------------------------------------------
# determinant helpers

def _logabs_det(mat: np.ndarray) -> float:
    sign, logabs = np.linalg.slogdet(mat)
    return -math.inf if sign == 0 else float(logabs)


def _log_identity_report(name: str, params: dict, log_lhs: float, log_rhs: float,
                         tol: float) -> IdentityResidualReport:
    """Compare two log-magnitudes; fall back to absolute values near zeros."""
    flags: tuple[str, ...] = ()
    if not (math.isfinite(log_lhs) and math.isfinite(log_rhs)):
        flags = ("degenerate-common-zero",)
        a = 0.0 if not math.isfinite(log_lhs) else math.exp(min(log_lhs, 700.0))
        b = 0.0 if not math.isfinite(log_rhs) else math.exp(min(log_rhs, 700.0))
        resid = abs(a - b)
        return IdentityResidualReport(name, params, resid, resid, tol, flags)
    if min(log_lhs, log_rhs) < -18.0:  # both tiny: common zero of the identity
        resid = abs(math.exp(log_lhs) - math.exp(log_rhs))
        flags = ("near-common-zero",)
        return IdentityResidualReport(name, params, resid, resid, tol, flags)
    resid = abs(log_lhs - log_rhs)
    return IdentityResidualReport(name, params, resid, resid, tol, flags)


# ---------------------------------------------------------------------------
# Chambers decomposition

@dataclass(frozen=True)
class ChambersReport:
    p: int
    q: int
    E: complex
    epsilon: float
    a_constant: complex
    max_deviation: float
    D_at_zero: complex
    a_vs_D0_residual: float
    scale: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return (self.max_deviation <= self.tolerance * self.scale
                and self.a_vs_D0_residual <= self.tolerance * self.scale)


def _dual_determinants(p, q, E, epsilon, v, thetas) -> np.ndarray:
    mats = np.empty((len(thetas), q, q), dtype=complex)
    for i, th in enumerate(thetas):
        _, _, hh = cyclic_operators(p, q, th, epsilon, v)
        mats[i] = hh - complex(E) * np.eye(q)
    sign, logabs = np.linalg.slogdet(mats)
    return sign * np.exp(logabs)


def chambers_decomposition(p: int, q: int, E, epsilon: float, v: TrigPotential,
                           grid: int = 128, tolerance: float = 1e-9) -> ChambersReport:
    """Extract the theta-free part of det(H^_{p/q,theta,eps} - E).

    The determinant equals a(p/q,E,eps) + 2 (-1)^{q+1} cos(2 pi q theta); the
    report carries the sup-norm deviation from that shape over the grid and
    the consistency a = D(0) - 2 (-1)^{q+1}.
    """
    thetas = theta_grid(grid)
    dets = _dual_determinants(p, q, E, epsilon, v, thetas)
    cos_term = 2.0 * (-1.0) ** (q + 1) * np.cos(2.0 * np.pi * q * thetas)
    a_vals = dets - cos_term
    a = complex(np.mean(a_vals))
    max_dev = float(np.max(np.abs(dets - a - cos_term)))
    h0, _, _ = cyclic_operators(p, q, 0.0, epsilon, v)
    d0 = complex(np.linalg.det(h0 - complex(E) * np.eye(q)))
    a_vs_d0 = abs(a - (d0 - 2.0 * (-1.0) ** (q + 1)))
    scale = max(1.0, float(np.max(np.abs(dets))))
    return ChambersReport(p=p, q=q, E=complex(E), epsilon=epsilon, a_constant=a,
                          max_deviation=max_dev, D_at_zero=d0,
                          a_vs_D0_residual=a_vs_d0, scale=scale, tolerance=tolerance)


# ---------------------------------------------------------------------------
# determinant identities

def det_identity_scalar(p: int, q: int, theta, epsilon: float, E, v: TrigPotential,
                        tol: float = 1e-9) -> IdentityResidualReport:
    """|det(H_{p/q,theta,eps} - E)| = |det(A_q(p/q,theta) - I_2)|, pointwise."""
    h, _, _ = cyclic_operators(p, q, theta, epsilon, v)
    log_lhs = _logabs_det(h - complex(E) * np.eye(q))
    spec = CocycleSpec(Fraction(p, q), v, complex(E), epsilon, "scalar")
    log_rhs = det_minus_identity_log(spec, theta, q)
    return _log_identity_report(
        "det_scalar_vs_period_matrix",
        {"p": p, "q": q, "theta": theta, "epsilon": epsilon, "E": str(E)},
        log_lhs, log_rhs, tol)


def det_identity_dual(p: int, q: int, theta, epsilon: float, E, v: TrigPotential,
                      tol: float = 1e-9) -> IdentityResidualReport:
    """log|det(H^_{p/q} - E)| = log|det(M_r(p/r) - I_{2d})| + q log|v_{-d} e^{2 pi d eps}|."""
    d = v.degree
    if q % d != 0:
        raise ValueError(f"d = {d} must divide q = {q}")
    r = q // d
    if r < 3:
        raise ValueError("need q/d >= 3 block rows")
    _, _, hh = cyclic_operators(p, q, theta, epsilon, v)
    log_lhs = _logabs_det(hh - complex(E) * np.eye(q))
    spec = CocycleSpec(Fraction(p, q), v, complex(E), epsilon, "dual_block")
    const = q * (math.log(abs(v.coeff(-d))) + 2.0 * math.pi * d * epsilon)
    log_rhs = det_minus_identity_log(spec, theta, r) + const  # frequency d p/q = p/r
    return _log_identity_report(
        "det_dual_vs_block_period_matrix",
        {"p": p, "q": q, "d": d, "theta": theta, "epsilon": epsilon, "E": str(E)},
        log_lhs, log_rhs, tol)


def det_identity_periodic(alpha, theta, v: TrigPotential, n: int, E,
                          tol: float = 1e-8) -> IdentityResidualReport:
    """log|f_{E,n}| = n log|det B| + log|det(M_n - I_{2d})|, any theta, eps=0."""
    d = v.degree
    pm = periodic_matrix(alpha, theta, v, n)
    log_lhs = _logabs_det(pm - complex(E) * np.eye(n * d))
    spec = CocycleSpec(alpha, v, complex(E), 0.0, "dual_block")
    log_det_b = n * d * math.log(abs(v.coeff(-d)))
    log_rhs = log_det_b + det_minus_identity_log(spec, theta, n)
    return _log_identity_report(
        "det_periodic_vs_transfer",
        {"alpha": float(alpha), "theta": theta, "n": n, "E": str(E), "d": d},
        log_lhs, log_rhs, tol)


# ---------------------------------------------------------------------------
# Jensen averaging

@dataclass(frozen=True)
class JensenReport:
    lhs: float
    rhs: float
    z1: complex
    z2: complex
    root_product: complex
    residual: float
    tolerance: float
    flags: tuple[str, ...]

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance


def _unit_product_roots(beta: complex) -> tuple[complex, complex]:
    """Roots of z^2 + beta z + 1, computed so that z1 * z2 == 1 holds in floats."""
    s = np.sqrt(complex(beta) ** 2 - 4.0)
    big = -(beta + s) / 2.0 if abs(beta + s) >= abs(beta - s) else -(beta - s) / 2.0
    if big == 0:  # beta == +-2i edge; roots are +-i
        return 1j, -1j
    return big, 1.0 / big


def jensen_average(p: int, q: int, E, epsilon: float, v: TrigPotential,
                   grid: int = 1024, tolerance: float = 1e-3) -> JensenReport:
    """Quadrature of log|det(H^ - E)| against log max(|z1|, |z2|, 1).

    z1, z2 are the roots of z^2 + ((-1)^{q+1} D(0) - 2) z + 1 = 0; their
    product is the constant term 1.  Roots within 1e-3 of the unit circle
    make the quadrature singular and are flagged with a relaxed tolerance.
    """
    thetas = theta_grid(grid)
    dets = _dual_determinants(p, q, E, epsilon, v, thetas)
    mags = np.abs(dets)
    keep = mags > 1e-300
    lhs = float(np.mean(np.log(mags[keep]))) if np.any(keep) else -math.inf
    h0, _, _ = cyclic_operators(p, q, 0.0, epsilon, v)
    d0 = complex(np.linalg.det(h0 - complex(E) * np.eye(q)))
    beta = (-1.0) ** (q + 1) * d0 - 2.0
    z1, z2 = _unit_product_roots(beta)
    rhs = math.log(max(abs(z1), abs(z2), 1.0))
    flags = []
    if int(np.sum(~keep)):
        flags.append(f"excluded-zeros:{int(np.sum(~keep))}")
    tol = tolerance
    if min(abs(abs(z1) - 1.0), abs(abs(z2) - 1.0)) < 1e-3:
        flags.append("near-singular-quadrature")
        tol = max(tolerance, 5e-3)
    return JensenReport(lhs=lhs, rhs=rhs, z1=complex(z1), z2=complex(z2),
                        root_product=complex(z1 * z2), residual=abs(lhs - rhs),
                        tolerance=tol, flags=tuple(flags))


# ---------------------------------------------------------------------------
# Haro-Puig and the acceleration count

@dataclass(frozen=True)
class HaroPuigReport:
    residual: float
    L1_scalar: float
    dual_exponents: tuple[float, ...]
    sum_positive: float
    constant: float
    band: float
    flagged: tuple[int, ...]
    residual_alternatives: tuple[float, ...]
    mode: str
    scale: int

    @property
    def ambiguous(self) -> bool:
        return len(self.flagged) > 0


def _hp_combine(l1: float, exps: np.ndarray, const: float, band: float,
                mode: str, n: int) -> HaroPuigReport:
    pos = exps[exps >= 0.0]
    base = abs(l1 - float(pos.sum()) - const)
    flagged = tuple(int(j) for j, x in enumerate(exps) if abs(x) <= band)
    alternatives = []
    if flagged:
        banded = [x for x in exps if abs(x) <= band]
        firm = sum(x for x in exps if x > band)
        alternatives = [abs(l1 - firm - const),
                        abs(l1 - (firm + sum(banded)) - const)]
    return HaroPuigReport(residual=base, L1_scalar=l1,
                          dual_exponents=tuple(float(x) for x in exps),
                          sum_positive=float(pos.sum()), constant=const,
                          band=band, flagged=flagged,
                          residual_alternatives=tuple(alternatives),
                          mode=mode, scale=n)


def haro_puig_residual(alpha, E, epsilon: float, v: TrigPotential, n: int = 4000,
                       grid: int = 257, band: float | None = None,
                       mode: str = "direct", rational_grid: int = 64,
                       rational_qmax: int = 150) -> HaroPuigReport:
    """Defect of L^1(A_{E,eps}) = sum_{j: L^_j >= 0} L^_j(A^_E^eps) + log|v_{-d} e^{2 pi d eps}|.

    All exponents at finite scale n.  Exponents inside the dead band
    |L^_j| <= band (default 3x the cross-method gap) make the positive-part
    sum ambiguous; both inclusion choices are reported.
    """
    d = v.degree
    const = math.log(abs(v.coeff(-d))) + 2.0 * math.pi * d * epsilon
    if mode == "direct":
        scal = CocycleSpec(alpha, v, complex(E), epsilon, "scalar")
        l1 = top_lyapunov(scal, n, grid)
        spectrum = finite_lyapunov_spectrum(
            CocycleSpec(alpha, v, complex(E), epsilon, "dual_one_step"), n, grid)
        exps = np.asarray(spectrum.exponents)
        if band is None:
            band = 3.0 * spectrum.cross_method_gap
        return _hp_combine(l1, exps, const, band, mode, n)
    if mode != "rational":
        raise ValueError("mode must be 'direct' or 'rational'")
    cf = continued_fraction(float(alpha), 40)
    idx = max((i for i in range(len(cf.q)) if cf.q[i] * d <= rational_qmax),
              default=len(cf.q) - 1)
    if d == 1:
        pr, qr = cf.p[idx], cf.q[idx]  # d | q holds trivially; keep the convergent
    else:
        pr, qr = rational_approx_divisible(cf, d, idx)
        while qr < cf.q[idx] and idx > 0:
            # reduction ate the denominator; fall back to a lower convergent
            idx -= 1
            pr, qr = rational_approx_divisible(cf, d, idx)
    thetas = theta_grid(rational_grid)
    l1_vals, sums = [], []
    for th in thetas:
        rs = rational_lyapunov(pr % qr, qr, CocycleSpec(Fraction(pr, qr), v, complex(E),
                                                        epsilon, "scalar"), th)
        l1_vals.append(rs.partial_sums[0])
        rd = rational_lyapunov(pr % qr, qr, CocycleSpec(Fraction(pr, qr), v, complex(E),
                                                        epsilon, "dual_one_step"), th)
        sums.append(np.asarray(rd.exponents))
    l1 = float(np.mean(l1_vals))
    exps = np.mean(np.stack(sums), axis=0)
    if band is None:
        band = 1e-2
    return _hp_combine(l1, exps, const, band, mode, qr)


@dataclass(frozen=True)
class AccelerationCountReport:
    kappa: float
    count: float
    count_choices: tuple[float, ...]
    residual: float
    dual_exponents_eps0: tuple[float, ...]
    band: float
    flags: tuple[str, ...]


def acceleration_count_residual(alpha, E, epsilon: float, v: TrigPotential,
                                n: int = 2000, grid: int = 257, delta: float = 0.01,
                                band: float | None = None) -> AccelerationCountReport:
    """Measured acceleration against the dual-exponent count.

    kappa(A_{E,eps}) should equal #{j <= d : 0 <= L^_j(0) <= 2 pi eps}; at
    eps = 0 the degenerate form is half the number of vanishing exponents
    among all 2d.  Counts whose membership depends on the dead band are
    enumerated instead of silently resolved.
    """
    if epsilon < 0:
        raise ValueError("epsilon >= 0 required")
    d = v.degree
    scal = CocycleSpec(alpha, v, complex(E), 0.0, "scalar")
    rep = acceleration(scal, epsilon_center=epsilon, delta=delta, n=n, grid=grid)
    spectrum = finite_lyapunov_spectrum(
        CocycleSpec(alpha, v, complex(E), 0.0, "dual_one_step"), n, grid)
    exps = np.asarray(spectrum.exponents)
    if band is None:
        band = max(3.0 * spectrum.cross_method_gap, 1e-3)
    flags = []
    if epsilon == 0.0:
        zeros = np.sum(np.abs(exps) <= band)
        count = 0.5 * float(zeros)
        choices = (count,)
        if zeros and np.any((np.abs(exps) > band) & (np.abs(exps) <= 2 * band)):
            flags.append("band-edge")
    else:
        top = exps[:d]
        lo, hi = 0.0, 2.0 * math.pi * epsilon
        certain = np.sum((top >= lo + band) & (top <= hi - band))
        ambiguous = np.sum(((top >= lo - band) & (top < lo + band))
                           | ((top > hi - band) & (top <= hi + band)))
        count = float(certain + ambiguous // 2)
        choices = tuple(float(certain + k) for k in range(int(ambiguous) + 1))
        if ambiguous:
            flags.append("window-edge-ambiguous")
    residual = min(abs(rep.kappa - c) for c in choices)
    return AccelerationCountReport(kappa=rep.kappa, count=count, count_choices=choices,
                                   residual=residual,
                                   dual_exponents_eps0=tuple(float(x) for x in exps),
                                   band=band, flags=tuple(flags))


# ---------------------------------------------------------------------------
# density of states, Thouless, rotation number

@dataclass(frozen=True)
class DosSample:
    n: int
    theta: float
    eigenvalues: np.ndarray  # ascending, length n*d

    def cdf(self, E) -> float | np.ndarray:
        pos = np.searchsorted(self.eigenvalues, np.asarray(E, dtype=float), side="right")
        out = pos / len(self.eigenvalues)
        return float(out) if np.ndim(E) == 0 else out

    def log_potential(self, E: complex) -> float:
        """Per-site logarithmic potential of the sample at E."""
        return float(np.mean(np.log(np.abs(self.eigenvalues - complex(E)))))


def finite_dos(alpha, theta, v: TrigPotential, n: int) -> DosSample:
    """Eigenvalues of the nd-site Dirichlet dual volume (eps = 0, real v)."""
    h = dirichlet_matrix(alpha, theta, v, n)
    w, _ = hermitian_eigen(h)
    return DosSample(n=n, theta=float(theta), eigenvalues=np.asarray(w, dtype=float))


@dataclass(frozen=True)
class ThoulessReport:
    residual: float
    lhs: float
    rhs: float
    E: complex
    eta: float
    eta_comparison: float | None
    flags: tuple[str, ...]


def thouless_residual(alpha, v: TrigPotential, E, n: int, theta: float = 0.0,
                      lyap_scale: int = 2000, grid: int = 257,
                      etas: tuple[float, float] = (1e-2, 1e-3)) -> ThoulessReport:
    """Defect of L^d(alpha, A^_E) + log|v_d| = integral log|E'-E| dN^(E').

    Real E is shifted to E + i eta for eta in ``etas`` (no principal-value
    quadrature); the report keeps the small-eta value and the spread between
    the two regularizations.
    """
    dos = finite_dos(alpha, theta, v, n)
    d = v.degree

    def one(ec: complex) -> tuple[float, float]:
        spec = CocycleSpec(alpha, v, ec, 0.0, "dual_one_step")
        sp = finite_lyapunov_spectrum(spec, lyap_scale, grid)
        lhs = sp.partial_sums[d - 1] + math.log(abs(v.coeff(d)))
        rhs = dos.log_potential(ec)
        return lhs, rhs

    ec = complex(E)
    if ec.imag != 0.0:
        lhs, rhs = one(ec)
        return ThoulessReport(residual=abs(lhs - rhs), lhs=lhs, rhs=rhs, E=ec,
                              eta=0.0, eta_comparison=None, flags=())
    vals = [one(complex(ec.real, eta)) for eta in etas]
    resids = [abs(a - b) for a, b in vals]
    spread = abs(resids[0] - resids[-1])
    lhs, rhs = vals[-1]
    return ThoulessReport(residual=resids[-1], lhs=lhs, rhs=rhs,
                          E=complex(ec.real, etas[-1]), eta=etas[-1],
                          eta_comparison=spread, flags=("regularized",))


@dataclass(frozen=True)
class RotationResult:
    rho: float
    steps: int
    burn_in: int
    drift: float  # half-sample mean difference, a convergence proxy
    flags: tuple[str, ...]


def rotation_number(alpha, A: Callable[[float], np.ndarray], iterations: int = 100_000,
                    burn_in: int = 1000, x0: float = 0.0, y0: float = 0.17,
                    drift_tol: float = 5e-3) -> RotationResult:
    """Fibered rotation number of a real 2x2 cocycle, mod 1.

    Averages the per-step angle increment of the projective action along the
    orbit (x, y) -> (x + alpha, y + psi(x, y)).  Increments are taken in the
    branch (-1/4, 3/4], which is the continuous branch for Schrodinger-form
    cocycles: A(x) maps the direction (0, 1) to (-1, 0) for every x, pinning
    psi(x, 1/4) = 1/4, and monotonicity keeps the rest of the fiber within
    half a turn of that anchor.  (A symmetric cut at +-1/2 flips sign noisily
    when the orbit sits at a half-turn, i.e. below the spectrum.)  The
    winding of A(.)e_1 over the torus is checked first; nonzero winding
    means A is not homotopic to the identity.
    """
    a = float(alpha)
    # empirical homotopy check: winding of the first column
    probe = np.linspace(0.0, 1.0, 257)
    ang = []
    for t in probe:
        m = np.asarray(A(t), dtype=float)
        ang.append(math.atan2(m[1, 0], m[0, 0]))
    ang = np.unwrap(np.asarray(ang))
    winding = (ang[-1] - ang[0]) / (2.0 * math.pi)
    if abs(winding - round(winding)) > 0.25:
        winding = round(winding)  # noisy probe; closest integer
    if round(winding) != 0:
        raise ValueError(f"cocycle has winding {round(winding)}; not homotopic to identity")

    x, y = float(x0), float(y0)
    total = 0.0
    kept = 0
    half_marks = []
    n_keep = iterations - burn_in
    for step in range(iterations):
        m = A(x)
        c, s = math.cos(2.0 * math.pi * y), math.sin(2.0 * math.pi * y)
        wx = m[0, 0] * c + m[0, 1] * s
        wy = m[1, 0] * c + m[1, 1] * s
        y_new = math.atan2(wy, wx) / (2.0 * math.pi)
        delta = (y_new - y) % 1.0
        if delta > 0.75:
            delta -= 1.0
        if step >= burn_in:
            total += delta
            kept += 1
            if kept == n_keep // 2:
                half_marks.append(total / kept)
        x = (x + a) % 1.0
        y = y_new % 1.0
    mean = total / max(kept, 1)
    drift = abs(half_marks[0] - mean) if half_marks else math.inf
    flags = ("slow-convergence",) if drift > drift_tol else ()
    return RotationResult(rho=mean % 1.0, steps=iterations, burn_in=burn_in,
                          drift=drift, flags=flags)


def ids_relation_residual(alpha, v: TrigPotential, E: float, n: int = 600,
                          iterations: int = 100_000) -> dict:
    """|N(E) - 1 + 2 rho(alpha, A_E)| with N from scalar Dirichlet counting."""
    h = scalar_dirichlet_matrix(alpha, 0.0, v, n)
    w, _ = hermitian_eigen(h)
    big_n = float(np.sum(w <= float(E)) / n)
    spec = CocycleSpec(alpha, v, complex(E), 0.0, "scalar")

    def a_fun(x):
        m = np.zeros((2, 2))
        m[0, 0] = float(E) - v.eval(x).real
        m[0, 1] = -1.0
        m[1, 0] = 1.0
        return m

    rot = rotation_number(alpha, a_fun, iterations=iterations)
    # rho is defined mod 1, so the relation N = 1 - 2 rho is defined mod 2
    resid = abs((big_n - 1.0 + 2.0 * rot.rho + 1.0) % 2.0 - 1.0)
    return {"residual": resid, "N": big_n, "rho": rot.rho,
            "rho_drift": rot.drift, "flags": list(rot.flags), "n": n,
            "iterations": iterations}


# ---------------------------------------------------------------------------
# Herman's bound

@dataclass(frozen=True)
class HermanReport:
    value: float
    n: int
    grid: int
    excluded: int
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.value >= -self.tolerance


def herman_lower_bound(alpha, v: TrigPotential, E, n: int, grid: int = 512,
                       tolerance: float = 1e-2) -> HermanReport:
    """(1/n) <log |det(P_n - E)|>_theta; subharmonicity forces this >= 0.

    Grid points where |f| underflows are excluded (log-singular integrand)
    and counted in the report.
    """
    if n < 3:
        raise ValueError("periodic volume needs n >= 3")
    thetas = theta_grid(grid)
    d = v.degree
    mats = np.empty((grid, n * d, n * d), dtype=complex)
    for i, th in enumerate(thetas):
        mats[i] = periodic_matrix(alpha, th, v, n) - complex(E) * np.eye(n * d)
    sign, logabs = np.linalg.slogdet(mats)
    ok = np.abs(sign) > 0.5
    vals = logabs[ok & np.isfinite(logabs)]
    value = float(np.mean(vals) / n) if len(vals) else -math.inf
    return HermanReport(value=value, n=n, grid=grid,
                        excluded=int(grid - len(vals)), tolerance=tolerance)
