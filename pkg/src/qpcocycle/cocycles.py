"""Transfer-matrix cocycles, finite-scale Lyapunov spectra and acceleration.

Three cocycle "sides" share one CocycleSpec:

* ``scalar``        -- the 2x2 Schrodinger transfer matrix over frequency alpha,
                       complexified by evaluating v at theta + i epsilon;
* ``dual_one_step`` -- the 2d x 2d companion-form transfer matrix of the dual
                       long-range operator, over frequency alpha;
* ``dual_block``    -- the 2d x 2d block transfer matrix of the dual operator
                       in Jacobi form, over frequency d * alpha.

Lyapunov spectra come from two routes: a per-step QR (modified Gram-Schmidt)
cascade with per-column log accumulators, and exterior-power norms tracked
with rescaling.  The second is the definition; the gap between them is
reported on every spectrum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from .linalg import ScaledMatrix, compound_batch, general_eigenvalues
from .operators import build_blocks
from .potentials import TrigPotential
from .reports import IdentityResidualReport

__all__ = [
    "CocycleSpec",
    "LyapunovSpectrum",
    "AccelerationReport",
    "transfer_matrix",
    "transfer_matrix_batch",
    "cocycle_product",
    "finite_lyapunov_spectrum",
    "top_lyapunov",
    "uniform_upper_envelope",
    "rational_lyapunov",
    "compound_log_norms",
    "det_minus_identity_log",
    "structural_residuals",
    "exponent_shift_residual",
    "acceleration",
    "classify_energy",
    "theta_grid",
]

SIDES = ("scalar", "dual_one_step", "dual_block")


@dataclass(frozen=True)
class CocycleSpec:
    alpha: float | Fraction
    v: TrigPotential
    E: complex
    epsilon: float = 0.0
    side: str = "scalar"

    def __post_init__(self):
        if self.side not in SIDES:
            raise ValueError(f"side must be one of {SIDES}")

    @property
    def frequency(self) -> float:
        a = float(self.alpha)
        return a * self.v.degree if self.side == "dual_block" else a

    @property
    def size(self) -> int:
        return 2 if self.side == "scalar" else 2 * self.v.degree

    def with_epsilon(self, eps: float) -> "CocycleSpec":
        return replace(self, epsilon=eps)


def theta_grid(grid_size: int) -> np.ndarray:
    """Uniform periodic grid; its plain mean is the trapezoid rule on T."""
    if grid_size < 1:
        raise ValueError("grid_size >= 1")
    return np.arange(grid_size, dtype=float) / grid_size


def transfer_matrix_batch(spec: CocycleSpec, thetas) -> np.ndarray:
    """Stack of transfer matrices at the given phases, shape (m, k, k)."""
    th = np.atleast_1d(np.asarray(thetas, dtype=complex))
    m = th.shape[0]
    v, E, eps = spec.v, complex(spec.E), spec.epsilon
    d = v.degree

    if spec.side == "scalar":
        a = np.zeros((m, 2, 2), dtype=complex)
        a[:, 0, 0] = E - v.eval(th + 1j * eps)
        a[:, 0, 1] = -1.0
        a[:, 1, 0] = 1.0
        return a

    if spec.side == "dual_one_step":
        gamma = v.coeff(-d) * math.exp(2.0 * math.pi * d * eps)
        a = np.zeros((m, 2 * d, 2 * d), dtype=complex)
        for j in range(d - 1):
            a[:, 0, j] = -v.coeff(j + 1 - d) * math.exp(2.0 * math.pi * (d - 1 - j) * eps)
        a[:, 0, d - 1] = E - 2.0 * np.cos(2.0 * np.pi * th)
        for mm in range(1, d + 1):
            a[:, 0, d - 1 + mm] = -v.coeff(mm) * math.exp(-2.0 * math.pi * mm * eps)
        a[:, 0, :] /= gamma
        idx = np.arange(1, 2 * d)
        a[:, idx, idx - 1] = 1.0
        return a

    # dual_block
    blocks = build_blocks(v, float(spec.alpha), 0.0, eps)
    b_inv = np.linalg.inv(blocks.B)
    a = np.zeros((m, 2 * d, 2 * d), dtype=complex)
    offs = 2.0 * np.cos(2.0 * np.pi * (th[:, None] + (d - 1 - np.arange(d))[None, :] * float(spec.alpha)))
    c_const = blocks.C(0.0)
    np.fill_diagonal(c_const, 0.0)
    c = np.broadcast_to(c_const, (m, d, d)).copy()
    c[:, np.arange(d), np.arange(d)] = offs
    a[:, :d, :d] = (E * np.eye(d) - c) @ b_inv
    a[:, :d, d:] = -blocks.B_tilde
    a[:, d:, :d] = b_inv
    return a


def transfer_matrix(spec: CocycleSpec, theta) -> np.ndarray:
    return transfer_matrix_batch(spec, [theta])[0]


def cocycle_product(spec: CocycleSpec, theta, n: int) -> ScaledMatrix:
    """A_n(theta) = A(theta+(n-1)w) ... A(theta) with log-scale renormalization."""
    if n < 1:
        raise ValueError("n >= 1 required")
    w = spec.frequency
    out = ScaledMatrix(transfer_matrix(spec, theta))
    for j in range(1, n):
        out = out.lmul(transfer_matrix(spec, theta + j * w))
    return out


def _mgs(z: np.ndarray):
    """Modified Gram-Schmidt on a stack (m, n, k): returns Q and |diag R|."""
    mcount, _, k = z.shape
    q = z.copy()
    diag = np.empty((mcount, k))
    for c in range(k):
        for b in range(c):
            proj = np.einsum("mi,mi->m", q[:, :, b].conj(), q[:, :, c])
            q[:, :, c] -= proj[:, None] * q[:, :, b]
        nrm = np.linalg.norm(q[:, :, c], axis=1)
        diag[:, c] = nrm
        q[:, :, c] /= np.maximum(nrm, 1e-300)[:, None]
    return q, diag


def _qr_cascade_logs(spec: CocycleSpec, thetas: np.ndarray, n: int) -> np.ndarray:
    """Per-theta accumulated log |R_jj| over n steps, shape (m, k)."""
    k = spec.size
    m = len(thetas)
    w = spec.frequency
    q = np.broadcast_to(np.eye(k, dtype=complex), (m, k, k)).copy()
    acc = np.zeros((m, k))
    for j in range(n):
        a = transfer_matrix_batch(spec, thetas + j * w)
        q, diag = _mgs(a @ q)
        acc += np.log(np.maximum(diag, 1e-300))
    return acc


def compound_log_norms(spec: CocycleSpec, thetas: np.ndarray, n: int,
                        orders: list[int]) -> dict[int, np.ndarray]:
    """Per-theta log ||wedge^j A_n(theta)|| for each requested order j."""
    k = spec.size
    m = len(thetas)
    w = spec.frequency
    prods = {}
    logacc = {}
    for j in orders:
        c = math.comb(k, j)
        prods[j] = np.broadcast_to(np.eye(c, dtype=complex), (m, c, c)).copy()
        logacc[j] = np.zeros(m)
    for step in range(n):
        a = transfer_matrix_batch(spec, thetas + step * w)
        for j in orders:
            cj = a if j == 1 else compound_batch(a, j)
            p = cj @ prods[j]
            s = np.maximum(np.max(np.abs(p), axis=(1, 2)), 1e-300)
            prods[j] = p / s[:, None, None]
            logacc[j] += np.log(s)
    out = {}
    for j in orders:
        norms = np.linalg.svd(prods[j], compute_uv=False)[:, 0]
        out[j] = logacc[j] + np.log(np.maximum(norms, 1e-300))
    return out


@dataclass(frozen=True)
class LyapunovSpectrum:
    """Finite-scale exponents L_1 >= ... >= L_k with both-route bookkeeping."""

    exponents: tuple[float, ...]  # primary (QR cascade) estimates
    exponents_compound: tuple[float, ...] | None
    scale: int
    grid_size: int
    method: str
    cross_method_gap: float

    @property
    def size(self) -> int:
        return len(self.exponents)

    @property
    def partial_sums(self) -> tuple[float, ...]:
        return tuple(np.cumsum(self.exponents))

    def symmetry_defect(self) -> float:
        """max_j |L_j + L_{k+1-j}|; small for complex-symplectic cocycles."""
        ex = self.exponents
        return max(abs(ex[j] + ex[len(ex) - 1 - j]) for j in range(len(ex)))


def finite_lyapunov_spectrum(spec: CocycleSpec, n: int, grid_size: int = 257,
                             compound_check: bool = True) -> LyapunovSpectrum:
    """theta-averaged finite-scale spectrum at scale n.

    Primary route: QR cascade, re-orthonormalized every step.  Secondary:
    exterior-power norms (the definition of the partial sums L^j); the max
    partial-sum discrepancy is reported as cross_method_gap.
    """
    if n < 1:
        raise ValueError("n >= 1 required")
    thetas = theta_grid(grid_size)
    acc = _qr_cascade_logs(spec, thetas, n)
    acc_sorted = -np.sort(-acc, axis=1)  # descending per theta
    exps_qr = acc_sorted.mean(axis=0) / n

    exps_comp = None
    gap = math.nan
    if compound_check:
        k = spec.size
        lognorms = compound_log_norms(spec, thetas, n, list(range(1, k + 1)))
        psums = np.array([lognorms[j].mean() / n for j in range(1, k + 1)])
        exps_comp = np.diff(np.concatenate(([0.0], psums)))
        gap = float(np.max(np.abs(np.cumsum(exps_qr) - psums)))
    return LyapunovSpectrum(
        exponents=tuple(float(x) for x in exps_qr),
        exponents_compound=None if exps_comp is None else tuple(float(x) for x in exps_comp),
        scale=n,
        grid_size=grid_size,
        method="qr_cascade",
        cross_method_gap=gap,
    )


def top_lyapunov(spec: CocycleSpec, n: int, grid_size: int = 257) -> float:
    """L^1_(n): theta-averaged (1/n) log ||A_n||, by rescaled products."""
    thetas = theta_grid(grid_size)
    lognorms = compound_log_norms(spec, thetas, n, [1])[1]
    return float(lognorms.mean() / n)


def uniform_upper_envelope(spec: CocycleSpec, n: int, grid_size: int = 257) -> dict:
    """Empirical sup over the grid of (1/n) log ||wedge^j A_n(theta)||, per j.

    The uniform upper-semicontinuity bound holds beyond a non-constructive
    scale; this reports the measured envelope next to the grid mean so the
    sup-vs-mean gap can be inspected, never asserted.
    """
    thetas = theta_grid(grid_size)
    lognorms = compound_log_norms(spec, thetas, n, list(range(1, spec.size + 1)))
    return {j: {"sup": float(vals.max() / n), "mean": float(vals.mean() / n)}
            for j, vals in lognorms.items()}


def rational_lyapunov(p: int, q: int, spec: CocycleSpec, theta,
                      method: str = "eigen") -> LyapunovSpectrum:
    """Pointwise spectrum at exact rational frequency p/q.

    L^j(p/q, A, theta) = (1/q) log rho(wedge^j A_q); with ``method='eigen'``
    the spectral radii come from the eigenvalues of the period matrix itself
    (the two routes agree because eigenvalues of the compound are products).
    """
    if math.gcd(p, q) != 1:
        raise ValueError("p/q must be in lowest terms")
    rat = Fraction(p, q)
    spec_q = replace(spec, alpha=rat)
    prod = cocycle_product(spec_q, theta, q)
    k = spec.size
    if method == "eigen":
        ev = general_eigenvalues(prod.mat)
        logs = np.log(np.maximum(np.abs(ev), 1e-300)) + prod.log_scale
        psums = np.cumsum(logs) / q
    elif method == "compound":
        psums = []
        for j in range(1, k + 1):
            pmat = ScaledMatrix(np.eye(math.comb(k, j), dtype=complex))
            for step in range(q):
                a = transfer_matrix(spec_q, theta + step * spec_q.frequency)
                cj = a if j == 1 else compound_batch(a[None], j)[0]
                pmat = pmat.lmul(cj)
            ev = general_eigenvalues(pmat.mat)
            psums.append((math.log(max(abs(ev[0]), 1e-300)) + pmat.log_scale) / q)
        psums = np.asarray(psums)
    else:
        raise ValueError("method must be 'eigen' or 'compound'")
    exps = np.diff(np.concatenate(([0.0], psums)))
    return LyapunovSpectrum(
        exponents=tuple(float(x) for x in exps),
        exponents_compound=None,
        scale=q,
        grid_size=1,
        method="rational_spectral_radius",
        cross_method_gap=math.nan,
    )


def det_minus_identity_log(spec: CocycleSpec, theta, n: int) -> float:
    """log |det(A_n(theta) - I)|, stable for strongly hyperbolic products.

    Uses det(M - I) = sum_k (-1)^{size-k} e_k with e_k = tr(wedge^k M_n);
    each compound product is accumulated with rescaling, so every trace is
    carried by its dominant growth rather than by cancellation-prone minors
    of the final matrix.
    """
    k_dim = spec.size
    w = spec.frequency
    prods = {k: ScaledMatrix(np.eye(math.comb(k_dim, k), dtype=complex))
             for k in range(1, k_dim + 1)}
    for step in range(n):
        a = transfer_matrix(spec, theta + step * w)
        for k in prods:
            ck = a if k == 1 else compound_batch(a[None], k)[0]
            prods[k] = prods[k].lmul(ck)
    mants = [1.0 + 0.0j]
    logs = [0.0]
    for k in range(1, k_dim + 1):
        mants.append(complex(np.trace(prods[k].mat)))
        logs.append(prods[k].log_scale)
    top = max(lg if abs(m) > 0 else -math.inf for m, lg in zip(mants, logs))
    total = 0.0 + 0.0j
    for k, (m, lg) in enumerate(zip(mants, logs)):
        sign = (-1.0) ** (k_dim - k)
        scale = lg - top + (math.log(abs(m)) if abs(m) > 0 else -math.inf)
        if math.isfinite(scale) and scale > -745.0:
            total += sign * (m / abs(m)) * math.exp(scale)
    if total == 0:
        return -math.inf
    return math.log(abs(total)) + top


_OMEGA_CACHE: dict[int, np.ndarray] = {}


def symplectic_form(d: int) -> np.ndarray:
    if d not in _OMEGA_CACHE:
        om = np.zeros((2 * d, 2 * d), dtype=complex)
        om[:d, d:] = np.eye(d)
        om[d:, :d] = -np.eye(d)
        _OMEGA_CACHE[d] = om
    return _OMEGA_CACHE[d]


def _rel(mat_resid: np.ndarray, scale: float) -> float:
    return float(np.linalg.norm(mat_resid, 2) / max(1.0, scale))


def structural_residuals(spec: CocycleSpec, theta: float, n: int) -> list[IdentityResidualReport]:
    """Exact-identity bundle for the dual block cocycle at one phase.

    Checks symplecticity, the four block recursions at scales 2..n, the
    d-step conjugation to the one-step cocycle, and the F_eps conjugation
    to the eps=0 cocycle.
    """
    v, d = spec.v, spec.v.degree
    alpha = float(spec.alpha)
    block_spec = replace(spec, side="dual_block")
    params = {"d": d, "alpha": alpha, "theta": theta, "E": str(spec.E),
              "epsilon": spec.epsilon, "n": n}
    out = []

    m1 = transfer_matrix(block_spec, theta)
    om = symplectic_form(d)
    resid = m1.conj().T @ om @ m1 - om
    out.append(IdentityResidualReport(
        "symplectic", params, float(np.linalg.norm(resid, 2)),
        _rel(resid, float(np.linalg.norm(m1, 2)) ** 2), 1e-9,
        flags=() if spec.epsilon == 0 and abs(complex(spec.E).imag) == 0 else ("not-expected-exact",),
    ))

    # block recursions M_n = M_{n-1}(theta + d alpha) M_1(theta), per block
    blocks = build_blocks(v, alpha, theta, spec.epsilon)
    b_inv = np.linalg.inv(blocks.B)
    worst = 0.0
    prod = m1
    for scale in range(2, n + 1):
        prev = cocycle_product(block_spec, theta + d * alpha, scale - 1)
        prod = cocycle_product(block_spec, theta, scale)
        pm = prev.mat * math.exp(prev.log_scale)
        cur = prod.mat * math.exp(prod.log_scale)
        c0 = blocks.C(theta) - complex(spec.E) * np.eye(d)
        ul, ur = pm[:d, :d], pm[:d, d:]
        ll, lr = pm[d:, :d], pm[d:, d:]
        rec = np.block([
            [-ul @ c0 @ b_inv + ur @ b_inv, -ul @ blocks.B_tilde],
            [-ll @ c0 @ b_inv + lr @ b_inv, -ll @ blocks.B_tilde],
        ])
        worst = max(worst, _rel(rec - cur, float(np.linalg.norm(cur, 2))))
    out.append(IdentityResidualReport("transfer_recursion", params, worst, worst, 1e-9))

    # d-step conjugation M = diag(B, I) Ahat_d diag(B^{-1}, I)
    one_step = replace(spec, side="dual_one_step")
    ad = cocycle_product(one_step, theta, d)
    admat = ad.mat * math.exp(ad.log_scale)
    left = np.block([[blocks.B, np.zeros((d, d))], [np.zeros((d, d)), np.eye(d)]])
    right = np.block([[b_inv, np.zeros((d, d))], [np.zeros((d, d)), np.eye(d)]])
    conj = left @ admat @ right
    resid = conj - m1
    out.append(IdentityResidualReport(
        "d_step_conjugation", params, float(np.linalg.norm(resid, 2)),
        _rel(resid, float(np.linalg.norm(m1, 2))), 1e-9))

    # F_eps conjugation M^eps = e^{-2 pi d eps} diag(F,F) M^0 diag(F^{-1},F^{-1})
    m0 = transfer_matrix(replace(block_spec, epsilon=0.0), theta)
    f2 = np.block([[blocks.F, np.zeros((d, d))], [np.zeros((d, d)), blocks.F]])
    f2i = np.linalg.inv(f2)
    conj = math.exp(-2.0 * math.pi * d * spec.epsilon) * (f2 @ m0 @ f2i)
    resid = conj - m1
    out.append(IdentityResidualReport(
        "f_eps_conjugation", params, float(np.linalg.norm(resid, 2)),
        _rel(resid, float(np.linalg.norm(m1, 2))), 1e-9))
    return out


def exponent_shift_residual(spec: CocycleSpec, n: int, grid: int,
                            eps_list: list[float]) -> dict:
    """max_m |L_m(eps) - L_m(0) + 2 pi eps| at finite scale, dual one-step side."""
    if spec.side == "scalar":
        raise ValueError("exponent shift is a dual-side identity")
    base = finite_lyapunov_spectrum(spec.with_epsilon(0.0), n, grid)
    table = {}
    worst = 0.0
    for eps in eps_list:
        se = finite_lyapunov_spectrum(spec.with_epsilon(eps), n, grid)
        scale = spec.v.degree if spec.side == "dual_block" else 1
        devs = [abs(se.exponents[m] - base.exponents[m] + 2.0 * math.pi * eps * scale)
                for m in range(se.size)]
        table[eps] = devs
        worst = max(worst, max(devs))
    return {"max_residual": worst, "per_eps": table,
            "cross_method_gap": base.cross_method_gap,
            "scale": n, "grid": grid}


@dataclass(frozen=True)
class AccelerationReport:
    kappa: float
    nearest_integer: int
    integer_distance: float
    collinearity: float
    epsilons: tuple[float, ...]
    L_values: tuple[float, ...]
    flagged_near_kink: bool


def acceleration(spec: CocycleSpec, epsilon_center: float = 0.0, delta: float = 0.01,
                 n: int = 2000, grid: int = 257,
                 collinearity_tol: float = 1e-2) -> AccelerationReport:
    """One-sided slope of L^1(eps) above epsilon_center, in units of 2 pi.

    Uses eps in {center + delta, center + 2 delta, center + 3 delta}; the
    acceleration is a right-derivative, so the stencil stays on one side of
    possible quantization kinks.  A large three-point collinearity residual
    flags proximity to a kink.
    """
    if delta <= 0:
        raise ValueError("delta > 0 required")
    eps = [epsilon_center + (j + 1) * delta for j in range(3)]
    ls = [top_lyapunov(spec.with_epsilon(e), n, grid) for e in eps]
    coef = np.polyfit(eps, ls, 1)
    kappa = float(coef[0] / (2.0 * math.pi))
    fit = np.polyval(coef, eps)
    coll = float(np.max(np.abs(np.asarray(ls) - fit)))
    nearest = int(round(kappa))
    return AccelerationReport(
        kappa=kappa,
        nearest_integer=nearest,
        integer_distance=abs(kappa - nearest),
        collinearity=coll,
        epsilons=tuple(eps),
        L_values=tuple(float(x) for x in ls),
        flagged_near_kink=coll > collinearity_tol,
    )


@dataclass(frozen=True)
class EnergyClass:
    label: str  # supercritical | subcritical | critical | outside
    L: float
    kappa: float
    acceleration_report: AccelerationReport


def classify_energy(spec: CocycleSpec, n: int = 2000, grid: int = 257,
                    L_tol: float = 0.05, delta: float = 0.01) -> EnergyClass:
    """Regime classification from (L, kappa) at eps = 0, scalar side."""
    if spec.side != "scalar":
        raise ValueError("classification is defined on the scalar side")
    L = top_lyapunov(spec.with_epsilon(0.0), n, grid)
    rep = acceleration(spec.with_epsilon(0.0), 0.0, delta, n, grid)
    positive_L = L > L_tol
    positive_kappa = rep.kappa >= 0.5
    if positive_L and positive_kappa:
        label = "supercritical"
    elif positive_L:
        label = "outside"  # resolvent set: L > 0 with kappa = 0
    elif positive_kappa:
        label = "critical"
    else:
        label = "subcritical"
    return EnergyClass(label=label, L=L, kappa=rep.kappa, acceleration_report=rep)
