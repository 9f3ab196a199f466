"""Dense complex kernels sized for 2d x 2d cocycle blocks and nd x nd volumes.

Factorizations are delegated to LAPACK through numpy; what this module owns is
the log-scale bookkeeping that keeps cocycle products finite at n ~ 1e4, the
exterior-power (compound) construction, and Gram pairings of singular
subspaces.  All kernels are deterministic: fixed sweep orders, no threading
of our own.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ScaledMatrix",
    "LogScalar",
    "SVDResult",
    "lu_det",
    "svd",
    "hermitian_eigen",
    "general_eigenvalues",
    "compound_matrix",
    "compound_batch",
    "gram_pairing",
    "subspace_gap",
    "operator_norm",
]

# renormalization window for scaled products
_RENORM_HI = 1e100
_RENORM_LO = 1e-100


@dataclass(frozen=True)
class LogScalar:
    """A scalar stored as (unit-modulus-ish mantissa, log magnitude)."""

    mantissa: complex
    log: float

    @property
    def value(self) -> complex:
        return self.mantissa * math.exp(self.log) if abs(self.log) < 700 else complex("nan")

    @property
    def log_abs(self) -> float:
        m = abs(self.mantissa)
        return self.log + math.log(m) if m > 0 else -math.inf

    def __abs__(self) -> float:
        return abs(self.value)


@dataclass
class ScaledMatrix:
    """Dense complex matrix with an external factor exp(log_scale)."""

    mat: np.ndarray
    log_scale: float = 0.0

    def __post_init__(self):
        self.mat = np.asarray(self.mat, dtype=complex)
        if not np.all(np.isfinite(self.mat)) or not math.isfinite(self.log_scale):
            raise ValueError("ScaledMatrix entries and log_scale must be finite")

    @property
    def shape(self):
        return self.mat.shape

    def renormalized(self) -> "ScaledMatrix":
        m = float(np.max(np.abs(self.mat)))
        if m == 0.0:
            return self
        if _RENORM_LO < m < _RENORM_HI:
            return self
        return ScaledMatrix(self.mat / m, self.log_scale + math.log(m))

    def lmul(self, a: np.ndarray) -> "ScaledMatrix":
        """a @ self, reconciling the log scale and renormalizing on demand."""
        return ScaledMatrix(np.asarray(a, dtype=complex) @ self.mat, self.log_scale).renormalized()

    def matmul(self, other: "ScaledMatrix") -> "ScaledMatrix":
        return ScaledMatrix(self.mat @ other.mat, self.log_scale + other.log_scale).renormalized()

    def norm2_log(self) -> float:
        """log of the spectral norm, including the external factor."""
        s = np.linalg.svd(self.mat, compute_uv=False)
        return math.log(float(s[0])) + self.log_scale

    def dense(self) -> np.ndarray:
        return self.mat * math.exp(self.log_scale)


def operator_norm(m: np.ndarray) -> float:
    """Spectral norm via SVD."""
    return float(np.linalg.svd(np.asarray(m, dtype=complex), compute_uv=False)[0])


def lu_det(m, log_scale: float = 0.0) -> LogScalar:
    """Determinant as (mantissa, log magnitude), overflow-free.

    ``log_scale`` is an external per-matrix factor: the determinant of
    exp(log_scale) * m picks it up n-fold.
    """
    if isinstance(m, ScaledMatrix):
        log_scale += m.log_scale
        m = m.mat
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("lu_det needs a square matrix")
    sign, logabs = np.linalg.slogdet(a)
    if sign == 0:
        return LogScalar(0.0 + 0.0j, -math.inf)
    return LogScalar(complex(sign), float(logabs) + log_scale * a.shape[0])


@dataclass(frozen=True)
class SVDResult:
    """sigma_1 >= ... >= sigma_k with matched left (w_j) and right (v_j) vectors."""

    singular_values: np.ndarray
    left: np.ndarray  # columns w_j; M v_j = sigma_j w_j
    right: np.ndarray  # columns v_j
    log_scale: float = 0.0

    def check(self, m: np.ndarray, tol: float = 1e-12) -> float:
        s1 = self.singular_values[0] if len(self.singular_values) else 1.0
        resid = np.linalg.norm(
            m @ self.right - self.left * self.singular_values[None, :]
        )
        return float(resid / max(s1, 1e-300))


def svd(m) -> SVDResult:
    """Full SVD with columns ordered by descending singular value."""
    log_scale = 0.0
    if isinstance(m, ScaledMatrix):
        log_scale = m.log_scale
        m = m.mat
    a = np.asarray(m, dtype=complex)
    u, s, vh = np.linalg.svd(a)
    return SVDResult(singular_values=s, left=u, right=vh.conj().T, log_scale=log_scale)


def hermitian_eigen(m, tol: float = 1e-10):
    """Eigenvalues ascending + orthonormal eigenvectors of a Hermitian matrix.

    Raises if ||M - M*|| exceeds tol * ||M||.
    """
    a = np.asarray(m, dtype=complex)
    scale = max(float(np.linalg.norm(a)), 1e-300)
    herm_defect = float(np.linalg.norm(a - a.conj().T))
    if herm_defect > tol * scale:
        raise ValueError(f"matrix is not Hermitian: defect {herm_defect:.3e} > {tol:.1e}*||M||")
    w, v = np.linalg.eigh(a)
    return w, v


def general_eigenvalues(m) -> np.ndarray:
    """Eigenvalues sorted by descending modulus (ties: re desc, then im desc)."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("square matrix required")
    try:
        ev = np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:  # QR iteration budget exceeded
        raise ArithmeticError(f"eigenvalue iteration failed for shape {a.shape}: {exc}") from exc
    order = np.lexsort((-ev.imag, -ev.real, -np.abs(ev)))
    return ev[order]


def _subsets(n: int, k: int) -> np.ndarray:
    return np.array(list(itertools.combinations(range(n), k)), dtype=np.intp)


def compound_matrix(m, k: int) -> np.ndarray:
    """k-th exterior power: entries are k x k minors over lexicographic k-subsets."""
    a = np.asarray(m, dtype=complex)
    n = a.shape[0]
    if a.shape[0] != a.shape[1]:
        raise ValueError("square matrix required")
    if not 1 <= k <= n:
        raise ValueError(f"compound order k={k} outside 1..{n}")
    return compound_batch(a[None, :, :], k)[0]


def compound_batch(mats: np.ndarray, k: int) -> np.ndarray:
    """Vectorized compound of a stack (m, n, n) -> (m, C(n,k), C(n,k))."""
    a = np.asarray(mats, dtype=complex)
    n = a.shape[-1]
    if k == 1:
        return a.copy()
    idx = _subsets(n, k)  # (C, k)
    # gather (m, C, C, k, k) and take dets over the trailing block
    sub = a[:, idx[:, None, :, None], idx[None, :, None, :]]
    return np.linalg.det(sub)


def gram_pairing(v_list, w_list) -> complex:
    """det of the Gram matrix <v_j, w_k> (conjugate-linear in v).

    Equals the exterior-power pairing <v_1 ^ ... ^ v_d, w_1 ^ ... ^ w_d>.
    """
    v = np.column_stack([np.asarray(x, dtype=complex) for x in v_list])
    w = np.column_stack([np.asarray(x, dtype=complex) for x in w_list])
    if v.shape != w.shape:
        raise ValueError("vector families must match in number and dimension")
    if v.shape[0] < v.shape[1]:
        raise ValueError("vectors shorter than the family size")
    return complex(np.linalg.det(v.conj().T @ w))


def subspace_gap(u1: np.ndarray, u2: np.ndarray) -> float:
    """sin of the largest principal angle between the column spans."""
    q1, _ = np.linalg.qr(np.asarray(u1, dtype=complex))
    q2, _ = np.linalg.qr(np.asarray(u2, dtype=complex))
    s = np.linalg.svd(q1.conj().T @ q2, compute_uv=False)
    c = min(1.0, float(np.min(s)))
    return math.sqrt(max(0.0, 1.0 - c * c))
