"""Operator builders: hopping blocks, finite volumes, and the Z_q cyclic trio.

Block convention (shared by every builder and the transfer matrices): the
block vector over d sites is Phi_n = (phi_{nd+d-1}, ..., phi_{nd+1}, phi_{nd})^T,
i.e. descending site order inside a block, and finite-volume matrices store
block rows in descending phase order -- the top-left diagonal block carries
the largest phase shift.  Equivalently, matrix index r corresponds to lattice
site offset nd-1-r ("site coordinates" in the Green's-function helpers).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .linalg import operator_norm
from .potentials import TrigPotential

__all__ = [
    "BlockData",
    "build_blocks",
    "hopping_block",
    "onsite_block",
    "dirichlet_matrix",
    "periodic_matrix",
    "scalar_dirichlet_matrix",
    "cyclic_operators",
    "cyclic_fourier",
    "duality_conjugation_residual",
]


def _f_eps(d: int, epsilon: float) -> np.ndarray:
    return np.diag(np.exp(2.0 * np.pi * epsilon * np.arange(1, d + 1)))


def hopping_block(v: TrigPotential, epsilon: float = 0.0) -> np.ndarray:
    """Upper-triangular forward-hopping block B_eps.

    B[i, j] = v_{-(d-m)} e^{2 pi (d-m) eps} for m = j - i >= 0.
    """
    d = v.degree
    b = np.zeros((d, d), dtype=complex)
    for i in range(d):
        for j in range(i, d):
            m = j - i
            b[i, j] = v.coeff(-(d - m)) * math.exp(2.0 * np.pi * (d - m) * epsilon)
    return b


def onsite_block(v: TrigPotential, alpha: float, theta, epsilon: float = 0.0) -> np.ndarray:
    """On-site block C_eps(theta): cosine diagonal plus short-range hops."""
    d = v.degree
    c = np.zeros((d, d), dtype=complex)
    for i in range(d):
        c[i, i] = 2.0 * np.cos(2.0 * np.pi * (theta + (d - 1 - i) * alpha))
        for j in range(d):
            if j == i:
                continue
            k = j - i
            c[i, j] = v.coeff(k) * math.exp(-2.0 * np.pi * k * epsilon)
    return c


@dataclass(frozen=True)
class BlockData:
    """The d x d blocks of the dual operator in Jacobi form."""

    B: np.ndarray
    B_tilde: np.ndarray
    F: np.ndarray  # diag(e^{2 pi eps}, ..., e^{2 pi d eps})
    C: Callable[[float], np.ndarray]
    C_at_theta: np.ndarray
    epsilon: float


def build_blocks(v: TrigPotential, alpha: float, theta, epsilon: float = 0.0) -> BlockData:
    d = v.degree
    if v.coeff(d) == 0 or v.coeff(-d) == 0:
        raise ValueError("top coefficients must be nonzero")
    b = hopping_block(v, epsilon)
    b0 = hopping_block(v, 0.0)
    f = _f_eps(d, epsilon)
    b_tilde = math.exp(-2.0 * np.pi * d * epsilon) * (f @ b0.conj().T @ np.linalg.inv(f))

    def c_fun(th):
        return onsite_block(v, alpha, th, epsilon)

    return BlockData(B=b, B_tilde=b_tilde, F=f, C=c_fun,
                     C_at_theta=c_fun(theta), epsilon=epsilon)


def _block_volume(alpha, theta, v, n, epsilon, periodic: bool) -> np.ndarray:
    d = v.degree
    blocks = build_blocks(v, alpha, theta, epsilon)
    h = np.zeros((n * d, n * d), dtype=complex)
    for i in range(n):  # row i holds phase theta + (n-1-i) d alpha
        ph = theta + (n - 1 - i) * d * alpha
        h[i * d:(i + 1) * d, i * d:(i + 1) * d] = blocks.C(ph)
        if i + 1 < n:
            h[i * d:(i + 1) * d, (i + 1) * d:(i + 2) * d] = blocks.B_tilde
            h[(i + 1) * d:(i + 2) * d, i * d:(i + 1) * d] = blocks.B
    if periodic:
        h[0:d, (n - 1) * d:n * d] += blocks.B
        h[(n - 1) * d:n * d, 0:d] += blocks.B_tilde
    return h


def dirichlet_matrix(alpha, theta, v: TrigPotential, n: int, epsilon: float = 0.0) -> np.ndarray:
    """Restriction of the dual operator to nd sites, Dirichlet boundary."""
    if n < 1:
        raise ValueError("n >= 1 required")
    return _block_volume(float(alpha), theta, v, n, epsilon, periodic=False)


def periodic_matrix(alpha, theta, v: TrigPotential, n: int, epsilon: float = 0.0) -> np.ndarray:
    """Finite volume with periodic boundary: corner blocks B and B~."""
    if n < 3:
        raise ValueError("periodic volume needs n >= 3 (corner blocks collide otherwise)")
    return _block_volume(float(alpha), theta, v, n, epsilon, periodic=True)


def scalar_dirichlet_matrix(alpha, theta, v: TrigPotential, n: int) -> np.ndarray:
    """Finite volume of the scalar operator u_{m+1}+u_{m-1}+v(theta+m alpha)u_m."""
    if n < 1:
        raise ValueError("n >= 1 required")
    m = np.arange(n)
    h = np.diag(v.eval(theta + m * float(alpha)))
    h += np.diag(np.ones(n - 1), 1) + np.diag(np.ones(n - 1), -1)
    if np.allclose(h.imag, 0.0):
        return h.real.astype(complex)
    return h


def cyclic_operators(p: int, q: int, theta, epsilon: float, v: TrigPotential):
    """The three periodic operators on l^2(Z_q): (H, H~, H^).

    H has potential v(theta + i eps + n p/q) and plain hopping; H~ moves the
    phase into the hopping e^{+-2 pi i theta}; H^ is the long-range dual with
    cosine diagonal.
    """
    if math.gcd(p, q) != 1:
        raise ValueError(f"p/q must be reduced, got gcd({p},{q}) != 1")
    if q < 3:
        raise ValueError("q >= 3 required")
    d = v.degree
    if d > 1 and q <= 2 * d:
        raise ValueError(f"q must exceed 2d = {2*d} so hops do not alias")
    n = np.arange(q)
    th = complex(theta)

    h = np.zeros((q, q), dtype=complex)
    h[n, n] = v.eval(th + 1j * epsilon + n * p / q)
    h[n, (n + 1) % q] += 1.0
    h[n, (n - 1) % q] += 1.0

    ht = np.zeros((q, q), dtype=complex)
    ht[n, n] = v.eval(n * p / q + 1j * epsilon)
    ht[n, (n + 1) % q] += np.exp(2j * np.pi * th)
    ht[n, (n - 1) % q] += np.exp(-2j * np.pi * th)

    hh = np.zeros((q, q), dtype=complex)
    hh[n, n] = 2.0 * np.cos(2.0 * np.pi * (th + n * p / q))
    for k in list(range(-d, 0)) + list(range(1, d + 1)):
        hh[n, (n - k) % q] += v.coeff(k) * math.exp(-2.0 * np.pi * k * epsilon)
    return h, ht, hh


def cyclic_fourier(p: int, q: int) -> np.ndarray:
    """Character transform on Z_q: F[n, m] = q^{-1/2} e^{2 pi i m n p / q}."""
    if math.gcd(p, q) != 1:
        raise ValueError("p, q must be coprime")
    n = np.arange(q)
    return np.exp(2j * np.pi * np.outer(n, n) * p / q) / math.sqrt(q)


def duality_conjugation_residual(p: int, q: int, theta, epsilon: float,
                                 v: TrigPotential) -> float:
    """Operator-norm defect of the Z_q Aubry duality F* H~ F = H^.

    Exact identity; the residual only reflects rounding.
    """
    _, ht, hh = cyclic_operators(p, q, theta, epsilon, v)
    f = cyclic_fourier(p, q)
    return operator_norm(f.conj().T @ ht @ f - hh)
