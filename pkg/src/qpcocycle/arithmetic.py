"""Continued fractions, torus norms and resonance bookkeeping.

Everything here is exact-rational underneath: partial quotients come from
interval arithmetic on the input encoding (a float is a known dyadic, a
string/Fraction is taken literally), so deep quotients are either provably
correct or the expansion stops with ``precision_exhausted`` set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

__all__ = [
    "ContinuedFraction",
    "ResonanceReport",
    "continued_fraction",
    "torus_norm",
    "best_approx_residual",
    "beta_estimate",
    "beta_sequence",
    "epsilon_resonances",
    "admissible_sequence",
    "rational_approx_divisible",
    "dc_witness",
]


def torus_norm(x):
    """Distance from x to the nearest integer, in [0, 1/2]. Accepts arrays."""
    x = np.asarray(x, dtype=float)
    r = np.abs(x - np.round(x))
    return r if r.ndim else float(r)


def _torus_norm_frac(x: Fraction) -> Fraction:
    f = x - int(x)
    if f < 0:
        f += 1
    return min(f, 1 - f)


def _as_fraction(alpha) -> tuple[Fraction, bool]:
    """Exact rational for the input plus a flag: was the encoding inexact (float)?"""
    if isinstance(alpha, Fraction):
        return alpha, False
    if isinstance(alpha, str):
        return Fraction(alpha), False
    if isinstance(alpha, tuple):
        return Fraction(alpha[0], alpha[1]), False
    if isinstance(alpha, int):
        return Fraction(alpha), False
    if isinstance(alpha, float):
        return Fraction(alpha), True
    raise TypeError(f"unsupported alpha type {type(alpha)!r}")


@dataclass(frozen=True)
class ContinuedFraction:
    """Continued fraction expansion of alpha in (0,1) with its convergents."""

    alpha: Fraction
    quotients: tuple[int, ...]
    p: tuple[int, ...]  # p[n] / q[n] = [a_1 .. a_{n+1}]
    q: tuple[int, ...]
    terminated: bool  # expansion is the complete one of a rational alpha
    precision_exhausted: bool = False

    @property
    def alpha_float(self) -> float:
        return float(self.alpha)

    def __len__(self) -> int:
        return len(self.quotients)

    def convergent(self, n: int) -> Fraction:
        return Fraction(self.p[n], self.q[n])

    def check_invariants(self) -> None:
        p, q, a = self.p, self.q, self.quotients
        for n in range(1, len(q)):
            if q[n] <= q[n - 1]:
                raise AssertionError("q_n not strictly increasing")
            det = p[n] * q[n - 1] - p[n - 1] * q[n]
            if det != (-1) ** n:
                raise AssertionError("p_n q_{n-1} - p_{n-1} q_n != (-1)^{n-1}")
        for n in range(2, len(q)):
            if q[n] != a[n] * q[n - 1] + q[n - 2]:
                raise AssertionError("three-term recurrence violated")
        for n in range(len(q) - 1):
            gap = abs(self.alpha - Fraction(p[n], q[n]))
            if not self.terminated and gap >= Fraction(1, q[n] * q[n + 1]):
                raise AssertionError("|alpha - p_n/q_n| >= 1/(q_n q_{n+1})")


def _quotients_of(x: Fraction, max_terms: int) -> list[int]:
    out = []
    for _ in range(max_terms):
        if x == 0:
            break
        inv = 1 / x
        a = int(inv)
        out.append(a)
        x = inv - a
    return out


def continued_fraction(alpha, max_terms: int = 40) -> ContinuedFraction:
    """Expand alpha in (0,1) to at most max_terms partial quotients.

    Float input is treated as the interval [alpha - ulp/2, alpha + ulp/2]; the
    expansion keeps only quotients shared by the whole interval and flags
    ``precision_exhausted`` once they diverge.  Fraction / decimal-string input
    is exact and terminates for rationals.
    """
    if max_terms < 1:
        raise ValueError("max_terms must be >= 1")
    a_exact, inexact = _as_fraction(alpha)
    if not 0 < a_exact < 1:
        raise ValueError(f"alpha must lie in (0,1), got {alpha}")

    exhausted = False
    if inexact:
        u = Fraction(math.ulp(float(alpha))) / 2
        lo = _quotients_of(a_exact - u, max_terms + 1)
        hi = _quotients_of(a_exact + u, max_terms + 1)
        common = []
        for x, y in zip(lo, hi):
            if x != y:
                break
            common.append(x)
        quots = common[:max_terms]
        exhausted = len(common) < max_terms
        terminated = False
    else:
        quots = _quotients_of(a_exact, max_terms)
        # exact termination: the quotient list reproduces alpha
        terminated = len(quots) < max_terms or _cf_value(quots) == a_exact
    if not quots:
        raise ValueError("could not extract any reliable partial quotient")

    p = [1, 0]  # p_{-2}, p_{-1} for x = [0; a_1, a_2, ...]
    q = [0, 1]
    for a in quots:
        p.append(a * p[-1] + p[-2])
        q.append(a * q[-1] + q[-2])
    return ContinuedFraction(
        alpha=a_exact,
        quotients=tuple(quots),
        p=tuple(p[2:]),
        q=tuple(q[2:]),
        terminated=terminated,
        precision_exhausted=exhausted,
    )


def _cf_value(quots: Sequence[int]) -> Fraction:
    v = Fraction(0)
    for a in reversed(quots):
        v = Fraction(1, a + v)
    return v


_BRUTE_CAP = 50_000_000


def best_approx_residual(cf: ContinuedFraction, n: int) -> float:
    """``||q_n alpha|| - min_{1<=k<q_{n+1}} ||k alpha||``, by brute scan.

    Zero (to rounding) by the best-approximation property.  The scan argmin is
    located in floats, then both norms are re-evaluated in exact rationals.
    """
    if not 0 <= n < len(cf.q):
        raise IndexError(f"convergent index {n} out of stored range")
    if n == len(cf.q) - 1:
        if cf.terminated:
            return 0.0  # ||q_n alpha|| = 0 exactly, the global minimum
        raise IndexError("q_{n+1} not stored; expand with more terms")
    qn, qn1 = cf.q[n], cf.q[n + 1]
    if qn1 > _BRUTE_CAP:
        raise ValueError(f"brute scan over k < {qn1} exceeds cap {_BRUTE_CAP}")
    ks = np.arange(1, qn1, dtype=np.int64)
    norms = torus_norm(ks * cf.alpha_float)
    k_star = int(ks[np.argmin(norms)])
    exact = _torus_norm_frac(cf.q[n] * cf.alpha) - _torus_norm_frac(k_star * cf.alpha)
    return float(exact)


def beta_sequence(cf: ContinuedFraction) -> np.ndarray:
    """The finite-scale exponents log(q_{n+1}) / q_n for every stored n."""
    q = np.asarray(cf.q, dtype=float)
    return np.log(q[1:]) / q[:-1]


def beta_estimate(cf: ContinuedFraction) -> float:
    """Finite truncation of beta(alpha) = limsup log(q_{n+1})/q_n."""
    if len(cf.q) < 3:
        raise ValueError("need at least 3 convergents for a beta estimate")
    return float(np.max(beta_sequence(cf)))


def dc_witness(cf: ContinuedFraction) -> dict:
    """Least-squares Diophantine witness: fit ||q_n alpha|| ~ c q_n^{-b}.

    Reported, never asserted: (c, b) with the fit r^2.  b close to 1 and c
    bounded away from 0 is consistent with alpha in DC.
    """
    if len(cf.q) < 4:
        raise ValueError("need at least 4 convergents")
    qs = np.asarray(cf.q[:-1], dtype=float)
    norms = np.array(
        [float(_torus_norm_frac(qn * cf.alpha)) for qn in cf.q[:-1]], dtype=float
    )
    mask = norms > 0
    x, y = np.log(qs[mask]), np.log(norms[mask])
    b, intercept = np.polyfit(x, y, 1)
    resid = y - (b * x + intercept)
    ss_tot = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - float(np.sum(resid**2) / ss_tot) if ss_tot > 0 else 1.0
    b_fit = -float(b)
    c_fit = float(np.min(norms[mask] * qs[mask] ** b_fit))
    return {"c": c_fit, "b": b_fit, "r2": r2}


@dataclass(frozen=True)
class ResonanceReport:
    theta: float
    epsilon0: float
    resonances: tuple[int, ...]  # ordered by (|k|, k)
    norms: tuple[float, ...]  # ||2 theta - k alpha|| for each listed k
    gamma_estimate: float


def epsilon_resonances(alpha, theta: float, epsilon0: float, n_max: int) -> ResonanceReport:
    """All epsilon0-resonances of theta with |k| <= n_max.

    k qualifies when ||2 theta - k alpha|| <= exp(-epsilon0 |k|) and the norm
    is minimal among |j| <= |k| (ties go to the smaller |k|, which the
    non-strict running minimum realises automatically).
    """
    if epsilon0 <= 0:
        raise ValueError("epsilon0 must be > 0")
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    a = float(alpha)
    ks = np.arange(-n_max, n_max + 1)
    norms = torus_norm(2.0 * theta - ks * a)

    def norm_of(k: int) -> float:
        return float(norms[k + n_max])

    # minimality is over the whole ring |j| <= |k|, both signs included
    hits: list[tuple[int, float]] = []
    running = norm_of(0)
    if running <= 1.0:
        hits.append((0, running))
    for r in range(1, n_max + 1):
        ring_min = min(running, norm_of(-r), norm_of(r))
        gate = math.exp(-epsilon0 * r)
        for k in (-r, r):
            nk = norm_of(k)
            if nk <= ring_min and nk <= gate:
                hits.append((k, nk))
        running = ring_min
    nz = np.abs(ks) > 0
    with np.errstate(divide="ignore"):
        gammas = -np.log(np.maximum(norms[nz], 1e-300)) / np.abs(ks[nz])
    gamma = float(max(0.0, np.max(gammas)))
    return ResonanceReport(
        theta=float(theta),
        epsilon0=float(epsilon0),
        resonances=tuple(k for k, _ in hits),
        norms=tuple(n for _, n in hits),
        gamma_estimate=gamma,
    )


def admissible_sequence(alpha, d: int, kappa0: float, n_min: int, n_max: int) -> list[int]:
    """All n in [n_min, n_max] with ||n d alpha|| <= kappa0, ascending."""
    if d < 1:
        raise ValueError("d must be >= 1")
    if not 0 < kappa0 <= 0.5:
        raise ValueError("kappa0 must lie in (0, 1/2]")
    if n_max < n_min:
        return []
    ns = np.arange(n_min, n_max + 1, dtype=np.int64)
    keep = torus_norm(ns * (d * float(alpha))) <= kappa0
    return [int(n) for n in ns[keep]]


def rational_approx_divisible(cf: ContinuedFraction, d: int, n: int) -> tuple[int, int]:
    """Reduced (d p_n + 1) / (d q_n): a nearby rational whose denominator
    stays divisible by d after reduction (no prime of d divides d p_n + 1)."""
    if d < 1:
        raise ValueError("d must be >= 1")
    if not 0 <= n < len(cf.q):
        raise IndexError("convergent index out of range")
    f = Fraction(d * cf.p[n] + 1, d * cf.q[n])
    return f.numerator, f.denominator
