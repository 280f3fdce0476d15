"""Periodic-orbit sums for the oscillatory zero count.

Every sum here is a finite truncation.  The prime expansion of N_osc diverges
on the critical line, so nothing in this module claims anything about the
formal infinite series; statements are about truncated or smoothed sums.

Summation order is fixed (primes ascending, then doubling index k, then
repetition r) and accumulation goes through ``math.fsum`` so that
rearrangement identities can be asserted at the 1e-12 level.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import lfunc
from .arith import primes_up_to


class StabilityError(ValueError):
    pass


class TailBoundError(ArithmeticError):
    pass


@dataclass(frozen=True)
class TruncationSpec:
    """Cutoffs for orbit sums.

    With ``closed`` set, ``rep_cutoff`` acts as n_max: an orbit with doubling
    index k keeps repetitions r with 2^k r <= n_max, and k runs up to
    floor(log2 n_max) regardless of ``k_cutoff``.
    """

    prime_cutoff: int
    k_cutoff: int = 0
    rep_cutoff: int = 1
    closed: bool = False

    def __post_init__(self):
        if self.prime_cutoff < 1 or self.rep_cutoff < 1 or self.k_cutoff < 0:
            raise ValueError(f"invalid truncation {self}")

    @property
    def n_max(self) -> int:
        return self.rep_cutoff

    def k_max(self) -> int:
        if self.closed:
            return self.n_max.bit_length() - 1
        return self.k_cutoff

    def reps_for(self, k: int) -> int:
        return self.n_max >> k if self.closed else self.rep_cutoff


@dataclass(frozen=True)
class OrbitTerm:
    label: tuple[int, int]
    period: float
    maslov: float = 0.0
    stability_fn: Callable[[int], float] = field(default=None, compare=False)
    andreev_parity: int = 1
    action_fn: Callable[[float], float] | None = field(default=None, compare=False)

    def __post_init__(self):
        if not self.period > 0:
            raise ValueError(f"orbit {self.label}: period must be positive")

    def action(self, E: float) -> float:
        if self.action_fn is not None:
            return self.action_fn(E)
        return E * self.period

    def stability(self, r: int) -> float:
        v = self.stability_fn(r)
        if not v > 0:
            raise StabilityError(f"orbit {self.label}: |det(M^{r} - I)| = {v} is not positive")
        return v


def _ansatz_stability(tau: float) -> Callable[[int], float]:
    return lambda r: math.exp(r * tau / 2)


def ansatz_orbits(trunc: TruncationSpec) -> list[OrbitTerm]:
    """Orbits labelled (p, k): period 2^k log p, |det(M^r - I)| = exp(r period / 2)."""
    out = []
    for p in primes_up_to(trunc.prime_cutoff):
        for k in range(trunc.k_max() + 1):
            tau = (1 << k) * math.log(int(p))
            out.append(
                OrbitTerm(
                    label=(int(p), k),
                    period=tau,
                    maslov=0.0,
                    stability_fn=_ansatz_stability(tau),
                    andreev_parity=1,
                )
            )
    return out


def nosc_prime_sum(E: float, trunc: TruncationSpec) -> float:
    """Truncated prime expansion of N_osc: -(1/pi) sum sin(rE log p)/(r p^(r/2))."""
    if E < 0:
        raise ValueError("E must be non-negative")
    return float(nosc_prime_sum_grid([float(E)], trunc)[0])


def nosc_prime_sum_grid(E_grid, trunc: TruncationSpec, damping: float = 0.0) -> np.ndarray:
    """``nosc_prime_sum`` over a grid; ``damping`` multiplies each term by
    exp(-(r log p)^2 w^2 / 2), i.e. Gaussian smoothing of width w in E."""
    grid = np.asarray(E_grid, dtype=float)
    primes = primes_up_to(trunc.prime_cutoff)
    R = trunc.rep_cutoff
    logp = np.repeat(np.log(primes.astype(float)), R)
    rr = np.tile(np.arange(1, R + 1, dtype=float), primes.size)
    freq = rr * logp
    amp = 1.0 / (rr * np.exp(freq / 2))
    if damping > 0:
        amp = amp * np.exp(-0.5 * (freq * damping) ** 2)
    out = np.empty(grid.size)
    for i, e in enumerate(grid):
        out[i] = -math.fsum((amp * np.sin(freq * e)).tolist()) / math.pi
    return out


def gutzwiller_sum(orbits: Sequence[OrbitTerm], E: float, rep_cutoff: int, hbar: float = 1.0) -> float:
    """Generic trace-formula sum: +(1/(pi hbar)) sum sin(r S/hbar - r mu)/(r |det|^(1/2))."""
    terms = []
    for po in orbits:
        S = po.action(E)
        for r in range(1, rep_cutoff + 1):
            terms.append(math.sin(r * S / hbar - r * po.maslov) / (r * math.sqrt(po.stability(r))))
    return math.fsum(terms) / (math.pi * hbar)


def class_c_sum(
    orbits: Sequence[OrbitTerm], E: float, rep_cutoff: int | TruncationSpec, hbar: float = 1.0
) -> float:
    """Class-C sum: +(1/(pi hbar)) sum (-1)^r sin(r E tau/hbar)/(r |det|).

    The determinant is not square-rooted.  Passing a closed TruncationSpec
    restricts orbit (p, k) to repetitions with 2^k r <= n_max.
    """
    terms = []
    for po in orbits:
        if isinstance(rep_cutoff, TruncationSpec):
            R = rep_cutoff.reps_for(po.label[1])
        else:
            R = rep_cutoff
        for r in range(1, R + 1):
            sign = -1.0 if r % 2 else 1.0
            terms.append(sign * math.sin(r * E * po.period / hbar) / (r * po.stability(r)))
    return math.fsum(terms) / (math.pi * hbar)


def class_c_term(po: OrbitTerm, E: float, r: int) -> float:
    sign = -1.0 if r % 2 else 1.0
    return sign * math.sin(r * E * po.period) / (r * po.stability(r)) / math.pi


def prime_term(p: int, n: int, E: float) -> float:
    """The (p, n) term of the prime expansion of N_osc."""
    return -math.sin(n * E * math.log(p)) / (n * p ** (n / 2)) / math.pi


# -- doubling identity ------------------------------------------------------

def _tail_bound(amplitude: float, q: float, n_max: int) -> float:
    # n has at most bit_length(n) <= n preimages 2^k r, each bounded by |f(n)|,
    # and sum_{n > M} n q^n = q^(M+1) ((M+1) - M q) / (1-q)^2
    M = n_max
    return amplitude * q ** (M + 1) * ((M + 1) - M * q) / (1 - q) ** 2


def doubling_identity_check(
    f: Callable[[int], float],
    tail_bound: float,
    amplitude: float = 1.0,
    tol: float = 1e-12,
    max_terms: int = 10**6,
) -> tuple[float, float]:
    """Both sides of sum_k sum_r (-1)^r f(2^k r)/r = -sum_r f(r)/r.

    The caller certifies |f(n)| <= amplitude * tail_bound**n.  Truncation is
    at n = 2^k r <= n_max with n_max the first value for which both tails are
    provably below ``tol``.
    """
    q = float(tail_bound)
    if not 0 <= q < 1:
        raise TailBoundError(f"geometric ratio {q} does not give a convergent tail")
    n_max = 1
    while _tail_bound(amplitude, q, n_max) >= tol:
        n_max += 1
        if n_max > max_terms:
            raise TailBoundError(f"tail below {tol:g} needs more than {max_terms} terms")
    fvals = [0.0] + [f(n) for n in range(1, n_max + 1)]
    rhs = -math.fsum(fvals[r] / r for r in range(1, n_max + 1))
    lhs_terms = []
    k = 0
    while (1 << k) <= n_max:
        for r in range(1, (n_max >> k) + 1):
            lhs_terms.append((-1.0 if r % 2 else 1.0) * fvals[(1 << k) * r] / r)
        k += 1
    return math.fsum(lhs_terms), rhs


def doubling_coefficient(n: int) -> Fraction:
    """Exact sum over the preimages n = 2^k r of (-1)^r / r; equals -1/n."""
    total = Fraction(0)
    k = 0
    while n % (1 << k) == 0:
        r = n >> k
        total += Fraction(-1 if r % 2 else 1, r)
        k += 1
    return total


class OpenIndexSetError(ValueError):
    pass


def equivalence_check(E: float, n_max: int, prime_cutoff: int, closed: bool = True) -> tuple[float, float]:
    """Class-C ansatz sum over {(p,k,r): 2^k r <= n_max} against the prime form
    -(1/pi) sum_{p, n <= n_max} sin(nE log p)/(n p^(n/2)).

    Each prime-form coefficient is rebuilt exactly from its (k, r) preimages
    before the floating-point sums are compared.
    """
    if not closed:
        raise OpenIndexSetError("index set must be closed under n = 2^k r <= n_max")
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    for n in range(1, n_max + 1):
        c = doubling_coefficient(n)
        if c != Fraction(-1, n):
            raise ArithmeticError(f"coefficient for n={n} is {c}, not -1/{n}")
    trunc = TruncationSpec(prime_cutoff, rep_cutoff=n_max, closed=True)
    ansatz_value = class_c_sum(ansatz_orbits(trunc), E, trunc)
    prime_terms = []
    for p in primes_up_to(prime_cutoff):
        lp = math.log(int(p))
        for n in range(1, n_max + 1):
            prime_terms.append(math.sin(n * E * lp) / (n * math.exp(n * lp / 2)))
    prime_value = -math.fsum(prime_terms) / math.pi
    return ansatz_value, prime_value


# -- sign comparisons -------------------------------------------------------

def mu_scan(E_values, period: float = math.log(2), n_mu: int = 1000, reps=(1, 2)) -> np.ndarray:
    """For each mu on a uniform grid of [0, 2 pi), whether the Gutzwiller terms
    sin(r(S - mu)) carry the sign of the prime-expansion terms -sin(r S) for
    every listed r and every E.  Returns a boolean array of length n_mu."""
    E = np.asarray(E_values, dtype=float)
    mus = 2 * np.pi * np.arange(n_mu) / n_mu
    S = E * period
    ok = np.ones(n_mu, dtype=bool)
    for r in reps:
        target = np.sign(-np.sin(r * S))
        got = np.sign(np.sin(r * (S[None, :] - mus[:, None])))
        ok &= np.all(got == target[None, :], axis=1)
    return ok


# -- staircase reconstruction -----------------------------------------------

_GH_X, _GH_W = np.polynomial.hermite.hermgauss(40)


def _smoothed_nbar(E: np.ndarray, width: float) -> np.ndarray:
    if width <= 0:
        return np.asarray(lfunc.smooth_count(E))
    pts = E[:, None] + math.sqrt(2) * width * _GH_X[None, :]
    vals = np.asarray(lfunc.smooth_count(np.abs(pts)))
    return vals @ _GH_W / math.sqrt(math.pi)


def reconstruct_staircase(E_grid, trunc: TruncationSpec, smoothing_width: float = 0.0) -> np.ndarray:
    """Nbar(E) plus the truncated prime sum, Gaussian-smoothed in E.

    Smoothing is applied exactly: each oscillatory term picks up its Gaussian
    transform factor and Nbar is averaged by Gauss-Hermite quadrature, so the
    result does not depend on the grid spacing.
    """
    grid = np.asarray(E_grid, dtype=float)
    if np.any(np.diff(grid) <= 0):
        raise ValueError("E_grid must be increasing")
    return _smoothed_nbar(grid, smoothing_width) + nosc_prime_sum_grid(grid, trunc, smoothing_width)
