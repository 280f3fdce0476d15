"""Unfolding and spectral statistics shared by zeta zeros, L-function zeros
and random-matrix spectra."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import special

from . import lfunc
from .arith import real_primitive_character
from .rmt import SpectrumSample
from .zeros import ZeroList, find_l_zeros

UNFOLD_DEGREE = 5
PAIR_BIN_WIDTH = 0.1
# scaled lowest zero = gamma_1 * log(d) / (2 pi); bump when the convention changes
FAMILY_SCALING_VERSION = 1


class InsufficientDataError(ValueError):
    pass


class DegenerateFitError(ArithmeticError):
    pass


@dataclass(frozen=True, eq=False)
class UnfoldedSequence:
    values: np.ndarray
    source: str
    window: tuple[float, float]

    def __post_init__(self):
        if self.source not in ("zeros", "L-zeros", "ensemble"):
            raise ValueError(f"unknown source tag {self.source!r}")

    def spacings(self) -> np.ndarray:
        return np.diff(self.values)

    def __len__(self) -> int:
        return self.values.size


def _renormalize(x: np.ndarray) -> np.ndarray:
    ms = (x[-1] - x[0]) / (x.size - 1)
    return x[0] + (x - x[0]) / ms


def unfold_zeros(zeros: ZeroList | Sequence[float], source: str = "zeros") -> UnfoldedSequence:
    """Map gamma_k to Nbar(gamma_k), then rescale to unit mean spacing."""
    g = zeros.as_array() if isinstance(zeros, ZeroList) else np.asarray(zeros, dtype=float)
    if g.size < 10:
        raise InsufficientDataError(f"need at least 10 zeros, got {g.size}")
    x = np.asarray(lfunc.smooth_count(g))
    return UnfoldedSequence(_renormalize(x), source, (float(g[0]), float(g[-1])))


def unfold_ensemble(sample: SpectrumSample | Sequence[float], bulk_window: float = 0.6) -> UnfoldedSequence:
    """Unfold the central ``bulk_window`` fraction of a spectrum.

    A degree-5 polynomial is fitted to the empirical staircase lambda_i -> i
    (global index) and evaluated at the retained levels.
    """
    ev = sample.eigenvalues if isinstance(sample, SpectrumSample) else np.asarray(sample, dtype=float)
    ev = np.sort(ev)
    if not 0 < bulk_window <= 1:
        raise ValueError(f"bulk_window must lie in (0, 1], got {bulk_window}")
    n = ev.size
    lo = int(round(n * (1 - bulk_window) / 2))
    hi = n - lo
    x = ev[lo:hi]
    idx = np.arange(lo, hi, dtype=float)
    if x.size < UNFOLD_DEGREE + 2:
        raise DegenerateFitError(f"only {x.size} levels in the bulk window")
    if np.ptp(x) == 0:
        raise DegenerateFitError("bulk window has zero width")
    poly = np.polynomial.Polynomial.fit(x, idx, UNFOLD_DEGREE)
    u = poly(x)
    if np.any(np.diff(u) <= 0):
        raise DegenerateFitError("fitted staircase is not increasing on the bulk window")
    return UnfoldedSequence(_renormalize(u), "ensemble", (float(x[0]), float(x[-1])))


# -- reference distributions ------------------------------------------------

def gue_surmise_pdf(s):
    s = np.asarray(s, dtype=float)
    return (32 / np.pi**2) * s**2 * np.exp(-4 * s**2 / np.pi)


def gue_surmise_cdf(s):
    s = np.maximum(np.asarray(s, dtype=float), 0.0)
    return special.erf(2 * s / math.sqrt(math.pi)) - (4 * s / np.pi) * np.exp(-4 * s**2 / np.pi)


def poisson_pdf(s):
    s = np.asarray(s, dtype=float)
    return np.where(s >= 0, np.exp(-s), 0.0)


def poisson_cdf(s):
    s = np.maximum(np.asarray(s, dtype=float), 0.0)
    return -np.expm1(-s)


REFERENCES: dict[str, Callable] = {"GUE": gue_surmise_cdf, "Poisson": poisson_cdf}


def ks_distance(samples, cdf: Callable) -> float:
    """sup |F_n - F| for the empirical CDF of ``samples``."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    if n == 0:
        raise InsufficientDataError("no samples")
    F = cdf(x)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - F), np.max(F - (i - 1) / n)))


def pooled_spacings(seqs: UnfoldedSequence | Iterable[UnfoldedSequence]) -> np.ndarray:
    if isinstance(seqs, UnfoldedSequence):
        return seqs.spacings()
    parts = [s.spacings() for s in seqs]
    return np.concatenate(parts) if parts else np.empty(0)


def spacing_ks(seqs, reference: str | Callable = "GUE") -> float:
    """KS distance between nearest-neighbour spacings and a reference law."""
    cdf = REFERENCES[reference] if isinstance(reference, str) else reference
    sp = pooled_spacings(seqs)
    if sp.size < 50:
        raise InsufficientDataError(f"need at least 50 spacings, got {sp.size}")
    return ks_distance(sp, cdf)


# -- pair correlation -------------------------------------------------------

def gue_pair_correlation(x):
    x = np.asarray(x, dtype=float)
    return 1.0 - np.sinc(x) ** 2


def gue_pair_correlation_window(x, width: float):
    """GUE curve averaged over the rectangular window [x - w/2, x + w/2]."""
    nodes, weights = np.polynomial.legendre.leggauss(16)
    x = np.asarray(x, dtype=float)[..., None]
    pts = x + 0.5 * width * nodes
    return (gue_pair_correlation(np.abs(pts)) @ weights) / 2


def pair_correlation(seqs, x_grid=None, window_width: float = PAIR_BIN_WIDTH) -> np.ndarray:
    """Rectangular-window estimate of R2 at each x in ``x_grid``.

    A point is used as a reference only when the whole range of separations
    probed lies inside its sequence; that discards the edges.
    """
    if x_grid is None:
        x_grid = np.arange(window_width / 2, 3.0, window_width)
    grid = np.asarray(x_grid, dtype=float)
    reach = float(np.max(grid)) + window_width / 2
    if isinstance(seqs, UnfoldedSequence):
        seqs = [seqs]
    seps: list[np.ndarray] = []
    n_ref = 0
    total_points = 0
    for seq in seqs:
        v = seq.values
        total_points += v.size
        last = v[-1] - reach
        refs = np.flatnonzero(v <= last)
        n_ref += refs.size
        ends = np.searchsorted(v, v[refs] + reach, side="right")
        for i, j in zip(refs, ends):
            seps.append(v[i + 1 : j] - v[i])
    if total_points < 500 or n_ref == 0:
        raise InsufficientDataError(f"pair correlation needs >= 500 points, got {total_points}")
    allseps = np.sort(np.concatenate(seps)) if seps else np.empty(0)
    lo = np.searchsorted(allseps, grid - window_width / 2, side="left")
    hi = np.searchsorted(allseps, grid + window_width / 2, side="left")
    counts = hi - lo
    # only positive separations are collected, so a window straddling 0 is
    # only partly observable
    covered = np.minimum(grid + window_width / 2, reach) - np.maximum(grid - window_width / 2, 0.0)
    return counts / (n_ref * covered)


# -- near-zero density ------------------------------------------------------

BULK_WINDOW = (0.05, 0.25)


def _upper_half(ev: np.ndarray) -> np.ndarray:
    # for odd dimension this drops the central (zero) mode
    n = ev.size
    return ev[(n + 1) // 2 :]


def near_zero_density(
    samples: Sequence[SpectrumSample] | Sequence[np.ndarray], bin_width: float | None = None
) -> tuple[float, float]:
    """Density of positive levels in [0, bin_width) and a bulk reference density.

    The bulk density is measured on [0.05 R, 0.25 R] with R the median
    spectral radius.  With ``bin_width=None`` the bin is a quarter of the
    mean spacing implied by that bulk density.
    """
    spectra = [np.sort(s.eigenvalues if isinstance(s, SpectrumSample) else np.asarray(s, dtype=float)) for s in samples]
    if not spectra:
        raise InsufficientDataError("no samples")
    radius = float(np.median([np.max(np.abs(ev)) for ev in spectra]))
    a, b = BULK_WINDOW[0] * radius, BULK_WINDOW[1] * radius
    pos = [_upper_half(ev) for ev in spectra]
    bulk_count = sum(int(np.count_nonzero((p >= a) & (p < b))) for p in pos)
    bulk = bulk_count / (len(spectra) * (b - a))
    if bin_width is None:
        if bulk == 0:
            raise InsufficientDataError("no levels in the bulk window")
        bin_width = 0.25 / bulk
    near_count = sum(int(np.count_nonzero((p >= 0) & (p < bin_width))) for p in pos)
    near = near_count / (len(spectra) * bin_width)
    return near, bulk


# -- quadratic-character family ---------------------------------------------

class NoZeroInWindow(ValueError):
    def __init__(self, modulus: int, window: float):
        self.modulus = modulus
        super().__init__(f"L(s, chi_{modulus}) has no zero in (0, {window:g})")


def lowest_l_zero(d: int, E_window: float, step: float = 0.02) -> float:
    chi = real_primitive_character(d, even=True)
    z = find_l_zeros(chi, E_window, step=step)
    if z.size == 0:
        raise NoZeroInWindow(d, E_window)
    return float(z[0])


def family_low_zeros(moduli: Sequence[int], E_window: float, step: float = 0.02) -> list[float]:
    """Lowest zero ordinate of L(s, chi_d) for each modulus, in input order."""
    return [lowest_l_zero(int(d), E_window, step) for d in moduli]


def scale_low_zeros(moduli: Sequence[int], gammas: Sequence[float]) -> np.ndarray:
    d = np.asarray(moduli, dtype=float)
    return np.asarray(gammas, dtype=float) * np.log(d) / (2 * np.pi)


def even_quadratic_moduli(limit: int) -> list[int]:
    """Odd primes p <= limit whose quadratic character is even (p = 1 mod 4)."""
    from .arith import primes_up_to

    return [int(p) for p in primes_up_to(limit) if p % 4 == 1]


def decile_density_ratio(values) -> float:
    """Mean density on [0, q10] over mean density on [q20, q30].

    Each of those intervals holds a tenth of the sample, so the ratio is
    (q30 - q20) / q10; it is small when the distribution is depleted near 0.
    """
    v = np.asarray(values, dtype=float)
    if v.size < 10:
        raise InsufficientDataError(f"need at least 10 values, got {v.size}")
    q10, q20, q30 = np.quantile(v, [0.1, 0.2, 0.3])
    return float((q30 - q20) / q10)
