"""Random-matrix ensembles (GUE, Altland-Zirnbauer classes C and D) and a
Householder + implicit-QL Hermitian eigensolver.

Randomness comes from Philox keyed by (seed, sample_index); the draw order
inside a sample is fixed, so a given (seed, sample_index) pair always yields
the same matrix whatever the number of worker threads.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numba
import numpy as np

CLASSES = ("GUE", "C", "D")
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class EnsembleSpec:
    class_label: str
    N: int
    sigma2: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.class_label not in CLASSES:
            raise ValueError(f"unknown ensemble class {self.class_label!r}; expected one of {CLASSES}")
        if self.N < 1:
            raise ValueError(f"N must be >= 1, got {self.N}")
        if not self.sigma2 > 0:
            raise ValueError(f"sigma2 must be positive, got {self.sigma2}")

    @property
    def dim(self) -> int:
        return 2 * self.N if self.class_label == "C" else self.N


@dataclass(frozen=True, eq=False)
class SpectrumSample:
    eigenvalues: np.ndarray
    spec: EnsembleSpec
    sample_index: int

    def pairing_residual(self) -> float:
        """max_k |lambda_k + lambda_{n+1-k}| relative to the spectral radius."""
        ev = self.eigenvalues
        radius = max(float(np.max(np.abs(ev))), np.finfo(float).tiny)
        return float(np.max(np.abs(ev + ev[::-1]))) / radius


def rng_for(seed: int, sample_index: int) -> np.random.Generator:
    key = ((int(seed) & _MASK64) << 64) | (int(sample_index) & _MASK64)
    return np.random.Generator(np.random.Philox(key=key))


# -- eigensolver ------------------------------------------------------------

@numba.njit(cache=True, nogil=True)
def _tridiagonalize(a):
    """Householder reduction of a complex Hermitian matrix (overwritten).

    Returns the real diagonal and the moduli of the sub-diagonal; a diagonal
    unitary rotates the complex sub-diagonal onto these.
    """
    n = a.shape[0]
    v = np.zeros(n, dtype=np.complex128)
    p = np.zeros(n, dtype=np.complex128)
    for k in range(n - 2):
        m = k + 1
        xnorm2 = 0.0
        for i in range(m, n):
            xnorm2 += a[i, k].real ** 2 + a[i, k].imag ** 2
        xnorm = math.sqrt(xnorm2)
        tail2 = xnorm2 - (a[m, k].real ** 2 + a[m, k].imag ** 2)
        if tail2 <= 1e-300:
            continue
        x0 = a[m, k]
        ax0 = abs(x0)
        phase = x0 / ax0 if ax0 > 0 else 1.0 + 0j
        alpha = -phase * xnorm
        for i in range(m, n):
            v[i] = a[i, k]
        v[m] -= alpha
        vnorm2 = 0.0
        for i in range(m, n):
            vnorm2 += v[i].real ** 2 + v[i].imag ** 2
        vnorm = math.sqrt(vnorm2)
        for i in range(m, n):
            v[i] /= vnorm
        # p = A22 v, K = v* p, w = p - K v
        for i in range(m, n):
            s = 0j
            for j in range(m, n):
                s += a[i, j] * v[j]
            p[i] = s
        K = 0j
        for i in range(m, n):
            K += v[i].conjugate() * p[i]
        for i in range(m, n):
            p[i] -= K * v[i]
        for i in range(m, n):
            vi = v[i]
            pi_ = p[i]
            for j in range(m, n):
                a[i, j] -= 2.0 * (vi * p[j].conjugate() + pi_ * v[j].conjugate())
        a[m, k] = alpha
        a[k, m] = alpha.conjugate()
        for i in range(m + 1, n):
            a[i, k] = 0j
            a[k, i] = 0j
    d = np.empty(n)
    e = np.zeros(n)
    for i in range(n):
        d[i] = a[i, i].real
    for i in range(n - 1):
        e[i] = abs(a[i + 1, i])
    return d, e


@numba.njit(cache=True, nogil=True)
def _tql(d, e):
    """Implicitly shifted QL on a real symmetric tridiagonal matrix.

    ``d`` holds the diagonal, ``e[i]`` couples i and i+1; both are overwritten
    and ``d`` ends up holding the eigenvalues.
    """
    n = d.shape[0]
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= 2.2e-16 * dd:
                    break
                m += 1
            if m == l:
                break
            it += 1
            if it > 60:
                raise RuntimeError("QL iteration did not converge")
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + (r if g >= 0 else -r))
            s = 1.0
            c = 1.0
            p = 0.0
            i = m - 1
            underflow = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                i -= 1
            if underflow and i >= l:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return d


def hermitian_asymmetry(matrix: np.ndarray) -> float:
    m = np.asarray(matrix)
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def eigenvalues(matrix) -> np.ndarray:
    """Sorted eigenvalues of a Hermitian matrix."""
    m = np.array(matrix, dtype=np.complex128, copy=True)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    scale = float(np.max(np.abs(m))) if m.size else 0.0
    asym = hermitian_asymmetry(m)
    if asym > 1e-12 * max(scale, 1e-300):
        raise ValueError(f"matrix is not Hermitian: max |H - H^dagger| = {asym:.3e}")
    if m.shape[0] == 0:
        return np.empty(0)
    d, e = _tridiagonalize(m)
    return np.sort(_tql(d, e))


# -- ensembles --------------------------------------------------------------

def gue_matrix(spec: EnsembleSpec, sample_index: int) -> np.ndarray:
    n = spec.N
    rng = rng_for(spec.seed, sample_index)
    sd = math.sqrt(spec.sigma2)
    diag = rng.standard_normal(n) * sd
    iu = np.triu_indices(n, 1)
    re = rng.standard_normal(iu[0].size) * sd / math.sqrt(2)
    im = rng.standard_normal(iu[0].size) * sd / math.sqrt(2)
    h = np.zeros((n, n), dtype=complex)
    h[iu] = re + 1j * im
    h = h + h.conj().T
    h[np.diag_indices(n)] = diag
    return h


def _imag_antisymmetric(rng, n: int, sd: float) -> np.ndarray:
    iu = np.triu_indices(n, 1)
    b = np.zeros((n, n))
    b[iu] = rng.standard_normal(iu[0].size) * sd
    b = b - b.T
    return 1j * b


def _real_symmetric(rng, n: int, sd: float) -> np.ndarray:
    iu = np.triu_indices(n, 0)
    s = np.zeros((n, n))
    s[iu] = rng.standard_normal(iu[0].size) * sd
    return s + np.triu(s, 1).T


def class_c_matrix(spec: EnsembleSpec, sample_index: int) -> np.ndarray:
    """H = A (x) 1 + sum_i S_i (x) sigma_i as a 2N x 2N block matrix.

    A is imaginary antisymmetric, each S_i real symmetric.  Blocks are
    [[A + S3, S1 - i S2], [S1 + i S2, A - S3]].
    """
    n = spec.N
    rng = rng_for(spec.seed, sample_index)
    sd = math.sqrt(spec.sigma2)
    a = _imag_antisymmetric(rng, n, sd)
    s1, s2, s3 = (_real_symmetric(rng, n, sd) for _ in range(3))
    h = np.empty((2 * n, 2 * n), dtype=complex)
    h[:n, :n] = a + s3
    h[:n, n:] = s1 - 1j * s2
    h[n:, :n] = s1 + 1j * s2
    h[n:, n:] = a - s3
    return h


def class_d_matrix(spec: EnsembleSpec, sample_index: int) -> np.ndarray:
    rng = rng_for(spec.seed, sample_index)
    return _imag_antisymmetric(rng, spec.N, math.sqrt(spec.sigma2))


_BUILDERS = {"GUE": gue_matrix, "C": class_c_matrix, "D": class_d_matrix}


def ensemble_matrix(spec: EnsembleSpec, sample_index: int = 0) -> np.ndarray:
    return _BUILDERS[spec.class_label](spec, sample_index)


def particle_hole_residual(h: np.ndarray) -> float:
    """max entry of (sigma_2 (x) 1) H* (sigma_2 (x) 1) + H; zero for class C."""
    n = h.shape[0] // 2
    hc = h.conj()
    # sigma_2 = [[0, -i], [i, 0]] acting on the block index
    conj = np.empty_like(h)
    conj[:n, :n] = hc[n:, n:]
    conj[:n, n:] = -hc[n:, :n]
    conj[n:, :n] = -hc[:n, n:]
    conj[n:, n:] = hc[:n, :n]
    return float(np.max(np.abs(conj + h)))


def _sample(spec: EnsembleSpec, sample_index: int) -> SpectrumSample:
    ev = eigenvalues(ensemble_matrix(spec, sample_index))
    ev.setflags(write=False)
    return SpectrumSample(ev, spec, sample_index)


def sample_gue(spec: EnsembleSpec, sample_index: int = 0) -> SpectrumSample:
    if spec.class_label != "GUE":
        raise ValueError("sample_gue needs a GUE spec")
    return _sample(spec, sample_index)


def sample_class_c(spec: EnsembleSpec, sample_index: int = 0) -> SpectrumSample:
    if spec.class_label != "C":
        raise ValueError("sample_class_c needs a class-C spec")
    return _sample(spec, sample_index)


def sample_class_d(spec: EnsembleSpec, sample_index: int = 0) -> SpectrumSample:
    if spec.class_label != "D":
        raise ValueError("sample_class_d needs a class-D spec")
    return _sample(spec, sample_index)


def sample_spectra(spec: EnsembleSpec, n_samples: int, threads: int = 1, start: int = 0) -> list[SpectrumSample]:
    """Samples start..start+n_samples-1, ordered by index."""
    idx = range(start, start + n_samples)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(lambda i: _sample(spec, i), idx))
    return [_sample(spec, i) for i in idx]
