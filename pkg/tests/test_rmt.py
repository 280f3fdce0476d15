import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rsl import rmt, spectra
from rsl.rmt import (
    EnsembleSpec,
    eigenvalues,
    ensemble_matrix,
    particle_hole_residual,
    sample_class_c,
    sample_class_d,
    sample_gue,
    sample_spectra,
)


def faddeev_leverrier_roots(h):
    """Characteristic polynomial by Faddeev-LeVerrier, roots via the companion matrix."""
    n = h.shape[0]
    coeffs = [1.0 + 0j]
    m = np.zeros_like(h)
    ident = np.eye(n)
    for k in range(1, n + 1):
        m = h @ m + coeffs[-1] * ident
        coeffs.append(-np.trace(h @ m) / k)
    roots = np.roots(np.array(coeffs))
    return np.sort(roots.real), np.max(np.abs(roots.imag))


def random_hermitian(rng, n):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (a + a.conj().T) / 2


# -- eigensolver ------------------------------------------------------------

def test_eigenvalues_trivial():
    assert list(eigenvalues(np.eye(3))) == pytest.approx([1, 1, 1], abs=1e-15)
    assert list(eigenvalues(np.diag([5.0, -2.0, 0.0]))) == pytest.approx([-2, 0, 5], abs=1e-15)
    assert eigenvalues(np.zeros((0, 0))).size == 0
    assert list(eigenvalues([[4.0]])) == [4.0]


@pytest.mark.parametrize("seed", range(5))
def test_eigenvalues_char_poly_oracle(seed):
    h = random_hermitian(np.random.default_rng(seed), 8)
    ref, imag = faddeev_leverrier_roots(h)
    assert imag < 1e-6
    assert np.max(np.abs(eigenvalues(h) - ref)) < 1e-8


@pytest.mark.parametrize("n", [2, 7, 31, 120])
def test_eigenvalue_residuals(n):
    h = random_hermitian(np.random.default_rng(n), n)
    ev = eigenvalues(h)
    norm = np.linalg.norm(h, 2)
    # min singular value of H - lambda I is the best achievable ||Hv - lambda v||
    for lam in ev[:: max(1, n // 10)]:
        smin = np.linalg.svd(h - lam * np.eye(n), compute_uv=False)[-1]
        assert smin < 1e-8 * norm
    assert np.sum(ev) == pytest.approx(np.trace(h).real, abs=1e-10 * n * norm)
    assert np.all(np.diff(ev) >= 0)


@given(st.integers(1, 25), st.integers(0, 10**6))
def test_eigenvalues_match_lapack(n, seed):
    h = random_hermitian(np.random.default_rng(seed), n)
    assert np.max(np.abs(eigenvalues(h) - np.linalg.eigvalsh(h))) < 1e-10 * max(1, np.abs(h).max()) * n


def test_eigenvalues_real_symmetric_and_degenerate():
    q, _ = np.linalg.qr(np.random.default_rng(3).standard_normal((6, 6)))
    h = q @ np.diag([1.0, 1.0, 1.0, -2.0, -2.0, 7.0]) @ q.T
    h = (h + h.T) / 2
    assert eigenvalues(h) == pytest.approx([-2, -2, 1, 1, 1, 7], abs=1e-12)


def test_eigenvalues_reject_non_hermitian():
    m = np.array([[1.0, 2.0], [0.0, 1.0]])
    with pytest.raises(ValueError, match="2.000e"):
        eigenvalues(m)
    with pytest.raises(ValueError):
        eigenvalues(np.ones((2, 3)))


def test_eigenvalues_deterministic():
    h = random_hermitian(np.random.default_rng(11), 40)
    assert eigenvalues(h).tobytes() == eigenvalues(h).tobytes()


# -- specs ------------------------------------------------------------------

def test_spec_validation():
    for bad in (dict(class_label="X", N=3), dict(class_label="GUE", N=0), dict(class_label="C", N=2, sigma2=0.0)):
        with pytest.raises(ValueError):
            EnsembleSpec(**bad)
    assert EnsembleSpec("C", 5).dim == 10
    assert EnsembleSpec("D", 5).dim == 5


def test_sampler_rejects_wrong_class():
    with pytest.raises(ValueError):
        sample_gue(EnsembleSpec("C", 2))
    with pytest.raises(ValueError):
        sample_class_c(EnsembleSpec("D", 2))
    with pytest.raises(ValueError):
        sample_class_d(EnsembleSpec("GUE", 2))


# -- GUE --------------------------------------------------------------------

def test_gue_n1_mean():
    spec = EnsembleSpec("GUE", 1, sigma2=2.0, seed=5)
    vals = np.array([sample_gue(spec, i).eigenvalues[0] for i in range(10**4)])
    sd = math.sqrt(2.0)
    assert abs(vals.mean()) < 3 * sd / 100
    assert vals.std() == pytest.approx(sd, rel=0.05)


def test_gue_n2_trace():
    spec = EnsembleSpec("GUE", 2, seed=1)
    for i in range(20):
        h = ensemble_matrix(spec, i)
        assert np.all(np.isreal(np.diag(h)))
        assert sample_gue(spec, i).eigenvalues.sum() == pytest.approx(np.trace(h).real, abs=1e-12)


def test_gue_entry_variances():
    spec = EnsembleSpec("GUE", 60, sigma2=1.0, seed=2)
    h = np.stack([ensemble_matrix(spec, i) for i in range(50)])
    iu = np.triu_indices(60, 1)
    off = h[:, iu[0], iu[1]]
    assert np.var(off.real) == pytest.approx(0.5, rel=0.05)
    assert np.var(off.imag) == pytest.approx(0.5, rel=0.05)
    assert np.var(np.diagonal(h, axis1=1, axis2=2).real) == pytest.approx(1.0, rel=0.1)


def test_gue_semicircle():
    N = 200
    spec = EnsembleSpec("GUE", N, seed=99)
    ev = np.concatenate([s.eigenvalues for s in sample_spectra(spec, 500, threads=4)]) / math.sqrt(N)
    edges = np.linspace(-2.2, 2.2, 45)
    hist, _ = np.histogram(ev, bins=edges, density=True)
    mids = 0.5 * (edges[1:] + edges[:-1])
    # semicircle averaged over each bin, by fine quadrature
    fine = np.linspace(-2.2, 2.2, mids.size * 200 + 1)
    rho = np.sqrt(np.clip(4 - fine**2, 0, None)) / (2 * math.pi)
    ref = np.array([rho[i * 200 : (i + 1) * 200 + 1].mean() for i in range(mids.size)])
    assert np.max(np.abs(hist - ref)) < 0.05


def test_gue_spacing_ks():
    spec = EnsembleSpec("GUE", 200, seed=3)
    seqs = [spectra.unfold_ensemble(s) for s in sample_spectra(spec, 100, threads=4)]
    assert spectra.spacing_ks(seqs, "GUE") < 0.05
    assert spectra.spacing_ks(seqs, "Poisson") > 0.2


# -- class C ----------------------------------------------------------------

def test_class_c_n1():
    spec = EnsembleSpec("C", 1, seed=4)
    for i in range(10):
        h = ensemble_matrix(spec, i)
        assert h.shape == (2, 2)
        s3 = h[0, 0].real
        s1, s2 = h[1, 0].real, h[1, 0].imag
        r = math.sqrt(s1 * s1 + s2 * s2 + s3 * s3)
        ev = sample_class_c(spec, i).eigenvalues
        assert ev == pytest.approx([-r, r], abs=1e-14)
        # A block is 1x1 antisymmetric, hence zero
        assert h[0, 0] + h[1, 1] == 0


def test_class_c_structure_n50():
    spec = EnsembleSpec("C", 50, seed=8)
    for i in range(20):
        h = ensemble_matrix(spec, i)
        assert rmt.hermitian_asymmetry(h) == 0.0
        assert particle_hole_residual(h) <= 1e-13
        smp = sample_class_c(spec, i)
        assert smp.eigenvalues.size == 100
        assert smp.pairing_residual() < 1e-10


def test_class_c_blocks():
    spec = EnsembleSpec("C", 6, seed=1)
    h = ensemble_matrix(spec, 0)
    n = 6
    a = 0.5 * (h[:n, :n] + h[n:, n:])
    assert np.all(a.real == 0)
    assert np.allclose(a, -a.T, atol=0)
    s1 = 0.5 * (h[:n, n:] + h[n:, :n])
    assert np.allclose(s1.imag, 0, atol=1e-15) and np.allclose(s1, s1.T, atol=0)


def test_particle_hole_detects_breaking():
    spec = EnsembleSpec("C", 4, seed=1)
    h = ensemble_matrix(spec, 0)
    h[0, 0] += 0.3
    assert particle_hole_residual(h) > 0.2


# -- class D ----------------------------------------------------------------

def test_class_d_n2():
    spec = EnsembleSpec("D", 2, seed=6)
    for i in range(10):
        h = ensemble_matrix(spec, i)
        a = h[0, 1].imag
        assert sample_class_d(spec, i).eigenvalues == pytest.approx([-abs(a), abs(a)], abs=1e-14)


@pytest.mark.parametrize("N", [3, 5, 51])
def test_class_d_odd_has_zero_mode(N):
    spec = EnsembleSpec("D", N, seed=2)
    for i in range(10):
        ev = sample_class_d(spec, i).eigenvalues
        assert np.count_nonzero(np.abs(ev) < 1e-10) == 1


def test_class_d_even_no_zero_mode_and_antisymmetry():
    spec = EnsembleSpec("D", 40, seed=2)
    for i in range(5):
        h = ensemble_matrix(spec, i)
        assert np.array_equal(h, -h.T)
        assert np.all(h.real == 0)
        smp = sample_class_d(spec, i)
        assert np.min(np.abs(smp.eigenvalues)) > 1e-10
        assert smp.pairing_residual() < 1e-10


# -- determinism ------------------------------------------------------------

@given(st.integers(0, 2**63), st.integers(0, 2**40), st.sampled_from(rmt.CLASSES))
def test_seed_determinism(seed, idx, label):
    spec = EnsembleSpec(label, 5, seed=seed)
    assert ensemble_matrix(spec, idx).tobytes() == ensemble_matrix(spec, idx).tobytes()


def test_independent_streams():
    spec = EnsembleSpec("GUE", 4, seed=1)
    assert not np.array_equal(ensemble_matrix(spec, 0), ensemble_matrix(spec, 1))
    other = EnsembleSpec("GUE", 4, seed=2)
    assert not np.array_equal(ensemble_matrix(spec, 0), ensemble_matrix(other, 0))


def test_thread_count_does_not_matter():
    spec = EnsembleSpec("C", 20, seed=17)
    one = sample_spectra(spec, 12, threads=1)
    many = sample_spectra(spec, 12, threads=4)
    assert [s.sample_index for s in many] == list(range(12))
    for a, b in zip(one, many):
        assert a.eigenvalues.tobytes() == b.eigenvalues.tobytes()
    tail = sample_spectra(spec, 4, start=8)
    assert tail[0].eigenvalues.tobytes() == one[8].eigenvalues.tobytes()
