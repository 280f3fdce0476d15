"""Zeta and Dirichlet L-functions near the critical line.

Everything rests on one Euler-Maclaurin evaluator for the Hurwitz zeta
function; L(s, chi) is assembled per residue class from it.  Gamma factors go
through ``scipy.special.loggamma``, whose branch is continuous off the
negative real axis, so theta and the completed functions need no unwrapping
on the critical line.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .arith import Character

ZETA_MAX_HEIGHT = 1.0e4
L_MAX_HEIGHT = 1.0e3
N_BERNOULLI = 8

# B_2, B_4, ..., B_16 divided by (2j)!
_BERNOULLI_OVER_FACT = np.array(
    [
        (1 / 6) / math.factorial(2),
        (-1 / 30) / math.factorial(4),
        (1 / 42) / math.factorial(6),
        (-1 / 30) / math.factorial(8),
        (5 / 66) / math.factorial(10),
        (-691 / 2730) / math.factorial(12),
        (7 / 6) / math.factorial(14),
        (-3617 / 510) / math.factorial(16),
    ]
)

_LOG_PI = math.log(math.pi)
_CHUNK = 2_000_000


class PoleError(ZeroDivisionError):
    """Evaluation requested at a pole."""


class DomainError(ValueError):
    """Argument outside the range where accuracy is guaranteed."""


def em_cutoff(height: float) -> int:
    return max(20, int(math.ceil(2.0 * abs(height))))


_LD = np.longdouble
_TWO_PI_LD = 2 * _LD("3.14159265358979323846264338327950288")


def _cexp_neg(s: np.ndarray, logx: np.ndarray) -> np.ndarray:
    """exp(-s log x) over the outer product of ``s`` and ``logx``.

    t log x reaches ~1e5 rad at the top of the supported range; forming that
    product and reducing it mod 2 pi in extended precision keeps the phase
    error per term near 1e-15 instead of 1e-11.
    """
    t = s.imag.astype(_LD)
    phase = np.multiply.outer(t, logx) % _TWO_PI_LD
    amp = np.exp(-np.multiply.outer(s.real, logx.astype(float)))
    ph = phase.astype(float)
    return amp * (np.cos(ph) - 1j * np.sin(ph))


def _hurwitz_head(s: np.ndarray, q: float, N: int) -> tuple[np.ndarray, np.longdouble]:
    """Euler-Maclaurin sum for zeta(s, q) without the (N+q)^(1-s)/(s-1) term."""
    logn = np.log(np.arange(N, dtype=_LD) + _LD(q))
    out = np.empty(s.shape, dtype=complex)
    step = max(1, _CHUNK // N)
    for i in range(0, s.size, step):
        out[i : i + step] = _cexp_neg(s[i : i + step], logn).sum(axis=1)
    a = N + q
    la_ld = np.log(_LD(N) + _LD(q))
    a_ms = _cexp_neg(s, np.array([la_ld]))[:, 0]
    out += 0.5 * a_ms
    poch = s.copy()
    pw = a_ms / a
    for j, c in enumerate(_BERNOULLI_OVER_FACT, start=1):
        out += c * poch * pw
        poch = poch * (s + 2 * j - 1) * (s + 2 * j)
        pw = pw / (a * a)
    return out, la_ld


def _pole_term(s: np.ndarray, la_ld) -> np.ndarray:
    """(N+q)^(1-s) / (s-1)."""
    return _cexp_neg(s - 1.0, np.array([la_ld]))[:, 0] / (s - 1.0)


def _as_complex_array(s) -> tuple[np.ndarray, bool]:
    arr = np.asarray(s, dtype=complex)
    return np.atleast_1d(arr).ravel(), arr.ndim == 0


def _zeta_em(s: np.ndarray) -> np.ndarray:
    N = em_cutoff(np.max(np.abs(s.imag)) if s.size else 0.0)
    head, la = _hurwitz_head(s, 1.0, N)
    return head + _pole_term(s, la)


def _log_sin_half_pi(s: np.ndarray) -> np.ndarray:
    # log sin(pi s / 2) for Im s >= 0, stable for large Im s
    z = 0.5 * np.pi * s
    return -1j * z + np.log((1.0 - np.exp(2j * z)) / (-2j))


def _zeta_reflected(s: np.ndarray) -> np.ndarray:
    conj = s.imag < 0
    w = np.where(conj, s.conj(), s)
    logv = (
        w * math.log(2.0)
        + (w - 1.0) * _LOG_PI
        + _log_sin_half_pi(w)
        + special.loggamma(1.0 - w)
    )
    val = np.exp(logv) * _zeta_em(1.0 - w)
    return np.where(conj, val.conj(), val)


def zeta_array(s) -> np.ndarray:
    """Vectorized zeta(s)."""
    arr, scalar = _as_complex_array(s)
    if np.any(arr == 1.0):
        raise PoleError("zeta has a pole at s = 1")
    if arr.size and np.max(np.abs(arr.imag)) > ZETA_MAX_HEIGHT:
        raise DomainError(f"|Im s| exceeds {ZETA_MAX_HEIGHT:g}")
    out = np.empty_like(arr)
    left = arr.real < 0
    if np.any(~left):
        out[~left] = _zeta_em(arr[~left])
    if np.any(left):
        out[left] = _zeta_reflected(arr[left])
    return out[0] if scalar else out


def zeta(s: complex) -> complex:
    return complex(zeta_array(complex(s)))


def _check_char_pole(arr: np.ndarray, chi: Character) -> None:
    if chi.is_principal and np.any(arr == 1.0):
        raise PoleError("L(s, chi) for a principal character has a pole at s = 1")


def _phi1(z: np.ndarray) -> np.ndarray:
    """expm1(z)/z, accurate near 0."""
    small = np.abs(z) < 1e-3
    safe = np.where(small, 1.0, z)
    big = (np.exp(safe) - 1.0) / safe
    ser = 1.0 + z / 2 + z * z / 6 + z**3 / 24 + z**4 / 120
    return np.where(small, ser, big)


def l_function_array(s, chi: Character) -> np.ndarray:
    arr, scalar = _as_complex_array(s)
    _check_char_pole(arr, chi)
    if arr.size and np.max(np.abs(arr.imag)) > L_MAX_HEIGHT:
        raise DomainError(f"|Im s| exceeds {L_MAX_HEIGHT:g}")
    d = chi.modulus
    if d == 1:
        return zeta_array(s)
    N = em_cutoff(np.max(np.abs(arr.imag)) if arr.size else 0.0)
    total = np.zeros_like(arr)
    pole = np.zeros_like(arr)
    char_sum = 0.0
    for a in range(1, d):
        c = chi.values[a]
        if c == 0:
            continue
        head, la = _hurwitz_head(arr, a / d, N)
        total += c * head
        # (N+q)^(1-s)/(s-1) = 1/(s-1) + la * phi1((1-s) la) * (-1)
        la = float(la)
        pole += -c * la * _phi1((1.0 - arr) * la)
        char_sum += c
    if abs(char_sum) > 1e-9:
        total += char_sum / (arr - 1.0)
    out = np.exp(-arr * math.log(d)) * (total + pole)
    return out[0] if scalar else out


def l_function(s: complex, chi: Character) -> complex:
    return complex(l_function_array(complex(s), chi))


def _check_gamma_pole(arr: np.ndarray) -> None:
    half = arr / 2
    bad = (half.imag == 0) & (half.real <= 0) & (half.real == np.round(half.real))
    if np.any(bad):
        raise PoleError(f"Gamma(s/2) has a pole at s = {arr[bad][0]}")


def log_gamma_inf(s):
    """log(pi^(-s/2) Gamma(s/2)) on the branch continuous off s <= 0."""
    arr, scalar = _as_complex_array(s)
    _check_gamma_pole(arr)
    out = -0.5 * arr * _LOG_PI + special.loggamma(0.5 * arr)
    return complex(out[0]) if scalar else out


def gamma_inf(s):
    out = np.exp(log_gamma_inf(s))
    return complex(out) if np.ndim(out) == 0 else out


def log_gamma_inf_path(points) -> np.ndarray:
    """log Gamma_inf along a path, with the imaginary part made continuous."""
    vals = np.asarray(log_gamma_inf(np.asarray(points, dtype=complex)))
    return vals.real + 1j * np.unwrap(vals.imag)


def completed_zeta(s):
    """Lambda(s) = Gamma_inf(s) zeta(s)."""
    arr, scalar = _as_complex_array(s)
    if np.any((arr == 0) | (arr == 1)):
        raise PoleError("Lambda has poles at s = 0 and s = 1")
    out = np.exp(log_gamma_inf(arr)) * zeta_array(arr)
    return complex(out[0]) if scalar else out


def completed_l(s, chi: Character):
    """(d/pi)^(s/2) Gamma(s/2) L(s, chi) for an even character."""
    arr, scalar = _as_complex_array(s)
    logf = 0.5 * arr * math.log(chi.modulus / math.pi) + special.loggamma(0.5 * arr)
    out = np.exp(logf) * l_function_array(arr, chi)
    return complex(out[0]) if scalar else out


# -- Riemann-Siegel theta and Hardy Z ---------------------------------------

def theta(E):
    """Riemann-Siegel theta: continuous Im log Gamma_inf(1/2 + iE)."""
    e = np.asarray(E, dtype=float)
    if np.any(e < 0):
        raise DomainError("theta is defined here for E >= 0")
    out = special.loggamma(0.25 + 0.5j * e).imag - 0.5 * e * _LOG_PI
    return float(out) if out.ndim == 0 else out


_THETA_SERIES = (1 / 48, 7 / 5760, 31 / 80640, 127 / 430080, 511 / 1216512)


def theta_asymptotic(E):
    """Large-E expansion of theta, independent of any log-gamma routine."""
    e = np.asarray(E, dtype=float)
    out = 0.5 * e * np.log(e / (2 * np.pi)) - 0.5 * e - np.pi / 8
    inv = 1.0 / e
    p = inv
    for c in _THETA_SERIES:
        out = out + c * p
        p = p * inv * inv
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class SmoothCount:
    E: float
    exact: float
    asymptotic: float


def smooth_count(E):
    """Nbar(E) = theta(E)/pi + 1."""
    return theta(E) / np.pi + 1.0


def smooth_count_asymptotic(E):
    """(E/2pi) log(E/2pi) - E/2pi + 7/8, truncated before the O(1/E) tail."""
    x = np.asarray(E, dtype=float) / (2 * np.pi)
    out = x * np.log(x) - x + 7.0 / 8.0
    return float(out) if out.ndim == 0 else out


def smooth_count_pair(E: float) -> SmoothCount:
    return SmoothCount(float(E), float(smooth_count(E)), float(smooth_count_asymptotic(E)))


def hardy_z_complex(E) -> np.ndarray:
    e = np.asarray(E, dtype=float)
    vals = np.exp(1j * np.asarray(theta(e))) * zeta_array(0.5 + 1j * e)
    return vals


def hardy_z(E):
    """Z(E) = exp(i theta(E)) zeta(1/2 + iE), real on the critical line."""
    vals = hardy_z_complex(E)
    out = np.real(vals)
    return float(out) if np.ndim(out) == 0 else out


def _check_symplectic_member(chi: Character) -> None:
    if not chi.is_real:
        raise ValueError(f"character mod {chi.modulus} is not real")
    if not chi.is_even:
        raise ValueError(f"character mod {chi.modulus} is odd")
    if not chi.is_primitive:
        raise ValueError(f"character mod {chi.modulus} is not primitive")


def l_theta(E, chi: Character):
    """Phase of the gamma/conductor factor of L(s, chi) on the critical line."""
    e = np.asarray(E, dtype=float)
    out = special.loggamma(0.25 + 0.5j * e).imag + 0.5 * e * math.log(chi.modulus / math.pi)
    return float(out) if out.ndim == 0 else out


def l_hardy_z_complex(E, chi: Character) -> np.ndarray:
    _check_symplectic_member(chi)
    e = np.asarray(E, dtype=float)
    return np.exp(1j * np.asarray(l_theta(e, chi))) * l_function_array(0.5 + 1j * e, chi)


def l_hardy_z(E, chi: Character):
    out = np.real(l_hardy_z_complex(E, chi))
    return float(out) if np.ndim(out) == 0 else out


# -- argument transport -----------------------------------------------------

_SIGMA_START = 2.0
_SIGMA_END = 0.5
_MAX_PHASE_STEP = np.pi / 4


def _transport_scalar(f, E: float, lo: float, hi: float, flo: complex, fhi: complex, depth: int = 0) -> float:
    step = np.angle(flo / fhi)  # from hi (right) to lo (left)
    if abs(step) < _MAX_PHASE_STEP:
        return float(step)
    if depth > 50:
        raise ArithmeticError(f"argument transport failed to resolve near sigma={lo:.6g}, E={E:.6g}")
    mid = 0.5 * (lo + hi)
    fm = complex(f(np.array([mid + 1j * E]))[0])
    return _transport_scalar(f, E, mid, hi, fm, fhi, depth + 1) + _transport_scalar(
        f, E, lo, mid, flo, fm, depth + 1
    )


def transported_arg(f, E, n_sigma: int = 25) -> tuple[np.ndarray, np.ndarray]:
    """Continuous arg f(1/2 + iE) along 2 -> 2 + iE -> 1/2 + iE.

    ``f`` is a vectorized function with Re f > 0 on Re s = 2 (true for zeta
    and every L(s, chi)), so the vertical leg contributes the principal arg.
    Returns (arg, f(1/2 + iE)).
    """
    e = np.atleast_1d(np.asarray(E, dtype=float))
    sig = np.linspace(_SIGMA_START, _SIGMA_END, n_sigma)
    pts = sig[None, :] + 1j * e[:, None]
    vals = f(pts.ravel()).reshape(pts.shape)
    steps = np.angle(vals[:, 1:] / vals[:, :-1])
    args = np.angle(vals[:, 0]) + steps.sum(axis=1)
    bad = np.flatnonzero(np.max(np.abs(steps), axis=1) >= _MAX_PHASE_STEP)
    for i in bad:
        total = float(np.angle(vals[i, 0]))
        for j in range(n_sigma - 1):
            total += _transport_scalar(f, e[i], sig[j + 1], sig[j], vals[i, j + 1], vals[i, j])
        args[i] = total
    return args, vals[:, -1]
