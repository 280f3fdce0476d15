import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from rsl import arith
from rsl.arith import (
    log_integral,
    prime_count_progression,
    real_primitive_character,
    sieve_primes,
    totient,
)


def trial_division_primes(n):
    return [k for k in range(2, n + 1) if all(k % d for d in range(2, math.isqrt(k) + 1))]


def segmented_count(limit, seg=2**15):
    base = trial_division_primes(math.isqrt(limit))
    count = 0
    for lo in range(2, limit + 1, seg):
        hi = min(lo + seg, limit + 1)
        mark = np.ones(hi - lo, dtype=bool)
        for p in base:
            start = max(p * p, (lo + p - 1) // p * p)
            mark[start - lo :: p] = False
        count += int(mark.sum())
    return count


def li_oracle(x):
    # PV int_0^x dt/log t = int_0^x [1/log t - 1/(t-1)] dt + log(x - 1)
    def smooth(t):
        if t == 0:
            return 1.0
        if abs(t - 1) < 1e-6:
            return 0.5 - (t - 1) / 12
        return 1 / math.log(t) - 1 / (t - 1)

    pts = [0.0, 1.0, x] if x > 1 else [0.0, x]
    total = 0.0
    for a, b in zip(pts, pts[1:]):
        v, _ = integrate.quad(smooth, a, b, limit=500, epsabs=0, epsrel=1e-13)
        total += v
    return total + math.log(x - 1)


def test_sieve_small():
    assert sieve_primes(10).primes == (2, 3, 5, 7)
    assert sieve_primes(1).primes == ()
    assert sieve_primes(0).primes == ()


def test_sieve_matches_trial_division():
    assert list(sieve_primes(3000).primes) == trial_division_primes(3000)


def test_sieve_count_to_million():
    assert segmented_count(10**6) == 78498
    assert len(sieve_primes(10**6)) == 78498


def test_sieve_ceiling():
    with pytest.raises(ValueError):
        arith.primes_up_to(10**8 + 1)
    with pytest.raises(ValueError):
        sieve_primes(-1)


@pytest.mark.parametrize("d,expected", [(1, 1), (13, 12), (12, 4)])
def test_totient_values(d, expected):
    assert totient(d) == expected
    assert sum(1 for k in range(1, d + 1) if math.gcd(k, d) == 1) == expected


def test_totient_rejects_zero():
    with pytest.raises(ValueError):
        totient(0)


def test_totient_divisor_sum():
    for d in range(1, 10**4 + 1):
        divs = [e for e in range(1, math.isqrt(d) + 1) if d % e == 0]
        divs = set(divs) | {d // e for e in divs}
        assert sum(totient(e) for e in divs) == d


def test_character_mod4():
    chi = real_primitive_character(4)
    assert chi.values == (0, 1, 0, -1)
    assert chi.is_real and not chi.is_even and chi.is_primitive


def test_character_mod5():
    chi = real_primitive_character(5)
    assert chi.values[1:] == (1, -1, -1, 1)
    assert chi.is_real and chi.is_even and chi.is_primitive
    squares = {(k * k) % 5 for k in range(1, 5)}
    assert squares == {1, 4}


def test_character_mod1():
    chi = real_primitive_character(1)
    assert chi.values == (1,)
    assert chi(7) == 1


def test_character_mod8_both_parities():
    even = real_primitive_character(8)
    odd = real_primitive_character(8, even=False)
    assert even.is_even and even.values == (0, 1, 0, -1, 0, -1, 0, 1)
    assert not odd.is_even and odd.values == (0, 1, 0, 1, 0, -1, 0, -1)


@pytest.mark.parametrize("d", [6, 9, 16, 18, 25])
def test_no_real_primitive_character(d):
    with pytest.raises(ValueError, match=str(d)):
        real_primitive_character(d)


CHAR_MODULI = [3, 4, 5, 7, 8, 11, 12, 24, 13, 17, 19, 23, 29, 31, 37, 41, 97]


@pytest.mark.parametrize("d", CHAR_MODULI)
def test_character_axioms(d):
    chi = real_primitive_character(d)
    for n in range(d):
        assert (chi.values[n] == 0) == (math.gcd(n, d) > 1)
    for m in range(d):
        for n in range(d):
            assert chi.values[(m * n) % d] == chi.values[m] * chi.values[n]
    assert chi.is_even == (chi.values[d - 1] == 1)
    # minimal period: no proper divisor works as a period on units
    for e in range(1, d):
        if d % e == 0:
            units = [n for n in range(d) if math.gcd(n, d) == 1]
            assert any(chi.values[a] != chi.values[b] for a in units for b in units if (a - b) % e == 0)


@pytest.mark.parametrize("p,j", [(5, 1), (7, 1), (7, 2), (11, 3), (13, 5)])
def test_complex_character_multiplicative(p, j):
    chi = arith.prime_character(p, j)
    v = chi.values
    for m in range(p):
        for n in range(p):
            assert abs(v[(m * n) % p] - v[m] * v[n]) < 1e-12
    for n in range(1, p):
        assert abs(abs(v[n]) - 1) < 1e-12
    assert chi.is_primitive


def test_kronecker_matches_legendre():
    for p in trial_division_primes(200)[1:]:
        for a in range(p):
            euler = pow(a, (p - 1) // 2, p)
            leg = 0 if a == 0 else (1 if euler == 1 else -1)
            assert arith.kronecker(a, p) == leg


@pytest.mark.parametrize("a,d,x,expected", [(1, 4, 100, 11), (3, 4, 100, 13), (1, 4, 4, 0)])
def test_progression_counts(a, d, x, expected):
    assert prime_count_progression(a, d, x) == expected
    assert sum(1 for p in trial_division_primes(int(x)) if p % d == a) == expected


def test_progression_closed_bound():
    assert prime_count_progression(1, 4, 5) == 1
    assert prime_count_progression(1, 4, 4.999) == 0


def test_progression_rejects_noncoprime():
    with pytest.raises(ValueError):
        prime_count_progression(2, 4, 100)


@given(st.integers(2, 60), st.integers(0, 5000))
def test_progression_partition(d, x):
    total = sum(prime_count_progression(a, d, x) for a in range(1, d) if math.gcd(a, d) == 1)
    dividing = sum(1 for p in arith.factorize(d) if p <= x)
    assert total == arith.prime_count(x) - dividing


def test_prime_number_theorem_trend():
    ratios = [arith.prime_count(10**k) / (10**k / math.log(10**k)) for k in range(3, 7)]
    assert all(1.0 <= r <= 1.2 for r in ratios)
    assert all(a > b for a, b in zip(ratios, ratios[1:]))


@pytest.mark.parametrize("x", [2.0, 1.5, 10.0, 1e3, 1e6])
def test_log_integral_quadrature(x):
    assert log_integral(x) == pytest.approx(li_oracle(x), rel=1e-10)
    assert log_integral(x) == pytest.approx(float(mpmath.li(x)), rel=1e-12)


def test_log_integral_examples():
    assert log_integral(2) == pytest.approx(1.045164, abs=1e-6)
    assert log_integral(1e6) == pytest.approx(78627.55, abs=0.01)


def test_log_integral_domain():
    for x in (1.0, 0.5, 0.0, -3.0):
        with pytest.raises(ValueError):
            log_integral(x)


def test_progression_deviation_scale():
    main = log_integral(1e5) / totient(4)
    assert abs(prime_count_progression(1, 4, 1e5) - main) / main < 0.02
