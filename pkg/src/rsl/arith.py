"""Integer arithmetic: primes, totients, Dirichlet characters, prime counts in
arithmetic progressions and the logarithmic integral."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special

SIEVE_CEILING = 10**8


@dataclass(frozen=True)
class PrimeTable:
    limit: int
    primes: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.primes)

    def __iter__(self):
        return iter(self.primes)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.primes, dtype=np.int64)


@dataclass(frozen=True)
class Character:
    """A Dirichlet character stored as its table of values mod ``modulus``.

    Real characters hold exact integers in {-1, 0, 1}; complex ones hold
    unit-modulus doubles.
    """

    modulus: int
    values: tuple
    is_primitive: bool
    is_real: bool
    is_even: bool

    def __call__(self, n: int):
        return self.values[n % self.modulus]

    @property
    def is_principal(self) -> bool:
        return all(v == 1 for n, v in enumerate(self.values) if math.gcd(n, self.modulus) == 1)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float if self.is_real else complex)


def _sieve_mask(limit: int) -> np.ndarray:
    if limit > SIEVE_CEILING:
        raise ValueError(f"sieve limit {limit} exceeds ceiling {SIEVE_CEILING}")
    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if mask[p]:
            mask[p * p :: p] = False
    return mask


@lru_cache(maxsize=8)
def _cached_primes(limit: int) -> np.ndarray:
    arr = np.flatnonzero(_sieve_mask(limit))
    arr.setflags(write=False)
    return arr


def primes_up_to(limit: int) -> np.ndarray:
    """Read-only int64 array of the primes <= limit."""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    return _cached_primes(int(limit))


def sieve_primes(limit: int) -> PrimeTable:
    if limit < 0:
        raise ValueError(f"limit must be non-negative, got {limit}")
    return PrimeTable(limit=int(limit), primes=tuple(int(p) for p in primes_up_to(limit)))


def factorize(n: int) -> dict[int, int]:
    if n < 1:
        raise ValueError(f"cannot factorize {n}")
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def totient(d: int) -> int:
    if d < 1:
        raise ValueError(f"totient needs d >= 1, got {d}")
    result = d
    for p in factorize(d):
        result -= result // p
    return result


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n) for n >= 0."""
    if n < 0:
        raise ValueError("only n >= 0 supported")
    if n == 0:
        return 1 if abs(a) == 1 else 0
    result = 1
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            result = -result
    # Jacobi symbol for odd n
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def _squarefree(n: int) -> bool:
    return all(e == 1 for e in factorize(abs(n)).values())


def is_fundamental_discriminant(D: int) -> bool:
    if D == 1:
        return True
    if D % 4 == 1:
        return _squarefree(D)
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and _squarefree(m)
    return False


def _induced_by_smaller_modulus(values, d: int) -> bool:
    for e in range(1, d):
        if d % e:
            continue
        seen: dict[int, object] = {}
        consistent = True
        for n in range(d):
            if math.gcd(n, d) != 1:
                continue
            r = n % e
            if r in seen and seen[r] != values[n]:
                consistent = False
                break
            seen.setdefault(r, values[n])
        if consistent:
            return True
    return False


def _build_character(d: int, values: tuple, is_real: bool) -> Character:
    if d == 1:
        return Character(1, (1,), True, True, True)
    primitive = not _induced_by_smaller_modulus(values, d)
    last = values[d - 1]
    is_even = bool(abs(last - 1) < 1e-12)
    return Character(d, values, primitive, is_real, is_even)


def real_primitive_character(d: int, even: bool | None = None) -> Character:
    """The real primitive character of conductor ``d``.

    Built from the Kronecker symbol of the fundamental discriminant +-d.
    Moduli like 8 carry both an even and an odd one; ``even`` picks, and by
    default the even one wins.
    """
    if d < 1:
        raise ValueError(f"modulus must be positive, got {d}")
    if d == 1:
        return _build_character(1, (1,), True)
    candidates = [D for D in (d, -d) if is_fundamental_discriminant(D)]
    if not candidates:
        raise ValueError(f"modulus {d} admits no real primitive character")
    chars = []
    for D in candidates:
        values = tuple(kronecker(D, n) for n in range(d))
        chi = _build_character(d, values, True)
        assert chi.is_primitive
        chars.append(chi)
    if even is not None:
        chars = [c for c in chars if c.is_even == even]
        if not chars:
            kind = "even" if even else "odd"
            raise ValueError(f"modulus {d} admits no {kind} real primitive character")
    chars.sort(key=lambda c: not c.is_even)
    return chars[0]


def primitive_root(p: int) -> int:
    if len(factorize(p)) != 1 or factorize(p).get(p) != 1:
        raise ValueError(f"{p} is not prime")
    order = p - 1
    qs = list(factorize(order)) if order > 1 else []
    for g in range(1, p):
        if all(pow(g, order // q, p) != 1 for q in qs):
            return g
    raise ArithmeticError(f"no primitive root mod {p}")


def prime_character(p: int, j: int) -> Character:
    """Character mod prime p sending a primitive root g to exp(2 pi i j/(p-1))."""
    g = primitive_root(p)
    order = p - 1
    j %= order
    vals: list = [0] * p
    x = 1
    for k in range(order):
        z = complex(np.exp(2j * np.pi * j * k / order))
        vals[x] = z
        x = x * g % p
    is_real = (2 * j) % order == 0
    if is_real:
        vals = [int(round(v.real)) if v != 0 else 0 for v in vals]
    return _build_character(p, tuple(vals), is_real)


def prime_count_progression(a: int, d: int, x: float) -> int:
    """Number of primes p <= x with p = a (mod d)."""
    if d < 1:
        raise ValueError(f"modulus must be positive, got {d}")
    if math.gcd(a, d) != 1:
        raise ValueError(f"gcd({a}, {d}) != 1")
    if x < 0:
        raise ValueError(f"x must be non-negative, got {x}")
    ps = primes_up_to(int(math.floor(x)))
    return int(np.count_nonzero(ps % d == a % d))


def prime_count(x: float) -> int:
    return int(primes_up_to(int(math.floor(x))).size)


def log_integral(x: float) -> float:
    """Principal-value Li(x) = PV int_0^x dt / log t, via Ei(log x)."""
    if not x > 1:
        raise ValueError(f"log_integral needs x > 1, got {x}")
    return float(special.expi(math.log(x)))
