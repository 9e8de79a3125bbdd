"""Integer arithmetic used by every other module.

All functions work on Python ints (arbitrary precision). Randomized
routines take an explicit ``rng`` (anything with ``randrange``) so results
are reproducible under a seeded ``random.Random``.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import InvalidGroupOrder, NotInvertible, ParameterError

__all__ = [
    "Factorization",
    "SMALL_PRIMES",
    "crt_pair",
    "discrete_log",
    "element_order",
    "factorize",
    "gcd",
    "is_primitive_root",
    "is_probable_prime",
    "lcm",
    "miller_rabin",
    "mod_inverse",
    "mod_pow",
    "pairwise_coprime",
    "smallest_primitive_root",
]

gcd = math.gcd


def lcm(*values: int) -> int:
    out = 1
    for v in values:
        out = out * v // math.gcd(out, v)
    return out


def _sieve(limit: int) -> list[int]:
    flags = bytearray([1]) * limit
    flags[0:2] = b"\x00\x00"
    for i in range(2, math.isqrt(limit - 1) + 1):
        if flags[i]:
            flags[i * i :: i] = bytearray(len(flags[i * i :: i]))
    return [i for i, f in enumerate(flags) if f]


#: Every prime below 2**10.
SMALL_PRIMES: tuple[int, ...] = tuple(_sieve(1 << 10))


def mod_pow(base: int, exponent: int, modulus: int) -> int:
    if modulus < 2:
        raise ParameterError(f"modulus must be >= 2, got {modulus}")
    if exponent < 0:
        raise ParameterError("negative exponent; invert the base instead")
    return pow(base, exponent, modulus)


def mod_inverse(a: int, m: int) -> int:
    """Return x in [1, m-1] with a*x = 1 (mod m); for m == 1 returns 0."""
    if m < 1:
        raise ParameterError(f"modulus must be positive, got {m}")
    if math.gcd(a, m) != 1:
        raise NotInvertible(f"{a} is not invertible modulo {m}")
    return pow(a, -1, m)


def crt_pair(residue_p: int, p: int, residue_q: int, q: int) -> int:
    """Unique x in [0, p*q) with x = residue_p (mod p) and x = residue_q (mod q)."""
    if p < 1 or q < 1 or math.gcd(p, q) != 1:
        raise ParameterError(f"moduli {p} and {q} must be positive and coprime")
    if not (0 <= residue_p < p and 0 <= residue_q < q):
        raise ParameterError("residues must be reduced modulo their moduli")
    # x = rp + p * ((rq - rp) * p^-1 mod q)
    k = (residue_q - residue_p) * pow(p, -1, q) % q
    return residue_p + p * k


def miller_rabin(n: int, rounds: int = 40, rng: random.Random | None = None) -> bool:
    """Probabilistic primality test.

    ``False`` is always correct. ``True`` is wrong with probability at most
    ``4**-rounds``. Even and small inputs are answered from the prime table.
    """
    if rounds < 1:
        raise ParameterError("rounds must be positive")
    if n < 2:
        return False
    if n < SMALL_PRIMES[-1]:
        return n in _SMALL_SET
    if n % 2 == 0:
        return False
    rng = rng or random.SystemRandom()
    s, d = 0, n - 1
    while d % 2 == 0:
        s += 1
        d //= 2
    for _ in range(rounds):
        a = rng.randrange(2, n - 1)
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


_SMALL_SET = frozenset(SMALL_PRIMES)


def is_probable_prime(n: int, rounds: int = 40, rng: random.Random | None = None) -> bool:
    """Trial-divide by the prime table, then run Miller-Rabin."""
    if n < 2:
        return False
    for p in SMALL_PRIMES:
        if n % p == 0:
            return n == p
    if n < SMALL_PRIMES[-1] ** 2:
        return True
    return miller_rabin(n, rounds, rng)


@dataclass(frozen=True)
class Factorization:
    """Prime factorization as ``((prime, multiplicity), ...)`` in increasing prime order."""

    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        last = 1
        for p, e in self.factors:
            if p <= last or e < 1:
                raise ParameterError(f"malformed factorization {self.factors}")
            last = p

    @classmethod
    def from_mapping(cls, mapping: Mapping[int, int]) -> Factorization:
        return cls(tuple(sorted((p, e) for p, e in mapping.items() if e > 0)))

    @classmethod
    def of(cls, n: int) -> Factorization:
        return cls.from_mapping(factorize(n))

    @property
    def value(self) -> int:
        return math.prod(p**e for p, e in self.factors)

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def as_dict(self) -> dict[int, int]:
        return dict(self.factors)

    def merge(self, other: Factorization) -> Factorization:
        """Factorization of the product."""
        out = self.as_dict()
        for p, e in other.factors:
            out[p] = out.get(p, 0) + e
        return Factorization.from_mapping(out)

    def lcm(self, other: Factorization) -> Factorization:
        out = self.as_dict()
        for p, e in other.factors:
            out[p] = max(out.get(p, 0), e)
        return Factorization.from_mapping(out)

    def __str__(self) -> str:
        return " ".join(f"{p}^{e}" if e > 1 else str(p) for p, e in self.factors) or "1"

    @classmethod
    def parse(cls, text: str) -> Factorization:
        out: dict[int, int] = {}
        for tok in text.split():
            if tok == "1":
                continue
            p, _, e = tok.partition("^")
            out[int(p)] = out.get(int(p), 0) + (int(e) if e else 1)
        return cls.from_mapping(out)


def _pollard_brent(n: int, rng: random.Random) -> int:
    if n % 2 == 0:
        return 2
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def factorize(n: int) -> dict[int, int]:
    """Factor ``n`` completely (trial division, then Pollard-Brent rho).

    Meant for dealer-side bookkeeping of numbers the dealer chose itself
    (subgroup orders, small cofactors). Not a general factoring tool; runtime
    grows quickly beyond ~80-bit composites with two large factors.
    """
    if n < 1:
        raise ParameterError("can only factor positive integers")
    out: dict[int, int] = {}
    for p in SMALL_PRIMES:
        if p * p > n:
            break
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    rng = random.Random(n)
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_probable_prime(m, 40, rng):
            out[m] = out.get(m, 0) + 1
            continue
        f = _pollard_brent(m, rng)
        stack += [f, m // f]
    return out


def element_order(x: int, modulus: int, group_order: Factorization) -> int:
    """Least e >= 1 with x**e = 1 (mod modulus).

    ``group_order`` must factor some multiple of the order of x (the group
    order or exponent). Each prime power is stripped while x stays annihilated.
    """
    if modulus < 2:
        raise ParameterError("modulus must be >= 2")
    x %= modulus
    if math.gcd(x, modulus) != 1:
        raise ParameterError(f"{x} is not a unit modulo {modulus}")
    e = group_order.value
    if pow(x, e, modulus) != 1:
        raise InvalidGroupOrder(f"{x}^{e} != 1 (mod {modulus})")
    for p, k in group_order.factors:
        e //= p**k
        y = pow(x, e, modulus)
        while y != 1:
            y = pow(y, p, modulus)
            e *= p
    return e


def is_primitive_root(g: int, p: int, factorization_of_p_minus_1: Factorization) -> bool:
    if factorization_of_p_minus_1.value != p - 1:
        raise ParameterError("factorization does not multiply out to p - 1")
    g %= p
    if g == 0:
        return False
    return all(pow(g, (p - 1) // q, p) != 1 for q in factorization_of_p_minus_1.primes)


def smallest_primitive_root(p: int, factorization_of_p_minus_1: Factorization) -> int:
    for g in range(2, p):
        if is_primitive_root(g, p, factorization_of_p_minus_1):
            return g
    if p == 2:
        return 1
    raise ParameterError(f"no primitive root modulo {p}")


def discrete_log(x: int, base: int, order: int, modulus: int) -> int:
    """Return i in [0, order) with base**i = x, by baby-step giant-step.

    Memory is O(sqrt(order)); only practical for orders up to ~2**40.
    """
    m = math.isqrt(order - 1) + 1 if order > 1 else 1
    table: dict[int, int] = {}
    cur = 1
    for j in range(m):
        table.setdefault(cur, j)
        cur = cur * base % modulus
    step = pow(base, -m, modulus)
    y = x % modulus
    for i in range(m):
        j = table.get(y)
        if j is not None:
            return (i * m + j) % order
        y = y * step % modulus
    raise ParameterError(f"{x} is not in the subgroup generated by {base}")


def pairwise_coprime(values: Iterable[int]) -> bool:
    vals = list(values)
    return all(math.gcd(a, b) == 1 for i, a in enumerate(vals) for b in vals[i + 1 :])
