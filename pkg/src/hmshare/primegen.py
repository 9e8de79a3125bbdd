"""Provable primes by Maurer-style recursion, and primes with prescribed p-1 divisors.

A certified prime comes with a chain of witnesses ``n = q*r + 1``. Each
link is checked by a Pocklington-type test: if ``a**(n-1) = 1 (mod n)`` and
``gcd(a**r - 1, n) = 1`` with ``q`` an odd prime and ``r`` even, every prime
factor of ``n`` is ``1 (mod 2q)`` and hence at least ``2q + 1``. For
``r <= 4q + 2`` that rules out a composite ``n``.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .errors import DecodeError, GenerationFailed, ParameterError
from .numtheory import SMALL_PRIMES, is_probable_prime

__all__ = [
    "BASE_RETRIES",
    "MR_ROUNDS",
    "PocklingtonWitness",
    "PrimeCertificate",
    "accepts_base",
    "maurer_prime",
    "prime_with_prescribed_divisor",
    "proposition1_check",
    "trial_division_is_prime",
    "verify_certificate",
]

BASE_RETRIES = 20
MR_ROUNDS = 40


def trial_division_is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for f in range(3, math.isqrt(n) + 1, 2):
        if n % f == 0:
            return False
    return True


@dataclass(frozen=True)
class PocklingtonWitness:
    n: int
    q: int
    r: int
    a: int

    @property
    def regime(self) -> str:
        """``"strict"`` when r < q, ``"extended"`` when q <= r <= 4q + 2."""
        return "strict" if self.r < self.q else "extended"

    def to_line(self) -> str:
        return f"{self.n} {self.q} {self.r} {self.a}"

    @classmethod
    def from_line(cls, line: str) -> PocklingtonWitness:
        parts = line.split()
        if len(parts) != 4 or not all(p.isdigit() for p in parts):
            raise DecodeError(f"bad witness line: {line!r}")
        return cls(*(int(p) for p in parts))


def accepts_base(n: int, r: int, a: int) -> bool:
    """The two base conditions: a^(n-1) = 1 and gcd(a^r - 1, n) = 1 (mod n)."""
    if pow(a, n - 1, n) != 1:
        return False
    return math.gcd(pow(a, r, n) - 1, n) == 1


def proposition1_check(w: PocklingtonWitness) -> bool:
    """True if ``w`` proves ``w.n`` prime given that ``w.q`` is prime.

    False is inconclusive; it says nothing about compositeness.
    Structural violations raise ``ParameterError``.
    """
    if w.q < 3 or w.q % 2 == 0:
        raise ParameterError(f"q must be an odd prime, got {w.q}")
    if w.r < 2 or w.r % 2:
        raise ParameterError(f"r must be even and positive, got {w.r}")
    if w.r > 4 * w.q + 2:
        raise ParameterError(f"r = {w.r} exceeds 4q + 2 = {4 * w.q + 2}")
    if w.n != w.q * w.r + 1:
        raise ParameterError("n != q*r + 1")
    if not 1 < w.a < w.n - 1:
        raise ParameterError(f"base a = {w.a} outside (1, n-1)")
    return accepts_base(w.n, w.r, w.a)


@dataclass(frozen=True)
class PrimeCertificate:
    links: tuple[PocklingtonWitness, ...]

    @property
    def prime(self) -> int:
        return self.links[-1].n

    @property
    def base(self) -> int:
        return self.links[0].q

    def dumps(self) -> str:
        return "".join(w.to_line() + "\n" for w in self.links)

    @classmethod
    def loads(cls, text: str) -> PrimeCertificate:
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise DecodeError("empty certificate")
        return cls(tuple(PocklingtonWitness.from_line(ln) for ln in lines))


def verify_certificate(cert: PrimeCertificate) -> bool:
    """Re-check a certificate chain from scratch."""
    if not cert.links or not trial_division_is_prime(cert.base):
        return False
    q = cert.base
    for w in cert.links:
        if w.q != q:
            return False
        try:
            if not proposition1_check(w):
                return False
        except ParameterError:
            return False
        q = w.n
    return True


def _base_prime_for(target_bits: int, rng: random.Random) -> int:
    # Each step turns a b-bit q into an n of at least 2b - 1 bits; size the
    # base so the fewest steps reach target_bits under that worst case.
    steps = 1
    while True:
        bits = max(2, -(-(target_bits - 1) // (1 << steps)) + 1)
        if bits <= 10:
            break
        steps += 1
    choices = [p for p in SMALL_PRIMES if p > 2 and p.bit_length() == bits]
    return rng.choice(choices)


def maurer_prime(
    target_bits: int,
    rng: random.Random | None = None,
    *,
    base_retries: int = BASE_RETRIES,
    max_r_draws: int = 10_000,
) -> tuple[int, PrimeCertificate]:
    """Grow a certified prime of at least ``target_bits`` bits.

    Starting from a table prime ``q``, each step draws an even ``r`` in
    ``[q, 4q + 2]``, sets ``n = q*r + 1`` and tries up to ``base_retries``
    random bases before redrawing ``r``. Once a base is accepted ``n``
    becomes the next ``q``.
    """
    if target_bits < 4:
        raise ParameterError("target_bits must be >= 4")
    rng = rng or random.SystemRandom()
    q = _base_prime_for(target_bits, rng)
    links: list[PocklingtonWitness] = []
    while not links or q.bit_length() < target_bits:
        for _ in range(max_r_draws):
            r = 2 * rng.randrange((q + 1) // 2, 2 * q + 2)
            n = q * r + 1
            # cheap sieve before spending base trials
            if any(n % p == 0 for p in SMALL_PRIMES[:50] if p < n):
                continue
            found = None
            for _ in range(base_retries):
                a = rng.randrange(2, n - 1)
                if accepts_base(n, r, a):
                    found = a
                    break
                if pow(a, n - 1, n) != 1:
                    break  # Fermat witness: n is composite, redraw r
            if found is not None:
                links.append(PocklingtonWitness(n, q, r, found))
                q = n
                break
        else:
            raise GenerationFailed(f"no certified prime after {max_r_draws} draws of r")
    return q, PrimeCertificate(tuple(links))


def prime_with_prescribed_divisor(
    D: int,
    extra_bits: int = 16,
    rng: random.Random | None = None,
    *,
    r_range: tuple[int, int] | None = None,
    budget: int | None = None,
) -> tuple[int, int]:
    """Find a probable prime ``p = 1 + D*r'`` and return ``(p, r')``.

    By default ``r'`` is drawn so that ``p`` has exactly
    ``D.bit_length() + extra_bits`` bits; ``r_range`` (inclusive) overrides
    that window. Only ``r'`` with ``D*r'`` even are tried.
    """
    if D < 2:
        raise ParameterError("D must be >= 2")
    if extra_bits < 0:
        raise ParameterError("extra_bits must be >= 0")
    rng = rng or random.SystemRandom()
    if r_range is None:
        bits = D.bit_length() + extra_bits
        lo = max(1, -(-((1 << (bits - 1)) - 1) // D))
        hi = ((1 << bits) - 2) // D
    else:
        lo, hi = r_range
    step = 1 if D % 2 == 0 else 2
    if D % 2 and lo % 2:
        lo += 1
    count = (hi - lo) // step + 1
    if count <= 0:
        raise GenerationFailed(f"no admissible r' in [{lo}, {hi}]")
    if budget is None:
        budget = max(200, 40 * (D.bit_length() + extra_bits))
    if count <= budget:
        # Small windows are scanned exhaustively in random order.
        candidates = [lo + step * i for i in range(count)]
        rng.shuffle(candidates)
    else:
        candidates = (lo + step * rng.randrange(count) for _ in range(budget))
    for rp in candidates:
        p = 1 + D * rp
        if is_probable_prime(p, MR_ROUNDS, rng):
            return p, rp
    raise GenerationFailed(f"no prime 1 + {D}*r' found within budget")
