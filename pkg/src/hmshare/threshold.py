"""(k, n) threshold sharing on top of the normalized-share scheme.

Each nonempty-complement subset ``S`` of participants (``|S| <= n - 1``)
labels one *atom*: a blinding subgroup whose order is held by everyone
outside ``S``. A deal at threshold ``k`` blinds with every atom having
``|S| <= k - 1``. A coalition ``C`` removes atom ``S`` iff ``C`` is not
contained in ``S``, which is automatic for ``|C| >= k`` and fails for
``C = S`` when ``|C| = k - 1``. Shares never depend on ``k``.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace
from itertools import combinations
from typing import Iterable, Sequence

from .errors import DecodeError, GenerationFailed, ParameterError
from .numtheory import SMALL_PRIMES, is_probable_prime, mod_inverse, pairwise_coprime
from .platform import Platform, build_field_platform, sample_blinding
from .sharing import THRESHOLD, Deal, RecoveryState, Share, apply_share

__all__ = [
    "MAX_PARTICIPANTS",
    "AccessStructure",
    "Atom",
    "ThresholdShare",
    "build_access_structure",
    "deal",
    "dump_structure",
    "instantiate",
    "load_structure",
    "recover_step",
    "threshold_shares",
]

MAX_PARTICIPANTS = 12
ADJUST_BUDGET = 10_000


@dataclass(frozen=True)
class Atom:
    index: int
    blocked: frozenset[int]
    order: int | None = None

    @property
    def mask(self) -> int:
        return sum(1 << (j - 1) for j in self.blocked)


@dataclass(frozen=True)
class AccessStructure:
    n: int
    atoms: tuple[Atom, ...]

    def member_set(self, j: int) -> frozenset[int]:
        """Indices of the atoms whose order participant ``j`` holds."""
        return frozenset(a.index for a in self.atoms if j not in a.blocked)

    def level_set(self, k: int) -> frozenset[int]:
        return frozenset(a.index for a in self.atoms if len(a.blocked) <= k - 1)

    def covered(self, coalition: Iterable[int]) -> frozenset[int]:
        out: frozenset[int] = frozenset()
        for j in coalition:
            out |= self.member_set(j)
        return out

    def qualifies(self, coalition: Iterable[int], k: int) -> bool:
        return self.level_set(k) <= self.covered(coalition)

    @property
    def orders(self) -> tuple[int, ...]:
        if any(a.order is None for a in self.atoms):
            raise ParameterError("access structure has no orders assigned")
        return tuple(a.order for a in self.atoms)


def build_access_structure(n: int) -> AccessStructure:
    if not 1 <= n <= MAX_PARTICIPANTS:
        raise ParameterError(f"n must lie in 1..{MAX_PARTICIPANTS}")
    people = range(1, n + 1)
    labels = [frozenset(S) for size in range(n) for S in combinations(people, size)]
    return AccessStructure(n, tuple(Atom(i, S) for i, S in enumerate(labels, 1)))


@dataclass(frozen=True)
class ThresholdShare:
    index: int
    bar: int
    bar_inverse: int

    @property
    def exponent(self) -> int:
        return self.bar * self.bar_inverse

    def as_share(self) -> Share:
        return Share(self.index, self.exponent, THRESHOLD)


def threshold_shares(structure: AccessStructure, d: int) -> list[ThresholdShare]:
    """Composite shares ``bar_j * bar_j^-1`` with ``bar_j`` the product of j's atom orders.

    The inverse representative is raised by multiples of ``d`` until it
    shares no factor with any atom order j does not hold; otherwise a
    short coalition could strip an atom by accident.
    """
    structure.orders  # raises when orders are unassigned
    out = []
    for j in range(1, structure.n + 1):
        held = structure.member_set(j)
        bar = math.prod(a.order for a in structure.atoms if a.index in held)
        missing = math.prod(a.order for a in structure.atoms if a.index not in held)
        inv = mod_inverse(bar, d)
        for _ in range(ADJUST_BUDGET):
            if math.gcd(inv, missing) == 1:
                break
            inv += d
        else:
            raise GenerationFailed(f"no admissible inverse for participant {j}")
        out.append(ThresholdShare(j, bar, inv))
    return out


def instantiate(
    structure: AccessStructure,
    rng: random.Random | None = None,
    *,
    d: int | None = None,
    orders: Sequence[int] | None = None,
    extra_bits: int = 16,
) -> tuple[Platform, AccessStructure, list[ThresholdShare]]:
    """Assign atom orders, build the field, and compute every share.

    Orders default to the first ``2**n - 1`` odd primes; ``d`` defaults to
    a random prime above all of them. Practical only for small ``n``: the
    field must accommodate the product of every atom order.
    """
    rng = rng or random.SystemRandom()
    s = len(structure.atoms)
    if orders is None:
        orders = _odd_primes(s)
    orders = list(orders)
    if len(orders) != s:
        raise ParameterError(f"need {s} atom orders, got {len(orders)}")
    top = max(orders)
    if d is None:
        while True:
            d = rng.randrange(top + 1, max(4 * top, 1 << 16))
            if is_probable_prime(d):
                break
    if d <= top or not is_probable_prime(d):
        raise ParameterError("d must be a prime larger than every atom order")
    if not pairwise_coprime(orders + [d]):
        raise ParameterError("atom orders and d must be pairwise coprime")
    platform = build_field_platform(orders, d, extra_bits, rng)
    with_orders = replace(
        structure,
        atoms=tuple(replace(a, order=t) for a, t in zip(structure.atoms, orders)),
    )
    return platform, with_orders, threshold_shares(with_orders, d)


def _odd_primes(count: int) -> list[int]:
    out = [p for p in SMALL_PRIMES if p > 2][:count]
    candidate = SMALL_PRIMES[-1] + 2
    while len(out) < count:
        if is_probable_prime(candidate):
            out.append(candidate)
        candidate += 2
    return out


def deal(
    platform: Platform,
    structure: AccessStructure,
    k: int,
    m: int,
    rng: random.Random | None = None,
) -> Deal:
    """Broadcast value ``c = prod(g_i for atoms i in T(k)) * m``."""
    if not 1 <= k <= structure.n:
        raise ParameterError(f"threshold k must lie in 1..{structure.n}")
    if len(platform.blinding) != len(structure.atoms):
        raise ParameterError("platform does not match the access structure")
    if not platform.contains_message(m):
        raise ParameterError("message is not in the message subgroup")
    rng = rng or random.SystemRandom()
    c = m % platform.modulus
    for i in sorted(structure.level_set(k)):
        c = c * sample_blinding(platform, i, rng) % platform.modulus
    return Deal(THRESHOLD, c, k=k)


def recover_step(state: RecoveryState, share: ThresholdShare | Share) -> RecoveryState:
    if isinstance(share, ThresholdShare):
        share = share.as_share()
    if share.scheme != THRESHOLD:
        raise ParameterError(f"expected a threshold share, got {share.scheme}")
    return apply_share(state, share)


STRUCTURE_HEADER = "hmshare-access 1"


def dump_structure(structure: AccessStructure) -> str:
    lines = [STRUCTURE_HEADER, f"n = {structure.n}"]
    lines += [f"{a.mask} {a.order}" for a in structure.atoms]
    return "\n".join(lines) + "\n"


def load_structure(text: str) -> AccessStructure:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if len(lines) < 2 or lines[0] != STRUCTURE_HEADER:
        raise DecodeError("expected an access-structure file")
    key, _, value = lines[1].partition("=")
    if key.strip() != "n" or not value.strip().isdigit():
        raise DecodeError("second line must be 'n = <count>'")
    try:
        skeleton = build_access_structure(int(value))
    except ParameterError as exc:
        raise DecodeError(str(exc)) from exc
    rows = lines[2:]
    if len(rows) != len(skeleton.atoms):
        raise DecodeError(f"expected {len(skeleton.atoms)} atom lines, got {len(rows)}")
    atoms = []
    for atom, row in zip(skeleton.atoms, rows):
        parts = row.split()
        if len(parts) != 2 or not all(p.isdigit() for p in parts):
            raise DecodeError(f"bad atom line {row!r}")
        if int(parts[0]) != atom.mask:
            raise DecodeError(f"atom {atom.index} has mask {parts[0]}, expected {atom.mask}")
        atoms.append(replace(atom, order=int(parts[1])))
    return AccessStructure(skeleton.n, tuple(atoms))
