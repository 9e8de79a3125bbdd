"""Trusted-dealer setup: unit groups with subgroups of prescribed coprime orders.

A :class:`Platform` is either a prime field ``F_p`` or a residue ring
``Z_pq``. Its unit group hosts one message subgroup ``F = <f>`` of order
``d`` and blinding subgroups ``T_i = <u_i>`` of orders ``t_i``. Only the
modulus and the kind are public.
"""
from __future__ import annotations

import hashlib
import math
import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DecodeError, GenerationFailed, ParameterError
from .numtheory import (
    Factorization,
    crt_pair,
    discrete_log,
    element_order,
    is_primitive_root,
    is_probable_prime,
    pairwise_coprime,
)
from .primegen import prime_with_prescribed_divisor

__all__ = [
    "FIELD",
    "RING",
    "Platform",
    "PublicPlatform",
    "SubgroupSpec",
    "blinding_element",
    "build_field_platform",
    "build_ring_platform",
    "checksum",
    "decode_message",
    "dumps",
    "encode_message",
    "from_bytes",
    "loads",
    "public_view",
    "sample_blinding",
    "strip_private",
    "to_bytes",
]

FIELD = "field"
RING = "ring"
D_MODES = ("minus", "plus")
HEADER = "hmshare-platform 1"
PRIMITIVE_ROOT_BUDGET = 512


@dataclass(frozen=True)
class SubgroupSpec:
    index: int
    order: int
    generator: int


@dataclass(frozen=True)
class PublicPlatform:
    modulus: int
    kind: str


@dataclass(frozen=True)
class Platform:
    """Full dealer-side platform. Everything except ``modulus``/``kind`` is private.

    ``unit_orders`` holds the factored order of each prime's unit group
    (``p - 1`` and, for rings, ``q - 1``). ``d_mode`` is set only for
    platforms built for the first sharing scheme, where ``d = t - 1``
    ("minus") or ``d = t + 1`` ("plus").
    """

    modulus: int
    kind: str
    primes: tuple[int, ...]
    unit_orders: tuple[Factorization, ...]
    message: SubgroupSpec
    blinding: tuple[SubgroupSpec, ...]
    primitive_root: int | None = None
    d_mode: str | None = None

    def __post_init__(self):
        if self.kind not in (FIELD, RING):
            raise ParameterError(f"unknown platform kind {self.kind!r}")
        if math.prod(self.primes) != self.modulus:
            raise ParameterError("modulus does not match its prime factors")
        if len(self.unit_orders) != len(self.primes):
            raise ParameterError("one unit-group factorization per prime is required")
        for p, fac in zip(self.primes, self.unit_orders):
            if fac.value != p - 1:
                raise ParameterError(f"factorization of {p} - 1 is wrong")
        if self.d_mode is not None and self.d_mode not in D_MODES:
            raise ParameterError(f"d_mode must be one of {D_MODES}")
        orders = [self.message.order] + [s.order for s in self.blinding]
        if any(o < 2 for o in orders):
            raise ParameterError("subgroup orders must be >= 2")
        if not pairwise_coprime(orders):
            raise ParameterError("message and blinding orders must be pairwise coprime")
        if [s.index for s in self.blinding] != list(range(1, len(self.blinding) + 1)):
            raise ParameterError("blinding subgroups must be indexed 1..n")
        lam = self.exponent
        for spec in (self.message, *self.blinding):
            if element_order(spec.generator, self.modulus, lam) != spec.order:
                raise ParameterError(
                    f"generator {spec.generator} does not have order {spec.order}"
                )

    @property
    def exponent(self) -> Factorization:
        """Factored exponent of the unit group (lcm of the per-prime orders)."""
        out = self.unit_orders[0]
        for fac in self.unit_orders[1:]:
            out = out.lcm(fac)
        return out

    @property
    def d(self) -> int:
        return self.message.order

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(s.order for s in self.blinding)

    @property
    def t(self) -> int:
        return math.prod(self.orders)

    def subgroup(self, index: int) -> SubgroupSpec:
        if not 1 <= index <= len(self.blinding):
            raise ParameterError(f"no blinding subgroup {index}")
        return self.blinding[index - 1]

    def contains_message(self, m: int) -> bool:
        return math.gcd(m, self.modulus) == 1 and pow(m, self.d, self.modulus) == 1

    def order_of(self, x: int) -> int:
        return element_order(x, self.modulus, self.exponent)


def public_view(platform: Platform) -> PublicPlatform:
    return PublicPlatform(platform.modulus, platform.kind)


def checksum(modulus: int) -> str:
    """Short fingerprint tying share and deal files to a platform."""
    return hashlib.sha256(str(modulus).encode()).hexdigest()[:16]


def _factor_orders(values: Iterable[int]) -> Factorization:
    out = Factorization(())
    for v in values:
        out = out.merge(Factorization.of(v))
    return out


def build_field_platform(
    orders: Sequence[int],
    d: int,
    extra_bits: int = 16,
    rng: random.Random | None = None,
    *,
    d_mode: str | None = None,
    r_range: tuple[int, int] | None = None,
    generator: int | None = None,
) -> Platform:
    """Find ``p`` with ``d * prod(orders) | p - 1`` and carve out the subgroups.

    ``u_j = g^((p-1)/t_j)`` and ``f = g^((p-1)/d)`` for a primitive root
    ``g``, either supplied or found by random search.
    """
    orders = [int(t) for t in orders]
    if not orders:
        raise ParameterError("at least one blinding order is required")
    if any(t < 2 for t in orders) or d < 2:
        raise ParameterError("all orders must be >= 2")
    if not pairwise_coprime(orders + [d]):
        raise ParameterError("orders and d must be pairwise coprime")
    rng = rng or random.SystemRandom()
    D = d * math.prod(orders)
    p, r_prime = prime_with_prescribed_divisor(D, extra_bits, rng, r_range=r_range)
    fac = _factor_orders([d, *orders, r_prime])
    if generator is None:
        for _ in range(PRIMITIVE_ROOT_BUDGET):
            g = rng.randrange(2, p - 1)
            if is_primitive_root(g, p, fac):
                break
        else:
            raise GenerationFailed(f"no primitive root of {p} found")
    else:
        g = generator
        if not is_primitive_root(g, p, fac):
            raise ParameterError(f"{g} is not a primitive root modulo {p}")
    message = SubgroupSpec(0, d, pow(g, (p - 1) // d, p))
    blinding = tuple(
        SubgroupSpec(i, t, pow(g, (p - 1) // t, p)) for i, t in enumerate(orders, 1)
    )
    return Platform(p, FIELD, (p,), (fac,), message, blinding, g, d_mode)


def build_ring_platform(
    field_part: Platform,
    q: int,
    lift_plan: Sequence[tuple[int, int]] = (),
) -> Platform:
    """Extend a field platform over ``p`` to the ring ``Z_pq``.

    Every generator ``x`` of the field part becomes ``crt(x mod p, 1 mod q)``.
    Each ``(y, order)`` in ``lift_plan`` is an element of ``F_q`` that becomes
    a further blinding subgroup ``crt(1 mod p, y mod q)``.
    """
    if field_part.kind != FIELD:
        raise ParameterError("ring platforms are built from a field platform")
    (p,) = field_part.primes
    if q == p or not is_probable_prime(q):
        raise ParameterError(f"q = {q} must be a prime different from p")
    q_fac = Factorization.of(q - 1)

    def lift_p(spec: SubgroupSpec) -> SubgroupSpec:
        return SubgroupSpec(spec.index, spec.order, crt_pair(spec.generator, p, 1, q))

    blinding = [lift_p(s) for s in field_part.blinding]
    for y, order in lift_plan:
        y %= q
        if y == 0 or element_order(y, q, q_fac) != order:
            raise ParameterError(f"{y} does not have order {order} modulo {q}")
        blinding.append(SubgroupSpec(len(blinding) + 1, order, crt_pair(1, p, y, q)))
    orders = [field_part.message.order] + [s.order for s in blinding]
    if not pairwise_coprime(orders):
        raise ParameterError(f"subgroup orders collide after lifting: {orders}")
    return Platform(
        p * q,
        RING,
        (p, q),
        (field_part.unit_orders[0], q_fac),
        lift_p(field_part.message),
        tuple(blinding),
        None,
        field_part.d_mode,
    )


def blinding_element(platform: Platform, index: int, e: int) -> int:
    spec = platform.subgroup(index)
    return pow(spec.generator, e, platform.modulus)


def sample_blinding(platform: Platform, index: int, rng: random.Random | None = None) -> int:
    """Uniform nontrivial element of blinding subgroup ``index``."""
    rng = rng or random.SystemRandom()
    spec = platform.subgroup(index)
    return pow(spec.generator, rng.randrange(1, spec.order), platform.modulus)


def encode_message(platform: Platform, data: bytes) -> int:
    """Map bytes injectively to ``f**i`` with ``i = int(b"\\x01" + data)``."""
    i = int.from_bytes(b"\x01" + data, "big")
    if i >= platform.d:
        raise ParameterError(f"message too long for a message space of size {platform.d}")
    return pow(platform.message.generator, i, platform.modulus)


def decode_message(platform: Platform, m: int) -> bytes:
    """Dealer-side inverse of :func:`encode_message` (discrete log in F)."""
    i = discrete_log(m, platform.message.generator, platform.d, platform.modulus)
    raw = i.to_bytes((i.bit_length() + 7) // 8, "big")
    if not raw or raw[0] != 1:
        raise DecodeError("element does not encode a byte string")
    return raw[1:]


# -- text format ---------------------------------------------------------


def dumps(platform: Platform | PublicPlatform, *, public: bool = False) -> str:
    lines = [HEADER, f"modulus = {platform.modulus}", f"kind = {platform.kind}"]
    if public or isinstance(platform, PublicPlatform):
        return "\n".join(lines) + "\n"
    lines.append("[private]")
    for i, (p, fac) in enumerate(zip(platform.primes, platform.unit_orders), 1):
        lines.append(f"prime.{i} = {p}")
        lines.append(f"unit_order.{i} = {fac}")
    if platform.primitive_root is not None:
        lines.append(f"primitive_root = {platform.primitive_root}")
    if platform.d_mode is not None:
        lines.append(f"d_mode = {platform.d_mode}")
    lines.append(f"message.order = {platform.message.order}")
    lines.append(f"message.generator = {platform.message.generator}")
    for s in platform.blinding:
        lines.append(f"blinding.{s.index}.order = {s.order}")
        lines.append(f"blinding.{s.index}.generator = {s.generator}")
    return "\n".join(lines) + "\n"


def strip_private(text: str) -> str:
    """Drop the ``[private]`` section of a platform file."""
    return dumps(loads(text), public=True)


def _parse_entries(text: str) -> tuple[dict[str, str], dict[str, str]]:
    lines = text.splitlines()
    if not lines or lines[0].strip() != HEADER:
        raise DecodeError("missing or unsupported platform header")
    public: dict[str, str] = {}
    private: dict[str, str] = {}
    target = public
    for ln in lines[1:]:
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        if ln == "[private]":
            target = private
            continue
        key, sep, value = ln.partition("=")
        if not sep:
            raise DecodeError(f"malformed line {ln!r}")
        key = key.strip()
        if key in target:
            raise DecodeError(f"duplicate key {key!r}")
        target[key] = value.strip()
    return public, private


def _int(entries: dict[str, str], key: str) -> int:
    try:
        value = entries[key]
    except KeyError:
        raise DecodeError(f"missing {key!r}") from None
    if not value.isdigit():
        raise DecodeError(f"{key!r} is not a decimal integer: {value!r}")
    return int(value)


def loads(text: str) -> Platform | PublicPlatform:
    public, private = _parse_entries(text)
    modulus = _int(public, "modulus")
    kind = public.get("kind")
    if kind not in (FIELD, RING):
        raise DecodeError(f"bad platform kind {kind!r}")
    if set(public) != {"modulus", "kind"}:
        raise DecodeError(f"unexpected public keys {sorted(set(public) - {'modulus', 'kind'})}")
    if not private:
        return PublicPlatform(modulus, kind)
    try:
        count = 1 if kind == FIELD else 2
        primes = tuple(_int(private, f"prime.{i}") for i in range(1, count + 1))
        unit_orders = tuple(
            Factorization.parse(private[f"unit_order.{i}"]) for i in range(1, count + 1)
        )
        n_blind = len([k for k in private if k.startswith("blinding.") and k.endswith(".order")])
        message = SubgroupSpec(
            0, _int(private, "message.order"), _int(private, "message.generator")
        )
        blinding = tuple(
            SubgroupSpec(
                i, _int(private, f"blinding.{i}.order"), _int(private, f"blinding.{i}.generator")
            )
            for i in range(1, n_blind + 1)
        )
        root = _int(private, "primitive_root") if "primitive_root" in private else None
        platform = Platform(
            modulus, kind, primes, unit_orders, message, blinding, root, private.get("d_mode")
        )
    except (KeyError, ValueError) as exc:
        if isinstance(exc, DecodeError):
            raise
        raise DecodeError(f"invalid platform: {exc}") from exc
    extra = set(private) - set(_parse_entries(dumps(platform))[1])
    if extra:
        raise DecodeError(f"unexpected private keys {sorted(extra)}")
    return platform


def to_bytes(platform: Platform | PublicPlatform) -> bytes:
    return dumps(platform).encode()


def from_bytes(data: bytes) -> Platform | PublicPlatform:
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise DecodeError("platform data is not UTF-8") from exc
    return loads(text)

