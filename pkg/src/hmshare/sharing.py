"""Multiparty sharing with reusable exponent shares.

Participant ``i`` holds an exponent share. The dealer blinds a message
``m`` with nontrivial elements from the coalition's blinding subgroups
and broadcasts ``c``. Members raise the running value to their share
one after another; each exponentiation kills that member's blinding
factor.

* ``v1``: the share is the raw order ``t_i``, ``d = t - 1`` or ``t + 1``,
  and the dealer pre-scales ``m``. Only the exact coalition recovers.
* ``v2``: the share is ``t_i * t_i'`` with ``t_i * t_i' = 1 (mod d)``, which
  fixes ``m``. Any superset of the coalition recovers.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

from .errors import DecodeError, DuplicateShare, GenerationFailed, ParameterError
from .numtheory import is_probable_prime, mod_inverse
from .platform import Platform, build_field_platform, checksum, sample_blinding

__all__ = [
    "THRESHOLD",
    "V1",
    "V2",
    "Deal",
    "RecoveryState",
    "Share",
    "apply_share",
    "build_v1_platform",
    "build_v2_platform",
    "draw_orders",
    "dump_deal",
    "dump_share",
    "is_qualified",
    "load_deal",
    "load_share",
    "recover",
    "start_recovery",
    "v1_apply",
    "v1_deal",
    "v1_finalize",
    "v1_shares",
    "v2_apply",
    "v2_deal",
    "v2_make_shares",
]

V1 = "v1"
V2 = "v2"
THRESHOLD = "threshold"
SCHEMES = (V1, V2, THRESHOLD)
ADJUST_BUDGET = 10_000


@dataclass(frozen=True)
class Share:
    index: int
    exponent: int
    scheme: str

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ParameterError(f"unknown scheme {self.scheme!r}")
        if self.index < 1 or self.exponent < 1:
            raise ParameterError("share index and exponent must be positive")


@dataclass(frozen=True)
class Deal:
    """What the dealer broadcasts. ``coalition`` is empty for threshold deals."""

    scheme: str
    blinded: int
    coalition: tuple[int, ...] = ()
    d_mode: str | None = None
    k: int | None = None


@dataclass(frozen=True)
class RecoveryState:
    modulus: int
    current: int
    applied: frozenset[int] = field(default_factory=frozenset)


def start_recovery(deal: Deal, modulus: int) -> RecoveryState:
    return RecoveryState(modulus, deal.blinded % modulus)


def apply_share(state: RecoveryState, share: Share) -> RecoveryState:
    if share.index in state.applied:
        raise DuplicateShare(f"participant {share.index} already applied its share")
    return replace(
        state,
        current=pow(state.current, share.exponent, state.modulus),
        applied=state.applied | {share.index},
    )


def _apply_scheme(state: RecoveryState, share: Share, scheme: str) -> RecoveryState:
    if share.scheme != scheme:
        raise ParameterError(f"expected a {scheme} share, got {share.scheme}")
    return apply_share(state, share)


def v1_apply(state: RecoveryState, share: Share) -> RecoveryState:
    return _apply_scheme(state, share, V1)


def v2_apply(state: RecoveryState, share: Share) -> RecoveryState:
    return _apply_scheme(state, share, V2)


def v1_finalize(state: RecoveryState, d_mode: str) -> int:
    if d_mode == "minus":
        return state.current
    if d_mode == "plus":
        return mod_inverse(state.current, state.modulus)
    raise ParameterError(f"unknown d_mode {d_mode!r}")


def _check_coalition(platform: Platform, coalition: Iterable[int]) -> tuple[int, ...]:
    members = tuple(sorted(coalition))
    if not members:
        raise ParameterError("coalition must be nonempty")
    if len(set(members)) != len(members):
        raise ParameterError("coalition has repeated members")
    n = len(platform.blinding)
    if members[0] < 1 or members[-1] > n:
        raise ParameterError(f"coalition members must lie in 1..{n}")
    return members


def _check_message(platform: Platform, m: int) -> None:
    if not platform.contains_message(m):
        raise ParameterError("message is not in the message subgroup")


def _blind(platform: Platform, members: Sequence[int], rng: random.Random) -> int:
    c = 1
    for i in members:
        c = c * sample_blinding(platform, i, rng) % platform.modulus
    return c


# -- first scheme ----------------------------------------------------------


def build_v1_platform(
    orders: Sequence[int],
    d_mode: str = "minus",
    extra_bits: int = 16,
    rng: random.Random | None = None,
    **kwargs,
) -> Platform:
    t = math.prod(orders)
    if d_mode == "minus":
        d = t - 1
    elif d_mode == "plus":
        d = t + 1
    else:
        raise ParameterError(f"unknown d_mode {d_mode!r}")
    return build_field_platform(orders, d, extra_bits, rng, d_mode=d_mode, **kwargs)


def v1_shares(platform: Platform) -> list[Share]:
    return [Share(s.index, s.order, V1) for s in platform.blinding]


def v1_deal(
    platform: Platform, coalition: Iterable[int], m: int, rng: random.Random | None = None
) -> Deal:
    if platform.d_mode is None:
        raise ParameterError("platform was not built for the first scheme (no d_mode)")
    members = _check_coalition(platform, coalition)
    _check_message(platform, m)
    rng = rng or random.SystemRandom()
    n = platform.modulus
    scale = platform.t // math.prod(platform.subgroup(i).order for i in members)
    c = _blind(platform, members, rng) * pow(m, scale, n) % n
    return Deal(V1, c, members, d_mode=platform.d_mode)


# -- second scheme ---------------------------------------------------------


def draw_orders(
    count: int,
    rng: random.Random | None = None,
    *,
    avoid: int = 1,
    low: int = 3,
    high: int = 1 << 12,
) -> list[int]:
    """``count`` distinct primes in ``[low, high)`` coprime to ``avoid``."""
    rng = rng or random.SystemRandom()
    pool = [p for p in range(max(low, 2), high) if is_probable_prime(p) and avoid % p]
    if len(pool) < count:
        raise ParameterError(f"only {len(pool)} primes available in [{low}, {high})")
    return rng.sample(pool, count)


def v2_make_shares(d: int, orders: Sequence[int]) -> list[Share]:
    """Shares ``t_i * t_i'`` with ``t_i' = t_i^-1 (mod d)``.

    The representative ``t_i'`` is raised by multiples of ``d`` until the
    share is coprime to every other order and to every earlier share.
    """
    if d < 3:
        raise ParameterError("d must be >= 3")
    shares: list[Share] = []
    for i, t in enumerate(orders, 1):
        others = math.prod(o for j, o in enumerate(orders, 1) if j != i)
        earlier = math.prod(s.exponent for s in shares)
        inv = mod_inverse(t, d)
        for _ in range(ADJUST_BUDGET):
            share = t * inv
            if math.gcd(share, others) == 1 and math.gcd(share, earlier) == 1:
                break
            inv += d
        else:
            raise GenerationFailed(f"could not make share {i} coprime to the others")
        shares.append(Share(i, share, V2))
    return shares


def build_v2_platform(
    count: int,
    rng: random.Random | None = None,
    *,
    d: int | None = None,
    orders: Sequence[int] | None = None,
    extra_bits: int = 16,
    **kwargs,
) -> tuple[Platform, list[Share]]:
    """Platform plus shares. ``d`` defaults to a random 16-bit prime."""
    rng = rng or random.SystemRandom()
    if d is None:
        while True:
            d = rng.randrange(1 << 15, 1 << 16) | 1
            if is_probable_prime(d):
                break
    if orders is None:
        orders = draw_orders(count, rng, avoid=d, high=min(d, 1 << 12))
    elif len(orders) != count:
        raise ParameterError("len(orders) != count")
    shares = v2_make_shares(d, orders)
    platform = build_field_platform(orders, d, extra_bits, rng, **kwargs)
    return platform, shares


def v2_deal(
    platform: Platform, coalition: Iterable[int], m: int, rng: random.Random | None = None
) -> Deal:
    members = _check_coalition(platform, coalition)
    _check_message(platform, m)
    rng = rng or random.SystemRandom()
    c = _blind(platform, members, rng) * m % platform.modulus
    return Deal(V2, c, members)


def recover(deal: Deal, shares: Iterable[Share], modulus: int) -> int:
    """Apply ``shares`` in the given order and finalize."""
    state = start_recovery(deal, modulus)
    for share in shares:
        state = apply_share(state, share)
    if deal.scheme == V1:
        return v1_finalize(state, deal.d_mode)
    return state.current


def is_qualified(deal: Deal, applied: Iterable[int]) -> bool:
    """Whether the applied index set matches the deal's access rule."""
    applied = set(applied)
    if deal.scheme == V1:
        return applied == set(deal.coalition)
    if deal.scheme == V2:
        return applied >= set(deal.coalition)
    return deal.k is not None and len(applied) >= deal.k


# -- files -----------------------------------------------------------------

SHARE_HEADER = "hmshare-share 1"
DEAL_HEADER = "hmshare-deal 1"


def _kv(text: str, header: str) -> dict[str, str]:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != header:
        raise DecodeError(f"expected header {header!r}")
    out = {}
    for ln in lines[1:]:
        key, sep, value = ln.partition("=")
        if not sep:
            raise DecodeError(f"malformed line {ln!r}")
        out[key.strip()] = value.strip()
    return out


def _dec(entries: dict[str, str], key: str) -> int:
    value = entries.get(key, "")
    if not value.isdigit():
        raise DecodeError(f"{key!r} must be a decimal integer")
    return int(value)


def dump_share(share: Share, modulus: int) -> str:
    return (
        f"{SHARE_HEADER}\n"
        f"index = {share.index}\n"
        f"scheme = {share.scheme}\n"
        f"exponent = {share.exponent}\n"
        f"checksum = {checksum(modulus)}\n"
    )


def load_share(text: str, modulus: int | None = None) -> tuple[Share, str]:
    """Parse a share file; returns the share and its platform checksum."""
    entries = _kv(text, SHARE_HEADER)
    try:
        share = Share(_dec(entries, "index"), _dec(entries, "exponent"), entries.get("scheme", ""))
    except ParameterError as exc:
        raise DecodeError(str(exc)) from exc
    digest = entries.get("checksum", "")
    if modulus is not None and digest != checksum(modulus):
        raise DecodeError("share belongs to a different platform")
    return share, digest


def dump_deal(deal: Deal, modulus: int) -> str:
    lines = [DEAL_HEADER, f"scheme = {deal.scheme}"]
    if deal.coalition:
        lines.append("coalition = " + ",".join(map(str, deal.coalition)))
    lines.append(f"blinded = {deal.blinded}")
    if deal.d_mode is not None:
        lines.append(f"d_mode = {deal.d_mode}")
    if deal.k is not None:
        lines.append(f"k = {deal.k}")
    lines.append(f"modulus = {modulus}")
    lines.append(f"checksum = {checksum(modulus)}")
    return "\n".join(lines) + "\n"


def load_deal(text: str) -> tuple[Deal, int]:
    """Parse a deal file; returns the deal and the platform modulus."""
    entries = _kv(text, DEAL_HEADER)
    scheme = entries.get("scheme")
    if scheme not in SCHEMES:
        raise DecodeError(f"unknown scheme {scheme!r}")
    modulus = _dec(entries, "modulus")
    if entries.get("checksum") != checksum(modulus):
        raise DecodeError("deal checksum does not match its modulus")
    coalition: tuple[int, ...] = ()
    if entries.get("coalition"):
        parts = entries["coalition"].split(",")
        if not all(p.strip().isdigit() for p in parts):
            raise DecodeError("coalition must be comma-separated indices")
        coalition = tuple(int(p) for p in parts)
    d_mode = entries.get("d_mode")
    if scheme == V1 and d_mode not in ("minus", "plus"):
        raise DecodeError("v1 deals need d_mode = minus|plus")
    k = _dec(entries, "k") if "k" in entries else None
    if scheme == THRESHOLD and k is None:
        raise DecodeError("threshold deals need k")
    return Deal(scheme, _dec(entries, "blinded"), coalition, d_mode, k), modulus
