"""Hidden-multiplier encryption.

A message ``m`` in the message subgroup ``F`` (exponent ``k``) is sent as
``c = h*m`` for a random ``h`` in the blinding subgroup ``H`` (exponent
``l``). The owner recovers ``m = c**(l*l')`` where ``l*l' = 1 (mod k)``.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .errors import DecodeError, ParameterError
from .numtheory import lcm, mod_inverse
from .platform import Platform, checksum

__all__ = [
    "HmeKey",
    "decrypt",
    "dump_ciphertext",
    "encrypt",
    "keygen",
    "load_ciphertext",
    "make_key",
]


@dataclass(frozen=True)
class HmeKey:
    modulus: int
    message_exponent: int
    blinding_exponent: int
    l_inverse: int
    # (generator, order) pairs spanning H; public, needed by senders
    blinding_generators: tuple[tuple[int, int], ...] = ()

    @property
    def decryption_exponent(self) -> int:
        return self.blinding_exponent * self.l_inverse


def make_key(
    modulus: int,
    message_exponent: int,
    blinding_exponent: int,
    blinding_generators: tuple[tuple[int, int], ...] = (),
) -> HmeKey:
    """Key from explicit exponents.

    The exponents only need to annihilate their subgroups, so multiples of
    the true orders work as well as the orders themselves.
    """
    k, l = message_exponent, blinding_exponent
    if k < 2 or l < 1:
        raise ParameterError("exponents must be positive (k >= 2)")
    if math.gcd(k, l) != 1:
        raise ParameterError(f"exponents {k} and {l} are not coprime")
    for g, order in blinding_generators:
        if pow(g, l, modulus) != 1:
            raise ParameterError(f"{g} is not annihilated by l = {l}")
    return HmeKey(modulus, k, l, mod_inverse(l, k), tuple(blinding_generators))


def keygen(platform: Platform, subgroups: list[int] | None = None) -> HmeKey:
    """Key over ``platform`` with ``H`` spanned by the chosen blinding subgroups (default all)."""
    specs = (
        platform.blinding
        if subgroups is None
        else tuple(platform.subgroup(i) for i in subgroups)
    )
    if not specs:
        raise ParameterError("H needs at least one blinding subgroup")
    l = lcm(*(s.order for s in specs))
    return make_key(
        platform.modulus, platform.d, l, tuple((s.generator, s.order) for s in specs)
    )


def _sample_h(key: HmeKey, rng: random.Random) -> int:
    if not key.blinding_generators:
        raise ParameterError("key carries no blinding generators")
    while True:
        h = 1
        for g, order in key.blinding_generators:
            h = h * pow(g, rng.randrange(order), key.modulus) % key.modulus
        # an identity multiplier would send m in the clear
        if h != 1:
            return h


def encrypt(key: HmeKey, m: int, rng: random.Random | None = None) -> int:
    n = key.modulus
    if math.gcd(m, n) != 1 or pow(m, key.message_exponent, n) != 1:
        raise ParameterError("message is not in the message subgroup")
    h = _sample_h(key, rng or random.SystemRandom())
    return h * m % n


def decrypt(key: HmeKey, c: int) -> int:
    return pow(c, key.decryption_exponent, key.modulus)


def dump_ciphertext(key_or_modulus: HmeKey | int, c: int) -> str:
    modulus = key_or_modulus if isinstance(key_or_modulus, int) else key_or_modulus.modulus
    return f"{c}\nchecksum = {checksum(modulus)}\n"


def load_ciphertext(text: str, modulus: int) -> int:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if len(lines) != 2 or not lines[0].isdigit():
        raise DecodeError("ciphertext file must hold a decimal value and a checksum line")
    key, _, value = lines[1].partition("=")
    if key.strip() != "checksum" or value.strip() != checksum(modulus):
        raise DecodeError("ciphertext belongs to a different platform")
    c = int(lines[0])
    if not 0 < c < modulus or math.gcd(c, modulus) != 1:
        raise DecodeError("ciphertext is not a unit of the platform")
    return c
