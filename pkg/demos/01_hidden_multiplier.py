"""Hidden-multiplier encryption over a 13-bit field.

Build a fresh field whose unit group has a message subgroup F and a
blinding subgroup H of coprime orders, encrypt by multiplying with a
random element of H, and decrypt by one exponentiation that kills H and
fixes F.
"""
import random

from hmshare.hme import decrypt, encrypt, keygen
from hmshare.platform import build_field_platform

rng = random.Random(1)
platform = build_field_platform([7, 11], 101, extra_bits=8, rng=rng)
key = keygen(platform)
print(f"p = {platform.modulus}, |F| = {platform.d}, |H| = {key.blinding_exponent}")
print(f"decryption exponent l*l' = {key.decryption_exponent}  (= 1 mod {platform.d}, = 0 mod {key.blinding_exponent})")

m = pow(platform.message.generator, 42, platform.modulus)
for _ in range(3):
    c = encrypt(key, m, rng)
    print(f"m = {m} -> c = {c} -> {decrypt(key, c)}")
