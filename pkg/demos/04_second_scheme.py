"""Second sharing scheme over the ring Z_(8317*31).

Shares t_i * t_i' are multiples of t_i and congruent to 1 mod |F|, so each
one strips its own blinding factor and leaves m alone. Extra members are
harmless.
"""
import random

from hmshare import toys
from hmshare.sharing import recover, v2_deal

rng = random.Random(4)
platform = toys.ring_257827()
shares = toys.ring_257827_shares()
print(f"n = {platform.modulus}; shares {[s.exponent for s in shares]}")

m = pow(platform.message.generator, 25, platform.modulus)
deal = v2_deal(platform, [2], m, rng)
for group in ([1], [2], [1, 2]):
    got = recover(deal, [shares[i - 1] for i in group], platform.modulus)
    print(f"dealt to {{2}}, recovered by {set(group)}: {got == m}")
