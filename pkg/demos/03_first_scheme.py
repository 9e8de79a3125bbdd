"""First sharing scheme: only the exact coalition recovers.

Shares are the raw blinding orders t_i. With d = t - 1 the coalition's
product of shares turns m^(t/prod t_C) into m^t = m; anybody else leaves
a blinding factor behind or over-exponentiates m.
"""
import random
from itertools import combinations

from hmshare.sharing import build_v1_platform, recover, v1_deal, v1_shares

rng = random.Random(3)
platform = build_v1_platform([3, 5, 7, 11], "minus", 16, rng)
shares = v1_shares(platform)
print(f"p = {platform.modulus}, t = {platform.t}, d = {platform.d}")

m = pow(platform.message.generator, 1234, platform.modulus)
deal = v1_deal(platform, [2, 3], m, rng)
for size in range(1, 5):
    for group in combinations(range(1, 5), size):
        got = recover(deal, [shares[i - 1] for i in group], platform.modulus)
        print(f"  {str(set(group)):14} -> {'m' if got == m else '-'}")
