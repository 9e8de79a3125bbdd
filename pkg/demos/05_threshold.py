"""Threshold sharing with four participants and one set of shares.

Every subset S of at most n-1 participants gets a blinding subgroup that
only people outside S can remove. A deal at threshold k uses the
subgroups with |S| < k.
"""
import random
from itertools import combinations

from hmshare.sharing import recover
from hmshare.threshold import build_access_structure, deal, instantiate

rng = random.Random(5)
platform, structure, shares = instantiate(build_access_structure(4), rng)
shares = [s.as_share() for s in shares]
print(f"{len(structure.atoms)} atoms, p has {platform.modulus.bit_length()} bits")

m = pow(platform.message.generator, 99, platform.modulus)
for k in range(1, 5):
    c = deal(platform, structure, k, m, rng)
    row = []
    for size in range(1, 5):
        wins = sum(
            recover(c, [shares[i - 1] for i in g], platform.modulus) == m
            for g in combinations(range(1, 5), size)
        )
        row.append(f"{wins}/{len(list(combinations(range(4), size)))}")
    print(f"k = {k}: recovered by size 1..4 coalitions: {' '.join(row)}")
