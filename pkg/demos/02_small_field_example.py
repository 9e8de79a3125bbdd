"""The 8317 field: 8316 = 108 * 77.

The base 3 is not a primitive root here, so 3^77 and 3^108 generate
subgroups of orders 54 and 11. The exponents 108 and 77 still annihilate
them, which is all decryption needs.
"""
from hmshare import toys
from hmshare.hme import decrypt, make_key
from hmshare.numtheory import Factorization, element_order

p = toys.P_8317
fac = Factorization.of(p - 1)
print(f"p - 1 = {fac}; order of 3 is {element_order(3, p, fac)}")
f, h = pow(3, 77, p), pow(3, 108, p)
print(f"f = {f} of order {element_order(f, p, fac)}, h = {h} of order {element_order(h, p, fac)}")

key = make_key(p, 108, 77)
ok = all(
    decrypt(key, pow(h, j, p) * pow(f, i, p) % p) == pow(f, i, p)
    for i in range(108)
    for j in range(77)
)
print(f"c^{key.decryption_exponent} recovers m for all 108*77 pairs: {ok}")
