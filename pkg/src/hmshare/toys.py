"""Hand-sized platforms for demos and tests.

Only the published inputs are fixed here (moduli, bases, exponents);
every element and order is recomputed. Two of the published bases are
not primitive roots: 3 has order 594 modulo 8317 and 2 has order 2030
modulo 6091. The fixtures therefore record true subgroup orders, and the
6091 platform uses the primitive root 7.
"""
from __future__ import annotations

import random

from .numtheory import Factorization, element_order, smallest_primitive_root
from .platform import FIELD, Platform, SubgroupSpec, build_field_platform, build_ring_platform
from .sharing import Share, v2_make_shares

__all__ = [
    "P_8317",
    "P_6091",
    "Q_31",
    "field_8317",
    "field_6091",
    "ring_257827",
    "ring_257827_shares",
]

P_8317 = 8317
P_6091 = 6091
Q_31 = 31
# f = 3^77, h = 3^108 over F_8317
BASE_8317, F_EXP_8317, H_EXP_8317 = 3, 77, 108
# decryption exponent 77 * 101 = 7777 uses these annihilating exponents
K_8317, L_8317 = 108, 77


def field_8317() -> Platform:
    """``F_8317`` with message subgroup ``<3^77>`` and one blinding subgroup ``<3^108>``."""
    p = P_8317
    fac = Factorization.of(p - 1)
    f = pow(BASE_8317, F_EXP_8317, p)
    h = pow(BASE_8317, H_EXP_8317, p)
    message = SubgroupSpec(0, element_order(f, p, fac), f)
    blinding = (SubgroupSpec(1, element_order(h, p, fac), h),)
    return Platform(p, FIELD, (p,), (fac,), message, blinding, smallest_primitive_root(p, fac))


def field_6091() -> Platform:
    """``F_6091`` for the first scheme: orders 2, 3, 5 and ``d = 29 = 30 - 1``."""
    fac = Factorization.of(P_6091 - 1)
    g = smallest_primitive_root(P_6091, fac)
    return build_field_platform(
        [2, 3, 5], 29, 0, random.Random(0), d_mode="minus", r_range=(7, 7), generator=g
    )


def ring_257827() -> Platform:
    """``Z_(8317*31)``: the 8317 subgroups lifted, plus ``<16>`` of order 5 from ``F_31``."""
    return build_ring_platform(field_8317(), Q_31, [(16, 5)])


def ring_257827_shares() -> list[Share]:
    """Normalized shares 7777 and 325 for the ring platform, computed with d = 108."""
    return v2_make_shares(K_8317, [L_8317, 5])
