import random
from math import gcd
from itertools import combinations, permutations

import pytest

from hmshare import toys
from hmshare.errors import DecodeError, DuplicateShare, ParameterError
from hmshare.sharing import (
    V2,
    Deal,
    Share,
    build_v1_platform,
    build_v2_platform,
    dump_deal,
    dump_share,
    is_qualified,
    load_deal,
    load_share,
    recover,
    start_recovery,
    v1_apply,
    v1_deal,
    v1_finalize,
    v1_shares,
    v2_apply,
    v2_deal,
    v2_make_shares,
)


def full_order_messages(plat, count, rng):
    # full order means f^i with gcd(i, d) = 1
    out = []
    while len(out) < count:
        i = rng.randrange(1, plat.d)
        if gcd(i, plat.d) == 1:
            out.append(pow(plat.message.generator, i, plat.modulus))
    return out


def test_v1_example_platform_recovery():
    plat = toys.field_6091()
    shares = v1_shares(plat)
    assert [s.exponent for s in shares] == [2, 3, 5]
    r = random.Random(0)
    for m in full_order_messages(plat, 20, r):
        deal = v1_deal(plat, [1, 2, 3], m, r)
        for order in permutations(shares):
            assert recover(deal, order, plat.modulus) == m


def test_v1_published_identity_recomputed():
    # the printed blindings are not in T_i, yet the identity c^30 = m needs them to be
    c = 3045 * 1558 * 1091 * 5948 % 6091
    assert c == 404 and pow(2, 4081, 6091) == 1848
    assert pow(c, 30, 6091) != 5948
    # with elements recomputed from the base 2 the identity does hold
    g, p = 2, 6091
    u = [pow(g, 3045, p), pow(g, 2030, p), pow(g, 1218, p)]
    m = pow(pow(g, 210, p), 3, p)
    c = u[0] * pow(u[1], 2, p) * pow(u[2], 2, p) * m % p
    assert pow(c, 30, p) == m


def test_v1_subset_and_superset_fail():
    plat = toys.field_6091()
    shares = v1_shares(plat)
    r = random.Random(1)
    m = full_order_messages(plat, 1, r)[0]
    deal = v1_deal(plat, [1, 3], m, r)
    assert recover(deal, [shares[0], shares[2]], plat.modulus) == m
    assert recover(deal, [shares[0]], plat.modulus) != m
    assert recover(deal, shares, plat.modulus) != m


def test_v1_plus_mode():
    r = random.Random(2)
    plat = build_v1_platform([2, 3, 5], "plus", 8, r)
    assert plat.d == 31 and plat.d_mode == "plus"
    shares = v1_shares(plat)
    for m in full_order_messages(plat, 10, r):
        for coalition in ([1, 2, 3], [2], [1, 3]):
            deal = v1_deal(plat, coalition, m, r)
            used = [shares[i - 1] for i in coalition]
            assert recover(deal, used, plat.modulus) == m
            state = start_recovery(deal, plat.modulus)
            for s in used:
                state = v1_apply(state, s)
            assert state.current == pow(m, -1, plat.modulus)
            assert v1_finalize(state, "plus") == m


def test_v1_full_coalition_exponent_one():
    plat = toys.field_6091()
    r = random.Random(5)
    m = full_order_messages(plat, 1, r)[0]
    deal = v1_deal(plat, [1, 2, 3], m, r)
    # c / m lies in the blinding part: annihilated by t = 30
    assert pow(deal.blinded * pow(m, -1, 6091) % 6091, 30, 6091) == 1


def test_v1_requires_v1_platform():
    plat = toys.ring_257827()
    with pytest.raises(ParameterError):
        v1_deal(plat, [1], plat.message.generator)


def test_v2_example_shares():
    shares = v2_make_shares(108, [77, 5])
    assert [s.exponent for s in shares] == [7777, 325]
    assert all(s.exponent % 108 == 1 for s in shares)


def test_v2_example_monotone():
    plat = toys.ring_257827()
    shares = toys.ring_257827_shares()
    n = plat.modulus
    r = random.Random(3)
    for i in range(54):
        m = pow(plat.message.generator, i, n)
        for coalition in ([1], [2], [1, 2]):
            deal = v2_deal(plat, coalition, m, r)
            held = [shares[j - 1] for j in coalition]
            assert recover(deal, held, n) == m
            assert recover(deal, shares, n) == m
            if len(coalition) == 2 and i:
                assert recover(deal, shares[:1], n) != m


def test_v2_random_platform_monotone():
    r = random.Random(4)
    plat, shares = build_v2_platform(4, r)
    for s, t in zip(shares, plat.orders):
        assert s.exponent % plat.d == 1 and s.exponent % t == 0
    m = full_order_messages(plat, 1, r)[0]
    deal = v2_deal(plat, [2, 4], m, r)
    for size in range(1, 5):
        for group in combinations(range(1, 5), size):
            got = recover(deal, [shares[j - 1] for j in group], plat.modulus)
            assert (got == m) == ({2, 4} <= set(group))
            assert is_qualified(deal, group) == ({2, 4} <= set(group))


def test_duplicate_share_rejected():
    plat = toys.ring_257827()
    shares = toys.ring_257827_shares()
    state = start_recovery(v2_deal(plat, [1], plat.message.generator), plat.modulus)
    state = v2_apply(state, shares[0])
    with pytest.raises(DuplicateShare):
        v2_apply(state, shares[0])
    with pytest.raises(ParameterError):
        v1_apply(state, shares[1])


def test_exponent_one_share_is_identity():
    state = start_recovery(Deal(V2, 1234, (1,)), 8317)
    assert v2_apply(state, Share(1, 1, V2)).current == 1234


def test_bad_coalitions():
    plat = toys.ring_257827()
    for coalition in ([], [0], [3], [1, 1]):
        with pytest.raises(ParameterError):
            v2_deal(plat, coalition, plat.message.generator)
    with pytest.raises(ParameterError):
        v2_deal(plat, [1], 2)


def test_reuse_keeps_share_files(tmp_path):
    plat = toys.ring_257827()
    shares = toys.ring_257827_shares()
    files = [tmp_path / f"share_{s.index}.txt" for s in shares]
    for f, s in zip(files, shares):
        f.write_text(dump_share(s, plat.modulus))
    before = [f.read_bytes() for f in files]
    r = random.Random(6)
    for _ in range(100):
        m = pow(plat.message.generator, r.randrange(54), plat.modulus)
        deal = v2_deal(plat, [1, 2], m, r)
        loaded = [load_share(f.read_text(), plat.modulus)[0] for f in files]
        assert recover(deal, loaded, plat.modulus) == m
    assert [f.read_bytes() for f in files] == before


def test_share_and_deal_files():
    plat = toys.field_6091()
    share = v1_shares(plat)[1]
    text = dump_share(share, plat.modulus)
    assert load_share(text, plat.modulus)[0] == share
    with pytest.raises(DecodeError):
        load_share(text, 8317)
    with pytest.raises(DecodeError):
        load_share(text.replace("exponent = 3", "exponent = x"))
    deal = v1_deal(plat, [1, 3], plat.message.generator, random.Random(0))
    assert load_deal(dump_deal(deal, plat.modulus)) == (deal, plat.modulus)
    with pytest.raises(DecodeError):
        load_deal(dump_deal(deal, plat.modulus).replace("d_mode = minus\n", ""))
    with pytest.raises(DecodeError):
        load_deal(dump_deal(deal, plat.modulus).replace("modulus = 6091", "modulus = 6092"))
