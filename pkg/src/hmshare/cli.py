"""``hmshare`` command line.

Exit status: 0 on success, 1 when the protocol fails (for example an
unqualified coalition), 2 on usage errors or unreadable/malformed files.
All randomness comes from ``--seed`` when it is given.
"""
from __future__ import annotations

import argparse
import random
import sys
from itertools import product
from pathlib import Path

from . import hme, sharing, threshold, toys
from .errors import DecodeError, DuplicateShare, GenerationFailed, ParameterError
from .numtheory import Factorization, crt_pair, element_order, mod_inverse
from .platform import Platform, decode_message, dumps, encode_message, loads
from .primegen import PrimeCertificate, verify_certificate
from .session import Session

PUBLISHED_6091_DIGITS = {"u_1": 3045, "u_2": 4247, "u_3": 5842, "f": 2901, "m": 5948, "c": 808}


class UsageError(Exception):
    pass


class ProtocolFailure(Exception):
    pass


def _rng(args) -> random.Random:
    return random.Random(args.seed) if args.seed is not None else random.SystemRandom()


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


def _write(path: str, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from exc


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _load_private(path: str) -> Platform:
    platform = loads(_read(path))
    if not isinstance(platform, Platform):
        raise UsageError(f"{path} is a public platform file; the private section is required")
    return platform


# -- subcommands -------------------------------------------------------------


def cmd_gen_platform(args, out) -> int:
    rng = _rng(args)
    orders = _ints(args.orders) if args.orders else None
    if args.scheme == "v1":
        if orders is None:
            orders = sharing.draw_orders(args.n, rng, high=50)
        platform = sharing.build_v1_platform(orders, args.d_mode, args.extra_bits, rng)
    elif args.scheme == "v2":
        platform, _ = sharing.build_v2_platform(
            args.n, rng, d=args.d, orders=orders, extra_bits=args.extra_bits
        )
    else:
        if not args.structure_out:
            raise UsageError("threshold platforms need --structure-out")
        structure = threshold.build_access_structure(args.n)
        platform, structure, _ = threshold.instantiate(
            structure, rng, d=args.d, orders=orders, extra_bits=args.extra_bits
        )
        _write(args.structure_out, threshold.dump_structure(structure))
    _write(args.out, dumps(platform))
    if args.public_out:
        _write(args.public_out, dumps(platform, public=True))
    print(f"modulus = {platform.modulus}", file=out)
    return 0


def _shares_for(platform: Platform, scheme: str, structure_path: str | None):
    if scheme == "v1":
        if platform.d_mode is None:
            raise UsageError("platform was not generated for --scheme v1")
        return sharing.v1_shares(platform)
    if scheme == "v2":
        if platform.d_mode is not None:
            raise UsageError("platform was generated for --scheme v1")
        return sharing.v2_make_shares(platform.d, platform.orders)
    if not structure_path:
        raise UsageError("--scheme threshold needs --structure")
    structure = threshold.load_structure(_read(structure_path))
    if structure.orders != platform.orders:
        raise UsageError("access structure does not match the platform")
    return [s.as_share() for s in threshold.threshold_shares(structure, platform.d)]


def cmd_make_shares(args, out) -> int:
    platform = _load_private(args.platform)
    shares = _shares_for(platform, args.scheme, args.structure)
    outdir = Path(args.out_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    for s in shares:
        _write(str(outdir / f"share_{s.index}.txt"), sharing.dump_share(s, platform.modulus))
    print(f"wrote {len(shares)} shares to {outdir}", file=out)
    return 0


def cmd_deal(args, out) -> int:
    platform = _load_private(args.platform)
    rng = _rng(args)
    if args.message is not None:
        m = encode_message(platform, args.message.encode())
    elif args.message_exponent is not None:
        m = pow(platform.message.generator, args.message_exponent, platform.modulus)
    else:
        raise UsageError("give --message or --message-exponent")
    if args.scheme == "threshold":
        if args.k is None or not args.structure:
            raise UsageError("threshold deals need --k and --structure")
        structure = threshold.load_structure(_read(args.structure))
        deal = threshold.deal(platform, structure, args.k, m, rng)
    else:
        if not args.coalition:
            raise UsageError(f"{args.scheme} deals need --coalition")
        dealer = sharing.v1_deal if args.scheme == "v1" else sharing.v2_deal
        deal = dealer(platform, _ints(args.coalition), m, rng)
    _write(args.out, sharing.dump_deal(deal, platform.modulus))
    print(f"c = {deal.blinded}", file=out)
    return 0


def cmd_recover(args, out) -> int:
    deal, modulus = sharing.load_deal(_read(args.deal))
    shares = [sharing.load_share(_read(p), modulus)[0] for p in args.shares]
    for s in shares:
        if s.scheme != deal.scheme:
            raise UsageError(f"share {s.index} is a {s.scheme} share; the deal is {deal.scheme}")
    state = sharing.start_recovery(deal, modulus)
    for s in shares:
        try:
            state = sharing.apply_share(state, s)
        except DuplicateShare as exc:
            raise ProtocolFailure(str(exc)) from exc
    value = (
        sharing.v1_finalize(state, deal.d_mode) if deal.scheme == "v1" else state.current
    )
    if not sharing.is_qualified(deal, state.applied):
        raise ProtocolFailure("unqualified coalition")
    print(f"recovered = {value}", file=out)
    if args.platform:
        platform = _load_private(args.platform)
        try:
            print(f"message = {decode_message(platform, value).decode(errors='replace')}", file=out)
        except (DecodeError, ParameterError):
            raise ProtocolFailure("recovered value does not decode to a message") from None
    if args.expect is not None and value != args.expect:
        raise ProtocolFailure(f"recovered value differs from expected {args.expect}")
    return 0


def cmd_verify_cert(args, out) -> int:
    cert = PrimeCertificate.loads(_read(args.certificate))
    if not verify_certificate(cert):
        print(f"certificate INVALID for {cert.prime}", file=out)
        return 1
    print(f"certificate valid: {cert.prime} ({cert.prime.bit_length()} bits, "
          f"{len(cert.links)} links)", file=out)
    return 0


# -- demos -------------------------------------------------------------------


def _demo_1(rng: random.Random, out) -> int:
    p = toys.P_8317
    fac = Factorization.of(p - 1)
    platform = toys.field_8317()
    f, h = platform.message.generator, platform.blinding[0].generator
    print(f"field F_{p}, p - 1 = {fac}", file=out)
    print(f"base 3 has order {element_order(3, p, fac)}; "
          f"smallest primitive root is {platform.primitive_root}", file=out)
    print(f"f = 3^77 = {f} (order {platform.d})", file=out)
    print(f"h = 3^108 = {h} (order {platform.blinding[0].order})", file=out)
    key = hme.make_key(p, toys.K_8317, toys.L_8317, ((h, platform.blinding[0].order),))
    print(f"l' = 77^-1 mod 108 = {key.l_inverse}; decryption exponent {key.decryption_exponent}",
          file=out)
    i = rng.randrange(108)
    m = pow(f, i, p)
    c = hme.encrypt(key, m, rng)
    print(f"m = f^{i} = {m}; c = {c}; c^{key.decryption_exponent} = {hme.decrypt(key, c)}",
          file=out)
    ok = all(
        hme.decrypt(key, pow(h, j, p) * pow(f, i, p) % p) == pow(f, i, p)
        for i, j in product(range(108), range(77))
    )
    print(f"all 108*77 (message, blinding) pairs decrypt: {'yes' if ok else 'NO'}", file=out)
    return 0 if ok and hme.decrypt(key, c) == m else 1


def _demo_2(rng: random.Random, out) -> int:
    p, g = toys.P_6091, 2
    fac = Factorization.of(p - 1)
    print(f"field F_{p}, p - 1 = {fac}, t = 2*3*5 = 30, d = 29", file=out)
    print(f"base 2 has order {element_order(g, p, fac)} (primitive root: "
          f"{'yes' if element_order(g, p, fac) == p - 1 else 'no'})", file=out)
    recomputed = {
        "u_1": pow(g, 3045, p), "u_2": pow(g, 2030, p), "u_3": pow(g, 1218, p),
        "f": pow(g, 210, p), "m": pow(g, 630, p), "c": pow(g, 4081, p),
    }
    for name, value in recomputed.items():
        printed = PUBLISHED_6091_DIGITS[name]
        note = "" if value == printed else f"  (published {printed})"
        print(f"  {name} = {value}{note}", file=out)
    platform = toys.field_6091()
    print(f"platform with primitive root {platform.primitive_root}: f = "
          f"{platform.message.generator}, u = "
          f"{', '.join(str(s.generator) for s in platform.blinding)}", file=out)
    session = Session(platform, sharing.v1_shares(platform), rng=rng)
    session.deliver_shares()
    m = pow(platform.message.generator, rng.randrange(1, platform.d), p)
    transcript = session.run("v1", m, coalition=[1, 2, 3])
    out.write(transcript.text())
    ok = transcript.recovered == m
    print(f"dealt m = {m}; recovered {transcript.recovered}: {'match' if ok else 'MISMATCH'}",
          file=out)
    return 0 if ok else 1


def _demo_3(rng: random.Random, out) -> int:
    p, q = toys.P_8317, toys.Q_31
    f1, h1, h2 = crt_pair(3113, p, 1, q), crt_pair(4610, p, 1, q), crt_pair(1, p, 16, q)
    print(f"ring Z_n, n = {p}*{q} = {p * q}", file=out)
    print(f"f_1 = crt(3113, 1) = {f1}; h_1 = crt(4610, 1) = {h1}; h_2 = crt(1, 16) = {h2}",
          file=out)
    platform = toys.ring_257827()
    print(f"orders: f_1 {platform.d}, h_1 {platform.blinding[0].order}, "
          f"h_2 {platform.blinding[1].order}", file=out)
    shares = toys.ring_257827_shares()
    print(f"shares: 77*{mod_inverse(77, 108)} = {shares[0].exponent}, "
          f"5*{mod_inverse(5, 108)} = {shares[1].exponent}", file=out)
    session = Session(platform, shares, rng=rng)
    session.deliver_shares()
    m = pow(f1, rng.randrange(108), platform.modulus)
    transcript = session.run("v2", m, coalition=[1, 2])
    out.write(transcript.text())
    ok = transcript.recovered == m
    print(f"dealt m = {m}; recovered {transcript.recovered}: {'match' if ok else 'MISMATCH'}",
          file=out)
    return 0 if ok else 1


def _demo_4(rng: random.Random, out) -> int:
    structure = threshold.build_access_structure(3)
    platform, structure, tshares = threshold.instantiate(structure, rng)
    shares = [s.as_share() for s in tshares]
    print(f"n = 3, {len(structure.atoms)} atoms, p = {platform.modulus}", file=out)
    session = Session(platform, shares, structure=structure, rng=rng)
    session.deliver_shares()
    status = 0
    for k in (1, 2, 3):
        m = pow(platform.message.generator, rng.randrange(1, platform.d), platform.modulus)
        for coalition in ([1], [1, 3], [1, 2, 3]):
            t = session.run("threshold", m, k=k, coalition=coalition)
            ok = t.recovered == m
            expected = len(coalition) >= k
            status |= ok != expected
            print(f"k = {k}, coalition {coalition}: "
                  f"{'recovered' if ok else 'not recovered'}", file=out)
    return status


DEMOS = {1: _demo_1, 2: _demo_2, 3: _demo_3, 4: _demo_4}


def cmd_demo(args, out) -> int:
    rng = random.Random(args.seed if args.seed is not None else 0)
    return DEMOS[args.example](rng, out)


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hmshare", description="Secret sharing with shares that are distributed once and reused."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def seeded(p):
        p.add_argument("--seed", type=int)
        return p

    g = seeded(sub.add_parser("gen-platform", help="generate a platform file"))
    g.add_argument("--scheme", choices=["v1", "v2", "threshold"], required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--d-mode", choices=["minus", "plus"], default="minus")
    g.add_argument("--orders", help="comma-separated blinding orders")
    g.add_argument("--d", type=int, help="message-subgroup order (v2, threshold)")
    g.add_argument("--extra-bits", type=int, default=16)
    g.add_argument("--out", required=True)
    g.add_argument("--public-out")
    g.add_argument("--structure-out")
    g.set_defaults(func=cmd_gen_platform)

    m = sub.add_parser("make-shares", help="write one share file per participant")
    m.add_argument("--platform", required=True)
    m.add_argument("--scheme", choices=["v1", "v2", "threshold"], required=True)
    m.add_argument("--structure")
    m.add_argument("--out-dir", required=True)
    m.set_defaults(func=cmd_make_shares)

    d = seeded(sub.add_parser("deal", help="blind a message for a coalition or threshold"))
    d.add_argument("--platform", required=True)
    d.add_argument("--scheme", choices=["v1", "v2", "threshold"], required=True)
    d.add_argument("--coalition")
    d.add_argument("--k", type=int)
    d.add_argument("--structure")
    d.add_argument("--message")
    d.add_argument("--message-exponent", type=int)
    d.add_argument("--out", required=True)
    d.set_defaults(func=cmd_deal)

    r = sub.add_parser("recover", help="apply share files to a deal in order")
    r.add_argument("--deal", required=True)
    r.add_argument("--shares", nargs="+", required=True)
    r.add_argument("--platform", help="private platform file, to decode the message")
    r.add_argument("--expect", type=int)
    r.set_defaults(func=cmd_recover)

    e = seeded(sub.add_parser("demo", help="walk through a worked example"))
    e.add_argument("--example", type=int, choices=sorted(DEMOS), required=True)
    e.set_defaults(func=cmd_demo)

    v = sub.add_parser("verify-cert", help="re-verify a prime certificate file")
    v.add_argument("certificate")
    v.set_defaults(func=cmd_verify_cert)
    return parser


def main(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except ProtocolFailure as exc:
        print(f"hmshare: {exc}", file=err)
        return 1
    except GenerationFailed as exc:
        print(f"hmshare: generation failed: {exc}", file=err)
        return 1
    except (UsageError, DecodeError, ParameterError) as exc:
        print(f"hmshare: {exc}", file=err)
        return 2


if __name__ == "__main__":
    sys.exit(main())
