"""A simulated session: shares are delivered once, then reused.

The transport carries one text frame per message; the recovery token
visits the coalition in order and the last member reports to the dealer.
"""
import random

from hmshare.session import Session, SocketTransport
from hmshare.sharing import build_v2_platform

rng = random.Random(6)
platform, shares = build_v2_platform(3, rng)
with SocketTransport() as transport:
    session = Session(platform, shares, transport=transport, rng=rng)
    print("acks:", session.deliver_shares())
    for coalition in ([1, 3], [2], [1, 2, 3]):
        m = pow(platform.message.generator, rng.randrange(1, platform.d), platform.modulus)
        transcript = session.run("v2", m, coalition=coalition)
        print(transcript.text(), end="")
        print(f"  -> recovered == m: {transcript.recovered == m}\n")
    print(f"share deliveries: {session.deliveries}")
