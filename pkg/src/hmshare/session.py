"""Dealer and participant actors running the sequential recovery protocol.

Actors talk only through a :class:`Transport` in one-line text frames::

    kind|session_id|sender|field=value,field=value,...

Numbers are decimal. List values (``applied``, ``route``, ``coalition``)
are ``;``-separated indices. Every frame carries a ``to`` field naming its
recipient mailbox (``dealer`` or ``p<index>``).

Frame kinds: ``ShareDelivery``, ``Ack``, ``DealBroadcast``,
``RecoveryToken`` and ``RecoveredSecret``.
"""
from __future__ import annotations

import random
import select
import socket
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Protocol, Sequence

from . import threshold as _threshold
from .errors import DecodeError, SessionAborted
from .platform import Platform, PublicPlatform, public_view
from .sharing import (
    THRESHOLD,
    V1,
    V2,
    Share,
    dump_share,
    v1_deal,
    v2_deal,
)

__all__ = [
    "InMemoryTransport",
    "ProtocolMessage",
    "Session",
    "SocketTransport",
    "Transcript",
    "Transport",
    "run_session",
]

DEALER = "dealer"
KINDS = ("ShareDelivery", "Ack", "DealBroadcast", "RecoveryToken", "RecoveredSecret")


def mailbox(index: int) -> str:
    return f"p{index}"


def _join(indices: Iterable[int]) -> str:
    return ";".join(str(i) for i in indices)


def _split(value: str) -> list[int]:
    return [int(v) for v in value.split(";") if v]


@dataclass(frozen=True)
class ProtocolMessage:
    kind: str
    session_id: str
    sender: str
    fields: tuple[tuple[str, str], ...]

    def get(self, key: str, default: str | None = None) -> str | None:
        return dict(self.fields).get(key, default)

    def to_frame(self) -> str:
        body = ",".join(f"{k}={v}" for k, v in self.fields)
        return f"{self.kind}|{self.session_id}|{self.sender}|{body}"

    @classmethod
    def from_frame(cls, frame: str) -> ProtocolMessage:
        parts = frame.rstrip("\n").split("|")
        if len(parts) != 4 or parts[0] not in KINDS:
            raise DecodeError(f"malformed frame {frame!r}")
        kind, sid, sender, body = parts
        fields = []
        for item in body.split(",") if body else []:
            key, sep, value = item.partition("=")
            if not sep:
                raise DecodeError(f"malformed field {item!r}")
            fields.append((key, value))
        return cls(kind, sid, sender, tuple(fields))


def message(kind: str, session_id: str, sender: str, **fields: object) -> ProtocolMessage:
    return ProtocolMessage(kind, session_id, sender, tuple((k, str(v)) for k, v in fields.items()))


class Transport(Protocol):
    def send(self, recipient: str, frame: str) -> None: ...

    def receive(self, recipient: str) -> str | None: ...


class InMemoryTransport:
    """FIFO mailbox per recipient."""

    def __init__(self):
        self._boxes: dict[str, deque[str]] = {}

    def send(self, recipient: str, frame: str) -> None:
        self._boxes.setdefault(recipient, deque()).append(frame)

    def receive(self, recipient: str) -> str | None:
        box = self._boxes.get(recipient)
        return box.popleft() if box else None


class SocketTransport:
    """Newline-delimited frames over one local socket pair per mailbox."""

    def __init__(self):
        self._pairs: dict[str, tuple[socket.socket, socket.socket]] = {}
        self._buffers: dict[str, bytearray] = {}

    def _pair(self, name: str) -> tuple[socket.socket, socket.socket]:
        if name not in self._pairs:
            self._pairs[name] = socket.socketpair()
            self._buffers[name] = bytearray()
        return self._pairs[name]

    def send(self, recipient: str, frame: str) -> None:
        writer, _ = self._pair(recipient)
        writer.sendall(frame.encode() + b"\n")

    def receive(self, recipient: str) -> str | None:
        _, reader = self._pair(recipient)
        buf = self._buffers[recipient]
        while b"\n" not in buf:
            ready, _, _ = select.select([reader], [], [], 0)
            if not ready:
                return None
            buf += reader.recv(65536)
        line, _, rest = bytes(buf).partition(b"\n")
        self._buffers[recipient] = bytearray(rest)
        return line.decode()

    def close(self) -> None:
        for a, b in self._pairs.values():
            a.close()
            b.close()
        self._pairs.clear()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


@dataclass
class Transcript:
    session_id: str
    frames: list[str] = field(default_factory=list)
    # token holder after each frame (None while no token is in flight)
    holders: list[str | None] = field(default_factory=list)
    recovered: int | None = None

    def text(self) -> str:
        return "".join(f + "\n" for f in self.frames)

    def messages(self) -> list[ProtocolMessage]:
        return [ProtocolMessage.from_frame(f) for f in self.frames]


class ParticipantActor:
    def __init__(self, index: int, public: PublicPlatform, share_dir: Path | None = None):
        self.index = index
        self.name = mailbox(index)
        self.public = public
        self.share: Share | None = None
        self.share_dir = share_dir
        self._deals: dict[str, ProtocolMessage] = {}
        self._last_step: dict[str, int] = {}

    def handle(self, msg: ProtocolMessage) -> list[tuple[str, ProtocolMessage]]:
        if msg.kind == "ShareDelivery":
            return self._store(msg)
        if msg.kind == "DealBroadcast":
            self._deals[msg.session_id] = msg
            route = _split(msg.get("route", ""))
            if route and route[0] == self.index:
                return self._apply(msg.session_id, int(msg.get("c")), [], route, 0)
            return []
        if msg.kind == "RecoveryToken":
            step = int(msg.get("step"))
            if step <= self._last_step.get(msg.session_id, -1):
                raise SessionAborted(f"{self.name}: duplicate token delivery (step {step})")
            applied = _split(msg.get("applied", ""))
            return self._apply(
                msg.session_id, int(msg.get("current")), applied, _split(msg.get("route")), step
            )
        return []

    def _store(self, msg: ProtocolMessage) -> list[tuple[str, ProtocolMessage]]:
        if self.share is not None:
            raise SessionAborted(f"{self.name}: share already delivered")
        share = Share(int(msg.get("index")), int(msg.get("exponent")), msg.get("scheme"))
        if share.index != self.index:
            raise SessionAborted(f"{self.name}: received share for participant {share.index}")
        self.share = share
        if self.share_dir is not None:
            path = Path(self.share_dir) / f"share_{self.index}.txt"
            path.write_text(dump_share(share, self.public.modulus))
        return [(DEALER, message("Ack", msg.session_id, self.name, to=DEALER, index=self.index))]

    def _apply(
        self, sid: str, current: int, applied: list[int], route: list[int], step: int
    ) -> list[tuple[str, ProtocolMessage]]:
        if self.share is None:
            raise SessionAborted(f"{self.name}: no share on record")
        if self.index in applied:
            raise SessionAborted(f"{self.name}: share already applied in this session")
        self._last_step[sid] = step
        current = pow(current, self.share.exponent, self.public.modulus)
        applied = applied + [self.index]
        if len(applied) < len(route):
            nxt = route[len(applied)]
            token = message(
                "RecoveryToken", sid, self.name, to=mailbox(nxt), step=step + 1,
                current=current, applied=_join(applied), route=_join(route),
            )
            return [(mailbox(nxt), token)]
        deal = self._deals.get(sid)
        if deal is not None and deal.get("scheme") == V1 and deal.get("d_mode") == "plus":
            current = pow(current, -1, self.public.modulus)
        done = message(
            "RecoveredSecret", sid, self.name, to=DEALER, value=current, applied=_join(applied)
        )
        return [(DEALER, done)]


class Session:
    """One dealer, ``n`` participants, one transport; shares delivered once, reused per run."""

    def __init__(
        self,
        platform: Platform,
        shares: Sequence[Share],
        *,
        structure: _threshold.AccessStructure | None = None,
        transport: Transport | None = None,
        rng: random.Random | None = None,
        share_dir: Path | str | None = None,
    ):
        self.platform = platform
        self.shares = list(shares)
        self.structure = structure
        self.transport = transport if transport is not None else InMemoryTransport()
        self.rng = rng or random.Random()
        self.public = public_view(platform)
        self.share_dir = Path(share_dir) if share_dir is not None else None
        n = structure.n if structure is not None else len(platform.blinding)
        self.participants = {
            i: ParticipantActor(i, self.public, self.share_dir) for i in range(1, n + 1)
        }
        self.deliveries = 0
        self._runs = 0

    def _sid(self, tag: str) -> str:
        return f"{tag}{self._runs:04d}-{self.rng.getrandbits(32):08x}"

    def _pump(self, transcript: Transcript) -> None:
        """Deliver queued frames round-robin until every mailbox is empty."""
        names = [DEALER] + [p.name for p in self.participants.values()]
        actors = {p.name: p for p in self.participants.values()}
        busy = True
        while busy:
            busy = False
            for name in names:
                frame = self.transport.receive(name)
                if frame is None:
                    continue
                busy = True
                msg = ProtocolMessage.from_frame(frame)
                if name == DEALER:
                    # the dealer only observes acks and the final value
                    if msg.kind == "RecoveredSecret":
                        transcript.recovered = int(msg.get("value"))
                    continue
                for recipient, out in actors[name].handle(msg):
                    self._send(transcript, recipient, out)

    def _send(self, transcript: Transcript, recipient: str, msg: ProtocolMessage) -> None:
        frame = msg.to_frame()
        self.transport.send(recipient, frame)
        transcript.frames.append(frame)
        transcript.holders.append(recipient if msg.kind == "RecoveryToken" else None)

    def deliver_shares(self) -> list[str]:
        """Hand each participant its share once; returns the acknowledging senders."""
        if self.deliveries:
            raise SessionAborted("shares were already delivered; they are reused, never resent")
        indices = [s.index for s in self.shares]
        if len(set(indices)) != len(indices):
            raise SessionAborted("duplicate participant ids in share list")
        unknown = set(indices) - set(self.participants)
        if unknown:
            raise SessionAborted(f"no participant for shares {sorted(unknown)}")
        transcript = Transcript(self._sid("setup"))
        for s in self.shares:
            msg = message(
                "ShareDelivery", transcript.session_id, DEALER, to=mailbox(s.index),
                index=s.index, scheme=s.scheme, exponent=s.exponent,
            )
            self._send(transcript, mailbox(s.index), msg)
        self._pump(transcript)
        self.deliveries += 1
        self._runs += 1
        self.setup_transcript = transcript
        return [m.sender for m in transcript.messages() if m.kind == "Ack"]

    def run(
        self,
        scheme: str,
        m: int,
        *,
        coalition: Iterable[int] | None = None,
        k: int | None = None,
        route: Sequence[int] | None = None,
    ) -> Transcript:
        """Deal ``m`` and let the token visit ``route`` (default: sorted coalition).

        For threshold runs ``coalition`` names the members who take part;
        it defaults to everyone. Extra indices in ``route`` model intruders.
        """
        if not self.deliveries:
            raise SessionAborted("shares have not been delivered")
        sid = self._sid("run")
        self._runs += 1
        transcript = Transcript(sid)
        fields: dict[str, object] = {"scheme": scheme}
        if scheme == THRESHOLD:
            if self.structure is None or k is None:
                raise SessionAborted("threshold runs need an access structure and k")
            members = sorted(coalition) if coalition is not None else sorted(self.participants)
            deal = _threshold.deal(self.platform, self.structure, k, m, self.rng)
            fields["k"] = k
            recipients = sorted(self.participants)
        else:
            if coalition is None:
                raise SessionAborted("v1/v2 runs need a coalition")
            if scheme not in (V1, V2):
                raise SessionAborted(f"unknown scheme {scheme!r}")
            members = sorted(coalition)
            dealer = v1_deal if scheme == V1 else v2_deal
            deal = dealer(self.platform, members, m, self.rng)
            fields["coalition"] = _join(deal.coalition)
            if deal.d_mode:
                fields["d_mode"] = deal.d_mode
            recipients = members
        path = list(route) if route is not None else members
        if not path:
            raise SessionAborted("empty recovery route")
        for j in path:
            if j not in self.participants:
                raise SessionAborted(f"route names unknown participant {j}")
        fields["c"] = deal.blinded
        fields["route"] = _join(path)
        for j in sorted(set(recipients) | set(path)):
            msg = message("DealBroadcast", sid, DEALER, to=mailbox(j), **fields)
            self._send(transcript, mailbox(j), msg)
        self._pump(transcript)
        return transcript


def run_session(
    platform: Platform,
    shares: Sequence[Share],
    scheme: str,
    m: int,
    *,
    coalition: Iterable[int] | None = None,
    k: int | None = None,
    structure: _threshold.AccessStructure | None = None,
    transport: Transport | None = None,
    rng: random.Random | None = None,
    route: Sequence[int] | None = None,
) -> Transcript:
    """One-shot helper: deliver shares, then run a single recovery."""
    session = Session(platform, shares, structure=structure, transport=transport, rng=rng)
    session.deliver_shares()
    return session.run(scheme, m, coalition=coalition, k=k, route=route)
