"""Protocol sessions: parties as state machines, exchanging frames over a transport.

Every frame payload starts with a two-byte envelope ``(sender, recipient)``;
recipient ``0xFF`` is a broadcast.  A party only reacts to messages, never to
timing, and buffers what it cannot use yet, so its sequence of sent frames is
a function of the configuration and seed alone.  The session transcript is the
concatenation of each party's sent frames in party order, which is why the
in-process and the TCP transport produce the same bytes.

Each party opens with HELLO (protocol id, group label, hash algorithm) and
aborts if any peer disagrees.  Key agreement ends with KEYCONFIRM carrying the
hash of the canonical encoding of the derived key.
"""

from __future__ import annotations

import hashlib
import math
import random
import socket
import struct
import threading
from collections import deque
from dataclasses import dataclass, field

from engelkit.catalog import random_automorphism, resolve
from engelkit.errors import ProtocolError, WireError
from engelkit.pc import INFINITY, FreeWord, element_order, engel_commutator, random_element
from engelkit.protocols.engel import engel4_sign, engel4_verify
from engelkit.protocols.mkep import mkep_user_key
from engelkit.protocols.semidirect import check_automorphism, sdpkex_key, sdpkex_public
from engelkit.protocols.sharing import (
    ShareColumn,
    SharePackage,
    decode_package,
    sss1_deal,
    sss1_reconstruct,
    sss2_deal,
    sss2_reconstruct,
)
from engelkit.wire import (
    FrameReader,
    Kind,
    Cursor,
    encode_int,
    decode_element,
    decode_elements,
    decode_strings,
    emit_presentation,
    encode_element,
    encode_elements,
    encode_frame,
    encode_strings,
    parse_presentation,
    read_int,
)

BROADCAST = 0xFF
HASH_ALG = "sha256"
PROTOCOLS = ("mkep", "sdpkex", "eke2", "sig4", "sss1", "sss2")

DEFAULT_GROUPS = {
    "mkep": "expquot:2:3:25",
    "sdpkex": "expquot:2:2:1018081",
    "eke2": "burnside3:3",
    "sig4": "burnside3:3",
    "sss1": "burnside3:2",
    "sss2": "burnside3:2",
}


@dataclass
class SessionConfig:
    protocol: str
    group: str = ""
    seed: int = 0
    parties: int = 2
    params: dict = field(default_factory=dict)
    # per-party overrides of the group label, for exercising HELLO mismatches
    party_groups: dict = field(default_factory=dict)
    catalog_dir: str | None = None

    def __post_init__(self):
        if self.protocol not in PROTOCOLS:
            raise ValueError(f"unknown protocol {self.protocol!r}; choose from {', '.join(PROTOCOLS)}")
        if not self.group:
            self.group = DEFAULT_GROUPS[self.protocol]
        if self.protocol in ("sdpkex", "eke2", "sig4"):
            self.parties = 2
        if self.protocol in ("sss1", "sss2"):
            self.parties = self.params.get("n", 5) + 1
        if self.parties < 2 or self.parties > 250:
            raise ValueError("parties must be between 2 and 250")

    def group_for(self, index: int) -> str:
        return self.party_groups.get(index, self.group)


@dataclass
class SessionOutcome:
    protocol: str
    ok: bool
    reasons: list
    key_hashes: list
    details: list
    transcript: bytes

    def to_kv(self) -> dict:
        out = {
            "protocol": self.protocol,
            "ok": str(self.ok).lower(),
            "transcript_sha256": hashlib.sha256(self.transcript).hexdigest(),
            "transcript_bytes": len(self.transcript),
        }
        for j, (h, r, d) in enumerate(zip(self.key_hashes, self.reasons, self.details)):
            if h is not None:
                out[f"party{j}.key_hash"] = h
            if r:
                out[f"party{j}.abort"] = r
            for k, v in sorted(d.items()):
                out[f"party{j}.{k}"] = v
        return out


def _derive_rng(seed: int, *tags) -> random.Random:
    material = ":".join(str(t) for t in (seed, *tags)).encode()
    return random.Random(int.from_bytes(hashlib.sha256(material).digest(), "big"))


def _digest(data: bytes) -> bytes:
    return hashlib.new(HASH_ALG, data).digest()


def _pack_bits(col: ShareColumn) -> bytes:
    k = len(col)
    padded = col.bits + (0,) * (-k % 8)
    raw = bytes(
        sum(b << (7 - t) for t, b in enumerate(padded[i:i + 8])) for i in range(0, len(padded), 8)
    )
    return struct.pack(">H", k) + raw


def _unpack_bits(cur: Cursor) -> ShareColumn:
    k = cur.u16()
    raw = cur.take((k + 7) // 8)
    bits = [(raw[i // 8] >> (7 - i % 8)) & 1 for i in range(k)]
    return ShareColumn(tuple(bits))


def _encode_word(w: FreeWord) -> bytes:
    out = bytearray(struct.pack(">H", len(w.letters)))
    for i, e in w.letters:
        out += struct.pack(">H", i) + encode_int(e)
    return bytes(out)


def _read_word(cur: Cursor, alphabet: int) -> FreeWord:
    letters = []
    for _ in range(cur.u16()):
        i = cur.u16()
        letters.append((i, read_int(cur)))
    return FreeWord(tuple(letters), alphabet)


# share message tags
_PACKAGE, _COLUMN, _VALUE = 0, 1, 2


# ---------------------------------------------------------------------------
# parties


class Party:
    """Single-owner protocol state machine.

    ``start()`` and ``receive()`` queue outgoing ``(recipient, kind, body)``
    triples in ``outbox``; the transport drains it.  ``sent`` logs the frames.
    """

    def __init__(self, index: int, config: SessionConfig):
        self.index = index
        self.config = config
        self.n = config.parties
        self.label = config.group_for(index)
        self.outbox: deque = deque()
        self.sent: list = []
        self.done = False
        self.ok = False
        self.reason = ""
        self.key_hash: bytes | None = None
        self.detail: dict = {}
        self._hellos: dict = {}
        self._confirms: dict = {}
        self._ready = False
        self._early: list = []
        self.rng = _derive_rng(config.seed, "party", index)

    # -- plumbing --

    def peers(self):
        return [j for j in range(self.n) if j != self.index]

    def send(self, recipient: int, kind: Kind, body: bytes = b""):
        frame = encode_frame(kind, bytes([self.index, recipient]) + body)
        self.sent.append(frame)
        self.outbox.append(frame)

    def abort(self, reason: str):
        if not self.done:
            self.done, self.ok, self.reason = True, False, reason

    def finish(self, ok: bool, reason: str = ""):
        self.done, self.ok, self.reason = True, ok, reason

    # -- protocol skeleton --

    def start(self):
        hello = encode_strings([self.config.protocol, self.label, HASH_ALG])
        self.send(BROADCAST, Kind.HELLO, hello)

    def receive(self, frame_kind: Kind, payload: bytes):
        if self.done:
            return
        if len(payload) < 2:
            raise WireError("payload too short for the envelope")
        sender, recipient = payload[0], payload[1]
        if recipient not in (self.index, BROADCAST) or sender == self.index or sender >= self.n:
            return
        body = payload[2:]
        try:
            if frame_kind == Kind.HELLO:
                self._on_hello(sender, body)
            elif frame_kind == Kind.KEYCONFIRM:
                self._confirms[sender] = body
                self._maybe_confirmed()
            elif not self._ready:
                # peers may finish their handshake before ours completes
                self._early.append((sender, frame_kind, body))
            else:
                self.on_message(sender, frame_kind, body)
        except (ProtocolError, WireError, ValueError) as exc:
            self.abort(f"{type(exc).__name__}: {exc}")

    def _on_hello(self, sender: int, body: bytes):
        proto, label, alg = decode_strings(body)
        if (proto, label, alg) != (self.config.protocol, self.label, HASH_ALG):
            raise ProtocolError(
                f"HELLO mismatch from party {sender}: {proto}/{label}/{alg} "
                f"vs {self.config.protocol}/{self.label}/{HASH_ALG}"
            )
        self._hellos[sender] = body
        if len(self._hellos) == self.n - 1 and not self._ready:
            self._ready = True
            self.on_ready()
            early, self._early = self._early, []
            for item in early:
                if self.done:
                    break
                self.on_message(*item)

    def confirm(self, key_bytes: bytes):
        self.key_hash = _digest(key_bytes)
        self.send(BROADCAST, Kind.KEYCONFIRM, self.key_hash)
        self._maybe_confirmed()

    def _maybe_confirmed(self):
        if self.key_hash is None or len(self._confirms) < self.n - 1:
            return
        bad = sorted(j for j, h in self._confirms.items() if h != self.key_hash)
        if bad:
            self.finish(False, f"KEYCONFIRM mismatch with parties {bad}")
        else:
            self.finish(True)

    # -- hooks --

    def on_ready(self):
        raise NotImplementedError

    def on_message(self, sender: int, kind: Kind, body: bytes):
        raise ProtocolError(f"unexpected {kind.name} from party {sender}")


INFINITE_SPREAD = 9
SETUP_TRIES = 1000


def _sample(G, rng):
    """Uniform in a finite group; exponents in ``[-9, 9]`` on infinite ones."""
    if G.is_finite:
        return random_element(G, rng)
    return G.element([rng.randint(-INFINITE_SPREAD, INFINITE_SPREAD) for _ in range(G.ngens)])


def _public_rng(config: SessionConfig):
    return _derive_rng(config.seed, "public", config.protocol, config.group)


class MkepParty(Party):
    def __init__(self, index, config):
        super().__init__(index, config)
        self.G = resolve(self.label, config.catalog_dir)
        rng = _public_rng(config)
        n = self.n - 1
        self._setup_error = ""
        for _ in range(SETUP_TRIES):
            self.x, self.g = _sample(self.G, rng), _sample(self.G, rng)
            base = engel_commutator(self.x, self.g, n)
            if not base.is_identity():
                break
        else:
            # e.g. a group of class <= n: every [x,_n g] is trivial
            self._setup_error = f"no nondegenerate (x, g) with [x,_{n} g] != 1 in {self.label}"
            self.secret = 1
            self._pubs = {}
            return
        order = element_order(base)
        bound = config.params.get("bound") or (element_order(self.g) if self.G.is_finite else 2**32)
        while True:
            a = self.rng.randrange(1, bound)
            # a unit modulo the key order keeps the product of secrets from annihilating the key
            if order == INFINITY or _coprime(a, order):
                break
        self.secret = a
        self._pubs: dict = {}

    def start(self):
        super().start()
        if self._setup_error:
            self.abort(f"ProtocolError: {self._setup_error}")

    def on_ready(self):
        self.send(BROADCAST, Kind.PUB, encode_element(self.g ** self.secret))

    def on_message(self, sender, kind, body):
        if kind != Kind.PUB:
            return super().on_message(sender, kind, body)
        self._pubs[sender] = decode_element(body, self.G)
        if len(self._pubs) == self.n - 1:
            others = [self._pubs[j] for j in sorted(self._pubs)]
            key = mkep_user_key(self.x, self.secret, others)
            self.detail["key_trivial"] = str(key.is_identity()).lower()
            self.confirm(encode_element(key))


def _coprime(a: int, b: int) -> bool:
    return math.gcd(a, b) == 1


class SdpParty(Party):
    def __init__(self, index, config):
        super().__init__(index, config)
        self.G = resolve(self.label, config.catalog_dir)
        rng = _public_rng(config)
        self.g = _sample(self.G, rng)
        self.phi = random_automorphism(self.G, rng)
        check_automorphism(self.phi)
        self.secret = self.rng.randrange(1, config.params.get("bound", 2**20))
        self.public = None

    def on_ready(self):
        self.public = sdpkex_public(self.g, self.phi, self.secret)
        self.send(BROADCAST, Kind.PUB, encode_element(self.public))

    def on_message(self, sender, kind, body):
        if kind != Kind.PUB:
            return super().on_message(sender, kind, body)
        peer = decode_element(body, self.G)
        key = sdpkex_key(self.phi, self.secret, self.public, peer)
        self.confirm(encode_element(key))


class Eke2Party(Party):
    def __init__(self, index, config):
        super().__init__(index, config)
        self.G = resolve(self.label, config.catalog_dir)
        self.secret = _sample(self.G, self.rng)

    def on_ready(self):
        self.send(BROADCAST, Kind.PUB, encode_element(self.secret * self.secret))

    def on_message(self, sender, kind, body):
        if kind != Kind.PUB:
            return super().on_message(sender, kind, body)
        peer_square = decode_element(body, self.G)
        key = self.secret * peer_square * self.secret
        self.confirm(encode_element(key))


class Sig4Party(Party):
    """Party 0 signs; party 1 verifies.  ``y`` is shared between them, ``x`` is the signer's."""

    def __init__(self, index, config):
        super().__init__(index, config)
        self.G = resolve(self.label, config.catalog_dir)
        self.y = _sample(self.G, _public_rng(config))
        self.x = _sample(self.G, self.rng) if index == 0 else None
        self.tokens_bytes = b""

    def on_ready(self):
        if self.index == 0:
            tokens = engel4_sign(self.x, self.y)
            self.tokens_bytes = encode_elements(tokens)
            self.send(1, Kind.SIG, self.tokens_bytes)
            self.confirm(self.tokens_bytes)

    def on_message(self, sender, kind, body):
        if kind != Kind.SIG or self.index != 1:
            return super().on_message(sender, kind, body)
        tokens = decode_elements(body, self.G)
        verdict = engel4_verify(self.y, tokens)
        self.detail["verdict"] = "accept" if verdict else "reject"
        self.confirm(body if verdict else b"reject")


class ShareParty(Party):
    """Party 0 deals; parties 1..n decode their words and pool the columns."""

    def __init__(self, index, config):
        super().__init__(index, config)
        p = config.params
        self.scheme = config.protocol
        self.participants = self.n - 1
        self.groups_labels = p.get("groups") or [self.label]
        self.k = p.get("k", 16)
        self.t = p.get("t", 3)
        self.prime = p.get("prime", 2**31 - 1)
        self.word_options = {kk: p[kk] for kk in ("factors", "conjugator_length", "noise_length") if kk in p}
        self._pool: dict = {}
        self.secret_bytes = None

    def _secret_to_bytes(self, secret) -> bytes:
        if self.scheme == "sss1":
            return _pack_bits(secret)
        return encode_int(secret)

    def on_ready(self):
        if self.index != 0:
            return
        groups = [resolve(lbl, self.config.catalog_dir) for lbl in self.groups_labels]
        if self.scheme == "sss1":
            secret = ShareColumn.random(self.k, self.rng)
            packages = sss1_deal(secret, self.participants, groups, self.rng, **self.word_options)
        else:
            secret = self.rng.randrange(self.prime)
            packages = sss2_deal(secret, self.t, self.participants, self.prime, groups, self.rng,
                                 **self.word_options)
        self.detail["secret"] = self._secret_to_bytes(secret).hex()
        for pkg in packages:
            text = emit_presentation(pkg.group).encode("utf-8")
            body = bytearray([_PACKAGE])
            body += struct.pack(">H", pkg.point or 0)
            body += struct.pack(">I", len(text)) + text
            body += struct.pack(">H", len(pkg.words))
            for w in pkg.words:
                body += _encode_word(w)
            self.send(pkg.index, Kind.SHARE, bytes(body))
        self.confirm(self._secret_to_bytes(secret))

    def on_message(self, sender, kind, body):
        if kind != Kind.SHARE or self.index == 0:
            return super().on_message(sender, kind, body)
        cur = Cursor(body)
        tag = cur.take(1)[0]
        if tag == _PACKAGE:
            if sender != 0:
                raise ProtocolError("only the dealer sends packages")
            point = cur.u16()
            (length,) = struct.unpack(">I", cur.take(4))
            group = parse_presentation(cur.take(length).decode("utf-8"))
            words = [_read_word(cur, group.ngens) for _ in range(cur.u16())]
            col = decode_package(SharePackage(self.index, group, words, point or None))
            self._pool[self.index] = (point, col)
            for j in range(1, self.n):
                if j != self.index:
                    if self.scheme == "sss1":
                        self.send(j, Kind.SHARE, bytes([_COLUMN]) + _pack_bits(col))
                    else:
                        self.send(j, Kind.SHARE, bytes([_VALUE]) + struct.pack(">H", point)
                                  + encode_int(col.to_int()))
        elif tag == _COLUMN:
            self._pool[sender] = (None, _unpack_bits(cur))
        elif tag == _VALUE:
            point = cur.u16()
            self._pool[sender] = (point, read_int(cur))
        else:
            raise ProtocolError(f"unknown share tag {tag}")
        if len(self._pool) == self.participants:
            self._reconstruct()

    def _reconstruct(self):
        if self.scheme == "sss1":
            secret = sss1_reconstruct([self._pool[j][1] for j in sorted(self._pool)], self.participants)
        else:
            pts = []
            for j in sorted(self._pool):
                point, val = self._pool[j]
                pts.append((point, val.to_int() if isinstance(val, ShareColumn) else val))
            secret = sss2_reconstruct(pts[: self.t], self.t, self.prime)
        self.confirm(self._secret_to_bytes(secret))


PARTY_TYPES = {
    "mkep": MkepParty,
    "sdpkex": SdpParty,
    "eke2": Eke2Party,
    "sig4": Sig4Party,
    "sss1": ShareParty,
    "sss2": ShareParty,
}


def make_parties(config: SessionConfig) -> list:
    cls = PARTY_TYPES[config.protocol]
    return [cls(j, config) for j in range(config.parties)]


def _outcome(config: SessionConfig, parties) -> SessionOutcome:
    for p in parties:
        if not p.done:
            p.abort("session ended before the protocol completed")
    return SessionOutcome(
        protocol=config.protocol,
        ok=all(p.ok for p in parties),
        reasons=[p.reason for p in parties],
        key_hashes=[p.key_hash.hex() if p.key_hash else None for p in parties],
        details=[p.detail for p in parties],
        transcript=b"".join(b"".join(p.sent) for p in parties),
    )


# ---------------------------------------------------------------------------
# transports


def _route(frame: bytes, n: int):
    """Recipients of an enveloped frame (header is 5 bytes, envelope follows)."""
    sender, recipient = frame[5], frame[6]
    if recipient == BROADCAST:
        return [j for j in range(n) if j != sender]
    return [recipient] if recipient < n else []


def run_in_process(config: SessionConfig) -> SessionOutcome:
    """Deterministic single-threaded delivery through a FIFO queue."""
    parties = make_parties(config)
    queue: deque = deque()
    for p in parties:
        p.start()
    while True:
        for p in parties:
            while p.outbox:
                queue.append(p.outbox.popleft())
        if not queue:
            break
        frame = queue.popleft()
        kind = Kind(frame[4])
        for j in _route(frame, config.parties):
            parties[j].receive(kind, frame[5:])
    return _outcome(config, parties)


def _recv_into(sock: socket.socket, reader: FrameReader) -> list | None:
    chunk = sock.recv(65536)
    if not chunk:
        return None
    return reader.feed(chunk)


def run_stream(config: SessionConfig, host: str = "127.0.0.1", port: int = 0,
               timeout: float = 60.0) -> SessionOutcome:
    """Every party gets its own thread and TCP connection to a relaying hub."""
    parties = make_parties(config)
    n = config.parties
    server = socket.create_server((host, port))
    server.settimeout(timeout)
    address = server.getsockname()
    errors: list = []

    def party_main(party: Party):
        try:
            with socket.create_connection(address, timeout=timeout) as sock:
                sock.sendall(struct.pack(">B", party.index))
                party.start()
                reader = FrameReader()
                while True:
                    while party.outbox:
                        sock.sendall(party.outbox.popleft())
                    if party.done:
                        break
                    frames = _recv_into(sock, reader)
                    if frames is None:
                        break
                    for kind, payload in frames:
                        party.receive(kind, payload)
                sock.shutdown(socket.SHUT_WR)
        except OSError as exc:
            errors.append(exc)
            party.abort(f"transport failure: {exc}")

    threads = [threading.Thread(target=party_main, args=(p,), daemon=True) for p in parties]
    for t in threads:
        t.start()

    conns: dict = {}
    try:
        while len(conns) < n:
            conn, _ = server.accept()
            conn.settimeout(timeout)
            idx = conn.recv(1)
            if not idx or idx[0] >= n or idx[0] in conns:
                conn.close()
                raise ProtocolError("bad party registration on the hub")
            conns[idx[0]] = conn
    except (OSError, ProtocolError) as exc:
        errors.append(exc)
    finally:
        server.close()

    locks = {j: threading.Lock() for j in conns}

    def relay(j: int, conn: socket.socket):
        reader = FrameReader()
        try:
            while True:
                frames = _recv_into(conn, reader)
                if frames is None:
                    return
                for kind, payload in frames:
                    frame = encode_frame(kind, payload)
                    for r in _route(frame, n):
                        if r in conns:
                            with locks[r]:
                                try:
                                    conns[r].sendall(frame)
                                except OSError:
                                    pass
        except (OSError, WireError) as exc:
            errors.append(exc)

    relays = [threading.Thread(target=relay, args=(j, c), daemon=True) for j, c in conns.items()]
    for t in relays:
        t.start()
    for t in threads:
        t.join(timeout)
    for c in conns.values():
        try:
            c.close()
        except OSError:
            pass
    for t in relays:
        t.join(1.0)
    return _outcome(config, parties)


def session_run(config: SessionConfig, transport: str = "inprocess", address: str | None = None) -> SessionOutcome:
    if transport == "inprocess":
        return run_in_process(config)
    if transport == "stream":
        host, port = "127.0.0.1", 0
        if address:
            host, _, p = address.rpartition(":")
            port = int(p)
        return run_stream(config, host or "127.0.0.1", port)
    raise ValueError(f"unknown transport {transport!r}")
