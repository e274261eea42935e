"""Byte formats: frames, canonical element encoding and the presentation text format.

Frame::

    +----------------+------+-----------------+
    | length (u32 BE)| kind | payload         |
    +----------------+------+-----------------+

``length`` counts the kind byte plus the payload and is capped at 16 MiB.

Element::

    ngens (u16 BE) then, per exponent: sign (0x00 / 0x01), magnitude length
    (u16 BE), magnitude (big-endian, no leading zero bytes; zero is empty
    and always has sign 0x00).
"""

from __future__ import annotations

import enum
import json
import struct

from engelkit.errors import PresentationError, WireError
from engelkit.pc import GroupElement, PcPresentation, format_normal_word, parse_normal_word

MAX_FRAME = 16 * 1024 * 1024
HEADER = struct.Struct(">IB")


class Kind(enum.IntEnum):
    HELLO = 1
    PUB = 2
    SHARE = 3
    SIG = 4
    KEYCONFIRM = 5


# -- frames -------------------------------------------------------------------


def encode_frame(kind: int, payload: bytes) -> bytes:
    length = len(payload) + 1
    if length > MAX_FRAME:
        raise WireError(f"frame of {length} bytes exceeds the 16 MiB limit")
    return HEADER.pack(length, int(kind)) + payload


def decode_frame(data: bytes) -> tuple:
    """Parse exactly one frame; returns ``(kind, payload)``."""
    reader = FrameReader()
    frames = reader.feed(data)
    if len(frames) != 1 or reader.pending():
        raise WireError("expected exactly one complete frame")
    return frames[0]


class FrameReader:
    """Incremental frame parser: feed arbitrary chunks, get whole frames back."""

    def __init__(self):
        self._buf = bytearray()

    def feed(self, chunk: bytes) -> list:
        self._buf.extend(chunk)
        frames = []
        while len(self._buf) >= 4:
            (length,) = struct.unpack_from(">I", self._buf)
            if length < 1:
                raise WireError("frame length must cover the kind byte")
            if length > MAX_FRAME:
                raise WireError(f"frame length {length} exceeds the 16 MiB limit")
            if len(self._buf) < 4 + length:
                break
            kind = self._buf[4]
            try:
                kind = Kind(kind)
            except ValueError:
                raise WireError(f"unknown message kind {kind}") from None
            frames.append((kind, bytes(self._buf[5:4 + length])))
            del self._buf[:4 + length]
        return frames

    def pending(self) -> int:
        return len(self._buf)


# -- elements -----------------------------------------------------------------


def encode_int(v: int) -> bytes:
    mag = abs(v)
    raw = mag.to_bytes((mag.bit_length() + 7) // 8, "big")
    if len(raw) > 0xFFFF:
        raise WireError("exponent too large to encode")
    return bytes([1 if v < 0 else 0]) + struct.pack(">H", len(raw)) + raw


def encode_exponents(exps) -> bytes:
    if len(exps) > 0xFFFF:
        raise WireError("too many generators to encode")
    return struct.pack(">H", len(exps)) + b"".join(encode_int(e) for e in exps)


def encode_element(x: GroupElement) -> bytes:
    return encode_exponents(x.exps)


class Cursor:
    def __init__(self, data: bytes, pos: int = 0):
        self.data = data
        self.pos = pos

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise WireError("truncated input")
        out = self.data[self.pos:self.pos + n]
        self.pos += n
        return out

    def u16(self) -> int:
        return struct.unpack(">H", self.take(2))[0]

    def done(self) -> bool:
        return self.pos == len(self.data)


def read_int(cur: Cursor) -> int:
    sign = cur.take(1)[0]
    if sign not in (0, 1):
        raise WireError(f"sign byte must be 0x00 or 0x01, got {sign:#04x}")
    raw = cur.take(cur.u16())
    if raw[:1] == b"\x00":
        raise WireError("non-canonical magnitude (leading zero byte)")
    mag = int.from_bytes(raw, "big")
    if sign and not mag:
        raise WireError("non-canonical negative zero")
    return -mag if sign else mag


def _read_exponents(cur: Cursor) -> tuple:
    return tuple(read_int(cur) for _ in range(cur.u16()))


def read_element(data: bytes, pos: int, p: PcPresentation) -> tuple:
    """Decode one element starting at ``pos``; returns ``(element, next_pos)``."""
    cur = Cursor(data, pos)
    exps = _read_exponents(cur)
    return _to_element(exps, p), cur.pos


def _to_element(exps: tuple, p: PcPresentation) -> GroupElement:
    if len(exps) != p.ngens:
        raise WireError(f"element has {len(exps)} exponents, presentation has {p.ngens}")
    for e, r in zip(exps, p.relative_orders):
        if r is not None and not 0 <= e < r:
            raise WireError("exponent outside its relative order (not a normal form)")
    return GroupElement(p, exps)


def decode_element(data: bytes, p: PcPresentation) -> GroupElement:
    elem, pos = read_element(data, 0, p)
    if pos != len(data):
        raise WireError("trailing bytes after element")
    return elem


def encode_elements(xs) -> bytes:
    xs = list(xs)
    return struct.pack(">H", len(xs)) + b"".join(encode_element(x) for x in xs)


def decode_elements(data: bytes, p: PcPresentation) -> list:
    cur = Cursor(data)
    out = []
    for _ in range(cur.u16()):
        elem, cur.pos = read_element(data, cur.pos, p)
        out.append(elem)
    if not cur.done():
        raise WireError("trailing bytes after element list")
    return out


def encode_strings(items) -> bytes:
    out = bytearray(struct.pack(">H", len(items)))
    for s in items:
        raw = s.encode("utf-8")
        out += struct.pack(">H", len(raw)) + raw
    return bytes(out)


def decode_strings(data: bytes) -> list:
    cur = Cursor(data)
    out = [cur.take(cur.u16()).decode("utf-8") for _ in range(cur.u16())]
    if not cur.done():
        raise WireError("trailing bytes after string list")
    return out


# -- presentation text format -------------------------------------------------


def emit_presentation(p: PcPresentation) -> str:
    """JSON document with ``ngens``, ``orders`` (0 = infinite), ``powers``, ``conjugates``, ``label``."""
    powers = {}
    for i, r in enumerate(p.relative_orders):
        tail = p.power_tail(i)
        if r is not None and any(tail):
            powers[str(i + 1)] = format_normal_word(tail)
    conjugates = {}
    for i in range(p.ngens):
        for j in range(i + 1, p.ngens):
            img = p.conjugate_image(j, i)
            if img != p._unit(j):
                conjugates[f"{j + 1}^{i + 1}"] = format_normal_word(img)
    doc = {
        "ngens": p.ngens,
        "orders": [r or 0 for r in p.relative_orders],
        "powers": powers,
        "conjugates": conjugates,
        "label": p.label,
    }
    if p.weights is not None:
        doc["weights"] = list(p.weights)
    defs = getattr(p, "definitions", None)
    if defs:
        doc["definitions"] = {str(k + 1): [d[0], d[1] + 1, d[2] + 1 if d[0] == "comm" else d[2]]
                              for k, d in sorted(defs.items())}
    return json.dumps(doc, indent=2) + "\n"


def parse_presentation(text: str, check_triples: int = 1000) -> PcPresentation:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PresentationError(f"not a presentation document: {exc}") from None
    if not isinstance(doc, dict):
        raise PresentationError("presentation document must be an object")
    missing = {"ngens", "orders"} - set(doc)
    if missing:
        raise PresentationError(f"missing fields: {sorted(missing)}")
    n = doc["ngens"]
    orders = doc["orders"]
    if not isinstance(n, int) or n < 0 or isinstance(n, bool) or not isinstance(orders, list) or len(orders) != n:
        raise PresentationError("ngens must be a nonnegative integer matching the length of orders")
    if any(not isinstance(r, int) or r < 0 or r == 1 for r in orders):
        raise PresentationError("orders must be 0 (infinite) or integers >= 2")
    powers = {}
    for key, word in (doc.get("powers") or {}).items():
        i = _index(key, n)
        powers[i] = parse_normal_word(word, n)
    conjugates = {}
    for key, word in (doc.get("conjugates") or {}).items():
        parts = key.split("^")
        if len(parts) != 2:
            raise PresentationError(f"conjugate key {key!r} must look like 'j^i'")
        j, i = _index(parts[0], n), _index(parts[1], n)
        conjugates[j, i] = parse_normal_word(word, n)
    weights = doc.get("weights")
    p = PcPresentation(
        [r or None for r in orders],
        powers=powers,
        conjugates=conjugates,
        label=str(doc.get("label", "")),
        weights=weights,
        check_triples=check_triples,
    )
    defs = {}
    for key, d in (doc.get("definitions") or {}).items():
        k = _index(key, n)
        if d[0] == "comm":
            defs[k] = ("comm", _index(d[1], n), _index(d[2], n))
        elif d[0] == "pow":
            defs[k] = ("pow", _index(d[1], n), int(d[2]))
        else:
            raise PresentationError(f"unknown definition kind {d[0]!r}")
    p.definitions = defs
    return p


def _index(key, n: int) -> int:
    try:
        k = int(key)
    except (TypeError, ValueError):
        raise PresentationError(f"bad generator index {key!r}") from None
    if not 1 <= k <= n:
        raise PresentationError(f"generator index {k} out of range")
    return k - 1
