import random
import struct

import pytest

from engelkit import catalog
from engelkit.errors import PresentationError, WireError
from engelkit.pc import PcPresentation, enumerate_elements, random_element
from engelkit.wire import (
    MAX_FRAME,
    FrameReader,
    Kind,
    decode_element,
    decode_elements,
    decode_frame,
    decode_strings,
    emit_presentation,
    encode_element,
    encode_elements,
    encode_frame,
    encode_int,
    encode_strings,
    parse_presentation,
)


def test_frame_layout():
    frame = encode_frame(Kind.PUB, b"abc")
    assert frame == b"\x00\x00\x00\x04\x02abc"
    assert decode_frame(frame) == (Kind.PUB, b"abc")
    assert decode_frame(encode_frame(Kind.HELLO, b"")) == (Kind.HELLO, b"")


def test_frame_reader_handles_arbitrary_chunking():
    rng = random.Random(1)
    frames = [(Kind(rng.randint(1, 5)), rng.randbytes(rng.randrange(0, 300))) for _ in range(50)]
    stream = b"".join(encode_frame(k, p) for k, p in frames)
    reader = FrameReader()
    got, pos = [], 0
    while pos < len(stream):
        step = rng.randint(1, 40)
        got += reader.feed(stream[pos:pos + step])
        pos += step
    assert got == frames and reader.pending() == 0


def test_frame_errors():
    with pytest.raises(WireError):
        decode_frame(encode_frame(Kind.PUB, b"abc")[:-1])
    with pytest.raises(WireError):
        decode_frame(b"\x00\x00\x00\x01\x09")
    with pytest.raises(WireError):
        decode_frame(b"\x00\x00\x00\x00")
    with pytest.raises(WireError):
        FrameReader().feed(struct.pack(">IB", MAX_FRAME + 1, 2))
    with pytest.raises(WireError):
        encode_frame(Kind.PUB, bytes(MAX_FRAME))
    assert len(encode_frame(Kind.PUB, bytes(MAX_FRAME - 1))) == MAX_FRAME + 4


def test_identity_encoding(groups):
    p = groups("heisenberg")
    assert encode_element(p.identity()) == b"\x00\x03" + b"\x00\x00\x00" * 3


def test_int_encoding_is_canonical():
    assert encode_int(0) == b"\x00\x00\x00"
    assert encode_int(255) == b"\x00\x00\x01\xff"
    assert encode_int(-256) == b"\x01\x00\x02\x01\x00"


@pytest.mark.parametrize("bad", [
    b"\x00\x01\x00\x00\x01\x00",       # leading zero byte in the magnitude
    b"\x00\x01\x01\x00\x00",           # negative zero
    b"\x00\x01\x02\x00\x01\x05",       # sign byte 0x02
    b"\x00\x01\x00\x00\x02\x05",       # truncated magnitude
    b"\x00\x01\x00\x00\x00\xff",       # trailing byte
    b"\x00\x02\x00\x00\x00",           # too few exponents
])
def test_decode_rejects_malformed(bad):
    p = PcPresentation([None])
    with pytest.raises(WireError):
        decode_element(bad, p)


def test_decode_checks_the_presentation(groups):
    b = groups("burnside3:2")
    with pytest.raises(WireError):
        decode_element(encode_element(groups("freenil:2:3").identity()), b)
    # exponent 3 is outside the relative order 3
    with pytest.raises(WireError):
        decode_element(b"\x00\x03" + b"\x00\x00\x01\x03" + b"\x00\x00\x00" * 2, b)


@pytest.mark.parametrize("name", list(catalog.CATALOG_NAMES) + ["heisenberg", "freenil:3:3"])
def test_element_round_trip(groups, name):
    p = groups(name)
    rng = random.Random(2)
    for _ in range(10_000):
        if p.is_finite:
            x = random_element(p, rng)
        else:
            x = p.element([rng.randint(-10**20, 10**20) for _ in range(p.ngens)])
        data = encode_element(x)
        assert decode_element(data, p) == x
        assert encode_element(p.element(x.exps)) == data


def test_element_and_string_lists(groups):
    p = groups("burnside3:3")
    xs = [random_element(p, random.Random(k)) for k in range(7)]
    assert decode_elements(encode_elements(xs), p) == xs
    assert decode_elements(encode_elements([]), p) == []
    with pytest.raises(WireError):
        decode_elements(encode_elements(xs) + b"\x00", p)
    assert decode_strings(encode_strings(["mkep", "", "grüße"])) == ["mkep", "", "grüße"]


# -- presentation documents ---------------------------------------------------------


def test_burnside_reparse_matches_cayley_table(groups):
    b = groups("burnside3:2")
    text = emit_presentation(b)
    q = parse_presentation(text)
    assert emit_presentation(q) == text
    els = list(enumerate_elements(b))
    for x in els:
        for y in els:
            assert (x * y).exps == (q.element(x.exps) * q.element(y.exps)).exps


@pytest.mark.parametrize("name", list(catalog.CATALOG_NAMES) + ["heisenberg"])
def test_emit_parse_emit_is_stable(groups, name):
    text = emit_presentation(groups(name))
    assert emit_presentation(parse_presentation(text, check_triples=50)) == text


def test_descending_tail_rejected():
    doc = '{"ngens": 2, "orders": [3, 3], "conjugates": {"2^1": "g2^1 g1^1"}}'
    with pytest.raises(PresentationError):
        parse_presentation(doc)


def test_free_abelian_document():
    p = parse_presentation('{"ngens": 3, "orders": [0, 0, 0]}')
    x, y = p.gen(0), p.gen(2)
    assert x * y == y * x and not p.is_finite
    for i in range(3):
        for j in range(i + 1, 3):
            assert p.conjugate_image(j, i) == p._unit(j)


def test_trivial_group_document():
    p = parse_presentation('{"ngens": 0, "orders": []}')
    assert p.order() == 1
    assert decode_element(b"\x00\x00", p).is_identity()


@pytest.mark.parametrize("doc", [
    "not json",
    "[1, 2]",
    '{"orders": []}',
    '{"ngens": 2, "orders": [3]}',
    '{"ngens": 1, "orders": [1]}',
    '{"ngens": true, "orders": [3]}',
    '{"ngens": 1, "orders": [3], "powers": {"2": "g1"}}',
    '{"ngens": 2, "orders": [3, 3], "conjugates": {"2": "g2"}}',
    '{"ngens": 2, "orders": [2, 5], "conjugates": {"2^1": "g2^2"}}',
])
def test_malformed_documents(doc):
    with pytest.raises(PresentationError):
        parse_presentation(doc)
