"""Wire primitives: varints, fixed-width integers, and bounded reads."""

from __future__ import annotations

import random

import pytest

from driftcert.errors import WireFormatError
from driftcert.wire import (Reader, write_bytes, write_scalar, write_u8,
                            write_u32, write_u64, write_varint)


def test_varint_round_trip():
    values = [0, 1, 127, 128, 300, 16383, 16384, 2**32, 2**60]
    rng = random.Random(2001)
    values += [rng.randrange(2**62) for _ in range(200)]
    for v in values:
        r = Reader(write_varint(v))
        assert r.varint() == v
        r.expect_end()


def test_varint_encoding_is_minimal_prefix():
    # one byte below 128, two bytes below 2^14
    assert len(write_varint(127)) == 1
    assert len(write_varint(128)) == 2
    assert len(write_varint(16383)) == 2
    assert len(write_varint(16384)) == 3


def test_fixed_width_round_trip():
    r = Reader(write_u8(7) + write_u32(70000) + write_u64(2**40))
    assert r.u8() == 7
    assert r.u32() == 70000
    assert r.u64() == 2**40
    r.expect_end()


def test_scalar_round_trip():
    rng = random.Random(2002)
    for _ in range(100):
        v = rng.randrange(2**255)
        r = Reader(write_scalar(v))
        assert r.scalar() == v
        r.expect_end()
    assert len(write_scalar(0)) == 32


def test_length_prefixed_bytes():
    for payload in (b"", b"x", bytes(1000)):
        r = Reader(write_bytes(payload))
        assert r.bytes_() == payload
        r.expect_end()


def test_reader_bounds():
    r = Reader(b"\x01\x02")
    r.take(2)
    with pytest.raises(WireFormatError):
        r.take(1)
    with pytest.raises(WireFormatError):
        Reader(b"\x01").u32()
    with pytest.raises(WireFormatError):
        Reader(write_bytes(b"abc")[:-1]).bytes_()


def test_expect_end_rejects_trailing_bytes():
    r = Reader(b"\x00\xff")
    r.u8()
    with pytest.raises(WireFormatError):
        r.expect_end()
    assert r.remaining() == 1


def test_truncated_varint():
    data = write_varint(2**40)
    with pytest.raises(WireFormatError):
        Reader(data[:-1]).varint()
