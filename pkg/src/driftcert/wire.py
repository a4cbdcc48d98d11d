"""Byte-level serialization helpers.

Conventions shared by every format in the package:

- integers are little-endian, fixed width where a size law depends on them;
- variable-length non-negative integers use LEB128 (7 bits per byte,
  continuation bit 0x80);
- field scalars are 32-byte little-endian, reduced representatives;
- lists are a varint count followed by the items.

Readers raise ``WireFormatError`` on truncation or non-canonical input;
verify paths catch it and treat the artifact as rejected.
"""

from __future__ import annotations

import struct

from .errors import WireFormatError

SCALAR_BYTES = 32


def write_varint(value: int) -> bytes:
    if value < 0:
        raise WireFormatError("varint cannot encode negatives")
    out = bytearray()
    while True:
        byte = value & 0x7F
        value >>= 7
        if value:
            out.append(byte | 0x80)
        else:
            out.append(byte)
            return bytes(out)


def write_u8(value: int) -> bytes:
    return struct.pack("<B", value)


def write_u32(value: int) -> bytes:
    return struct.pack("<I", value)


def write_u64(value: int) -> bytes:
    return struct.pack("<Q", value)


def write_scalar(value: int) -> bytes:
    """32-byte little-endian scalar; caller guarantees 0 <= value < 2^256."""
    return value.to_bytes(SCALAR_BYTES, "little")


def write_bytes(data: bytes) -> bytes:
    return write_varint(len(data)) + data


class Reader:
    """Cursor over a byte string with hard truncation checks."""

    __slots__ = ("data", "pos")

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if n < 0 or self.pos + n > len(self.data):
            raise WireFormatError(
                f"truncated: need {n} bytes at offset {self.pos} of {len(self.data)}"
            )
        out = self.data[self.pos:self.pos + n]
        self.pos += n
        return out

    def varint(self) -> int:
        shift = 0
        value = 0
        while True:
            byte = self.take(1)[0]
            value |= (byte & 0x7F) << shift
            if not byte & 0x80:
                if byte == 0 and shift > 0:
                    raise WireFormatError("non-canonical varint padding")
                return value
            shift += 7
            if shift > 63:
                raise WireFormatError("varint too long")

    def u8(self) -> int:
        return self.take(1)[0]

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]

    def u64(self) -> int:
        return struct.unpack("<Q", self.take(8))[0]

    def scalar(self) -> int:
        return int.from_bytes(self.take(SCALAR_BYTES), "little")

    def bytes_(self) -> bytes:
        return self.take(self.varint())

    def expect_end(self) -> None:
        if self.pos != len(self.data):
            raise WireFormatError(
                f"{len(self.data) - self.pos} trailing bytes after structure"
            )

    def remaining(self) -> int:
        return len(self.data) - self.pos
