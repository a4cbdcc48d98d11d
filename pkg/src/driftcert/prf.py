"""Deterministic PRF streams over SHA-256 in counter mode.

A stream is keyed by a 32-byte seed and an ASCII domain string.  Block i of
the stream is ``SHA256(tag || seed || domain || i)``; everything an element
needs is derived from blocks at positions that depend only on the element
index, so ``element(i)`` computed in isolation equals element i of the full
stream (the seekability contract the protocols rely on).

Streams feed three consumers: Rademacher projection vectors (one sign per
stream bit), uniform field scalars (64 bytes wide-reduced per scalar), and
synthetic weight generation (uniform floats).
"""

from __future__ import annotations

import hashlib

import numpy as np

from .field import PrimeField

_TAG = b"driftcert-prf-v1"


class PrfStream:
    """Counter-mode SHA-256 stream with seekable derived sequences."""

    __slots__ = ("seed", "domain", "_prefix")

    def __init__(self, seed: bytes, domain: str):
        if len(seed) != 32:
            raise ValueError(f"PRF seed must be 32 bytes, got {len(seed)}")
        d = domain.encode("ascii")
        self.seed = seed
        self.domain = domain
        self._prefix = _TAG + seed + len(d).to_bytes(2, "little") + d

    def block(self, index: int) -> bytes:
        return hashlib.sha256(self._prefix + index.to_bytes(8, "little")).digest()

    def blocks(self, start: int, count: int) -> bytes:
        out = bytearray()
        prefix = self._prefix
        for i in range(start, start + count):
            out.extend(hashlib.sha256(prefix + i.to_bytes(8, "little")).digest())
        return bytes(out)

    # -- derived sequences ---------------------------------------------------

    def rademacher(self, n: int, offset: int = 0) -> np.ndarray:
        """Elements offset..offset+n-1 of the +-1 sequence, as int8.

        Sign i is bit (i mod 256) of block (i // 256), little-endian within
        the block, so any window of the sequence is reproducible alone.
        """
        first = offset // 256
        last = (offset + n - 1) // 256
        raw = np.frombuffer(self.blocks(first, last - first + 1), dtype=np.uint8)
        bits = np.unpackbits(raw, bitorder="little")
        window = bits[offset - first * 256: offset - first * 256 + n]
        return (window.astype(np.int8) << 1) - 1

    def scalar(self, index: int, field: PrimeField) -> int:
        """Uniform field element i: blocks 2i, 2i+1 wide-reduced mod q."""
        wide = self.block(2 * index) + self.block(2 * index + 1)
        return int.from_bytes(wide, "little") % field.q

    def scalars(self, n: int, field: PrimeField, offset: int = 0) -> list[int]:
        raw = self.blocks(2 * offset, 2 * n)
        q = field.q
        return [
            int.from_bytes(raw[64 * i: 64 * i + 64], "little") % q
            for i in range(n)
        ]

    def uniform(self, n: int, offset: int = 0) -> np.ndarray:
        """Uniform float64 samples in [0, 1), 4 per block, seekable."""
        first = offset // 4
        last = (offset + n - 1) // 4
        raw = np.frombuffer(self.blocks(first, last - first + 1), dtype="<u8")
        window = raw[offset - first * 4: offset - first * 4 + n]
        return window.astype(np.float64) * 2.0**-64

    def gaussian(self, n: int, offset: int = 0) -> np.ndarray:
        """Standard normals via Box-Muller on disjoint uniform pairs.

        Element i consumes uniforms (2i, 2i+1), so windows stay seekable.
        """
        u = self.uniform(2 * n, offset=2 * offset)
        u1 = np.clip(u[0::2], 2.0**-64, None)
        u2 = u[1::2]
        return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)

    def child_seed(self, label: str) -> bytes:
        """A fresh 32-byte seed bound to this stream and ``label``."""
        d = label.encode("ascii")
        return hashlib.sha256(self._prefix + b"child" + d).digest()


def derive_seed(*parts: bytes) -> bytes:
    """One 32-byte seed from an ordered list of byte strings."""
    h = hashlib.sha256(_TAG + b"derive")
    for p in parts:
        h.update(len(p).to_bytes(8, "little"))
        h.update(p)
    return h.digest()
