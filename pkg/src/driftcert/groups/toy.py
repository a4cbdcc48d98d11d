"""Exponent-transparent group backend for tests and benches.

A "point" is its own discrete log: the element a*G is stored as the integer
a mod q, group addition is field addition, and the pairing of a*G1 and b*G2
is a*b in the exponent of GT.  All protocol algebra (homomorphisms, folding
arguments, pairing-product equations) behaves exactly as on a real group;
what is missing is hardness, so nothing produced on this backend is secure.

The default modulus is the BLS12-381 scalar field, so encodings, parameter
derivations, and serialized scalar widths agree with the real backend.
Small moduli (q = 17) support exhaustive protocol oracles.
"""

from __future__ import annotations

import hashlib
from typing import Sequence

from ..errors import WireFormatError
from ..field import BLS12381_SCALAR_MODULUS, field_by_modulus
from .base import GroupBackend

_HASH_TAG = b"driftcert-toygroup-v1"


class ToyBackend(GroupBackend):

    name = "toy"
    has_pairing = True
    element_bytes = 32
    g2_element_bytes = 32

    _default: "ToyBackend | None" = None

    def __init__(self, modulus: int = BLS12381_SCALAR_MODULUS):
        self.field = field_by_modulus(modulus)
        if modulus != BLS12381_SCALAR_MODULUS:
            self.name = f"toy:{modulus}"
        self._gen_cache: dict[tuple[str, int], int] = {}

    @classmethod
    def instance(cls) -> "ToyBackend":
        if cls._default is None:
            cls._default = cls()
        return cls._default

    # -- G1 ------------------------------------------------------------------

    def identity(self) -> int:
        return 0

    def generator(self) -> int:
        return 1

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.field.q

    def neg(self, a: int) -> int:
        return -a % self.field.q

    def mul(self, p: int, k: int) -> int:
        return p * k % self.field.q

    def eq(self, a: int, b: int) -> bool:
        return (a - b) % self.field.q == 0

    def msm(self, points: Sequence[int], scalars: Sequence[int]) -> int:
        if len(points) != len(scalars):
            raise ValueError("msm length mismatch")
        return sum(p * k for p, k in zip(points, scalars) if k) % self.field.q

    def serialize(self, p: int) -> bytes:
        return (p % self.field.q).to_bytes(32, "little")

    def deserialize(self, data: bytes) -> int:
        if len(data) != 32:
            raise WireFormatError(f"toy element must be 32 bytes, got {len(data)}")
        v = int.from_bytes(data, "little")
        if v >= self.field.q:
            raise WireFormatError("toy element not reduced")
        return v

    def hash_to_group(self, label: str, index: int) -> int:
        key = (label, index)
        cached = self._gen_cache.get(key)
        if cached is not None:
            return cached
        tag = label.encode("ascii")
        counter = 0
        while True:
            h = hashlib.sha256(
                _HASH_TAG
                + len(tag).to_bytes(2, "little") + tag
                + index.to_bytes(8, "little")
                + counter.to_bytes(8, "little")
            ).digest()
            v = int.from_bytes(h + self.block2(tag, index, counter), "little") % self.field.q
            if v != 0:
                self._gen_cache[key] = v
                return v
            counter += 1

    def block2(self, tag: bytes, index: int, counter: int) -> bytes:
        return hashlib.sha256(
            _HASH_TAG + b"w"
            + len(tag).to_bytes(2, "little") + tag
            + index.to_bytes(8, "little")
            + counter.to_bytes(8, "little")
        ).digest()

    # -- G2 / pairing ----------------------------------------------------------

    def g2_generator(self) -> int:
        return 1

    def g2_add(self, a: int, b: int) -> int:
        return (a + b) % self.field.q

    def g2_neg(self, a: int) -> int:
        return -a % self.field.q

    def g2_mul(self, p: int, k: int) -> int:
        return p * k % self.field.q

    def g2_eq(self, a: int, b: int) -> bool:
        return (a - b) % self.field.q == 0

    def g2_serialize(self, p: int) -> bytes:
        return self.serialize(p)

    def g2_deserialize(self, data: bytes) -> int:
        return self.deserialize(data)

    def pairing_check(
        self,
        left: Sequence[tuple[int, int]],
        right: Sequence[tuple[int, int]],
    ) -> bool:
        q = self.field.q
        lhs = sum(a * b for a, b in left) % q
        rhs = sum(a * b for a, b in right) % q
        return lhs == rhs
