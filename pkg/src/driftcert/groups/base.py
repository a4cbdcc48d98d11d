"""Group backend interface.

Every protocol is written against this surface: a prime-order group G1 with
scalar field ``field``, NUMS generators via ``hash_to_group``, fixed-width
serialization, and (for the polynomial commitment scheme) a companion group
G2 plus a pairing-product check.

Two implementations ship:

- ``bls12-381``: the real curve, implemented from first principles.
- ``toy``: elements are exponents in Z_q and the pairing is a product.
  Algebraically faithful (prime order, bilinear), cryptographically void --
  discrete logs are the identity map.  It exists so protocol-level Monte
  Carlo suites and benches run at field-arithmetic speed, and so small-field
  exhaustive oracles (q = 17) can enumerate whole witness spaces.
"""

from __future__ import annotations

from typing import Any, Iterable, Sequence

from ..field import PrimeField

GENERATOR_LABELS = ("PED/G", "PED/H", "PED/U", "SRS/G")

Element = Any
Element2 = Any


class GroupBackend:
    """Abstract base; concrete backends fill in the element representation."""

    name: str
    field: PrimeField
    element_bytes: int
    g2_element_bytes: int
    has_pairing: bool

    # -- G1 ------------------------------------------------------------------

    def identity(self) -> Element:
        raise NotImplementedError

    def generator(self) -> Element:
        raise NotImplementedError

    def add(self, a: Element, b: Element) -> Element:
        raise NotImplementedError

    def neg(self, a: Element) -> Element:
        raise NotImplementedError

    def sub(self, a: Element, b: Element) -> Element:
        return self.add(a, self.neg(b))

    def mul(self, p: Element, k: int) -> Element:
        raise NotImplementedError

    def eq(self, a: Element, b: Element) -> bool:
        raise NotImplementedError

    def is_identity(self, a: Element) -> bool:
        return self.eq(a, self.identity())

    def msm(self, points: Sequence[Element], scalars: Sequence[int]) -> Element:
        """Sum of scalars[i] * points[i]; zero scalars are skipped."""
        if len(points) != len(scalars):
            raise ValueError("msm length mismatch")
        acc = self.identity()
        for p, k in zip(points, scalars):
            if k:
                acc = self.add(acc, self.mul(p, k))
        return acc

    def sum(self, points: Iterable[Element]) -> Element:
        acc = self.identity()
        for p in points:
            acc = self.add(acc, p)
        return acc

    def serialize(self, p: Element) -> bytes:
        raise NotImplementedError

    def deserialize(self, data: bytes) -> Element:
        raise NotImplementedError

    def hash_to_group(self, label: str, index: int) -> Element:
        """Deterministic non-identity generator; no known scalar relation
        between outputs on the real backend."""
        raise NotImplementedError

    def generators(self, label: str, count: int, start: int = 0) -> list[Element]:
        return [self.hash_to_group(label, start + i) for i in range(count)]

    # -- G2 / pairing (pairing-capable backends only) ------------------------

    def g2_generator(self) -> Element2:
        raise NotImplementedError

    def g2_add(self, a: Element2, b: Element2) -> Element2:
        raise NotImplementedError

    def g2_neg(self, a: Element2) -> Element2:
        raise NotImplementedError

    def g2_mul(self, p: Element2, k: int) -> Element2:
        raise NotImplementedError

    def g2_eq(self, a: Element2, b: Element2) -> bool:
        raise NotImplementedError

    def g2_serialize(self, p: Element2) -> bytes:
        raise NotImplementedError

    def g2_deserialize(self, data: bytes) -> Element2:
        raise NotImplementedError

    def pairing_check(
        self,
        left: Sequence[tuple[Element, Element2]],
        right: Sequence[tuple[Element, Element2]],
    ) -> bool:
        """True iff prod e(a, b) over ``left`` equals the product over ``right``."""
        raise NotImplementedError


def get_backend(name: str) -> GroupBackend:
    """Backend registry.  ``toy`` accepts an optional modulus: ``toy:17``."""
    if name == "bls12-381":
        from .bls12381 import Bls12381Backend
        return Bls12381Backend.instance()
    if name == "toy":
        from .toy import ToyBackend
        return ToyBackend.instance()
    if name.startswith("toy:"):
        from .toy import ToyBackend
        return ToyBackend(int(name.split(":", 1)[1]))
    raise ValueError(f"unknown group backend {name!r}")
