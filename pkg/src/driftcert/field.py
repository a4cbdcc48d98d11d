"""Prime field arithmetic on plain integers.

Protocol code keeps field elements as canonical ints in ``[0, q)`` and uses
a ``PrimeField`` instance for the handful of operations that need the
modulus.  No element wrapper class: the hot paths (inner products over
10^5+ coordinates, generator folds) cannot afford per-element objects.

The production field is the scalar field of BLS12-381, a 255-bit prime.
Small fields (F_17 and friends) are used by exhaustive protocol oracles.
"""

from __future__ import annotations

from .errors import DriftCertError

# Order of the prime-order subgroup of BLS12-381; the scalar field every
# protocol in this package shares.
BLS12381_SCALAR_MODULUS = 0x73EDA753299D7D483339D80809A1D80553BDA402FFFE5BFEFFFFFFFF00000001


class PrimeField:
    """Z_q with q prime.  Values are canonical representatives in [0, q)."""

    __slots__ = ("q", "half")

    def __init__(self, q: int):
        if q < 2:
            raise DriftCertError(f"modulus {q} is not a prime > 1")
        self.q = q
        self.half = (q - 1) // 2

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PrimeField) and other.q == self.q

    def __hash__(self) -> int:
        return hash(("PrimeField", self.q))

    def __repr__(self) -> str:
        return f"PrimeField(bits={self.q.bit_length()})"

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.q

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.q

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.q

    def neg(self, a: int) -> int:
        return -a % self.q

    def inv(self, a: int) -> int:
        if a % self.q == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, self.q - 2, self.q)

    def pow(self, a: int, e: int) -> int:
        return pow(a, e, self.q)

    def from_signed(self, v: int) -> int:
        return v % self.q

    def signed(self, a: int) -> int:
        """Centered representative in [-(q-1)/2, (q-1)/2]."""
        a %= self.q
        return a if a <= self.half else a - self.q

    def inner(self, a: list[int], b: list[int]) -> int:
        """<a, b> over Z_q.  One reduction at the end; Python ints carry it."""
        if len(a) != len(b):
            raise DriftCertError(f"inner product length mismatch {len(a)} != {len(b)}")
        return sum(x * y for x, y in zip(a, b)) % self.q


FIELD_IDS = {
    "bls12-381-scalar": BLS12381_SCALAR_MODULUS,
}

_CACHE: dict[int, PrimeField] = {}


def field_by_modulus(q: int) -> PrimeField:
    f = _CACHE.get(q)
    if f is None:
        f = _CACHE[q] = PrimeField(q)
    return f


def field_by_id(field_id: str) -> PrimeField:
    try:
        return field_by_modulus(FIELD_IDS[field_id])
    except KeyError:
        raise DriftCertError(f"unknown field id {field_id!r}") from None


SCALAR_FIELD = field_by_id("bls12-381-scalar")
