"""Pedersen commitments over a group backend.

Vector commitments bind a field vector under generators G_0..G_{n-1} with a
blinding term s*H; scalar commitments bind one value under a dedicated base
U.  U is distinct from every vector generator so that a scalar commitment
and a vector commitment can be folded into a single point inside the linear
argument without sharing a base.

All generators come from ``hash_to_group`` under fixed labels, so no party
knows discrete-log relations between them on the real backend.
"""

from __future__ import annotations

from typing import Sequence

from .groups.base import GroupBackend

VECTOR_LABEL = "PED/G"
BLINDING_LABEL = "PED/H"
SCALAR_LABEL = "PED/U"


class Pedersen:
    """Commitment context: a backend plus its generator table."""

    __slots__ = ("backend", "_gens")

    def __init__(self, backend: GroupBackend):
        self.backend = backend
        self._gens: list = []

    @property
    def H(self):
        return self.backend.hash_to_group(BLINDING_LABEL, 0)

    @property
    def U(self):
        return self.backend.hash_to_group(SCALAR_LABEL, 0)

    def gens(self, n: int) -> list:
        while len(self._gens) < n:
            self._gens.append(
                self.backend.hash_to_group(VECTOR_LABEL, len(self._gens)))
        return self._gens[:n]

    def commit_vector(self, values: Sequence[int], blinding: int):
        b = self.backend
        acc = b.msm(self.gens(len(values)), values)
        if blinding:
            acc = b.add(acc, b.mul(self.H, blinding))
        return acc

    def commit_scalar(self, value: int, blinding: int):
        b = self.backend
        acc = b.mul(self.U, value % b.field.q)
        if blinding:
            acc = b.add(acc, b.mul(self.H, blinding))
        return acc

    def blinding_only(self, blinding: int):
        return self.backend.mul(self.H, blinding)


_CONTEXTS: dict[int, Pedersen] = {}


def pedersen_for(backend: GroupBackend) -> Pedersen:
    """Shared context per backend so generator tables are built once."""
    ctx = _CONTEXTS.get(id(backend))
    if ctx is None:
        ctx = _CONTEXTS[id(backend)] = Pedersen(backend)
    return ctx
