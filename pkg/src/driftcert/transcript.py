"""Fiat-Shamir transcript with a closed label registry.

Every interactive protocol in the package is compiled non-interactively by
absorbing its statement and messages into a rolling SHA-256 state and
squeezing challenges from it.  Labels are fixed ASCII tags; absorbing under
an unregistered label raises ``UnknownLabel`` so that domain separation is
enforced at the call site, not by convention.

Challenges are scalars obtained by wide reduction: 64 squeezed bytes reduced
mod q, which keeps the sampling bias below 2^-257.  Squeezing ratchets the
state, so consecutive challenges under the same label differ.
"""

from __future__ import annotations

import hashlib

from .errors import UnknownLabel
from .field import PrimeField

# Registry of every transcript label in the system.  The certificate-level
# and per-protocol tags are part of the external format; the remaining tags
# are internal domain separators for sub-protocols.
TRANSCRIPT_LABELS = frozenset({
    # certificate level
    "FTI/v1", "FTI/nonce", "COMMIT/block", "AGG/root", "CHAIN/link",
    # norm-bounded drift
    "NBDP/params", "NBDP/z", "NBDP/range",
    # rank-bounded drift
    "MRDP/commit", "MRDP/point",
    # sparse drift
    "SDIP/params", "SDIP/chal", "SDIP/coord", "SDIP/T", "SDIP/eq", "SDIP/cnt",
    # linear-relation argument (inner product)
    "LIN/stmt", "LIN/mask", "LIN/L", "LIN/R", "LIN/x", "LIN/c",
    # range argument
    "RNG/stmt", "RNG/bit", "RNG/or", "RNG/sum",
    # sigma protocols
    "SCH/stmt", "SCH/a", "SCH/c",
    "PRD/stmt", "PRD/a", "PRD/c",
    "FRZ/stmt",
})

_INIT = b"driftcert-transcript-v1"


def _check_label(label: str) -> bytes:
    if label not in TRANSCRIPT_LABELS:
        raise UnknownLabel(f"transcript label {label!r} not in registry")
    return label.encode("ascii")


class Transcript:
    """Rolling-hash transcript.  ``fork`` yields independent sub-transcripts."""

    __slots__ = ("state",)

    def __init__(self, state: bytes | None = None):
        if state is None:
            state = hashlib.sha256(_INIT).digest()
        self.state = state

    def clone(self) -> "Transcript":
        return Transcript(self.state)

    def absorb(self, label: str, data: bytes) -> None:
        tag = _check_label(label)
        h = hashlib.sha256()
        h.update(self.state)
        h.update(bytes([len(tag)]))
        h.update(tag)
        h.update(len(data).to_bytes(8, "little"))
        h.update(data)
        self.state = h.digest()

    def absorb_scalar(self, label: str, value: int) -> None:
        self.absorb(label, value.to_bytes(32, "little"))

    def absorb_int(self, label: str, value: int) -> None:
        self.absorb(label, value.to_bytes(8, "little"))

    def fork(self, label: str, data: bytes) -> "Transcript":
        t = self.clone()
        t.absorb(label, data)
        return t

    def challenge_bytes(self, label: str, n: int) -> bytes:
        tag = _check_label(label)
        out = bytearray()
        counter = 0
        while len(out) < n:
            h = hashlib.sha256()
            h.update(self.state)
            h.update(b"sq")
            h.update(bytes([len(tag)]))
            h.update(tag)
            h.update(counter.to_bytes(8, "little"))
            out.extend(h.digest())
            counter += 1
        out = bytes(out[:n])
        # ratchet so the next squeeze (same label or not) is independent
        self.state = hashlib.sha256(self.state + b"rt" + tag + out).digest()
        return out

    def challenge_scalar(self, label: str, field: PrimeField) -> int:
        wide = int.from_bytes(self.challenge_bytes(label, 64), "little")
        return wide % field.q

    def challenge_nonzero(self, label: str, field: PrimeField) -> int:
        """Nonzero challenge; re-squeezes on the (measure-zero) zero draw."""
        while True:
            c = self.challenge_scalar(label, field)
            if c != 0:
                return c
