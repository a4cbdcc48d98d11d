"""Sparsity-bounded drift proofs.

Certifies that the drift between two committed blocks has at most k nonzero
coordinates, using t random linear checks with challenge vectors expanded
from a transcript-bound PRF seed.  Two modes:

Mode A (public support) publishes a support set padded to exactly k indices
and proves the complement functional vanishes: for t challenge vectors with
coordinates forced to zero on the support, the inner product with the drift
is zero.  Values and exact count stay hidden; proofs are O(k + t log n).

Mode B (hidden support) reveals nothing but the bound.  It needs the blocks
committed coordinate-wise and costs O(n): an indicator bit per coordinate
(bit proofs), a range proof that the bits sum to at most k, a product-zero
proof per coordinate tying zero bits to zero drift, a batched equality
argument linking drift commitments to the block difference, and t committed
projections T = <r, drift>, each linked to the coordinate commitments and
to the block difference by same-value proofs.  Mode B is gated to small
blocks because of the linear cost.

A cheating prover with an undeclared nonzero coordinate survives one check
with probability 1/q, so t independent checks give soundness q^-t.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import (DegenerateParams, DimensionTooLarge, SparsityExceeded,
                     WireFormatError, WitnessInconsistent)
from .pedersen import Pedersen
from .prf import PrfStream
from .subproofs import (BitProof, LinearProof, ProductZeroProof, RangeProof,
                        ScalarSampler, SchnorrProof, prove_bit, prove_linear,
                        prove_product_zero, prove_range, prove_same_value,
                        prove_schnorr, verify_bit, verify_linear,
                        verify_product_zero, verify_range, verify_same_value,
                        verify_schnorr)
from .transcript import Transcript
from .wire import Reader

MODE_PUBLIC = "A"
MODE_HIDDEN = "B"
MODE_B_DIM_LIMIT = 4096
CHALLENGE_DOMAIN = "sdip-r"

_MODE_BYTE = {MODE_PUBLIC: 0x0A, MODE_HIDDEN: 0x0B}


@dataclass(frozen=True)
class SdipParams:
    """Sparsity bound k, challenge count t, and support-visibility mode."""

    k: int
    t: int = 2
    mode: str = MODE_PUBLIC

    def __post_init__(self) -> None:
        if self.k < 0:
            raise DegenerateParams(f"sparsity bound k = {self.k} is negative")
        if self.t < 1:
            raise DegenerateParams(f"challenge count t = {self.t} must be >= 1")
        if self.mode not in (MODE_PUBLIC, MODE_HIDDEN):
            raise DegenerateParams(f"unknown sparsity mode {self.mode!r}")


def sdip_soundness_bound(t: int, q: int) -> Fraction:
    """Acceptance probability bound q^-t for a false sparsity claim."""
    if t < 1:
        raise DegenerateParams(f"challenge count t = {t} must be >= 1")
    return Fraction(1, q ** t)


@dataclass
class SparseWitness:
    """True support, its values, and the support padded to exactly k."""

    support: list[int]
    values: dict[int, int]
    padded: list[int]


def extract_support(delta: Sequence[int], k: int) -> SparseWitness:
    """Support of a drift vector, padded to k with the lowest unused indices.

    Raises SparsityExceeded carrying the actual count when it exceeds k, and
    DegenerateParams when k exceeds the dimension (no padding would fit).
    """
    n = len(delta)
    if k > n:
        raise DegenerateParams(
            f"sparsity bound k = {k} exceeds block dimension {n}")
    support = [i for i, v in enumerate(delta) if v != 0]
    if len(support) > k:
        raise SparsityExceeded(k, len(support))
    taken = set(support)
    padded = list(support)
    cursor = 0
    while len(padded) < k:
        if cursor not in taken:
            padded.append(cursor)
            taken.add(cursor)
        cursor += 1
    padded.sort()
    return SparseWitness(support, {i: int(delta[i]) for i in support}, padded)


def _padded_dim(n: int) -> int:
    size = 1
    while size < n:
        size *= 2
    return size


def _masked_challenge(prf: PrfStream, field, n_pad: int, index: int,
                      padded: Sequence[int]) -> list[int]:
    r = prf.scalars(n_pad, field, offset=index * n_pad)
    for i in padded:
        r[i] = 0
    return r


@dataclass
class SdipProofA:
    """Public padded support plus t complement-zero linear proofs."""

    k: int
    t: int
    support: list[int]
    proofs: list[LinearProof]

    mode = MODE_PUBLIC

    def write_into(self, backend, buf: bytearray) -> None:
        buf.append(_MODE_BYTE[MODE_PUBLIC])
        buf.extend(self.k.to_bytes(4, "little"))
        for i in self.support:
            buf.extend(i.to_bytes(4, "little"))
        buf.extend(self.t.to_bytes(2, "little"))
        for proof in self.proofs:
            proof.write_into(backend, buf)

    @classmethod
    def read_body(cls, backend, reader: Reader) -> "SdipProofA":
        k = int.from_bytes(reader.take(4), "little")
        support = [int.from_bytes(reader.take(4), "little") for _ in range(k)]
        t = int.from_bytes(reader.take(2), "little")
        proofs = [LinearProof.read_from(backend, reader) for _ in range(t)]
        return cls(k, t, support, proofs)

    def to_bytes(self, backend) -> bytes:
        buf = bytearray()
        self.write_into(backend, buf)
        return bytes(buf)


def _absorb_statement_a(transcript: Transcript, ped: Pedersen,
                        params: SdipParams, n: int, support: Sequence[int],
                        c_base, c_tuned) -> None:
    blob = bytearray([_MODE_BYTE[MODE_PUBLIC]])
    blob.extend(n.to_bytes(4, "little"))
    blob.extend(params.k.to_bytes(4, "little"))
    blob.extend(params.t.to_bytes(2, "little"))
    for i in support:
        blob.extend(i.to_bytes(4, "little"))
    blob.extend(ped.backend.serialize(c_base))
    blob.extend(ped.backend.serialize(c_tuned))
    transcript.absorb("SDIP/params", bytes(blob))


def prove_sdip_a(ped: Pedersen, transcript: Transcript, params: SdipParams,
                 c_base, c_tuned, delta: Sequence[int], blind_delta: int,
                 sampler: ScalarSampler) -> SdipProofA:
    """Prove the drift behind c_tuned - c_base is zero outside k coordinates.

    ``delta`` is the drift as field elements; ``blind_delta`` the blinding
    difference of the two vector commitments.
    """
    backend = ped.backend
    field = backend.field
    n = len(delta)
    witness = extract_support(delta, params.k)
    _absorb_statement_a(transcript, ped, params, n, witness.padded,
                        c_base, c_tuned)
    seed = transcript.challenge_bytes("SDIP/chal", 32)
    prf = PrfStream(seed, CHALLENGE_DOMAIN)
    n_pad = _padded_dim(n)
    padded_delta = [int(v) for v in delta] + [0] * (n_pad - n)
    c_delta = backend.add(c_tuned, backend.neg(c_base))
    identity = backend.identity()
    proofs = []
    for j in range(params.t):
        r = _masked_challenge(prf, field, n_pad, j, witness.padded)
        proofs.append(prove_linear(ped, transcript, r, c_delta, identity,
                                   padded_delta, blind_delta, 0, 0, sampler))
    return SdipProofA(params.k, params.t, witness.padded, proofs)


def _verify_sdip_a(ped: Pedersen, transcript: Transcript, params: SdipParams,
                   c_base, c_tuned, n: int, proof: SdipProofA) -> bool:
    backend = ped.backend
    field = backend.field
    if proof.k != params.k or proof.t != params.t:
        return False
    if len(proof.support) != params.k or len(proof.proofs) != params.t:
        return False
    if any(not 0 <= i < n for i in proof.support):
        return False
    if any(b <= a for a, b in zip(proof.support, proof.support[1:])):
        return False
    _absorb_statement_a(transcript, ped, params, n, proof.support,
                        c_base, c_tuned)
    seed = transcript.challenge_bytes("SDIP/chal", 32)
    prf = PrfStream(seed, CHALLENGE_DOMAIN)
    n_pad = _padded_dim(n)
    c_delta = backend.add(c_tuned, backend.neg(c_base))
    identity = backend.identity()
    for j, linear in enumerate(proof.proofs):
        r = _masked_challenge(prf, field, n_pad, j, proof.support)
        if not verify_linear(ped, transcript, r, c_delta, identity, linear):
            return False
    return True


@dataclass
class CoordinateWitness:
    """Prover-side view of a coordinate-committed block."""

    points: list
    values: list[int]
    blinds: list[int]

    def __post_init__(self) -> None:
        if not len(self.points) == len(self.values) == len(self.blinds):
            raise WitnessInconsistent("coordinate commitment lists disagree")


@dataclass
class SdipProofB:
    """Hidden-support records: one (bit, drift) pair per coordinate.

    ``links`` holds the t committed projections with their two same-value
    proofs: against the drift coordinate commitments and against the block
    difference.
    """

    n: int
    bit_commitments: list
    drift_commitments: list
    bit_proofs: list[BitProof]
    product_proofs: list[ProductZeroProof]
    count_proof: RangeProof
    eq_proof: SchnorrProof
    links: list[tuple[object, SchnorrProof, SchnorrProof]]

    mode = MODE_HIDDEN

    def write_into(self, backend, buf: bytearray) -> None:
        buf.append(_MODE_BYTE[MODE_HIDDEN])
        buf.extend(self.n.to_bytes(4, "little"))
        for i in range(self.n):
            buf.extend(backend.serialize(self.bit_commitments[i]))
            buf.extend(backend.serialize(self.drift_commitments[i]))
            self.bit_proofs[i].write_into(backend, buf)
            self.product_proofs[i].write_into(backend, buf)
        self.count_proof.write_into(backend, buf)
        self.eq_proof.write_into(backend, buf)
        buf.extend(len(self.links).to_bytes(2, "little"))
        for projection, link_coord, link_block in self.links:
            buf.extend(backend.serialize(projection))
            link_coord.write_into(backend, buf)
            link_block.write_into(backend, buf)

    @classmethod
    def read_body(cls, backend, reader: Reader) -> "SdipProofB":
        n = int.from_bytes(reader.take(4), "little")
        bits, drifts, bit_proofs, product_proofs = [], [], [], []
        for _ in range(n):
            bits.append(backend.deserialize(reader.take(backend.element_bytes)))
            drifts.append(
                backend.deserialize(reader.take(backend.element_bytes)))
            bit_proofs.append(BitProof.read_from(backend, reader))
            product_proofs.append(ProductZeroProof.read_from(backend, reader))
        count_proof = RangeProof.read_from(backend, reader)
        eq_proof = SchnorrProof.read_from(backend, reader)
        t = int.from_bytes(reader.take(2), "little")
        links = []
        for _ in range(t):
            projection = backend.deserialize(
                reader.take(backend.element_bytes))
            link_coord = SchnorrProof.read_from(backend, reader)
            link_block = SchnorrProof.read_from(backend, reader)
            links.append((projection, link_coord, link_block))
        return cls(n, bits, drifts, bit_proofs, product_proofs, count_proof,
                   eq_proof, links)

    def to_bytes(self, backend) -> bytes:
        buf = bytearray()
        self.write_into(backend, buf)
        return bytes(buf)


def _absorb_statement_b(transcript: Transcript, ped: Pedersen,
                        params: SdipParams, base_points, tuned_points) -> None:
    backend = ped.backend
    blob = bytearray([_MODE_BYTE[MODE_HIDDEN]])
    blob.extend(len(base_points).to_bytes(4, "little"))
    blob.extend(params.k.to_bytes(4, "little"))
    blob.extend(params.t.to_bytes(2, "little"))
    for point in base_points:
        blob.extend(backend.serialize(point))
    for point in tuned_points:
        blob.extend(backend.serialize(point))
    transcript.absorb("SDIP/params", bytes(blob))


def _rho_powers(rho: int, n: int, q: int) -> list[int]:
    powers = [1] * n
    for i in range(1, n):
        powers[i] = (powers[i - 1] * rho) % q
    return powers


def prove_sdip_b(ped: Pedersen, transcript: Transcript, params: SdipParams,
                 base: CoordinateWitness, tuned: CoordinateWitness,
                 sampler: ScalarSampler, *,
                 dim_limit: int = MODE_B_DIM_LIMIT) -> SdipProofB:
    """Prove sparsity with the support hidden, over coordinate commitments."""
    backend = ped.backend
    field = backend.field
    q = field.q
    n = len(base.points)
    if len(tuned.points) != n:
        raise WitnessInconsistent("base and tuned coordinate counts differ")
    if n > dim_limit:
        raise DimensionTooLarge(
            f"hidden-support mode limited to {dim_limit} coordinates, "
            f"block has {n}")
    if params.k > n:
        raise DegenerateParams(
            f"sparsity bound k = {params.k} exceeds block dimension {n}")
    delta = [(tv - bv) % q for bv, tv in zip(base.values, tuned.values)]
    count = sum(1 for v in delta if v)
    if count > params.k:
        raise SparsityExceeded(params.k, count)

    _absorb_statement_b(transcript, ped, params, base.points, tuned.points)

    bits = [1 if v else 0 for v in delta]
    bit_blinds = [sampler.next() for _ in range(n)]
    drift_blinds = [sampler.next() for _ in range(n)]
    bit_commits = [ped.commit_scalar(b, r) for b, r in zip(bits, bit_blinds)]
    drift_commits = [
        ped.commit_scalar(v, r) for v, r in zip(delta, drift_blinds)
    ]
    blob = bytearray()
    for point in bit_commits:
        blob.extend(backend.serialize(point))
    for point in drift_commits:
        blob.extend(backend.serialize(point))
    transcript.absorb("SDIP/coord", bytes(blob))

    bit_proofs = [
        prove_bit(ped, transcript, bit_commits[i], bits[i], bit_blinds[i],
                  sampler)
        for i in range(n)
    ]

    c_sum = backend.msm(bit_commits, [1] * n)
    transcript.absorb("SDIP/cnt", backend.serialize(c_sum))
    count_proof = prove_range(ped, transcript, c_sum, sum(bits),
                              sum(bit_blinds) % q, 0, params.k, sampler)

    product_proofs = [
        prove_product_zero(ped, transcript, bit_commits[i], drift_commits[i],
                           bits[i], bit_blinds[i], delta[i], drift_blinds[i],
                           sampler)
        for i in range(n)
    ]

    rho = transcript.challenge_scalar("SDIP/eq", field)
    powers = _rho_powers(rho, n, q)
    diff_points = [
        backend.add(tp, backend.neg(bp))
        for bp, tp in zip(base.points, tuned.points)
    ]
    eq_target = backend.add(
        backend.msm(diff_points, powers),
        backend.neg(backend.msm(drift_commits, powers)))
    eq_witness = sum(
        p * ((tb - bb - db) % q)
        for p, bb, tb, db in zip(powers, base.blinds, tuned.blinds,
                                 drift_blinds)
    ) % q
    eq_proof = prove_schnorr(backend, transcript, [ped.H], eq_target,
                             [eq_witness], sampler)

    seed = transcript.challenge_bytes("SDIP/chal", 32)
    prf = PrfStream(seed, CHALLENGE_DOMAIN)
    links = []
    blind_diff = [(tb - bb) % q for bb, tb in zip(base.blinds, tuned.blinds)]
    for j in range(params.t):
        r = prf.scalars(n, field, offset=j * n)
        projection = sum(ri * v for ri, v in zip(r, delta)) % q
        proj_blind = sampler.next()
        c_proj = ped.commit_scalar(projection, proj_blind)
        transcript.absorb("SDIP/T", backend.serialize(c_proj))
        coord_sum = backend.msm(drift_commits, r)
        coord_blind = sum(ri * b for ri, b in zip(r, drift_blinds)) % q
        link_coord = prove_same_value(ped, transcript, coord_sum, c_proj,
                                      coord_blind, proj_blind, sampler)
        block_sum = backend.msm(diff_points, r)
        block_blind = sum(ri * b for ri, b in zip(r, blind_diff)) % q
        link_block = prove_same_value(ped, transcript, block_sum, c_proj,
                                      block_blind, proj_blind, sampler)
        links.append((c_proj, link_coord, link_block))
    return SdipProofB(n, bit_commits, drift_commits, bit_proofs,
                      product_proofs, count_proof, eq_proof, links)


def _verify_sdip_b(ped: Pedersen, transcript: Transcript, params: SdipParams,
                   base_points, tuned_points, proof: SdipProofB, *,
                   dim_limit: int = MODE_B_DIM_LIMIT) -> bool:
    backend = ped.backend
    field = backend.field
    q = field.q
    n = len(base_points)
    if len(tuned_points) != n or proof.n != n or n > dim_limit:
        return False
    if params.k > n:
        return False
    if not (len(proof.bit_commitments) == len(proof.drift_commitments)
            == len(proof.bit_proofs) == len(proof.product_proofs) == n):
        return False
    if len(proof.links) != params.t:
        return False

    _absorb_statement_b(transcript, ped, params, base_points, tuned_points)
    blob = bytearray()
    for point in proof.bit_commitments:
        blob.extend(backend.serialize(point))
    for point in proof.drift_commitments:
        blob.extend(backend.serialize(point))
    transcript.absorb("SDIP/coord", bytes(blob))

    for i in range(n):
        if not verify_bit(ped, transcript, proof.bit_commitments[i],
                          proof.bit_proofs[i]):
            return False

    c_sum = backend.msm(proof.bit_commitments, [1] * n)
    transcript.absorb("SDIP/cnt", backend.serialize(c_sum))
    if not verify_range(ped, transcript, c_sum, 0, params.k,
                        proof.count_proof):
        return False

    for i in range(n):
        if not verify_product_zero(ped, transcript, proof.bit_commitments[i],
                                   proof.drift_commitments[i],
                                   proof.product_proofs[i]):
            return False

    rho = transcript.challenge_scalar("SDIP/eq", field)
    powers = _rho_powers(rho, n, q)
    diff_points = [
        backend.add(tp, backend.neg(bp))
        for bp, tp in zip(base_points, tuned_points)
    ]
    eq_target = backend.add(
        backend.msm(diff_points, powers),
        backend.neg(backend.msm(proof.drift_commitments, powers)))
    if not verify_schnorr(backend, transcript, [ped.H], eq_target,
                          proof.eq_proof):
        return False

    seed = transcript.challenge_bytes("SDIP/chal", 32)
    prf = PrfStream(seed, CHALLENGE_DOMAIN)
    for j, (c_proj, link_coord, link_block) in enumerate(proof.links):
        r = prf.scalars(n, field, offset=j * n)
        transcript.absorb("SDIP/T", backend.serialize(c_proj))
        coord_sum = backend.msm(proof.drift_commitments, r)
        if not verify_same_value(ped, transcript, coord_sum, c_proj,
                                 link_coord):
            return False
        block_sum = backend.msm(diff_points, r)
        if not verify_same_value(ped, transcript, block_sum, c_proj,
                                 link_block):
            return False
    return True


def verify_sdip(ped: Pedersen, transcript: Transcript, params: SdipParams,
                c_base, c_tuned, n: int,
                proof: SdipProofA | SdipProofB, *,
                dim_limit: int = MODE_B_DIM_LIMIT) -> bool:
    """Dispatch on the proof's mode, which must match the declared params.

    Mode A takes single vector commitments for c_base and c_tuned; mode B
    takes the coordinate commitment lists.
    """
    if proof.mode != params.mode:
        return False
    if proof.mode == MODE_PUBLIC:
        return _verify_sdip_a(ped, transcript, params, c_base, c_tuned, n,
                              proof)
    return _verify_sdip_b(ped, transcript, params, c_base, c_tuned, proof,
                          dim_limit=dim_limit)


def read_sdip_proof(backend, reader: Reader) -> SdipProofA | SdipProofB:
    mode = reader.take(1)[0]
    if mode == _MODE_BYTE[MODE_PUBLIC]:
        return SdipProofA.read_body(backend, reader)
    if mode == _MODE_BYTE[MODE_HIDDEN]:
        return SdipProofB.read_body(backend, reader)
    raise WireFormatError(f"unknown sparsity proof mode byte {mode:#x}")


def sdip_proof_from_bytes(backend, data: bytes) -> SdipProofA | SdipProofB:
    reader = Reader(data)
    proof = read_sdip_proof(backend, reader)
    reader.expect_end()
    return proof
