"""Sigma protocols and the inner-product linear argument.

These are the reusable pieces under the drift protocols: a multi-base
Schnorr proof of commitment opening, a logarithmic-size argument that a
committed vector has a stated inner product with a public vector, a bit
proof (committed value in {0,1}) by OR composition, an interval proof by
two-sided binary decomposition, and a product-zero proof tying a committed
indicator bit to a committed coordinate.

All protocols are compiled with Fiat-Shamir over a shared ``Transcript``;
prover and verifier must interleave absorptions identically, so every proof
here both absorbs its statement and squeezes its challenges through the one
transcript it is handed.  Provers check their own witnesses and raise on
inconsistency; verifiers only ever return a boolean.  Deserialization
raises ``WireFormatError`` on malformed bytes and protocol callers convert
that to a verdict of False.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DegenerateParams, WitnessInconsistent, WitnessOutOfRange
from .pedersen import Pedersen
from .prf import PrfStream
from .transcript import Transcript
from .wire import Reader


class ScalarSampler:
    """Sequential uniform scalars from a PRF stream, for prover randomness."""

    __slots__ = ("_prf", "_field", "_index")

    def __init__(self, prf: PrfStream, field):
        self._prf = prf
        self._field = field
        self._index = 0

    def next(self) -> int:
        v = self._prf.scalar(self._index, self._field)
        self._index += 1
        return v


def _points_blob(backend, *points) -> bytes:
    return b"".join(backend.serialize(p) for p in points)


def _scalars_blob(values) -> bytes:
    return b"".join(v.to_bytes(32, "little") for v in values)


def _read_point(reader: Reader, backend):
    return backend.deserialize(reader.take(backend.element_bytes))


# -- Schnorr opening proof -----------------------------------------------------


@dataclass
class SchnorrProof:
    """Knowledge of (x_1..x_k) with C = sum x_i B_i, for public bases B_i."""

    mask: object
    responses: list[int]

    def write_into(self, backend, buf: bytearray) -> None:
        buf.extend(backend.serialize(self.mask))
        buf.extend(len(self.responses).to_bytes(2, "little"))
        buf.extend(_scalars_blob(self.responses))

    @classmethod
    def read_from(cls, backend, reader: Reader) -> "SchnorrProof":
        mask = _read_point(reader, backend)
        k = int.from_bytes(reader.take(2), "little")
        responses = [reader.scalar() for _ in range(k)]
        return cls(mask, responses)


def prove_schnorr(backend, transcript: Transcript, bases, commitment,
                  witnesses, sampler: ScalarSampler) -> SchnorrProof:
    field = backend.field
    if len(bases) != len(witnesses):
        raise WitnessInconsistent("one witness per base required")
    check = backend.msm(list(bases), [w % field.q for w in witnesses])
    if not backend.eq(check, commitment):
        raise WitnessInconsistent("witnesses do not open the commitment")
    transcript.absorb("SCH/stmt", _points_blob(backend, *bases, commitment))
    nonces = [sampler.next() for _ in bases]
    mask = backend.msm(list(bases), nonces)
    transcript.absorb("SCH/a", backend.serialize(mask))
    c = transcript.challenge_scalar("SCH/c", field)
    responses = [(r + c * w) % field.q for r, w in zip(nonces, witnesses)]
    return SchnorrProof(mask, responses)


def verify_schnorr(backend, transcript: Transcript, bases, commitment,
                   proof: SchnorrProof) -> bool:
    field = backend.field
    if len(proof.responses) != len(bases):
        return False
    transcript.absorb("SCH/stmt", _points_blob(backend, *bases, commitment))
    transcript.absorb("SCH/a", backend.serialize(proof.mask))
    c = transcript.challenge_scalar("SCH/c", field)
    lhs = backend.msm(list(bases), [z % field.q for z in proof.responses])
    rhs = backend.add(proof.mask, backend.mul(commitment, c))
    return backend.eq(lhs, rhs)


def prove_same_value(ped: Pedersen, transcript: Transcript, c1, c2,
                     blind1: int, blind2: int,
                     sampler: ScalarSampler) -> SchnorrProof:
    """Commitments under the same scalar base hide the same value: their
    difference is a known multiple of the blinding base."""
    backend = ped.backend
    q = backend.field.q
    transcript.absorb("FRZ/stmt", _points_blob(backend, c1, c2))
    diff = backend.sub(c1, c2)
    return prove_schnorr(
        backend, transcript, [ped.H], diff, [(blind1 - blind2) % q], sampler)


def verify_same_value(ped: Pedersen, transcript: Transcript, c1, c2,
                      proof: SchnorrProof) -> bool:
    backend = ped.backend
    transcript.absorb("FRZ/stmt", _points_blob(backend, c1, c2))
    diff = backend.sub(c1, c2)
    return verify_schnorr(backend, transcript, [ped.H], diff, proof)


# -- linear argument (inner product with a public vector) ----------------------


@dataclass
class LinearProof:
    """Argument that <a, w> = z for committed w and committed scalar z.

    The vector length must be a power of two; the proof carries two mask
    commitments, one L/R pair per halving round, the revealed folded scalar
    and the accumulated blinding, so its size is logarithmic in the length.
    """

    mask_vec: object
    mask_ip: object
    rounds: list[tuple[object, object]]
    final_scalar: int
    final_blind: int

    def write_into(self, backend, buf: bytearray) -> None:
        buf.extend(backend.serialize(self.mask_vec))
        buf.extend(backend.serialize(self.mask_ip))
        buf.extend(len(self.rounds).to_bytes(2, "little"))
        for left, right in self.rounds:
            buf.extend(backend.serialize(left))
            buf.extend(backend.serialize(right))
        buf.extend(self.final_scalar.to_bytes(32, "little"))
        buf.extend(self.final_blind.to_bytes(32, "little"))

    @classmethod
    def read_from(cls, backend, reader: Reader) -> "LinearProof":
        mask_vec = _read_point(reader, backend)
        mask_ip = _read_point(reader, backend)
        k = int.from_bytes(reader.take(2), "little")
        rounds = [
            (_read_point(reader, backend), _read_point(reader, backend))
            for _ in range(k)
        ]
        return cls(mask_vec, mask_ip, rounds, reader.scalar(), reader.scalar())


def _inner(field, a, b) -> int:
    q = field.q
    return sum(x * y for x, y in zip(a, b)) % q


def _absorb_linear_statement(transcript, backend, a, c_w, c_z) -> None:
    blob = len(a).to_bytes(8, "little")
    blob += _points_blob(backend, c_w, c_z)
    blob += _scalars_blob(a)
    transcript.absorb("LIN/stmt", blob)


def prove_linear(ped: Pedersen, transcript: Transcript, a: list[int],
                 c_w, c_z, w: list[int], blind_w: int, z: int, blind_z: int,
                 sampler: ScalarSampler) -> LinearProof:
    backend = ped.backend
    field = backend.field
    q = field.q
    n = len(a)
    if n == 0 or n & (n - 1):
        raise DegenerateParams(f"vector length {n} is not a power of two")
    if len(w) != n:
        raise WitnessInconsistent("witness length differs from statement")
    a = [x % q for x in a]
    w = [x % q for x in w]
    if _inner(field, a, w) != z % q:
        raise WitnessInconsistent("claimed inner product is wrong")

    _absorb_linear_statement(transcript, backend, a, c_w, c_z)

    # Masking layer: a random vector d hides w in the folded reveal.
    d = [sampler.next() for _ in range(n)]
    s_d = sampler.next()
    s_b = sampler.next()
    mask_vec = ped.commit_vector(d, s_d)
    mask_ip = ped.commit_scalar(_inner(field, a, d), s_b)
    transcript.absorb("LIN/mask", _points_blob(backend, mask_vec, mask_ip))
    c = transcript.challenge_nonzero("LIN/c", field)

    # Fold the mask into the witness; the combined commitment is
    # P = mask_vec + c*C_w + mask_ip + c*C_z = <v, G> + <a, v>*U + s*H.
    vec = [(di + c * wi) % q for di, wi in zip(d, w)]
    blind = (s_d + c * blind_w + s_b + c * blind_z) % q

    gens = list(ped.gens(n))
    rounds: list[tuple[object, object]] = []
    cur_a = a
    while len(vec) > 1:
        half = len(vec) // 2
        v_lo, v_hi = vec[:half], vec[half:]
        a_lo, a_hi = cur_a[:half], cur_a[half:]
        g_lo, g_hi = gens[:half], gens[half:]
        s_left = sampler.next()
        s_right = sampler.next()
        ip_left = _inner(field, a_hi, v_lo)
        ip_right = _inner(field, a_lo, v_hi)
        left = backend.add(
            backend.msm(g_hi, v_lo),
            ped.commit_scalar(ip_left, s_left))
        right = backend.add(
            backend.msm(g_lo, v_hi),
            ped.commit_scalar(ip_right, s_right))
        transcript.absorb("LIN/L", backend.serialize(left))
        transcript.absorb("LIN/R", backend.serialize(right))
        x = transcript.challenge_nonzero("LIN/x", field)
        x_inv = field.inv(x)
        rounds.append((left, right))
        vec = [(lo + x * hi) % q for lo, hi in zip(v_lo, v_hi)]
        cur_a = [(lo + x_inv * hi) % q for lo, hi in zip(a_lo, a_hi)]
        gens = [backend.add(lo, backend.mul(hi, x_inv))
                for lo, hi in zip(g_lo, g_hi)]
        blind = (blind + x_inv * s_left + x * s_right) % q

    return LinearProof(mask_vec, mask_ip, rounds, vec[0], blind)


def verify_linear(ped: Pedersen, transcript: Transcript, a: list[int],
                  c_w, c_z, proof: LinearProof) -> bool:
    backend = ped.backend
    field = backend.field
    q = field.q
    n = len(a)
    if n == 0 or n & (n - 1):
        return False
    k = n.bit_length() - 1
    if len(proof.rounds) != k:
        return False
    a = [x % q for x in a]

    _absorb_linear_statement(transcript, backend, a, c_w, c_z)
    transcript.absorb(
        "LIN/mask", _points_blob(backend, proof.mask_vec, proof.mask_ip))
    c = transcript.challenge_nonzero("LIN/c", field)
    challenges = []
    for left, right in proof.rounds:
        transcript.absorb("LIN/L", backend.serialize(left))
        transcript.absorb("LIN/R", backend.serialize(right))
        challenges.append(transcript.challenge_nonzero("LIN/x", field))
    inverses = [field.inv(x) for x in challenges]

    # Coefficient of generator i after all rounds: the product of round
    # inverses where i fell in the upper half.  Built low bit first, so the
    # last round is processed first.
    coeffs = [1]
    for x_inv in reversed(inverses):
        coeffs = coeffs + [(ci * x_inv) % q for ci in coeffs]
    a_final = sum(ai * ci for ai, ci in zip(a, coeffs)) % q

    w0 = proof.final_scalar % q
    points = list(ped.gens(n))
    scalars = [(w0 * ci) % q for ci in coeffs]
    points.append(ped.U)
    scalars.append((w0 * a_final) % q)
    points.append(ped.H)
    scalars.append(proof.final_blind % q)
    # Subtract the folded commitment P = masks + c*(C_w + C_z) + sum x L/R.
    points.extend([proof.mask_vec, proof.mask_ip, c_w, c_z])
    scalars.extend([q - 1, q - 1, (q - c) % q, (q - c) % q])
    for (left, right), x, x_inv in zip(proof.rounds, challenges, inverses):
        points.extend([left, right])
        scalars.extend([(q - x_inv) % q, (q - x) % q])
    return backend.is_identity(backend.msm(points, scalars))


# -- bit proof (committed value in {0, 1}) -------------------------------------


@dataclass
class BitProof:
    """OR proof that a scalar commitment opens to 0 or to 1."""

    chal0: int
    chal1: int
    resp0: int
    resp1: int

    def write_into(self, backend, buf: bytearray) -> None:
        buf.extend(_scalars_blob([self.chal0, self.chal1, self.resp0, self.resp1]))

    @classmethod
    def read_from(cls, backend, reader: Reader) -> "BitProof":
        return cls(reader.scalar(), reader.scalar(), reader.scalar(),
                   reader.scalar())


def prove_bit(ped: Pedersen, transcript: Transcript, commitment, bit: int,
              blind: int, sampler: ScalarSampler) -> BitProof:
    backend = ped.backend
    field = backend.field
    q = field.q
    if bit not in (0, 1):
        raise WitnessOutOfRange(f"bit witness is {bit}")
    expect = ped.commit_scalar(bit, blind)
    if not backend.eq(expect, commitment):
        raise WitnessInconsistent("bit witness does not open the commitment")
    shifted = backend.sub(commitment, ped.U)  # commits to bit - 1
    if bit == 0:
        nonce = sampler.next()
        mask0 = backend.mul(ped.H, nonce)
        chal1, resp1 = sampler.next(), sampler.next()
        mask1 = backend.sub(backend.mul(ped.H, resp1),
                            backend.mul(shifted, chal1))
    else:
        chal0, resp0 = sampler.next(), sampler.next()
        mask0 = backend.sub(backend.mul(ped.H, resp0),
                            backend.mul(commitment, chal0))
        nonce = sampler.next()
        mask1 = backend.mul(ped.H, nonce)
    transcript.absorb("RNG/or", _points_blob(backend, mask0, mask1))
    c = transcript.challenge_scalar("RNG/or", field)
    if bit == 0:
        chal0 = (c - chal1) % q
        resp0 = (nonce + chal0 * blind) % q
    else:
        chal1 = (c - chal0) % q
        resp1 = (nonce + chal1 * blind) % q
    return BitProof(chal0, chal1, resp0, resp1)


def verify_bit(ped: Pedersen, transcript: Transcript, commitment,
               proof: BitProof) -> bool:
    backend = ped.backend
    field = backend.field
    q = field.q
    shifted = backend.sub(commitment, ped.U)
    mask0 = backend.sub(backend.mul(ped.H, proof.resp0 % q),
                        backend.mul(commitment, proof.chal0 % q))
    mask1 = backend.sub(backend.mul(ped.H, proof.resp1 % q),
                        backend.mul(shifted, proof.chal1 % q))
    transcript.absorb("RNG/or", _points_blob(backend, mask0, mask1))
    c = transcript.challenge_scalar("RNG/or", field)
    return (proof.chal0 + proof.chal1) % q == c


# -- interval proof (committed value in [lo, hi]) ------------------------------


@dataclass
class RangeProof:
    """Committed scalar lies in a public interval.

    Both slacks v = z - lo and w = hi - z are decomposed into bits; bit
    commitments carry OR proofs and each side carries a recomposition proof
    that the weighted bit sum matches the derived slack commitment.  Bounding
    both slacks by 2^L - 1 with L = bitlen(hi - lo) pins z into [lo, hi].
    """

    low_bits: list[object]
    low_proofs: list[BitProof]
    low_sum: SchnorrProof
    high_bits: list[object]
    high_proofs: list[BitProof]
    high_sum: SchnorrProof

    def write_into(self, backend, buf: bytearray) -> None:
        buf.extend(len(self.low_bits).to_bytes(2, "little"))
        for side_bits, side_proofs, side_sum in (
                (self.low_bits, self.low_proofs, self.low_sum),
                (self.high_bits, self.high_proofs, self.high_sum)):
            for pt in side_bits:
                buf.extend(backend.serialize(pt))
            for bp in side_proofs:
                bp.write_into(backend, buf)
            side_sum.write_into(backend, buf)

    @classmethod
    def read_from(cls, backend, reader: Reader) -> "RangeProof":
        nbits = int.from_bytes(reader.take(2), "little")
        sides = []
        for _ in range(2):
            bits = [_read_point(reader, backend) for _ in range(nbits)]
            proofs = [BitProof.read_from(backend, reader) for _ in range(nbits)]
            sides.append((bits, proofs, SchnorrProof.read_from(backend, reader)))
        return cls(sides[0][0], sides[0][1], sides[0][2],
                   sides[1][0], sides[1][1], sides[1][2])


def range_bit_count(lo: int, hi: int) -> int:
    if hi < lo:
        raise DegenerateParams(f"empty interval [{lo}, {hi}]")
    return (hi - lo).bit_length()


def _absorb_range_statement(transcript, backend, field, c_z, lo, hi) -> None:
    blob = (lo % field.q).to_bytes(32, "little")
    blob += (hi % field.q).to_bytes(32, "little")
    blob += backend.serialize(c_z)
    transcript.absorb("RNG/stmt", blob)


def _prove_side(ped, transcript, slack: int, slack_commit, slack_blind: int,
                nbits: int, sampler: ScalarSampler):
    backend = ped.backend
    field = backend.field
    q = field.q
    bits = [(slack >> i) & 1 for i in range(nbits)]
    blinds = [sampler.next() for _ in range(nbits)]
    commits = [ped.commit_scalar(b, s) for b, s in zip(bits, blinds)]
    transcript.absorb("RNG/bit", _points_blob(backend, *commits))
    proofs = [
        prove_bit(ped, transcript, cb, b, s, sampler)
        for cb, b, s in zip(commits, bits, blinds)
    ]
    # sum 2^i B_i - C_slack is a pure blinding term; prove it over base H.
    weighted = backend.msm(commits, [1 << i for i in range(nbits)]) \
        if nbits else backend.identity()
    diff = backend.sub(weighted, slack_commit)
    t = (sum((1 << i) * s for i, s in enumerate(blinds)) - slack_blind) % q
    transcript.absorb("RNG/sum", backend.serialize(diff))
    sum_proof = prove_schnorr(backend, transcript, [ped.H], diff, [t], sampler)
    return commits, proofs, sum_proof


def _verify_side(ped, transcript, slack_commit, nbits: int, bits, proofs,
                 sum_proof) -> bool:
    backend = ped.backend
    if len(bits) != nbits or len(proofs) != nbits:
        return False
    transcript.absorb("RNG/bit", _points_blob(backend, *bits))
    for cb, bp in zip(bits, proofs):
        if not verify_bit(ped, transcript, cb, bp):
            return False
    weighted = backend.msm(list(bits), [1 << i for i in range(nbits)]) \
        if nbits else backend.identity()
    diff = backend.sub(weighted, slack_commit)
    transcript.absorb("RNG/sum", backend.serialize(diff))
    return verify_schnorr(backend, transcript, [ped.H], diff, sum_proof)


def prove_range(ped: Pedersen, transcript: Transcript, c_z, z: int,
                blind: int, lo: int, hi: int,
                sampler: ScalarSampler) -> RangeProof:
    """Prove lo <= z <= hi for the signed value inside c_z."""
    backend = ped.backend
    field = backend.field
    q = field.q
    nbits = range_bit_count(lo, hi)
    if not lo <= z <= hi:
        raise WitnessOutOfRange(f"value {z} outside [{lo}, {hi}]")
    expect = ped.commit_scalar(z % q, blind)
    if not backend.eq(expect, c_z):
        raise WitnessInconsistent("range witness does not open the commitment")
    _absorb_range_statement(transcript, backend, field, c_z, lo, hi)
    low_commit = backend.sub(c_z, backend.mul(ped.U, lo % q))
    high_commit = backend.sub(backend.mul(ped.U, hi % q), c_z)
    lb, lp, ls = _prove_side(
        ped, transcript, z - lo, low_commit, blind, nbits, sampler)
    hb, hp, hs = _prove_side(
        ped, transcript, hi - z, high_commit, (q - blind) % q, nbits, sampler)
    return RangeProof(lb, lp, ls, hb, hp, hs)


def verify_range(ped: Pedersen, transcript: Transcript, c_z, lo: int, hi: int,
                 proof: RangeProof) -> bool:
    backend = ped.backend
    field = backend.field
    if hi < lo:
        return False
    nbits = range_bit_count(lo, hi)
    _absorb_range_statement(transcript, backend, field, c_z, lo, hi)
    low_commit = backend.sub(c_z, backend.mul(ped.U, lo % field.q))
    high_commit = backend.sub(backend.mul(ped.U, hi % field.q), c_z)
    if not _verify_side(ped, transcript, low_commit, nbits,
                        proof.low_bits, proof.low_proofs, proof.low_sum):
        return False
    return _verify_side(ped, transcript, high_commit, nbits,
                        proof.high_bits, proof.high_proofs, proof.high_sum)


# -- product-zero proof --------------------------------------------------------


@dataclass
class ProductZeroProof:
    """(1 - u) * v = 0 for a committed bit u and committed coordinate v.

    Equivalently: wherever the indicator is 0 the coordinate is 0.  Written
    as knowledge of (v, s_v, t) with C_v = v U + s_v H and v (U - C_u) + t H
    the identity, with the response for v shared across both equations.
    """

    mask_open: object
    mask_prod: object
    resp_value: int
    resp_open: int
    resp_prod: int

    def write_into(self, backend, buf: bytearray) -> None:
        buf.extend(backend.serialize(self.mask_open))
        buf.extend(backend.serialize(self.mask_prod))
        buf.extend(_scalars_blob(
            [self.resp_value, self.resp_open, self.resp_prod]))

    @classmethod
    def read_from(cls, backend, reader: Reader) -> "ProductZeroProof":
        mask_open = _read_point(reader, backend)
        mask_prod = _read_point(reader, backend)
        return cls(mask_open, mask_prod, reader.scalar(), reader.scalar(),
                   reader.scalar())


def prove_product_zero(ped: Pedersen, transcript: Transcript, c_u, c_v,
                       u: int, blind_u: int, value: int, blind_v: int,
                       sampler: ScalarSampler) -> ProductZeroProof:
    backend = ped.backend
    field = backend.field
    q = field.q
    if ((1 - u) * value) % q != 0:
        raise WitnessInconsistent("(1 - u) * v is nonzero")
    if not backend.eq(ped.commit_scalar(u, blind_u), c_u):
        raise WitnessInconsistent("indicator witness does not open c_u")
    if not backend.eq(ped.commit_scalar(value, blind_v), c_v):
        raise WitnessInconsistent("coordinate witness does not open c_v")
    shifted = backend.sub(ped.U, c_u)  # (1 - u) U - s_u H
    t = (value * blind_u) % q
    transcript.absorb("PRD/stmt", _points_blob(backend, c_u, c_v))
    d = sampler.next()
    e_open = sampler.next()
    e_prod = sampler.next()
    mask_open = ped.commit_scalar(d, e_open)
    mask_prod = backend.add(backend.mul(shifted, d), backend.mul(ped.H, e_prod))
    transcript.absorb("PRD/a", _points_blob(backend, mask_open, mask_prod))
    c = transcript.challenge_scalar("PRD/c", field)
    return ProductZeroProof(
        mask_open, mask_prod,
        (d + c * value) % q,
        (e_open + c * blind_v) % q,
        (e_prod + c * t) % q,
    )


def verify_product_zero(ped: Pedersen, transcript: Transcript, c_u, c_v,
                        proof: ProductZeroProof) -> bool:
    backend = ped.backend
    field = backend.field
    q = field.q
    shifted = backend.sub(ped.U, c_u)
    transcript.absorb("PRD/stmt", _points_blob(backend, c_u, c_v))
    transcript.absorb(
        "PRD/a", _points_blob(backend, proof.mask_open, proof.mask_prod))
    c = transcript.challenge_scalar("PRD/c", field)
    lhs1 = ped.commit_scalar(proof.resp_value % q, proof.resp_open % q)
    rhs1 = backend.add(proof.mask_open, backend.mul(c_v, c))
    if not backend.eq(lhs1, rhs1):
        return False
    lhs2 = backend.add(backend.mul(shifted, proof.resp_value % q),
                       backend.mul(ped.H, proof.resp_prod % q))
    return backend.eq(lhs2, proof.mask_prod)
