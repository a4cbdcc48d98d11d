"""Sigma protocols and the inner-product argument, against naive oracles."""

from __future__ import annotations

import random

import pytest

from driftcert.errors import (DegenerateParams, WireFormatError,
                              WitnessInconsistent, WitnessOutOfRange)
from driftcert.groups import get_backend
from driftcert.pedersen import Pedersen
from driftcert.prf import PrfStream
from driftcert.subproofs import (BitProof, LinearProof, ProductZeroProof,
                                 RangeProof, ScalarSampler, SchnorrProof,
                                 prove_bit, prove_linear, prove_product_zero,
                                 prove_range, prove_same_value, prove_schnorr,
                                 range_bit_count, verify_bit, verify_linear,
                                 verify_product_zero, verify_range,
                                 verify_same_value, verify_schnorr)
from driftcert.transcript import Transcript
from driftcert.wire import Reader


def ctx():
    backend = get_backend("toy")
    return backend, Pedersen(backend)


def sampler(tag: bytes):
    backend = get_backend("toy")
    seed = tag.ljust(32, b"\x00")
    return ScalarSampler(PrfStream(seed, "NBDP/proj"), backend.field)


def fresh(label: bytes = b"stmt"):
    t = Transcript()
    t.absorb("FTI/v1", label)
    return t


def test_sampler_is_deterministic():
    s1 = sampler(b"a")
    s2 = sampler(b"a")
    assert [s1.next() for _ in range(5)] == [s2.next() for _ in range(5)]
    assert sampler(b"b").next() != sampler(b"a").next()


# -- Schnorr -------------------------------------------------------------------

def test_schnorr_round_trip():
    backend, ped = ctx()
    bases = [ped.gens(1)[0], ped.H]
    wit = [3, 5]
    c = backend.msm(bases, wit)
    proof = prove_schnorr(backend, fresh(), bases, c, wit, sampler(b"s"))
    assert verify_schnorr(backend, fresh(), bases, c, proof)


def test_schnorr_bad_witness_raises():
    backend, ped = ctx()
    bases = [ped.gens(1)[0], ped.H]
    c = backend.msm(bases, [3, 5])
    with pytest.raises(WitnessInconsistent):
        prove_schnorr(backend, fresh(), bases, c, [3, 6], sampler(b"s"))
    with pytest.raises(WitnessInconsistent):
        prove_schnorr(backend, fresh(), bases, c, [3], sampler(b"s"))


def test_schnorr_tamper_and_transcript_binding():
    backend, ped = ctx()
    bases = [ped.gens(1)[0], ped.H]
    c = backend.msm(bases, [3, 5])
    proof = prove_schnorr(backend, fresh(), bases, c, [3, 5], sampler(b"s"))
    bad = SchnorrProof(proof.mask, [proof.responses[0] + 1,
                                    proof.responses[1]])
    assert not verify_schnorr(backend, fresh(), bases, c, bad)
    # a different transcript prefix must not accept the same proof
    assert not verify_schnorr(backend, fresh(b"other"), bases, c, proof)


def test_schnorr_wire_round_trip():
    backend, ped = ctx()
    bases = [ped.gens(1)[0], ped.H]
    c = backend.msm(bases, [3, 5])
    proof = prove_schnorr(backend, fresh(), bases, c, [3, 5], sampler(b"s"))
    buf = bytearray()
    proof.write_into(backend, buf)
    back = SchnorrProof.read_from(backend, Reader(bytes(buf)))
    assert verify_schnorr(backend, fresh(), bases, c, back)
    with pytest.raises(WireFormatError):
        SchnorrProof.read_from(backend, Reader(bytes(buf[:-1])))


def test_same_value_proof():
    backend, ped = ctx()
    w = [7, 11, 13, 17]
    c1 = ped.commit_vector(w, 101)
    c2 = ped.commit_vector(w, 202)
    proof = prove_same_value(ped, fresh(), c1, c2, 101, 202, sampler(b"f"))
    assert verify_same_value(ped, fresh(), c1, c2, proof)
    # commitments to different vectors cannot be proven equal
    c3 = ped.commit_vector([7, 11, 13, 18], 202)
    with pytest.raises(WitnessInconsistent):
        prove_same_value(ped, fresh(), c1, c3, 101, 202, sampler(b"f"))
    assert not verify_same_value(ped, fresh(), c1, c3, proof)


# -- linear argument -----------------------------------------------------------

def linear_case(n, rng, backend, ped, tag):
    q = backend.field.q
    a = [rng.randrange(q) for _ in range(n)]
    w = [rng.randrange(-50, 51) % q for _ in range(n)]
    z = sum(ai * wi for ai, wi in zip(a, w)) % q
    blind_w, blind_z = rng.randrange(q), rng.randrange(q)
    c_w = ped.commit_vector(w, blind_w)
    c_z = ped.commit_scalar(z, blind_z)
    proof = prove_linear(ped, fresh(), a, c_w, c_z, w, blind_w, z, blind_z,
                         sampler(tag))
    return a, c_w, c_z, proof


def test_linear_against_brute_force_oracle():
    backend, ped = ctx()
    rng = random.Random(7001)
    for trial in range(60):
        n = rng.choice([2, 4, 8, 16])
        a, c_w, c_z, proof = linear_case(
            n, rng, backend, ped, b"lin%d" % trial)
        assert verify_linear(ped, fresh(), a, c_w, c_z, proof)


def test_linear_false_claim_raises():
    backend, ped = ctx()
    q = backend.field.q
    a = [1, 2, 3, 4]
    w = [5, 6, 7, 8]
    z = sum(x * y for x, y in zip(a, w)) % q
    c_w = ped.commit_vector(w, 9)
    c_z = ped.commit_scalar((z + 1) % q, 10)
    with pytest.raises(WitnessInconsistent):
        prove_linear(ped, fresh(), a, c_w, c_z, w, 9, (z + 1) % q, 10,
                     sampler(b"x"))


def test_linear_requires_power_of_two():
    backend, ped = ctx()
    a = [1, 2, 3]
    c_w = ped.commit_vector([0, 0, 0], 1)
    c_z = ped.commit_scalar(0, 1)
    with pytest.raises(DegenerateParams):
        prove_linear(ped, fresh(), a, c_w, c_z, [0, 0, 0], 1, 0, 1,
                     sampler(b"x"))


def test_linear_rejects_wrong_statement_or_tamper():
    backend, ped = ctx()
    rng = random.Random(7002)
    a, c_w, c_z, proof = linear_case(8, rng, backend, ped, b"t")
    a2 = list(a)
    a2[0] = (a2[0] + 1) % backend.field.q
    assert not verify_linear(ped, fresh(), a2, c_w, c_z, proof)
    assert not verify_linear(ped, fresh(b"other"), a, c_w, c_z, proof)
    bad = LinearProof(proof.mask_vec, proof.mask_ip, proof.rounds,
                      (proof.final_scalar + 1) % backend.field.q,
                      proof.final_blind)
    assert not verify_linear(ped, fresh(), a, c_w, c_z, bad)
    swapped = LinearProof(proof.mask_vec, proof.mask_ip,
                          [(r, l) for l, r in proof.rounds],
                          proof.final_scalar, proof.final_blind)
    assert not verify_linear(ped, fresh(), a, c_w, c_z, swapped)


def test_linear_proof_size_law():
    # serialized size is affine in the round count log2(n)
    backend, ped = ctx()
    rng = random.Random(7003)
    sizes = {}
    for n in (4, 64, 1024):
        a, c_w, c_z, proof = linear_case(n, rng, backend, ped,
                                         b"sz%d" % n)
        assert len(proof.rounds) == n.bit_length() - 1
        buf = bytearray()
        proof.write_into(backend, buf)
        sizes[n] = len(buf)
    per_round = 2 * backend.element_bytes
    assert sizes[64] - sizes[4] == 4 * per_round
    assert sizes[1024] - sizes[64] == 4 * per_round


def test_linear_wire_round_trip():
    backend, ped = ctx()
    rng = random.Random(7004)
    a, c_w, c_z, proof = linear_case(16, rng, backend, ped, b"w")
    buf = bytearray()
    proof.write_into(backend, buf)
    back = LinearProof.read_from(backend, Reader(bytes(buf)))
    assert verify_linear(ped, fresh(), a, c_w, c_z, back)


# -- bit proof -----------------------------------------------------------------

def test_bit_proof_both_values():
    backend, ped = ctx()
    for bit in (0, 1):
        c = ped.commit_scalar(bit, 77)
        proof = prove_bit(ped, fresh(), c, bit, 77, sampler(b"b%d" % bit))
        assert verify_bit(ped, fresh(), c, proof)


def test_bit_proof_guards_and_tampering():
    backend, ped = ctx()
    c2 = ped.commit_scalar(2, 77)
    with pytest.raises(WitnessOutOfRange):
        prove_bit(ped, fresh(), c2, 2, 77, sampler(b"b"))
    c = ped.commit_scalar(1, 77)
    with pytest.raises(WitnessInconsistent):
        prove_bit(ped, fresh(), c, 1, 78, sampler(b"b"))
    proof = prove_bit(ped, fresh(), c, 1, 77, sampler(b"b"))
    bad = BitProof(proof.chal0 + 1, proof.chal1, proof.resp0, proof.resp1)
    assert not verify_bit(ped, fresh(), c, bad)
    # a proof for a commitment to 2 cannot exist: fake one from the proof
    # for 1 and check it fails against c2
    assert not verify_bit(ped, fresh(), c2, proof)


# -- range proof ---------------------------------------------------------------

def test_range_bit_count():
    assert range_bit_count(0, 0) == 0
    assert range_bit_count(-5, 5) == 4
    assert range_bit_count(0, 255) == 8
    with pytest.raises(DegenerateParams):
        range_bit_count(3, 2)


def test_range_accepts_boundaries():
    backend, ped = ctx()
    q = backend.field.q
    t_bound = 1000
    for z in (-t_bound, -1, 0, 1, t_bound):
        c = ped.commit_scalar(z % q, 55)
        proof = prove_range(ped, fresh(), c, z, 55, -t_bound, t_bound,
                            sampler(b"r"))
        assert verify_range(ped, fresh(), c, -t_bound, t_bound, proof)


def test_range_rejects_out_of_interval_witness():
    backend, ped = ctx()
    q = backend.field.q
    c = ped.commit_scalar(1001 % q, 55)
    with pytest.raises(WitnessOutOfRange):
        prove_range(ped, fresh(), c, 1001, 55, -1000, 1000, sampler(b"r"))
    c = ped.commit_scalar((-1001) % q, 55)
    with pytest.raises(WitnessOutOfRange):
        prove_range(ped, fresh(), c, -1001, 55, -1000, 1000, sampler(b"r"))


def test_range_forged_proof_rejected():
    # a valid proof for T transplanted onto a commitment of T + 1 fails
    backend, ped = ctx()
    q = backend.field.q
    c_good = ped.commit_scalar(1000, 55)
    proof = prove_range(ped, fresh(), c_good, 1000, 55, -1000, 1000,
                        sampler(b"r"))
    c_bad = ped.commit_scalar(1001, 55)
    assert not verify_range(ped, fresh(), c_bad, -1000, 1000, proof)


def test_range_wire_round_trip():
    backend, ped = ctx()
    c = ped.commit_scalar(37, 55)
    proof = prove_range(ped, fresh(), c, 37, 55, -64, 64, sampler(b"r"))
    buf = bytearray()
    proof.write_into(backend, buf)
    back = RangeProof.read_from(backend, Reader(bytes(buf)))
    assert verify_range(ped, fresh(), c, -64, 64, back)
    flipped = bytes(buf[:40]) + bytes([buf[40] ^ 1]) + bytes(buf[41:])
    decoded = RangeProof.read_from(backend, Reader(flipped))
    assert not verify_range(ped, fresh(), c, -64, 64, decoded)


# -- product-zero proof --------------------------------------------------------

def test_product_zero_honest_cases():
    backend, ped = ctx()
    cases = [(1, 123), (1, 0), (0, 0)]
    for u, v in cases:
        c_u = ped.commit_scalar(u, 31)
        c_v = ped.commit_scalar(v, 41)
        proof = prove_product_zero(ped, fresh(), c_u, c_v, u, 31, v, 41,
                                   sampler(b"p"))
        assert verify_product_zero(ped, fresh(), c_u, c_v, proof)


def test_product_zero_rejects_hidden_coordinate():
    backend, ped = ctx()
    c_u = ped.commit_scalar(0, 31)
    c_v = ped.commit_scalar(9, 41)
    with pytest.raises(WitnessInconsistent):
        prove_product_zero(ped, fresh(), c_u, c_v, 0, 31, 9, 41, sampler(b"p"))
    # transplant a valid proof for (1, 9) onto the indicator 0 statement
    c_u1 = ped.commit_scalar(1, 31)
    proof = prove_product_zero(ped, fresh(), c_u1, c_v, 1, 31, 9, 41,
                               sampler(b"p"))
    assert not verify_product_zero(ped, fresh(), c_u, c_v, proof)


def test_product_zero_tamper():
    backend, ped = ctx()
    c_u = ped.commit_scalar(1, 31)
    c_v = ped.commit_scalar(5, 41)
    proof = prove_product_zero(ped, fresh(), c_u, c_v, 1, 31, 5, 41,
                               sampler(b"p"))
    bad = ProductZeroProof(proof.mask_open, proof.mask_prod,
                           proof.resp_value + 1, proof.resp_open,
                           proof.resp_prod)
    assert not verify_product_zero(ped, fresh(), c_u, c_v, bad)
