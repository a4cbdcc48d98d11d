"""Norm-bounded drift proofs: parameters, refusal, wire shape, soundness."""

from __future__ import annotations

import math
import random

import numpy as np
import pytest

from driftcert.errors import (DegenerateParams, DimensionTooLarge,
                              ProjectionExceedsThreshold, WireFormatError)
from driftcert.groups import get_backend
from driftcert.nbdp import (MAX_DIM, NbdpProof, calibrate_nbdp,
                            derive_nbdp_params, padded_dim, projection_values,
                            prove_nbdp, verify_nbdp)
from driftcert.pedersen import Pedersen
from driftcert.prf import PrfStream
from driftcert.subproofs import ScalarSampler
from driftcert.transcript import Transcript


def ctx():
    backend = get_backend("toy")
    return backend, Pedersen(backend)


def fresh(label: bytes = b"nbdp"):
    t = Transcript()
    t.absorb("FTI/v1", label)
    return t


def sampler(tag: bytes):
    backend = get_backend("toy")
    return ScalarSampler(PrfStream(tag.ljust(32, b"\x00"), "NBDP/proj"),
                         backend.field)


def drift_case(dim, norm, frac_bits, rng):
    """Signed encoded drift of the requested Frobenius norm."""
    vec = rng.standard_normal(dim)
    vec *= norm / np.linalg.norm(vec)
    return np.rint(vec * 2.0**frac_bits).astype(np.int64)


def commit_pair(ped, backend, delta_signed, dim, rng):
    q = backend.field.q
    base = [int(rng.integers(-1000, 1000)) % q for _ in range(dim)]
    s0 = int(rng.integers(1, 2**30))
    s1 = int(rng.integers(1, 2**30))
    tuned = [(b + int(d)) % q for b, d in zip(base, delta_signed)]
    c_base = ped.commit_vector(base, s0)
    c_tuned = ped.commit_vector(tuned, s1)
    return c_base, c_tuned, (s1 - s0) % q


# -- parameter derivation ------------------------------------------------------

def test_param_formulas():
    p = derive_nbdp_params(0.05, 0.01, 1, frac_bits=16, dim=64)
    assert p.m == math.ceil(math.log(2.0 / 0.01)) == 6
    assert p.tau == pytest.approx(
        0.05 * math.sqrt(2.0 * math.log(2.0 * 6 / 0.01)))
    assert p.threshold == int(p.tau * 2.0**16)
    p48 = derive_nbdp_params(0.05, 0.01, 48, frac_bits=32, dim=4096)
    assert p48.m == math.ceil(48 * math.log(200.0)) == 255


def test_param_validation():
    with pytest.raises(DegenerateParams):
        derive_nbdp_params(0.0, dim=64)
    with pytest.raises(DegenerateParams):
        derive_nbdp_params(0.05, delta=1.5, dim=64)
    with pytest.raises(DegenerateParams):
        derive_nbdp_params(0.05, kappa=0, dim=64)
    with pytest.raises(DegenerateParams):
        derive_nbdp_params(0.05, dim=48)
    with pytest.raises(DimensionTooLarge):
        derive_nbdp_params(0.05, dim=MAX_DIM * 2)
    with pytest.raises(DegenerateParams):
        derive_nbdp_params(1e70, dim=64, frac_bits=32,
                           field_modulus=get_backend("toy").field.q)


def test_padded_dim():
    assert padded_dim(1) == 1
    assert padded_dim(5) == 8
    assert padded_dim(64) == 64
    with pytest.raises(DegenerateParams):
        padded_dim(0)


def test_params_digest_binds_all_fields():
    base = derive_nbdp_params(0.05, 0.01, 1, frac_bits=16, dim=64)
    variants = [
        derive_nbdp_params(0.06, 0.01, 1, frac_bits=16, dim=64),
        derive_nbdp_params(0.05, 0.02, 1, frac_bits=16, dim=64),
        derive_nbdp_params(0.05, 0.01, 2, frac_bits=16, dim=64),
        derive_nbdp_params(0.05, 0.01, 1, frac_bits=17, dim=64),
        derive_nbdp_params(0.05, 0.01, 1, frac_bits=16, dim=128),
    ]
    digests = {p.digest() for p in variants}
    assert base.digest() not in digests
    assert len(digests) == len(variants)


# -- projection oracle ---------------------------------------------------------

def test_projection_values_match_python_oracle():
    p = derive_nbdp_params(0.05, 0.01, 1, frac_bits=16, dim=32)
    seed = bytes(range(32))
    rng = np.random.default_rng(9001)
    delta = rng.integers(-500, 500, size=32).astype(np.int64)
    got = projection_values(p, seed, delta)
    signs = PrfStream(seed, "NBDP/z").rademacher(p.m * 32).reshape(p.m, 32)
    for i in range(p.m):
        want = sum(int(s) * int(d) for s, d in zip(signs[i], delta))
        assert got[i] == want


def test_projection_values_pad_short_vectors():
    p = derive_nbdp_params(0.05, 0.01, 1, frac_bits=16, dim=32)
    seed = bytes(32)
    delta = np.array([7, -3, 11], dtype=np.int64)
    padded = np.zeros(32, dtype=np.int64)
    padded[:3] = delta
    assert projection_values(p, seed, delta) == \
        projection_values(p, seed, padded)


def test_projection_values_exact_beyond_int64():
    # giant magnitudes force the bignum path; both paths must agree on
    # values small enough for either
    p = derive_nbdp_params(0.05, 0.01, 1, frac_bits=16, dim=8)
    seed = bytes(range(32))
    small = [3, -1, 4, -1, 5, -9, 2, -6]
    got_small = projection_values(p, seed, np.array(small, dtype=np.int64))
    big = [v * 2**80 for v in small]
    got_big = projection_values(p, seed, np.array(big, dtype=object))
    assert [v * 2**80 for v in got_small] == got_big


# -- prove / verify ------------------------------------------------------------

def test_honest_round_trip():
    backend, ped = ctx()
    rng = np.random.default_rng(9002)
    p = derive_nbdp_params(0.05, 0.01, 1, frac_bits=16, dim=64)
    delta = drift_case(64, 0.5 * 0.05, 16, rng)
    c_base, c_tuned, blind = commit_pair(ped, backend, delta, 64, rng)
    proof = prove_nbdp(ped, fresh(), p, c_base, c_tuned, delta, blind,
                       sampler(b"n"))
    assert verify_nbdp(ped, fresh(), p, c_base, c_tuned, proof)


def test_prover_refuses_oversized_drift():
    backend, ped = ctx()
    rng = np.random.default_rng(9003)
    p = derive_nbdp_params(0.05, 0.01, 1, frac_bits=16, dim=64)
    delta = drift_case(64, 10.0 * 0.05, 16, rng)
    c_base, c_tuned, blind = commit_pair(ped, backend, delta, 64, rng)
    with pytest.raises(ProjectionExceedsThreshold) as exc:
        prove_nbdp(ped, fresh(), p, c_base, c_tuned, delta, blind,
                   sampler(b"n"))
    assert "projection" in str(exc.value)


def test_verify_rejects_wrong_statement():
    backend, ped = ctx()
    rng = np.random.default_rng(9004)
    p = derive_nbdp_params(0.05, 0.01, 1, frac_bits=16, dim=64)
    delta = drift_case(64, 0.5 * 0.05, 16, rng)
    c_base, c_tuned, blind = commit_pair(ped, backend, delta, 64, rng)
    proof = prove_nbdp(ped, fresh(), p, c_base, c_tuned, delta, blind,
                       sampler(b"n"))
    # swapped roles change the statement
    assert not verify_nbdp(ped, fresh(), p, c_tuned, c_base, proof)
    # a different params digest is rejected before any work
    p2 = derive_nbdp_params(0.06, 0.01, 1, frac_bits=16, dim=64)
    assert not verify_nbdp(ped, fresh(), p2, c_base, c_tuned, proof)
    # record count mismatch
    short = NbdpProof(proof.params_digest, proof.records[:-1])
    assert not verify_nbdp(ped, fresh(), p, c_base, c_tuned, short)


def test_wrong_blind_yields_invalid_proof():
    # the claimed projections are true, but the drift commitment does not
    # open under the stated blinding; every linear proof then fails
    backend, ped = ctx()
    rng = np.random.default_rng(9005)
    p = derive_nbdp_params(0.05, 0.01, 1, frac_bits=16, dim=64)
    delta = drift_case(64, 0.5 * 0.05, 16, rng)
    c_base, c_tuned, blind = commit_pair(ped, backend, delta, 64, rng)
    proof = prove_nbdp(ped, fresh(), p, c_base, c_tuned, delta,
                       (blind + 1) % backend.field.q, sampler(b"n"))
    assert not verify_nbdp(ped, fresh(), p, c_base, c_tuned, proof)


# -- wire format ---------------------------------------------------------------

def proof_for_dim(dim, tag):
    backend, ped = ctx()
    rng = np.random.default_rng(sum(tag))
    p = derive_nbdp_params(0.05, 0.01, 1, frac_bits=16, dim=dim)
    delta = drift_case(dim, 0.5 * 0.05, 16, rng)
    c_base, c_tuned, blind = commit_pair(ped, backend, delta, dim, rng)
    proof = prove_nbdp(ped, fresh(), p, c_base, c_tuned, delta, blind,
                       sampler(tag))
    return backend, ped, p, c_base, c_tuned, proof


def test_wire_round_trip():
    backend, ped, p, c_base, c_tuned, proof = proof_for_dim(16, b"w1")
    blob = proof.to_bytes(backend)
    back = NbdpProof.from_bytes(backend, blob)
    assert back.to_bytes(backend) == blob
    assert verify_nbdp(ped, fresh(), p, c_base, c_tuned, back)


def test_proof_bytes_do_not_depend_on_dim():
    # the fixed-width linear slots keep the serialized size a function of
    # the parameters alone, so block shape does not leak through length
    sizes = set()
    for dim in (8, 64, 256):
        backend, _, _, _, _, proof = proof_for_dim(dim, b"sz")
        sizes.add(len(proof.to_bytes(backend)))
    assert len(sizes) == 1


def test_zero_pad_tail_is_enforced():
    backend, ped, p, c_base, c_tuned, proof = proof_for_dim(16, b"w2")
    blob = bytearray(proof.to_bytes(backend))
    # the slot tail for dim 16 (4 rounds of 20 possible) is zero padding;
    # flip one pad byte inside the first record's slot
    from driftcert.nbdp import _linear_slot_bytes
    slot = _linear_slot_bytes(backend)
    e = backend.element_bytes
    # slot layout: 2 points, round count, rounds, 2 scalars, then padding
    used = 2 * e + 2 + 2 * 4 * e + 64
    start = 32 + 4 + e  # params digest, count, first record's c_z
    pad_index = start + used + 3
    blob[pad_index] ^= 0xFF
    with pytest.raises(WireFormatError):
        NbdpProof.from_bytes(backend, bytes(blob))


def test_truncated_proof_rejected():
    backend, _, _, _, _, proof = proof_for_dim(16, b"w3")
    blob = proof.to_bytes(backend)
    with pytest.raises(WireFormatError):
        NbdpProof.from_bytes(backend, blob[:-1])
    with pytest.raises(WireFormatError):
        NbdpProof.from_bytes(backend, blob + b"\x00")


# -- statistical behaviour -----------------------------------------------------

def test_soundness_random_direction():
    # drift at twice the bound in a random direction is caught with
    # probability well above 0.99 at the default kappa
    rng = np.random.default_rng(9006)
    p = derive_nbdp_params(0.05, 0.01, 48, frac_bits=16, dim=256)
    caught = 0
    for _ in range(30):
        delta = drift_case(256, 2.0 * 0.05, 16, rng)
        z = projection_values(p, rng.bytes(32), delta)
        if max(abs(v) for v in z) > p.threshold:
            caught += 1
    assert caught >= 29


def test_completeness_failure_rate_is_small():
    # honest drift at half the bound: refusals occur at rate <= delta
    rng = np.random.default_rng(9007)
    p = derive_nbdp_params(0.05, 0.05, 4, frac_bits=16, dim=256)
    refusals = 0
    for _ in range(100):
        delta = drift_case(256, 0.5 * 0.05, 16, rng)
        z = projection_values(p, rng.bytes(32), delta)
        if max(abs(v) for v in z) > p.threshold:
            refusals += 1
    assert refusals <= 10


def test_calibrate_nbdp_smoke():
    rows = calibrate_nbdp(1.0, [1, 8], 50, epsilon=0.05, dim=256,
                          frac_bits=16, seed=3)
    assert [r["kappa"] for r in rows] == [1, 8]
    assert all(0.0 <= r["detection"] <= 1.0 for r in rows)
    # more projections can only help detection on the same drift family
    assert rows[1]["detection"] >= rows[0]["detection"] - 0.1
    with pytest.raises(DegenerateParams):
        calibrate_nbdp(1.0, [1], 0)
    with pytest.raises(DegenerateParams):
        calibrate_nbdp(1.0, [1], 1, direction="spiral")
