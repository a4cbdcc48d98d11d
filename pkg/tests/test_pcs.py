"""Polynomial commitments: Horner oracle equivalence, SRS I/O, tamper."""

from __future__ import annotations

import random

import pytest

from driftcert.errors import (DegreeExceeded, SrsBackendMismatch,
                              WireFormatError)
from driftcert.groups import get_backend
from driftcert.pcs import (KzgPcs, MerklePcs, bipoly_eval, load_srs,
                           poly_divide_linear, poly_eval, save_srs, setup_kzg)
from driftcert.prf import PrfStream

SEED = bytes(range(32))


def naive_bipoly(coeffs, x, y, q):
    """Double-sum oracle, independent of the Horner evaluation."""
    total = 0
    for i, row in enumerate(coeffs):
        for j, c in enumerate(row):
            total += c * pow(x, i, q) * pow(y, j, q)
    return total % q


def random_grid(rng, rows, cols, q):
    return [[rng.randrange(q) for _ in range(cols)] for _ in range(rows)]


def toy_pcs(deg=7):
    backend = get_backend("toy")
    return KzgPcs(setup_kzg(backend, deg, deg, SEED))


def merkle_pcs(deg=7):
    return MerklePcs(get_backend("toy").field, deg, deg)


# -- polynomial helpers --------------------------------------------------------

def test_poly_eval_matches_oracle():
    field = get_backend("toy").field
    rng = random.Random(8001)
    for _ in range(100):
        coeffs = [rng.randrange(field.q) for _ in range(rng.randrange(1, 9))]
        x = rng.randrange(field.q)
        want = sum(c * pow(x, i, field.q) for i, c in enumerate(coeffs)) % field.q
        assert poly_eval(coeffs, x, field) == want


def test_bipoly_eval_matches_oracle():
    field = get_backend("toy").field
    rng = random.Random(8002)
    for _ in range(100):
        coeffs = random_grid(rng, rng.randrange(1, 7), rng.randrange(1, 7),
                             field.q)
        x, y = rng.randrange(field.q), rng.randrange(field.q)
        assert bipoly_eval(coeffs, x, y, field) == \
            naive_bipoly(coeffs, x, y, field.q)


def test_bipoly_monomial_xy():
    field = get_backend("toy").field
    # P = X*Y evaluated at (2, 3)
    assert bipoly_eval([[0, 0], [0, 1]], 2, 3, field) == 6


def test_poly_divide_linear_identity():
    field = get_backend("toy").field
    q = field.q
    rng = random.Random(8003)
    for _ in range(50):
        coeffs = [rng.randrange(q) for _ in range(rng.randrange(1, 8))]
        point = rng.randrange(q)
        quotient, rem = poly_divide_linear(coeffs, point, field)
        assert rem == poly_eval(coeffs, point, field)
        # P(X) == (X - point) * Q(X) + rem at a random probe
        probe = rng.randrange(q)
        lhs = poly_eval(coeffs, probe, field)
        rhs = ((probe - point) * poly_eval(quotient or [0], probe, field)
               + rem) % q
        assert lhs == rhs


# -- KZG scheme ----------------------------------------------------------------

def test_kzg_open_verify_against_oracle():
    pcs = toy_pcs()
    q = pcs.field.q
    rng = random.Random(8004)
    for trial in range(100):
        rows = rng.randrange(1, 9)
        cols = rng.randrange(1, 9)
        coeffs = random_grid(rng, rows, cols, q)
        stream = PrfStream(SEED, "NBDP/proj").child_seed(f"kzg{trial}")
        rand = PrfStream(stream, "SDIP/chal")
        com, secret = pcs.commit(coeffs, rand)
        x, y = rng.randrange(q), rng.randrange(q)
        value, proof = pcs.open_at(coeffs, secret, x, y)
        assert value == naive_bipoly(coeffs, x, y, q)
        assert pcs.verify_at(com, x, y, value, proof)
        assert not pcs.verify_at(com, x, y, (value + 1) % q, proof)


def test_kzg_degree_bound_enforced():
    pcs = toy_pcs(deg=3)
    rand = PrfStream(SEED, "SDIP/chal")
    with pytest.raises(DegreeExceeded):
        pcs.commit([[0] * 5 for _ in range(2)], rand)
    with pytest.raises(DegreeExceeded):
        pcs.commit([[0] * 2 for _ in range(5)], rand)


def test_kzg_commitment_is_hiding_masked():
    # same grid, different commit randomness: different commitment bytes
    pcs = toy_pcs()
    coeffs = [[1, 2], [3, 4]]
    c1, _ = pcs.commit(coeffs, PrfStream(SEED, "SDIP/chal"))
    c2, _ = pcs.commit(coeffs, PrfStream(bytes(32), "SDIP/chal"))
    assert c1 != c2


def test_kzg_proof_tamper_rejected():
    pcs = toy_pcs()
    q = pcs.field.q
    coeffs = [[5, 0], [0, 7]]
    com, secret = pcs.commit(coeffs, PrfStream(SEED, "SDIP/chal"))
    value, proof = pcs.open_at(coeffs, secret, 11, 13)
    for pos in (0, 40, len(proof) - 1):
        bad = proof[:pos] + bytes([proof[pos] ^ 1]) + proof[pos + 1:]
        assert not pcs.verify_at(com, 11, 13, value, bad)
    assert not pcs.verify_at(com, 11, 13, value, proof[:-1])
    assert not pcs.verify_at(com, 12, 13, value, proof)


def test_kzg_two_seeds_give_distinct_working_srs():
    backend = get_backend("toy")
    pcs_a = KzgPcs(setup_kzg(backend, 3, 3, SEED))
    pcs_b = KzgPcs(setup_kzg(backend, 3, 3, bytes(32)))
    assert save_srs(pcs_a.srs) != save_srs(pcs_b.srs)
    coeffs = [[1, 2], [3, 4]]
    for pcs in (pcs_a, pcs_b):
        com, secret = pcs.commit(coeffs, PrfStream(SEED, "SDIP/chal"))
        value, proof = pcs.open_at(coeffs, secret, 5, 6)
        assert pcs.verify_at(com, 5, 6, value, proof)
    # an opening under one SRS does not verify under the other
    com, secret = pcs_a.commit(coeffs, PrfStream(SEED, "SDIP/chal"))
    value, proof = pcs_a.open_at(coeffs, secret, 5, 6)
    assert not pcs_b.verify_at(com, 5, 6, value, proof)


def test_srs_save_load_round_trip(tmp_path):
    backend = get_backend("toy")
    srs = setup_kzg(backend, 4, 2, SEED)
    blob = save_srs(srs)
    back = load_srs(blob)
    assert save_srs(back) == blob
    assert back.deg_x == 4 and back.deg_y == 2
    path = tmp_path / "test.srs"
    save_srs(srs, str(path))
    again = load_srs(str(path))
    assert save_srs(again) == blob
    # loaded SRS verifies openings made under the original
    pcs = KzgPcs(srs)
    coeffs = [[9, 8], [7, 6]]
    com, secret = pcs.commit(coeffs, PrfStream(SEED, "SDIP/chal"))
    value, proof = pcs.open_at(coeffs, secret, 2, 3)
    assert KzgPcs(back).verify_at(com, 2, 3, value, proof)


def test_srs_load_rejects_corruption():
    srs = setup_kzg(get_backend("toy"), 2, 2, SEED)
    blob = save_srs(srs)
    with pytest.raises(WireFormatError):
        load_srs(blob[:-4])
    with pytest.raises((WireFormatError, ValueError)):
        load_srs(b"XXXX" + blob[4:])
    with pytest.raises(SrsBackendMismatch):
        load_srs(blob, backend=get_backend("toy:17"))


def test_kzg_on_bls_backend_bounded():
    backend = get_backend("bls12-381")
    pcs = KzgPcs(setup_kzg(backend, 2, 2, SEED))
    q = backend.field.q
    rng = random.Random(8005)
    coeffs = random_grid(rng, 3, 3, q)
    com, secret = pcs.commit(coeffs, PrfStream(SEED, "SDIP/chal"))
    x, y = rng.randrange(q), rng.randrange(q)
    value, proof = pcs.open_at(coeffs, secret, x, y)
    assert value == naive_bipoly(coeffs, x, y, q)
    assert pcs.verify_at(com, x, y, value, proof)
    assert not pcs.verify_at(com, x, y, (value + 1) % q, proof)


# -- transparent scheme --------------------------------------------------------

def test_merkle_pcs_against_oracle():
    pcs = merkle_pcs()
    q = pcs.field.q
    rng = random.Random(8006)
    for trial in range(100):
        coeffs = random_grid(rng, rng.randrange(1, 9), rng.randrange(1, 9), q)
        rand = PrfStream(PrfStream(SEED, "NBDP/proj").child_seed(f"m{trial}"),
                         "SDIP/chal")
        com, secret = pcs.commit(coeffs, rand)
        x, y = rng.randrange(q), rng.randrange(q)
        value, proof = pcs.open_at(coeffs, secret, x, y)
        assert value == naive_bipoly(coeffs, x, y, q)
        assert pcs.verify_at(com, x, y, value, proof)
        assert not pcs.verify_at(com, x, y, (value + 1) % q, proof)


def test_merkle_pcs_binding_and_tamper():
    pcs = merkle_pcs()
    coeffs = [[1, 2], [3, 4]]
    com, secret = pcs.commit(coeffs, PrfStream(SEED, "SDIP/chal"))
    value, proof = pcs.open_at(coeffs, secret, 5, 6)
    other = [[1, 2], [3, 5]]
    v2, p2 = pcs.open_at(other, secret, 5, 6)
    assert not pcs.verify_at(com, 5, 6, v2, p2)
    bad = proof[:-1] + bytes([proof[-1] ^ 1])
    assert not pcs.verify_at(com, 5, 6, value, bad)


def test_merkle_opening_size_is_linear_in_grid():
    # the transparent scheme reveals the whole grid: opening size grows
    # with d * d', unlike the constant-size pairing openings
    pcs_small = MerklePcs(get_backend("toy").field, 3, 3)
    pcs_large = MerklePcs(get_backend("toy").field, 15, 15)
    rng = random.Random(8007)
    q = pcs_small.field.q
    small = random_grid(rng, 4, 4, q)
    large = random_grid(rng, 16, 16, q)
    _, s1 = pcs_small.commit(small, PrfStream(SEED, "SDIP/chal"))
    _, s2 = pcs_large.commit(large, PrfStream(SEED, "SDIP/chal"))
    _, p1 = pcs_small.open_at(small, s1, 1, 1)
    _, p2 = pcs_large.open_at(large, s2, 1, 1)
    assert len(p2) - len(p1) == (256 - 16) * 32
    kzg = toy_pcs(deg=15)
    _, sk = kzg.commit(large, PrfStream(SEED, "SDIP/chal"))
    _, pk = kzg.open_at(large, sk, 1, 1)
    _, sk2 = kzg.commit(small, PrfStream(SEED, "SDIP/chal"))
    _, pk2 = kzg.open_at(small, sk2, 1, 1)
    assert len(pk) == len(pk2)
