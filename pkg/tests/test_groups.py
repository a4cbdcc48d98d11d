"""Group backends: abelian laws, serialization, generators, pairing."""

from __future__ import annotations

import random

import pytest

from driftcert.groups import get_backend

# Frozen serialization of the first Pedersen vector generator on the toy
# backend; pins both hash_to_group and the element encoding.
GOLDEN_TOY_G0 = "02ef04d72fda0781a6fea83c25b736495f8d9bb7f35c9f8a54dd2da535671011"


def check_group_laws(backend, rounds, rng):
    q = backend.field.q
    g = backend.generator()
    for _ in range(rounds):
        a = rng.randrange(q)
        b = rng.randrange(q)
        pa = backend.mul(g, a)
        pb = backend.mul(g, b)
        assert backend.eq(backend.add(pa, pb), backend.mul(g, (a + b) % q))
        assert backend.eq(backend.add(pa, pb), backend.add(pb, pa))
        assert backend.eq(backend.mul(pa, b), backend.mul(pb, a))
        assert backend.is_identity(backend.add(pa, backend.neg(pa)))
        assert backend.eq(backend.sub(pa, pb),
                          backend.mul(g, (a - b) % q))
    assert backend.is_identity(backend.mul(g, 0))
    assert backend.is_identity(backend.mul(g, q))


def check_serialization(backend, rounds, rng):
    g = backend.generator()
    for _ in range(rounds):
        p = backend.mul(g, rng.randrange(1, backend.field.q))
        data = backend.serialize(p)
        assert len(data) == backend.element_bytes
        assert backend.eq(backend.deserialize(data), p)
    ident = backend.serialize(backend.identity())
    assert len(ident) == backend.element_bytes
    assert backend.is_identity(backend.deserialize(ident))


def test_toy_group_laws():
    backend = get_backend("toy")
    check_group_laws(backend, 200, random.Random(4001))
    check_serialization(backend, 50, random.Random(4002))


def test_toy_small_modulus_variant():
    backend = get_backend("toy:17")
    assert backend.field.q == 17
    check_group_laws(backend, 50, random.Random(4003))
    # msm against the naive sum
    g = backend.generator()
    points = [backend.mul(g, i) for i in range(5)]
    scalars = [3, 0, 7, 1, 16]
    want = backend.identity()
    for p, k in zip(points, scalars):
        want = backend.add(want, backend.mul(p, k))
    assert backend.eq(backend.msm(points, scalars), want)


def test_toy_hash_to_group_nonidentity_and_distinct():
    backend = get_backend("toy")
    seen = set()
    for i in range(1000):
        p = backend.hash_to_group("PED/vec", i)
        assert not backend.is_identity(p)
        seen.add(backend.serialize(p))
    assert len(seen) == 1000
    assert backend.serialize(backend.hash_to_group("PED/vec", 0)).hex() == \
        GOLDEN_TOY_G0
    # label separation
    assert not backend.eq(backend.hash_to_group("PED/G", 0),
                          backend.hash_to_group("PED/H", 0))


def test_toy_pairing_is_bilinear():
    backend = get_backend("toy")
    g1 = backend.generator()
    g2 = backend.g2_generator()
    rng = random.Random(4004)
    for _ in range(20):
        a = rng.randrange(backend.field.q)
        b = rng.randrange(backend.field.q)
        # e(aG, bH) == e(abG, H)
        assert backend.pairing_check(
            [(backend.mul(g1, a), backend.g2_mul(g2, b))],
            [(backend.mul(g1, a * b % backend.field.q), g2)])
        assert not backend.pairing_check(
            [(backend.mul(g1, a), backend.g2_mul(g2, b))],
            [(backend.mul(g1, (a * b + 1) % backend.field.q), g2)])


def test_backend_registry():
    assert get_backend("toy").field.q == get_backend("bls12-381").field.q
    with pytest.raises(ValueError):
        get_backend("no-such-backend")


def test_bls_group_laws_bounded():
    backend = get_backend("bls12-381")
    rng = random.Random(4005)
    g = backend.generator()
    for _ in range(5):
        a = rng.randrange(1, 2**64)
        b = rng.randrange(1, 2**64)
        pa = backend.mul(g, a)
        pb = backend.mul(g, b)
        assert backend.eq(backend.add(pa, pb), backend.mul(g, a + b))
        assert backend.eq(backend.add(pa, pb), backend.add(pb, pa))
    assert backend.is_identity(backend.add(pa, backend.neg(pa)))
    check_serialization(backend, 3, rng)


def test_bls_g2_and_pairing_bounded():
    backend = get_backend("bls12-381")
    g1 = backend.generator()
    g2 = backend.g2_generator()
    data = backend.g2_serialize(backend.g2_mul(g2, 5))
    assert len(data) == backend.g2_element_bytes
    assert backend.g2_eq(backend.g2_deserialize(data), backend.g2_mul(g2, 5))
    assert backend.pairing_check(
        [(backend.mul(g1, 6), g2)],
        [(backend.mul(g1, 2), backend.g2_mul(g2, 3))])
    assert not backend.pairing_check(
        [(backend.mul(g1, 7), g2)],
        [(backend.mul(g1, 2), backend.g2_mul(g2, 3))])


def test_bls_hash_to_group_bounded():
    backend = get_backend("bls12-381")
    points = [backend.hash_to_group("PED/vec", i) for i in range(4)]
    for p in points:
        assert not backend.is_identity(p)
        # serialized points round-trip, so they lie on the curve subgroup
        assert backend.eq(backend.deserialize(backend.serialize(p)), p)
    assert len({backend.serialize(p) for p in points}) == 4
