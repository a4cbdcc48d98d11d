"""Merkle tree over named commitments: canonical root, paths, padding."""

from __future__ import annotations

import hashlib
import random

import pytest

from driftcert.errors import DuplicateBlockName
from driftcert.merkle import (EMPTY_LEAF, MerkleTree, leaf_hash, merkle_root,
                              node_hash)

# Frozen root for three fixed entries; part of the external format.
GOLDEN_ROOT3 = "8dab3b7d0acfe55ce482237bcb2cc49f5ef69befb419f359cd66e47e9cb607aa"

ENTRIES3 = [("a", b"payload-a"), ("b", b"payload-b"), ("c", b"payload-c")]


def reference_root(entries):
    """Independent reconstruction of the tree from its documented rule."""
    ordered = sorted(entries, key=lambda e: e[0])
    level = [leaf_hash(n, p) for n, p in ordered]
    width = 1
    while width < len(level):
        width *= 2
    level += [EMPTY_LEAF] * (width - len(level))
    while len(level) > 1:
        level = [
            hashlib.sha256(b"\x01" + level[i] + level[i + 1]).digest()
            for i in range(0, len(level), 2)
        ]
    return level[0]


def test_frozen_golden_root():
    assert merkle_root(ENTRIES3).hex() == GOLDEN_ROOT3


def test_single_leaf_root_is_leaf_hash():
    tree = MerkleTree([("only", b"payload")])
    assert tree.root == leaf_hash("only", b"payload")
    assert tree.path("only") == []
    assert MerkleTree.verify_path(tree.root, 0, "only", b"payload", [])


def test_three_entries_pad_to_four():
    tree = MerkleTree(ENTRIES3)
    assert len(tree.levels[0]) == 4
    assert tree.levels[0][3] == EMPTY_LEAF
    left = node_hash(tree.levels[0][0], tree.levels[0][1])
    right = node_hash(tree.levels[0][2], EMPTY_LEAF)
    assert tree.root == node_hash(left, right)


def test_matches_reference_reconstruction():
    rng = random.Random(3001)
    for count in (1, 2, 3, 5, 8, 13):
        entries = [
            (f"block{i:02d}", rng.randbytes(40)) for i in range(count)
        ]
        rng.shuffle(entries)
        assert merkle_root(entries) == reference_root(entries)


def test_order_independent_root():
    assert merkle_root(ENTRIES3) == merkle_root(list(reversed(ENTRIES3)))


def test_paths_verify_for_every_leaf():
    rng = random.Random(3002)
    entries = [(f"layer.{i}.w", rng.randbytes(32)) for i in range(13)]
    tree = MerkleTree(entries)
    for name, payload in entries:
        idx = tree.index_of(name)
        assert MerkleTree.verify_path(
            tree.root, idx, name, payload, tree.path(name))


def test_path_rejects_any_tampering():
    entries = [(f"b{i}", bytes([i]) * 16) for i in range(5)]
    tree = MerkleTree(entries)
    name, payload = entries[2]
    idx = tree.index_of(name)
    path = tree.path(name)
    assert not MerkleTree.verify_path(tree.root, idx, name, b"wrong", path)
    assert not MerkleTree.verify_path(tree.root, idx, "b9", payload, path)
    assert not MerkleTree.verify_path(tree.root, idx + 1, name, payload, path)
    bad = [path[0][:-1] + bytes([path[0][-1] ^ 1])] + path[1:]
    assert not MerkleTree.verify_path(tree.root, idx, name, payload, bad)
    assert not MerkleTree.verify_path(tree.root, idx, name, payload, path[:-1])
    short = [path[0][:-1]] + path[1:]
    assert not MerkleTree.verify_path(tree.root, idx, name, payload, short)


def test_payload_and_name_bound_into_leaf():
    # length-prefixed name blocks ("ab", "c") from colliding with ("a", "bc")
    assert leaf_hash("ab", b"c") != leaf_hash("a", b"bc")


def test_duplicate_names_rejected():
    with pytest.raises(DuplicateBlockName):
        MerkleTree([("x", b"1"), ("x", b"2")])


def test_empty_tree_has_canonical_root():
    assert MerkleTree([]).root == EMPTY_LEAF
