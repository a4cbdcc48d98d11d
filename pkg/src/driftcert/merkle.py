"""Merkle tree over named block commitments.

Leaves are hash(0x00 || len(name) || name || payload); interior nodes are
hash(0x01 || left || right).  Entries are sorted by name, deduplicated
(duplicates are the caller's bug), and padded with a fixed empty-leaf
digest up to the next power of two, so the root is a canonical function of
the name -> payload map.
"""

from __future__ import annotations

import hashlib

from .errors import DuplicateBlockName
from .wire import write_varint

_LEAF = b"\x00"
_NODE = b"\x01"
EMPTY_LEAF = hashlib.sha256(b"\x02driftcert-merkle-empty").digest()
DIGEST_BYTES = 32


def leaf_hash(name: str, payload: bytes) -> bytes:
    enc = name.encode("utf-8")
    return hashlib.sha256(
        _LEAF + write_varint(len(enc)) + enc + payload).digest()


def node_hash(left: bytes, right: bytes) -> bytes:
    return hashlib.sha256(_NODE + left + right).digest()


class MerkleTree:
    """Built once from (name, payload) pairs; exposes root and paths."""

    __slots__ = ("names", "levels")

    def __init__(self, entries: list[tuple[str, bytes]]):
        names = [n for n, _ in entries]
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise DuplicateBlockName(f"duplicate block name(s): {dupes}")
        ordered = sorted(entries, key=lambda e: e[0])
        self.names = [n for n, _ in ordered]
        leaves = [leaf_hash(n, p) for n, p in ordered]
        if not leaves:
            leaves = [EMPTY_LEAF]
        width = 1
        while width < len(leaves):
            width *= 2
        leaves = leaves + [EMPTY_LEAF] * (width - len(leaves))
        levels = [leaves]
        while len(levels[-1]) > 1:
            prev = levels[-1]
            levels.append([
                node_hash(prev[i], prev[i + 1]) for i in range(0, len(prev), 2)
            ])
        self.levels = levels

    @property
    def root(self) -> bytes:
        return self.levels[-1][0]

    def index_of(self, name: str) -> int:
        return self.names.index(name)

    def path(self, name: str) -> list[bytes]:
        """Sibling digests from leaf level up; position comes from the index."""
        idx = self.index_of(name)
        out = []
        for level in self.levels[:-1]:
            out.append(level[idx ^ 1])
            idx //= 2
        return out

    @staticmethod
    def verify_path(
        root: bytes, index: int, name: str, payload: bytes, siblings: list[bytes]
    ) -> bool:
        h = leaf_hash(name, payload)
        pos = index
        for sib in siblings:
            if len(sib) != DIGEST_BYTES:
                return False
            h = node_hash(sib, h) if pos & 1 else node_hash(h, sib)
            pos //= 2
        return pos == 0 and h == root


def merkle_root(entries: list[tuple[str, bytes]]) -> bytes:
    return MerkleTree(entries).root
