"""Rank-bounded drift proofs.

A d x d' block maps to the bivariate polynomial P(X, Y) = sum W[i][j] X^i Y^j.
Drift of rank at most r factors as Delta = sum_{k<=r} a_k b_k^T, equivalently
P_tuned - P_base = sum f_k(X) g_k(Y) with univariate factors.  The prover
commits the factor polynomials, a challenge point (x, y) is squeezed from
the transcript after all commitments are absorbed, everything is opened at
that one point, and the verifier checks the scalar identity.  A false
identity survives by Schwartz-Zippel with probability at most D/q for
D = (d - 1) + (d' - 1).

Factorization is Gaussian elimination over F_q: each pivot peels one outer
product off the residual.  Factors are zero-padded to exactly r components
so a certificate never reveals whether the true rank is below the policy
bound.  ``truncated_factors`` stops the elimination early regardless of the
residual; it exists so soundness experiments can build the best-effort
forgery the protocol is supposed to reject.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import RankExceeded, ShapeMismatch, WitnessInconsistent
from .field import PrimeField
from .pcs import Pcs
from .prf import PrfStream
from .transcript import Transcript
from .wire import Reader


def matrix_grid(block) -> list[list[int]]:
    """Coefficient grid of a block's polynomial: grid[i][j] = W[i][j]."""
    d, dp = block.dims
    return [[block.entry(i, j) for j in range(dp)] for i in range(d)]


def drift_grid(base, tuned, field: PrimeField) -> list[list[int]]:
    if base.dims != tuned.dims:
        raise ShapeMismatch(
            f"block dims differ: {base.dims} vs {tuned.dims}")
    q = field.q
    d, dp = base.dims
    return [
        [(tuned.entry(i, j) - base.entry(i, j)) % q for j in range(dp)]
        for i in range(d)
    ]


def soundness_bound(d: int, dp: int, q: int) -> Fraction:
    """Schwartz-Zippel acceptance bound D/q, D = (d - 1) + (d' - 1)."""
    if d < 1 or dp < 1:
        raise ShapeMismatch("matrix dims must be positive")
    return Fraction((d - 1) + (dp - 1), q)


def _eliminate(matrix: list[list[int]], field: PrimeField,
               limit: int | None) -> tuple[list[tuple[list[int], list[int]]], bool]:
    """Peel outer products off a copy of ``matrix``.

    Returns (components, clean) where clean means the residual reached zero
    within ``limit`` components (limit None = no cap).  Pivot choice: first
    nonzero entry in row-major scan, so the decomposition is deterministic.
    """
    q = field.q
    residual = [row[:] for row in matrix]
    rows = len(residual)
    cols = len(residual[0])
    components: list[tuple[list[int], list[int]]] = []
    while limit is None or len(components) < limit:
        pivot = None
        for i in range(rows):
            for j in range(cols):
                if residual[i][j]:
                    pivot = (i, j)
                    break
            if pivot:
                break
        if pivot is None:
            return components, True
        i0, j0 = pivot
        inv = field.inv(residual[i0][j0])
        col = [residual[i][j0] for i in range(rows)]
        row = [(residual[i0][j] * inv) % q for j in range(cols)]
        for i in range(rows):
            ci = col[i]
            if ci:
                ri = residual[i]
                for j in range(cols):
                    if row[j]:
                        ri[j] = (ri[j] - ci * row[j]) % q
        components.append((col, row))
    clean = all(v == 0 for r in residual for v in r)
    return components, clean


def matrix_rank(matrix: list[list[int]], field: PrimeField) -> int:
    components, _ = _eliminate(matrix, field, None)
    return len(components)


def rank_factorize(matrix: list[list[int]], r: int,
                   field: PrimeField) -> list[tuple[list[int], list[int]]]:
    """Factors (a_k, b_k) with sum a_k b_k^T = matrix, padded to exactly r.

    Raises RankExceeded carrying the true rank when it exceeds the bound.
    """
    components, clean = _eliminate(matrix, field, None)
    if len(components) > r or not clean:
        raise RankExceeded(r, len(components))
    rows = len(matrix)
    cols = len(matrix[0])
    while len(components) < r:
        components.append(([0] * rows, [0] * cols))
    return components


def truncated_factors(matrix: list[list[int]], r: int,
                      field: PrimeField) -> list[tuple[list[int], list[int]]]:
    """Best rank-r surrogate by stopping elimination at r components.

    If the true rank exceeds r the returned factors do NOT reconstruct the
    matrix; proofs built from them must be rejected.  Adversarial-harness
    helper only.
    """
    components, _ = _eliminate(matrix, field, r)
    rows = len(matrix)
    cols = len(matrix[0])
    while len(components) < r:
        components.append(([0] * rows, [0] * cols))
    return components


@dataclass
class MrdpProof:
    """Factor commitments, the challenge point, and all opening records.

    Openings are ordered: base polynomial, tuned polynomial, f_1..f_r,
    g_1..g_r, every one at the same point (x, y).
    """

    r: int
    f_commitments: list[bytes]
    g_commitments: list[bytes]
    point: tuple[int, int]
    openings: list[tuple[int, bytes]]

    def to_bytes(self) -> bytes:
        buf = bytearray()
        buf.extend(self.r.to_bytes(2, "little"))
        for com in self.f_commitments + self.g_commitments:
            buf.extend(len(com).to_bytes(4, "little"))
            buf.extend(com)
        buf.extend(self.point[0].to_bytes(32, "little"))
        buf.extend(self.point[1].to_bytes(32, "little"))
        for value, proof in self.openings:
            buf.extend(value.to_bytes(32, "little"))
            buf.extend(len(proof).to_bytes(4, "little"))
            buf.extend(proof)
        return bytes(buf)

    @classmethod
    def from_bytes(cls, data: bytes) -> "MrdpProof":
        reader = Reader(data)
        proof = cls.read_from(reader)
        reader.expect_end()
        return proof

    @classmethod
    def read_from(cls, reader: Reader) -> "MrdpProof":
        r = int.from_bytes(reader.take(2), "little")
        commitments = [
            reader.take(int.from_bytes(reader.take(4), "little"))
            for _ in range(2 * r)
        ]
        point = (reader.scalar(), reader.scalar())
        openings = []
        for _ in range(2 * r + 2):
            value = reader.scalar()
            proof = reader.take(int.from_bytes(reader.take(4), "little"))
            openings.append((value, proof))
        return cls(r, commitments[:r], commitments[r:], point, openings)


def _absorb_commitments(transcript: Transcript, base_com: bytes,
                        tuned_com: bytes, r: int, d: int, dp: int,
                        f_coms: list[bytes], g_coms: list[bytes]) -> None:
    blob = bytearray()
    blob.extend(r.to_bytes(4, "little"))
    blob.extend(d.to_bytes(4, "little"))
    blob.extend(dp.to_bytes(4, "little"))
    for com in (base_com, tuned_com, *f_coms, *g_coms):
        blob.extend(len(com).to_bytes(4, "little"))
        blob.extend(com)
    transcript.absorb("MRDP/commit", bytes(blob))


def prove_mrdp(pcs: Pcs, transcript: Transcript, base_grid: list[list[int]],
               tuned_grid: list[list[int]], r: int,
               base_com: bytes, base_secret, tuned_com: bytes, tuned_secret,
               rand: PrfStream,
               factors: list[tuple[list[int], list[int]]] | None = None,
               ) -> MrdpProof:
    """Prove the committed drift has rank at most r.

    ``factors`` defaults to an honest factorization (raising RankExceeded
    when the bound fails); passing explicit factors builds the proof from
    them unchecked, which is only useful for adversarial experiments.
    """
    field = pcs.field
    q = field.q
    d = len(base_grid)
    dp = len(base_grid[0])
    if len(tuned_grid) != d or len(tuned_grid[0]) != dp:
        raise ShapeMismatch("base and tuned grids differ in shape")
    drift = [
        [(tuned_grid[i][j] - base_grid[i][j]) % q for j in range(dp)]
        for i in range(d)
    ]
    if factors is None:
        factors = rank_factorize(drift, r, field)
    elif len(factors) != r:
        raise WitnessInconsistent(f"expected exactly {r} factor pairs")

    f_grids = [[[a[i]] for i in range(d)] for a, _ in factors]
    g_grids = [[list(b)] for _, b in factors]
    f_coms, f_secrets = [], []
    g_coms, g_secrets = [], []
    for k, grid in enumerate(f_grids):
        com, sec = pcs.commit(grid, PrfStream(
            rand.child_seed(f"mrdp-f{k}"), "pcs-mask"))
        f_coms.append(com)
        f_secrets.append(sec)
    for k, grid in enumerate(g_grids):
        com, sec = pcs.commit(grid, PrfStream(
            rand.child_seed(f"mrdp-g{k}"), "pcs-mask"))
        g_coms.append(com)
        g_secrets.append(sec)

    _absorb_commitments(transcript, base_com, tuned_com, r, d, dp,
                        f_coms, g_coms)
    x = transcript.challenge_scalar("MRDP/point", field)
    y = transcript.challenge_scalar("MRDP/point", field)

    openings = [
        pcs.open_at(base_grid, base_secret, x, y),
        pcs.open_at(tuned_grid, tuned_secret, x, y),
    ]
    for grid, sec in zip(f_grids, f_secrets):
        openings.append(pcs.open_at(grid, sec, x, y))
    for grid, sec in zip(g_grids, g_secrets):
        openings.append(pcs.open_at(grid, sec, x, y))
    return MrdpProof(r, f_coms, g_coms, (x, y), openings)


def verify_mrdp(pcs: Pcs, transcript: Transcript, base_com: bytes,
                tuned_com: bytes, r: int, d: int, dp: int,
                proof: MrdpProof) -> bool:
    field = pcs.field
    q = field.q
    if proof.r != r or len(proof.f_commitments) != r \
            or len(proof.g_commitments) != r \
            or len(proof.openings) != 2 * r + 2:
        return False
    _absorb_commitments(transcript, base_com, tuned_com, r, d, dp,
                        proof.f_commitments, proof.g_commitments)
    x = transcript.challenge_scalar("MRDP/point", field)
    y = transcript.challenge_scalar("MRDP/point", field)
    if proof.point != (x, y):
        return False
    commitments = [base_com, tuned_com] + proof.f_commitments \
        + proof.g_commitments
    for com, (value, opening) in zip(commitments, proof.openings):
        if not pcs.verify_at(com, x, y, value, opening):
            return False
    base_v = proof.openings[0][0]
    tuned_v = proof.openings[1][0]
    total = 0
    for k in range(r):
        fv = proof.openings[2 + k][0]
        gv = proof.openings[2 + r + k][0]
        total = (total + fv * gv) % q
    return (tuned_v - base_v) % q == total


def reconstruct(factors: list[tuple[list[int], list[int]]], d: int, dp: int,
                field: PrimeField) -> list[list[int]]:
    """sum a_k b_k^T as a d x d' matrix; the factorization oracle's inverse."""
    q = field.q
    out = [[0] * dp for _ in range(d)]
    for a, b in factors:
        for i in range(d):
            ai = a[i]
            if ai:
                row = out[i]
                for j in range(dp):
                    if b[j]:
                        row[j] = (row[j] + ai * b[j]) % q
    return out
