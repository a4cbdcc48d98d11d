"""Certificate assembly, verification, and provenance chaining.

A certificate binds two Merkle roots (base and tuned commitments), a policy
digest, and a transcript nonce, then carries one record per block: the
commitment bundles for both sides, deduplicated authentication paths, and
one proof per constituent drift class.  Per-block transcripts are forked
from a master transcript that has absorbed the roots, the policy digest,
and the nonce, so a proof cannot be replayed under different roots, a
different policy, or another block's name.

The verifier rebuilds both Merkle trees from the records, which makes block
coverage a root-equality question: omitting or adding a block changes the
rebuilt root (and the recomputed policy digest) and the certificate is
rejected.  Per-block statuses are Ok, MerkleFail, ProofFail, or
MissingProof; the global decision is the conjunction.

A provenance chain is a list of stages whose link rule is that each stage's
base root equals the previous stage's tuned root.  Verification walks the
chain in order and a failing stage invalidates every later one.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from .codec import TensorArchive, check_manifests_match
from .errors import (DegenerateParams, ManifestMismatch, PolicyViolation,
                     ProjectionExceedsThreshold, RankExceeded,
                     SparsityExceeded, WireFormatError, WitnessInconsistent)
from .groups import get_backend
from .groups.base import GroupBackend
from .merkle import MerkleTree
from .mrdp import MrdpProof, matrix_grid, prove_mrdp, verify_mrdp
from .nbdp import NbdpProof, derive_nbdp_params, prove_nbdp, verify_nbdp
from .pcs import Pcs
from .pedersen import pedersen_for
from .policy import (DriftClassSpec, Frozen, Norm, Policy, Rank, Sparse,
                     constituents)
from .prf import PrfStream
from .sdip import (MODE_B_DIM_LIMIT, MODE_HIDDEN, CoordinateWitness,
                   SdipParams, SdipProofA, SdipProofB, prove_sdip_a,
                   prove_sdip_b, read_sdip_proof, verify_sdip)
from .subproofs import (ScalarSampler, SchnorrProof, prove_same_value,
                        verify_same_value)
from .transcript import Transcript
from .wire import Reader, write_varint

CERT_MAGIC = b"FTIC"
CERT_VERSION = 1

BUNDLE_VECTOR = 0x02
BUNDLE_POLY = 0x03
BUNDLE_COORDS = 0x04

STATUS_OK = "Ok"
STATUS_MERKLE_FAIL = "MerkleFail"
STATUS_PROOF_FAIL = "ProofFail"
STATUS_MISSING = "MissingProof"


# -- commitment bundles --------------------------------------------------------


@dataclass
class Bundle:
    """One side's commitments for one block: always the Pedersen vector
    commitment, plus a polynomial commitment when a rank class applies and
    per-coordinate commitments when a hidden-support sparse class applies."""

    vector: object
    poly: bytes | None = None
    coords: list | None = None

    def to_bytes(self, backend) -> bytes:
        buf = bytearray([BUNDLE_VECTOR])
        buf.extend(backend.serialize(self.vector))
        if self.poly is not None:
            buf.append(BUNDLE_POLY)
            buf.extend(len(self.poly).to_bytes(4, "little"))
            buf.extend(self.poly)
        if self.coords is not None:
            buf.append(BUNDLE_COORDS)
            buf.extend(len(self.coords).to_bytes(4, "little"))
            for point in self.coords:
                buf.extend(backend.serialize(point))
        return bytes(buf)

    @classmethod
    def from_bytes(cls, backend, data: bytes) -> "Bundle":
        reader = Reader(data)
        if reader.take(1)[0] != BUNDLE_VECTOR:
            raise WireFormatError("bundle must start with a vector commitment")
        vector = backend.deserialize(reader.take(backend.element_bytes))
        poly = None
        coords = None
        while reader.remaining():
            tag = reader.take(1)[0]
            if tag == BUNDLE_POLY and poly is None and coords is None:
                poly = reader.take(int.from_bytes(reader.take(4), "little"))
            elif tag == BUNDLE_COORDS and coords is None:
                count = int.from_bytes(reader.take(4), "little")
                coords = [
                    backend.deserialize(reader.take(backend.element_bytes))
                    for _ in range(count)
                ]
            else:
                raise WireFormatError(f"unexpected bundle tag {tag:#x}")
        return cls(vector, poly, coords)


# -- certificate ---------------------------------------------------------------


@dataclass
class BlockRecord:
    """Per-block certificate entry.  ``proofs`` holds one serialized proof
    per constituent class, in the class's canonical order; paths index into
    the certificate's shared node table."""

    name: str
    dims: tuple[int, int]
    class_canon: str
    bundle_base: bytes
    bundle_tuned: bytes
    path_base: list[int]
    path_tuned: list[int]
    proofs: list[bytes]


@dataclass
class FtiCertificate:
    version: int
    backend_id: str
    pcs_id: str
    frac_bits: int
    root_base: bytes
    root_tuned: bytes
    policy_hash: bytes
    nonce: bytes
    nodes: list[bytes]
    records: list[BlockRecord]

    def to_bytes(self) -> bytes:
        buf = bytearray(CERT_MAGIC)
        buf.append(self.version)
        for text in (self.backend_id, self.pcs_id):
            enc = text.encode("ascii")
            buf.extend(write_varint(len(enc)))
            buf.extend(enc)
        buf.append(self.frac_bits)
        buf.extend(self.root_base)
        buf.extend(self.root_tuned)
        buf.extend(self.policy_hash)
        buf.extend(write_varint(len(self.nonce)))
        buf.extend(self.nonce)
        buf.extend(write_varint(len(self.nodes)))
        for node in self.nodes:
            buf.extend(node)
        buf.extend(write_varint(len(self.records)))
        for rec in self.records:
            enc = rec.name.encode("utf-8")
            buf.extend(write_varint(len(enc)))
            buf.extend(enc)
            buf.extend(write_varint(rec.dims[0]))
            buf.extend(write_varint(rec.dims[1]))
            canon = rec.class_canon.encode("ascii")
            buf.extend(write_varint(len(canon)))
            buf.extend(canon)
            for bundle in (rec.bundle_base, rec.bundle_tuned):
                buf.extend(write_varint(len(bundle)))
                buf.extend(bundle)
            for path in (rec.path_base, rec.path_tuned):
                buf.extend(write_varint(len(path)))
                for index in path:
                    buf.extend(write_varint(index))
            buf.extend(write_varint(len(rec.proofs)))
            for proof in rec.proofs:
                buf.extend(write_varint(len(proof)))
                buf.extend(proof)
        return bytes(buf)

    @classmethod
    def from_bytes(cls, data: bytes) -> "FtiCertificate":
        reader = Reader(data)
        if reader.take(4) != CERT_MAGIC:
            raise WireFormatError("bad certificate magic")
        version = reader.take(1)[0]
        if version != CERT_VERSION:
            raise WireFormatError(f"unsupported certificate version {version}")
        backend_id = reader.take(reader.varint()).decode("ascii")
        pcs_id = reader.take(reader.varint()).decode("ascii")
        frac_bits = reader.take(1)[0]
        root_base = reader.take(32)
        root_tuned = reader.take(32)
        policy_hash = reader.take(32)
        nonce = reader.take(reader.varint())
        nodes = [reader.take(32) for _ in range(reader.varint())]
        records = []
        for _ in range(reader.varint()):
            name = reader.take(reader.varint()).decode("utf-8")
            dims = (reader.varint(), reader.varint())
            canon = reader.take(reader.varint()).decode("ascii")
            bundle_base = reader.take(reader.varint())
            bundle_tuned = reader.take(reader.varint())
            paths = []
            for _ in range(2):
                path = [reader.varint() for _ in range(reader.varint())]
                if any(i >= len(nodes) for i in path):
                    raise WireFormatError("path index outside node table")
                paths.append(path)
            proofs = [
                reader.take(reader.varint()) for _ in range(reader.varint())
            ]
            records.append(BlockRecord(name, dims, canon, bundle_base,
                                       bundle_tuned, paths[0], paths[1],
                                       proofs))
        reader.expect_end()
        return cls(version, backend_id, pcs_id, frac_bits, root_base,
                   root_tuned, policy_hash, nonce, nodes, records)


def default_nonce(seed: bytes) -> bytes:
    """Public transcript nonce derived from the secret blinding seed."""
    return hashlib.sha256(b"driftcert-nonce" + seed).digest()


def _archive_digest(enc: dict, params) -> bytes:
    """Content digest of an encoded archive.

    Blindings are derived from (seed, this digest, block name), not from
    whether the archive is the base or the tuned side.  Committing the same
    archive under the same seed therefore yields identical commitments, which
    is what lets a provenance chain's stage t base root equal stage t-1's
    tuned root.
    """
    h = hashlib.sha256(b"driftcert-archive")
    h.update(params.digest())
    for name in sorted(enc):
        block = enc[name]
        nb = name.encode("utf-8")
        h.update(len(nb).to_bytes(4, "little"))
        h.update(nb)
        for v in block.values:
            h.update(v.to_bytes(32, "little"))
    return h.digest()


def _master_transcript(backend_id: str, pcs_id: str, root_base: bytes,
                       root_tuned: bytes, policy_hash: bytes,
                       nonce: bytes) -> Transcript:
    master = Transcript()
    blob = bytes([CERT_VERSION])
    blob += len(backend_id).to_bytes(2, "little")
    blob += backend_id.encode("ascii")
    blob += len(pcs_id).to_bytes(2, "little")
    blob += pcs_id.encode("ascii")
    blob += policy_hash
    master.absorb("FTI/v1", blob)
    master.absorb("AGG/root", root_base + root_tuned)
    master.absorb("FTI/nonce", nonce)
    return master


def _block_transcript(master: Transcript, name: str, bundle_base: bytes,
                      bundle_tuned: bytes) -> Transcript:
    enc = name.encode("utf-8")
    blob = len(enc).to_bytes(4, "little") + enc + bundle_base + bundle_tuned
    return master.fork("COMMIT/block", blob)


def _dedup_paths(trees_paths: list[list[bytes]]) -> tuple[list[bytes],
                                                          list[list[int]]]:
    table: list[bytes] = []
    seen: dict[bytes, int] = {}
    indexed = []
    for path in trees_paths:
        idx_path = []
        for node in path:
            if node not in seen:
                seen[node] = len(table)
                table.append(node)
            idx_path.append(seen[node])
        indexed.append(idx_path)
    return table, indexed


def commit_archive(archive: TensorArchive, policy: Policy, *,
                   backend: GroupBackend, seed: bytes,
                   pcs: Pcs | None = None) -> bytes:
    """Merkle root of one archive's commitment bundles under a policy.

    Uses the same blinding derivation as prove_all, so the root equals the
    corresponding side of any certificate proved from the same seed.  The
    policy matters because rank and hidden-sparse classes add commitments
    to the affected bundles.
    """
    ped = pedersen_for(backend)
    plans, digest, _ = _plan_blocks(archive, archive, policy)
    if any(p.needs_poly for p in plans) and pcs is None:
        raise DegenerateParams(
            "policy contains a rank class but no polynomial commitment "
            "scheme was supplied")
    root_prf = PrfStream(seed, "blinding")
    hex_id = digest.hex()
    entries = []
    for plan in plans:
        enc = plan.base_enc
        blind = PrfStream(
            root_prf.child_seed(f"vec/{hex_id}/{plan.name}"),
            "blinding").scalar(0, backend.field)
        bundle = Bundle(ped.commit_vector(enc.values, blind))
        if plan.needs_poly:
            bundle.poly, _ = pcs.commit(
                matrix_grid(enc),
                PrfStream(root_prf.child_seed(f"poly/{hex_id}/{plan.name}"),
                          "pcs-mask"))
        if plan.needs_coords:
            coord_blinds = PrfStream(
                root_prf.child_seed(f"coord/{hex_id}/{plan.name}"),
                "blinding").scalars(len(enc), backend.field)
            bundle.coords = [
                ped.commit_scalar(v, r)
                for v, r in zip(enc.values, coord_blinds)
            ]
        entries.append((plan.name, bundle.to_bytes(backend)))
    return MerkleTree(entries).root


# -- proving -------------------------------------------------------------------


@dataclass
class _BlockPlan:
    name: str
    spec: DriftClassSpec
    base_enc: object
    tuned_enc: object
    needs_poly: bool
    needs_coords: bool


def _plan_blocks(base: TensorArchive, tuned: TensorArchive,
                 policy: Policy) -> tuple[list[_BlockPlan], bytes, bytes]:
    check_manifests_match(base, tuned)
    enc0 = base.encode_all()
    enc1 = tuned.encode_all()
    plans = []
    for name in base.names():
        spec = policy.class_for(name)
        kinds = constituents(spec)
        plans.append(_BlockPlan(
            name, spec, enc0[name], enc1[name],
            needs_poly=any(isinstance(c, Rank) for c in kinds),
            needs_coords=any(
                isinstance(c, Sparse) and c.mode == MODE_HIDDEN
                for c in kinds),
        ))
    return (plans, _archive_digest(enc0, base.params),
            _archive_digest(enc1, tuned.params))


def prove_all(base: TensorArchive, tuned: TensorArchive, policy: Policy, *,
              backend: GroupBackend, seed: bytes, nonce: bytes | None = None,
              pcs: Pcs | None = None, nbdp_delta: float = 0.01,
              nbdp_kappa: int = 48,
              mode_b_limit: int = MODE_B_DIM_LIMIT) -> FtiCertificate:
    """Commit every block, prove every policy class, assemble a certificate.

    ``seed`` drives all blindings and prover randomness; ``nonce`` is the
    public transcript nonce (derived from the seed when omitted).  Blocks
    whose drift violates their class are collected and reported together in
    a single PolicyViolation.
    """
    if nonce is None:
        nonce = default_nonce(seed)
    ped = pedersen_for(backend)
    field_q = backend.field.q
    plans, digest0, digest1 = _plan_blocks(base, tuned, policy)
    if any(p.needs_poly for p in plans) and pcs is None:
        raise DegenerateParams(
            "policy contains a rank class but no polynomial commitment "
            "scheme was supplied")
    names = [p.name for p in plans]
    policy_hash = policy.digest(names)
    frac_bits = base.params.frac_bits
    root_prf = PrfStream(seed, "blinding")

    bundles: dict[str, tuple[Bundle, Bundle]] = {}
    secrets: dict[str, dict] = {}
    for plan in plans:
        sec: dict = {}
        sides = []
        for tag, digest, enc in (("base", digest0, plan.base_enc),
                                 ("tuned", digest1, plan.tuned_enc)):
            hex_id = digest.hex()
            blind = PrfStream(
                root_prf.child_seed(f"vec/{hex_id}/{plan.name}"),
                "blinding").scalar(0, backend.field)
            bundle = Bundle(ped.commit_vector(enc.values, blind))
            sec[f"{tag}_blind"] = blind
            if plan.needs_poly:
                com, poly_secret = pcs.commit(
                    matrix_grid(enc),
                    PrfStream(
                        root_prf.child_seed(f"poly/{hex_id}/{plan.name}"),
                        "pcs-mask"))
                bundle.poly = com
                sec[f"{tag}_poly"] = poly_secret
            if plan.needs_coords:
                n = len(enc)
                coord_blinds = PrfStream(
                    root_prf.child_seed(f"coord/{hex_id}/{plan.name}"),
                    "blinding").scalars(n, backend.field)
                bundle.coords = [
                    ped.commit_scalar(v, r)
                    for v, r in zip(enc.values, coord_blinds)
                ]
                sec[f"{tag}_coord_blinds"] = coord_blinds
            sides.append(bundle)
        bundles[plan.name] = (sides[0], sides[1])
        secrets[plan.name] = sec

    entries_base = [
        (name, bundles[name][0].to_bytes(backend)) for name in names
    ]
    entries_tuned = [
        (name, bundles[name][1].to_bytes(backend)) for name in names
    ]
    tree_base = MerkleTree(entries_base)
    tree_tuned = MerkleTree(entries_tuned)

    pcs_id = pcs.scheme_id if pcs is not None and any(
        p.needs_poly for p in plans) else ""
    master = _master_transcript(backend.name, pcs_id, tree_base.root,
                                tree_tuned.root, policy_hash, nonce)

    violations: list[tuple[str, str, str]] = []
    records: list[BlockRecord] = []
    all_paths: list[list[bytes]] = []
    for plan in plans:
        bundle0, bundle1 = bundles[plan.name]
        sec = secrets[plan.name]
        payload0 = bundle0.to_bytes(backend)
        payload1 = bundle1.to_bytes(backend)
        transcript = _block_transcript(master, plan.name, payload0, payload1)
        sampler = ScalarSampler(
            PrfStream(root_prf.child_seed(f"proof/{plan.name}"), "sampler"),
            backend.field)
        mask_rand = PrfStream(
            root_prf.child_seed(f"mrdp-mask/{plan.name}"), "pcs-mask")
        blind_delta = (sec["tuned_blind"] - sec["base_blind"]) % field_q
        proofs: list[bytes] = []
        try:
            for part in constituents(plan.spec):
                proofs.append(_prove_constituent(
                    ped, transcript, part, plan, bundle0, bundle1, sec,
                    blind_delta, sampler, mask_rand, pcs, nbdp_delta,
                    nbdp_kappa, mode_b_limit, frac_bits))
        except (ProjectionExceedsThreshold, RankExceeded, SparsityExceeded,
                WitnessInconsistent) as err:
            violations.append((plan.name, plan.spec.canon(), str(err)))
            continue
        records.append(BlockRecord(
            plan.name, plan.base_enc.dims, plan.spec.canon(), payload0,
            payload1, [], [], proofs))
        all_paths.append(tree_base.path(plan.name))
        all_paths.append(tree_tuned.path(plan.name))
    if violations:
        raise PolicyViolation(violations)

    table, indexed = _dedup_paths(all_paths)
    for i, rec in enumerate(records):
        rec.path_base = indexed[2 * i]
        rec.path_tuned = indexed[2 * i + 1]
    return FtiCertificate(CERT_VERSION, backend.name, pcs_id, frac_bits,
                          tree_base.root, tree_tuned.root, policy_hash,
                          nonce, table, records)


def _frozen_drift_detail(base_enc, tuned_enc) -> str | None:
    changed = sum(
        1 for a, b in zip(base_enc.values, tuned_enc.values) if a != b)
    if changed == 0:
        return None
    return f"block changed in {changed} coordinate(s) but must be frozen"


def _prove_constituent(ped, transcript, part, plan, bundle0, bundle1, sec,
                       blind_delta, sampler, mask_rand, pcs, nbdp_delta,
                       nbdp_kappa, mode_b_limit, frac_bits) -> bytes:
    backend = ped.backend
    field = backend.field
    base_enc, tuned_enc = plan.base_enc, plan.tuned_enc
    if isinstance(part, Frozen) or (isinstance(part, Norm)
                                    and part.epsilon == 0):
        detail = _frozen_drift_detail(base_enc, tuned_enc)
        if detail is not None:
            raise WitnessInconsistent(detail)
        proof = prove_same_value(ped, transcript, bundle1.vector,
                                 bundle0.vector, sec["tuned_blind"],
                                 sec["base_blind"], sampler)
        buf = bytearray()
        proof.write_into(backend, buf)
        return bytes(buf)
    if isinstance(part, Norm):
        params = derive_nbdp_params(
            part.epsilon, nbdp_delta, nbdp_kappa, frac_bits=frac_bits,
            dim=len(base_enc), field_modulus=field.q)
        delta_signed = tuned_enc.signed_array() - base_enc.signed_array()
        proof = prove_nbdp(ped, transcript, params, bundle0.vector,
                           bundle1.vector, delta_signed, blind_delta, sampler)
        return proof.to_bytes(backend)
    if isinstance(part, Rank):
        proof = prove_mrdp(
            pcs, transcript, matrix_grid(base_enc), matrix_grid(tuned_enc),
            part.r, bundle0.poly, sec["base_poly"], bundle1.poly,
            sec["tuned_poly"], mask_rand)
        return proof.to_bytes()
    if isinstance(part, Sparse):
        q = field.q
        if part.mode == MODE_HIDDEN:
            params = SdipParams(part.k, mode=MODE_HIDDEN)
            base_wit = CoordinateWitness(
                bundle0.coords, list(base_enc.values),
                sec["base_coord_blinds"])
            tuned_wit = CoordinateWitness(
                bundle1.coords, list(tuned_enc.values),
                sec["tuned_coord_blinds"])
            proof = prove_sdip_b(ped, transcript, params, base_wit, tuned_wit,
                                 sampler, dim_limit=mode_b_limit)
        else:
            params = SdipParams(part.k)
            delta = [
                (tv - bv) % q
                for bv, tv in zip(base_enc.values, tuned_enc.values)
            ]
            proof = prove_sdip_a(ped, transcript, params, bundle0.vector,
                                 bundle1.vector, delta, blind_delta, sampler)
        return proof.to_bytes(backend)
    raise DegenerateParams(f"no prover for drift class {part!r}")


# -- verification --------------------------------------------------------------


@dataclass
class VerificationReport:
    """Global decision plus a status per block and free-form notes for
    certificate-level failures (root or policy-digest mismatches)."""

    accepted: bool
    statuses: dict[str, str] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)


def verify_certificate(root_base: bytes, root_tuned: bytes, policy: Policy,
                       cert: FtiCertificate, *, pcs: Pcs | None = None,
                       nbdp_delta: float = 0.01, nbdp_kappa: int = 48,
                       mode_b_limit: int = MODE_B_DIM_LIMIT
                       ) -> VerificationReport:
    """Check a certificate against trusted roots and a policy.

    The report's ``statuses`` maps each certificate block to Ok, MerkleFail,
    ProofFail, or MissingProof; ``accepted`` also requires the rebuilt
    Merkle roots and the recomputed policy digest to match.
    """
    report = VerificationReport(accepted=False)
    try:
        backend = get_backend(cert.backend_id)
    except Exception:
        report.notes.append(f"unknown group backend {cert.backend_id!r}")
        return report
    ped = pedersen_for(backend)

    if cert.root_base != root_base or cert.root_tuned != root_tuned:
        report.notes.append("certificate roots do not match trusted roots")
    names = [rec.name for rec in cert.records]
    if len(set(names)) != len(names):
        report.notes.append("duplicate block records")
        return report
    if cert.policy_hash != policy.digest(names):
        report.notes.append("policy digest mismatch")
    if cert.pcs_id:
        if pcs is None or pcs.scheme_id != cert.pcs_id:
            report.notes.append(
                f"certificate needs polynomial commitment scheme "
                f"{cert.pcs_id!r}")
            for rec in cert.records:
                report.statuses[rec.name] = STATUS_PROOF_FAIL
            return report

    try:
        rebuilt_base = MerkleTree(
            [(r.name, r.bundle_base) for r in cert.records])
        rebuilt_tuned = MerkleTree(
            [(r.name, r.bundle_tuned) for r in cert.records])
    except Exception:
        report.notes.append("could not rebuild commitment trees")
        return report
    if rebuilt_base.root != root_base or rebuilt_tuned.root != root_tuned:
        report.notes.append("rebuilt roots do not match trusted roots")

    resolved = policy.resolve(names)
    master = _master_transcript(cert.backend_id, cert.pcs_id, cert.root_base,
                                cert.root_tuned, cert.policy_hash, cert.nonce)
    sorted_names = sorted(names)
    for rec in cert.records:
        report.statuses[rec.name] = _verify_block(
            ped, master, policy, resolved, rec, cert, sorted_names, pcs,
            nbdp_delta, nbdp_kappa, mode_b_limit)
    report.accepted = (not report.notes) and all(
        s == STATUS_OK for s in report.statuses.values()) and bool(names)
    return report


def _verify_block(ped, master, policy, resolved, rec, cert, sorted_names,
                  pcs, nbdp_delta, nbdp_kappa, mode_b_limit) -> str:
    backend = ped.backend
    index = sorted_names.index(rec.name)
    for root, payload, path in (
            (cert.root_base, rec.bundle_base, rec.path_base),
            (cert.root_tuned, rec.bundle_tuned, rec.path_tuned)):
        siblings = [cert.nodes[i] for i in path]
        if not MerkleTree.verify_path(root, index, rec.name, payload,
                                      siblings):
            return STATUS_MERKLE_FAIL

    spec = resolved[rec.name]
    if rec.class_canon != spec.canon():
        return STATUS_PROOF_FAIL
    parts = constituents(spec)
    if len(rec.proofs) != len(parts):
        return STATUS_MISSING
    try:
        bundle0 = Bundle.from_bytes(backend, rec.bundle_base)
        bundle1 = Bundle.from_bytes(backend, rec.bundle_tuned)
    except WireFormatError:
        return STATUS_PROOF_FAIL
    transcript = _block_transcript(master, rec.name, rec.bundle_base,
                                   rec.bundle_tuned)
    d, dp = rec.dims
    n = d * dp
    for part, proof_bytes in zip(parts, rec.proofs):
        try:
            ok = _verify_constituent(
                ped, transcript, part, proof_bytes, bundle0, bundle1, d, dp,
                n, pcs, nbdp_delta, nbdp_kappa, mode_b_limit,
                cert.frac_bits)
        except (WireFormatError, DegenerateParams):
            return STATUS_PROOF_FAIL
        if not ok:
            return STATUS_PROOF_FAIL
    return STATUS_OK


def _verify_constituent(ped, transcript, part, proof_bytes, bundle0, bundle1,
                        d, dp, n, pcs, nbdp_delta, nbdp_kappa, mode_b_limit,
                        frac_bits) -> bool:
    backend = ped.backend
    field = backend.field
    if isinstance(part, Frozen) or (isinstance(part, Norm)
                                    and part.epsilon == 0):
        reader = Reader(proof_bytes)
        proof = SchnorrProof.read_from(backend, reader)
        reader.expect_end()
        return verify_same_value(ped, transcript, bundle1.vector,
                                 bundle0.vector, proof)
    if isinstance(part, Norm):
        params = derive_nbdp_params(
            part.epsilon, nbdp_delta, nbdp_kappa, frac_bits=frac_bits,
            dim=n, field_modulus=field.q)
        proof = NbdpProof.from_bytes(backend, proof_bytes)
        return verify_nbdp(ped, transcript, params, bundle0.vector,
                           bundle1.vector, proof)
    if isinstance(part, Rank):
        if bundle0.poly is None or bundle1.poly is None or pcs is None:
            return False
        proof = MrdpProof.from_bytes(proof_bytes)
        return verify_mrdp(pcs, transcript, bundle0.poly, bundle1.poly,
                           part.r, d, dp, proof)
    if isinstance(part, Sparse):
        if part.mode == MODE_HIDDEN:
            if bundle0.coords is None or bundle1.coords is None:
                return False
            params = SdipParams(part.k, mode=MODE_HIDDEN)
            proof = _read_whole_sdip(backend, proof_bytes)
            return verify_sdip(ped, transcript, params, bundle0.coords,
                               bundle1.coords, n, proof,
                               dim_limit=mode_b_limit)
        params = SdipParams(part.k)
        proof = _read_whole_sdip(backend, proof_bytes)
        return verify_sdip(ped, transcript, params, bundle0.vector,
                           bundle1.vector, n, proof)
    return False


def _read_whole_sdip(backend, data: bytes):
    reader = Reader(data)
    proof = read_sdip_proof(backend, reader)
    reader.expect_end()
    return proof


# -- provenance chains ---------------------------------------------------------


@dataclass(frozen=True)
class ChainStage:
    """One fine-tuning stage: the root pair, its policy digest, and the
    digest of the certificate that attests the transition."""

    root_base: bytes
    root_tuned: bytes
    policy_hash: bytes
    cert_digest: bytes


@dataclass
class ChainReport:
    accepted: bool
    stages: list[tuple[bool, str]]


def certificate_digest(cert_bytes: bytes) -> bytes:
    transcript = Transcript()
    transcript.absorb("CHAIN/link", cert_bytes)
    return transcript.challenge_bytes("CHAIN/link", 32)


def build_chain(cert_blobs: list[bytes]) -> list[ChainStage]:
    stages = []
    for blob in cert_blobs:
        cert = FtiCertificate.from_bytes(blob)
        stages.append(ChainStage(cert.root_base, cert.root_tuned,
                                 cert.policy_hash, certificate_digest(blob)))
    return stages


def verify_chain(chain: list[ChainStage], cert_blobs: list[bytes],
                 policies: list[Policy], *, pcs: Pcs | None = None,
                 nbdp_delta: float = 0.01, nbdp_kappa: int = 48,
                 mode_b_limit: int = MODE_B_DIM_LIMIT) -> ChainReport:
    """Verify stages in order; a failure invalidates all later stages.

    ``cert_blobs`` and ``policies`` run parallel to ``chain``.
    """
    if not len(chain) == len(cert_blobs) == len(policies):
        return ChainReport(False, [(False, "chain inputs disagree in length")])
    stages: list[tuple[bool, str]] = []
    broken = False
    for t, (stage, blob, policy) in enumerate(
            zip(chain, cert_blobs, policies)):
        if broken:
            stages.append((False, "invalidated by an earlier stage"))
            continue
        reason = _verify_stage(t, stage, chain, blob, policy, pcs=pcs,
                               nbdp_delta=nbdp_delta, nbdp_kappa=nbdp_kappa,
                               mode_b_limit=mode_b_limit)
        if reason is None:
            stages.append((True, "ok"))
        else:
            stages.append((False, reason))
            broken = True
    return ChainReport(all(ok for ok, _ in stages) and bool(stages), stages)


def _verify_stage(t, stage, chain, blob, policy, **verify_kwargs
                  ) -> str | None:
    if t > 0 and stage.root_base != chain[t - 1].root_tuned:
        return "base root does not extend the previous stage"
    if certificate_digest(blob) != stage.cert_digest:
        return "certificate digest mismatch"
    try:
        cert = FtiCertificate.from_bytes(blob)
    except WireFormatError as err:
        return f"certificate unparseable: {err}"
    if cert.root_base != stage.root_base \
            or cert.root_tuned != stage.root_tuned:
        return "certificate roots disagree with the chain entry"
    if cert.policy_hash != stage.policy_hash:
        return "certificate policy digest disagrees with the chain entry"
    report = verify_certificate(stage.root_base, stage.root_tuned, policy,
                                cert, **verify_kwargs)
    if not report.accepted:
        detail = "; ".join(report.notes) or ", ".join(
            f"{n}={s}" for n, s in sorted(report.statuses.items())
            if s != STATUS_OK)
        return f"certificate rejected: {detail}"
    return None
