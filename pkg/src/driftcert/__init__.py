"""driftcert: succinct zero-knowledge certificates of bounded weight drift.

A fine-tuned model is accepted when the difference between its committed
weights and the committed base weights satisfies a per-block drift policy:
frozen, norm-bounded, rank-bounded, sparse, or an intersection of those.
The prover sees both weight sets; the verifier sees only commitments, the
policy, and a certificate whose size is polylogarithmic in the model.

Typical library use::

    from driftcert import (get_backend, parse_policy, prove_all,
                           verify_certificate)

    backend = get_backend("bls12-381")
    cert = prove_all(base, tuned, policy, backend=backend, seed=seed)
    report = verify_certificate(cert.root_base, cert.root_tuned, policy,
                                cert)

The ``driftcert`` command line exposes the same workflow plus synthetic
model generators, detection-rate experiments, and size/latency benches.
"""

from .aggregate import (FtiCertificate, VerificationReport, build_chain,
                        certificate_digest, commit_archive, prove_all,
                        verify_certificate, verify_chain)
from .codec import (EncodingParams, TensorArchive, encode_block, load_archive,
                    rank_preserving_requantize, save_archive)
from .errors import (DriftCertError, PolicyViolation,
                     ProjectionExceedsThreshold, RankExceeded,
                     SparsityExceeded, WireFormatError)
from .groups import get_backend
from .mrdp import prove_mrdp, verify_mrdp
from .nbdp import calibrate_nbdp, derive_nbdp_params, prove_nbdp, verify_nbdp
from .pcs import KzgPcs, MerklePcs, load_srs, save_srs, setup_kzg
from .pedersen import Pedersen, pedersen_for
from .policy import (Frozen, Intersection, Norm, Policy, Rank, Sparse,
                     format_policy, parse_policy, preset_policy)
from .sdip import SdipParams, prove_sdip_a, prove_sdip_b, verify_sdip
from .transcript import Transcript

__version__ = "0.1.0"

__all__ = [
    "DriftCertError", "EncodingParams", "Frozen", "FtiCertificate",
    "Intersection", "KzgPcs", "MerklePcs", "Norm", "Pedersen", "Policy",
    "PolicyViolation", "ProjectionExceedsThreshold", "Rank", "RankExceeded",
    "SdipParams", "Sparse", "SparsityExceeded", "TensorArchive",
    "Transcript", "VerificationReport", "WireFormatError", "build_chain",
    "calibrate_nbdp", "certificate_digest", "commit_archive", "encode_block",
    "derive_nbdp_params", "format_policy", "get_backend", "load_archive",
    "load_srs", "parse_policy", "pedersen_for", "preset_policy",
    "prove_all", "prove_mrdp", "prove_nbdp", "prove_sdip_a", "prove_sdip_b",
    "rank_preserving_requantize", "save_archive", "save_srs", "setup_kzg",
    "verify_certificate", "verify_chain", "verify_mrdp", "verify_nbdp",
    "verify_sdip", "__version__",
]
