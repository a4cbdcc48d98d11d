"""Error taxonomy.

Rules of engagement: provers raise (they hold the witness and can explain
exactly what went wrong), verifiers never raise on adversarial input -- a
malformed or forged proof is a ``False``/reject, not an exception.  The
deserializers raise ``WireFormatError``; verify entry points catch it and
map it to a reject.
"""

from __future__ import annotations


class DriftCertError(Exception):
    """Base class for every error this package raises on purpose."""


# --- wire / serialization ---------------------------------------------------

class WireFormatError(DriftCertError):
    """Bytes do not parse as the claimed structure."""


# --- tensor archive / encoding ----------------------------------------------

class CodecError(DriftCertError):
    pass


class MalformedHeader(CodecError):
    pass


class DuplicateBlockName(CodecError):
    pass


class OverlappingBlocks(CodecError):
    pass


class TruncatedPayload(CodecError):
    pass


class NonFiniteValue(CodecError):
    """NaN or infinity in a tensor slated for field encoding."""


class MagnitudeOverflow(CodecError):
    """A value exceeds the declared magnitude bound B."""


class OutOfRangeElement(CodecError):
    """A field element decodes outside the signed range the params allow."""


class ShapeMismatch(CodecError):
    pass


class ParamMismatch(CodecError):
    """Two artifacts disagree on encoding parameters."""


class DimensionTooLarge(CodecError):
    pass


# --- algebra ----------------------------------------------------------------

class UnknownLabel(DriftCertError):
    """Transcript label not in the registry; binding discipline violation."""


# --- commitments ------------------------------------------------------------

class DegreeExceeded(DriftCertError):
    """Polynomial does not fit the SRS degree bounds."""


class SrsBackendMismatch(DriftCertError):
    """SRS file was generated for a different group backend."""


# --- sub-proofs -------------------------------------------------------------

class WitnessInconsistent(DriftCertError):
    """Honest prover self-check failed: the witness does not satisfy the relation."""


class WitnessOutOfRange(WitnessInconsistent):
    """Committed value lies outside the range the proof would certify."""


# --- drift protocols --------------------------------------------------------

class DegenerateParams(DriftCertError):
    """Protocol parameters are unusable (epsilon <= 0, delta outside (0,1), ...)."""


class ProjectionExceedsThreshold(DriftCertError):
    """Honest NBDP prover refuses: some projection of the drift exceeds T.

    Carries the projection index and the offending magnitude so callers can
    report or retry with a fresh transcript nonce.
    """

    def __init__(self, index: int, magnitude: int, threshold: int):
        super().__init__(
            f"projection {index} has |z| = {magnitude} > T = {threshold}"
        )
        self.index = index
        self.magnitude = magnitude
        self.threshold = threshold


class RankExceeded(DriftCertError):
    """Drift rank is larger than the policy bound r."""

    def __init__(self, bound: int, found: int):
        super().__init__(f"drift rank {found} exceeds policy bound {bound}")
        self.bound = bound
        self.found = found


class SparsityExceeded(DriftCertError):
    """Drift support is larger than the policy bound k."""

    def __init__(self, bound: int, found: int):
        super().__init__(f"drift support {found} exceeds policy bound {bound}")
        self.bound = bound
        self.found = found


# --- policy -----------------------------------------------------------------

class PolicyError(DriftCertError):
    pass


class PolicySyntaxError(PolicyError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class UnknownClass(PolicyError):
    pass


class InvalidParameter(PolicyError):
    pass


class DuplicateBlockRule(PolicyError):
    pass


class UnrecognizedNaming(PolicyError):
    """Manifest does not follow the naming convention a preset expects."""


# --- aggregation ------------------------------------------------------------

class PolicyViolation(DriftCertError):
    """Honest prover refuses: drift violates the policy on named blocks.

    ``failures`` is a list of (block name, class name, detail) triples.
    """

    def __init__(self, failures: list[tuple[str, str, str]]):
        lines = ", ".join(f"{b} [{c}]: {d}" for b, c, d in failures)
        super().__init__(f"policy violated on {len(failures)} block(s): {lines}")
        self.failures = failures


class ManifestMismatch(DriftCertError):
    """Base and tuned archives disagree on block names, shapes, or encoding."""
