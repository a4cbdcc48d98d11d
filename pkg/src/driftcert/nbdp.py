"""Norm-bounded drift proofs.

The statement: the Frobenius norm of the (real-valued) drift between two
committed blocks is at most epsilon.  The prover commits m random Rademacher
projections of the encoded drift, proves each is the stated linear
functional of the committed difference, and proves each lies within the
threshold T = floor(tau * 2^f) with tau = epsilon * sqrt(2 ln(2m / delta)).

Completeness is probabilistic: an in-bound drift exceeds the threshold on
some projection with probability at most delta (Hoeffding plus a union
bound), in which case the honest prover refuses with
``ProjectionExceedsThreshold`` rather than emitting an unprovable range
statement.  Soundness is statistical and direction-dependent: a drift of
norm 2 epsilon in a random direction is caught with high probability, while
drift concentrated on few coordinates can hide below the threshold until
its norm approaches tau; ``calibrate_nbdp`` measures both regimes rather
than trusting a constant.

Projection vectors are never transmitted: both sides expand them from a
seed squeezed out of the transcript after the commitments and parameters
are absorbed, so the prover commits before the challenges exist.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateParams, DimensionTooLarge, ParamMismatch,
    ProjectionExceedsThreshold, WireFormatError, WitnessInconsistent,
)
from .pedersen import Pedersen
from .prf import PrfStream
from .subproofs import (
    LinearProof, RangeProof, ScalarSampler, prove_linear, prove_range,
    verify_linear, verify_range,
)
from .transcript import Transcript
from .wire import Reader

PROJECTION_DOMAIN = "NBDP/z"

MAX_DIM = 1 << 20
_MAX_ROUNDS = 20


def _linear_slot_bytes(backend) -> int:
    """Fixed wire width of one linear-proof slot, sized for MAX_DIM rounds.

    The inner argument is logarithmic in the projection dimension, so its
    natural encoding would leak the block shape and make proof length
    dimension-dependent.  Each linear proof therefore occupies a constant
    width slot; the unused tail must be zero and is checked on read, so
    the serialized proof length depends on the params alone.
    """
    e = backend.element_bytes
    return 2 * e + 2 + 2 * _MAX_ROUNDS * e + 64


@dataclass(frozen=True)
class NbdpParams:
    """Derived projection-protocol parameters for one norm policy."""

    epsilon: float
    delta: float
    kappa: int
    gamma: float
    m: int
    tau: float
    threshold: int
    frac_bits: int
    dim: int

    def digest(self) -> bytes:
        h = hashlib.sha256(b"driftcert-nbdp-params-v1")
        h.update(np.float64(self.epsilon).tobytes())
        h.update(np.float64(self.delta).tobytes())
        h.update(self.kappa.to_bytes(4, "little"))
        h.update(self.m.to_bytes(4, "little"))
        h.update(self.threshold.to_bytes(32, "little"))
        h.update(self.frac_bits.to_bytes(4, "little"))
        h.update(self.dim.to_bytes(8, "little"))
        return h.digest()


def padded_dim(n: int) -> int:
    """Smallest power of two >= n (projection vectors live at this length)."""
    if n < 1:
        raise DegenerateParams("block length must be positive")
    return 1 << (n - 1).bit_length()


def derive_nbdp_params(epsilon: float, delta: float = 0.01, kappa: int = 48,
                       *, frac_bits: int = 32, dim: int,
                       gamma: float = 0.1,
                       field_modulus: int | None = None) -> NbdpParams:
    """m = ceil(kappa * ln(2/delta)); tau = epsilon * sqrt(2 ln(2m/delta))."""
    if not epsilon > 0 or not math.isfinite(epsilon):
        raise DegenerateParams(f"epsilon must be positive, got {epsilon}")
    if not 0 < delta < 1:
        raise DegenerateParams(f"delta must lie in (0, 1), got {delta}")
    if kappa < 1:
        raise DegenerateParams(f"kappa must be >= 1, got {kappa}")
    if dim < 1 or dim & (dim - 1):
        raise DegenerateParams(f"dim must be a power of two, got {dim}")
    if dim > MAX_DIM:
        raise DimensionTooLarge(
            f"projection dim {dim} exceeds the supported cap {MAX_DIM}")
    m = max(1, math.ceil(kappa * math.log(2.0 / delta)))
    tau = epsilon * math.sqrt(2.0 * math.log(2.0 * m / delta))
    threshold = int(tau * 2.0**frac_bits)
    if field_modulus is not None and m * threshold >= field_modulus // 2:
        raise DegenerateParams("m * T leaves no headroom below q/2")
    return NbdpParams(epsilon, delta, kappa, gamma, m, tau, threshold,
                      frac_bits, dim)


@dataclass
class NbdpProof:
    """m records of (projection commitment, linear proof, range proof)."""

    params_digest: bytes
    records: list[tuple[object, LinearProof, RangeProof]]

    def to_bytes(self, backend) -> bytes:
        slot = _linear_slot_bytes(backend)
        buf = bytearray()
        buf.extend(self.params_digest)
        buf.extend(len(self.records).to_bytes(4, "little"))
        for commitment, linear, rng in self.records:
            buf.extend(backend.serialize(commitment))
            tmp = bytearray()
            linear.write_into(backend, tmp)
            if len(tmp) > slot:
                raise DegenerateParams(
                    f"linear proof spans {len(tmp)} bytes, slot is {slot}")
            buf.extend(tmp)
            buf.extend(bytes(slot - len(tmp)))
            rng.write_into(backend, buf)
        return bytes(buf)

    @classmethod
    def read_from(cls, backend, reader: Reader) -> "NbdpProof":
        slot = _linear_slot_bytes(backend)
        digest = reader.take(32)
        m = int.from_bytes(reader.take(4), "little")
        records = []
        for _ in range(m):
            commitment = backend.deserialize(reader.take(backend.element_bytes))
            sub = Reader(reader.take(slot))
            linear = LinearProof.read_from(backend, sub)
            if any(sub.take(sub.remaining())):
                raise WireFormatError("linear proof slot tail is not zero")
            rng = RangeProof.read_from(backend, reader)
            records.append((commitment, linear, rng))
        return cls(digest, records)

    @classmethod
    def from_bytes(cls, backend, data: bytes) -> "NbdpProof":
        reader = Reader(data)
        proof = cls.read_from(backend, reader)
        reader.expect_end()
        return proof


def _absorb_statement(transcript: Transcript, backend, params: NbdpParams,
                      c_base, c_tuned) -> bytes:
    blob = params.digest()
    blob += backend.serialize(c_base)
    blob += backend.serialize(c_tuned)
    transcript.absorb("NBDP/params", blob)
    return transcript.challenge_bytes("NBDP/z", 32)


def _int64_safe(params: NbdpParams, bound: int) -> bool:
    return params.dim * bound < 2**62


def projection_values(params: NbdpParams, seed: bytes,
                      delta_signed) -> list[int]:
    """The m signed projections <r_i, delta>, exact.

    Uses an int64 matrix product when magnitudes cannot overflow, falling
    back to exact Python integers otherwise.  This is the prover's own
    computation, factored out so calibration and refusal-rate measurements
    exercise the identical code path.
    """
    prf = PrfStream(seed, PROJECTION_DOMAIN)
    signs = prf.rademacher(params.m * params.dim).reshape(params.m, params.dim)
    vec = np.asarray(delta_signed)
    if len(vec) > params.dim:
        raise WitnessInconsistent(
            f"drift length {len(vec)} exceeds projection dim {params.dim}")
    peak = int(np.max(np.abs(vec), initial=0))
    if _int64_safe(params, peak):
        padded = np.zeros(params.dim, dtype=np.int64)
        padded[:len(vec)] = vec.astype(np.int64)
        return (signs.astype(np.int64) @ padded).tolist()
    values = [int(v) for v in vec] + [0] * (params.dim - len(vec))
    return [
        sum(int(s) * v for s, v in zip(signs[i], values))
        for i in range(params.m)
    ]


def prove_nbdp(ped: Pedersen, transcript: Transcript, params: NbdpParams,
               c_base, c_tuned, delta_signed, blind_delta: int,
               sampler: ScalarSampler) -> NbdpProof:
    """Prove the committed drift c_tuned - c_base has all projections in
    [-T, T].

    ``delta_signed`` is the signed encoded drift; ``blind_delta`` the
    blinding of the homomorphic difference commitment.  Raises
    ``ProjectionExceedsThreshold`` on the (probability <= delta) completeness
    failure, before any commitment is produced.
    """
    backend = ped.backend
    field = backend.field
    q = field.q
    seed = _absorb_statement(transcript, backend, params, c_base, c_tuned)
    projections = projection_values(params, seed, delta_signed)
    for i, z in enumerate(projections):
        if abs(z) > params.threshold:
            raise ProjectionExceedsThreshold(i, abs(z), params.threshold)

    c_delta = backend.sub(c_tuned, c_base)
    witness = [int(v) % q for v in delta_signed]
    witness += [0] * (params.dim - len(witness))
    prf = PrfStream(seed, PROJECTION_DOMAIN)
    signs = prf.rademacher(params.m * params.dim).reshape(params.m, params.dim)
    records = []
    for i, z in enumerate(projections):
        coeffs = [1 if s > 0 else q - 1 for s in signs[i]]
        blind_z = sampler.next()
        c_z = ped.commit_scalar(z % q, blind_z)
        transcript.absorb("NBDP/z", backend.serialize(c_z))
        linear = prove_linear(ped, transcript, coeffs, c_delta, c_z,
                              witness, blind_delta, z % q, blind_z, sampler)
        transcript.absorb("NBDP/range", backend.serialize(c_z))
        rng = prove_range(ped, transcript, c_z, z, blind_z,
                          -params.threshold, params.threshold, sampler)
        records.append((c_z, linear, rng))
    return NbdpProof(params.digest(), records)


def verify_nbdp(ped: Pedersen, transcript: Transcript, params: NbdpParams,
                c_base, c_tuned, proof: NbdpProof) -> bool:
    backend = ped.backend
    q = backend.field.q
    if proof.params_digest != params.digest():
        return False
    if len(proof.records) != params.m:
        return False
    seed = _absorb_statement(transcript, backend, params, c_base, c_tuned)
    c_delta = backend.sub(c_tuned, c_base)
    prf = PrfStream(seed, PROJECTION_DOMAIN)
    signs = prf.rademacher(params.m * params.dim).reshape(params.m, params.dim)
    for i, (c_z, linear, rng) in enumerate(proof.records):
        coeffs = [1 if s > 0 else q - 1 for s in signs[i]]
        transcript.absorb("NBDP/z", backend.serialize(c_z))
        if not verify_linear(ped, transcript, coeffs, c_delta, c_z, linear):
            return False
        transcript.absorb("NBDP/range", backend.serialize(c_z))
        if not verify_range(ped, transcript, c_z, -params.threshold,
                            params.threshold, rng):
            return False
    return True


# -- calibration ---------------------------------------------------------------

def calibrate_nbdp(gamma: float, kappas: list[int], trials: int, *,
                   epsilon: float = 0.05, delta: float = 0.01,
                   dim: int = 4096, frac_bits: int = 32, seed: int = 0,
                   direction: str = "random") -> list[dict]:
    """Measured detection rate of drift with norm (1 + gamma) * epsilon.

    Detection means at least one projection magnitude exceeds T, which is
    exactly the event that makes the honest prover refuse and any prover
    fail the range statements.  ``direction`` selects the drift shape:
    ``random`` (isotropic, the generic case) or ``single`` (all mass on one
    coordinate, the adversarial shape that hides from sign projections until
    the norm reaches roughly tau).
    """
    if trials < 1:
        raise DegenerateParams("trials must be >= 1")
    if direction not in ("random", "single"):
        raise DegenerateParams(f"unknown direction {direction!r}")
    rng = np.random.default_rng(seed)
    norm = (1.0 + gamma) * epsilon
    rows = []
    for kappa in kappas:
        params = derive_nbdp_params(
            epsilon, delta, kappa, frac_bits=frac_bits, dim=dim, gamma=gamma)
        detected = 0
        for _ in range(trials):
            if direction == "single":
                drift = np.zeros(dim)
                drift[int(rng.integers(dim))] = norm * (
                    1.0 if rng.random() < 0.5 else -1.0)
            else:
                drift = rng.standard_normal(dim)
                drift *= norm / np.linalg.norm(drift)
            encoded = np.rint(drift * 2.0**frac_bits).astype(np.int64)
            signs = rng.integers(
                0, 2, size=(params.m, dim), dtype=np.int64) * 2 - 1
            z = signs @ encoded
            if int(np.max(np.abs(z))) > params.threshold:
                detected += 1
        rows.append({
            "kappa": kappa,
            "m": params.m,
            "tau": params.tau,
            "gamma": gamma,
            "direction": direction,
            "trials": trials,
            "detection": detected / trials,
        })
    return rows
