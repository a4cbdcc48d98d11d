"""Tensor archives and fixed-point field encoding.

Weights travel as ``.ftia`` archives: magic ``FTIA``, a version byte, a
64-bit header length, a JSON header describing named blocks (dtype, shape,
payload offset/length) and the encoding parameters, then a little-endian
raw payload.  Loading validates the header hard: unknown schema, duplicate
names, overlapping or truncated payload ranges are all distinct errors.

Encoding maps a real tensor to the scalar field: each value becomes
round(w * 2^f) mod q with ties rounded away from zero, after the tensor is
flattened to a d x d' matrix (leading axis by trailing axes) and vectorized
column-major.  The headroom invariant n * B * 2^f < q/2 guarantees that
inner products of encoded drifts against +-1 vectors never wrap, so every
statement the protocols certify about encoded values is a statement about
exact scaled reals.

``rank_preserving_requantize`` builds a tuned tensor whose encoded drift is
exactly a rank-r product: the factors carry f/2 fractional bits each, so
their field product carries f and lands on the encoding grid.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import (
    DimensionTooLarge, DuplicateBlockName, MagnitudeOverflow, MalformedHeader,
    ManifestMismatch, NonFiniteValue, OutOfRangeElement, OverlappingBlocks,
    ParamMismatch, ShapeMismatch, TruncatedPayload,
)
from .field import PrimeField, field_by_id

MAGIC = b"FTIA"
VERSION = 1
MAX_NAME_BYTES = 256

_DTYPES = {"f32": "<f4", "f64": "<f8"}
_ITEMSIZE = {"f32": 4, "f64": 8}


@dataclass(frozen=True)
class EncodingParams:
    """Fixed-point encoding contract shared by both models of a pair."""

    frac_bits: int = 32
    magnitude_bound: int = 1 << 16
    field_id: str = "bls12-381-scalar"

    def __post_init__(self):
        if not 1 <= self.frac_bits <= 250:
            raise MalformedHeader(f"frac_bits {self.frac_bits} out of range")
        b = self.magnitude_bound
        if b < 1 or b & (b - 1):
            raise MalformedHeader("magnitude_bound must be a power of two")
        if b * self.scale >= field_by_id(self.field_id).q // 2:
            raise MalformedHeader("per-element bound B*2^f must stay below q/2")

    @property
    def field(self) -> PrimeField:
        return field_by_id(self.field_id)

    @property
    def scale(self) -> int:
        return 1 << self.frac_bits

    def headroom_limit(self) -> int:
        """Largest block length n with n * B * 2^f < q/2."""
        return (self.field.q // 2 - 1) // (self.magnitude_bound * self.scale)

    def digest(self) -> bytes:
        h = hashlib.sha256(b"driftcert-encoding-v1")
        h.update(self.frac_bits.to_bytes(4, "little"))
        h.update(self.magnitude_bound.to_bytes(16, "little"))
        h.update(self.field_id.encode("ascii"))
        return h.digest()

    def to_json(self) -> dict:
        return {
            "f": self.frac_bits,
            "B": self.magnitude_bound,
            "field": self.field_id,
        }

    @classmethod
    def from_json(cls, obj) -> "EncodingParams":
        if not isinstance(obj, dict) or set(obj) != {"f", "B", "field"}:
            raise MalformedHeader("encoding section has wrong schema")
        if not isinstance(obj["f"], int) or not isinstance(obj["B"], int) \
                or not isinstance(obj["field"], str):
            raise MalformedHeader("encoding section has wrong value types")
        return cls(obj["f"], obj["B"], obj["field"])


def matrix_dims(shape: tuple[int, ...]) -> tuple[int, int]:
    """Tensor -> matrix convention: leading axis by flattened trailing axes;
    vectors are d x 1."""
    if len(shape) == 1:
        return (shape[0], 1)
    d = shape[0]
    dp = 1
    for s in shape[1:]:
        dp *= s
    return (d, dp)


@dataclass
class EncodedBlock:
    """A block over F_q: column-major vectorization of its d x d' matrix."""

    name: str
    shape: tuple[int, ...]
    dims: tuple[int, int]
    values: list[int]
    params: EncodingParams

    def __len__(self) -> int:
        return len(self.values)

    def entry(self, i: int, j: int) -> int:
        d = self.dims[0]
        return self.values[i + j * d]

    def column(self, j: int) -> list[int]:
        d = self.dims[0]
        return self.values[j * d:(j + 1) * d]

    def signed_values(self) -> list[int]:
        f = self.params.field
        return [f.signed(v) for v in self.values]

    def signed_array(self) -> np.ndarray:
        """Signed values as int64; valid because headroom caps magnitudes."""
        return np.array(self.signed_values(), dtype=np.int64)


class TensorArchive:
    """Named real tensors plus the encoding parameters they ship with."""

    def __init__(self, blocks: dict[str, np.ndarray], params: EncodingParams):
        for name in blocks:
            _check_name(name)
        self.blocks = dict(sorted(blocks.items()))
        self.params = params

    def names(self) -> list[str]:
        return list(self.blocks)

    def manifest(self) -> list[tuple[str, str, tuple[int, ...]]]:
        out = []
        for name, arr in self.blocks.items():
            dtype = "f32" if arr.dtype == np.float32 else "f64"
            out.append((name, dtype, tuple(arr.shape)))
        return out

    def encode(self, name: str) -> EncodedBlock:
        return encode_block(name, self.blocks[name], self.params)

    def encode_all(self) -> dict[str, EncodedBlock]:
        return {name: self.encode(name) for name in self.blocks}


def _check_name(name: str) -> None:
    if not name or len(name.encode("utf-8")) > MAX_NAME_BYTES:
        raise MalformedHeader(f"block name length out of range: {name!r}")


def _check_headroom(n: int, params: EncodingParams) -> None:
    if n > params.headroom_limit():
        raise DimensionTooLarge(
            f"block of {n} elements breaks headroom n*B*2^f < q/2 "
            f"(limit {params.headroom_limit()})"
        )


# -- archive I/O --------------------------------------------------------------

def save_archive(archive: TensorArchive, path: str | None = None) -> bytes:
    header_blocks = {}
    payload = bytearray()
    for name, arr in archive.blocks.items():
        if arr.dtype == np.float32:
            dtype = "f32"
        elif arr.dtype == np.float64:
            dtype = "f64"
        else:
            raise MalformedHeader(f"unsupported dtype {arr.dtype} on {name!r}")
        raw = np.ascontiguousarray(arr, dtype=_DTYPES[dtype]).tobytes()
        header_blocks[name] = {
            "dtype": dtype,
            "shape": list(arr.shape),
            "offset": len(payload),
            "length": len(raw),
        }
        payload.extend(raw)
    header = {
        "blocks": header_blocks,
        "encoding": archive.params.to_json(),
    }
    hjson = json.dumps(header, sort_keys=True, separators=(",", ":")).encode()
    blob = MAGIC + bytes([VERSION]) + len(hjson).to_bytes(8, "little") + hjson + bytes(payload)
    if path is not None:
        with open(path, "wb") as fh:
            fh.write(blob)
    return blob


def _header_pairs_hook(pairs):
    keys = [k for k, _ in pairs]
    if len(set(keys)) != len(keys):
        dupes = sorted({k for k in keys if keys.count(k) > 1})
        raise DuplicateBlockName(f"duplicate header key(s): {dupes}")
    return dict(pairs)


def load_archive(source: str | bytes) -> TensorArchive:
    if isinstance(source, (bytes, bytearray)):
        blob = bytes(source)
    else:
        with open(source, "rb") as fh:
            blob = fh.read()
    if blob[:4] != MAGIC:
        raise MalformedHeader("bad magic; not a tensor archive")
    if len(blob) < 13:
        raise MalformedHeader("archive shorter than fixed header")
    if blob[4] != VERSION:
        raise MalformedHeader(f"unsupported archive version {blob[4]}")
    hlen = int.from_bytes(blob[5:13], "little")
    if 13 + hlen > len(blob):
        raise MalformedHeader("declared header length exceeds file size")
    try:
        header = json.loads(
            blob[13:13 + hlen].decode("utf-8"), object_pairs_hook=_header_pairs_hook)
    except DuplicateBlockName:
        raise
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MalformedHeader(f"header is not valid JSON: {exc}") from None
    if not isinstance(header, dict) or set(header) != {"blocks", "encoding"}:
        raise MalformedHeader("header must have exactly 'blocks' and 'encoding'")
    params = EncodingParams.from_json(header["encoding"])
    payload = blob[13 + hlen:]

    blocks: dict[str, np.ndarray] = {}
    spans: list[tuple[int, int, str]] = []
    entries = header["blocks"]
    if not isinstance(entries, dict):
        raise MalformedHeader("'blocks' must be an object")
    for name, rec in entries.items():
        _check_name(name)
        if not isinstance(rec, dict) or set(rec) != {
                "dtype", "shape", "offset", "length"}:
            raise MalformedHeader(f"block {name!r} has wrong record schema")
        dtype, shape, offset, length = (
            rec["dtype"], rec["shape"], rec["offset"], rec["length"])
        if dtype not in _DTYPES:
            raise MalformedHeader(f"block {name!r} has unknown dtype {dtype!r}")
        if (not isinstance(shape, list) or not shape
                or not all(isinstance(s, int) and s > 0 for s in shape)):
            raise MalformedHeader(f"block {name!r} has invalid shape {shape!r}")
        if not isinstance(offset, int) or not isinstance(length, int) \
                or offset < 0 or length < 0:
            raise MalformedHeader(f"block {name!r} has invalid span")
        count = 1
        for s in shape:
            count *= s
        if length != count * _ITEMSIZE[dtype]:
            raise MalformedHeader(
                f"block {name!r} length {length} != shape volume")
        if offset + length > len(payload):
            raise TruncatedPayload(
                f"block {name!r} extends past end of payload")
        spans.append((offset, offset + length, name))
        arr = np.frombuffer(
            payload[offset:offset + length], dtype=_DTYPES[dtype]).reshape(shape)
        blocks[name] = arr.copy()
    spans.sort()
    for (s0, e0, n0), (s1, e1, n1) in zip(spans, spans[1:]):
        if s1 < e0:
            raise OverlappingBlocks(f"blocks {n0!r} and {n1!r} overlap")
    archive = TensorArchive(blocks, params)
    if blocks:
        largest = max(
            int(np.prod(a.shape)) for a in blocks.values())
        _check_headroom(largest, params)
    return archive


# -- fixed-point encoding -----------------------------------------------------

def _round_half_away(x: np.ndarray) -> np.ndarray:
    """Round-half-away-from-zero, exact on the float64 grid.

    np.rint handles non-ties; exact .5 fractions are detected and pushed
    outward, so there is no x + 0.5 misrounding hazard.
    """
    base = np.floor(x)
    ties = (x - base) == 0.5
    out = np.rint(x)
    if np.any(ties):
        away = np.where(x > 0, np.ceil(x), base)
        out = np.where(ties, away, out)
    return out


def encode_block(name: str, arr: np.ndarray, params: EncodingParams) -> EncodedBlock:
    if arr.dtype not in (np.float32, np.float64):
        raise MalformedHeader(f"cannot encode dtype {arr.dtype}")
    data = arr.astype(np.float64)
    if not np.all(np.isfinite(data)):
        raise NonFiniteValue(f"block {name!r} contains NaN or infinity")
    bound = float(params.magnitude_bound)
    if np.any(np.abs(data) > bound):
        raise MagnitudeOverflow(
            f"block {name!r} has |value| > B = {params.magnitude_bound}")
    _check_headroom(data.size, params)
    dims = matrix_dims(tuple(data.shape))
    vec = data.reshape(dims).flatten(order="F")
    scaled = _round_half_away(vec * float(params.scale))
    ints = scaled.astype(np.int64).tolist()
    q = params.field.q
    values = [v + q if v < 0 else v for v in ints]
    return EncodedBlock(name, tuple(arr.shape), dims, values, params)


def decode_block(block: EncodedBlock) -> np.ndarray:
    f = block.params.field
    limit = block.params.magnitude_bound * block.params.scale
    signed = []
    for v in block.values:
        s = f.signed(v)
        if abs(s) > limit:
            raise OutOfRangeElement(
                f"element {s} outside +-B*2^f in block {block.name!r}")
        signed.append(s)
    vec = np.array(signed, dtype=np.float64) * (2.0 ** -block.params.frac_bits)
    mat = vec.reshape(block.dims, order="F")
    return mat.reshape(block.shape)


def compute_drift(base: EncodedBlock, tuned: EncodedBlock) -> EncodedBlock:
    """tuned - base over F_q, elementwise."""
    if base.name != tuned.name or base.shape != tuned.shape:
        raise ShapeMismatch(
            f"drift between {base.name!r}{base.shape} and "
            f"{tuned.name!r}{tuned.shape}")
    if base.params != tuned.params:
        raise ParamMismatch("encoding params differ between base and tuned")
    q = base.params.field.q
    values = [(a - b) % q for a, b in zip(tuned.values, base.values)]
    return EncodedBlock(base.name, base.shape, base.dims, values, base.params)


def drift_norm_squared(drift: EncodedBlock) -> int:
    """Exact squared Frobenius norm of the signed encoded drift."""
    return sum(s * s for s in drift.signed_values())


def check_manifests_match(a: TensorArchive, b: TensorArchive) -> None:
    if a.params != b.params:
        raise ManifestMismatch("encoding params differ between archives")
    ma, mb = a.manifest(), b.manifest()
    if ma != mb:
        da = {m[0]: m[1:] for m in ma}
        db = {m[0]: m[1:] for m in mb}
        only_a = sorted(set(da) - set(db))
        only_b = sorted(set(db) - set(da))
        changed = sorted(n for n in set(da) & set(db) if da[n] != db[n])
        raise ManifestMismatch(
            f"manifests differ (only base: {only_a}, only tuned: {only_b}, "
            f"shape/dtype changed: {changed})")


# -- rank-preserving requantization -------------------------------------------

def rank_preserving_requantize(
    w0: np.ndarray,
    a: np.ndarray,
    b: np.ndarray,
    params: EncodingParams,
) -> tuple[np.ndarray, tuple[list[list[int]], list[list[int]]]]:
    """Tuned tensor whose encoded drift equals enc(a) @ enc(b) over F_q.

    Factors are encoded with f/2 fractional bits each so the product sits
    exactly on the f-bit grid; the returned tensor is float64 because the
    grid needs more mantissa than float32 carries.
    """
    if params.frac_bits % 2:
        raise MagnitudeOverflow("requantization needs even frac_bits")
    dims = matrix_dims(tuple(w0.shape))
    d, dp = dims
    if a.ndim != 2 or b.ndim != 2 or a.shape[0] != d or b.shape[1] != dp \
            or a.shape[1] != b.shape[0]:
        raise ShapeMismatch(
            f"factor shapes {a.shape} x {b.shape} do not give {dims}")
    half = params.frac_bits // 2
    bound = float(params.magnitude_bound)
    for nm, arr in (("a", a), ("b", b)):
        if not np.all(np.isfinite(arr)):
            raise NonFiniteValue(f"factor {nm} contains NaN or infinity")
        if np.any(np.abs(arr) > bound):
            raise MagnitudeOverflow(f"factor {nm} has |value| > B")
    a_int = _round_half_away(a.astype(np.float64) * float(1 << half)).astype(np.int64)
    b_int = _round_half_away(b.astype(np.float64) * float(1 << half)).astype(np.int64)

    r = a.shape[1]
    peak = r * int(np.max(np.abs(a_int), initial=0)) * int(np.max(np.abs(b_int), initial=0))
    if peak < 2**62:
        delta = a_int @ b_int
    else:
        delta = np.array(
            [[sum(int(a_int[i, k]) * int(b_int[k, j]) for k in range(r))
              for j in range(dp)] for i in range(d)], dtype=object)

    w0_enc = encode_block("w0", w0, params)
    base_mat = np.array(w0_enc.signed_values(), dtype=np.int64).reshape(dims, order="F")
    star = base_mat.astype(object) + delta.astype(object)
    limit = params.magnitude_bound * params.scale
    if any(abs(int(v)) > limit for v in star.flat):
        raise MagnitudeOverflow("requantized tensor exceeds +-B")
    w_star = (star.astype(np.float64) * (2.0 ** -params.frac_bits)).reshape(w0.shape)

    q = params.field.q
    a_field = [[int(v) % q for v in row] for row in a_int]
    b_field = [[int(v) % q for v in row] for row in b_int]
    return w_star, (a_field, b_field)
