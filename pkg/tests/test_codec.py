"""Tensor archives and fixed-point encoding: format, exactness, drift."""

from __future__ import annotations

import json
import random

import numpy as np
import pytest

from driftcert.codec import (EncodingParams, TensorArchive, compute_drift,
                             decode_block, drift_norm_squared, encode_block,
                             load_archive, matrix_dims,
                             rank_preserving_requantize, save_archive)
from driftcert.errors import (DimensionTooLarge, DuplicateBlockName,
                              MagnitudeOverflow, MalformedHeader,
                              ManifestMismatch, NonFiniteValue,
                              OverlappingBlocks, ParamMismatch, ShapeMismatch,
                              TruncatedPayload)
from driftcert.codec import check_manifests_match

Q = 52435875175126190479447740508185965837690552500527637822603658699938581184513


def params32():
    return EncodingParams(frac_bits=32)


# -- encoding exactness -------------------------------------------------------

def test_encode_known_values():
    p = params32()
    block = encode_block("w", np.array([0.0, 1.0, -0.5, 0.25]), p)
    assert block.values[0] == 0
    assert block.values[1] == 2**32
    assert block.values[2] == Q - 2**31
    assert block.values[3] == 2**30


def test_decode_known_values():
    p = params32()
    block = encode_block("w", np.array([0.25]), p)
    assert decode_block(block)[0] == 0.25
    # the largest field element is signed -1, i.e. -2^-f
    block.values[0] = Q - 1
    assert decode_block(block)[0] == -(2.0 ** -32)


def test_rounding_is_half_away_from_zero():
    p = EncodingParams(frac_bits=1)
    block = encode_block("w", np.array([0.25, -0.25, 0.75, -0.75]), p)
    f = p.field
    assert [f.signed(v) for v in block.values] == [1, -1, 2, -2]


def test_round_trip_error_bound():
    p = params32()
    rng = np.random.default_rng(5001)
    arr = rng.uniform(-100.0, 100.0, size=4096)
    back = decode_block(encode_block("w", arr, p))
    assert np.max(np.abs(back - arr)) <= 2.0 ** -33


def test_round_trip_exact_on_grid():
    p = EncodingParams(frac_bits=16)
    rng = np.random.default_rng(5002)
    arr = rng.integers(-1000, 1000, size=256).astype(np.float64) * 2.0**-16
    back = decode_block(encode_block("w", arr, p))
    assert np.array_equal(back, arr)


def test_encode_rejects_bad_values():
    p = params32()
    with pytest.raises(NonFiniteValue):
        encode_block("w", np.array([1.0, np.nan]), p)
    with pytest.raises(NonFiniteValue):
        encode_block("w", np.array([np.inf]), p)
    with pytest.raises(MagnitudeOverflow):
        encode_block("w", np.array([float(1 << 17)]), p)


def test_headroom_limit_enforced():
    # with f=32 and B=2^16 the headroom limit sits near 2^204; shrink the
    # field pressure instead by raising frac_bits until a small block trips
    p = EncodingParams(frac_bits=230, magnitude_bound=1 << 16)
    limit = p.headroom_limit()
    assert 1 <= limit < 1000
    with pytest.raises(DimensionTooLarge):
        encode_block("w", np.zeros(limit + 1), p)


def test_params_validation():
    with pytest.raises(MalformedHeader):
        EncodingParams(frac_bits=0)
    with pytest.raises(MalformedHeader):
        EncodingParams(magnitude_bound=3)
    with pytest.raises(MalformedHeader):
        EncodingParams(frac_bits=240, magnitude_bound=1 << 16)
    a, b = EncodingParams(frac_bits=16), EncodingParams(frac_bits=32)
    assert a.digest() != b.digest()
    assert a.digest() == EncodingParams(frac_bits=16).digest()


# -- matrix convention --------------------------------------------------------

def test_matrix_dims_convention():
    assert matrix_dims((5,)) == (5, 1)
    assert matrix_dims((3, 4)) == (3, 4)
    assert matrix_dims((2, 3, 4)) == (2, 12)


def test_column_major_vectorization():
    p = params32()
    arr = np.arange(6, dtype=np.float64).reshape(2, 3)
    block = encode_block("w", arr, p)
    f = p.field
    for i in range(2):
        for j in range(3):
            assert f.signed(block.entry(i, j)) == int(arr[i, j]) * 2**32
    assert block.column(1) == [block.entry(0, 1), block.entry(1, 1)]
    # column j is contiguous in the flat vector
    assert block.values[2:4] == block.column(1)


def test_tensor_flattening_round_trip():
    p = EncodingParams(frac_bits=16)
    rng = np.random.default_rng(5003)
    arr = rng.standard_normal((2, 3, 4))
    block = encode_block("w", arr, p)
    assert block.dims == (2, 12)
    back = decode_block(block)
    assert back.shape == (2, 3, 4)
    assert np.max(np.abs(back - arr)) <= 2.0 ** -17


# -- archive I/O --------------------------------------------------------------

def sample_archive():
    rng = np.random.default_rng(5004)
    return TensorArchive({
        "layer.0.w": rng.standard_normal((4, 4)).astype(np.float32),
        "layer.0.b": rng.standard_normal(4),
        "head.w": rng.standard_normal((2, 4)),
    }, EncodingParams(frac_bits=16))


def test_archive_round_trip_bytes_and_file(tmp_path):
    arch = sample_archive()
    blob = save_archive(arch)
    loaded = load_archive(blob)
    assert loaded.names() == arch.names()
    assert loaded.params == arch.params
    for name in arch.names():
        assert np.array_equal(loaded.blocks[name], arch.blocks[name])
    path = tmp_path / "model.ftia"
    save_archive(arch, str(path))
    again = load_archive(str(path))
    assert again.manifest() == arch.manifest()


def test_archive_save_is_deterministic():
    assert save_archive(sample_archive()) == save_archive(sample_archive())


def _header(blob):
    hlen = int.from_bytes(blob[5:13], "little")
    return json.loads(blob[13:13 + hlen]), blob[13 + hlen:]


def _rebuild(header, payload):
    hjson = json.dumps(header, sort_keys=True, separators=(",", ":")).encode()
    return b"FTIA" + bytes([1]) + len(hjson).to_bytes(8, "little") + hjson + payload


def test_archive_malformed_inputs():
    blob = save_archive(sample_archive())
    with pytest.raises(MalformedHeader):
        load_archive(b"NOPE" + blob[4:])
    with pytest.raises(MalformedHeader):
        load_archive(blob[:4] + bytes([9]) + blob[5:])
    with pytest.raises(MalformedHeader):
        load_archive(blob[:8])
    # declared header length runs past the file
    with pytest.raises(MalformedHeader):
        load_archive(blob[:5] + (2**40).to_bytes(8, "little") + blob[13:])
    # header that is not JSON
    bad = blob[:13] + b"{" * (int.from_bytes(blob[5:13], "little"))
    with pytest.raises(MalformedHeader):
        load_archive(bad[:len(blob)])


def test_archive_truncated_payload():
    blob = save_archive(sample_archive())
    with pytest.raises(TruncatedPayload):
        load_archive(blob[:-8])


def test_archive_overlapping_blocks():
    header, payload = _header(save_archive(sample_archive()))
    names = sorted(header["blocks"])
    header["blocks"][names[1]]["offset"] = header["blocks"][names[0]]["offset"]
    with pytest.raises(OverlappingBlocks):
        load_archive(_rebuild(header, payload))


def test_archive_length_shape_mismatch():
    header, payload = _header(save_archive(sample_archive()))
    name = sorted(header["blocks"])[0]
    header["blocks"][name]["length"] += 4
    with pytest.raises(MalformedHeader):
        load_archive(_rebuild(header, payload))


def test_archive_duplicate_block_names():
    header, payload = _header(save_archive(sample_archive()))
    name = sorted(header["blocks"])[0]
    rec = json.dumps(header["blocks"][name], sort_keys=True,
                     separators=(",", ":"))
    hjson = json.dumps(header, sort_keys=True, separators=(",", ":"))
    needle = f'"{name}":{rec}'
    assert needle in hjson
    dup = hjson.replace('"blocks":{', '"blocks":{' + needle + ",", 1)
    blob = b"FTIA" + bytes([1]) + len(dup.encode()).to_bytes(8, "little") \
        + dup.encode() + payload
    with pytest.raises(DuplicateBlockName):
        load_archive(blob)


def test_archive_rejects_unknown_schema():
    header, payload = _header(save_archive(sample_archive()))
    header["extra"] = 1
    with pytest.raises(MalformedHeader):
        load_archive(_rebuild(header, payload))
    header, payload = _header(save_archive(sample_archive()))
    name = sorted(header["blocks"])[0]
    header["blocks"][name]["dtype"] = "f16"
    with pytest.raises(MalformedHeader):
        load_archive(_rebuild(header, payload))


def test_manifest_mismatch_reporting():
    a = sample_archive()
    b = TensorArchive(dict(a.blocks), EncodingParams(frac_bits=32))
    with pytest.raises(ManifestMismatch):
        check_manifests_match(a, b)
    blocks = dict(a.blocks)
    blocks["extra"] = np.zeros(2)
    c = TensorArchive(blocks, a.params)
    with pytest.raises(ManifestMismatch) as exc:
        check_manifests_match(a, c)
    assert "extra" in str(exc.value)
    check_manifests_match(a, sample_archive())


# -- drift --------------------------------------------------------------------

def test_drift_identity_is_zero():
    arch = sample_archive()
    block = arch.encode("head.w")
    drift = compute_drift(block, block)
    assert all(v == 0 for v in drift.values)
    assert drift_norm_squared(drift) == 0


def test_drift_matches_elementwise_subtraction():
    p = EncodingParams(frac_bits=16)
    rng = np.random.default_rng(5005)
    base = rng.standard_normal(1000)
    step = rng.standard_normal(1000) * 0.01
    b0 = encode_block("w", base, p)
    b1 = encode_block("w", base + step, p)
    drift = compute_drift(b0, b1)
    f = p.field
    for a, b, d in zip(b0.values, b1.values, drift.values):
        assert d == (b - a) % f.q
    # norm accumulates exactly over the signed representatives
    assert drift_norm_squared(drift) == sum(
        f.signed(d) ** 2 for d in drift.values)


def test_drift_guards():
    p = EncodingParams(frac_bits=16)
    a = encode_block("w", np.zeros((2, 2)), p)
    b = encode_block("w", np.zeros((4,)), p)
    with pytest.raises(ShapeMismatch):
        compute_drift(a, b)
    c = encode_block("w", np.zeros((2, 2)), EncodingParams(frac_bits=32))
    with pytest.raises(ParamMismatch):
        compute_drift(a, c)


# -- rank-preserving requantization -------------------------------------------

def test_requantize_zero_factors_leave_weights_alone():
    p = EncodingParams(frac_bits=16)
    rng = np.random.default_rng(5006)
    w0 = rng.standard_normal((8, 8))
    star, _ = rank_preserving_requantize(
        w0, np.zeros((8, 2)), np.zeros((2, 8)), p)
    base = encode_block("w", w0, p)
    tuned = encode_block("w", star, p)
    assert all(v == 0 for v in compute_drift(base, tuned).values)


def test_requantize_drift_is_exact_factor_product():
    p = EncodingParams(frac_bits=16)
    rng = np.random.default_rng(5007)
    w0 = rng.standard_normal((8, 6))
    a = rng.standard_normal((8, 3)) * 0.1
    b = rng.standard_normal((3, 6)) * 0.1
    star, (fa, fb) = rank_preserving_requantize(w0, a, b, p)
    base = encode_block("w", w0, p)
    tuned = encode_block("w", star, p)
    drift = compute_drift(base, tuned)
    f = p.field
    # returned factors hold field elements; their product is the drift
    for i in range(8):
        for j in range(6):
            want = sum(fa[i][k] * fb[k][j] for k in range(3)) % f.q
            assert drift.entry(i, j) == want


def test_requantize_rank_bound():
    from driftcert.mrdp import matrix_rank
    p = EncodingParams(frac_bits=16)
    rng = np.random.default_rng(5008)
    f = p.field
    for r in (1, 2, 3):
        w0 = rng.standard_normal((16, 16))
        a = rng.standard_normal((16, r)) * 0.1
        b = rng.standard_normal((r, 16)) * 0.1
        star, _ = rank_preserving_requantize(w0, a, b, p)
        drift = compute_drift(encode_block("w", w0, p),
                              encode_block("w", star, p))
        grid = [[drift.entry(i, j) for j in range(16)] for i in range(16)]
        assert matrix_rank(grid, f) <= r


def test_requantize_guards():
    p = EncodingParams(frac_bits=16)
    w0 = np.zeros((4, 4))
    with pytest.raises(ShapeMismatch):
        rank_preserving_requantize(w0, np.zeros((4, 2)), np.zeros((3, 4)), p)
    with pytest.raises(MagnitudeOverflow):
        rank_preserving_requantize(
            w0, np.zeros((4, 2)), np.zeros((2, 4)),
            EncodingParams(frac_bits=17))
