"""Synthetic model archives and drift recipes with exact ground truth.

Desk-scale stand-ins for the architectures the certificate pipeline
targets: a small transformer, a small convolutional stack, and a small
MLP.
Generated weights are snapped to the fixed-point grid at creation time,
so every recipe can manipulate tensors with exact integer arithmetic and
report its true class parameters (rank, nonzero count, Frobenius norm)
without rounding ambiguity.

Recipes:
  lora          additive low-rank update on every rank-class block
  prefix        rewrite of the first rows of the token embedding
  normball      random-direction drift scaled inside the norm bound
  sparsepoison  sign flips on exactly m coordinates chosen by PRF
  headbackdoor  planted over-rank update on one attention block
  normviolation random-direction drift scaled to factor * epsilon

Every recipe is deterministic given its seed and leaves non-target
blocks bit-identical, so a matched policy can mark them frozen.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np

from ..codec import (
    EncodingParams, TensorArchive, matrix_dims, rank_preserving_requantize,
)
from ..errors import DimensionTooLarge, InvalidParameter, UnrecognizedNaming
from ..mrdp import matrix_rank
from ..policy import Norm, Policy, Rank, Sparse
from ..prf import PrfStream
from ..sdip import MODE_PUBLIC

RECIPE_KINDS = (
    "lora", "prefix", "normball", "sparsepoison", "headbackdoor",
    "normviolation",
)

DEFAULT_PARAM_CAP = 1 << 22


def _rng(seed: bytes, label: str) -> np.random.Generator:
    digest = hashlib.sha256(b"driftcert-gen" + seed + label.encode()).digest()
    return np.random.default_rng(list(digest))


def _prf(seed: bytes, label: str) -> PrfStream:
    digest = hashlib.sha256(b"driftcert-gen" + seed + label.encode()).digest()
    return PrfStream(digest, "drift-gen")


def snap_to_grid(arr: np.ndarray, params: EncodingParams) -> np.ndarray:
    """Nearest representable tensor at the params' fixed-point precision."""
    scale = float(params.scale)
    return np.round(arr.astype(np.float64) * scale) / scale


# -- model generators ---------------------------------------------------------

def gen_model(arch: str, seed: bytes, *, layers: int = 2, d: int = 64,
              d_ff: int = 128, vocab: int = 256, channels: int = 8,
              stages: int = 3, width: int = 64, classes: int = 10,
              params: EncodingParams | None = None,
              param_cap: int = DEFAULT_PARAM_CAP) -> TensorArchive:
    """Deterministic random archive following the arch naming convention.

    transformer: embed.tok, then per layer attention (wq wk wv wo), a
    two-matrix feedforward, and two normalization gain vectors.  cnn:
    per stage a 3x3 kernel (flattened), a 1x1 pointwise matrix, and a
    channel scale vector, plus a classifier head.  mlp: square dense
    layers and one declared bottleneck.
    """
    if params is None:
        params = EncodingParams()
    shapes: dict[str, tuple[int, ...]] = {}
    if arch == "transformer":
        shapes["embed.tok"] = (vocab, d)
        for i in range(layers):
            for m in ("wq", "wk", "wv", "wo"):
                shapes[f"layers.{i}.attn.{m}"] = (d, d)
            shapes[f"layers.{i}.ffn.w1"] = (d, d_ff)
            shapes[f"layers.{i}.ffn.w2"] = (d_ff, d)
            shapes[f"layers.{i}.ln1.g"] = (d,)
            shapes[f"layers.{i}.ln2.g"] = (d,)
    elif arch == "cnn":
        for i in range(1, stages + 1):
            shapes[f"conv{i}.w"] = (channels, channels * 9)
            shapes[f"conv{i}.pw"] = (channels, channels)
            shapes[f"conv{i}.chan"] = (channels,)
        shapes["fc.w"] = (classes, channels)
    elif arch == "mlp":
        for i in range(1, layers + 1):
            shapes[f"fc{i}.w"] = (width, width)
        shapes["bottleneck1.w"] = (width, width)
    else:
        raise UnrecognizedNaming(f"unknown architecture {arch!r}")

    total = sum(int(np.prod(s)) for s in shapes.values())
    if total > param_cap:
        raise DimensionTooLarge(
            f"{arch} config has {total} parameters, cap is {param_cap}")

    blocks: dict[str, np.ndarray] = {}
    for name, shape in shapes.items():
        rng = _rng(seed, f"model/{arch}/{name}")
        fan_in = shape[-1] if len(shape) > 1 else shape[0]
        sigma = 1.0 / math.sqrt(fan_in)
        w = rng.normal(0.0, sigma, shape)
        if ".ln" in name or name.endswith(".chan"):
            w = 1.0 + 0.01 * rng.standard_normal(shape)
        blocks[name] = snap_to_grid(w, params)
    return TensorArchive(blocks, params)


def detect_arch(names) -> str:
    names = list(names)
    if any(n.startswith("layers.") or n == "embed.tok" for n in names):
        return "transformer"
    if any(n.startswith("conv") for n in names):
        return "cnn"
    if any(n.startswith("fc") or n.startswith("bottleneck") for n in names):
        return "mlp"
    raise UnrecognizedNaming("archive matches no known architecture preset")


def _role_blocks(archive: TensorArchive, role: str) -> list[str]:
    """Names of blocks carrying the given drift role for the archive's arch."""
    arch = detect_arch(archive.names())
    tables = {
        "transformer": {
            "rank": lambda n: ".attn.w" in n,
            "norm": lambda n: ".ffn.w" in n or ".ln" in n,
            "sparse": lambda n: n == "embed.tok",
        },
        "cnn": {
            "rank": lambda n: n.endswith(".pw"),
            "norm": lambda n: n.endswith(".w"),
            "sparse": lambda n: n.endswith(".chan"),
        },
        "mlp": {
            "rank": lambda n: n.startswith("bottleneck"),
            "norm": lambda n: n.startswith("fc"),
            "sparse": lambda n: False,
        },
    }
    keep = tables[arch][role]
    return [n for n in archive.names() if keep(n)]


# -- drift recipes ------------------------------------------------------------

@dataclass(frozen=True)
class DriftRecipe:
    """A named drift generator plus the parameters that pin its ground truth.

    Field use by kind: lora and headbackdoor read ``rank`` (headbackdoor
    also ``block``), prefix reads ``rows``, normball and normviolation
    read ``fraction``/``factor`` against ``epsilon``, sparsepoison reads
    exactly one of ``fraction`` or ``k``.
    """

    kind: str
    seed: bytes
    rank: int = 8
    rows: int = 20
    fraction: float | None = None
    k: int | None = None
    block: str | None = None
    factor: float = 2.0
    epsilon: float = 0.05
    scale: float = 0.02

    def __post_init__(self) -> None:
        if self.kind not in RECIPE_KINDS:
            raise InvalidParameter(f"unknown recipe kind {self.kind!r}")
        if not self.seed:
            raise InvalidParameter("recipe seed must be nonempty bytes")
        if self.kind in ("lora", "headbackdoor") and self.rank < 1:
            raise InvalidParameter("rank must be at least 1")
        if self.kind == "prefix" and self.rows < 1:
            raise InvalidParameter("prefix rows must be at least 1")
        if self.kind == "sparsepoison":
            if (self.fraction is None) == (self.k is None):
                raise InvalidParameter(
                    "sparsepoison takes exactly one of fraction or k")
            if self.fraction is not None and not 0 < self.fraction <= 1:
                raise InvalidParameter("fraction must lie in (0, 1]")
            if self.k is not None and self.k < 1:
                raise InvalidParameter("k must be at least 1")
        if self.kind == "normball":
            frac = 0.5 if self.fraction is None else self.fraction
            if not 0 < frac < 1:
                raise InvalidParameter("normball fraction must lie in (0, 1)")
        if self.kind in ("normball", "normviolation") and self.epsilon <= 0:
            raise InvalidParameter("epsilon must be positive")
        if self.kind == "normviolation" and self.factor <= 1:
            raise InvalidParameter("violation factor must exceed 1")

    def describe(self) -> str:
        if self.kind == "lora":
            return f"lora{{r={self.rank}}}"
        if self.kind == "prefix":
            return f"prefix{{rows={self.rows}}}"
        if self.kind == "normball":
            frac = 0.5 if self.fraction is None else self.fraction
            return f"normball{{fraction={frac}}}"
        if self.kind == "sparsepoison":
            if self.k is not None:
                return f"sparsepoison{{k={self.k}}}"
            return f"sparsepoison{{fraction={self.fraction}}}"
        if self.kind == "headbackdoor":
            return f"headbackdoor{{block={self.block}, rank={self.rank}}}"
        return f"normviolation{{factor={self.factor}}}"


def _signed_grid(archive: TensorArchive, name: str) -> np.ndarray:
    scale = float(archive.params.scale)
    return np.round(archive.blocks[name] * scale).astype(np.int64)


def _low_rank_update(w0: np.ndarray, rank: int, scale: float, seed: bytes,
                     label: str, params: EncodingParams,
                     field) -> np.ndarray:
    """w0 plus a planted update whose encoded drift has field rank == rank."""
    d, dp = matrix_dims(tuple(w0.shape))
    if rank > min(d, dp):
        raise InvalidParameter(
            f"rank {rank} exceeds min dimension {min(d, dp)}")
    for attempt in range(32):
        rng = _rng(seed, f"{label}/try{attempt}")
        a = rng.uniform(-scale, scale, (d, rank))
        b = rng.uniform(-scale, scale, (rank, dp))
        w_star, (a_f, b_f) = rank_preserving_requantize(w0, a, b, params)
        q = field.q
        grid = [[sum(a_f[i][k] * b_f[k][j] for k in range(rank)) % q
                 for j in range(dp)] for i in range(d)]
        if matrix_rank(grid, field) == rank:
            return w_star.reshape(w0.shape)
    raise InvalidParameter(
        f"could not plant rank-{rank} update on shape {w0.shape}")


def _scaled_direction(shape: tuple[int, ...], target: float, seed: bytes,
                      label: str, params: EncodingParams) -> np.ndarray:
    """Grid drift tensor with Frobenius norm within one grid step of target."""
    rng = _rng(seed, label)
    g = rng.standard_normal(shape)
    g = g * (target / float(np.linalg.norm(g)))
    return snap_to_grid(g, params)


def gen_drift(archive: TensorArchive, recipe: DriftRecipe) -> TensorArchive:
    """Tuned archive implementing the recipe on its role blocks.

    Non-target blocks are returned bit-identical.  The drift's true
    class parameters are exact by construction and recoverable with
    drift_stats.
    """
    params = archive.params
    field = params.field
    out = {name: arr for name, arr in archive.blocks.items()}
    kind = recipe.kind

    if kind in ("lora", "headbackdoor"):
        targets = _role_blocks(archive, "rank")
        if not targets:
            raise InvalidParameter("archive has no rank-class blocks")
        if kind == "headbackdoor":
            block = recipe.block if recipe.block is not None else targets[0]
            if block not in targets:
                raise InvalidParameter(
                    f"block {block!r} is not a rank-class block")
            targets = [block]
        for name in targets:
            out[name] = _low_rank_update(
                archive.blocks[name], recipe.rank, recipe.scale, recipe.seed,
                f"{kind}/{name}", params, field)

    elif kind == "prefix":
        targets = _role_blocks(archive, "sparse")
        if "embed.tok" not in targets:
            raise InvalidParameter("prefix drift needs a token embedding")
        emb = archive.blocks["embed.tok"]
        rows, d = emb.shape
        if recipe.rows > rows:
            raise InvalidParameter(
                f"prefix rows {recipe.rows} exceed vocab {rows}")
        rng = _rng(recipe.seed, "prefix")
        new = emb.copy()
        patch = snap_to_grid(
            rng.uniform(-recipe.scale, recipe.scale, (recipe.rows, d)), params)
        step = 1.0 / float(params.scale)
        # nudge any coordinate whose perturbation landed on zero so the
        # changed region has full support and the nonzero count is exact
        zero = patch == 0.0
        patch = np.where(zero, step, patch)
        new[:recipe.rows] = new[:recipe.rows] + patch
        out["embed.tok"] = new

    elif kind in ("normball", "normviolation"):
        targets = _role_blocks(archive, "norm")
        if not targets:
            raise InvalidParameter("archive has no norm-class blocks")
        if kind == "normball":
            frac = 0.5 if recipe.fraction is None else recipe.fraction
            target = frac * recipe.epsilon
        else:
            target = recipe.factor * recipe.epsilon
        for name in targets:
            drift = _scaled_direction(
                archive.blocks[name].shape, target, recipe.seed,
                f"{kind}/{name}", params)
            out[name] = archive.blocks[name] + drift

    elif kind == "sparsepoison":
        targets = _role_blocks(archive, "sparse")
        if not targets:
            raise InvalidParameter("archive has no sparse-class blocks")
        for name in targets:
            w = archive.blocks[name]
            flat = w.reshape(-1)
            n = flat.size
            m = recipe.k if recipe.k is not None else math.ceil(
                recipe.fraction * n)
            nonzero = np.flatnonzero(flat != 0.0)
            if m > nonzero.size:
                raise InvalidParameter(
                    f"cannot flip {m} coordinates, block {name!r} has only "
                    f"{nonzero.size} nonzero entries")
            prf = _prf(recipe.seed, f"sparsepoison/{name}")
            chosen: list[int] = []
            seen: set[int] = set()
            counter = 0
            while len(chosen) < m:
                raw = prf.block(counter)
                counter += 1
                idx = int(nonzero[int.from_bytes(raw[:8], "little")
                                  % nonzero.size])
                if idx not in seen:
                    seen.add(idx)
                    chosen.append(idx)
            new = flat.copy()
            new[chosen] = -new[chosen]
            out[name] = new.reshape(w.shape)

    return TensorArchive(out, params)


# -- ground-truth oracle ------------------------------------------------------

@dataclass(frozen=True)
class BlockDrift:
    """Exact drift statistics for one block, from plain integer arithmetic."""

    name: str
    nonzeros: int
    rank: int
    norm: float
    norm_sq_units: int  # sum of squared signed drifts, in units of 2^-2f


def drift_stats(base: TensorArchive, tuned: TensorArchive) -> dict[str, BlockDrift]:
    """Independent per-block oracle: nonzero count, field rank, Frobenius norm.

    Rank comes from Gaussian elimination over the encoding field; the
    norm is computed from exact integer sums, so comparisons against
    class bounds are free of float rounding.
    """
    params = base.params
    field = params.field
    stats = {}
    for name in base.names():
        d0 = _signed_grid(base, name)
        d1 = _signed_grid(tuned, name)
        delta = (d1 - d0).astype(np.int64)
        nnz = int(np.count_nonzero(delta))
        dims = matrix_dims(tuple(delta.shape))
        mat = delta.reshape(dims)
        grid = [[int(mat[i, j]) % field.q for j in range(dims[1])]
                for i in range(dims[0])]
        rank = matrix_rank(grid, field)
        units = int(np.sum(delta.astype(object) ** 2))
        norm = math.sqrt(units) / float(params.scale)
        stats[name] = BlockDrift(name, nnz, rank, norm, units)
    return stats


def matched_policy(archive: TensorArchive, recipe: DriftRecipe,
                   *, sparse_mode: str = MODE_PUBLIC) -> Policy:
    """Tightest-in-kind policy the recipe's drift is designed to satisfy.

    One exact-name rule per target block; everything else falls to the
    frozen default.  For headbackdoor and normviolation the returned
    policy is the one the attack is measured against, so its bound is
    deliberately below the planted drift.
    """
    kind = recipe.kind
    rules: list[tuple[str, object]] = []
    if kind == "lora":
        for name in _role_blocks(archive, "rank"):
            rules.append((name, Rank(recipe.rank)))
    elif kind == "headbackdoor":
        targets = _role_blocks(archive, "rank")
        block = recipe.block if recipe.block is not None else targets[0]
        rules.append((block, Rank(recipe.rank)))
    elif kind == "prefix":
        d = archive.blocks["embed.tok"].shape[1]
        rules.append(("embed.tok", Sparse(recipe.rows * d, sparse_mode)))
    elif kind in ("normball", "normviolation"):
        for name in _role_blocks(archive, "norm"):
            rules.append((name, Norm(recipe.epsilon)))
    elif kind == "sparsepoison":
        for name in _role_blocks(archive, "sparse"):
            n = int(np.prod(archive.blocks[name].shape))
            m = recipe.k if recipe.k is not None else math.ceil(
                recipe.fraction * n)
            rules.append((name, Sparse(m, sparse_mode)))
    return Policy(rules)
