"""Proof-size and latency sweeps with scaling-law assertions.

Absolute timings depend on the host and backend, so the bench asserts
shape, not speed: norm-proof bytes must not depend on block dimensions,
rank-proof bytes must be affine in the rank bound with zero slope in the
matrix dimension, and public-support sparsity proofs must be affine in
the support bound k and in t * ceil(log2 n) challenge units.

CSV schemas:
  rows: protocol,dims,class_params,proof_bytes,prove_ms,verify_ms
  laws: law,holds,detail
"""
from __future__ import annotations

import csv
import hashlib
import io
import os
import time
from dataclasses import dataclass

import numpy as np

from ..groups import get_backend
from ..mrdp import prove_mrdp, verify_mrdp
from ..nbdp import derive_nbdp_params, prove_nbdp, verify_nbdp
from ..pcs import KzgPcs, setup_kzg
from ..pedersen import pedersen_for
from ..prf import PrfStream
from ..sdip import MODE_PUBLIC, SdipParams, prove_sdip_a, verify_sdip
from ..subproofs import ScalarSampler
from ..transcript import Transcript


@dataclass(frozen=True)
class BenchRow:
    protocol: str
    dims: str
    class_params: str
    proof_bytes: int
    prove_ms: float
    verify_ms: float


@dataclass(frozen=True)
class LawResult:
    law: str
    holds: bool
    detail: str


@dataclass
class BenchReport:
    rows: list[BenchRow]
    laws: list[LawResult]

    @property
    def all_hold(self) -> bool:
        return all(l.holds for l in self.laws)

    def rows_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["protocol", "dims", "class_params", "proof_bytes",
                    "prove_ms", "verify_ms"])
        for r in self.rows:
            w.writerow([r.protocol, r.dims, r.class_params, r.proof_bytes,
                        f"{r.prove_ms:.2f}", f"{r.verify_ms:.2f}"])
        return buf.getvalue()

    def laws_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["law", "holds", "detail"])
        for l in self.laws:
            w.writerow([l.law, int(l.holds), l.detail])
        return buf.getvalue()

    def write(self, outdir: str, *, figures: bool = True) -> list[str]:
        os.makedirs(outdir, exist_ok=True)
        paths = []
        for stem, text in (("bench-rows", self.rows_csv()),
                           ("bench-laws", self.laws_csv())):
            path = os.path.join(outdir, f"{stem}.csv")
            with open(path, "w") as fh:
                fh.write(text)
            paths.append(path)
        if figures:
            from .figures import render_bench
            paths.extend(render_bench(self, outdir))
        return paths


def _seed(label: str, *parts: int) -> bytes:
    h = hashlib.sha256(b"driftcert-bench" + label.encode())
    for p in parts:
        h.update(int(p).to_bytes(8, "little"))
    return h.digest()


def _affine_residual(xs: list[float], ys: list[float]) -> tuple[float, float, float]:
    """Least-squares fit y = a + b x; returns (a, b, max relative residual)."""
    design = np.column_stack([np.ones(len(xs)), np.asarray(xs, dtype=float)])
    coef, *_ = np.linalg.lstsq(design, np.asarray(ys, dtype=float), rcond=None)
    pred = design @ coef
    rel = float(np.max(np.abs(pred - ys) / np.asarray(ys, dtype=float)))
    return float(coef[0]), float(coef[1]), rel


def _plane_residual(xs: list[float], us: list[float],
                    ys: list[float]) -> float:
    design = np.column_stack([np.ones(len(xs)), xs, us])
    coef, *_ = np.linalg.lstsq(design, np.asarray(ys, dtype=float), rcond=None)
    pred = design @ coef
    return float(np.max(np.abs(pred - ys) / np.asarray(ys, dtype=float)))


# -- protocol benches ---------------------------------------------------------

def bench_nbdp(dims: tuple[int, ...] = (64, 256, 1024), *,
               epsilon: float = 0.05, delta: float = 0.01, kappa: int = 1,
               frac_bits: int = 16, backend_name: str = "toy",
               verify_cap: int = 1 << 16) -> list[BenchRow]:
    """One norm proof per d x d block dimension at fixed (epsilon, delta).

    Blocks above verify_cap elements are proved but not verified; the
    size law concerns serialized bytes, and verification at the largest
    dimension is linear-time without adding information.
    """
    backend = get_backend(backend_name)
    ped = pedersen_for(backend)
    field = backend.field
    rows = []
    for d in dims:
        n = d * d
        rng = np.random.default_rng(list(_seed("nbdp", d)))
        g = rng.standard_normal(n)
        target = 0.5 * epsilon * (1 << frac_bits)
        g = g / np.linalg.norm(g) * target
        delta_signed = [int(round(v)) for v in g]
        c0 = ped.commit_vector([0] * n, 3)
        c1 = ped.commit_vector([v % field.q for v in delta_signed], 10)
        params = derive_nbdp_params(epsilon, delta, kappa,
                                    frac_bits=frac_bits, dim=n,
                                    field_modulus=field.q)
        sampler = ScalarSampler(PrfStream(_seed("nbdp-mask", d), "mask"),
                                field)
        t0 = time.perf_counter()
        proof = prove_nbdp(ped, Transcript(), params, c0, c1, delta_signed, 7,
                           sampler)
        t1 = time.perf_counter()
        verify_ms = 0.0
        if n <= verify_cap:
            ok = verify_nbdp(ped, Transcript(), params, c0, c1, proof)
            verify_ms = (time.perf_counter() - t1) * 1000.0
            if not ok:
                raise AssertionError(f"nbdp bench instance d={d} rejected")
        rows.append(BenchRow("nbdp", f"{d}x{d}",
                             f"eps={epsilon} delta={delta} kappa={kappa}",
                             len(proof.to_bytes(backend)),
                             (t1 - t0) * 1000.0, verify_ms))
    return rows


def bench_mrdp(ranks: tuple[int, ...] = (2, 4, 8),
               dims: tuple[int, ...] = (16, 32, 64), *,
               backend_name: str = "toy") -> list[BenchRow]:
    """One rank proof per (r, d) pair over d x d blocks, via the pairing PCS."""
    backend = get_backend(backend_name)
    field = backend.field
    max_d = max(dims)
    pcs = KzgPcs(setup_kzg(backend, max_d, max_d, _seed("mrdp-srs")))
    rows = []
    for r in ranks:
        for d in dims:
            rng = np.random.default_rng(list(_seed("mrdp", r, d)))
            a = rng.integers(-9, 10, (d, r))
            b = rng.integers(-9, 10, (r, d))
            delta = a @ b
            q = field.q
            base = [[int(v) % q for v in row]
                    for row in rng.integers(0, 1 << 16, (d, d))]
            tuned = [[(base[i][j] + int(delta[i, j])) % q for j in range(d)]
                     for i in range(d)]
            prf = PrfStream(_seed("mrdp-mask", r, d), "pcs-mask")
            c0, s0 = pcs.commit(base, PrfStream(_seed("m0", r, d),
                                                "pcs-mask"))
            c1, s1 = pcs.commit(tuned, PrfStream(_seed("m1", r, d),
                                                 "pcs-mask"))
            t0 = time.perf_counter()
            proof = prove_mrdp(pcs, Transcript(), base, tuned, r, c0, s0,
                               c1, s1, prf)
            t1 = time.perf_counter()
            ok = verify_mrdp(pcs, Transcript(), c0, c1, r, d, d, proof)
            t2 = time.perf_counter()
            if not ok:
                raise AssertionError(f"mrdp bench instance r={r} d={d} "
                                     "rejected")
            rows.append(BenchRow("mrdp", f"{d}x{d}", f"r={r}",
                                 len(proof.to_bytes()),
                                 (t1 - t0) * 1000.0, (t2 - t1) * 1000.0))
    return rows


def bench_sdip(ks: tuple[int, ...] = (4, 8, 16),
               ts: tuple[int, ...] = (1, 2, 3), *, n: int = 256,
               backend_name: str = "toy") -> list[BenchRow]:
    """One public-support sparsity proof per (k, t) at fixed dimension n."""
    backend = get_backend(backend_name)
    ped = pedersen_for(backend)
    field = backend.field
    q = field.q
    rows = []
    for k in ks:
        for t in ts:
            rng = np.random.default_rng(list(_seed("sdip", k, t)))
            support = sorted(int(i) for i in rng.choice(n, k, replace=False))
            delta = [0] * n
            for i in support:
                delta[i] = int(rng.integers(1, 1000))
            c0 = ped.commit_vector([0] * n, 5)
            c1 = ped.commit_vector(delta, 12)
            params = SdipParams(k, t, MODE_PUBLIC)
            sampler = ScalarSampler(
                PrfStream(_seed("sdip-mask", k, t), "mask"), field)
            t0 = time.perf_counter()
            proof = prove_sdip_a(ped, Transcript(), params, c0, c1, delta,
                                 7 % q, sampler)
            t1 = time.perf_counter()
            ok = verify_sdip(ped, Transcript(), params, c0, c1, n, proof,
                             dim_limit=4096)
            t2 = time.perf_counter()
            if not ok:
                raise AssertionError(f"sdip bench instance k={k} t={t} "
                                     "rejected")
            rows.append(BenchRow("sdip-a", f"n={n}", f"k={k} t={t}",
                                 len(proof.to_bytes(backend)),
                                 (t1 - t0) * 1000.0, (t2 - t1) * 1000.0))
    return rows


# -- law checks ---------------------------------------------------------------

def check_laws(rows: list[BenchRow]) -> list[LawResult]:
    laws = []
    nbdp = [r for r in rows if r.protocol == "nbdp"]
    if nbdp:
        sizes = sorted({r.proof_bytes for r in nbdp})
        holds = len(sizes) == 1
        laws.append(LawResult(
            "nbdp bytes independent of block dims", holds,
            f"sizes={sizes} over dims={[r.dims for r in nbdp]}"))
    mrdp = [r for r in rows if r.protocol == "mrdp"]
    if mrdp:
        by_r: dict[int, list[int]] = {}
        for row in mrdp:
            by_r.setdefault(int(row.class_params[2:]), []).append(
                row.proof_bytes)
        flat = all(len(set(v)) == 1 for v in by_r.values())
        laws.append(LawResult(
            "mrdp bytes have zero slope in d", flat,
            "per-rank size sets " + str({r: sorted(set(v))
                                         for r, v in by_r.items()})))
        rs = sorted(by_r)
        _, slope, resid = _affine_residual(
            [float(r) for r in rs], [float(by_r[r][0]) for r in rs])
        laws.append(LawResult(
            "mrdp bytes affine in r", resid < 0.01,
            f"slope={slope:.1f} bytes/rank, max residual={resid:.4%}"))
    sdip = [r for r in rows if r.protocol == "sdip-a"]
    if sdip:
        n = int(sdip[0].dims.split("=")[1])
        log_n = (n - 1).bit_length()
        ks, us, ys = [], [], []
        for row in sdip:
            parts = dict(p.split("=") for p in row.class_params.split())
            ks.append(float(parts["k"]))
            us.append(float(int(parts["t"]) * log_n))
            ys.append(float(row.proof_bytes))
        resid = _plane_residual(ks, us, ys)
        laws.append(LawResult(
            "sdip-a bytes affine in k and t*ceil(log2 n)", resid < 0.01,
            f"max residual={resid:.4%} over {len(ys)} points"))
    return laws


def run_bench(*, backend_name: str = "toy",
              nbdp_dims: tuple[int, ...] = (64, 256, 1024),
              mrdp_ranks: tuple[int, ...] = (2, 4, 8),
              mrdp_dims: tuple[int, ...] = (16, 32, 64),
              sdip_ks: tuple[int, ...] = (4, 8, 16),
              sdip_ts: tuple[int, ...] = (1, 2, 3),
              sdip_n: int = 256) -> BenchReport:
    rows = []
    rows.extend(bench_nbdp(nbdp_dims, backend_name=backend_name))
    rows.extend(bench_mrdp(mrdp_ranks, mrdp_dims, backend_name=backend_name))
    rows.extend(bench_sdip(sdip_ks, sdip_ts, n=sdip_n,
                           backend_name=backend_name))
    return BenchReport(rows, check_laws(rows))
