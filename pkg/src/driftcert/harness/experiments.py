"""Detection-rate experiment suites with reproducible parallel trials.

Four suites measure the pipeline's statistical behaviour:

  benign-all             every benign recipe end to end against its
                         matched policy; accept rates should be 1.0 for
                         rank and sparse classes and >= 0.99 for norm.
  mrdp-overrank          drift of rank r+1 under an r policy; the honest
                         prover must refuse, and a forged certificate
                         built from a best rank-r surrogate must be
                         rejected.  Accepts are defects.
  sdip-extra-coordinate  one undeclared nonzero coordinate beyond k; a
                         forged proof exists precisely when every masked
                         challenge annihilates the undeclared set, so
                         the trial records that vanishing event.
  nbdp-soundness         drift at twice the declared bound; detection is
                         the prover's threshold refusal, expected at
                         rate >= 0.99 at the default repetition count.

Trials are deterministic functions of (suite seed, trial index) and run
in parallel across processes when requested; the report is always
ordered by trial index.  CSV schemas:

  trials:  suite,trial,recipe,policy,seed,nonce,accepted,detail
  summary: suite,recipe,trials,accepts,rate,wilson_low,wilson_high
"""
from __future__ import annotations

import csv
import hashlib
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from ..aggregate import prove_all, verify_certificate
from ..codec import EncodingParams
from ..errors import (
    InvalidParameter, PolicyViolation, ProjectionExceedsThreshold,
    RankExceeded, SparsityExceeded,
)
from ..groups import get_backend
from ..mrdp import (
    matrix_rank, prove_mrdp, rank_factorize, truncated_factors, verify_mrdp,
)
from ..nbdp import derive_nbdp_params, prove_nbdp, verify_nbdp
from ..pcs import MerklePcs
from ..pedersen import pedersen_for
from ..prf import PrfStream
from ..sdip import (
    MODE_PUBLIC, SdipParams, _absorb_statement_a, _masked_challenge,
    _padded_dim, prove_sdip_a,
)
from ..subproofs import ScalarSampler
from ..transcript import Transcript
from .gen import DriftRecipe, gen_drift, gen_model, matched_policy

SUITE_NAMES = (
    "benign-all", "mrdp-overrank", "sdip-extra-coordinate", "nbdp-soundness",
)


def wilson_interval(successes: int, trials: int,
                    z: float = 1.96) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials == 0:
        return (0.0, 1.0)
    p = successes / trials
    zz = z * z
    denom = 1.0 + zz / trials
    center = (p + zz / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + zz / (4 * trials * trials)) \
        / denom
    return (max(0.0, center - half), min(1.0, center + half))


@dataclass(frozen=True)
class TrialResult:
    suite: str
    index: int
    recipe: str
    policy: str
    seed_hex: str
    nonce_hex: str
    accepted: bool
    detail: str


@dataclass(frozen=True)
class SuiteConfig:
    """Primitive-only trial configuration, shared verbatim across workers."""

    suite: str
    seed_hex: str
    backend: str = "toy"
    frac_bits: int = 16
    layers: int = 1
    d: int = 32
    d_ff: int = 64
    vocab: int = 64
    epsilon: float = 0.05
    rank_policy: int = 8
    sparse_k: int = 8
    sparse_n: int = 256
    sparse_t: int = 2
    kappa: int = 48
    nbdp_delta: float = 0.01
    violation_factor: float = 2.0


@dataclass
class ExperimentReport:
    suite: str
    trials: list[TrialResult]

    def summary_rows(self) -> list[tuple[str, int, int, float, float, float]]:
        by_recipe: dict[str, list[TrialResult]] = {}
        for t in self.trials:
            by_recipe.setdefault(t.recipe, []).append(t)
        rows = []
        for recipe in sorted(by_recipe):
            group = by_recipe[recipe]
            accepts = sum(1 for t in group if t.accepted)
            lo, hi = wilson_interval(accepts, len(group))
            rows.append((recipe, len(group), accepts,
                         accepts / len(group), lo, hi))
        return rows

    def trials_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["suite", "trial", "recipe", "policy", "seed", "nonce",
                    "accepted", "detail"])
        for t in self.trials:
            w.writerow([t.suite, t.index, t.recipe, t.policy, t.seed_hex,
                        t.nonce_hex, int(t.accepted), t.detail])
        return buf.getvalue()

    def summary_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["suite", "recipe", "trials", "accepts", "rate",
                    "wilson_low", "wilson_high"])
        for recipe, n, acc, rate, lo, hi in self.summary_rows():
            w.writerow([self.suite, recipe, n, acc, f"{rate:.6f}",
                        f"{lo:.6f}", f"{hi:.6f}"])
        return buf.getvalue()

    def write(self, outdir: str, *, figures: bool = True) -> list[str]:
        """Write trial and summary CSVs plus rate figures under outdir."""
        os.makedirs(outdir, exist_ok=True)
        paths = []
        for stem, text in (("trials", self.trials_csv()),
                           ("summary", self.summary_csv())):
            path = os.path.join(outdir, f"{self.suite}-{stem}.csv")
            with open(path, "w") as fh:
                fh.write(text)
            paths.append(path)
        if figures:
            from .figures import render_experiment
            paths.extend(render_experiment(self, outdir))
        return paths


def _trial_seed(cfg: SuiteConfig, index: int) -> bytes:
    return hashlib.sha256(
        b"driftcert-trial" + bytes.fromhex(cfg.seed_hex)
        + cfg.suite.encode() + index.to_bytes(4, "little")).digest()


# -- per-suite trial bodies (top level so process pools can pickle them) ------

def _benign_trial(cfg: SuiteConfig, index: int) -> list[TrialResult]:
    seed = _trial_seed(cfg, index)
    backend = get_backend(cfg.backend)
    params = EncodingParams(frac_bits=cfg.frac_bits)
    arc = gen_model("transformer", seed, layers=cfg.layers, d=cfg.d,
                    d_ff=cfg.d_ff, vocab=cfg.vocab, params=params)
    pcs = MerklePcs(backend.field, max(cfg.d, cfg.d_ff, cfg.vocab) + 1,
                    max(cfg.d, cfg.d_ff, cfg.vocab) + 1)
    recipes = [
        DriftRecipe("lora", seed, rank=cfg.rank_policy),
        DriftRecipe("prefix", seed, rows=4),
        DriftRecipe("normball", seed, epsilon=cfg.epsilon),
        DriftRecipe("sparsepoison", seed, k=cfg.sparse_k),
    ]
    results = []
    for recipe in recipes:
        tuned = gen_drift(arc, recipe)
        policy = matched_policy(arc, recipe)
        cert = prove_all(arc, tuned, policy, backend=backend, seed=seed,
                         pcs=pcs, nbdp_delta=cfg.nbdp_delta, nbdp_kappa=1)
        report = verify_certificate(
            cert.root_base, cert.root_tuned, policy, cert, pcs=pcs,
            nbdp_delta=cfg.nbdp_delta, nbdp_kappa=1)
        bad = [f"{n}:{s}" for n, s in sorted(report.statuses.items())
               if s != "Ok"]
        detail = "all blocks Ok" if report.accepted else "; ".join(
            bad + report.notes)
        results.append(TrialResult(
            cfg.suite, index, recipe.describe(),
            policy.rules[0][1].canon() if policy.rules else "frozen",
            seed.hex(), cert.nonce.hex(), report.accepted, detail))
    return results


def _overrank_trial(cfg: SuiteConfig, index: int) -> list[TrialResult]:
    seed = _trial_seed(cfg, index)
    backend = get_backend(cfg.backend)
    field = backend.field
    q = field.q
    d = cfg.d
    r = cfg.rank_policy
    rng = np.random.default_rng(list(seed))
    a = rng.integers(-50, 51, (d, r + 1))
    b = rng.integers(-50, 51, (r + 1, d))
    delta = a @ b
    base = [[int(v) % q for v in row]
            for row in rng.integers(-1000, 1001, (d, d))]
    tuned = [[(base[i][j] + int(delta[i, j])) % q for j in range(d)]
             for i in range(d)]
    grid = [[(tuned[i][j] - base[i][j]) % q for j in range(d)]
            for i in range(d)]
    if matrix_rank(grid, field) != r + 1:
        return [TrialResult(cfg.suite, index, f"headbackdoor{{rank={r+1}}}",
                            f"rank {r}", seed.hex(), "", False,
                            "degenerate sample, true rank below r+1")]
    refused = False
    try:
        rank_factorize(grid, r, field)
    except RankExceeded:
        refused = True
    pcs = MerklePcs(field, d + 1, d + 1)
    prf = PrfStream(seed, "overrank")
    base_com, base_sec = pcs.commit(base, PrfStream(
        prf.child_seed("base"), "pcs-mask"))
    tuned_com, tuned_sec = pcs.commit(tuned, PrfStream(
        prf.child_seed("tuned"), "pcs-mask"))
    forged = truncated_factors(grid, r, field)
    proof = prove_mrdp(pcs, Transcript(), base, tuned, r, base_com, base_sec,
                       tuned_com, tuned_sec,
                       PrfStream(prf.child_seed("mask"), "pcs-mask"),
                       factors=forged)
    accepted = verify_mrdp(pcs, Transcript(), base_com, tuned_com, r, d, d,
                           proof)
    if accepted:
        detail = "forged rank surrogate accepted"
    elif refused:
        detail = "prover refused; forged surrogate rejected by verifier"
    else:
        detail = "rank oracle missed the violation"
    return [TrialResult(cfg.suite, index, f"headbackdoor{{rank={r+1}}}",
                        f"rank {r}", seed.hex(), "", accepted, detail)]


def _extra_coordinate_trial(cfg: SuiteConfig, index: int) -> list[TrialResult]:
    seed = _trial_seed(cfg, index)
    backend = get_backend(cfg.backend)
    field = backend.field
    q = field.q
    ped = pedersen_for(backend)
    n, k, t = cfg.sparse_n, cfg.sparse_k, cfg.sparse_t
    rng = np.random.default_rng(list(seed))
    support = sorted(int(i) for i in rng.choice(n, k + 1, replace=False))
    delta = [0] * n
    for i in support:
        delta[i] = int(rng.integers(1, 1000))
    base_vals = [int(v) % q for v in rng.integers(0, 1 << 20, n)]
    tuned_vals = [(base_vals[i] + delta[i]) % q for i in range(n)]
    prf = PrfStream(seed, "extra-coord")
    blind0 = PrfStream(prf.child_seed("b0"), "blinding").scalar(0, field)
    blind1 = PrfStream(prf.child_seed("b1"), "blinding").scalar(0, field)
    c_base = ped.commit_vector(base_vals, blind0)
    c_tuned = ped.commit_vector(tuned_vals, blind1)
    params = SdipParams(k, t, MODE_PUBLIC)
    refused = False
    try:
        prove_sdip_a(ped, Transcript(), params, c_base, c_tuned, delta,
                     (blind1 - blind0) % q,
                     ScalarSampler(PrfStream(prf.child_seed("m"), "mask"),
                                   field))
    except SparsityExceeded:
        refused = True
    # forged declaration: drop the smallest-magnitude true coordinate; a
    # valid proof for that support exists iff every masked challenge has a
    # vanishing inner product with the full drift
    drop = min(support, key=lambda i: delta[i])
    forged_support = tuple(i for i in support if i != drop)
    transcript = Transcript()
    _absorb_statement_a(transcript, ped, params, n, forged_support,
                        c_base, c_tuned)
    chal_seed = transcript.challenge_bytes("SDIP/chal", 32)
    stream = PrfStream(chal_seed, "sdip-r")
    n_pad = _padded_dim(n)
    padded = set(forged_support)
    accepted = True
    for j in range(t):
        r_j = _masked_challenge(stream, field, n_pad, j, padded)
        ip = sum(r_j[i] * delta[i] for i in range(n)) % q
        if ip != 0:
            accepted = False
            break
    if accepted:
        detail = "all masked challenges vanished on the undeclared coordinate"
    elif refused:
        detail = "prover refused; no valid proof exists for a clipped support"
    else:
        detail = "sparsity oracle missed the violation"
    return [TrialResult(cfg.suite, index, f"sparsepoison{{k={k+1}}}",
                        f"sparse {k}", seed.hex(), "", accepted, detail)]


def _nbdp_trial(cfg: SuiteConfig, index: int) -> list[TrialResult]:
    seed = _trial_seed(cfg, index)
    backend = get_backend(cfg.backend)
    field = backend.field
    q = field.q
    n = cfg.d * cfg.d_ff
    rng = np.random.default_rng(list(seed))
    g = rng.standard_normal(n)
    target_units = cfg.violation_factor * cfg.epsilon * (1 << cfg.frac_bits)
    g = g / np.linalg.norm(g) * target_units
    delta = [int(round(v)) for v in g]
    ped = pedersen_for(backend)
    prf = PrfStream(seed, "nbdp-soundness")
    blind0 = PrfStream(prf.child_seed("b0"), "blinding").scalar(0, field)
    blind1 = PrfStream(prf.child_seed("b1"), "blinding").scalar(0, field)
    base_vals = [int(v) % q for v in rng.integers(0, 1 << 20, n)]
    tuned_vals = [(base_vals[i] + delta[i]) % q for i in range(n)]
    c_base = ped.commit_vector(base_vals, blind0)
    c_tuned = ped.commit_vector(tuned_vals, blind1)
    params = derive_nbdp_params(cfg.epsilon, cfg.nbdp_delta, cfg.kappa,
                                frac_bits=cfg.frac_bits, dim=n,
                                field_modulus=q)
    sampler = ScalarSampler(PrfStream(prf.child_seed("m"), "mask"), field)
    try:
        proof = prove_nbdp(ped, Transcript(), params, c_base, c_tuned, delta,
                           (blind1 - blind0) % q, sampler)
    except ProjectionExceedsThreshold as exc:
        return [TrialResult(cfg.suite, index,
                            f"normviolation{{factor={cfg.violation_factor}}}",
                            f"norm {cfg.epsilon}", seed.hex(), "", False,
                            f"prover refused: projection {exc.index} "
                            f"exceeded the threshold")]
    accepted = verify_nbdp(ped, Transcript(), params, c_base, c_tuned, proof)
    detail = ("every projection landed under the threshold"
              if accepted else "proof rejected")
    return [TrialResult(cfg.suite, index,
                        f"normviolation{{factor={cfg.violation_factor}}}",
                        f"norm {cfg.epsilon}", seed.hex(), "", accepted,
                        detail)]


_TRIAL_BODIES = {
    "benign-all": _benign_trial,
    "mrdp-overrank": _overrank_trial,
    "sdip-extra-coordinate": _extra_coordinate_trial,
    "nbdp-soundness": _nbdp_trial,
}


def _run_payload(payload: tuple[SuiteConfig, int]) -> list[TrialResult]:
    cfg, index = payload
    return _TRIAL_BODIES[cfg.suite](cfg, index)


def run_experiment(suite: str, trials: int, seed: bytes, *,
                   threads: int = 1, backend: str = "toy",
                   overrides: dict | None = None) -> ExperimentReport:
    """Run a named suite and return its canonical, index-ordered report."""
    if suite not in SUITE_NAMES:
        raise InvalidParameter(
            f"unknown suite {suite!r}, expected one of {SUITE_NAMES}")
    if trials < 1:
        raise InvalidParameter("trials must be at least 1")
    cfg = SuiteConfig(suite=suite, seed_hex=seed.hex(), backend=backend)
    if overrides:
        cfg = replace(cfg, **overrides)
    payloads = [(cfg, i) for i in range(trials)]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(_run_payload, payloads,
                                   chunksize=max(1, trials // (4 * threads))))
    else:
        chunks = [_run_payload(p) for p in payloads]
    results = [t for chunk in chunks for t in chunk]
    results.sort(key=lambda t: (t.index, t.recipe))
    return ExperimentReport(suite, results)
