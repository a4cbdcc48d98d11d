"""Command-line front end for drift certificates.

Subcommands: commit, prove, verify, chain-verify, policy check, gen model,
gen drift, experiment, bench, srs setup.  Exit codes: 0 accept or success,
1 reject or policy violation, 2 usage or I/O error.  With --json a single
machine-readable report object is printed on stdout; human diagnostics go
to stderr either way.

Two conventions worth knowing:

  * The --seed flag is 64 hex digits (32 bytes).  For commit and prove it
    is the secret blinding seed and is never echoed; omit it and a random
    one is used, at the cost of reproducible roots.  For the generators
    and experiment runner the seed is public and is echoed in the report.
  * A rank policy needs a polynomial commitment scheme.  The default is
    the pairing scheme, which requires --srs; pass --pcs merkle for the
    transparent scheme (larger openings, no setup).

Parse failures of the certificate under judgment count as rejection
(exit 1); unreadable auxiliary inputs (archives, policies, SRS, roots
files) are usage errors (exit 2).
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys

from ..aggregate import (FtiCertificate, build_chain, commit_archive,
                         default_nonce, prove_all, verify_certificate,
                         verify_chain)
from ..codec import EncodingParams, load_archive, save_archive
from ..errors import DriftCertError, PolicyViolation, WireFormatError
from ..groups import get_backend
from ..pcs import KzgPcs, MerklePcs, load_srs, save_srs, setup_kzg
from ..policy import format_policy, parse_policy, preset_policy
from .bench import run_bench
from .experiments import SUITE_NAMES, run_experiment
from .gen import (RECIPE_KINDS, DriftRecipe, detect_arch, drift_stats,
                  gen_drift, gen_model, matched_policy)

_RETRY_DOMAIN = b"driftcert-retry"


class _Usage(Exception):
    """Raised for exit-code-2 conditions with a user-facing message."""


def _parse_seed(text: str | None) -> bytes:
    if text is None:
        return os.urandom(32)
    try:
        raw = bytes.fromhex(text)
    except ValueError:
        raise _Usage("--seed must be hex")
    if len(raw) != 32:
        raise _Usage("--seed must be 64 hex digits (32 bytes)")
    return raw


def _read_text(path: str, what: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as err:
        raise _Usage(f"cannot read {what} {path!r}: {err.strerror}")


def _read_bytes(path: str, what: str) -> bytes:
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as err:
        raise _Usage(f"cannot read {what} {path!r}: {err.strerror}")


def _load_policy(path: str):
    try:
        return parse_policy(_read_text(path, "policy file"))
    except DriftCertError as err:
        raise _Usage(f"policy file {path!r}: {err}")


def _load_archive(path: str):
    try:
        return load_archive(_read_bytes(path, "archive"))
    except DriftCertError as err:
        raise _Usage(f"archive {path!r}: {err}")


def _policy_needs_pcs(policy, names) -> bool:
    from ..policy import Rank, constituents

    return any(
        isinstance(c, Rank)
        for spec in policy.resolve(names).values()
        for c in constituents(spec)
    )


def _pcs_for_prove(args, policy, archive):
    """Scheme selected by --pcs, or None when the policy has no rank class."""
    names = archive.names()
    if not _policy_needs_pcs(policy, names):
        return None
    if args.pcs == "merkle":
        from ..codec import matrix_dims

        deg = 0
        for name in names:
            d, dp = matrix_dims(archive.blocks[name].shape)
            deg = max(deg, d, dp)
        return MerklePcs(archive.params.field, deg, deg)
    if not args.srs:
        raise _Usage("policy contains a rank class; supply --srs or "
                     "--pcs merkle")
    srs = _load_srs(args.srs)
    return KzgPcs(srs)


def _load_srs(path: str):
    try:
        return load_srs(_read_bytes(path, "SRS file"))
    except DriftCertError as err:
        raise _Usage(f"SRS file {path!r}: {err}")


def _pcs_for_verify(args, cert: FtiCertificate):
    if not cert.pcs_id:
        return None
    if cert.pcs_id == "kzg":
        if not args.srs:
            raise _Usage("certificate uses the pairing scheme; supply --srs")
        return KzgPcs(_load_srs(args.srs))
    if cert.pcs_id == "merkle":
        deg = 0
        for rec in cert.records:
            deg = max(deg, rec.dims[0], rec.dims[1])
        backend = get_backend(cert.backend_id)
        return MerklePcs(backend.field, deg, deg)
    raise _Usage(f"certificate names unknown commitment scheme "
                 f"{cert.pcs_id!r}")


def _emit(args, code: int, report: dict) -> int:
    if args.json:
        print(json.dumps(report, indent=2, sort_keys=True))
    return code


def _note(msg: str) -> None:
    print(msg, file=sys.stderr)


# -- commit / prove / verify --------------------------------------------------

def _cmd_commit(args) -> int:
    policy = _load_policy(args.policy)
    backend = get_backend(args.backend)
    if args.seed is None:
        _note("note: no --seed given; roots use a fresh random seed and "
              "will not be reproducible")
    seed = _parse_seed(args.seed)
    roots = []
    for path in args.archive:
        archive = _load_archive(path)
        pcs = _pcs_for_prove(args, policy, archive)
        roots.append(commit_archive(archive, policy, backend=backend,
                                    seed=seed, pcs=pcs))
    if len(roots) == 1:
        payload = {"root": roots[0].hex()}
    else:
        payload = {"root_base": roots[0].hex(), "root_tuned": roots[1].hex()}
    payload["backend"] = args.backend
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    if not args.json:
        for label, value in payload.items():
            if label.startswith("root"):
                print(f"{label} {value}")
    return _emit(args, 0, {"command": "commit", **payload,
                           "out": args.out})


def _cmd_prove(args) -> int:
    policy = _load_policy(args.policy)
    backend = get_backend(args.backend)
    base = _load_archive(args.base)
    tuned = _load_archive(args.tuned)
    pcs = _pcs_for_prove(args, policy, base)
    seed = _parse_seed(args.seed)
    if args.nonce is not None:
        try:
            nonce = bytes.fromhex(args.nonce)
        except ValueError:
            raise _Usage("--nonce must be hex")
    else:
        nonce = default_nonce(seed)

    cert = None
    attempts = 0
    while True:
        attempts += 1
        try:
            cert = prove_all(base, tuned, policy, backend=backend, seed=seed,
                             nonce=nonce, pcs=pcs, nbdp_delta=args.delta,
                             nbdp_kappa=args.kappa)
            break
        except PolicyViolation as err:
            retryable = all("projection" in d for _, _, d in err.failures)
            if not retryable or attempts > args.retries:
                report = {
                    "command": "prove", "accepted": False,
                    "attempts": attempts,
                    "violations": [
                        {"block": b, "class": c, "detail": d}
                        for b, c, d in err.failures
                    ],
                }
                _note(f"policy violation: {err}")
                return _emit(args, 1, report)
            nonce = hashlib.sha256(nonce + _RETRY_DOMAIN).digest()
            _note(f"note: norm projection exceeded the threshold; retrying "
                  f"with a fresh nonce (attempt {attempts + 1})")

    blob = cert.to_bytes()
    with open(args.out, "wb") as fh:
        fh.write(blob)
    if args.roots_out:
        with open(args.roots_out, "w") as fh:
            json.dump({"root_base": cert.root_base.hex(),
                       "root_tuned": cert.root_tuned.hex(),
                       "backend": args.backend}, fh, indent=2, sort_keys=True)
            fh.write("\n")
    report = {
        "command": "prove", "accepted": True, "out": args.out,
        "bytes": len(blob), "blocks": len(cert.records),
        "attempts": attempts, "nonce": cert.nonce.hex(),
        "root_base": cert.root_base.hex(),
        "root_tuned": cert.root_tuned.hex(),
    }
    if not args.json:
        print(f"certificate written to {args.out} ({len(blob)} bytes, "
              f"{len(cert.records)} blocks, {attempts} attempt(s))")
    return _emit(args, 0, report)


def _load_roots(path: str) -> tuple[bytes, bytes]:
    try:
        payload = json.loads(_read_text(path, "roots file"))
        return (bytes.fromhex(payload["root_base"]),
                bytes.fromhex(payload["root_tuned"]))
    except (json.JSONDecodeError, KeyError, TypeError, ValueError):
        raise _Usage(f"roots file {path!r} must be JSON with hex "
                     "root_base and root_tuned")


def _cmd_verify(args) -> int:
    policy = _load_policy(args.policy)
    root_base, root_tuned = _load_roots(args.roots)
    blob = _read_bytes(args.cert, "certificate")
    try:
        cert = FtiCertificate.from_bytes(blob)
    except WireFormatError as err:
        _note(f"certificate unparseable: {err}")
        return _emit(args, 1, {"command": "verify", "accepted": False,
                               "notes": [f"certificate unparseable: {err}"],
                               "statuses": {}})
    pcs = _pcs_for_verify(args, cert)
    report = verify_certificate(root_base, root_tuned, policy, cert,
                                pcs=pcs, nbdp_delta=args.delta,
                                nbdp_kappa=args.kappa)
    payload = {"command": "verify", "accepted": report.accepted,
               "statuses": report.statuses, "notes": report.notes}
    if not args.json:
        print("accept" if report.accepted else "reject")
        for note in report.notes:
            _note(f"  {note}")
        for name, status in sorted(report.statuses.items()):
            if status != "Ok":
                _note(f"  {name}: {status}")
    return _emit(args, 0 if report.accepted else 1, payload)


def _cmd_chain_verify(args) -> int:
    policies = [_load_policy(p) for p in args.policy]
    if len(policies) == 1:
        policies = policies * len(args.cert)
    if len(policies) != len(args.cert):
        raise _Usage("give one --policy for all stages or one per stage")
    blobs = [_read_bytes(p, "certificate") for p in args.cert]
    try:
        chain = build_chain(blobs)
    except WireFormatError as err:
        _note(f"certificate unparseable: {err}")
        return _emit(args, 1, {"command": "chain-verify", "accepted": False,
                               "stages": [],
                               "notes": [f"certificate unparseable: {err}"]})
    pcs = None
    if any(FtiCertificate.from_bytes(b).pcs_id == "kzg" for b in blobs):
        if not args.srs:
            raise _Usage("a stage uses the pairing scheme; supply --srs")
        pcs = KzgPcs(_load_srs(args.srs))
    elif any(FtiCertificate.from_bytes(b).pcs_id == "merkle" for b in blobs):
        deg = 0
        backend = None
        for b in blobs:
            cert = FtiCertificate.from_bytes(b)
            backend = get_backend(cert.backend_id)
            for rec in cert.records:
                deg = max(deg, rec.dims[0], rec.dims[1])
        pcs = MerklePcs(backend.field, deg, deg)
    report = verify_chain(chain, blobs, policies, pcs=pcs,
                          nbdp_delta=args.delta, nbdp_kappa=args.kappa)
    payload = {
        "command": "chain-verify", "accepted": report.accepted,
        "stages": [{"stage": i, "valid": ok, "detail": detail}
                   for i, (ok, detail) in enumerate(report.stages)],
    }
    if not args.json:
        for i, (ok, detail) in enumerate(report.stages):
            print(f"stage {i}: {'ok' if ok else 'INVALID (' + detail + ')'}")
        print("chain: " + ("accept" if report.accepted else "reject"))
    return _emit(args, 0 if report.accepted else 1, payload)


# -- policy -------------------------------------------------------------------

def _cmd_policy_check(args) -> int:
    policy = _load_policy(args.policy_file)
    payload = {"command": "policy-check", "file": args.policy_file}
    if args.archive:
        archive = _load_archive(args.archive)
        names = archive.names()
        resolved = {n: spec.canon()
                    for n, spec in policy.resolve(names).items()}
        payload["resolved"] = resolved
        payload["digest"] = policy.digest(names).hex()
        if not args.json:
            width = max(len(n) for n in names)
            for name in names:
                print(f"{name:<{width}}  {resolved[name]}")
            print(f"digest {payload['digest']}")
    elif not args.json:
        print(f"{args.policy_file}: ok")
    return _emit(args, 0, payload)


# -- generators ---------------------------------------------------------------

def _cmd_gen_model(args) -> int:
    seed = _parse_seed(args.seed)
    params = EncodingParams(frac_bits=args.frac_bits)
    archive = gen_model(args.arch, seed, layers=args.layers, d=args.d,
                        d_ff=args.d_ff, vocab=args.vocab,
                        channels=args.channels, stages=args.stages,
                        width=args.width, classes=args.classes,
                        params=params)
    save_archive(archive, args.out)
    if args.policy_out:
        with open(args.policy_out, "w") as fh:
            fh.write(format_policy(preset_policy(args.arch,
                                                 archive.names())))
    total = sum(int(archive.blocks[n].size) for n in archive.names())
    payload = {"command": "gen-model", "arch": args.arch,
               "seed": seed.hex(), "out": args.out,
               "blocks": len(archive.names()), "parameters": total}
    if not args.json:
        print(f"wrote {args.out}: {args.arch}, {len(archive.names())} "
              f"blocks, {total} parameters")
    return _emit(args, 0, payload)


def _cmd_gen_drift(args) -> int:
    base = _load_archive(args.base)
    seed = _parse_seed(args.seed)
    kwargs = {}
    for field_name in ("rank", "rows", "fraction", "k", "block", "factor",
                       "epsilon", "scale"):
        value = getattr(args, field_name)
        if value is not None:
            kwargs[field_name] = value
    recipe = DriftRecipe(args.recipe, seed, **kwargs)
    tuned = gen_drift(base, recipe)
    save_archive(tuned, args.out)
    if args.policy_out:
        with open(args.policy_out, "w") as fh:
            fh.write(format_policy(matched_policy(base, recipe)))
    stats = {
        name: {"nonzeros": s.nonzeros, "rank": s.rank,
               "norm": round(s.norm, 9)}
        for name, s in drift_stats(base, tuned).items() if s.nonzeros
    }
    payload = {"command": "gen-drift", "recipe": recipe.describe(),
               "seed": seed.hex(), "out": args.out, "drift": stats}
    if not args.json:
        print(f"wrote {args.out}: {recipe.describe()}")
        for name, s in stats.items():
            print(f"  {name}: nnz={s['nonzeros']} rank={s['rank']} "
                  f"norm={s['norm']:.6f}")
    return _emit(args, 0, payload)


# -- measurement --------------------------------------------------------------

def _cmd_experiment(args) -> int:
    seed = _parse_seed(args.seed)
    report = run_experiment(args.suite, args.trials, seed,
                            threads=args.threads, backend=args.backend)
    paths = report.write(args.outdir, figures=not args.no_figures)
    rates = {
        recipe: {"trials": n, "accepts": acc, "rate": rate,
                 "wilson_low": lo, "wilson_high": hi}
        for recipe, n, acc, rate, lo, hi in report.summary_rows()
    }
    payload = {"command": "experiment", "suite": args.suite,
               "seed": seed.hex(), "trials": args.trials, "rates": rates,
               "paths": paths}
    if not args.json:
        for recipe, row in rates.items():
            print(f"{args.suite}/{recipe}: {row['accepts']}/{row['trials']} "
                  f"accepted (95% CI {row['wilson_low']:.4f}.."
                  f"{row['wilson_high']:.4f})")
        for p in paths:
            print(f"wrote {p}")
    return _emit(args, 0, payload)


def _cmd_bench(args) -> int:
    if args.quick:
        report = run_bench(backend_name=args.backend,
                           nbdp_dims=(16, 32, 64), mrdp_ranks=(2, 3, 4),
                           mrdp_dims=(8, 16, 32), sdip_ks=(4, 8, 16),
                           sdip_ts=(1, 2, 3), sdip_n=64)
    else:
        report = run_bench(backend_name=args.backend)
    paths = report.write(args.outdir, figures=not args.no_figures)
    payload = {"command": "bench", "all_hold": report.all_hold,
               "laws": [{"law": l.law, "holds": l.holds, "detail": l.detail}
                        for l in report.laws],
               "paths": paths}
    if not args.json:
        for l in report.laws:
            print(f"[{'ok' if l.holds else 'FAIL'}] {l.law}: {l.detail}")
        for p in paths:
            print(f"wrote {p}")
    return _emit(args, 0 if report.all_hold else 1, payload)


def _cmd_srs_setup(args) -> int:
    backend = get_backend(args.backend)
    if args.seed is None:
        _note("note: SRS sampled from a random seed; the seed is trapdoor "
              "material and was not retained")
    seed = _parse_seed(args.seed)
    srs = setup_kzg(backend, args.deg_x, args.deg_y, seed)
    blob = save_srs(srs, args.out)
    payload = {"command": "srs-setup", "backend": args.backend,
               "deg_x": args.deg_x, "deg_y": args.deg_y, "out": args.out,
               "bytes": len(blob)}
    if not args.json:
        print(f"wrote {args.out}: degrees ({args.deg_x}, {args.deg_y}), "
              f"{len(blob)} bytes")
    return _emit(args, 0, payload)


# -- parser -------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true",
                        default=argparse.SUPPRESS,
                        help="print a machine-readable report on stdout")
    common.add_argument("--seed", metavar="HEX32", default=argparse.SUPPRESS,
                        help="64 hex digits driving all randomness")
    common.add_argument("--srs", metavar="PATH", default=argparse.SUPPRESS,
                        help="reference string for the pairing scheme")
    common.add_argument("--threads", type=int, metavar="N",
                        default=argparse.SUPPRESS,
                        help="worker processes for experiment trials")

    ap = argparse.ArgumentParser(
        prog="driftcert", parents=[common],
        description="Certify bounded weight drift between committed models.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("commit", parents=[common],
                       help="commit archives and print Merkle roots")
    p.add_argument("archive", nargs="+",
                   help="one archive, or a base and a tuned archive")
    p.add_argument("--policy", required=True, metavar="PATH")
    p.add_argument("--backend", default="toy",
                   choices=["toy", "bls12-381"],
                   help="commitment group (toy is fast and insecure)")
    p.add_argument("--pcs", default="kzg", choices=["kzg", "merkle"])
    p.add_argument("--out", metavar="PATH", help="write a roots JSON file")
    p.set_defaults(func=_cmd_commit)

    p = sub.add_parser("prove", parents=[common],
                       help="prove a base/tuned pair against a policy")
    p.add_argument("base")
    p.add_argument("tuned")
    p.add_argument("--policy", required=True, metavar="PATH")
    p.add_argument("--out", required=True, metavar="PATH",
                   help="certificate output file")
    p.add_argument("--roots-out", metavar="PATH",
                   help="also write a roots JSON file for verify")
    p.add_argument("--backend", default="toy",
                   choices=["toy", "bls12-381"])
    p.add_argument("--pcs", default="kzg", choices=["kzg", "merkle"])
    p.add_argument("--nonce", metavar="HEX",
                   help="transcript nonce (derived from seed when omitted)")
    p.add_argument("--retries", type=int, default=3,
                   help="bounded norm-proof re-derivations with fresh "
                        "nonces (default 3)")
    p.add_argument("--kappa", type=int, default=48,
                   help="norm-proof repetition factor (default 48)")
    p.add_argument("--delta", type=float, default=0.01,
                   help="norm-proof soundness error (default 0.01)")
    p.set_defaults(func=_cmd_prove)

    p = sub.add_parser("verify", parents=[common],
                       help="verify a certificate against trusted roots")
    p.add_argument("cert")
    p.add_argument("--roots", required=True, metavar="PATH")
    p.add_argument("--policy", required=True, metavar="PATH")
    p.add_argument("--kappa", type=int, default=48)
    p.add_argument("--delta", type=float, default=0.01)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("chain-verify", parents=[common],
                       help="verify a sequence of stage certificates")
    p.add_argument("cert", nargs="+")
    p.add_argument("--policy", action="append", required=True, metavar="PATH",
                   help="one for all stages, or repeat per stage")
    p.add_argument("--kappa", type=int, default=48)
    p.add_argument("--delta", type=float, default=0.01)
    p.set_defaults(func=_cmd_chain_verify)

    p = sub.add_parser("policy", parents=[common], help="policy utilities")
    psub = p.add_subparsers(dest="policy_command", required=True)
    pc = psub.add_parser("check", parents=[common],
                         help="parse a policy, optionally resolve against "
                              "an archive")
    pc.add_argument("policy_file")
    pc.add_argument("--archive", metavar="PATH")
    pc.set_defaults(func=_cmd_policy_check)

    p = sub.add_parser("gen", parents=[common], help="synthetic generators")
    gsub = p.add_subparsers(dest="gen_command", required=True)
    gm = gsub.add_parser("model", parents=[common],
                         help="generate a model archive")
    gm.add_argument("--arch", required=True,
                    choices=["transformer", "cnn", "mlp"])
    gm.add_argument("--out", required=True, metavar="PATH")
    gm.add_argument("--layers", type=int, default=2)
    gm.add_argument("--d", type=int, default=64)
    gm.add_argument("--d-ff", type=int, default=128)
    gm.add_argument("--vocab", type=int, default=256)
    gm.add_argument("--channels", type=int, default=8)
    gm.add_argument("--stages", type=int, default=3)
    gm.add_argument("--width", type=int, default=64)
    gm.add_argument("--classes", type=int, default=10)
    gm.add_argument("--frac-bits", type=int, default=32)
    gm.add_argument("--policy-out", metavar="PATH",
                    help="also write the architecture's preset policy")
    gm.set_defaults(func=_cmd_gen_model)
    gd = gsub.add_parser("drift", parents=[common],
                         help="apply a drift recipe to an archive")
    gd.add_argument("--base", required=True, metavar="PATH")
    gd.add_argument("--out", required=True, metavar="PATH")
    gd.add_argument("--recipe", required=True, choices=list(RECIPE_KINDS))
    gd.add_argument("--rank", type=int, default=None)
    gd.add_argument("--rows", type=int, default=None)
    gd.add_argument("--fraction", type=float, default=None)
    gd.add_argument("--k", type=int, default=None)
    gd.add_argument("--block", default=None)
    gd.add_argument("--factor", type=float, default=None)
    gd.add_argument("--epsilon", type=float, default=None)
    gd.add_argument("--scale", type=float, default=None)
    gd.add_argument("--policy-out", metavar="PATH",
                    help="also write the recipe's matched policy")
    gd.set_defaults(func=_cmd_gen_drift)

    p = sub.add_parser("experiment", parents=[common],
                       help="run a detection-rate suite, write CSVs and "
                            "figures")
    p.add_argument("--suite", required=True, choices=list(SUITE_NAMES))
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--outdir", default="reports")
    p.add_argument("--backend", default="toy")
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("bench", parents=[common],
                       help="measure proof sizes and latencies, check "
                            "scaling laws")
    p.add_argument("--outdir", default="reports")
    p.add_argument("--backend", default="toy")
    p.add_argument("--quick", action="store_true",
                   help="smaller sweep for smoke testing")
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("srs", parents=[common],
                       help="reference string utilities")
    ssub = p.add_subparsers(dest="srs_command", required=True)
    ss = ssub.add_parser("setup", parents=[common],
                         help="sample a reference string from a seed")
    ss.add_argument("--deg-x", type=int, required=True)
    ss.add_argument("--deg-y", type=int, required=True)
    ss.add_argument("--out", required=True, metavar="PATH")
    ss.add_argument("--backend", default="toy",
                    choices=["toy", "bls12-381"])
    ss.set_defaults(func=_cmd_srs_setup)
    return ap


def main(argv=None) -> int:
    ap = _build_parser()
    args = ap.parse_args(argv)
    # The shared flags use SUPPRESS defaults so a value given before the
    # subcommand survives the subparser; fill the gaps here instead.
    for dest, value in (("json", False), ("seed", None), ("srs", None),
                        ("threads", 1)):
        if not hasattr(args, dest):
            setattr(args, dest, value)
    try:
        return args.func(args)
    except _Usage as err:
        _note(f"error: {err}")
        return 2
    except OSError as err:
        _note(f"error: {err}")
        return 2
    except DriftCertError as err:
        _note(f"error: {err}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
