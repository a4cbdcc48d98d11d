"""Drift policy language and architecture presets.

A policy maps block names to drift classes.  The file format is line
oriented: a `policy v1` header, then `match "<glob>" <class>` rules tried
first-match-wins against each block name, and an optional `default <class>`
line for blocks no rule matches (frozen when absent).  Classes:

    frozen                 block must be unchanged
    norm <epsilon>         Frobenius norm of the drift at most epsilon
    rank <r>               drift rank at most r
    sparse <k> [hidden]    at most k changed coordinates; `hidden` selects
                           the support-hiding mode
    all of [<c>, <c>, ..]  intersection, one proof per constituent

The policy digest hashes the resolved mapping (sorted block name to
canonical class form), not the rule list, so reordering rules that does not
change any block's class does not change the digest.

Presets encode the conventional assignments for three architectures from
their block naming conventions:

    transformer  embed.tok | layers.<i>.attn.{wq,wk,wv,wo}
                 | layers.<i>.ffn.{w1,w2} | layers.<i>.{ln1,ln2}.g
    cnn          conv<i>.w | conv<i>.pw (1x1) | conv<i>.chan | fc.w
    mlp          fc<i>.w | bottleneck<i>.w

Attention and 1x1-conv and bottleneck matrices get rank bounds, embeddings
and channel groups get sparsity bounds, everything else gets norm bounds.
Presets emit one exact-name rule per block so the resolved mapping is
explicit.
"""

from __future__ import annotations

import fnmatch
import hashlib
import math
import re
from dataclasses import dataclass, field

from .errors import (DuplicateBlockRule, InvalidParameter, PolicySyntaxError,
                     UnknownClass, UnrecognizedNaming)
from .sdip import MODE_HIDDEN, MODE_PUBLIC

POLICY_VERSION = "v1"
_DIGEST_DOMAIN = b"driftcert-policy-v1"


@dataclass(frozen=True)
class Frozen:
    """Block must be unchanged (norm 0, proven by commitment equality)."""

    kind = "frozen"

    def canon(self) -> str:
        return "frozen"


@dataclass(frozen=True)
class Norm:
    epsilon: float

    kind = "norm"

    def __post_init__(self) -> None:
        if not math.isfinite(self.epsilon) or self.epsilon < 0:
            raise InvalidParameter(
                f"norm bound must be finite and >= 0, got {self.epsilon}")

    def canon(self) -> str:
        return f"norm {self.epsilon!r}"


@dataclass(frozen=True)
class Rank:
    r: int

    kind = "rank"

    def __post_init__(self) -> None:
        if self.r < 0:
            raise InvalidParameter(f"rank bound must be >= 0, got {self.r}")

    def canon(self) -> str:
        return f"rank {self.r}"


@dataclass(frozen=True)
class Sparse:
    k: int
    mode: str = MODE_PUBLIC

    kind = "sparse"

    def __post_init__(self) -> None:
        if self.k < 0:
            raise InvalidParameter(
                f"sparsity bound must be >= 0, got {self.k}")
        if self.mode not in (MODE_PUBLIC, MODE_HIDDEN):
            raise InvalidParameter(f"unknown sparse mode {self.mode!r}")

    def canon(self) -> str:
        return f"sparse {self.k} hidden" if self.mode == MODE_HIDDEN \
            else f"sparse {self.k}"


@dataclass(frozen=True)
class Intersection:
    parts: tuple

    kind = "all"

    def __post_init__(self) -> None:
        if not self.parts:
            raise InvalidParameter("intersection must not be empty")
        kinds = [p.kind for p in self.parts]
        if len(set(kinds)) != len(kinds):
            raise InvalidParameter(
                "intersection repeats a class kind: " + ", ".join(kinds))
        if any(p.kind == "all" for p in self.parts):
            raise InvalidParameter("intersections do not nest")

    def canon(self) -> str:
        inner = sorted(p.canon() for p in self.parts)
        return "all of [" + ", ".join(inner) + "]"


DriftClassSpec = Frozen | Norm | Rank | Sparse | Intersection


def constituents(spec: DriftClassSpec) -> tuple:
    """The simple classes a proof must cover, in canonical (sorted) order."""
    parts = spec.parts if isinstance(spec, Intersection) else (spec,)
    return tuple(sorted(parts, key=lambda p: p.canon()))


@dataclass
class Policy:
    """Ordered match rules plus a default class for unmatched blocks."""

    rules: list[tuple[str, DriftClassSpec]]
    default: DriftClassSpec = field(default_factory=Frozen)
    version: str = POLICY_VERSION

    def class_for(self, name: str) -> DriftClassSpec:
        for pattern, spec in self.rules:
            if fnmatch.fnmatchcase(name, pattern):
                return spec
        return self.default

    def resolve(self, names) -> dict[str, DriftClassSpec]:
        return {name: self.class_for(name) for name in sorted(names)}

    def digest(self, names) -> bytes:
        h = hashlib.sha256()
        h.update(_DIGEST_DOMAIN)
        h.update(self.version.encode("ascii"))
        for name, spec in sorted(self.resolve(names).items()):
            h.update(len(name).to_bytes(4, "little"))
            h.update(name.encode("utf-8"))
            canon = spec.canon().encode("ascii")
            h.update(len(canon).to_bytes(4, "little"))
            h.update(canon)
        return h.digest()


def _parse_simple_class(tokens: list[str], line_no: int) -> DriftClassSpec:
    if not tokens:
        raise PolicySyntaxError(line_no, "missing drift class")
    head, rest = tokens[0], tokens[1:]
    if head == "frozen":
        if rest:
            raise PolicySyntaxError(line_no, "frozen takes no parameters")
        return Frozen()
    if head == "norm":
        if len(rest) != 1:
            raise PolicySyntaxError(line_no, "norm takes one parameter")
        try:
            eps = float(rest[0])
        except ValueError:
            raise InvalidParameter(
                f"line {line_no}: norm bound {rest[0]!r} is not a number")
        return Norm(eps)
    if head == "rank":
        if len(rest) != 1:
            raise PolicySyntaxError(line_no, "rank takes one parameter")
        try:
            r = int(rest[0])
        except ValueError:
            raise InvalidParameter(
                f"line {line_no}: rank bound {rest[0]!r} is not an integer")
        return Rank(r)
    if head == "sparse":
        if len(rest) not in (1, 2) or (len(rest) == 2 and rest[1] != "hidden"):
            raise PolicySyntaxError(
                line_no, "sparse takes a count and an optional 'hidden'")
        try:
            k = int(rest[0])
        except ValueError:
            raise InvalidParameter(
                f"line {line_no}: sparsity bound {rest[0]!r} is not an "
                "integer")
        return Sparse(k, MODE_HIDDEN if len(rest) == 2 else MODE_PUBLIC)
    raise UnknownClass(f"line {line_no}: unknown drift class {head!r}")


def _parse_class(text: str, line_no: int) -> DriftClassSpec:
    text = text.strip()
    if text.startswith("all"):
        m = re.fullmatch(r"all\s+of\s+\[(.*)\]", text)
        if m is None:
            raise PolicySyntaxError(
                line_no, "intersection syntax is: all of [<class>, <class>]")
        parts = [p.strip() for p in m.group(1).split(",")]
        if parts == [""]:
            raise InvalidParameter(f"line {line_no}: intersection is empty")
        return Intersection(tuple(
            _parse_simple_class(p.split(), line_no) for p in parts))
    return _parse_simple_class(text.split(), line_no)


_MATCH_RE = re.compile(r'match\s+"([^"]*)"\s+(.*)')


def parse_policy(text: str) -> Policy:
    lines = text.splitlines()
    rules: list[tuple[str, DriftClassSpec]] = []
    seen_patterns: set[str] = set()
    default: DriftClassSpec | None = None
    header_seen = False
    for idx, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not header_seen:
            if line != f"policy {POLICY_VERSION}":
                raise PolicySyntaxError(
                    idx, f"expected 'policy {POLICY_VERSION}' header, "
                    f"got {line!r}")
            header_seen = True
            continue
        if line.startswith("match"):
            m = _MATCH_RE.fullmatch(line)
            if m is None:
                raise PolicySyntaxError(
                    idx, 'match syntax is: match "<glob>" <class>')
            pattern = m.group(1)
            if not pattern:
                raise PolicySyntaxError(idx, "empty match pattern")
            if pattern in seen_patterns:
                raise DuplicateBlockRule(
                    f"line {idx}: duplicate rule for pattern {pattern!r}")
            seen_patterns.add(pattern)
            rules.append((pattern, _parse_class(m.group(2), idx)))
            continue
        if line.startswith("default"):
            if default is not None:
                raise PolicySyntaxError(idx, "multiple default lines")
            default = _parse_class(line[len("default"):], idx)
            continue
        raise PolicySyntaxError(idx, f"unrecognized line {line!r}")
    if not header_seen:
        raise PolicySyntaxError(1, "missing 'policy v1' header")
    return Policy(rules, default if default is not None else Frozen())


def format_policy(policy: Policy) -> str:
    lines = [f"policy {policy.version}"]
    for pattern, spec in policy.rules:
        lines.append(f'match "{pattern}" {spec.canon()}')
    lines.append(f"default {policy.default.canon()}")
    return "\n".join(lines) + "\n"


_TRANSFORMER_PATTERNS = [
    (re.compile(r"embed\.tok"), "embed"),
    (re.compile(r"layers\.\d+\.attn\.w[qkvo]"), "attn"),
    (re.compile(r"layers\.\d+\.ffn\.w[12]"), "ffn"),
    (re.compile(r"layers\.\d+\.ln[12]\.g"), "ln"),
]

_CNN_PATTERNS = [
    (re.compile(r"conv\d+\.pw"), "pointwise"),
    (re.compile(r"conv\d+\.chan"), "channel"),
    (re.compile(r"conv\d+\.w"), "kernel"),
    (re.compile(r"fc\.w"), "kernel"),
]

_MLP_PATTERNS = [
    (re.compile(r"bottleneck\d+\.w"), "bottleneck"),
    (re.compile(r"fc\d+\.w"), "dense"),
]


def _classify(name: str, patterns, arch: str) -> str:
    for pattern, role in patterns:
        if pattern.fullmatch(name):
            return role
    raise UnrecognizedNaming(
        f"block {name!r} does not follow the {arch} naming convention")


def preset_policy(arch: str, names, *, r: int = 8, epsilon: float = 0.05,
                  epsilon_ln: float | None = None, k: int = 100,
                  sparse_mode: str = MODE_PUBLIC) -> Policy:
    """One exact-name rule per manifest block, per the architecture's roles.

    transformer: attention matrices rank-bounded, feedforward matrices
    norm-bounded at epsilon, normalization gains norm-bounded at epsilon_ln
    (defaults to epsilon), token embeddings sparse.  cnn: 1x1 convolutions
    rank-bounded, channel scales sparse, kernels and the classifier head
    norm-bounded.  mlp: dense layers norm-bounded, declared bottlenecks
    rank-bounded.
    """
    if epsilon_ln is None:
        epsilon_ln = epsilon
    role_specs = {
        "transformer": {
            "embed": Sparse(k, sparse_mode),
            "attn": Rank(r),
            "ffn": Norm(epsilon),
            "ln": Norm(epsilon_ln),
        },
        "cnn": {
            "pointwise": Rank(r),
            "channel": Sparse(k, sparse_mode),
            "kernel": Norm(epsilon),
        },
        "mlp": {
            "bottleneck": Rank(r),
            "dense": Norm(epsilon),
        },
    }
    patterns = {
        "transformer": _TRANSFORMER_PATTERNS,
        "cnn": _CNN_PATTERNS,
        "mlp": _MLP_PATTERNS,
    }
    if arch not in role_specs:
        raise UnrecognizedNaming(f"unknown architecture preset {arch!r}")
    rules = []
    for name in sorted(names):
        role = _classify(name, patterns[arch], arch)
        rules.append((name, role_specs[arch][role]))
    return Policy(rules)
