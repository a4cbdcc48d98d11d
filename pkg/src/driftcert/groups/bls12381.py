"""BLS12-381 from first principles: G1, G2, optimal ate pairing.

G1 lives on y^2 = x^3 + 4 over Fp; G2 on the sextic twist
y^2 = x^3 + 4(1+i) over Fp2.  Points are Jacobian triples, infinity is
``None``.  Serialization is 48/96-byte compressed with the usual flag bits
(compression, infinity, y-sign) in the top of the first byte.

The pairing is the optimal ate loop over the curve parameter
u = -0xd201000000010000: the Miller loop keeps T on the twist in affine
Fp2 and multiplies the accumulator by sparse untwisted lines (flat w-slots
{0,2,3} for tangents, {1,3,4} for chords; a global xi^-1 factor is dropped
because the final exponentiation kills Fp2 subfield content).  Correctness
is pinned by bilinearity, non-degeneracy, and order tests rather than
external vectors, plus a dense reference Miller loop used in tests.
"""

from __future__ import annotations

import hashlib

from ..errors import WireFormatError
from ..field import BLS12381_SCALAR_MODULUS, field_by_modulus
from .base import GroupBackend
from .bls_tower import (
    FP2_ONE, FP2_ZERO, FP12_ONE, P,
    fp2_add, fp2_inv, fp2_is_zero, fp2_mul, fp2_neg, fp2_scalar, fp2_sqr,
    fp2_sub, fp12_conj, fp12_eq, fp12_frobenius, fp12_inv, fp12_mul,
    fp12_mul_flat_sparse, fp12_pow, fp12_sqr,
)

R = BLS12381_SCALAR_MODULUS
B_G1 = 4
B_G2 = (4, 4)  # 4 * (1 + i)

# Curve parameter u; |u| drives the Miller loop, sign handled by conjugation.
BLS_U = -0xD201000000010000

G1_COFACTOR = 0x396C8C005555E1568C00AAAB0000AAAB
G2_COFACTOR = 0x5D543A95414E7F1091D50792876A202CD91DE4547085ABAA68A205B2E5A7DDFA628F1CB4D9E82EF21537E293A6691AE1616EC6E786F0C70CF1C38E31C7238E5

_G1_GEN_AFFINE = (
    0x17F1D3A73197D7942695638C4FA9AC0FC3688C4F9774B905A14E3A3F171BAC586C55E83FF97A1AEFFB3AF00ADB22C6BB,
    0x08B3F481E3AAA0F1A09E30ED741D8AE4FCF5E095D5D00AF600DB18CB2C04B3EDD03CC744A2888AE40CAA232946C5E7E1,
)
_G2_GEN_AFFINE = (
    (
        0x024AA2B2F08F0A91260805272DC51051C6E47AD4FA403B02B4510B647AE3D1770BAC0326A805BBEFD48056C8C121BDB8,
        0x13E02B6052719F607DACD3A088274F65596BD0D09920B61AB5DA61BBDC7F5049334CF11213945D57E5AC7D055D042B7E,
    ),
    (
        0x0CE5D527727D6E118CC9CDC6DA2E351AADFD9BAA8CBDD3A76D429A695160D12C923AC9CC3BACA289E193548608B82801,
        0x0606C4A02EA734CC32ACD2B02BC28B99CB3E287E85A763AF267492AB572E99AB3F370D275CEC1DA1AAA9075FF05F79BE,
    ),
)

_FINAL_EXP_HARD = (P**4 - P**2 + 1) // R
assert (P**4 - P**2 + 1) % R == 0


# -- G1: Jacobian arithmetic over Fp ------------------------------------------

def g1_on_curve(p) -> bool:
    aff = g1_affine(p) if p is not None and len(p) == 3 else p
    if aff is None:
        return True
    x, y = aff
    return (y * y - x * x * x - B_G1) % P == 0


def g1_double(p):
    if p is None:
        return None
    x, y, z = p
    if y == 0:
        return None
    a = x * x % P
    b = y * y % P
    c = b * b % P
    d = 2 * ((x + b) * (x + b) - a - c) % P
    e = 3 * a % P
    x3 = (e * e - 2 * d) % P
    y3 = (e * (d - x3) - 8 * c) % P
    z3 = 2 * y * z % P
    return (x3, y3, z3)


def g1_add(p, q):
    if p is None:
        return q
    if q is None:
        return p
    x1, y1, z1 = p
    x2, y2, z2 = q
    zz1 = z1 * z1 % P
    zz2 = z2 * z2 % P
    u1 = x1 * zz2 % P
    u2 = x2 * zz1 % P
    s1 = y1 * zz2 * z2 % P
    s2 = y2 * zz1 * z1 % P
    h = (u2 - u1) % P
    r = (s2 - s1) % P
    if h == 0:
        if r == 0:
            return g1_double(p)
        return None
    hh = h * h % P
    hhh = h * hh % P
    v = u1 * hh % P
    x3 = (r * r - hhh - 2 * v) % P
    y3 = (r * (v - x3) - s1 * hhh) % P
    z3 = z1 * z2 * h % P
    return (x3, y3, z3)


def g1_neg(p):
    if p is None:
        return None
    return (p[0], -p[1] % P, p[2])


def g1_mul(p, k: int):
    k %= R
    if p is None or k == 0:
        return None
    # 4-bit fixed window
    table = [None, p]
    for _ in range(14):
        table.append(g1_add(table[-1], p))
    acc = None
    for shift in range((k.bit_length() + 3) // 4 * 4 - 4, -1, -4):
        if acc is not None:
            acc = g1_double(g1_double(g1_double(g1_double(acc))))
        nib = (k >> shift) & 0xF
        if nib:
            acc = g1_add(acc, table[nib])
    return acc


def g1_affine(p):
    if p is None:
        return None
    x, y, z = p
    if z == 0:
        return None
    zi = pow(z, P - 2, P)
    zi2 = zi * zi % P
    return (x * zi2 % P, y * zi2 * zi % P)


def g1_eq(p, q) -> bool:
    if p is None or q is None:
        return (p is None) == (q is None) or (
            p is not None and p[2] == 0) or (q is not None and q[2] == 0)
    x1, y1, z1 = p
    x2, y2, z2 = q
    if z1 == 0 or z2 == 0:
        return z1 == z2
    zz1 = z1 * z1 % P
    zz2 = z2 * z2 % P
    return (x1 * zz2 - x2 * zz1) % P == 0 and (
        y1 * zz2 * z2 - y2 * zz1 * z1) % P == 0


def _sqrt_fp(a: int) -> int | None:
    """Square root mod p (p = 3 mod 4); None if a is a non-residue."""
    r = pow(a, (P + 1) // 4, P)
    return r if r * r % P == a % P else None


# -- G2: Jacobian arithmetic over Fp2 -----------------------------------------

def g2_on_curve(pt) -> bool:
    if pt is None:
        return True
    x, y = pt
    lhs = fp2_sqr(y)
    rhs = fp2_add(fp2_mul(fp2_sqr(x), x), B_G2)
    return fp2_sub(lhs, rhs) == (0, 0) or fp2_is_zero(fp2_sub(lhs, rhs))


def g2_double(p):
    if p is None:
        return None
    x, y, z = p
    if fp2_is_zero(y):
        return None
    a = fp2_sqr(x)
    b = fp2_sqr(y)
    c = fp2_sqr(b)
    d = fp2_sub(fp2_sub(fp2_sqr(fp2_add(x, b)), a), c)
    d = fp2_add(d, d)
    e = fp2_scalar(a, 3)
    x3 = fp2_sub(fp2_sqr(e), fp2_add(d, d))
    y3 = fp2_sub(fp2_mul(e, fp2_sub(d, x3)), fp2_scalar(c, 8))
    z3 = fp2_scalar(fp2_mul(y, z), 2)
    return (x3, y3, z3)


def g2_add(p, q):
    if p is None:
        return q
    if q is None:
        return p
    x1, y1, z1 = p
    x2, y2, z2 = q
    zz1 = fp2_sqr(z1)
    zz2 = fp2_sqr(z2)
    u1 = fp2_mul(x1, zz2)
    u2 = fp2_mul(x2, zz1)
    s1 = fp2_mul(fp2_mul(y1, zz2), z2)
    s2 = fp2_mul(fp2_mul(y2, zz1), z1)
    h = fp2_sub(u2, u1)
    r = fp2_sub(s2, s1)
    if fp2_is_zero(h):
        if fp2_is_zero(r):
            return g2_double(p)
        return None
    hh = fp2_sqr(h)
    hhh = fp2_mul(h, hh)
    v = fp2_mul(u1, hh)
    x3 = fp2_sub(fp2_sub(fp2_sqr(r), hhh), fp2_add(v, v))
    y3 = fp2_sub(fp2_mul(r, fp2_sub(v, x3)), fp2_mul(s1, hhh))
    z3 = fp2_mul(fp2_mul(z1, z2), h)
    return (x3, y3, z3)


def g2_neg(p):
    if p is None:
        return None
    return (p[0], fp2_neg(p[1]), p[2])


def g2_mul(p, k: int):
    k %= R
    if p is None or k == 0:
        return None
    acc = None
    for bit in bin(k)[2:]:
        acc = g2_double(acc)
        if bit == "1":
            acc = g2_add(acc, p)
    return acc


def g2_affine(p):
    if p is None:
        return None
    x, y, z = p
    if fp2_is_zero(z):
        return None
    zi = fp2_inv(z)
    zi2 = fp2_sqr(zi)
    return (fp2_mul(x, zi2), fp2_mul(fp2_mul(y, zi2), zi))


def g2_eq(p, q) -> bool:
    pa, qa = g2_affine(p), g2_affine(q)
    if pa is None or qa is None:
        return pa is None and qa is None
    return (
        fp2_is_zero(fp2_sub(pa[0], qa[0]))
        and fp2_is_zero(fp2_sub(pa[1], qa[1]))
    )


def _sqrt_fp2(a):
    """Square root in Fp2 via the norm trick; None for non-residues."""
    a0, a1 = a[0] % P, a[1] % P
    if a1 == 0:
        r = _sqrt_fp(a0)
        if r is not None:
            return (r, 0)
        r = _sqrt_fp(-a0 % P)
        if r is None:
            return None
        return (0, r)
    norm = (a0 * a0 + a1 * a1) % P
    s = _sqrt_fp(norm)
    if s is None:
        return None
    inv2 = pow(2, P - 2, P)
    t = (a0 + s) * inv2 % P
    x = _sqrt_fp(t)
    if x is None:
        x = _sqrt_fp((a0 - s) * inv2 % P)
        if x is None:
            return None
    y = a1 * pow(2 * x % P, P - 2, P) % P
    cand = (x, y)
    return cand if fp2_is_zero(fp2_sub(fp2_sqr(cand), (a0, a1))) else None


# -- Optimal ate pairing ------------------------------------------------------

_U_BITS = bin(-BLS_U)[3:]  # bits below the MSB of |u|


def _line_tangent(t, p_aff):
    """Sparse untwisted tangent line at twist point t, evaluated at p.

    Flat slots: w^0 gets 3x^3 - 2y^2, w^2 gets -3x^2 * xp, w^3 gets 2y * yp.
    """
    x, y = t
    xp, yp = p_aff
    x2 = fp2_sqr(x)
    c0 = fp2_sub(fp2_scalar(fp2_mul(x2, x), 3), fp2_scalar(fp2_sqr(y), 2))
    c2 = fp2_scalar(x2, -3 * xp % P)
    c3 = fp2_scalar(y, 2 * yp % P)
    return [(0, c0), (2, c2), (3, c3)]


def _line_chord(t, q, p_aff):
    """Sparse untwisted chord line through twist points t, q, evaluated at p.

    Flat slots: w^1 gets x1 y2 - x2 y1, w^3 gets -xp (y2 - y1),
    w^4 gets yp (x2 - x1).
    """
    x1, y1 = t
    x2, y2 = q
    xp, yp = p_aff
    c1 = fp2_sub(fp2_mul(x1, y2), fp2_mul(x2, y1))
    c3 = fp2_scalar(fp2_sub(y2, y1), -xp % P)
    c4 = fp2_scalar(fp2_sub(x2, x1), yp)
    return [(1, c1), (3, c3), (4, c4)]


def _affine_g2_add(t, q):
    x1, y1 = t
    x2, y2 = q
    if fp2_is_zero(fp2_sub(x1, x2)):
        if fp2_is_zero(fp2_sub(y1, y2)):
            return _affine_g2_double(t)
        return None
    lam = fp2_mul(fp2_sub(y2, y1), fp2_inv(fp2_sub(x2, x1)))
    x3 = fp2_sub(fp2_sub(fp2_sqr(lam), x1), x2)
    y3 = fp2_sub(fp2_mul(lam, fp2_sub(x1, x3)), y1)
    return (x3, y3)


def _affine_g2_double(t):
    x, y = t
    lam = fp2_mul(fp2_scalar(fp2_sqr(x), 3), fp2_inv(fp2_scalar(y, 2)))
    x3 = fp2_sub(fp2_sqr(lam), fp2_scalar(x, 2))
    y3 = fp2_sub(fp2_mul(lam, fp2_sub(x, x3)), y)
    return (x3, y3)


def miller_loop(pairs) -> tuple:
    """Product of Miller values for (G1 affine, G2 twist affine) pairs."""
    f = FP12_ONE
    state = [(q, q) for _, q in pairs]  # (T, Q)
    for bit in _U_BITS:
        f = fp12_sqr(f)
        for i, (p_aff, _) in enumerate(pairs):
            t, q = state[i]
            f = fp12_mul_flat_sparse(f, _line_tangent(t, p_aff))
            state[i] = (_affine_g2_double(t), q)
        if bit == "1":
            for i, (p_aff, _) in enumerate(pairs):
                t, q = state[i]
                f = fp12_mul_flat_sparse(f, _line_chord(t, q, p_aff))
                state[i] = (_affine_g2_add(t, q), q)
    # u < 0: the odd power flips sign; conjugation is inversion up to
    # factors the final exponentiation removes.
    return fp12_conj(f)


def final_exponentiation(f) -> tuple:
    f = fp12_mul(fp12_conj(f), fp12_inv(f))        # ^(p^6 - 1)
    f = fp12_mul(fp12_frobenius(f, 2), f)          # ^(p^2 + 1)
    return fp12_pow(f, _FINAL_EXP_HARD)


def pairing(p_g1, q_g2) -> tuple:
    """e(P, Q) as an Fp12 value (our fixed sign convention)."""
    pa = g1_affine(p_g1)
    qa = g2_affine(q_g2)
    if pa is None or qa is None:
        return FP12_ONE
    return final_exponentiation(miller_loop([(pa, qa)]))


# -- serialization ------------------------------------------------------------

_FLAG_COMPRESSED = 0x80
_FLAG_INFINITY = 0x40
_FLAG_SIGN = 0x20


def g1_serialize(p) -> bytes:
    aff = g1_affine(p)
    if aff is None:
        out = bytearray(48)
        out[0] = _FLAG_COMPRESSED | _FLAG_INFINITY
        return bytes(out)
    x, y = aff
    out = bytearray(x.to_bytes(48, "big"))
    out[0] |= _FLAG_COMPRESSED
    if y > (P - 1) // 2:
        out[0] |= _FLAG_SIGN
    return bytes(out)


def g1_deserialize(data: bytes):
    if len(data) != 48:
        raise WireFormatError(f"G1 element must be 48 bytes, got {len(data)}")
    flags = data[0]
    if not flags & _FLAG_COMPRESSED:
        raise WireFormatError("uncompressed G1 encoding not accepted")
    if flags & _FLAG_INFINITY:
        if any(data[1:]) or flags & ~(_FLAG_COMPRESSED | _FLAG_INFINITY) or data[0] != (
                _FLAG_COMPRESSED | _FLAG_INFINITY):
            raise WireFormatError("non-canonical G1 infinity encoding")
        return None
    x = int.from_bytes(bytes([data[0] & 0x1F]) + data[1:], "big")
    if x >= P:
        raise WireFormatError("G1 x-coordinate not reduced")
    y = _sqrt_fp((x * x * x + B_G1) % P)
    if y is None:
        raise WireFormatError("G1 x-coordinate not on curve")
    if (y > (P - 1) // 2) != bool(flags & _FLAG_SIGN):
        y = -y % P
    point = (x, y, 1)
    if not g1_subgroup_check(point):
        raise WireFormatError("G1 point not in the prime-order subgroup")
    return point


def g1_subgroup_check(p) -> bool:
    return g1_mul(p, R) is None


def g2_sign_bit(y) -> bool:
    y0, y1 = y
    if y1:
        return y1 > (P - 1) // 2
    return y0 > (P - 1) // 2


def g2_serialize(p) -> bytes:
    aff = g2_affine(p)
    if aff is None:
        out = bytearray(96)
        out[0] = _FLAG_COMPRESSED | _FLAG_INFINITY
        return bytes(out)
    x, y = aff
    out = bytearray(x[1].to_bytes(48, "big") + x[0].to_bytes(48, "big"))
    out[0] |= _FLAG_COMPRESSED
    if g2_sign_bit(y):
        out[0] |= _FLAG_SIGN
    return bytes(out)


def g2_deserialize(data: bytes):
    if len(data) != 96:
        raise WireFormatError(f"G2 element must be 96 bytes, got {len(data)}")
    flags = data[0]
    if not flags & _FLAG_COMPRESSED:
        raise WireFormatError("uncompressed G2 encoding not accepted")
    if flags & _FLAG_INFINITY:
        if any(data[1:]) or data[0] != (_FLAG_COMPRESSED | _FLAG_INFINITY):
            raise WireFormatError("non-canonical G2 infinity encoding")
        return None
    x1 = int.from_bytes(bytes([data[0] & 0x1F]) + data[1:48], "big")
    x0 = int.from_bytes(data[48:], "big")
    if x0 >= P or x1 >= P:
        raise WireFormatError("G2 x-coordinate not reduced")
    x = (x0, x1)
    y = _sqrt_fp2(fp2_add(fp2_mul(fp2_sqr(x), x), B_G2))
    if y is None:
        raise WireFormatError("G2 x-coordinate not on curve")
    if g2_sign_bit(y) != bool(flags & _FLAG_SIGN):
        y = fp2_neg(y)
    point = (x, y, FP2_ONE)
    if g2_mul(point, R) is not None:
        raise WireFormatError("G2 point not in the prime-order subgroup")
    return point


# -- hashing to the curve -----------------------------------------------------

_HASH_TAG = b"driftcert-bls-htg-v1"


def _hash_to_g1(label: str, index: int):
    tag = label.encode("ascii")
    counter = 0
    while True:
        h = hashlib.sha256(
            _HASH_TAG + len(tag).to_bytes(2, "little") + tag
            + index.to_bytes(8, "little") + counter.to_bytes(8, "little")
        ).digest()
        h2 = hashlib.sha256(h + b"x").digest()
        x = int.from_bytes(h + h2, "little") % P
        y = _sqrt_fp((x * x * x + B_G1) % P)
        if y is not None:
            if h2[-1] & 1:
                y = -y % P
            point = g1_mul((x, y, 1), G1_COFACTOR)
            if point is not None:
                return point
        counter += 1


def _derive_g1_generator():
    return _hash_to_g1("BLS/G1-generator", 0)


def _derive_g2_generator():
    tag = b"BLS/G2-generator"
    counter = 0
    while True:
        h = hashlib.sha256(_HASH_TAG + tag + counter.to_bytes(8, "little")).digest()
        h2 = hashlib.sha256(h + b"i").digest()
        h3 = hashlib.sha256(h + b"j").digest()
        h4 = hashlib.sha256(h + b"k").digest()
        x = (
            int.from_bytes(h + h2, "little") % P,
            int.from_bytes(h3 + h4, "little") % P,
        )
        y = _sqrt_fp2(fp2_add(fp2_mul(fp2_sqr(x), x), B_G2))
        if y is not None:
            point = g2_mul((x, y, FP2_ONE), G2_COFACTOR)
            if point is not None and g2_mul(point, R) is None:
                return point
        counter += 1


def _validated_generators():
    g1 = (_G1_GEN_AFFINE[0], _G1_GEN_AFFINE[1], 1)
    if not ((_G1_GEN_AFFINE[1] ** 2 - _G1_GEN_AFFINE[0] ** 3 - B_G1) % P == 0
            and g1_subgroup_check(g1)):
        g1 = _derive_g1_generator()
    g2 = (_G2_GEN_AFFINE[0], _G2_GEN_AFFINE[1], FP2_ONE)
    lhs = fp2_sqr(_G2_GEN_AFFINE[1])
    rhs = fp2_add(fp2_mul(fp2_sqr(_G2_GEN_AFFINE[0]), _G2_GEN_AFFINE[0]), B_G2)
    if not (fp2_is_zero(fp2_sub(lhs, rhs)) and g2_mul(g2, R) is None):
        g2 = _derive_g2_generator()
    return g1, g2


G1_GENERATOR, G2_GENERATOR = _validated_generators()


# -- multi-scalar multiplication ----------------------------------------------

def g1_msm(points, scalars):
    pairs = [(p, s % R) for p, s in zip(points, scalars) if s % R and p is not None]
    if not pairs:
        return None
    if len(pairs) < 32:
        acc = None
        for p, s in pairs:
            acc = g1_add(acc, g1_mul(p, s))
        return acc
    c = 8 if len(pairs) < 2048 else 12
    windows = (R.bit_length() + c - 1) // c
    acc = None
    for w in range(windows - 1, -1, -1):
        if acc is not None:
            for _ in range(c):
                acc = g1_double(acc)
        buckets = [None] * (1 << c)
        shift = w * c
        mask = (1 << c) - 1
        for p, s in pairs:
            b = (s >> shift) & mask
            if b:
                buckets[b] = g1_add(buckets[b], p)
        running = None
        window_sum = None
        for b in range(len(buckets) - 1, 0, -1):
            running = g1_add(running, buckets[b])
            window_sum = g1_add(window_sum, running)
        acc = g1_add(acc, window_sum)
    return acc


# -- backend ------------------------------------------------------------------

class Bls12381Backend(GroupBackend):

    name = "bls12-381"
    has_pairing = True
    element_bytes = 48
    g2_element_bytes = 96

    _singleton: "Bls12381Backend | None" = None

    def __init__(self):
        self.field = field_by_modulus(R)
        self._gen_cache: dict[tuple[str, int], tuple] = {}

    @classmethod
    def instance(cls) -> "Bls12381Backend":
        if cls._singleton is None:
            cls._singleton = cls()
        return cls._singleton

    def identity(self):
        return None

    def generator(self):
        return G1_GENERATOR

    def add(self, a, b):
        return g1_add(a, b)

    def neg(self, a):
        return g1_neg(a)

    def mul(self, p, k: int):
        return g1_mul(p, k)

    def eq(self, a, b) -> bool:
        return g1_eq(a, b)

    def msm(self, points, scalars):
        if len(points) != len(scalars):
            raise ValueError("msm length mismatch")
        return g1_msm(points, scalars)

    def serialize(self, p) -> bytes:
        return g1_serialize(p)

    def deserialize(self, data: bytes):
        return g1_deserialize(data)

    def hash_to_group(self, label: str, index: int):
        key = (label, index)
        cached = self._gen_cache.get(key)
        if cached is None:
            cached = self._gen_cache[key] = _hash_to_g1(label, index)
        return cached

    # G2 / pairing

    def g2_generator(self):
        return G2_GENERATOR

    def g2_add(self, a, b):
        return g2_add(a, b)

    def g2_neg(self, a):
        return g2_neg(a)

    def g2_mul(self, p, k: int):
        return g2_mul(p, k)

    def g2_eq(self, a, b) -> bool:
        return g2_eq(a, b)

    def g2_serialize(self, p) -> bytes:
        return g2_serialize(p)

    def g2_deserialize(self, data: bytes):
        return g2_deserialize(data)

    def pairing_check(self, left, right) -> bool:
        pairs = []
        for a, b in left:
            pa, qa = g1_affine(a), g2_affine(b)
            if pa is not None and qa is not None:
                pairs.append((pa, qa))
        for c, d in right:
            pa, qa = g1_affine(g1_neg(c)), g2_affine(d)
            if pa is not None and qa is not None:
                pairs.append((pa, qa))
        if not pairs:
            return True
        f = final_exponentiation(miller_loop(pairs))
        return fp12_eq(f, FP12_ONE)
