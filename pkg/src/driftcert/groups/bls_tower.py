"""Extension field tower for BLS12-381.

Fp2 = Fp[i]/(i^2 + 1), Fp6 = Fp2[v]/(v^3 - xi) with xi = 1 + i, and
Fp12 = Fp6[w]/(w^2 - v).  Elements are nested tuples of plain ints; all
functions are free functions so the pairing loop pays no attribute lookups.

The "flat" view treats Fp12 as Fp2[w]/(w^6 - xi) with coefficient k of w^k
at flat index k; tower coefficients interleave as
((c0, c2, c4), (c1, c3, c5)).  Sparse line multiplication and the Frobenius
map both work on the flat view.
"""

from __future__ import annotations

# Base field modulus of BLS12-381 (381 bits, p = 3 mod 4).
P = 0x1A0111EA397FE69A4B1BA7B6434BACD764774B84F38512BF6730D2A0F6B0F6241EABFFFEB153FFFFB9FEFFFFFFFFAAAB

Fp2 = tuple  # (a0, a1) = a0 + a1*i
Fp6 = tuple  # (c0, c1, c2) over v
Fp12 = tuple  # (d0, d1) over w

FP2_ZERO = (0, 0)
FP2_ONE = (1, 0)
XI = (1, 1)  # nonresidue for the sextic extension

FP6_ZERO = (FP2_ZERO, FP2_ZERO, FP2_ZERO)
FP6_ONE = (FP2_ONE, FP2_ZERO, FP2_ZERO)

FP12_ZERO = (FP6_ZERO, FP6_ZERO)
FP12_ONE = (FP6_ONE, FP6_ZERO)


# -- Fp2 ----------------------------------------------------------------------

def fp2_add(x, y):
    return ((x[0] + y[0]) % P, (x[1] + y[1]) % P)


def fp2_sub(x, y):
    return ((x[0] - y[0]) % P, (x[1] - y[1]) % P)


def fp2_neg(x):
    return (-x[0] % P, -x[1] % P)


def fp2_conj(x):
    return (x[0], -x[1] % P)


def fp2_mul(x, y):
    a0, a1 = x
    b0, b1 = y
    m0 = a0 * b0
    m1 = a1 * b1
    cross = (a0 + a1) * (b0 + b1) - m0 - m1
    return ((m0 - m1) % P, cross % P)


def fp2_sqr(x):
    a0, a1 = x
    return ((a0 + a1) * (a0 - a1) % P, 2 * a0 * a1 % P)


def fp2_scalar(x, k: int):
    return (x[0] * k % P, x[1] * k % P)


def fp2_mul_xi(x):
    """Multiply by xi = 1 + i: (a - b) + (a + b) i."""
    a0, a1 = x
    return ((a0 - a1) % P, (a0 + a1) % P)


def fp2_inv(x):
    a0, a1 = x
    norm = (a0 * a0 + a1 * a1) % P
    d = pow(norm, P - 2, P)
    return (a0 * d % P, -a1 * d % P)


def fp2_pow(x, e: int):
    acc = FP2_ONE
    base = x
    while e:
        if e & 1:
            acc = fp2_mul(acc, base)
        base = fp2_sqr(base)
        e >>= 1
    return acc


def fp2_is_zero(x) -> bool:
    return x[0] % P == 0 and x[1] % P == 0


# -- Fp6 ----------------------------------------------------------------------

def fp6_add(x, y):
    return (fp2_add(x[0], y[0]), fp2_add(x[1], y[1]), fp2_add(x[2], y[2]))


def fp6_sub(x, y):
    return (fp2_sub(x[0], y[0]), fp2_sub(x[1], y[1]), fp2_sub(x[2], y[2]))


def fp6_neg(x):
    return (fp2_neg(x[0]), fp2_neg(x[1]), fp2_neg(x[2]))


def fp6_mul(x, y):
    a0, a1, a2 = x
    b0, b1, b2 = y
    t0 = fp2_mul(a0, b0)
    t1 = fp2_mul(a1, b1)
    t2 = fp2_mul(a2, b2)
    c0 = fp2_add(t0, fp2_mul_xi(
        fp2_sub(fp2_mul(fp2_add(a1, a2), fp2_add(b1, b2)), fp2_add(t1, t2))))
    c1 = fp2_add(
        fp2_sub(fp2_mul(fp2_add(a0, a1), fp2_add(b0, b1)), fp2_add(t0, t1)),
        fp2_mul_xi(t2))
    c2 = fp2_add(
        fp2_sub(fp2_mul(fp2_add(a0, a2), fp2_add(b0, b2)), fp2_add(t0, t2)),
        t1)
    return (c0, c1, c2)


def fp6_sqr(x):
    return fp6_mul(x, x)


def fp6_mul_v(x):
    """Multiply by v: (c0, c1, c2) -> (xi*c2, c0, c1)."""
    return (fp2_mul_xi(x[2]), x[0], x[1])


def fp6_inv(x):
    a0, a1, a2 = x
    c0 = fp2_sub(fp2_sqr(a0), fp2_mul_xi(fp2_mul(a1, a2)))
    c1 = fp2_sub(fp2_mul_xi(fp2_sqr(a2)), fp2_mul(a0, a1))
    c2 = fp2_sub(fp2_sqr(a1), fp2_mul(a0, a2))
    norm = fp2_add(
        fp2_mul(a0, c0),
        fp2_mul_xi(fp2_add(fp2_mul(a2, c1), fp2_mul(a1, c2))))
    d = fp2_inv(norm)
    return (fp2_mul(c0, d), fp2_mul(c1, d), fp2_mul(c2, d))


# -- Fp12 ---------------------------------------------------------------------

def fp12_mul(x, y):
    a0, a1 = x
    b0, b1 = y
    t0 = fp6_mul(a0, b0)
    t1 = fp6_mul(a1, b1)
    cross = fp6_sub(
        fp6_mul(fp6_add(a0, a1), fp6_add(b0, b1)), fp6_add(t0, t1))
    return (fp6_add(t0, fp6_mul_v(t1)), cross)


def fp12_sqr(x):
    a0, a1 = x
    t = fp6_mul(a0, a1)
    c0 = fp6_sub(
        fp6_mul(fp6_add(a0, a1), fp6_add(a0, fp6_mul_v(a1))),
        fp6_add(t, fp6_mul_v(t)))
    return (c0, fp6_add(t, t))


def fp12_conj(x):
    return (x[0], fp6_neg(x[1]))


def fp12_inv(x):
    a0, a1 = x
    norm = fp6_sub(fp6_sqr(a0), fp6_mul_v(fp6_sqr(a1)))
    d = fp6_inv(norm)
    return (fp6_mul(a0, d), fp6_neg(fp6_mul(a1, d)))


def fp12_pow(x, e: int):
    if e < 0:
        return fp12_pow(fp12_inv(x), -e)
    acc = FP12_ONE
    base = x
    while e:
        if e & 1:
            acc = fp12_mul(acc, base)
        base = fp12_sqr(base)
        e >>= 1
    return acc


def fp12_eq(x, y) -> bool:
    return fp12_to_flat(x) == fp12_to_flat(y)


def fp12_to_flat(x) -> list:
    """Coefficients of w^0..w^5 over Fp2, canonically reduced."""
    (c0, c2, c4), (c1, c3, c5) = x
    return [(c[0] % P, c[1] % P) for c in (c0, c1, c2, c3, c4, c5)]


def fp12_from_flat(flat) -> Fp12:
    c0, c1, c2, c3, c4, c5 = flat
    return ((c0, c2, c4), (c1, c3, c5))


# Powers of xi used when flat products wrap past w^6.
_XI_POW = [FP2_ONE, XI]


def fp12_mul_flat_sparse(x, sparse: list) -> Fp12:
    """Multiply by an element given as flat (slot, Fp2) pairs.

    The Miller loop's line functions occupy three flat slots, so this is
    an 18-multiplication product instead of the dense 54.
    """
    flat = fp12_to_flat(x)
    acc = [FP2_ZERO] * 6
    for slot, coeff in sparse:
        if fp2_is_zero(coeff):
            continue
        for k in range(6):
            idx = k + slot
            term = fp2_mul(flat[k], coeff)
            if idx >= 6:
                idx -= 6
                term = fp2_mul_xi(term)
            acc[idx] = fp2_add(acc[idx], term)
    return fp12_from_flat(acc)


# -- Frobenius ----------------------------------------------------------------

# gamma_k = xi^(k (p-1)/6) so that (w^k)^p = gamma_k w^k after conjugating
# Fp2 coefficients.
_GAMMA1 = fp2_pow(XI, (P - 1) // 6)
_GAMMAS = [FP2_ONE]
for _ in range(5):
    _GAMMAS.append(fp2_mul(_GAMMAS[-1], _GAMMA1))


def fp12_frobenius(x, power: int = 1) -> Fp12:
    out = x
    for _ in range(power % 12):
        flat = fp12_to_flat(out)
        flat = [fp2_mul(fp2_conj(c), _GAMMAS[k]) for k, c in enumerate(flat)]
        out = fp12_from_flat(flat)
    return out
