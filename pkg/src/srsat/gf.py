"""Arithmetic in GF(2^e) and small GF(2) matrix helpers.

Field elements are e-bit integers; bit j is the coefficient of x^j.
A GF(2) matrix is a tuple of row masks, row i acting on a value v as
parity(row_i & v).
"""

from __future__ import annotations

from functools import lru_cache


def gf_mul(a: int, b: int, modulus: int, e: int) -> int:
    """Carry-less product of a and b, reduced modulo the field polynomial."""
    res = 0
    for i in range(e):
        if (b >> i) & 1:
            res ^= a << i
    for i in range(2 * e - 2, e - 1, -1):
        if (res >> i) & 1:
            res ^= modulus << (i - e)
    return res


def gf_pow(a: int, k: int, modulus: int, e: int) -> int:
    res = 1
    base = a
    while k:
        if k & 1:
            res = gf_mul(res, base, modulus, e)
        base = gf_mul(base, base, modulus, e)
        k >>= 1
    return res


def gf_inv(a: int, modulus: int, e: int) -> int:
    """Multiplicative inverse; gf_inv(0) = 0 by convention."""
    if a == 0:
        return 0
    # a^(2^e - 2) = a^-1 in GF(2^e)
    return gf_pow(a, (1 << e) - 2, modulus, e)


def is_irreducible(modulus: int, e: int) -> bool:
    """Exhaustive divisibility test; adequate for e <= 8."""
    if modulus >> e != 1:
        return False
    for d in range(1, e // 2 + 1):
        for f in range(1 << d, 1 << (d + 1)):
            if _poly_mod(modulus, f) == 0:
                return False
    return True


def _poly_mod(a: int, b: int) -> int:
    db = b.bit_length() - 1
    while a.bit_length() - 1 >= db and a:
        a ^= b << (a.bit_length() - 1 - db)
    return a


@lru_cache(maxsize=None)
def mul_bit_rows(const: int, modulus: int, e: int) -> tuple[int, ...]:
    """GF(2) row masks of multiplication by a constant.

    Row t's mask selects the input bits whose XOR gives bit t of const*v.
    """
    rows = [0] * e
    for j in range(e):
        prod = gf_mul(const, 1 << j, modulus, e)
        for t in range(e):
            if (prod >> t) & 1:
                rows[t] |= 1 << j
    return tuple(rows)


def parity(x: int) -> int:
    return bin(x).count("1") & 1


def apply_bit_matrix(rows: tuple[int, ...], v: int) -> int:
    out = 0
    for t, row in enumerate(rows):
        out |= parity(row & v) << t
    return out


def bit_matrix_invertible(rows: tuple[int, ...], e: int) -> bool:
    """Gaussian elimination over GF(2) on row masks."""
    work = list(rows)
    if len(work) != e:
        return False
    for col in range(e):
        piv = next((i for i in range(col, e) if (work[i] >> col) & 1), None)
        if piv is None:
            return False
        work[col], work[piv] = work[piv], work[col]
        for i in range(e):
            if i != col and (work[i] >> col) & 1:
                work[i] ^= work[col]
    return True


def matrix_mul(a, b, modulus: int, e: int):
    """Product of square matrices over GF(2^e), given as row lists."""
    n = len(a)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = 0
            for k in range(n):
                acc ^= gf_mul(a[i][k], b[k][j], modulus, e)
            row.append(acc)
        out.append(row)
    return out


def matrix_inverse(m, modulus: int, e: int):
    """Inverse over GF(2^e) via Gauss-Jordan; None when singular."""
    n = len(m)
    aug = [list(row) + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col]), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        scale = gf_inv(aug[col][col], modulus, e)
        aug[col] = [gf_mul(v, scale, modulus, e) for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [v ^ gf_mul(f, w, modulus, e) for v, w in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]
