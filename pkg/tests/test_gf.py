import random

import pytest

from srsat.gf import (
    apply_bit_matrix,
    bit_matrix_invertible,
    gf_inv,
    gf_mul,
    is_irreducible,
    matrix_inverse,
    matrix_mul,
    mul_bit_rows,
)

MOD4 = 0b10011
MOD8 = 0x11B


def schoolbook_mul(a, b, modulus, e):
    """Oracle: plain polynomial multiply, then long division by the modulus."""
    prod = 0
    for i in range(e):
        if (a >> i) & 1:
            prod ^= b << i
    for i in range(2 * e - 2, e - 1, -1):
        if (prod >> i) & 1:
            prod ^= modulus << (i - e)
    return prod


# frozen from the oracle: gf_mul(6, b) over GF(2^4)/x^4+x+1
MUL6_ROW = [0x0, 0x6, 0xC, 0xA, 0xB, 0xD, 0x7, 0x1, 0x5, 0x3, 0x9, 0xF, 0xE, 0x8, 0x2, 0x4]


def test_mul_matches_schoolbook_exhaustively_e4():
    for a in range(16):
        for b in range(16):
            assert gf_mul(a, b, MOD4, 4) == schoolbook_mul(a, b, MOD4, 4)


def test_mul_known_values():
    # x * x^3 = x^4 = x + 1 under x^4+x+1
    assert gf_mul(0x8, 0x2, MOD4, 4) == 0x3
    assert gf_mul(0x6, 0x6, MOD4, 4) == 0x7
    assert [gf_mul(0x6, b, MOD4, 4) for b in range(16)] == MUL6_ROW


def test_mul_identity_and_zero():
    for a in range(16):
        assert gf_mul(a, 1, MOD4, 4) == a
        assert gf_mul(a, 0, MOD4, 4) == 0


def test_field_axioms_exhaustive_e4():
    for a in range(16):
        for b in range(16):
            assert gf_mul(a, b, MOD4, 4) == gf_mul(b, a, MOD4, 4)
            for c in range(16):
                left = gf_mul(gf_mul(a, b, MOD4, 4), c, MOD4, 4)
                right = gf_mul(a, gf_mul(b, c, MOD4, 4), MOD4, 4)
                assert left == right
                assert gf_mul(a, b ^ c, MOD4, 4) == gf_mul(a, b, MOD4, 4) ^ gf_mul(a, c, MOD4, 4)


def test_field_axioms_sampled_e8():
    rng = random.Random(99)
    for _ in range(600):
        a, b, c = (rng.randrange(256) for _ in range(3))
        assert gf_mul(a, b, MOD8, 8) == schoolbook_mul(a, b, MOD8, 8)
        assert gf_mul(a, b, MOD8, 8) == gf_mul(b, a, MOD8, 8)
        assert gf_mul(a, b ^ c, MOD8, 8) == gf_mul(a, b, MOD8, 8) ^ gf_mul(a, c, MOD8, 8)
        assert gf_mul(gf_mul(a, b, MOD8, 8), c, MOD8, 8) == gf_mul(a, gf_mul(b, c, MOD8, 8), MOD8, 8)


@pytest.mark.parametrize("modulus,e", [(MOD4, 4), (MOD8, 8)])
def test_inverse_exhaustive(modulus, e):
    assert gf_inv(0, modulus, e) == 0
    assert gf_inv(1, modulus, e) == 1
    for a in range(1, 1 << e):
        assert gf_mul(a, gf_inv(a, modulus, e), modulus, e) == 1


def test_irreducibility():
    assert is_irreducible(0b10011, 4)
    assert is_irreducible(0b11001, 4)
    assert not is_irreducible(0b10001, 4)  # x^4+1 = (x+1)^4
    assert not is_irreducible(0b11111 << 1, 4)
    assert is_irreducible(0x11B, 8)
    assert not is_irreducible(0x100, 8)


def test_mul_bit_rows_agree_with_mul():
    for const in range(16):
        rows = mul_bit_rows(const, MOD4, 4)
        for v in range(16):
            assert apply_bit_matrix(rows, v) == gf_mul(const, v, MOD4, 4)


def test_bit_matrix_invertibility():
    assert bit_matrix_invertible((0b0001, 0b0010, 0b0100, 0b1000), 4)
    assert not bit_matrix_invertible((0b0001, 0b0001, 0b0100, 0b1000), 4)


def test_matrix_inverse_over_field():
    m = [[2, 3, 1, 1], [1, 2, 3, 1], [1, 1, 2, 3], [3, 1, 1, 2]]
    inv = matrix_inverse(m, MOD4, 4)
    assert inv is not None
    identity = [[1 if i == j else 0 for j in range(4)] for i in range(4)]
    assert matrix_mul(m, inv, MOD4, 4) == identity
    # the inverse of the AES-shaped circulant is the (E,B,D,9) circulant
    assert inv[0] == [0xE, 0xB, 0xD, 0x9]
    singular = [[2, 3, 1], [1, 2, 3], [3, 1, 2]]
    assert matrix_inverse(singular, MOD4, 4) is None
