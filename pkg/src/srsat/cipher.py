"""The SR(n, r, c, e) model cipher: a small-scale AES over an r x c state
of e-bit words.

A State is a flat tuple of r*c words in column-major order (word w sits at
row w % r, column w // r). Hex strings list words in that same order, one
hex digit per word for e=4, two for e=8.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .gf import (
    apply_bit_matrix,
    bit_matrix_invertible,
    gf_inv,
    gf_mul,
    gf_pow,
    is_irreducible,
    matrix_inverse,
)

# Defaults are data, not code: the constants below are this package's
# declared choices and every one of them can be overridden via
# params_from_config. The e=4 affine layer reproduces the widely used
# small-scale AES S-box [6,b,5,4,2,e,7,a,9,d,f,c,3,1,0,8]; the e=8 layer
# is the AES one.
DEFAULT_MODULUS = {4: 0b10011, 8: 0x11B}
DEFAULT_AFFINE_SEED = {4: 0x7, 8: 0xF1}
DEFAULT_AFFINE_CONST = {4: 0x6, 8: 0x63}
MIX_FIRST_ROW = {1: (2,), 2: (3, 2), 3: (2, 1, 1), 4: (2, 3, 1, 1)}


def _rotl(v: int, k: int, e: int) -> int:
    k %= e
    return ((v << k) | (v >> (e - k))) & ((1 << e) - 1)


def circulant(first_row: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
    r = len(first_row)
    return tuple(tuple(first_row[(b - a) % r] for b in range(r)) for a in range(r))


class CipherConfigError(ValueError):
    """Raised for invalid cipher parameters or malformed overrides."""


@dataclass(frozen=True)
class CipherParams:
    """SR(n, r, c, e) parameters plus the field and layer constants."""

    n: int
    r: int
    c: int
    e: int
    modulus: int
    mix_matrix: tuple[tuple[int, ...], ...]
    affine_matrix: tuple[int, ...]
    affine_const: int
    rcon_base: int = 2

    def __post_init__(self):
        if self.n < 1:
            raise CipherConfigError("round count must be >= 1")
        if self.r < 1 or self.c < 1:
            raise CipherConfigError("state dimensions must be >= 1")
        if self.e not in (4, 8):
            raise CipherConfigError("word size must be 4 or 8 bits")
        if not is_irreducible(self.modulus, self.e):
            raise CipherConfigError(
                f"modulus {self.modulus:#x} is not an irreducible degree-{self.e} polynomial"
            )
        if len(self.mix_matrix) != self.r or any(len(row) != self.r for row in self.mix_matrix):
            raise CipherConfigError("mix matrix must be r x r")
        if any(not 0 <= v < 1 << self.e for row in self.mix_matrix for v in row):
            raise CipherConfigError("mix matrix entries must be field elements")
        if matrix_inverse([list(row) for row in self.mix_matrix], self.modulus, self.e) is None:
            raise CipherConfigError("mix matrix is singular over GF(2^e)")
        if len(self.affine_matrix) != self.e or not bit_matrix_invertible(self.affine_matrix, self.e):
            raise CipherConfigError("affine matrix must be an invertible e x e GF(2) matrix")
        if not 0 <= self.affine_const < 1 << self.e:
            raise CipherConfigError("affine constant out of range")
        if not 0 < self.rcon_base < 1 << self.e:
            raise CipherConfigError("rcon base must be a nonzero field element")

    @property
    def block_words(self) -> int:
        return self.r * self.c

    @property
    def block_bits(self) -> int:
        return self.r * self.c * self.e

    def mul(self, a: int, b: int) -> int:
        return gf_mul(a, b, self.modulus, self.e)

    def inv(self, a: int) -> int:
        return gf_inv(a, self.modulus, self.e)


def default_params(n: int, r: int = 4, c: int = 4, e: int = 4) -> CipherParams:
    if r not in MIX_FIRST_ROW:
        raise CipherConfigError(f"no default mix matrix for r={r}; supply one via config")
    seed = DEFAULT_AFFINE_SEED[e]
    return CipherParams(
        n=n,
        r=r,
        c=c,
        e=e,
        modulus=DEFAULT_MODULUS[e],
        mix_matrix=circulant(MIX_FIRST_ROW[r]),
        affine_matrix=tuple(_rotl(seed, i, e) for i in range(e)),
        affine_const=DEFAULT_AFFINE_CONST[e],
    )


def params_from_config(n: int, r: int, c: int, e: int, overrides: dict | None = None) -> CipherParams:
    """Build params applying overrides from a config mapping.

    Recognized keys: modulus, mix_matrix (list of rows), affine_matrix
    (list of row masks), affine_const, rcon_base. Integers may be given
    as ints or hex strings.
    """
    overrides = dict(overrides or {})
    if e not in (4, 8):
        raise CipherConfigError("word size must be 4 or 8 bits")

    def as_int(v):
        if isinstance(v, str):
            return int(v, 16)
        if isinstance(v, int):
            return v
        raise CipherConfigError(f"expected integer or hex string, got {v!r}")

    known = {"modulus", "mix_matrix", "affine_matrix", "affine_const", "rcon_base"}
    unknown = set(overrides) - known
    if unknown:
        raise CipherConfigError(f"unknown cipher config keys: {sorted(unknown)}")

    if "mix_matrix" in overrides:
        mix = tuple(tuple(as_int(v) for v in row) for row in overrides["mix_matrix"])
    elif r in MIX_FIRST_ROW:
        mix = circulant(MIX_FIRST_ROW[r])
    else:
        raise CipherConfigError(f"no default mix matrix for r={r}; supply one via config")
    if "affine_matrix" in overrides:
        affine = tuple(as_int(v) for v in overrides["affine_matrix"])
    else:
        seed = DEFAULT_AFFINE_SEED[e]
        affine = tuple(_rotl(seed, i, e) for i in range(e))
    return CipherParams(
        n=n,
        r=r,
        c=c,
        e=e,
        modulus=as_int(overrides.get("modulus", DEFAULT_MODULUS[e])),
        mix_matrix=mix,
        affine_matrix=affine,
        affine_const=as_int(overrides.get("affine_const", DEFAULT_AFFINE_CONST[e])),
        rcon_base=as_int(overrides.get("rcon_base", 2)),
    )


def load_cipher_config(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise CipherConfigError("cipher config must be a JSON object")
    return data


State = tuple[int, ...]


def parse_hex_state(text: str, params: CipherParams) -> State:
    """Parse a lowercase hex string into a State (column-major word order)."""
    digits_per_word = params.e // 4
    expected = params.block_words * digits_per_word
    text = text.strip().lower()
    if len(text) != expected:
        raise ValueError(f"expected {expected} hex digits, got {len(text)}")
    try:
        words = tuple(
            int(text[w * digits_per_word : (w + 1) * digits_per_word], 16)
            for w in range(params.block_words)
        )
    except ValueError:
        raise ValueError(f"invalid hex string {text!r}") from None
    return words


def format_hex_state(state: State, params: CipherParams) -> str:
    digits_per_word = params.e // 4
    return "".join(format(w, f"0{digits_per_word}x") for w in state)


def state_from_bytes(raw: bytes, params: CipherParams) -> State:
    """Pack bytes into a State; block_bits must be a multiple of 8."""
    if params.block_bits % 8:
        raise ValueError("byte input needs a byte-aligned block size")
    if len(raw) != params.block_bits // 8:
        raise ValueError(f"expected {params.block_bits // 8} bytes, got {len(raw)}")
    value = int.from_bytes(raw, "big")
    words = []
    for w in range(params.block_words):
        shift = params.block_bits - (w + 1) * params.e
        words.append((value >> shift) & ((1 << params.e) - 1))
    return tuple(words)


@dataclass(frozen=True)
class KeyMaterial:
    secret_key: State
    round_keys: tuple[State, ...]


@dataclass(frozen=True)
class EncryptionTrace:
    """Per-round S-box inputs/outputs recorded during encryption.

    sbox_inputs[i-1] is x_i, sbox_outputs[i-1] is y_i, for rounds 1..n.
    """

    plaintext: State
    sbox_inputs: tuple[State, ...]
    sbox_outputs: tuple[State, ...]
    ciphertext: State


def build_sbox(params: CipherParams) -> tuple[int, ...]:
    """S[x] = affine(inverse(x)): a bijection on e-bit words."""
    table = tuple(
        apply_bit_matrix(params.affine_matrix, params.inv(x)) ^ params.affine_const
        for x in range(1 << params.e)
    )
    return table


def invert_table(table: tuple[int, ...]) -> tuple[int, ...]:
    out = [0] * len(table)
    for x, y in enumerate(table):
        out[y] = x
    return tuple(out)


def _column(state: State, params: CipherParams, j: int) -> tuple[int, ...]:
    return tuple(state[j * params.r + a] for a in range(params.r))


def expand_key(secret_key: State, params: CipherParams) -> KeyMaterial:
    """AES-style schedule producing n+1 round keys, round key 0 = secret key."""
    if len(secret_key) != params.block_words:
        raise ValueError("secret key has wrong word count")
    sbox = build_sbox(params)
    r, c = params.r, params.c
    keys = [tuple(secret_key)]
    rcon = 1
    for _ in range(params.n):
        prev = keys[-1]
        cols = [list(_column(prev, params, j)) for j in range(c)]
        last = cols[c - 1]
        rotated = [last[(a + 1) % r] for a in range(r)]
        new_cols = []
        col0 = [cols[0][a] ^ sbox[rotated[a]] ^ (rcon if a == 0 else 0) for a in range(r)]
        new_cols.append(col0)
        for j in range(1, c):
            new_cols.append([cols[j][a] ^ new_cols[j - 1][a] for a in range(r)])
        keys.append(tuple(new_cols[j][a] for j in range(c) for a in range(r)))
        rcon = params.mul(rcon, params.rcon_base)
    return KeyMaterial(secret_key=tuple(secret_key), round_keys=tuple(keys))


def shift_rows(state: State, params: CipherParams) -> State:
    """Row a rotates left by a positions."""
    r, c = params.r, params.c
    return tuple(state[((j + a) % c) * r + a] for j in range(c) for a in range(r))


def inv_shift_rows(state: State, params: CipherParams) -> State:
    r, c = params.r, params.c
    return tuple(state[((j - a) % c) * r + a] for j in range(c) for a in range(r))


def mix_columns(state: State, params: CipherParams, matrix=None) -> State:
    r, c = params.r, params.c
    m = matrix if matrix is not None else params.mix_matrix
    out = []
    for j in range(c):
        col = _column(state, params, j)
        for a in range(r):
            acc = 0
            for b in range(r):
                acc ^= params.mul(m[a][b], col[b])
            out.append(acc)
    return tuple(out)


def xor_state(a: State, b: State) -> State:
    return tuple(x ^ y for x, y in zip(a, b))


def encrypt_block(plaintext: State, key: KeyMaterial, params: CipherParams) -> EncryptionTrace:
    """n rounds of AddRoundKey, SubWords, ShiftRows, MixColumns, then a
    final AddRoundKey; records every S-box input/output state."""
    sbox = build_sbox(params)
    state = tuple(plaintext)
    xs, ys = [], []
    for i in range(params.n):
        state = xor_state(state, key.round_keys[i])
        xs.append(state)
        state = tuple(sbox[w] for w in state)
        ys.append(state)
        state = mix_columns(shift_rows(state, params), params)
    ciphertext = xor_state(state, key.round_keys[params.n])
    return EncryptionTrace(
        plaintext=tuple(plaintext),
        sbox_inputs=tuple(xs),
        sbox_outputs=tuple(ys),
        ciphertext=ciphertext,
    )


def decrypt_block(ciphertext: State, key: KeyMaterial, params: CipherParams) -> State:
    inv_sbox = invert_table(build_sbox(params))
    inv_mix = matrix_inverse([list(row) for row in params.mix_matrix], params.modulus, params.e)
    state = xor_state(ciphertext, key.round_keys[params.n])
    for i in range(params.n, 0, -1):
        state = inv_shift_rows(mix_columns(state, params, inv_mix), params)
        state = tuple(inv_sbox[w] for w in state)
        state = xor_state(state, key.round_keys[i - 1])
    return state
