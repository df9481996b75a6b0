import random

import pytest

from srsat.cipher import (
    CipherConfigError,
    CipherParams,
    build_sbox,
    circulant,
    decrypt_block,
    default_params,
    encrypt_block,
    expand_key,
    format_hex_state,
    invert_table,
    mix_columns,
    params_from_config,
    parse_hex_state,
    state_from_bytes,
)

from conftest import random_blocks, random_key

# The widely used 4-bit small-scale AES S-box; our default affine layer
# (rows rotl4(0x7, i), constant 0x6) reproduces it from field inversion.
SBOX_E4 = (0x6, 0xB, 0x5, 0x4, 0x2, 0xE, 0x7, 0xA, 0x9, 0xD, 0xF, 0xC, 0x3, 0x1, 0x0, 0x8)

# frozen from an independent straight-line schedule oracle (k3, 3 rounds)
K3_ROUND_KEYS = (
    "0123456789abcdef",
    "01a044c7cd6c0083",
    "48e60c21c14dc1ce",
    "bbe5b7c47689b747",
)

# frozen from an independent straight-line encryption oracle
ABCDEFGH_CT = "16fe756a9250d785"


def test_default_sbox_matches_published_table():
    params = default_params(3, 4, 4, 4)
    assert build_sbox(params) == SBOX_E4


def test_sbox_is_bijection_for_both_word_sizes():
    for e in (4, 8):
        params = default_params(2, 4, 4, e)
        table = build_sbox(params)
        assert sorted(table) == list(range(1 << e))
        inv = invert_table(table)
        assert all(inv[table[x]] == x for x in range(1 << e))


def test_sbox_identity_affine_degenerates_to_inversion():
    params = params_from_config(
        2, 4, 4, 4, {"affine_matrix": [0b0001, 0b0010, 0b0100, 0b1000], "affine_const": 0}
    )
    table = build_sbox(params)
    assert all(table[x] == params.inv(x) for x in range(16))


def test_e8_sbox_matches_aes():
    params = default_params(1, 4, 4, 8)
    table = build_sbox(params)
    assert table[0x00] == 0x63
    assert table[0x01] == 0x7C
    assert table[0x53] == 0xED


def test_hex_parsing_k4_alternates():
    params = default_params(3, 4, 4, 4)
    state = parse_hex_state("0101010101010101", params)
    assert state == (0, 1) * 8


def test_hex_round_trip_and_errors():
    params = default_params(3, 4, 4, 4)
    assert format_hex_state(parse_hex_state("0123456789abcdef", params), params) == "0123456789abcdef"
    with pytest.raises(ValueError):
        parse_hex_state("0123", params)
    with pytest.raises(ValueError):
        parse_hex_state("zz23456789abcdef", params)
    e8 = default_params(1, 2, 2, 8)
    assert format_hex_state(parse_hex_state("00ff17a3", e8), e8) == "00ff17a3"


def test_state_from_bytes_matches_hex():
    params = default_params(3, 4, 4, 4)
    assert state_from_bytes(b"abcdefgh", params) == parse_hex_state(b"abcdefgh".hex(), params)


def test_expand_key_base_case_and_length(params_3444):
    key = random_key(params_3444, 5)
    material = expand_key(key, params_3444)
    assert material.round_keys[0] == key
    assert material.secret_key == key
    assert len(material.round_keys) == params_3444.n + 1


def test_k3_schedule_fixture(params_3444):
    key = parse_hex_state(K3_ROUND_KEYS[0], params_3444)
    material = expand_key(key, params_3444)
    got = tuple(format_hex_state(rk, params_3444) for rk in material.round_keys)
    assert got == K3_ROUND_KEYS


def test_encrypt_fixture_abcdefgh(params_3444):
    key = parse_hex_state("0123456789abcdef", params_3444)
    pt = parse_hex_state(b"abcdefgh".hex(), params_3444)
    trace = encrypt_block(pt, expand_key(key, params_3444), params_3444)
    assert format_hex_state(trace.ciphertext, params_3444) == ABCDEFGH_CT


def test_trace_invariants(params_3444):
    from srsat.cipher import shift_rows, xor_state

    key = random_key(params_3444, 11)
    material = expand_key(key, params_3444)
    pt = random_blocks(params_3444, 1, 12)[0]
    trace = encrypt_block(pt, material, params_3444)
    sbox = build_sbox(params_3444)
    n = params_3444.n
    assert trace.sbox_inputs[0] == xor_state(pt, material.round_keys[0])
    for i in range(1, n + 1):
        assert trace.sbox_outputs[i - 1] == tuple(sbox[w] for w in trace.sbox_inputs[i - 1])
        linear = mix_columns(shift_rows(trace.sbox_outputs[i - 1], params_3444), params_3444)
        if i < n:
            assert trace.sbox_inputs[i] == xor_state(linear, material.round_keys[i])
        else:
            assert trace.ciphertext == xor_state(linear, material.round_keys[n])


@pytest.mark.parametrize("n", [1, 2, 4])
@pytest.mark.parametrize("r,c", [(1, 1), (2, 2), (4, 4), (2, 4), (4, 1)])
@pytest.mark.parametrize("e", [4, 8])
def test_round_trip_grid(n, r, c, e):
    params = default_params(n, r, c, e)
    rng = random.Random(n * 100 + r * 10 + c + e)
    for trial in range(6):
        key = tuple(rng.randrange(1 << e) for _ in range(r * c))
        pt = tuple(rng.randrange(1 << e) for _ in range(r * c))
        material = expand_key(key, params)
        ct = encrypt_block(pt, material, params).ciphertext
        assert decrypt_block(ct, material, params) == pt


def test_mix_columns_inverse_identity(params_3444):
    from srsat.gf import matrix_inverse

    inv = matrix_inverse([list(r) for r in params_3444.mix_matrix], params_3444.modulus, 4)
    for block in random_blocks(params_3444, 20, 77):
        mixed = mix_columns(block, params_3444)
        assert mix_columns(mixed, params_3444, inv) == block


def test_params_validation_errors():
    with pytest.raises(CipherConfigError):
        default_params(0, 4, 4, 4)
    with pytest.raises(CipherConfigError):
        params_from_config(1, 4, 4, 5)
    with pytest.raises(CipherConfigError):
        params_from_config(1, 4, 4, 4, {"modulus": 0b10001})  # reducible
    with pytest.raises(CipherConfigError):
        params_from_config(1, 2, 2, 4, {"mix_matrix": [[1, 1], [1, 1]]})  # singular
    with pytest.raises(CipherConfigError):
        params_from_config(1, 4, 4, 4, {"affine_matrix": [1, 1, 4, 8]})
    with pytest.raises(CipherConfigError):
        params_from_config(1, 4, 4, 4, {"unknown_knob": 3})
    with pytest.raises(CipherConfigError):
        params_from_config(1, 3, 3, 4, {"mix_matrix": [[2, 3, 1], [1, 2, 3], [3, 1, 2]]})


def test_config_overrides_change_cipher():
    base = default_params(2, 4, 4, 4)
    override = params_from_config(2, 4, 4, 4, {"modulus": "13", "rcon_base": 3})
    assert override.modulus == 0x13
    key = random_key(base, 4)
    pt = random_blocks(base, 1, 6)[0]
    ct_base = encrypt_block(pt, expand_key(key, base), base).ciphertext
    ct_override = encrypt_block(pt, expand_key(key, override), override).ciphertext
    assert ct_base != ct_override  # different rcon changes the schedule
    assert decrypt_block(ct_override, expand_key(key, override), override) == pt


def test_circulant_shapes():
    assert circulant((2, 3, 1, 1))[1] == (1, 2, 3, 1)
    assert circulant((3, 2)) == ((3, 2), (2, 3))
