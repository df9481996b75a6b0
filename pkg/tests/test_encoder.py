import itertools
import random

import pytest

from srsat.cipher import default_params, expand_key, format_hex_state, parse_hex_state
from srsat.cnf import VarLayout
from srsat.encoder import (
    EncodingError,
    check_assignment,
    coordinate_clauses,
    decode_key_bits,
    encode_key_schedule,
    encode_rounds,
    generate_instance,
    make_instance_spec,
    minimize_clauses,
    num_vars,
    sbox_relation_clauses,
    witness_assignment,
    witness_key_hex,
    xor_clause_expansion,
    _linear_bit_deps,
)

from conftest import random_blocks, random_key

# every row of the instance-size table: (rounds, pairs) -> variables
TABLE1_L = {
    (3, 12): 4096,
    (3, 14): 4736,
    (3, 16): 5376,
    (3, 18): 6016,
    (3, 20): 6656,
    (3, 22): 7296,
    (3, 24): 7936,
    (3, 30): 9856,
    (4, 30): 13760,
}


def brute_force_models(nv, clauses):
    models = []
    for bits in itertools.product((0, 1), repeat=nv):
        assign = (None,) + bits
        ok = True
        for cl in clauses:
            if not any((lit > 0) == bool(assign[abs(lit)]) for lit in cl):
                ok = False
                break
        if ok:
            models.append(bits)
    return models


def test_num_vars_matches_table():
    for (n, p), expected in TABLE1_L.items():
        assert num_vars(n, 4, 4, 4, p) == expected


def test_num_vars_matches_layout_grid():
    for n in (1, 2, 3):
        for r, c in ((1, 1), (2, 2), (4, 4)):
            for p in (1, 2, 5):
                layout = VarLayout(n=n, r=r, c=c, e=4, p=p)
                assert layout.num_vars == num_vars(n, r, c, 4, p)


def test_num_vars_preconditions():
    with pytest.raises(EncodingError):
        num_vars(0, 4, 4, 4, 1)
    with pytest.raises(EncodingError):
        num_vars(1, 4, 4, 4, 0)


def test_sbox_relation_count_e4():
    sbox = list(range(16))
    clauses = sbox_relation_clauses(sbox, [1, 2, 3, 4], [5, 6, 7, 8])
    assert len(clauses) == 2**8 - 2**4 == 240
    assert all(len(c) == 8 for c in clauses)
    assert all(len({abs(l) for l in c}) == 8 for c in clauses)


def test_sbox_relation_identity_satisfied_by_equal_words():
    sbox = list(range(16))
    clauses = sbox_relation_clauses(sbox, [1, 2, 3, 4], [5, 6, 7, 8])
    models = brute_force_models(8, clauses)
    assert len(models) == 16
    for bits in models:
        assert bits[0:4] == bits[4:8]


def test_sbox_relation_e2_toy_brute_force():
    toy = [1, 0, 3, 2]
    clauses = sbox_relation_clauses(toy, [1, 2], [3, 4])
    models = brute_force_models(4, clauses)
    assert len(models) == 4
    for bits in models:
        x = bits[0] | (bits[1] << 1)
        y = bits[2] | (bits[3] << 1)
        assert toy[x] == y


def test_sbox_relation_constant_inputs_shrink_banned_set():
    toy = [1, 0, 3, 2]
    clauses = sbox_relation_clauses(toy, [True, False], [3, 4])
    # input fixed to 0b01 = 1 -> output must be toy[1] = 0: three banned outputs
    assert len(clauses) == 3
    models = brute_force_models(4, clauses)
    assert all(bits[2] == 0 and bits[3] == 0 for bits in models)


def test_sbox_relation_negative_literal_folds_xor():
    toy = [1, 0, 3, 2]
    plain = sbox_relation_clauses(toy, [1, 2], [3, 4])
    folded = sbox_relation_clauses(toy, [-1, 2], [3, 4])
    assert len(folded) == len(plain)
    models = brute_force_models(4, folded)
    for bits in models:
        x = (1 - bits[0]) | (bits[1] << 1)
        assert toy[x] == bits[2] | (bits[3] << 1)


def test_sbox_relation_rejects_oversized():
    with pytest.raises(EncodingError):
        sbox_relation_clauses(list(range(512)), list(range(1, 10)), list(range(10, 19)))


def test_xor_expansion_counts_and_semantics():
    assert xor_clause_expansion([7], 1) == [[7]]
    assert xor_clause_expansion([7], 0) == [[-7]]
    two = xor_clause_expansion([1, 2], 1)
    assert len(two) == 2
    assert brute_force_models(2, two) == [(0, 1), (1, 0)]
    three = xor_clause_expansion([1, 2, 3], 0)
    assert len(three) == 4
    assert all(sum(b) % 2 == 0 for b in brute_force_models(3, three))


def test_xor_expansion_negative_literals():
    clauses = xor_clause_expansion([-1, 2], 0)
    models = brute_force_models(2, clauses)
    assert len(models) == 2
    for bits in models:
        assert (1 - bits[0]) ^ bits[1] == 0


def test_xor_expansion_arity_guard_and_duplicates():
    with pytest.raises(EncodingError):
        xor_clause_expansion(list(range(1, 18)), 0)
    ok = xor_clause_expansion(list(range(1, 18)), 0, k_max=17)
    assert len(ok) == 2**16
    with pytest.raises(EncodingError):
        xor_clause_expansion([1, -1], 0)
    with pytest.raises(EncodingError):
        xor_clause_expansion([], 0)


def test_coordinate_clauses_are_implied_by_relation():
    toy = [2, 0, 3, 1]
    rel = sbox_relation_clauses(toy, [1, 2], [3, 4])
    coords = coordinate_clauses(toy, [1, 2], [3, 4])
    assert len(coords) == 2 * 4  # e * 2^e
    rel_models = set(brute_force_models(4, rel))
    both_models = set(brute_force_models(4, rel + coords))
    assert rel_models == both_models


def test_linear_arity_bound_for_default_layer(params_3444):
    deps = _linear_bit_deps(params_3444)
    worst = max(len(v) for v in deps.values())
    # +2 for the key bit and the next-state bit
    assert worst + 2 <= 11


def test_key_schedule_clause_counts(params_3444):
    key = random_key(params_3444, 3)
    pts = random_blocks(params_3444, 1, 4)
    spec = make_instance_spec(params_3444, key, pts, "t")
    layout = spec.layout()
    minimal = encode_key_schedule(spec, layout, redundant=False)
    # n=3 steps x r=4 words x 3840 banned + 3 steps x 3 columns x 16 bits x 4
    assert len(minimal) == 3 * 4 * 3840 + 3 * 3 * 16 * 4 == 46656
    lengths = {len(c) for c in minimal}
    assert lengths == {12, 3}


def test_schedule_words_count_per_relation(params_2224):
    key = random_key(params_2224, 3)
    spec = make_instance_spec(params_2224, key, random_blocks(params_2224, 1, 5), "t")
    layout = spec.layout()
    minimal = encode_key_schedule(spec, layout, redundant=False)
    twelve = [c for c in minimal if len(c) == 12]
    assert len(twelve) == 2 * 2 * 3840  # n=2 steps x r=2 rows


def test_witness_satisfies_schedule(params_3444):
    key = random_key(params_3444, 9)
    pts = random_blocks(params_3444, 2, 10)
    spec = make_instance_spec(params_3444, key, pts, "t")
    layout = spec.layout()
    assign = witness_assignment(spec, layout)
    for cl in encode_key_schedule(spec, layout):
        assert any((lit > 0) == bool(assign[abs(lit)]) for lit in cl)


def test_generate_instance_rejects_duplicates(params_3444):
    key = random_key(params_3444, 1)
    pt = random_blocks(params_3444, 1, 2)[0]
    with pytest.raises(EncodingError):
        generate_instance(params_3444, key, [pt, pt], "t")


def test_witness_satisfies_generated_instance(params_2224):
    key = random_key(params_2224, 21)
    pts = random_blocks(params_2224, 3, 22)
    inst = generate_instance(params_2224, key, pts, "t")
    spec = make_instance_spec(params_2224, key, pts, "t")
    assign = witness_assignment(spec, inst.layout)
    ok, falsified = check_assignment(inst, assign)
    assert ok and falsified is None


def test_flipped_key_bit_falsifies_some_clause(params_2224):
    key = random_key(params_2224, 31)
    pts = random_blocks(params_2224, 3, 32)
    inst = generate_instance(params_2224, key, pts, "t")
    spec = make_instance_spec(params_2224, key, pts, "t")
    base = witness_assignment(spec, inst.layout)
    for var in inst.layout.key_bit_vars(0):
        assign = list(base)
        assign[var] ^= 1
        ok, falsified = check_assignment(inst, assign)
        assert not ok and falsified is not None


def test_witness_key_round_trip(params_3444):
    key = parse_hex_state("0123456789abcdef", params_3444)
    pts = random_blocks(params_3444, 2, 7)
    spec = make_instance_spec(params_3444, key, pts, "k3")
    assert witness_key_hex(spec, spec.layout()) == "0123456789abcdef"


def test_token_format(params_3444):
    key = random_key(params_3444, 2)
    spec = make_instance_spec(params_3444, key, random_blocks(params_3444, 22, 3), "k3")
    assert spec.token == "3-k3-22"


def test_plaintext_constants_only_flip_polarities(params_2224):
    key = random_key(params_2224, 41)
    pts_a = random_blocks(params_2224, 2, 42)
    pts_b = random_blocks(params_2224, 2, 43)
    assert pts_a != pts_b
    inst_a = generate_instance(params_2224, key, pts_a, "t")
    inst_b = generate_instance(params_2224, key, pts_b, "t")
    assert inst_a.num_clauses == inst_b.num_clauses
    assert [len(c) for c in inst_a.clauses] == [len(c) for c in inst_b.clauses]


def test_regeneration_is_byte_identical(params_2224):
    key = random_key(params_2224, 51)
    pts = random_blocks(params_2224, 2, 52)
    a = generate_instance(params_2224, key, pts, "t")
    b = generate_instance(params_2224, key, pts, "t")
    assert a.clauses == b.clauses
    assert a.meta == b.meta


def test_variables_independent_of_encoding_options(params_2224):
    key = random_key(params_2224, 61)
    pts = random_blocks(params_2224, 2, 62)
    full = generate_instance(params_2224, key, pts, "t")
    minimal = generate_instance(params_2224, key, pts, "t", redundant=False)
    assert full.num_vars == minimal.num_vars == num_vars(2, 2, 2, 4, 2)
    assert full.num_clauses > minimal.num_clauses
    assert full.clauses.max_var() <= full.num_vars
    assert minimal.clauses.max_var() <= minimal.num_vars


def test_brute_force_uniqueness_sr1114(params_1114):
    key = (5,)
    pts = [(1,), (2,)]
    inst = generate_instance(params_1114, key, pts, "t")
    assert inst.num_vars == num_vars(1, 1, 1, 4, 2) == 16
    models = brute_force_models(inst.num_vars, inst.clauses.to_lists())
    assert len(models) >= 1
    layout = inst.layout
    for bits in models:
        assign = (0,) + bits
        assert decode_key_bits(assign, layout, params_1114) == key


def test_model_count_one_sr2114_p3():
    from srsat.harness import enumerate_internal

    params = default_params(2, 1, 1, 4)
    key = (9,)
    pts = [(1,), (7,), (12,)]
    inst = generate_instance(params, key, pts, "t")
    models = enumerate_internal(inst)
    assert len(models) == 1
    assign = [0] * (inst.num_vars + 1)
    for lit in models[0]:
        if lit > 0:
            assign[lit] = 1
    assert decode_key_bits(assign, inst.layout, params) == key


def test_minimize_clauses_preserves_models():
    toy = [1, 0, 3, 2]
    rel = sbox_relation_clauses(toy, [1, 2], [3, 4])
    merged = minimize_clauses(rel)
    assert len(merged) < len(rel)
    assert set(brute_force_models(4, merged)) == set(brute_force_models(4, rel))


def test_minimized_instance_keeps_witness(params_1114):
    key = (3,)
    pts = [(1,), (4,)]
    inst = generate_instance(params_1114, key, pts, "t", minimize=True)
    spec = make_instance_spec(params_1114, key, pts, "t")
    assign = witness_assignment(spec, inst.layout)
    ok, _ = check_assignment(inst, assign)
    assert ok


def test_check_assignment_requires_full_coverage(params_1114):
    key = (3,)
    inst = generate_instance(params_1114, key, [(1,)], "t")
    with pytest.raises(EncodingError):
        check_assignment(inst, [0] * 3)


def test_density_in_band_small_3round(params_3444):
    key = random_key(params_3444, 71)
    pts = random_blocks(params_3444, 2, 72)
    inst = generate_instance(params_3444, key, pts, "t")
    assert 200 <= inst.density <= 400
