"""Compile known-plaintext attacks on SR(n,r,c,e) into CNF.

The encoding introduces no auxiliary variables: variables are exactly the
round-key bits plus, per text pair, the S-box input/output state bits of
rounds 2..n and 1..n respectively (x_1 and the final linear layer are
folded into plaintext/ciphertext constants). S-box applications become
banned-combination clauses, GF(2)-linear equations become plain-CNF XOR
expansions.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .cipher import (
    CipherParams,
    EncryptionTrace,
    State,
    build_sbox,
    encrypt_block,
    expand_key,
    format_hex_state,
    gf_pow,
    invert_table,
)
from .cnf import ClauseSet, CnfInstance, VarLayout
from .gf import matrix_inverse, mul_bit_rows

GENERATOR_VERSION = "srsat-1"

DEFAULT_XOR_MAX_ARITY = 16


class EncodingError(ValueError):
    pass


def num_vars(n: int, r: int, c: int, e: int, p: int) -> int:
    """Variable count of a p-pair instance: b*(n+1) + p*b*(2n-1), b = r*c*e."""
    if n < 1 or p < 1:
        raise EncodingError("need n >= 1 and p >= 1")
    b = r * c * e
    return b * (n + 1) + p * b * (2 * n - 1)


@dataclass(frozen=True)
class InstanceSpec:
    """A concrete attack: cipher parameters, secret key, and text pairs."""

    params: CipherParams
    key_token: str
    secret_key: State
    pairs: tuple[tuple[State, State], ...]

    @property
    def p(self) -> int:
        return len(self.pairs)

    @property
    def token(self) -> str:
        return f"{self.params.n}-{self.key_token}-{self.p}"

    def layout(self) -> VarLayout:
        pr = self.params
        return VarLayout(n=pr.n, r=pr.r, c=pr.c, e=pr.e, p=self.p)


def make_instance_spec(
    params: CipherParams,
    secret_key: State,
    plaintexts,
    key_token: str = "key",
) -> InstanceSpec:
    plaintexts = [tuple(pt) for pt in plaintexts]
    if not plaintexts:
        raise EncodingError("need at least one plaintext")
    if len(set(plaintexts)) != len(plaintexts):
        raise EncodingError("plaintexts must be distinct")
    key = expand_key(secret_key, params)
    pairs = tuple((pt, encrypt_block(pt, key, params).ciphertext) for pt in plaintexts)
    return InstanceSpec(params=params, key_token=key_token, secret_key=tuple(secret_key), pairs=pairs)


def sbox_relation_clauses(sbox, in_lits, out_lits) -> list[list[int]]:
    """Ban every (input, output) combination the table does not map.

    in_lits entries are literals, or bools standing for constant bits
    (constants shrink the banned set instead of adding variables).
    Negative literals fold an XOR-with-1 into the relation.
    """
    e = len(out_lits)
    if len(in_lits) != e:
        raise EncodingError("input/output arity mismatch")
    if e > 8:
        raise EncodingError("refusing S-box relation for e > 8 (table blow-up)")
    if len(sbox) != 1 << e:
        raise EncodingError("S-box size does not match arity")
    clauses = []
    var_positions = [(j, lit) for j, lit in enumerate(in_lits) if not isinstance(lit, bool)]
    const_mask = 0
    const_val = 0
    for j, lit in enumerate(in_lits):
        if isinstance(lit, bool):
            const_mask |= 1 << j
            if lit:
                const_val |= 1 << j
    for x in range(1 << e):
        if (x & const_mask) != const_val:
            continue
        sx = sbox[x]
        head = [(-lit if (x >> j) & 1 else lit) for j, lit in var_positions]
        for y in range(1 << e):
            if y == sx:
                continue
            clauses.append(head + [(-lit if (y >> j) & 1 else lit) for j, lit in enumerate(out_lits)])
    return clauses


def coordinate_clauses(table, in_lits, out_lits) -> list[list[int]]:
    """Implied per-bit form of a word relation out = table[in].

    For every input value and output bit, one clause forces that bit.
    Redundant next to the banned-combination relation but much stronger
    under unit propagation: each output bit follows as soon as the input
    word is assigned. Emits e * 2^e clauses of e+1 literals.
    """
    e = len(in_lits)
    clauses = []
    for v in range(1 << e):
        head = [(-lit if (v >> j) & 1 else lit) for j, lit in enumerate(in_lits)]
        tv = table[v]
        for t, out in enumerate(out_lits):
            clauses.append(head + [out if (tv >> t) & 1 else -out])
    return clauses


def _schedule_coordinate_clauses(sbox, u_lits, v_lits, w_lits, rc: int) -> list[list[int]]:
    """Implied per-bit form of w = v XOR sbox[u] XOR rc.

    Handles u/v variable overlap (c=1 schedules) by dropping duplicate
    literals and skipping tautologies.
    """
    e = len(u_lits)
    clauses = []
    for uval in range(1 << e):
        head = [(-lit if (uval >> j) & 1 else lit) for j, lit in enumerate(u_lits)]
        head_vars = {abs(l): l for l in head}
        f = sbox[uval] ^ rc
        for t in range(e):
            fbit = (f >> t) & 1
            for a in (0, 1):
                v_lit = -v_lits[t] if a else v_lits[t]
                b = a ^ fbit
                w_lit = w_lits[t] if b else -w_lits[t]
                clause = list(head)
                skip = False
                for lit in (v_lit, w_lit):
                    prev = head_vars.get(abs(lit))
                    if prev is None:
                        clause.append(lit)
                    elif prev == -lit:
                        skip = True  # tautology: combination cannot occur
                        break
                if not skip:
                    clauses.append(clause)
    return clauses


@lru_cache(maxsize=64)
def _parity_masks(k: int, banned_parity: int) -> tuple[int, ...]:
    """Bit masks of the 2^(k-1) assignments whose parity is banned."""
    return tuple(m for m in range(1 << k) if bin(m).count("1") & 1 == banned_parity)


def xor_clause_expansion(lits, const_bit: int, k_max: int = DEFAULT_XOR_MAX_ARITY) -> list[list[int]]:
    """2^(k-1) clauses forcing XOR(lits) = const_bit; no auxiliaries."""
    k = len(lits)
    if k < 1:
        raise EncodingError("empty XOR equation")
    if k > k_max:
        raise EncodingError(f"XOR arity {k} exceeds limit {k_max}")
    if len({abs(l) for l in lits}) != k:
        raise EncodingError("duplicate variable in XOR equation")
    # Fold literal signs into the constant so patterns apply to plain vars.
    const = const_bit & 1
    vs = []
    for lit in lits:
        if lit < 0:
            const ^= 1
            vs.append(-lit)
        else:
            vs.append(lit)
    banned = _parity_masks(k, const ^ 1)
    rng = range(k)
    return [[(-vs[i] if (m >> i) & 1 else vs[i]) for i in rng] for m in banned]


def _linear_bit_deps(params: CipherParams):
    """Forward bit dependencies of MixColumns(ShiftRows(state)).

    deps[w_out][t] lists (w_in, bit) pairs whose XOR is bit t of output
    word w_out (words in column-major order).
    """
    r, c, e = params.r, params.c, params.e
    deps = {}
    coeff_rows = {}
    for row in params.mix_matrix:
        for m in row:
            if m not in coeff_rows:
                coeff_rows[m] = mul_bit_rows(m, params.modulus, params.e)
    for j in range(c):
        for a in range(r):
            w_out = j * r + a
            for t in range(e):
                acc = []
                for b in range(r):
                    w_in = ((j + b) % c) * r + b
                    mask = coeff_rows[params.mix_matrix[a][b]][t]
                    for jj in range(e):
                        if (mask >> jj) & 1:
                            acc.append((w_in, jj))
                deps[(w_out, t)] = tuple(acc)
    return deps


def _inverse_linear_bit_deps(params: CipherParams):
    """Bit dependencies of InvShiftRows(InvMixColumns(state))."""
    r, c, e = params.r, params.c, params.e
    inv = matrix_inverse([list(row) for row in params.mix_matrix], params.modulus, params.e)
    coeff_rows = {}
    for row in inv:
        for m in row:
            if m not in coeff_rows:
                coeff_rows[m] = mul_bit_rows(m, params.modulus, params.e)
    deps = {}
    for j in range(c):
        for b in range(r):
            w_out = j * r + b  # word of the pre-linear state (S-box output side)
            src_col = (j - b) % c
            for t in range(e):
                acc = []
                for a in range(r):
                    w_in = src_col * r + a
                    mask = coeff_rows[inv[b][a]][t]
                    for jj in range(e):
                        if (mask >> jj) & 1:
                            acc.append((w_in, jj))
                deps[(w_out, t)] = tuple(acc)
    return deps


def _rcon_sequence(params: CipherParams) -> list[int]:
    return [gf_pow(params.rcon_base, i, params.modulus, params.e) for i in range(params.n)]


def _schedule_relation_clauses(sbox, u_vars, v_vars, w_vars, rc: int, e: int) -> list[list[int]]:
    """Ban assignments violating w = v XOR sbox[u] XOR rc.

    Handles overlapping variable sets (c=1 schedules reuse words) by
    enumerating over the distinct variables only.
    """
    ordered = []
    seen = {}
    for v in (*u_vars, *v_vars, *w_vars):
        if v not in seen:
            seen[v] = len(ordered)
            ordered.append(v)
    k = len(ordered)
    u_pos = [seen[v] for v in u_vars]
    v_pos = [seen[v] for v in v_vars]
    w_pos = [seen[v] for v in w_vars]
    clauses = []
    for m in range(1 << k):
        u = sum(((m >> u_pos[j]) & 1) << j for j in range(e))
        v = sum(((m >> v_pos[j]) & 1) << j for j in range(e))
        w = sum(((m >> w_pos[j]) & 1) << j for j in range(e))
        if w != v ^ sbox[u] ^ rc:
            clauses.append([(-ordered[i] if (m >> i) & 1 else ordered[i]) for i in range(k)])
    return clauses


def encode_key_schedule(spec: InstanceSpec, layout: VarLayout, redundant: bool = True) -> list[list[int]]:
    """Clauses tying all n+1 round keys together; emitted once per instance."""
    params = spec.params
    r, c, e = params.r, params.c, params.e
    sbox = build_sbox(params)
    rcons = _rcon_sequence(params)
    out = []
    for step in range(params.n):
        for a in range(r):
            u_word = (c - 1) * r + (a + 1) % r
            u_vars = [layout.key_var(step, u_word, j) for j in range(e)]
            v_vars = [layout.key_var(step, a, j) for j in range(e)]
            w_vars = [layout.key_var(step + 1, a, j) for j in range(e)]
            rc = rcons[step] if a == 0 else 0
            out.extend(_schedule_relation_clauses(sbox, u_vars, v_vars, w_vars, rc, e))
            if redundant:
                out.extend(_schedule_coordinate_clauses(sbox, u_vars, v_vars, w_vars, rc))
        for j in range(1, c):
            for a in range(r):
                word = j * r + a
                prev_word = (j - 1) * r + a
                for t in range(e):
                    out.extend(
                        xor_clause_expansion(
                            [
                                layout.key_var(step + 1, word, t),
                                layout.key_var(step, word, t),
                                layout.key_var(step + 1, prev_word, t),
                            ],
                            0,
                        )
                    )
    return out


def _pair_clauses(spec: InstanceSpec, layout: VarLayout, pair_idx: int, sbox, inv_sbox, fwd_deps, bwd_deps, k_max: int):
    """All clauses contributed by one plaintext/ciphertext pair."""
    params = spec.params
    n, e = params.n, params.e
    words = params.block_words
    pt, ct = spec.pairs[pair_idx]
    redundant = bwd_deps is not None
    out = []

    # Round 1: S-box over round-key-0 bits with plaintext folded as polarity.
    for w in range(words):
        in_lits = [
            -layout.key_var(0, w, j) if (pt[w] >> j) & 1 else layout.key_var(0, w, j)
            for j in range(e)
        ]
        out_lits = [layout.y_var(pair_idx, 1, w, j) for j in range(e)]
        out.extend(sbox_relation_clauses(sbox, in_lits, out_lits))
        if redundant:
            out.extend(coordinate_clauses(sbox, in_lits, out_lits))
            out.extend(coordinate_clauses(inv_sbox, out_lits, in_lits))

    # Rounds 2..n: S-box between x_i and y_i state variables.
    for i in range(2, n + 1):
        for w in range(words):
            in_lits = [layout.x_var(pair_idx, i, w, j) for j in range(e)]
            out_lits = [layout.y_var(pair_idx, i, w, j) for j in range(e)]
            out.extend(sbox_relation_clauses(sbox, in_lits, out_lits))
            if redundant:
                out.extend(coordinate_clauses(sbox, in_lits, out_lits))
                out.extend(coordinate_clauses(inv_sbox, out_lits, in_lits))

    # Linear layer between rounds: x_{i+1} = Mix(Shift(y_i)) ^ k_i.
    for i in range(1, n):
        for w in range(words):
            for t in range(e):
                lits = [layout.x_var(pair_idx, i + 1, w, t), layout.key_var(i, w, t)]
                lits += [layout.y_var(pair_idx, i, wi, j) for wi, j in fwd_deps[(w, t)]]
                out.extend(xor_clause_expansion(lits, 0, k_max))

    # Final round, forward: ciphertext constants absorb the output side.
    forward_final_sigs = set()
    for w in range(words):
        for t in range(e):
            lits = [layout.key_var(n, w, t)]
            lits += [layout.y_var(pair_idx, n, wi, j) for wi, j in fwd_deps[(w, t)]]
            const = (ct[w] >> t) & 1
            forward_final_sigs.add((frozenset(lits), const))
            out.extend(xor_clause_expansion(lits, const, k_max))

    # Final round, backward: y_n = InvShift(InvMix(ct ^ k_n)), ciphertext
    # folded into the constant. Redundant but implied; strengthens
    # propagation from the ciphertext side (skipped where it would merely
    # restate a forward equation).
    if bwd_deps is not None:
        for w in range(words):
            for t in range(e):
                lits = [layout.y_var(pair_idx, n, w, t)]
                const = 0
                for wi, j in bwd_deps[(w, t)]:
                    lits.append(layout.key_var(n, wi, j))
                    const ^= (ct[wi] >> j) & 1
                if (frozenset(lits), const) in forward_final_sigs:
                    continue
                out.extend(xor_clause_expansion(lits, const, k_max))
    return out


def encode_rounds(
    spec: InstanceSpec,
    layout: VarLayout,
    redundant: bool = True,
    k_max: int = DEFAULT_XOR_MAX_ARITY,
) -> list[list[int]]:
    """Per-pair round clauses for all pairs, in pair order."""
    sbox = build_sbox(spec.params)
    inv_sbox = invert_table(sbox)
    fwd = _linear_bit_deps(spec.params)
    bwd = _inverse_linear_bit_deps(spec.params) if redundant else None
    out = []
    for q in range(spec.p):
        out.extend(_pair_clauses(spec, layout, q, sbox, inv_sbox, fwd, bwd, k_max))
    return out


def generate_instance(
    params: CipherParams,
    secret_key: State,
    plaintexts,
    key_token: str = "key",
    redundant: bool = True,
    minimize: bool = False,
    k_max: int = DEFAULT_XOR_MAX_ARITY,
) -> CnfInstance:
    """Build the full CNF instance for a known-plaintext attack.

    Deterministic: the same inputs always produce the identical clause
    sequence. redundant (default on) adds implied propagation-strength
    clauses: per-bit S-box coordinate functions in both directions and
    the ciphertext-side inverse linear layer. minimize merges clauses
    differing in one literal (default off, changes counts).
    """
    spec = make_instance_spec(params, secret_key, plaintexts, key_token)
    layout = spec.layout()
    clauses = ClauseSet()
    sbox = build_sbox(params)
    inv_sbox = invert_table(sbox)
    fwd = _linear_bit_deps(params)
    bwd = _inverse_linear_bit_deps(params) if redundant else None

    schedule = encode_key_schedule(spec, layout, redundant=redundant)
    if minimize:
        schedule = minimize_clauses(schedule)
    clauses.extend(schedule)
    for q in range(spec.p):
        block = _pair_clauses(spec, layout, q, sbox, inv_sbox, fwd, bwd, k_max)
        if minimize:
            block = minimize_clauses(block)
        clauses.extend(block)

    n_clauses = len(clauses)
    meta = {
        "token": spec.token,
        "rounds": params.n,
        "key_token": key_token,
        "pairs": spec.p,
        "variables": layout.num_vars,
        "clauses": n_clauses,
        "density": round(n_clauses / layout.num_vars, 4),
        "generator": GENERATOR_VERSION,
        "redundant": redundant,
        "minimize": minimize,
    }
    return CnfInstance(clauses=clauses, num_vars=layout.num_vars, layout=layout, meta=meta)


def witness_assignment(spec: InstanceSpec, layout: VarLayout) -> list[int]:
    """Truth assignment induced by the true key: index v holds bit of var v."""
    params = spec.params
    e = params.e
    assign = [0] * (layout.num_vars + 1)
    key = expand_key(spec.secret_key, params)
    for i, rk in enumerate(key.round_keys):
        for w, word in enumerate(rk):
            for j in range(e):
                assign[layout.key_var(i, w, j)] = (word >> j) & 1
    for q, (pt, ct) in enumerate(spec.pairs):
        trace = encrypt_block(pt, key, params)
        if trace.ciphertext != ct:
            raise EncodingError("pair ciphertext does not match the secret key")
        for i in range(1, params.n + 1):
            for w, word in enumerate(trace.sbox_outputs[i - 1]):
                for j in range(e):
                    assign[layout.y_var(q, i, w, j)] = (word >> j) & 1
            if i >= 2:
                for w, word in enumerate(trace.sbox_inputs[i - 1]):
                    for j in range(e):
                        assign[layout.x_var(q, i, w, j)] = (word >> j) & 1
    return assign


def check_assignment(cnf: CnfInstance, assignment) -> tuple[bool, int | None]:
    """True iff every clause is satisfied; else (False, first falsified index)."""
    if len(assignment) < cnf.num_vars + 1:
        raise EncodingError(f"assignment must cover all {cnf.num_vars} variables")
    idx = 0
    sat = False
    for lit in cnf.clauses.raw:
        if lit == 0:
            if not sat:
                return False, idx
            sat = False
            idx += 1
        elif not sat:
            if lit > 0:
                if assignment[lit]:
                    sat = True
            elif not assignment[-lit]:
                sat = True
    return True, None


def decode_key_bits(assignment, layout: VarLayout, params: CipherParams) -> State:
    """Round-key-0 slice of an assignment, as a State."""
    words = []
    for w in range(params.block_words):
        val = 0
        for j in range(params.e):
            if assignment[layout.key_var(0, w, j)]:
                val |= 1 << j
        words.append(val)
    return tuple(words)


def witness_key_hex(spec: InstanceSpec, layout: VarLayout) -> str:
    assign = witness_assignment(spec, layout)
    return format_hex_state(decode_key_bits(assign, layout, spec.params), spec.params)


def minimize_clauses(clauses) -> list[list[int]]:
    """Merge clause pairs differing in exactly one complemented literal.

    Pure resolution-style shrinking; repeated until no bucket merges.
    Intended for small clause sets (kept off by default so counts stay
    reproducible).
    """
    work = [tuple(sorted(cl, key=abs)) for cl in clauses]
    changed = True
    while changed:
        changed = False
        buckets: dict[tuple[int, ...], list[tuple[int, ...]]] = {}
        for cl in work:
            buckets.setdefault(tuple(abs(l) for l in cl), []).append(cl)
        result = []
        for key_vars, group in buckets.items():
            group_set = set(group)
            merged_away = set()
            produced = []
            items = sorted(group_set)
            for cl in items:
                if cl in merged_away:
                    continue
                hit = None
                for i, lit in enumerate(cl):
                    partner = cl[:i] + (-lit,) + cl[i + 1 :]
                    if partner in group_set and partner not in merged_away and partner != cl:
                        hit = (i, partner)
                        break
                if hit is not None:
                    i, partner = hit
                    merged_away.add(cl)
                    merged_away.add(partner)
                    produced.append(cl[:i] + cl[i + 1 :])
                    changed = True
            for cl in items:
                if cl not in merged_away:
                    produced.append(cl)
            result.extend(produced)
        work = result
    return [list(cl) for cl in work]
