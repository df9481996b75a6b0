"""Command-line entry point.

Subcommands: encrypt, decrypt, gen, bench, tune, verify. Exit codes:
0 success, 2 usage error (argparse), 3 invalid input data, 4 operational
failure (solver spawn, I/O), 5 verification failed.
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from . import __version__
from .cipher import (
    CipherConfigError,
    decrypt_block,
    encrypt_block,
    expand_key,
    format_hex_state,
    load_cipher_config,
    params_from_config,
    parse_hex_state,
    state_from_bytes,
)
from .dimacs import (
    DimacsError,
    SolverOutputError,
    parse_solver_output,
    read_dimacs_file,
    write_dimacs_file,
)
from .encoder import EncodingError, generate_instance, make_instance_spec
from .harness import (
    Campaign,
    HarnessError,
    InstanceContext,
    NamedConfig,
    append_records_csv,
    append_records_jsonl,
    builtin_configs,
    extract_key,
    run_campaign,
    run_internal,
    verify_key,
)
from .stats import EmptySampleError, summarize, to_table
from .tuner import (
    PcsError,
    TuningError,
    TuningJournal,
    export_incumbent,
    parse_pcs_file,
    quadratic_surface_tae,
    race,
)

EX_OK = 0
EX_DATA = 3
EX_RUNTIME = 4
EX_VERIFY = 5

KEY_TOKENS = {
    "k3": "0123456789abcdef",
    "k4": "0101010101010101",
    "k6": "b25286f7d3e7b3e1",
    "k6s": "b25286f7d3e7b3e1",
}


def _add_cipher_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("-n", "--rounds", type=int, default=3, help="encryption rounds (default 3)")
    p.add_argument("--rows", type=int, default=4, help="state rows (default 4)")
    p.add_argument("--cols", type=int, default=4, help="state columns (default 4)")
    p.add_argument("--word-bits", type=int, default=4, choices=(4, 8), help="word size in bits")
    p.add_argument("--cipher-config", metavar="JSON", help="JSON file overriding field/layer constants")


def _params(args):
    overrides = load_cipher_config(args.cipher_config) if args.cipher_config else None
    return params_from_config(args.rounds, args.rows, args.cols, args.word_bits, overrides)


def _resolve_key(args, params):
    if getattr(args, "key_token", None):
        token = args.key_token
        if token not in KEY_TOKENS:
            raise ValueError(f"unknown key token {token!r}; known: {sorted(KEY_TOKENS)}")
        return parse_hex_state(KEY_TOKENS[token], params), token
    if not args.key:
        raise ValueError("need --key HEX or --key-token")
    return parse_hex_state(args.key, params), (getattr(args, "token_name", None) or "key")


def cmd_encrypt(args) -> int:
    params = _params(args)
    key = parse_hex_state(args.key, params)
    pt = parse_hex_state(args.plaintext, params)
    trace = encrypt_block(pt, expand_key(key, params), params)
    print(format_hex_state(trace.ciphertext, params))
    return EX_OK


def cmd_decrypt(args) -> int:
    params = _params(args)
    key = parse_hex_state(args.key, params)
    ct = parse_hex_state(args.ciphertext, params)
    pt = decrypt_block(ct, expand_key(key, params), params)
    print(format_hex_state(pt, params))
    return EX_OK


def _gen_plaintexts(args, params, rng):
    sources = sum(1 for s in (args.plaintext, args.text_file, args.random) if s)
    if sources != 1:
        raise ValueError("pick exactly one plaintext source: --plaintext, --text-file, or --random")
    if args.plaintext:
        pts = [parse_hex_state(h, params) for h in args.plaintext]
        if args.pairs and args.pairs != len(pts):
            raise ValueError("--pairs disagrees with the number of --plaintext values")
        return pts
    if not args.pairs:
        raise ValueError("--pairs is required with --text-file/--random sourcing")
    if args.text_file:
        if params.block_bits % 8:
            raise ValueError("text-file sourcing needs a byte-aligned block size")
        with open(args.text_file, "rb") as fh:
            corpus = fh.read()
        width = params.block_bits // 8
        if len(corpus) < width:
            raise ValueError("text file shorter than one block")
        pts: list[tuple[int, ...]] = []
        seen = set()
        attempts = 0
        while len(pts) < args.pairs:
            attempts += 1
            if attempts > 1000 * args.pairs:
                raise ValueError("could not sample enough distinct plaintext windows")
            off = rng.randrange(len(corpus) - width + 1)
            block = state_from_bytes(corpus[off : off + width], params)
            if block not in seen:
                seen.add(block)
                pts.append(block)
        return pts
    # uniform random words
    pts = []
    seen = set()
    while len(pts) < args.pairs:
        block = tuple(rng.randrange(1 << params.e) for _ in range(params.block_words))
        if block not in seen:
            seen.add(block)
            pts.append(block)
    return pts


def cmd_gen(args) -> int:
    params = _params(args)
    key, token_name = _resolve_key(args, params)
    rng = random.Random(args.seed)
    plaintexts = _gen_plaintexts(args, params, rng)
    inst = generate_instance(
        params,
        key,
        plaintexts,
        key_token=token_name,
        redundant=not args.minimal,
        minimize=args.minimize,
    )
    include_key = format_hex_state(key, params) if args.include_key else None
    write_dimacs_file(inst, args.out, include_key=include_key)
    spec = make_instance_spec(params, key, plaintexts, token_name)
    meta = {
        "token": inst.meta["token"],
        "rounds": params.n,
        "rows": params.r,
        "cols": params.c,
        "word_bits": params.e,
        "key_token": token_name,
        "pairs_count": spec.p,
        "pairs": [
            [format_hex_state(pt, params), format_hex_state(ct, params)] for pt, ct in spec.pairs
        ],
        "variables": inst.num_vars,
        "clauses": inst.num_clauses,
        "density": round(inst.density, 4),
        "generator": inst.meta["generator"],
        "redundant": inst.meta["redundant"],
        "minimize": inst.meta["minimize"],
        "seed": args.seed,
        "cipher": load_cipher_config(args.cipher_config) if args.cipher_config else None,
    }
    if args.include_key:
        meta["secret_key"] = format_hex_state(key, params)
    meta_path = args.meta or (args.out + ".json")
    with open(meta_path, "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=1, sort_keys=True)
        fh.write("\n")
    print(f"token={inst.meta['token']} variables={inst.num_vars} clauses={inst.num_clauses} density={inst.density:.1f}")
    print(f"instance={args.out}")
    print(f"metadata={meta_path}")
    return EX_OK


def _load_config(args) -> NamedConfig:
    if args.flags_file:
        with open(args.flags_file, encoding="utf-8") as fh:
            data = json.load(fh)
        return NamedConfig(
            name=data.get("name", "custom"),
            flags=tuple((str(k), str(v)) for k, v in data["flags"]),
            uniform_threads=bool(data.get("uniform_threads", False)),
        )
    configs = builtin_configs()
    if args.config not in configs:
        raise ValueError(f"unknown config {args.config!r}; known: {sorted(configs)}")
    return configs[args.config]


def cmd_bench(args) -> int:
    config = _load_config(args)
    context = InstanceContext.from_meta_file(args.meta) if args.meta else None
    records = []
    if args.internal:
        inst = read_dimacs_file(args.instance)
        for _ in range(args.reps):
            records.append(
                run_internal(
                    inst,
                    context,
                    token=context.token if context else "",
                    max_clauses=args.clause_guard,
                )
            )
    else:
        campaign = Campaign(
            instance_path=args.instance,
            config=config,
            repetitions=args.reps,
            timeout_s=args.timeout,
            seed=args.seed,
            max_workers=args.jobs,
            solver_template=args.solver_template,
            threads=args.threads,
            context=context,
        )
        records = run_campaign(campaign)
    if args.records:
        append_records_csv(args.records, records)
    if args.jsonl:
        append_records_jsonl(args.jsonl, records)
    solved = [r.stat_time() for r in records if r.status == "SAT"]
    censored = sum(1 for r in records if r.status == "TIMEOUT")
    label = records[0].instance_token if records else "instance"
    if config.name != "default":
        label = f"{label}-{config.name}"
    for rec in records:
        note = f" anomaly={rec.anomaly}" if rec.anomaly else ""
        print(
            f"run seed={rec.seed} status={rec.status} wall={rec.wall_time_s:.2f}s"
            f" solve={rec.solve_time_s if rec.solve_time_s is not None else '-'}"
            f" verified={rec.verified}{note}"
        )
    if solved:
        table = to_table([(label, summarize(solved, censored_count=censored))])
        if args.summary:
            with open(args.summary, "w", encoding="utf-8") as fh:
                fh.write(table)
        print(table, end="")
    else:
        print(f"no successful runs ({censored} censored)")
    return EX_OK


def cmd_tune(args) -> int:
    space = parse_pcs_file(args.pcs)
    rng = random.Random(args.seed)
    journal = TuningJournal(args.journal)
    if args.synthetic:
        tae = quadratic_surface_tae
        instance = "synthetic"
    else:
        if not (args.instance and args.meta and args.solver_template):
            raise ValueError("--instance, --meta and --solver-template are required without --synthetic")
        context = InstanceContext.from_meta_file(args.meta)

        def _fmt(v):
            return repr(v) if isinstance(v, float) else str(v)

        def tae(config, instance, seed, cutoff):
            from .harness import run_once

            named = NamedConfig(
                name="tune",
                flags=tuple((p, _fmt(v)) for p, v in config.values),
                uniform_threads=True,
            )
            rec = run_once(
                named, args.instance, seed, cutoff, args.solver_template,
                context=context, threads=args.threads,
            )
            if rec.status == "TIMEOUT":
                return cutoff
            if rec.status != "SAT":
                raise TuningError(f"solver returned {rec.status} (anomaly: {rec.anomaly})")
            return rec.stat_time()

        instance = args.instance
    try:
        history = race(
            space,
            tae,
            budget=args.budget,
            rng=rng,
            instance=instance,
            n_seeds=args.race_seeds,
            base_cutoff=args.cutoff,
            cap_multiplier=args.cap_multiplier,
            workers=args.workers,
            journal=journal,
        )
    finally:
        journal.close()
    exported = export_incumbent(history, space)
    flags = " ".join(f"--{k}={v}" for k, v in exported.flags)
    print(f"incumbents={len(history)} evaluations_used={history[-1].evals_used}")
    print(f"final median={history[-1].median:.3f}s")
    print(f"flags: {flags}")
    if args.flags_out:
        with open(args.flags_out, "w", encoding="utf-8") as fh:
            json.dump(
                {
                    "name": exported.name,
                    "flags": [list(f) for f in exported.flags],
                    "uniform_threads": exported.uniform_threads,
                    "median_s": history[-1].median,
                },
                fh,
                indent=1,
                sort_keys=True,
            )
            fh.write("\n")
    return EX_OK


def cmd_verify(args) -> int:
    if bool(args.key) == bool(args.model):
        raise ValueError("pass exactly one of --key or --model")
    context = InstanceContext.from_meta_file(args.meta)
    if args.key:
        key_hex = args.key
    else:
        with open(args.model, encoding="utf-8") as fh:
            model = parse_solver_output(fh.read())
        if model.status not in ("SAT", "UNKNOWN") or not model.assignment:
            print(f"model file has status {model.status} and no assignment")
            return EX_VERIFY
        key_hex = extract_key(model, context.layout, context.params)
    ok = verify_key(key_hex, context)
    print(f"key={key_hex} verified={ok}")
    return EX_OK if ok else EX_VERIFY


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="srsat",
        description="Known-plaintext attacks on the small-scale AES model cipher as CNF: "
        "generate instances, run solver campaigns, summarize runtimes, tune parameters.",
    )
    ap.add_argument("--version", action="version", version=f"srsat {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encrypt", help="encrypt one block")
    _add_cipher_args(p)
    p.add_argument("--key", required=True, help="key as lowercase hex")
    p.add_argument("--plaintext", required=True, help="plaintext block as hex")
    p.set_defaults(func=cmd_encrypt)

    p = sub.add_parser("decrypt", help="decrypt one block")
    _add_cipher_args(p)
    p.add_argument("--key", required=True)
    p.add_argument("--ciphertext", required=True)
    p.set_defaults(func=cmd_decrypt)

    p = sub.add_parser("gen", help="generate a CNF instance for a known-plaintext attack")
    _add_cipher_args(p)
    p.add_argument("--key", help="secret key as hex")
    p.add_argument("--key-token", help="named key: k3, k4, k6/k6s")
    p.add_argument("--token-name", help="key token used in the instance name (with --key)")
    p.add_argument("--pairs", type=int, help="number of text pairs")
    p.add_argument("--plaintext", action="append", help="explicit plaintext block (repeatable)")
    p.add_argument("--text-file", help="sample plaintext windows from this file")
    p.add_argument("--random", action="store_true", help="uniform random plaintexts")
    p.add_argument("--seed", type=int, default=1, help="PRNG seed for plaintext sourcing")
    p.add_argument("--out", required=True, help="DIMACS output path")
    p.add_argument("--meta", help="metadata JSON path (default: OUT.json)")
    p.add_argument("--include-key", action="store_true", help="embed the secret key (test fixtures)")
    p.add_argument("--minimal", action="store_true", help="skip implied propagation-strength clauses")
    p.add_argument("--minimize", action="store_true", help="merge clauses differing in one literal")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="run a solver campaign over an instance")
    p.add_argument("--instance", required=True, help="DIMACS file")
    p.add_argument("--meta", help="metadata JSON from gen (enables key verification)")
    p.add_argument("--config", default="default", help="named flag combination (see docs)")
    p.add_argument("--flags-file", help="JSON flags file exported by tune")
    p.add_argument("--reps", type=int, default=1, help="repetitions")
    p.add_argument("--timeout", type=float, default=3600.0, help="wall timeout per run (s)")
    p.add_argument("--jobs", type=int, default=1, help="concurrent runs")
    p.add_argument("--threads", type=int, help="override the --threads base flag")
    p.add_argument("--seed", type=int, default=1, help="base seed; run i uses seed+i")
    p.add_argument(
        "--solver-template",
        default="cryptominisat5 {flags} --random={seed} {instance}",
        help="solver command template with {flags} {seed} {instance} placeholders",
    )
    p.add_argument("--internal", action="store_true", help="use the built-in solver (small instances)")
    p.add_argument("--clause-guard", type=int, default=200_000, help="size guard for --internal")
    p.add_argument("--records", help="append run records to this CSV")
    p.add_argument("--jsonl", help="append run records to this JSON-lines file")
    p.add_argument("--summary", help="write the summary table CSV here")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("tune", help="automatic algorithm configuration over a PCS")
    p.add_argument("--pcs", required=True, help="parameter configuration space file")
    p.add_argument("--budget", type=int, required=True, help="max TAE evaluations")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--race-seeds", type=int, default=8, help="shared seed set size")
    p.add_argument("--cutoff", type=float, default=3600.0, help="base evaluation cutoff (s)")
    p.add_argument("--cap-multiplier", type=float, default=2.0, help="adaptive cap vs incumbent median")
    p.add_argument("--workers", type=int, default=1, help="concurrent evaluations")
    p.add_argument("--synthetic", action="store_true", help="tune the built-in synthetic surface")
    p.add_argument("--instance", help="DIMACS instance (solver tuning)")
    p.add_argument("--meta", help="metadata JSON (solver tuning)")
    p.add_argument("--solver-template", help="solver command template (solver tuning)")
    p.add_argument("--threads", type=int, help="override the --threads base flag")
    p.add_argument("--journal", help="JSON-lines tuning journal path")
    p.add_argument("--flags-out", help="write the final incumbent flags JSON here")
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("verify", help="check a recovered key or solver model against an instance")
    p.add_argument("--meta", required=True, help="metadata JSON from gen")
    p.add_argument("--model", help="solver output file with s/v lines")
    p.add_argument("--key", help="candidate key as hex")
    p.set_defaults(func=cmd_verify)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, CipherConfigError, EncodingError, DimacsError, PcsError,
            SolverOutputError, TuningError, EmptySampleError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EX_DATA
    except (HarnessError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EX_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
