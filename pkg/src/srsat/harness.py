"""Run SAT solvers over generated instances: named flag combinations,
subprocess orchestration with timeouts, key extraction and verification,
and an internal-solver fallback for dependency-free runs.
"""

from __future__ import annotations

import csv
import json
import os
import re
import shlex
import subprocess
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

from . import satsolver
from .cipher import (
    CipherParams,
    encrypt_block,
    expand_key,
    format_hex_state,
    params_from_config,
    parse_hex_state,
)
from .cnf import CnfInstance, VarLayout
from .dimacs import SolverModel, parse_solver_output
from .encoder import decode_key_bits

# Flags the measurement discipline keeps on every run; the thread count is
# a knob, the rest are fixed.
BASE_FLAGS = (("verb", "4"), ("threads", "31"), ("comps", "0"))


class HarnessError(RuntimeError):
    pass


class UnknownPlaceholderError(HarnessError):
    pass


@dataclass(frozen=True)
class NamedConfig:
    """A named solver flag combination.

    uniform_threads marks combinations measured with the solver patched so
    every thread runs the same command-line settings (only the per-thread
    PRNG seed differs). We cannot patch external binaries, so this is
    recorded as a solver-side expectation and carried into run records.
    """

    name: str
    flags: tuple[tuple[str, str], ...]
    base_flags: tuple[tuple[str, str], ...] = BASE_FLAGS
    uniform_threads: bool = False

    def flag_strings(self, threads: int | None = None) -> list[str]:
        out = []
        for key, value in self.base_flags:
            if key == "threads" and threads is not None:
                value = str(threads)
            out.append(f"--{key}={value}")
        out.extend(f"--{key}={value}" for key, value in self.flags)
        return out


def builtin_configs() -> dict[str, NamedConfig]:
    """The named parameter combinations, exactly as benchmarked."""
    sw4_flags = (("restart", "glue"), ("gluecut0", "4"), ("updateglueonprop", "1"))
    configs = [
        NamedConfig("default", ()),
        NamedConfig("sw1", (("restart", "geom"), ("maple", "1"), ("bva", "0"), ("sync", "30000"))),
        NamedConfig("sw2", (("gluehist", "30"), ("maple", "1"), ("maxnummatrixes", "8"), ("bva", "0"))),
        NamedConfig(
            "sw3",
            (("restart", "geom"), ("maple", "1"), ("cachesize", "4096"), ("cachecutoff", "3000")),
            uniform_threads=True,
        ),
        NamedConfig("sw4", sw4_flags, uniform_threads=True),
        NamedConfig("sw6", sw4_flags),
        NamedConfig("sw7", (("gluecut0", "5"), ("gluecut1", "7"), ("updateglueonprop", "1"))),
        NamedConfig("sw10", sw4_flags + (("gluecut1", "7"), ("gluehist", "45")), uniform_threads=True),
    ]
    return {c.name: c for c in configs}


def build_command(
    config: NamedConfig,
    solver_template: str,
    instance_path: str,
    seed: int,
    threads: int | None = None,
) -> list[str]:
    """Substitute {flags}, {seed}, {instance} placeholders into an argv.

    {flags} expands in place to the config's flag list; the other
    placeholders substitute textually inside their token.
    """
    known = {"flags", "seed", "instance"}
    argv: list[str] = []
    for token in shlex.split(solver_template):
        names = re.findall(r"\{([^{}]*)\}", token)
        for name in names:
            if name not in known:
                raise UnknownPlaceholderError(f"unknown placeholder {{{name}}} in template")
        if token == "{flags}":
            argv.extend(config.flag_strings(threads=threads))
            continue
        argv.append(token.replace("{seed}", str(seed)).replace("{instance}", str(instance_path)))
    return argv


@dataclass
class InstanceContext:
    """What the harness needs to interpret a solver model: the variable
    layout plus the text pairs for re-encryption checks."""

    params: CipherParams
    layout: VarLayout
    token: str
    pairs: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...] = ()

    @classmethod
    def from_meta_file(cls, path: str) -> "InstanceContext":
        with open(path, encoding="utf-8") as fh:
            meta = json.load(fh)
        return cls.from_meta(meta)

    @classmethod
    def from_meta(cls, meta: dict) -> "InstanceContext":
        params = params_from_config(
            n=int(meta["rounds"]),
            r=int(meta["rows"]),
            c=int(meta["cols"]),
            e=int(meta["word_bits"]),
            overrides=meta.get("cipher"),
        )
        layout = VarLayout(n=params.n, r=params.r, c=params.c, e=params.e, p=int(meta["pairs_count"]))
        pairs = tuple(
            (parse_hex_state(pt, params), parse_hex_state(ct, params))
            for pt, ct in meta.get("pairs", [])
        )
        return cls(params=params, layout=layout, token=meta.get("token", ""), pairs=pairs)


@dataclass
class RunRecord:
    instance_token: str
    config_name: str
    seed: int
    status: str  # SAT | UNSAT | TIMEOUT | UNKNOWN | ERROR
    wall_time_s: float
    solve_time_s: float | None
    recovered_key: str | None
    verified: bool
    anomaly: str | None = None
    solver_id: str | None = None
    command: str | None = None

    def stat_time(self) -> float:
        """Solver-reported solving-thread time when available, else wall."""
        return self.solve_time_s if self.solve_time_s is not None else self.wall_time_s


@dataclass
class Campaign:
    instance_path: str
    config: NamedConfig
    repetitions: int
    timeout_s: float
    seed: int = 1
    max_workers: int = 1
    solver_template: str = "cryptominisat5 {flags} --random={seed} {instance}"
    threads: int | None = None
    context: InstanceContext | None = None

    def seeds(self) -> list[int]:
        # one distinct, reproducible seed per repetition
        return [self.seed + i for i in range(self.repetitions)]


_TIME_RE = re.compile(r"^c.*\btime\b[^:]*:\s*([0-9]+(?:\.[0-9]+)?)", re.IGNORECASE)
_VERSION_RE = re.compile(r"^c\s.*\bversion\b.*$", re.IGNORECASE)


def parse_solve_time(text: str) -> float | None:
    """Last solver-reported time from comment lines ('c ... time ...: X')."""
    found = None
    for line in text.splitlines():
        m = _TIME_RE.match(line)
        if m:
            found = float(m.group(1))
    return found


def parse_solver_id(text: str) -> str | None:
    for line in text.splitlines():
        if _VERSION_RE.match(line):
            return line[2:].strip()
    return None


def verify_key(key_hex: str, context: InstanceContext) -> bool:
    """True iff the key re-encrypts every plaintext to its ciphertext."""
    if not context.pairs:
        return False
    key = parse_hex_state(key_hex, context.params)
    material = expand_key(key, context.params)
    return all(
        encrypt_block(pt, material, context.params).ciphertext == ct
        for pt, ct in context.pairs
    )


def extract_key(model: SolverModel, layout: VarLayout, params: CipherParams) -> str:
    """Hex secret key from the round-key-0 slice of a SAT model."""
    if model.status != "SAT" or not model.assignment:
        raise HarnessError("no SAT assignment to extract a key from")
    bits = model.as_bits(layout.num_vars)
    mentioned = {abs(l) for l in model.assignment}
    missing = [v for v in layout.key_bit_vars(0) if v not in mentioned]
    if missing:
        raise HarnessError(f"model leaves {len(missing)} key bits unassigned")
    return format_hex_state(decode_key_bits(bits, layout, params), params)


def run_once(
    config: NamedConfig,
    instance_path: str,
    seed: int,
    timeout_s: float,
    solver_template: str,
    context: InstanceContext | None = None,
    threads: int | None = None,
) -> RunRecord:
    """One external solver run: spawn, enforce the wall timeout, parse and
    verify. Timeouts are results, not errors."""
    argv = build_command(config, solver_template, instance_path, seed, threads=threads)
    token = context.token if context else os.path.basename(instance_path)
    start = time.monotonic()
    try:
        proc = subprocess.run(
            argv,
            stdout=subprocess.PIPE,
            stderr=subprocess.STDOUT,
            timeout=timeout_s,
            text=True,
            errors="replace",
        )
        wall = time.monotonic() - start
        output = proc.stdout or ""
        returncode = proc.returncode
    except subprocess.TimeoutExpired as exc:
        wall = time.monotonic() - start
        output = ""
        if exc.output:
            output = exc.output if isinstance(exc.output, str) else exc.output.decode("utf-8", "replace")
        return RunRecord(
            instance_token=token,
            config_name=config.name,
            seed=seed,
            status="TIMEOUT",
            wall_time_s=wall,
            solve_time_s=None,
            recovered_key=None,
            verified=False,
            solver_id=parse_solver_id(output),
            command=shlex.join(argv),
        )
    except OSError as exc:
        raise HarnessError(f"failed to spawn solver: {exc}") from exc

    model = parse_solver_output(output)
    if returncode == 10:
        model.status = "SAT"
    elif returncode == 20:
        model.status = "UNSAT"
    anomaly = None
    recovered = None
    verified = False
    if model.status == "UNSAT":
        anomaly = "UNSAT on a satisfiable-by-construction instance"
    if model.status == "SAT" and context is not None:
        try:
            recovered = extract_key(model, context.layout, context.params)
            verified = verify_key(recovered, context)
            if not verified:
                anomaly = "recovered key failed re-encryption"
        except HarnessError as exc:
            anomaly = str(exc)
    return RunRecord(
        instance_token=token,
        config_name=config.name,
        seed=seed,
        status=model.status,
        wall_time_s=wall,
        solve_time_s=parse_solve_time(output),
        recovered_key=recovered,
        verified=verified,
        anomaly=anomaly,
        solver_id=parse_solver_id(output),
        command=shlex.join(argv),
    )


def run_campaign(campaign: Campaign) -> list[RunRecord]:
    """Repeated runs with per-repetition seeds; results in repetition order."""
    if campaign.repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    seeds = campaign.seeds()

    def job(seed: int) -> RunRecord:
        return run_once(
            campaign.config,
            campaign.instance_path,
            seed,
            campaign.timeout_s,
            campaign.solver_template,
            context=campaign.context,
            threads=campaign.threads,
        )

    if campaign.max_workers <= 1:
        return [job(s) for s in seeds]
    with ThreadPoolExecutor(max_workers=campaign.max_workers) as pool:
        return list(pool.map(job, seeds))


DEFAULT_CLAUSE_GUARD = 200_000


def solve_internal(
    cnf: CnfInstance,
    max_clauses: int = DEFAULT_CLAUSE_GUARD,
    max_conflicts: int | None = None,
) -> SolverModel:
    """Built-in CDCL on a CnfInstance; guarded against oversized inputs."""
    if cnf.num_clauses > max_clauses:
        raise HarnessError(
            f"instance has {cnf.num_clauses} clauses, over the internal guard {max_clauses}"
        )
    out = satsolver.solve(cnf.num_vars, cnf.clauses, max_conflicts=max_conflicts)
    status = {"SAT": "SAT", "UNSAT": "UNSAT"}.get(out.status, "UNKNOWN")
    return SolverModel(status=status, assignment=out.model or [])


def enumerate_internal(cnf: CnfInstance, limit: int | None = None, max_clauses: int = DEFAULT_CLAUSE_GUARD):
    """All models of a small instance (uniqueness checks)."""
    if cnf.num_clauses > max_clauses:
        raise HarnessError(
            f"instance has {cnf.num_clauses} clauses, over the internal guard {max_clauses}"
        )
    return satsolver.enumerate_models(cnf.num_vars, cnf.clauses, limit=limit)


def run_internal(
    cnf: CnfInstance,
    context: InstanceContext | None,
    token: str = "",
    max_clauses: int = DEFAULT_CLAUSE_GUARD,
) -> RunRecord:
    """Internal-solver counterpart of run_once (no subprocess, no seed)."""
    start = time.monotonic()
    model = solve_internal(cnf, max_clauses=max_clauses)
    wall = time.monotonic() - start
    recovered = None
    verified = False
    anomaly = None
    if model.status == "UNSAT":
        anomaly = "UNSAT on a satisfiable-by-construction instance"
    elif model.status == "SAT" and context is not None:
        recovered = extract_key(model, context.layout, context.params)
        verified = verify_key(recovered, context)
        if not verified:
            anomaly = "recovered key failed re-encryption"
    return RunRecord(
        instance_token=token or (context.token if context else ""),
        config_name="internal",
        seed=0,
        status=model.status,
        wall_time_s=wall,
        solve_time_s=None,
        recovered_key=recovered,
        verified=verified,
        anomaly=anomaly,
        solver_id="srsat-internal",
        command=None,
    )


RECORD_FIELDS = [f for f in RunRecord.__dataclass_fields__]


def append_records_csv(path: str, records) -> None:
    new_file = not os.path.exists(path) or os.path.getsize(path) == 0
    with open(path, "a", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=RECORD_FIELDS)
        if new_file:
            writer.writeheader()
        for rec in records:
            writer.writerow(asdict(rec))


def append_records_jsonl(path: str, records) -> None:
    with open(path, "a", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(asdict(rec), sort_keys=True) + "\n")
