"""Automatic algorithm configuration: PCS parsing, uniform sampling, and
challenger-vs-incumbent racing with adaptive capping.

The target algorithm evaluator (TAE) is any callable
``tae(config, instance, seed, cutoff) -> runtime_seconds``; runtimes at or
over the cutoff are recorded as capped at the cutoff, never fabricated.
"""

from __future__ import annotations

import json
import re
import statistics
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from random import Random

from .harness import NamedConfig


class PcsError(ValueError):
    pass


class TuningError(RuntimeError):
    pass


@dataclass(frozen=True)
class ParamDef:
    name: str
    kind: str  # "integer" | "real" | "categorical"
    lo: float | None = None
    hi: float | None = None
    choices: tuple[str, ...] = ()
    default: object = None

    def validate(self, value) -> bool:
        if self.kind == "integer":
            return isinstance(value, int) and self.lo <= value <= self.hi
        if self.kind == "real":
            return isinstance(value, float) and self.lo <= value <= self.hi
        return value in self.choices

    def format_value(self, value) -> str:
        if self.kind == "integer":
            return str(value)
        if self.kind == "real":
            return repr(value)
        return str(value)

    def parse_value(self, text: str):
        if self.kind == "integer":
            return int(text)
        if self.kind == "real":
            return float(text)
        return text


@dataclass(frozen=True)
class ParamSpace:
    params: tuple[ParamDef, ...]

    def __post_init__(self):
        names = [p.name for p in self.params]
        if len(set(names)) != len(names):
            raise PcsError("duplicate parameter name in space")

    def __len__(self):
        return len(self.params)

    def by_name(self, name: str) -> ParamDef:
        for p in self.params:
            if p.name == name:
                return p
        raise KeyError(name)

    def default_configuration(self) -> "Configuration":
        return Configuration(
            values=tuple((p.name, p.default) for p in self.params),
            provenance="default",
        )


@dataclass(frozen=True)
class Configuration:
    values: tuple[tuple[str, object], ...]
    provenance: str = "sampled"

    def as_dict(self) -> dict:
        return dict(self.values)

    def key(self) -> tuple:
        return self.values


_INT_LINE = re.compile(
    r"^(?P<name>[^\s{\[]+)\s*\[\s*(?P<lo>-?[0-9.eE+-]+)\s*,\s*(?P<hi>-?[0-9.eE+-]+)\s*\]\s*"
    r"\[\s*(?P<default>-?[0-9.eE+-]+)\s*\]\s*(?P<int>i?)l?\s*$"
)
_CAT_LINE = re.compile(
    r"^(?P<name>[^\s{\[]+)\s*\{(?P<choices>[^}]*)\}\s*\[\s*(?P<default>[^\]]*)\s*\]\s*$"
)


def parse_pcs(text: str) -> ParamSpace:
    """Parse the parameter configuration space grammar.

    ``name [lo, hi] [default]i`` declares an integer, the same without the
    trailing ``i`` a real, ``name {a, b, c} [default]`` a categorical.
    ``#`` starts a comment.
    """
    params: list[ParamDef] = []
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _CAT_LINE.match(line)
        if m:
            name = m.group("name")
            choices = tuple(tok.strip() for tok in m.group("choices").split(",") if tok.strip())
            default = m.group("default").strip()
            if not choices:
                raise PcsError(f"line {lineno}: empty categorical value set")
            if default not in choices:
                raise PcsError(f"line {lineno}: default {default!r} not among {choices}")
            p = ParamDef(name=name, kind="categorical", choices=choices, default=default)
        else:
            m = _INT_LINE.match(line)
            if not m:
                raise PcsError(f"line {lineno}: cannot parse {line!r}")
            name = m.group("name")
            is_int = m.group("int") == "i"
            try:
                if is_int:
                    lo, hi = int(m.group("lo")), int(m.group("hi"))
                    default: object = int(m.group("default"))
                else:
                    lo, hi = float(m.group("lo")), float(m.group("hi"))
                    default = float(m.group("default"))
            except ValueError:
                raise PcsError(f"line {lineno}: non-numeric bound or default") from None
            if lo > hi:
                raise PcsError(f"line {lineno}: empty range [{lo}, {hi}]")
            if not lo <= default <= hi:
                raise PcsError(f"line {lineno}: default {default} outside [{lo}, {hi}]")
            p = ParamDef(name=name, kind="integer" if is_int else "real", lo=lo, hi=hi, default=default)
        if p.name in seen:
            raise PcsError(f"line {lineno}: duplicate parameter {p.name!r}")
        seen.add(p.name)
        params.append(p)
    return ParamSpace(params=tuple(params))


def serialize_pcs(space: ParamSpace) -> str:
    lines = []
    for p in space.params:
        if p.kind == "categorical":
            lines.append(f"{p.name} {{{', '.join(p.choices)}}} [{p.default}]")
        elif p.kind == "integer":
            lines.append(f"{p.name} [{int(p.lo)}, {int(p.hi)}] [{p.default}]i")
        else:
            lines.append(f"{p.name} [{p.lo:g}, {p.hi:g}] [{p.default}]")
    return "\n".join(lines) + "\n"


def parse_pcs_file(path: str) -> ParamSpace:
    with open(path, encoding="utf-8") as fh:
        return parse_pcs(fh.read())


def sample_config(space: ParamSpace, rng: Random) -> Configuration:
    """Uniform sample: integers and reals over their ranges, categoricals
    over their value sets."""
    values = []
    for p in space.params:
        if p.kind == "integer":
            values.append((p.name, rng.randint(int(p.lo), int(p.hi))))
        elif p.kind == "real":
            values.append((p.name, rng.uniform(p.lo, p.hi)))
        else:
            values.append((p.name, rng.choice(p.choices)))
    return Configuration(values=tuple(values), provenance="sampled")


def validate_config(space: ParamSpace, config: Configuration) -> None:
    got = config.as_dict()
    if set(got) != {p.name for p in space.params}:
        raise TuningError("configuration does not cover the parameter space")
    for p in space.params:
        if not p.validate(got[p.name]):
            raise TuningError(f"value {got[p.name]!r} illegal for parameter {p.name}")


@dataclass(frozen=True)
class EvalResult:
    config_id: int
    instance: str
    seed: int
    runtime_s: float
    status: str  # "OK" | "TIMEOUT_CAPPED"
    cutoff_s: float


@dataclass
class Incumbent:
    configuration: Configuration
    results: tuple[EvalResult, ...]
    median: float
    evals_used: int


def evaluate(tae, config: Configuration, instance: str, seed: int, cutoff: float, config_id: int = 0) -> EvalResult:
    """One TAE call with capping; TAE failures propagate as errors."""
    if cutoff <= 0:
        raise TuningError("cutoff must be positive")
    runtime = float(tae(config, instance, seed, cutoff))
    if runtime >= cutoff:
        return EvalResult(config_id, instance, seed, float(cutoff), "TIMEOUT_CAPPED", float(cutoff))
    return EvalResult(config_id, instance, seed, runtime, "OK", float(cutoff))


class TuningJournal:
    """JSON-lines log of every evaluation and incumbent transition."""

    def __init__(self, path: str | None):
        self.path = path
        self._fh = open(path, "w", encoding="utf-8") if path else None

    def log(self, event: str, payload: dict) -> None:
        if self._fh:
            self._fh.write(json.dumps({"event": event, **payload}, sort_keys=True) + "\n")
            self._fh.flush()

    def close(self) -> None:
        if self._fh:
            self._fh.close()
            self._fh = None


def race(
    space: ParamSpace,
    tae,
    budget: int,
    rng: Random,
    instance: str = "instance",
    n_seeds: int = 8,
    base_cutoff: float = 3600.0,
    cap_multiplier: float = 2.0,
    workers: int = 1,
    journal: TuningJournal | None = None,
) -> list[Incumbent]:
    """Race sampled challengers against the incumbent on shared seeds.

    The default configuration is evaluated first and seeds the incumbent.
    Challengers go through a doubling repetition schedule on the shared
    seed list, capped adaptively at cap_multiplier times the incumbent
    median, and take over only on strict median improvement over the full
    shared seed set. Returns the incumbent history (append-only).
    """
    if budget < 1:
        raise TuningError("budget must allow at least one evaluation")
    journal = journal or TuningJournal(None)
    seeds = [rng.randrange(1 << 30) for _ in range(n_seeds)]
    evals_used = 0
    next_config_id = 0

    def run_batch(config, config_id, seed_slice, cutoff):
        nonlocal evals_used
        todo = list(seed_slice)
        if workers > 1 and len(todo) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(
                    pool.map(lambda s: evaluate(tae, config, instance, s, cutoff, config_id), todo)
                )
        else:
            results = [evaluate(tae, config, instance, s, cutoff, config_id) for s in todo]
        evals_used += len(results)
        for r in results:
            journal.log("eval", {
                "config_id": r.config_id, "config": dict(config.values), "seed": r.seed,
                "runtime_s": r.runtime_s, "status": r.status, "cutoff_s": r.cutoff_s,
            })
        return results

    # incumbent = defaults, evaluated on as much of the seed set as budget allows
    incumbent_cfg = space.default_configuration()
    validate_config(space, incumbent_cfg)
    first = run_batch(incumbent_cfg, next_config_id, seeds[: max(1, min(n_seeds, budget))], base_cutoff)
    next_config_id += 1
    inc_results: dict[int, EvalResult] = {r.seed: r for r in first}
    inc_median = statistics.median(r.runtime_s for r in first)
    history = [Incumbent(incumbent_cfg, tuple(first), inc_median, evals_used)]
    journal.log("incumbent", {"config": dict(incumbent_cfg.values), "median": inc_median, "evals_used": evals_used})

    while evals_used < budget:
        challenger = sample_config(space, rng)
        validate_config(space, challenger)
        cid = next_config_id
        next_config_id += 1
        cutoff = min(base_cutoff, cap_multiplier * inc_median) if inc_median > 0 else base_cutoff
        ch_results: list[EvalResult] = []
        done = 0
        target = 1
        survived = True
        while done < len(seeds):
            take = min(target, len(seeds)) - done
            take = min(take, budget - evals_used)
            if take <= 0:
                survived = False  # budget exhausted mid-race
                break
            ch_results.extend(run_batch(challenger, cid, seeds[done : done + take], cutoff))
            done += take
            ch_med = statistics.median(r.runtime_s for r in ch_results)
            inc_med_prefix = statistics.median(
                inc_results[s].runtime_s for s in seeds[:done] if s in inc_results
            )
            if ch_med > inc_med_prefix:
                survived = False
                break
            target *= 2
        if survived and done == len(seeds) and len(inc_results) == len(seeds):
            ch_med = statistics.median(r.runtime_s for r in ch_results)
            if ch_med < inc_median:
                incumbent_cfg = challenger
                inc_results = {r.seed: r for r in ch_results}
                inc_median = ch_med
                history.append(Incumbent(incumbent_cfg, tuple(ch_results), inc_median, evals_used))
                journal.log("incumbent", {
                    "config": dict(incumbent_cfg.values), "median": inc_median, "evals_used": evals_used,
                })
        elif survived and len(inc_results) < len(seeds):
            # incumbent never finished its own seed set (tiny budgets): top it up
            missing = [s for s in seeds if s not in inc_results]
            take = min(len(missing), budget - evals_used)
            if take > 0:
                extra = run_batch(incumbent_cfg, 0, missing[:take], base_cutoff)
                inc_results.update({r.seed: r for r in extra})
                inc_median = statistics.median(r.runtime_s for r in inc_results.values())
    return history


def export_incumbent(history: list[Incumbent], space: ParamSpace, name: str | None = None) -> NamedConfig:
    """Final incumbent as solver flags, in the space's declaration order."""
    if not history:
        raise TuningError("empty incumbent history")
    final = history[-1]
    values = final.configuration.as_dict()
    flags = tuple(
        (p.name, p.format_value(values[p.name])) for p in space.params
    )
    return NamedConfig(name=name or f"tuned-{len(history) - 1}", flags=flags, uniform_threads=True)


def flags_to_config(space: ParamSpace, flags) -> Configuration:
    """Parse exported flag pairs back into a Configuration (round-trip)."""
    lookup = dict(flags)
    values = []
    for p in space.params:
        if p.name not in lookup:
            raise TuningError(f"flag for parameter {p.name} missing")
        values.append((p.name, p.parse_value(lookup[p.name])))
    return Configuration(values=tuple(values), provenance="user")


def quadratic_surface_tae(config: Configuration, instance: str, seed: int, cutoff: float) -> float:
    """Synthetic TAE: 100*(gluecut0-4)^2 + 10 + N(0,1), deterministic per
    (configuration, seed). Used for demos and convergence tests."""
    g = dict(config.values)["gluecut0"]
    fingerprint = zlib.crc32(repr(sorted(config.values)).encode("utf-8"))
    noise_rng = Random((fingerprint ^ (seed * 0x9E3779B9)) & 0xFFFFFFFF)
    return 100.0 * (float(g) - 4.0) ** 2 + 10.0 + noise_rng.gauss(0.0, 1.0)
