"""DIMACS CNF serialization/parsing and solver-output model extraction.

Writing is canonical: metadata comments first (stable key=value grammar),
then the header, then one clause per line. write -> read -> write is byte
identical.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .cnf import ClauseSet, CnfInstance


class DimacsError(ValueError):
    pass


class MalformedHeaderError(DimacsError):
    pass


class LiteralOutOfRangeError(DimacsError):
    pass


class UnterminatedClauseError(DimacsError):
    pass


class CountMismatchError(DimacsError):
    pass


class SolverOutputError(ValueError):
    pass


@dataclass
class SolverModel:
    """Status plus assignment parsed from competition-style solver output."""

    status: str  # SAT | UNSAT | UNKNOWN | TIMEOUT
    assignment: list[int] = field(default_factory=list)

    def truth(self, var: int) -> bool | None:
        for lit in self.assignment:
            if abs(lit) == var:
                return lit > 0
        return None

    def as_bits(self, num_vars: int) -> list[int]:
        """0/1 per variable, index 0 unused; unmentioned variables are 0."""
        bits = [0] * (num_vars + 1)
        for lit in self.assignment:
            v = abs(lit)
            if v <= num_vars and lit > 0:
                bits[v] = 1
        return bits


_COMMENT_META = re.compile(r"^c\s+([A-Za-z0-9_.-]+)=(.*)$")


def write_dimacs(cnf: CnfInstance, fh, include_key: str | None = None) -> None:
    """Serialize to a binary stream. include_key embeds the secret key in a
    comment (kept out by default: the instance is the attack input)."""
    meta = dict(cnf.meta)
    if include_key is not None:
        meta["secret_key"] = include_key
    elif "secret_key" not in meta:
        meta["secret_key"] = "withheld"
    lines = [f"c {k}={v}" for k, v in meta.items()]
    lines.append(f"p cnf {cnf.num_vars} {cnf.num_clauses}")
    fh.write(("\n".join(lines) + "\n").encode("ascii"))
    # serialize the flat buffer in chunks cut at clause boundaries
    raw = cnf.clauses.raw
    total = len(raw)
    start = 0
    chunk = 1 << 20
    while start < total:
        end = min(start + chunk, total)
        while end < total and raw[end - 1] != 0:
            end += 1
        if raw[end - 1] != 0:
            raise DimacsError("clause buffer does not end with a terminator")
        text = " ".join(map(str, raw[start:end]))
        fh.write(text.replace(" 0 ", " 0\n").encode("ascii"))
        fh.write(b"\n")
        start = end


def write_dimacs_file(cnf: CnfInstance, path: str, include_key: str | None = None) -> None:
    with open(path, "wb") as fh:
        write_dimacs(cnf, fh, include_key=include_key)


def read_dimacs(data) -> CnfInstance:
    """Parse DIMACS bytes/text into a layout-free CnfInstance.

    Raises distinct errors for malformed headers, out-of-range literals,
    unterminated clauses, and header/body count mismatches.
    """
    if isinstance(data, bytes):
        data = data.decode("ascii", errors="replace")
    meta: dict[str, str] = {}
    declared = None
    clauses = ClauseSet()
    current: list[int] = []
    for lineno, line in enumerate(data.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("c"):
            m = _COMMENT_META.match(stripped)
            if m:
                meta[m.group(1)] = m.group(2)
            continue
        if stripped.startswith("p"):
            if declared is not None:
                raise MalformedHeaderError(f"line {lineno}: duplicate header")
            parts = stripped.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise MalformedHeaderError(f"line {lineno}: bad header {stripped!r}")
            try:
                declared = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise MalformedHeaderError(f"line {lineno}: non-integer header counts") from None
            continue
        if declared is None:
            raise MalformedHeaderError(f"line {lineno}: clause before header")
        try:
            lits = [int(tok) for tok in stripped.split()]
        except ValueError:
            raise DimacsError(f"line {lineno}: non-integer literal") from None
        for lit in lits:
            if lit == 0:
                clauses.append(current)
                current = []
            else:
                if abs(lit) > declared[0]:
                    raise LiteralOutOfRangeError(
                        f"line {lineno}: literal {lit} exceeds {declared[0]} variables"
                    )
                current.append(lit)
    if current:
        raise UnterminatedClauseError("final clause lacks its 0 terminator")
    if declared is None:
        raise MalformedHeaderError("missing 'p cnf' header")
    if len(clauses) != declared[1]:
        raise CountMismatchError(
            f"header declares {declared[1]} clauses, body has {len(clauses)}"
        )
    return CnfInstance(clauses=clauses, num_vars=declared[0], layout=None, meta=meta)


def read_dimacs_file(path: str) -> CnfInstance:
    with open(path, "rb") as fh:
        return read_dimacs(fh.read())


def parse_solver_output(text: str) -> SolverModel:
    """Extract `s` status and `v` model lines (competition conventions)."""
    status = "UNKNOWN"
    vtokens: list[str] = []
    for line in text.splitlines():
        if line.startswith("s "):
            word = line[2:].strip()
            if word == "SATISFIABLE":
                status = "SAT"
            elif word == "UNSATISFIABLE":
                status = "UNSAT"
            else:
                status = "UNKNOWN"
        elif line.startswith("v ") or line.strip() == "v":
            vtokens.extend(line[1:].split())
    if not vtokens:
        return SolverModel(status=status)
    try:
        lits = [int(t) for t in vtokens]
    except ValueError:
        raise SolverOutputError("non-integer token in v lines") from None
    if lits[-1] != 0:
        raise SolverOutputError("model lines do not end with the 0 terminator")
    body = [l for l in lits[:-1] if l != 0]
    return SolverModel(status=status, assignment=body)
