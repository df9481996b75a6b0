"""A small complete CDCL solver: two watched literals, first-UIP learning
with self-subsumption minimization, Luby restarts, phase saving, and static
lowest-index branching (no activity heuristic). Banned-combination clause
piles are activated lazily. Meant for desk-scale instances and model
enumeration, not as a competitor to external solvers.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class SolveStats:
    decisions: int = 0
    conflicts: int = 0
    propagations: int = 0
    restarts: int = 0


@dataclass
class SolveOutcome:
    status: str  # "SAT" | "UNSAT" | "UNKNOWN"
    model: list[int] | None = None  # signed literals, ascending by variable
    stats: SolveStats = field(default_factory=SolveStats)


def _luby(i: int) -> int:
    while True:
        k = i.bit_length()
        if i == (1 << k) - 1:
            return 1 << (k - 1)
        i -= (1 << (k - 1)) - 1


class Solver:
    """CDCL over clauses given as lists of nonzero signed ints.

    Clause objects are plain lists whose first two slots are the watched
    literals; reason clauses keep their implied literal in slot 0.
    Propagation pops a LIFO stack, so implication cascades run depth
    first and conflicts surface before unrelated parts of the cascade
    are computed.
    """

    def __init__(self, num_vars: int, clauses, lazy: bool = True):
        self.n = num_vars
        self.stats = SolveStats()
        self.vals = bytearray(2 * num_vars + 1)  # lit+n -> 0 unset, 1 true, 2 false
        self.level = [0] * (num_vars + 1)
        self.reason: list[list[int] | None] = [None] * (num_vars + 1)
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.pending: list[int] = []
        self.watches: list[list[list[int]]] = [[] for _ in range(2 * num_vars + 1)]
        self.saved_phase = bytearray(num_vars + 1)
        self.learned: list[list[int]] = []
        self._seen = bytearray(num_vars + 1)
        self.sleeping: list[list[int]] = []
        self.ok = True
        pending = [list(cl) for cl in clauses]
        if lazy:
            pending = self._split_lazy(pending)
        for cl in pending:
            if not self.add_clause(cl):
                self.ok = False
                break

    def _split_lazy(self, clauses: list[list[int]]) -> list[list[int]]:
        """Put banned-combination-style clause piles to sleep.

        Groups sharing one variable set with more than 2^(k-1) members
        carry under one bit of information per clause and mostly churn
        the watch lists; they stay detached until a candidate model
        violates one (checked before any SAT answer), which keeps the
        solver exact while propagation runs on the informative clauses.
        """
        groups: dict[frozenset[int], list[list[int]]] = {}
        for cl in clauses:
            groups.setdefault(frozenset(abs(l) for l in cl), []).append(cl)
        active = []
        for vs, group in groups.items():
            if len(vs) > 1 and len(group) > 1 << (len(vs) - 1):
                self.sleeping.extend(group)
            else:
                active.extend(group)
        return active

    def add_clause(self, lits: list[int]) -> bool:
        """Attach a clause; False means the formula is already unsat."""
        if not self.ok:
            return False
        lits = list(dict.fromkeys(lits))
        if any(-l in lits for l in lits):
            return True  # tautology
        if any(abs(l) > self.n or l == 0 for l in lits):
            raise ValueError("bad literal in clause")
        if not lits:
            return False
        if len(lits) == 1:
            return self._enqueue_root(lits[0])
        # Watch the two highest-index variables: under static lowest-index
        # branching they are assigned last, so the clause sleeps until it
        # can actually propagate. (Watch choice never changes propagation
        # strength, only where the work happens.)
        a = max(range(len(lits)), key=lambda i: abs(lits[i]))
        lits[0], lits[a] = lits[a], lits[0]
        b = max(range(1, len(lits)), key=lambda i: abs(lits[i]))
        lits[1], lits[b] = lits[b], lits[1]
        n = self.n
        self.watches[lits[0] + n].append(lits)
        self.watches[lits[1] + n].append(lits)
        return True

    def _enqueue_root(self, lit: int) -> bool:
        n = self.n
        v = self.vals[lit + n]
        if v == 1:
            return True
        if v == 2:
            return False
        self.vals[lit + n] = 1
        self.vals[-lit + n] = 2
        self.level[abs(lit)] = 0
        self.reason[abs(lit)] = None
        self.trail.append(lit)
        self.pending.append(lit)
        return True

    def _analyze(self, conflict: list[int]):
        """First-UIP conflict clause and the level to backjump to."""
        level = self.level
        reason = self.reason
        trail = self.trail
        cur_level = len(self.trail_lim)
        seen = self._seen
        touched = []
        learnt = [0]  # slot 0 reserved for the asserting literal
        counter = 0
        p = None
        idx = len(trail) - 1
        c = conflict
        while True:
            for q in (c if p is None else c[1:]):
                v = q if q > 0 else -q
                if not seen[v] and level[v] > 0:
                    seen[v] = 1
                    touched.append(v)
                    if level[v] == cur_level:
                        counter += 1
                    else:
                        learnt.append(q)
            while not seen[trail[idx] if trail[idx] > 0 else -trail[idx]]:
                idx -= 1
            p = trail[idx]
            idx -= 1
            seen[p if p > 0 else -p] = 0
            counter -= 1
            if counter == 0:
                break
            c = reason[p if p > 0 else -p]
        # self-subsumption: drop literals implied by the rest of the clause
        if len(learnt) > 2:
            kept = [0]
            for q in learnt[1:]:
                r = reason[q if q > 0 else -q]
                if r is None:
                    kept.append(q)
                    continue
                for other in r[1:]:
                    ov = other if other > 0 else -other
                    if not seen[ov] and level[ov] > 0:
                        kept.append(q)
                        break
            learnt = kept
        for v in touched:
            seen[v] = 0
        learnt[0] = -p
        if len(learnt) == 1:
            return learnt, 0
        back = 0
        pos = 1
        for i in range(1, len(learnt)):
            lv = level[abs(learnt[i])]
            if lv > back:
                back = lv
                pos = i
        learnt[1], learnt[pos] = learnt[pos], learnt[1]
        return learnt, back

    def _backjump(self, target_level: int) -> None:
        if target_level >= len(self.trail_lim):
            return
        n = self.n
        vals = self.vals
        cut = self.trail_lim[target_level]
        for lit in self.trail[cut:]:
            vals[lit + n] = 0
            vals[-lit + n] = 0
        del self.trail[cut:]
        del self.trail_lim[target_level:]
        if self.pending:
            # in place so callers' aliases stay valid
            self.pending[:] = [l for l in self.pending if vals[l + n] == 1]

    def _reduce_db(self) -> None:
        keep_reasons = {id(r) for r in self.reason if r is not None}
        self.learned.sort(key=len)
        half = len(self.learned) // 2
        drop_set = set()
        kept = []
        for i, c in enumerate(self.learned):
            if i < half or len(c) <= 3 or id(c) in keep_reasons:
                kept.append(c)
            else:
                drop_set.add(id(c))
        if not drop_set:
            return
        for wl in self.watches:
            wl[:] = [c for c in wl if id(c) not in drop_set]
        self.learned = kept

    def solve(
        self,
        max_conflicts: int | None = None,
        restart_base: int = 1024,
        max_learnts: int = 4000,
        learnts_growth: float = 1.0,
    ) -> SolveOutcome:
        if not self.ok:
            return SolveOutcome("UNSAT", stats=self.stats)
        n = self.n
        vals = self.vals
        watches = self.watches
        trail = self.trail
        trail_lim = self.trail_lim
        level = self.level
        reason = self.reason
        saved_phase = self.saved_phase
        stats = self.stats
        pending = self.pending
        propagations = 0
        restart_num = 0
        conflicts_until_restart = restart_base * _luby(1)

        while True:
            # --- unit propagation (LIFO: depth-first cascades) ---
            conflict = None
            dl = len(trail_lim)
            while pending:
                lit = pending.pop()
                if vals[lit + n] != 1:
                    continue
                propagations += 1
                neg = -lit
                wl = watches[neg + n]
                i = 0
                j = 0
                size = len(wl)
                while i < size:
                    c = wl[i]
                    i += 1
                    if c[0] == neg:
                        c[0] = c[1]
                        c[1] = neg
                    first = c[0]
                    if vals[first + n] == 1:
                        wl[j] = c
                        j += 1
                        continue
                    found = False
                    for k in range(2, len(c)):
                        lk = c[k]
                        if vals[lk + n] != 2:
                            c[1] = lk
                            c[k] = neg
                            watches[lk + n].append(c)
                            found = True
                            break
                    if found:
                        continue
                    wl[j] = c
                    j += 1
                    if vals[first + n] == 2:
                        while i < size:
                            wl[j] = wl[i]
                            j += 1
                            i += 1
                        conflict = c
                        break
                    # implied: inline assignment
                    vals[first + n] = 1
                    vals[-first + n] = 2
                    v = first if first > 0 else -first
                    level[v] = dl
                    reason[v] = c
                    saved_phase[v] = 1 if first > 0 else 0
                    trail.append(first)
                    pending.append(first)
                del wl[j:]
                if conflict is not None:
                    break

            if conflict is not None:
                stats.conflicts += 1
                if not trail_lim:
                    self.ok = False
                    stats.propagations += propagations
                    return SolveOutcome("UNSAT", stats=stats)
                learnt, back = self._analyze(conflict)
                self._backjump(back)
                dl = len(trail_lim)
                if len(learnt) == 1:
                    if not self._enqueue_root(learnt[0]):
                        self.ok = False
                        stats.propagations += propagations
                        return SolveOutcome("UNSAT", stats=stats)
                else:
                    watches[learnt[0] + n].append(learnt)
                    watches[learnt[1] + n].append(learnt)
                    self.learned.append(learnt)
                    first = learnt[0]
                    vals[first + n] = 1
                    vals[-first + n] = 2
                    v = first if first > 0 else -first
                    level[v] = dl
                    reason[v] = learnt
                    saved_phase[v] = 1 if first > 0 else 0
                    trail.append(first)
                    pending.append(first)
                conflicts_until_restart -= 1
                if max_conflicts is not None and stats.conflicts >= max_conflicts:
                    self._backjump(0)
                    stats.propagations += propagations
                    return SolveOutcome("UNKNOWN", stats=stats)
                if len(self.learned) > max_learnts:
                    self._reduce_db()
                    max_learnts = int(max_learnts * learnts_growth)
                continue

            if conflicts_until_restart <= 0 and trail_lim:
                stats.restarts += 1
                restart_num += 1
                conflicts_until_restart = restart_base * _luby(restart_num + 1)
                self._backjump(0)
                continue

            if len(trail) == n:
                if self.sleeping:
                    woken = self._wake_violated()
                    if woken:
                        self._backjump(0)
                        pending[:] = list(trail)  # revisit roots vs new clauses
                        for cl in woken:
                            if not self.add_clause(cl):
                                self.ok = False
                                stats.propagations += propagations
                                return SolveOutcome("UNSAT", stats=stats)
                        continue
                stats.propagations += propagations
                return SolveOutcome("SAT", model=sorted(trail, key=abs), stats=stats)

            # --- decide: lowest-index unassigned variable, saved phase ---
            v = 1
            while vals[v + n]:
                v += 1
            branch = v if saved_phase[v] else -v
            stats.decisions += 1
            trail_lim.append(len(trail))
            vals[branch + n] = 1
            vals[-branch + n] = 2
            level[v] = len(trail_lim)
            reason[v] = None
            trail.append(branch)
            pending.append(branch)

    def _wake_violated(self) -> list[list[int]]:
        """Move sleeping clauses falsified by the full assignment into play."""
        n = self.n
        vals = self.vals
        woken = []
        remaining = []
        for cl in self.sleeping:
            for l in cl:
                if vals[l + n] == 1:
                    remaining.append(cl)
                    break
            else:
                woken.append(cl)
        self.sleeping = remaining
        return woken

    def decisions_snapshot(self) -> list[int]:
        """Current decision literals (valid right after a SAT result)."""
        return [self.trail[i] for i in self.trail_lim]


def solve(num_vars: int, clauses, max_conflicts: int | None = None) -> SolveOutcome:
    return Solver(num_vars, clauses).solve(max_conflicts=max_conflicts)


def enumerate_models(num_vars: int, clauses, limit: int | None = None):
    """All total models, found by blocking each model's decision set."""
    blocking: list[list[int]] = []
    models = []
    base = [list(c) for c in clauses]
    while True:
        solver = Solver(num_vars, base + blocking)
        out = solver.solve()
        if out.status != "SAT":
            return models
        models.append(out.model)
        if limit is not None and len(models) >= limit:
            return models
        decisions = solver.decisions_snapshot()
        if not decisions:
            return models  # fully implied: unique model
        blocking.append([-d for d in decisions])
