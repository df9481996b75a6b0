"""CNF building blocks: clause container, variable layout, instance record."""

from __future__ import annotations

from array import array
from dataclasses import dataclass, field


class ClauseSet:
    """Clause list backed by a flat int32 buffer (0-terminated clauses).

    Keeps multi-million-clause instances affordable compared to a list of
    Python lists.
    """

    __slots__ = ("_buf", "_count")

    def __init__(self, clauses=None):
        self._buf = array("i")
        self._count = 0
        if clauses is not None:
            self.extend(clauses)

    def append(self, lits) -> None:
        self._buf.extend(lits)
        self._buf.append(0)
        self._count += 1

    def extend(self, clauses) -> None:
        for cl in clauses:
            self.append(cl)

    def extend_flat(self, flat, count: int) -> None:
        """Bulk-append pre-flattened, 0-terminated literal runs."""
        self._buf.extend(flat)
        self._count += count

    def __len__(self) -> int:
        return self._count

    def __iter__(self):
        cur = []
        for lit in self._buf:
            if lit == 0:
                yield cur
                cur = []
            else:
                cur.append(lit)

    def __eq__(self, other):
        if not isinstance(other, ClauseSet):
            return NotImplemented
        return self._buf == other._buf

    def to_lists(self) -> list[list[int]]:
        return [cl[:] for cl in self]

    def max_var(self) -> int:
        return max((abs(l) for l in self._buf), default=0)

    @property
    def raw(self) -> array:
        return self._buf


@dataclass(frozen=True)
class VarLayout:
    """1-based variable numbering for a known-plaintext instance.

    Key bits come first: all n+1 round keys, round by round. Then each
    text pair gets its 2n-1 state blocks in chronological order
    y_1, x_2, y_2, ..., x_n, y_n.
    """

    n: int
    r: int
    c: int
    e: int
    p: int

    @property
    def block_bits(self) -> int:
        return self.r * self.c * self.e

    @property
    def num_key_vars(self) -> int:
        return (self.n + 1) * self.block_bits

    @property
    def states_per_pair(self) -> int:
        return 2 * self.n - 1

    @property
    def num_vars(self) -> int:
        return self.num_key_vars + self.p * self.states_per_pair * self.block_bits

    def key_var(self, round_i: int, word: int, bit: int) -> int:
        if not 0 <= round_i <= self.n:
            raise IndexError(f"round key index {round_i} out of range")
        return 1 + round_i * self.block_bits + word * self.e + bit

    def _state_base(self, pair: int, slot: int) -> int:
        if not 0 <= pair < self.p:
            raise IndexError(f"pair index {pair} out of range")
        return self.num_key_vars + pair * self.states_per_pair * self.block_bits + slot * self.block_bits

    def y_var(self, pair: int, round_i: int, word: int, bit: int) -> int:
        if not 1 <= round_i <= self.n:
            raise IndexError(f"y round index {round_i} out of range")
        return 1 + self._state_base(pair, 2 * (round_i - 1)) + word * self.e + bit

    def x_var(self, pair: int, round_i: int, word: int, bit: int) -> int:
        if not 2 <= round_i <= self.n:
            raise IndexError(f"x round index {round_i} out of range (x_1 is folded away)")
        return 1 + self._state_base(pair, 2 * round_i - 3) + word * self.e + bit

    def key_bit_vars(self, round_i: int) -> range:
        base = round_i * self.block_bits
        return range(base + 1, base + self.block_bits + 1)


@dataclass
class CnfInstance:
    """Clauses plus the metadata that names and sizes an instance."""

    clauses: ClauseSet
    num_vars: int
    layout: VarLayout | None = None
    meta: dict = field(default_factory=dict)

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    @property
    def density(self) -> float:
        return self.num_clauses / self.num_vars if self.num_vars else 0.0

    @property
    def token(self) -> str:
        return self.meta.get("token", "")
