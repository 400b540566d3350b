"""Jump functions and the query-counting oracle.

Algorithms only ever hold :class:`Handle` objects.  The bits behind a handle
live in the oracle's private store and are reachable only through
:meth:`QueryOracle.reveal`, which exists for tests and harness audits.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bits import BitString, weight


class RunTerminated(Exception):
    """Base class for the two ways a run stops from inside the oracle."""


class BudgetExhausted(RunTerminated):
    pass


class OptimumFound(RunTerminated):
    pass


@dataclass(frozen=True)
class JumpObjective:
    n: int
    ell: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.ell < 0 or 2 * self.ell >= self.n:
            raise ValueError(f"need 0 <= ell < n/2, got n={self.n}, ell={self.ell}")

    @property
    def is_extreme(self) -> bool:
        return self.n % 2 == 0 and self.ell == self.n // 2 - 1

    def value_of_weight(self, w: int) -> int:
        if w == self.n:
            return self.n
        if self.ell < w < self.n - self.ell:
            return w
        return 0

    def fitness_table(self) -> np.ndarray:
        """Fitness indexed by weight 0..n."""
        return np.array([self.value_of_weight(w) for w in range(self.n + 1)], dtype=np.int64)


def onemax(n: int) -> JumpObjective:
    return JumpObjective(n, 0)


def extreme(n: int) -> JumpObjective:
    if n % 2 or n < 4:
        raise ValueError("extreme jump needs even n >= 4")
    return JumpObjective(n, n // 2 - 1)


def jump_value(obj: JumpObjective, x: BitString) -> int:
    if x.n != obj.n:
        raise ValueError(f"length mismatch: {x.n} != {obj.n}")
    return obj.value_of_weight(weight(x))


@dataclass(frozen=True, slots=True)
class Handle:
    id: int


@dataclass(frozen=True, slots=True)
class Sample:
    handle: Handle
    fitness: int


class QueryOracle:
    """Fitness gatekeeper for one run.

    ``budget`` caps the total number of queries; ``limit`` is a tighter,
    movable cap used for per-attempt budgets.  With ``stop_on_optimum`` the
    first query of the all-ones string raises :class:`OptimumFound` after it
    has been counted.
    """

    def __init__(self, objective: JumpObjective, budget: int | None = None,
                 stop_on_optimum: bool = False):
        self.objective = objective
        self.budget = budget
        self.limit = budget
        self.stop_on_optimum = stop_on_optimum
        self.query_count = 0
        self.first_hit: int | None = None
        self.batched = 0
        self._store: list[int] = []
        self._fitness: list[int] = []
        self._table = objective.fitness_table()

    @property
    def n(self) -> int:
        return self.objective.n

    def set_attempt_limit(self, queries: int | None) -> None:
        """Allow at most ``queries`` further queries (never beyond the total budget)."""
        cap = None if queries is None else self.query_count + queries
        if self.budget is not None:
            cap = self.budget if cap is None else min(cap, self.budget)
        self.limit = cap

    def remaining(self) -> int | None:
        return None if self.limit is None else self.limit - self.query_count

    def _hit(self) -> None:
        if self.first_hit is None:
            self.first_hit = self.query_count
            if self.stop_on_optimum:
                raise OptimumFound(self.first_hit)

    def submit(self, x: BitString) -> Sample:
        if x.n != self.n:
            raise ValueError(f"length mismatch: {x.n} != {self.n}")
        if self.limit is not None and self.query_count >= self.limit:
            raise BudgetExhausted(self.query_count)
        w = x.value.bit_count()
        f = int(self._table[w])
        self._store.append(x.value)
        self._fitness.append(f)
        self.query_count += 1
        handle = Handle(len(self._store) - 1)
        if w == self.n:
            self._hit()
        return Sample(handle, f)

    def record_batch(self, consumed: int, hit_last: bool) -> None:
        """Count ``consumed`` unstored queries; the last one is the optimum iff ``hit_last``."""
        if self.limit is not None and self.query_count + consumed > self.limit:
            allowed = max(0, self.limit - self.query_count)
            self.query_count += allowed
            self.batched += allowed
            raise BudgetExhausted(self.query_count)
        self.query_count += consumed
        self.batched += consumed
        if hit_last:
            self._hit()

    def fitness(self, h: Handle) -> int:
        return self._fitness[self._index(h)]

    def _index(self, h: Handle) -> int:
        if not isinstance(h, Handle) or not 0 <= h.id < len(self._store):
            raise KeyError(f"unknown handle {h!r}")
        return h.id

    def _bits(self, h: Handle) -> BitString:
        return BitString(self.n, self._store[self._index(h)])

    def _weight(self, h: Handle) -> int:
        return self._store[self._index(h)].bit_count()

    def reveal(self, h: Handle) -> BitString:
        """White-box escape hatch; algorithm code never calls this."""
        return self._bits(h)

    @property
    def stored(self) -> int:
        return len(self._store)
