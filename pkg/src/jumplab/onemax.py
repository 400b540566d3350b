"""OneMax solvers and their restriction to a sub-hypercube.

A solver sees a *view*: something that can draw a uniform point, flip bits of
a previously drawn point, and report a OneMax-like value for what it drew.
Views hide how the value is obtained (directly, via a simulation subroutine,
or translated from a sub-hypercube), so one solver serves every pipeline.
"""
from __future__ import annotations

import math
from typing import Callable, Protocol

from .bits import RngStream
from .objective import Handle, QueryOracle
from .variation import (
    sample_flip_in_subcube,
    sample_flip_k,
    sample_uniform,
    sample_uniform_in_subcube,
)

BLANKED = -1


class OneMaxView(Protocol):
    dim: int
    evaluations: int

    def uniform(self) -> tuple[Handle, int]: ...

    def flip(self, h: Handle, k: int) -> tuple[Handle, int]: ...


class DirectView:
    """The oracle's own fitness, read as OneMax (exact for ell = 0)."""

    def __init__(self, oracle: QueryOracle, rng: RngStream):
        self.oracle = oracle
        self.rng = rng
        self.dim = oracle.n
        self.evaluations = 0

    def uniform(self):
        self.evaluations += 1
        s = sample_uniform(self.oracle, self.rng)
        return s.handle, s.fitness

    def flip(self, h, k):
        self.evaluations += 1
        s = sample_flip_k(self.oracle, self.rng, h, k)
        return s.handle, s.fitness


class SubcubeView:
    """OneMax on [x, y], translated to the a differing positions.

    Inner value = outer fitness - base_weight, where base_weight is the number
    of ones on the positions x and y share.  A blanked outer value (0) is
    reported as ``BLANKED``, which no solver ever accepts.
    """

    def __init__(self, oracle: QueryOracle, rng: RngStream, x: Handle, y: Handle,
                 a: int, fx: int, fy: int):
        if (fx + fy - a) % 2:
            raise ValueError("inconsistent fitnesses for the given distance")
        self.oracle = oracle
        self.rng = rng
        self.x, self.y = x, y
        self.dim = a
        self.base_weight = (fx + fy - a) // 2
        self.evaluations = 0

    def _inner(self, fitness: int) -> int:
        return BLANKED if fitness == 0 else fitness - self.base_weight

    def uniform(self):
        self.evaluations += 1
        s = sample_uniform_in_subcube(self.oracle, self.rng, self.x, self.y)
        return s.handle, self._inner(s.fitness)

    def flip(self, h, k):
        self.evaluations += 1
        s = sample_flip_in_subcube(self.oracle, self.rng, h, self.x, self.y, k)
        return s.handle, self._inner(s.fitness)


def rls_optimize(view: OneMaxView, budget: int | None, rng: RngStream | None = None
                 ) -> tuple[Handle, int]:
    """Randomized local search: flip one bit, keep the offspring unless it is worse.

    Stops at value ``view.dim`` or after ``budget`` view evaluations and returns
    the best point seen.  ``rng`` is unused (the view owns its stream); it is
    accepted so every solver has the same signature.
    """
    h, v = view.uniform()
    best, best_v = h, v
    while best_v < view.dim and (budget is None or view.evaluations < budget):
        h2, v2 = view.flip(h, 1)
        if v2 >= v and v2 != BLANKED:
            h, v = h2, v2
            if v > best_v:
                best, best_v = h, v
    return best, best_v


Solver = Callable[[OneMaxView, "int | None", "RngStream | None"], "tuple[Handle, int]"]

SOLVERS: dict[str, Solver] = {"rls": rls_optimize}


def subcube_budget(a: int, factor: float = 10.0) -> int:
    return math.ceil(factor * a * math.log(a + 2))


def simulate_on_subcube(oracle: QueryOracle, rng: RngStream, x: Handle, y: Handle, a: int,
                        fx: int, fy: int, solver: Solver = rls_optimize,
                        budget: int | None = None) -> Handle:
    """Run ``solver`` on the a-dimensional OneMax problem living on [x, y].

    ``fx`` and ``fy`` are the (visible) fitnesses of x and y.  Returns the best
    point found, which always lies in [x, y].
    """
    if a == 0:
        return x
    view = SubcubeView(oracle, rng, x, y, a, fx, fy)
    if budget is None:
        budget = subcube_budget(a)
    best, _ = solver(view, budget, rng)
    return best
