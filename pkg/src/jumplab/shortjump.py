"""Short jumps: recover OneMax values from a jump function and optimize as on OneMax."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .bits import RngStream
from .objective import Handle, QueryOracle
from .onemax import Solver, rls_optimize
from .variation import sample_flip_k, sample_flip_k_batch, sample_uniform


def default_eps(n: int, ell: int) -> float:
    """Largest eps with ell <= n^(1/2 - eps), capped at 1/2."""
    if ell <= 1:
        return 0.5
    eps = 0.5 - math.log(ell) / math.log(n)
    if eps <= 0:
        raise ValueError(f"ell={ell} is not a short jump for n={n}")
    return eps


@dataclass
class ShortJumpConfig:
    c: float = 4.0
    eps: float | None = None
    known_ell: bool = True
    learn_samples: int = 8

    def samples_per_call(self, n: int, ell: int) -> int:
        eps = self.eps if self.eps is not None else default_eps(n, ell)
        if not 0 < eps <= 0.5:
            raise ValueError(f"eps must be in (0, 1/2], got {eps}")
        return max(1, math.ceil(self.c / (2 * eps)))


def simulate_onemax(oracle: QueryOracle, rng: RngStream, x: Handle, ell: int, t: int) -> int:
    """OneMax value of x, exact whenever x is visible and w.h.p. otherwise.

    Visible points cost nothing beyond the query that produced them.  For a
    blanked point, ``t`` offspring at distance ``ell`` are drawn; their fitness
    multiset decides which side of the plateau x sits on.
    """
    fx = oracle.fitness(x)
    if fx != 0:
        return fx
    batch = sample_flip_k_batch(oracle, rng, x, ell, t)
    values = batch.counts
    top = max(values)
    if top < oracle.n / 2:
        return max(top - ell, 0)
    return min(v for v in values if v != 0) + ell


def learn_ell(oracle: QueryOracle, rng: RngStream, zero_point: Handle,
              per_radius: int = 8) -> int:
    """Infer ell from a fitness-0 point by probing growing Hamming radii.

    The first visible (non-zero, non-optimal) neighbour sits on the plateau
    boundary: at n - ell - 1 when the zero point is on the high side, at
    ell + 1 on the low side.
    """
    n = oracle.n
    if oracle.fitness(zero_point) != 0:
        raise ValueError("learn_ell needs a point of fitness 0")
    for radius in range(1, n + 1):
        for _ in range(per_radius):
            v = sample_flip_k(oracle, rng, zero_point, radius).fitness
            if v != 0 and v != n:
                return v - 1 if v < n / 2 else n - v - 1
    raise RuntimeError("no visible point found around the zero point")


class SimulatedView:
    """OneMax view where every evaluation goes through :func:`simulate_onemax`."""

    def __init__(self, oracle: QueryOracle, rng: RngStream, cfg: ShortJumpConfig,
                 ell: int | None):
        self.oracle = oracle
        self.rng = rng
        self.cfg = cfg
        self.dim = oracle.n
        self.evaluations = 0
        self.ell = ell
        self.t = None if ell is None else cfg.samples_per_call(oracle.n, ell)

    def value(self, h: Handle) -> int:
        self.evaluations += 1
        if self.oracle.fitness(h) != 0:
            return self.oracle.fitness(h)
        if self.ell is None:
            self.ell = learn_ell(self.oracle, self.rng, h, self.cfg.learn_samples)
            self.t = self.cfg.samples_per_call(self.oracle.n, self.ell)
        return simulate_onemax(self.oracle, self.rng, h, self.ell, self.t)

    def uniform(self):
        h = sample_uniform(self.oracle, self.rng).handle
        return h, self.value(h)

    def flip(self, h, k):
        h2 = sample_flip_k(self.oracle, self.rng, h, k).handle
        return h2, self.value(h2)


def shortjump_optimize(oracle: QueryOracle, rng: RngStream, cfg: ShortJumpConfig | None = None,
                       solver: Solver = rls_optimize, budget: int | None = None) -> Handle:
    """Run a OneMax solver with every evaluation simulated from the jump function."""
    cfg = cfg or ShortJumpConfig()
    ell = oracle.objective.ell if cfg.known_ell else None
    if ell is not None and ell > oracle.n / 4:
        raise ValueError("the OneMax simulation assumes ell <= n/4")
    view = SimulatedView(oracle, rng, cfg, ell)
    best, _ = solver(view, budget, rng)
    return best
