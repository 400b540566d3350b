"""Long jumps: blockwise ternary optimization and the unary estimator-driven walk.

The distance estimator flips exactly ``k`` bits, with ``k`` the integer
nearest to n/2 - eps*n/2 for eps = 1/2 - ell/n (ties round up, i.e. towards
a slightly smaller eps).  All estimator arithmetic uses the eps implied by
the rounded ``k``, eps_k = (n - 2k)/n, so offsets stay integral.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .bits import RngStream
from .objective import Handle, QueryOracle
from .onemax import Solver, rls_optimize, simulate_on_subcube, subcube_budget
from .variation import (
    sample_copy_where_differs,
    sample_flip_k,
    sample_flip_k_batch,
    sample_flip_where_equal,
    sample_select_bit,
    sample_uniform,
)


def estimator_flips(n: int, ell: int) -> int:
    """Nearest integer to n/2 - eps n/2 with eps = 1/2 - ell/n, i.e. to (n + 2 ell)/4."""
    k = (n + 2 * ell + 2) // 4
    if not 0 < k < n / 2:
        raise ValueError(f"no valid flip count for n={n}, ell={ell}")
    return k


def estimator_eps(n: int, k: int) -> float:
    return (n - 2 * k) / n


def distance_from_sum(s: int, T: int, n: int, k: int) -> int:
    """floor(-s / (T eps) + 1/2) with eps = (n - 2k)/n, in exact integer arithmetic."""
    den = T * (n - 2 * k)
    if den <= 0:
        raise ValueError("need T >= 1 and k < n/2")
    return (-2 * s * n + den) // (2 * den)


ZERO_POLICIES = ("resample", "restart")


def estimate_distance(oracle: QueryOracle, rng: RngStream, x: Handle, T: int, k: int,
                      stats: dict | None = None, zero_policy: str = "resample") -> int:
    """Estimate the Hamming distance of x to the optimum from T offspring fitnesses.

    Offspring flip exactly ``k`` bits and only visible (non-zero) offspring
    enter the sum.  With ``zero_policy="restart"`` a fitness-0 offspring throws
    the whole batch away and starts over; with ``"resample"`` only that
    offspring is replaced.  Both give the same distribution of the result
    (T independent draws conditioned on being visible); they differ only in
    the number of queries spent, which for the batch restart grows like
    (1 - q)^-T in the per-offspring blanking probability q.
    """
    if T < 1:
        raise ValueError("T must be >= 1")
    if zero_policy not in ZERO_POLICIES:
        raise ValueError(f"zero_policy must be one of {ZERO_POLICIES}")
    n = oracle.n
    offset = n - k  # n/2 + eps n/2
    if zero_policy == "resample":
        batch = sample_flip_k_batch(oracle, rng, x, k, T, skip_zero=True)
        if stats is not None and batch.count(0):
            stats["zeros"] = stats.get("zeros", 0) + batch.count(0)
        return distance_from_sum(batch.total() - T * offset, T, n, k)
    while True:
        batch = sample_flip_k_batch(oracle, rng, x, k, T, stop_on_zero=True)
        if not batch.stopped_on_zero:
            return distance_from_sum(batch.total() - T * offset, T, n, k)
        if stats is not None:
            stats["zeros"] = stats.get("zeros", 0) + 1


def estimator_sample_size(n: int, alpha: int, eps: float, K_T: float = 24.0,
                          p_factor: float = 1.0) -> int:
    """ceil(p K_T (2 alpha + 1) ln(6n / (2 alpha + 1)) / eps^2), at least 1."""
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    m = 2 * alpha + 1
    return max(1, math.ceil(p_factor * K_T * m * math.log(6 * n / m) / eps**2))


@dataclass
class LongJumpConfig:
    K_T: float = 24.0
    p_factor: float = 1.0
    subcube_factor: float = 10.0
    zero_policy: str = "resample"


@dataclass
class PEstimator:
    """g(x, alpha): the distance estimator with a sample size adapted to alpha."""

    n: int
    flips: int
    eps: float
    K_T: float = 24.0
    p_factor: float = 1.0
    zero_policy: str = "resample"

    def sample_size(self, alpha: int) -> int:
        return estimator_sample_size(self.n, alpha, self.eps, self.K_T, self.p_factor)

    def estimate(self, oracle: QueryOracle, rng: RngStream, x: Handle, alpha: int,
                 stats: dict | None = None) -> int:
        return estimate_distance(oracle, rng, x, self.sample_size(alpha), self.flips, stats,
                                 self.zero_policy)


def make_p_estimator(n: int, ell: int, cfg: LongJumpConfig | None = None) -> PEstimator:
    cfg = cfg or LongJumpConfig()
    k = estimator_flips(n, ell)
    return PEstimator(n, k, estimator_eps(n, k), cfg.K_T, cfg.p_factor, cfg.zero_policy)


def unary_longjump_optimize(oracle: QueryOracle, rng: RngStream,
                            cfg: LongJumpConfig | None = None,
                            trace: list | None = None) -> Handle:
    """Walk by single-bit flips, accepting when the estimated distance drops.

    ``trace``, if given, receives the handle of every accepted point.
    """
    n = oracle.n
    g = make_p_estimator(n, oracle.objective.ell, cfg)
    while True:
        s = sample_uniform(oracle, rng)
        if s.fitness != 0:
            break
    x, fx = s.handle, s.fitness
    alpha = n - fx
    while fx != n:
        s = sample_flip_k(oracle, rng, x, 1)
        if s.fitness == n:
            x, fx = s.handle, s.fitness
            break
        alpha_new = g.estimate(oracle, rng, s.handle, alpha)
        alpha_cur = g.estimate(oracle, rng, x, alpha)
        if alpha_new < alpha_cur:
            x, fx, alpha = s.handle, s.fitness, alpha_new
            if trace is not None:
                trace.append(x)
    return x


def block_layout(n: int, ell: int) -> list[int]:
    """Block sizes used by the ternary optimizer: n/2 - ell each, last one shorter."""
    a = n // 2 - ell
    m = math.ceil(n / a)
    return [a] * (m - 1) + [n - (m - 1) * a]


def ternary_longjump_optimize(oracle: QueryOracle, rng: RngStream,
                              cfg: LongJumpConfig | None = None,
                              solver: Solver = rls_optimize,
                              trace: dict | None = None) -> Handle | None:
    """Optimize block by block on sub-hypercubes where OneMax is fully visible.

    Returns the merged point if it is the optimum, ``None`` when this attempt
    failed (a block came back wrong or a block endpoint was blanked).
    """
    cfg = cfg or LongJumpConfig()
    n = oracle.n
    if n % 2:
        raise ValueError("the blockwise optimizer needs even n")
    half = n // 2
    while True:
        s = sample_uniform(oracle, rng)
        if s.fitness in (half, n):
            break
    x, fx = s.handle, s.fitness
    if fx == n:
        return x
    sizes = block_layout(n, oracle.objective.ell)

    z = x
    ys = []
    zs = [z]
    for a_i in sizes:
        z_next = sample_flip_where_equal(oracle, rng, z, x, a_i).handle
        ys.append(sample_select_bit(oracle, rng, x, z, z_next))
        zs.append(z_next)
        z = z_next

    us = []
    for y, a_i in zip(ys, sizes):
        if y.fitness == 0:
            return None
        us.append(simulate_on_subcube(oracle, rng, x, y.handle, a_i, fx, y.fitness, solver,
                                      subcube_budget(a_i, cfg.subcube_factor)))

    b = x
    fb = fx
    for u in us:
        s = sample_copy_where_differs(oracle, rng, b, u, x)
        b, fb = s.handle, s.fitness
    if trace is not None:
        trace.update(x=x, z=zs, y=[y.handle for y in ys], u=us, b=b, sizes=sizes)
    return b if fb == n else None
