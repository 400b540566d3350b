"""Extreme jumps (ell = n/2 - 1): only fitness n/2 and the optimum are visible.

Notation: for a point x, ``d(x) = |OneMax(x) - n/2|``, ``sgn(x)`` is the sign
of ``OneMax(x) - n/2`` and ``a_sym(x) = min(|x|_1, |x|_0) = n/2 - d(x)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .bits import BitString, RngStream, full_mask, set_positions, weight
from .objective import Handle, QueryOracle
from .stats import EXACT_LIMIT, p_flip, p_flip_value, sample_size_Na
from .variation import (
    sample_complement,
    sample_flip_k,
    sample_flip_k_batch,
    sample_flip_where_different,
    sample_flip_where_equal,
    sample_mix,
    sample_select_bit,
    sample_uniform,
)


@dataclass(frozen=True)
class SymmetricState:
    d: int
    sgn: int
    a_sym: int

    @classmethod
    def of(cls, x: BitString) -> "SymmetricState":
        if x.n % 2:
            raise ValueError("symmetric state needs even n")
        diff = weight(x) - x.n // 2
        return cls(abs(diff), (diff > 0) - (diff < 0), x.n // 2 - abs(diff))


def is_opposing_pair(x: BitString, y: BitString, k: int) -> bool:
    sx, sy = SymmetricState.of(x), SymmetricState.of(y)
    return (sx.sgn * sy.sgn == -1 and sx.d == sy.d == k
            and (x.value ^ y.value).bit_count() == 2 * k)


def _require_extreme(oracle: QueryOracle) -> int:
    if not oracle.objective.is_extreme:
        raise ValueError("objective is not an extreme jump")
    return oracle.n // 2


def _first_visible(oracle, rng, want: tuple[int, ...]):
    while True:
        s = sample_uniform(oracle, rng)
        if s.fitness in want:
            return s


# -- ternary: address single bits ------------------------------------------

def ternary_extreme_optimize(oracle: QueryOracle, rng: RngStream,
                             trace: dict | None = None) -> Handle:
    n = oracle.n
    half = _require_extreme(oracle)
    s = _first_visible(oracle, rng, (half, n))
    x = s.handle
    if s.fitness == n:
        return x

    # path z^(0..n) flipping each position once; y^(i) differs from x only at step i
    z = x
    ys = []
    for _ in range(n):
        z_next = sample_flip_where_equal(oracle, rng, z, x, 1).handle
        ys.append(sample_select_bit(oracle, rng, x, z, z_next).handle)
        z = z_next

    b = ys[0]
    same = []
    for yi in ys[1:]:
        probe = sample_select_bit(oracle, rng, x, ys[0], yi)
        if probe.fitness == 0:
            same.append(yi)
            b = sample_select_bit(oracle, rng, b, x, yi).handle
    if trace is not None:
        trace.update(x=x, y=ys, same=same, b=b)
    if oracle.fitness(b) == n:
        return b
    return sample_complement(oracle, rng, b).handle


# -- binary: opposing pairs ----------------------------------------------

def movefirst_tests(n: int) -> int:
    return max(1, math.ceil(2 * math.log2(n)))


def movefirst(oracle: QueryOracle, rng: RngStream, x: Handle, y: Handle, k: int,
              stats: dict | None = None) -> Handle:
    """From an opposing k-pair (x, y), a neighbour x' of x with d(x') = k + 1 (w.h.p.).

    Candidates flip one bit where x and y agree.  A candidate that moved
    towards the middle is exposed when flipping k - 1 of its bits that differ
    from y lands on fitness n/2; a candidate surviving every test is returned.
    """
    half = _require_extreme(oracle)
    tests = movefirst_tests(oracle.n)
    while True:
        cand = sample_flip_where_equal(oracle, rng, x, y, 1).handle
        if stats is not None:
            stats["candidates"] = stats.get("candidates", 0) + 1
        for _ in range(tests):
            if sample_flip_where_different(oracle, rng, cand, y, k - 1).fitness == half:
                break
        else:
            return cand


def binary_extreme_optimize(oracle: QueryOracle, rng: RngStream,
                            trace: list | None = None) -> Handle | None:
    """Grow an opposing pair from d = 1 to d = n/2; one end is then the optimum.

    ``trace``, if given, receives the pair after initialisation and after
    every round.  Returns ``None`` when neither end is the optimum.
    """
    n = oracle.n
    half = _require_extreme(oracle)
    s = _first_visible(oracle, rng, (half, n))
    m = s.handle
    if s.fitness == n:
        return m

    checks = math.ceil(math.sqrt(n))
    while True:
        x = sample_flip_where_equal(oracle, rng, m, m, 1).handle
        y = sample_flip_where_equal(oracle, rng, m, x, 1).handle
        if all(sample_mix(oracle, rng, x, y).fitness == half for _ in range(checks)):
            break
    if trace is not None:
        trace.append((x, y))

    for k in range(1, half):
        x_new = movefirst(oracle, rng, x, y, k)
        y_new = movefirst(oracle, rng, y, x, k)
        x, y = x_new, y_new
        if trace is not None:
            trace.append((x, y))

    if oracle.fitness(x) == n:
        return x
    if oracle.fitness(y) == n:
        return y
    return None


# -- unary: threshold test on the chance of hitting fitness n/2 -------------

@dataclass
class ExtremeEstimatorConfig:
    """``K`` scales the per-test sample size; ``fast_last_level`` enables the
    weight-only shortcut for the retry loop of the final level."""

    K: float = 4.0
    fast_last_level: bool = True


def estimate_flips(n: int, a: int) -> int:
    """Flip count for the level-a test: n/2 if the candidate a_sym values are even."""
    return n // 2 if a % 2 else n // 2 - 1


def estimate_samples(n: int, a: int, K: float) -> int:
    return max(sample_size_Na(n, a - 1, K), sample_size_Na(n, a + 1, K))


def estimate_threshold(n: int, a: int) -> Fraction | float:
    """(p_{a+1} + p_{a-1}) / 2, exact for n <= EXACT_LIMIT."""
    if n <= EXACT_LIMIT:
        return (p_flip(n, a + 1) + p_flip(n, a - 1)) / 2
    return (p_flip_value(n, a + 1) + p_flip_value(n, a - 1)) / 2


def estimate_sym(oracle: QueryOracle, rng: RngStream, y: Handle, a: int,
                 cfg: ExtremeEstimatorConfig | None = None) -> int:
    """Decide whether a_sym(y) is a - 1 or a + 1."""
    cfg = cfg or ExtremeEstimatorConfig()
    n = oracle.n
    half = _require_extreme(oracle)
    if not 1 <= a <= half - 1:
        raise ValueError(f"a must be in [1, n/2 - 1], got {a}")
    fy = oracle.fitness(y)
    if a == half - 1:
        return half if fy == half else half - 2
    if a == 1:
        if fy == n or sample_complement(oracle, rng, y).fitness == n:
            return 0
        return 2
    N = estimate_samples(n, a, cfg.K)
    batch = sample_flip_k_batch(oracle, rng, y, estimate_flips(n, a), N)
    hits = batch.count(half)
    return a + 1 if hits < N * estimate_threshold(n, a) else a - 1


def unary_extreme_optimize(oracle: QueryOracle, rng: RngStream,
                           cfg: ExtremeEstimatorConfig | None = None,
                           trace: list | None = None) -> Handle | None:
    """Descend a_sym one level at a time, then complement.

    ``trace``, if given, receives the number of candidates tried per level.
    """
    cfg = cfg or ExtremeEstimatorConfig()
    n = oracle.n
    half = _require_extreme(oracle)
    s = _first_visible(oracle, rng, (half, n))
    if s.fitness == n:
        return s.handle
    x = sample_flip_k(oracle, rng, s.handle, 1).handle
    for a in range(half - 1, 0, -1):
        if a == 1 and cfg.fast_last_level and oracle.remaining() is not None:
            x, tries = _last_level(oracle, rng, x)
            if trace is not None:
                trace.append((a, tries))
            continue
        tries = 0
        while True:
            tries += 1
            y = sample_flip_k(oracle, rng, x, 1).handle
            if estimate_sym(oracle, rng, y, a, cfg) == a - 1:
                x = y
                break
        if trace is not None:
            trace.append((a, tries))
    c = sample_complement(oracle, rng, x)
    if c.fitness == n:
        return c.handle
    return x if oracle.fitness(x) == n else None


def _last_level(oracle: QueryOracle, rng: RngStream, x: Handle) -> tuple[Handle, int]:
    """The a = 1 retry loop, simulated exactly from the weight of x.

    A try flips one bit and, unless that hit the optimum, queries the
    complement; it succeeds iff the flipped string is all-ones or all-zeros.
    Failed tries are counted in bulk (two queries each, never the optimum);
    the successful offspring is then drawn conditioned on success.  When no
    try can succeed the loop would run until the attempt budget is spent,
    which is what happens here.
    """
    n = oracle.n
    bits = oracle._bits(x)
    w = bits.value.bit_count()
    ones = set_positions(bits.value)
    zeros = set_positions(full_mask(n) & ~bits.value)
    good = (zeros if w == n - 1 else []) + (ones if w == 1 else [])
    if not good:
        oracle.record_batch(oracle.remaining() + 1, hit_last=False)
    failures = int(rng.np.geometric(len(good) / n)) - 1
    if failures:
        oracle.record_batch(2 * failures, hit_last=False)
    pos = good[rng.py.randrange(len(good))]
    y = oracle.submit(BitString(n, bits.value ^ (1 << pos)))
    if y.fitness != n:
        sample_complement(oracle, rng, y.handle)
    return y.handle, failures + 1


def unary_extreme_expected_queries(n: int, K: float = 4.0) -> float:
    """Expected queries of one error-free descent: sum over levels of (n/a) * cost per try."""
    half = n // 2
    total = 0.0
    for a in range(1, half):
        if a == half - 1:
            per_try = 1
        elif a == 1:
            per_try = 2
        else:
            per_try = 1 + estimate_samples(n, a, K)
        total += n / a * per_try
    return total
