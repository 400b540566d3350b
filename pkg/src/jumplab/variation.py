"""Unbiased variation operators.

Each operator has a pure sampler working on :class:`BitString` values and an
oracle-facing wrapper ``sample_<name>(oracle, rng, *handles)`` that resolves
the parent handles, draws the offspring and submits it (one application, one
query).  Degenerate inputs follow the published operator definitions:
``flip_where_equal`` flips every agreeing bit when fewer than ``k`` agree,
``flip_where_different`` and ``mix`` fall back to a uniform random string.

``sample_flip_k_batch`` is the weight-only fast path for repeated unary
sampling when only the offspring fitnesses are needed; it draws from the
exact offspring-weight law and does not store the offspring.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .bits import BitString, RngStream, full_mask, random_bits, set_positions
from .objective import Handle, QueryOracle, Sample
from .stats import draw_until_stop, offspring_weight_pmf


def _flip_among(rng: RngStream, x: BitString, mask: int, k: int) -> BitString:
    positions = set_positions(mask)
    if k >= len(positions):
        return BitString(x.n, x.value ^ mask)
    flip = 0
    for i in rng.py.sample(positions, k):
        flip |= 1 << i
    return BitString(x.n, x.value ^ flip)


def uniform_sample(rng: RngStream, n: int) -> BitString:
    return random_bits(rng, n)


def flip_k(rng: RngStream, x: BitString, k: int) -> BitString:
    if not 0 <= k <= x.n:
        raise ValueError(f"cannot flip {k} of {x.n} bits")
    if k == 0:
        return x
    flip = 0
    for i in rng.py.sample(range(x.n), k):
        flip |= 1 << i
    return BitString(x.n, x.value ^ flip)


def flip_where_equal(rng: RngStream, x: BitString, y: BitString, k: int) -> BitString:
    agree = ~(x.value ^ y.value) & full_mask(x.n)
    return _flip_among(rng, x, agree, k)


def flip_where_different(rng: RngStream, x: BitString, y: BitString, k: int) -> BitString:
    differ = x.value ^ y.value
    if differ.bit_count() < k:
        return random_bits(rng, x.n)
    return _flip_among(rng, x, differ, k)


def select_bit(x: BitString, y: BitString, z: BitString) -> BitString:
    """x with the bits flipped where y and z differ."""
    return BitString(x.n, x.value ^ y.value ^ z.value)


def copy_where_differs(x: BitString, y: BitString, z: BitString) -> BitString:
    """x, except y's bits where y and z differ."""
    d = y.value ^ z.value
    return BitString(x.n, (x.value & ~d) | (y.value & d))


def complement(x: BitString) -> BitString:
    return BitString(x.n, x.value ^ full_mask(x.n))


def mix(rng: RngStream, x: BitString, y: BitString) -> BitString:
    d = x.value ^ y.value
    if d.bit_count() != 2:
        return random_bits(rng, x.n)
    i, j = set_positions(d)
    # inherit one differing bit from each parent; both patterns equally likely
    take = (1 << j) if rng.py.random() < 0.5 else (1 << i)
    return BitString(x.n, x.value ^ take)


def uniform_in_subcube(rng: RngStream, x: BitString, y: BitString) -> BitString:
    """Uniform point of [x, y]: agrees with x wherever x and y agree."""
    d = x.value ^ y.value
    return BitString(x.n, x.value ^ (rng.py.getrandbits(x.n) & d))


def flip_in_subcube(rng: RngStream, z: BitString, x: BitString, y: BitString, k: int) -> BitString:
    """Flip k random bits of z among the positions where x and y differ."""
    return _flip_among(rng, z, x.value ^ y.value, k)


@dataclass(frozen=True)
class VariationOperator:
    name: str
    arity: int
    sampler: Callable[..., BitString]
    deterministic: bool = False
    params: tuple[str, ...] = field(default=())

    def __call__(self, rng: RngStream, *parents: BitString, **params) -> BitString:
        if len(parents) != self.arity:
            raise ValueError(f"{self.name} takes {self.arity} parents")
        if self.deterministic:
            return self.sampler(*parents)
        return self.sampler(rng, *parents, **params)


OPERATORS: dict[str, VariationOperator] = {
    op.name: op for op in (
        VariationOperator("uniform_sample", 0, lambda rng, n: uniform_sample(rng, n), params=("n",)),
        VariationOperator("flip_k", 1, flip_k, params=("k",)),
        VariationOperator("flip_where_equal", 2, flip_where_equal, params=("k",)),
        VariationOperator("flip_where_different", 2, flip_where_different, params=("k",)),
        VariationOperator("select_bit", 3, select_bit, deterministic=True),
        VariationOperator("copy_where_differs", 3, copy_where_differs, deterministic=True),
        VariationOperator("complement", 1, complement, deterministic=True),
        VariationOperator("mix", 2, mix),
        VariationOperator("uniform_in_subcube", 2, uniform_in_subcube),
        VariationOperator("flip_in_subcube", 3, flip_in_subcube, params=("k",)),
    )
}


# -- oracle-facing wrappers ----------------------------------------------

def apply(oracle: QueryOracle, rng: RngStream, op: VariationOperator,
          parents: tuple[Handle, ...] = (), **params) -> Sample:
    bits = tuple(oracle._bits(h) for h in parents)
    if op.arity == 0:
        child = op.sampler(rng, oracle.n)
    else:
        child = op(rng, *bits, **params)
    return oracle.submit(child)


def sample_uniform(oracle: QueryOracle, rng: RngStream) -> Sample:
    return oracle.submit(uniform_sample(rng, oracle.n))


def sample_flip_k(oracle, rng, x: Handle, k: int) -> Sample:
    return oracle.submit(flip_k(rng, oracle._bits(x), k))


def sample_flip_where_equal(oracle, rng, x: Handle, y: Handle, k: int) -> Sample:
    return oracle.submit(flip_where_equal(rng, oracle._bits(x), oracle._bits(y), k))


def sample_flip_where_different(oracle, rng, x: Handle, y: Handle, k: int) -> Sample:
    return oracle.submit(flip_where_different(rng, oracle._bits(x), oracle._bits(y), k))


def sample_select_bit(oracle, rng, x: Handle, y: Handle, z: Handle) -> Sample:
    return oracle.submit(select_bit(oracle._bits(x), oracle._bits(y), oracle._bits(z)))


def sample_copy_where_differs(oracle, rng, x: Handle, y: Handle, z: Handle) -> Sample:
    return oracle.submit(copy_where_differs(oracle._bits(x), oracle._bits(y), oracle._bits(z)))


def sample_complement(oracle, rng, x: Handle) -> Sample:
    return oracle.submit(complement(oracle._bits(x)))


def sample_mix(oracle, rng, x: Handle, y: Handle) -> Sample:
    return oracle.submit(mix(rng, oracle._bits(x), oracle._bits(y)))


def sample_uniform_in_subcube(oracle, rng, x: Handle, y: Handle) -> Sample:
    return oracle.submit(uniform_in_subcube(rng, oracle._bits(x), oracle._bits(y)))


def sample_flip_in_subcube(oracle, rng, z: Handle, x: Handle, y: Handle, k: int) -> Sample:
    return oracle.submit(flip_in_subcube(rng, oracle._bits(z), oracle._bits(x), oracle._bits(y), k))


@dataclass
class BatchResult:
    """Fitness histogram of a batch of flip_k offspring."""

    counts: dict[int, int]
    queries: int
    stopped_on_zero: bool = False

    def total(self) -> int:
        return sum(f * c for f, c in self.counts.items())

    def count(self, value: int) -> int:
        return self.counts.get(value, 0)


def sample_flip_k_batch(oracle: QueryOracle, rng: RngStream, x: Handle, k: int,
                        count: int, stop_on_zero: bool = False,
                        skip_zero: bool = False) -> BatchResult:
    """``count`` independent flip_k offspring of ``x``, each counted as one query.

    With ``stop_on_zero`` the batch ends right after the first offspring of
    fitness 0.  With ``skip_zero`` fitness-0 offspring do not count towards
    ``count``: drawing goes on until ``count`` visible offspring were seen,
    and every zero drawn on the way is still charged as a query (reported
    under fitness 0).  Offspring equal to the optimum go through the
    oracle's first-hit accounting at their exact position in the batch.
    """
    n = oracle.n
    if not 0 <= k <= n:
        raise ValueError(f"cannot flip {k} of {n} bits")
    if stop_on_zero and skip_zero:
        raise ValueError("stop_on_zero and skip_zero exclude each other")
    pmf = offspring_weight_pmf(n, oracle._weight(x), k)
    table = oracle._table
    blank = table == 0
    q_zero = float(pmf[blank].sum()) if skip_zero else 0.0
    if skip_zero and q_zero > 0:
        if q_zero >= 1.0:
            if oracle.remaining() is None:
                raise RuntimeError("every offspring is blanked; the batch cannot finish")
            oracle.record_batch(oracle.remaining() + 1, hit_last=False)
        pmf = np.where(blank, 0.0, pmf)
        pmf /= pmf.sum()
    stop = np.zeros(n + 1, dtype=bool)
    stop[n] = True
    if stop_on_zero:
        stop |= blank
    hist = np.zeros(n + 1, dtype=np.int64)
    done = 0
    zeros = 0
    zero = False
    while done < count:
        counts, consumed, outcome = draw_until_stop(rng, pmf, count - done, stop)
        extra = int(rng.np.negative_binomial(consumed, 1.0 - q_zero)) if q_zero and consumed else 0
        # the zeros interleaved with this segment come before its last draw
        oracle.record_batch(consumed + extra, hit_last=outcome == n)
        zeros += extra
        hist += counts
        done += consumed
        if outcome is None:
            break
        hist[outcome] += 1
        if outcome != n:
            zero = True
            break
    fitness_counts: dict[int, int] = {0: zeros} if zeros else {}
    for w in np.flatnonzero(hist):
        f = int(table[w])
        fitness_counts[f] = fitness_counts.get(f, 0) + int(hist[w])
    return BatchResult(fitness_counts, done + zeros, zero)
