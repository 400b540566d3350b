"""Exact combinatorics, hypergeometric sampling and concentration bounds.

Probabilities that feed decision thresholds are kept as ``Fraction`` values
(reduced, arbitrary precision) up to ``EXACT_LIMIT``; beyond it the log-gamma
versions are used.  Both are always available for cross-checks.
"""
from __future__ import annotations

import math
from bisect import bisect_right
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .bits import RngStream

ExactProb = Fraction

EXACT_LIMIT = 128

# rational bracket around pi, good to 1e-14
PI_LO = Fraction(314159265358979, 10**14)
PI_HI = Fraction(314159265358980, 10**14)


def binom_exact(n: int, k: int) -> int:
    if n < 0 or k < 0 or k > n:
        raise ValueError(f"binomial out of range: C({n}, {k})")
    return math.comb(n, k)


def log_binom(n: int, k: int) -> float:
    if n < 0 or k < 0 or k > n:
        raise ValueError(f"binomial out of range: C({n}, {k})")
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def _check_even_n(n: int) -> None:
    if n < 2 or n % 2:
        raise ValueError(f"n must be even and positive, got {n}")


def p_flip_even(n: int, a: int) -> Fraction:
    """P(weight n/2 after flipping n/2 bits of a point with min(|x|_1, |x|_0) = a), a even."""
    _check_even_n(n)
    if a % 2 or not 0 <= a <= n:
        raise ValueError(f"p_flip_even needs even a in [0, n], got {a}")
    num = math.comb(n - a, (n - a) // 2) * math.comb(a, a // 2)
    return Fraction(num, math.comb(n, n // 2))


def p_flip_odd(n: int, a: int) -> Fraction:
    """Same as :func:`p_flip_even` for odd a, flipping n/2 - 1 bits."""
    _check_even_n(n)
    if a % 2 == 0 or not 0 < a < n:
        raise ValueError(f"p_flip_odd needs odd a in (0, n), got {a}")
    num = math.comb(n - a, (n - a - 1) // 2) * math.comb(a, (a - 1) // 2)
    return Fraction(num, math.comb(n, n // 2 - 1))


def p_flip(n: int, a: int) -> Fraction:
    return p_flip_odd(n, a) if a % 2 else p_flip_even(n, a)


def log_p_flip(n: int, a: int) -> float:
    """Natural log of :func:`p_flip`, via log-gamma."""
    _check_even_n(n)
    if a % 2:
        if not 0 < a < n:
            raise ValueError(f"odd a out of range: {a}")
        return (log_binom(n - a, (n - a - 1) // 2) + log_binom(a, (a - 1) // 2)
                - log_binom(n, n // 2 - 1))
    if not 0 <= a <= n:
        raise ValueError(f"even a out of range: {a}")
    return log_binom(n - a, (n - a) // 2) + log_binom(a, a // 2) - log_binom(n, n // 2)


def p_flip_value(n: int, a: int) -> float | Fraction:
    """Exact for n <= EXACT_LIMIT, float from log space beyond."""
    if n <= EXACT_LIMIT:
        return p_flip(n, a)
    return math.exp(log_p_flip(n, a))


def p_diff(n: int, a: int) -> Fraction:
    """p_{a-2} - p_a from the closed forms (no subtraction of the two masses)."""
    _check_even_n(n)
    if a % 2 == 0:
        if not 2 <= a <= n:
            raise ValueError(f"even a must be in [2, n], got {a}")
        lead = Fraction(math.comb(n - a + 2, (n - a + 2) // 2) * math.comb(a, a // 2),
                        math.comb(n, n // 2))
        return lead * Fraction(n - 2 * a + 2, 4 * (n - a + 1) * (a - 1))
    if not 3 <= a < n:
        raise ValueError(f"odd a must be in [3, n), got {a}")
    lead = Fraction(math.comb(n - a + 2, (n - a + 1) // 2) * math.comb(a, (a - 1) // 2),
                    math.comb(n, n // 2 - 1))
    return lead * Fraction(n - 2 * a + 2, 4 * a * (n - a + 2))


def sample_size_Na(n: int, a: int, K: float) -> int:
    """ceil(K a^(5/2) n^2 / (n - 2a)^(3/2))."""
    if a < 0 or 2 * a >= n:
        raise ValueError(f"need 0 <= a < n/2, got n={n}, a={a}")
    if K <= 0:
        raise ValueError("K must be positive")
    return math.ceil(K * a**2.5 * n * n / (n - 2 * a) ** 1.5)


def robbins_check(m: int) -> bool:
    """4^m/sqrt(2 pi m) <= C(2m, m) <= 4^m/sqrt(pi m), decided in exact arithmetic."""
    if m < 1:
        raise ValueError("m must be >= 1")
    c2 = math.comb(2 * m, m) ** 2
    p16 = 16**m
    # squared form; the pi bracket makes each side conservative
    lower_ok = c2 * 2 * m * PI_LO >= p16
    upper_ok = c2 * m * PI_HI <= p16
    return lower_ok and upper_ok


def robbins_ratio(m: int) -> float:
    """C(2m, m) sqrt(pi m) / 4^m, which tends to 1 from below."""
    return math.exp(log_binom(2 * m, m) + 0.5 * math.log(math.pi * m) - m * math.log(4))


def chernoff_tail(d: float, m: int) -> float:
    """Two-sided additive bound 2 exp(-d^2 / (2m)) for m negatively correlated +-1 variables."""
    if d < 0 or m < 1:
        raise ValueError("need d >= 0 and m >= 1")
    return 2.0 * math.exp(-d * d / (2.0 * m))


def chernoff_one_sided(d: float, m: int) -> float:
    """exp(-2 d^2 / m) for m negatively correlated binary variables."""
    if d < 0 or m < 1:
        raise ValueError("need d >= 0 and m >= 1")
    return math.exp(-2.0 * d * d / m)


# -- hypergeometric -------------------------------------------------------

def _check_hypergeom(N: int, K: int, draws: int) -> None:
    if not (0 <= K <= N and 0 <= draws <= N):
        raise ValueError(f"hypergeometric out of range: N={N}, K={K}, draws={draws}")


@lru_cache(maxsize=4096)
def hypergeom_pmf_exact(N: int, K: int, draws: int) -> tuple[Fraction, ...]:
    """Exact masses P(marked = j) for j = 0..draws."""
    _check_hypergeom(N, K, draws)
    total = math.comb(N, draws)
    return tuple(Fraction(math.comb(K, j) * math.comb(N - K, draws - j), total)
                 if j <= K and draws - j <= N - K else Fraction(0)
                 for j in range(draws + 1))


@lru_cache(maxsize=4096)
def _hypergeom_cdf(N: int, K: int, draws: int) -> tuple[float, ...]:
    acc = Fraction(0)
    cdf = []
    for p in hypergeom_pmf_exact(N, K, draws):
        acc += p
        cdf.append(float(acc))
    cdf[-1] = 1.0
    return tuple(cdf)


def hypergeom_sample(rng: RngStream, N: int, K: int, draws: int) -> int:
    """Marked items among ``draws`` taken without replacement (inverse transform)."""
    _check_hypergeom(N, K, draws)
    if draws == 0:
        return 0
    cdf = _hypergeom_cdf(N, K, draws)
    return min(bisect_right(cdf, rng.py.random()), draws)


def weight_only_step(rng: RngStream, n: int, w: int, flips: int) -> int:
    """Offspring weight after flipping ``flips`` uniformly chosen bits of a weight-``w`` string."""
    if not (0 <= w <= n and 0 <= flips <= n):
        raise ValueError(f"out of range: n={n}, w={w}, flips={flips}")
    z = hypergeom_sample(rng, n, w, flips)
    return w + flips - 2 * z


@lru_cache(maxsize=4096)
def offspring_weight_pmf(n: int, w: int, flips: int) -> np.ndarray:
    """Distribution of the offspring weight (index 0..n) for flip-exactly-``flips``."""
    pmf = np.zeros(n + 1)
    for z, p in enumerate(hypergeom_pmf_exact(n, w, flips)):
        if p:
            pmf[w + flips - 2 * z] += float(p)
    pmf /= pmf.sum()
    pmf.flags.writeable = False
    return pmf


def draw_until_stop(rng: RngStream, pmf: np.ndarray, count: int,
                    stop: np.ndarray) -> tuple[np.ndarray, int, int | None]:
    """Draw up to ``count`` i.i.d. outcomes from ``pmf``, halting at the first one in ``stop``.

    Returns ``(counts, consumed, stop_outcome)``: histogram of the non-stopping
    outcomes drawn, the number of draws consumed (including the stopping one)
    and the stopping outcome or ``None``.  Exact in distribution: the number of
    leading non-stop draws is geometric, and given it they are multinomial with
    the conditioned masses.
    """
    gen = rng.np
    q = float(pmf[stop].sum())
    if q <= 0.0:
        lead, stopped = count, False
    else:
        lead = int(gen.geometric(q)) - 1
        stopped = lead < count
        lead = min(lead, count)
    counts = np.zeros(len(pmf), dtype=np.int64)
    if lead > 0:
        free = np.where(stop, 0.0, pmf)
        free /= free.sum()
        counts = gen.multinomial(lead, free).astype(np.int64)
    if not stopped:
        return counts, lead, None
    halt = np.where(stop, pmf, 0.0)
    halt /= halt.sum()
    outcome = int(gen.choice(len(pmf), p=halt))
    return counts, lead + 1, outcome
