import math
import statistics
from collections import Counter

import numpy as np
import pytest
from scipy.stats import chi2_contingency

from jumplab.bits import BitString, RngStream
from jumplab.longjump import (
    LongJumpConfig,
    block_layout,
    distance_from_sum,
    estimate_distance,
    estimator_eps,
    estimator_flips,
    estimator_sample_size,
    make_p_estimator,
    ternary_longjump_optimize,
    unary_longjump_optimize,
)
from jumplab.objective import JumpObjective, OptimumFound, QueryOracle


def test_flip_count_rounding():
    assert estimator_flips(40, 10) == 15
    assert estimator_flips(50, 12) == 19  # (50 + 24)/4 = 18.5 rounds up
    assert estimator_eps(40, 15) == 0.25
    with pytest.raises(ValueError):
        estimator_flips(4, 1)


def test_distance_from_sum_examples():
    # n=8 and k=2 (eps = 1/2): offspring fitnesses 6 and 4 against offset 6
    assert distance_from_sum(-2, 2, 8, 2) == 2
    assert distance_from_sum(-8, 2, 8, 2) == 8
    assert distance_from_sum(0, 5, 8, 2) == 0


def test_sample_size_formula():
    assert estimator_sample_size(100, 10, 0.5) == 6759
    assert estimator_sample_size(100, 0, 0.5) == math.ceil(24 * math.log(600) / 0.25)
    sizes = [estimator_sample_size(80, a, 0.3) for a in range(0, 81)]
    assert sizes == sorted(sizes)


def _at_distance(n, a):
    return BitString(n, ((1 << n) - 1) >> a)


def test_estimate_at_optimum_is_zero(rng):
    oracle = QueryOracle(JumpObjective(40, 10))
    x = oracle.submit(BitString.ones(40)).handle
    assert estimate_distance(oracle, rng, x, 100, 15) == 0
    assert oracle.query_count == 101


def test_estimator_is_accurate_near_optimum(rng):
    n, ell = 60, 15
    g = make_p_estimator(n, ell)
    oracle = QueryOracle(JumpObjective(n, ell))
    x = oracle.submit(_at_distance(n, 10)).handle
    assert all(g.estimate(oracle, rng, x, 10) == 10 for _ in range(200))


def test_zero_policies_agree_in_distribution():
    n, ell, a, T = 40, 10, 10, 200
    k = estimator_flips(n, ell)
    results, spent = {}, {}
    for policy in ("resample", "restart"):
        rng = RngStream(31)
        oracle = QueryOracle(JumpObjective(n, ell))
        x = oracle.submit(_at_distance(n, a)).handle
        results[policy] = Counter(estimate_distance(oracle, rng, x, T, k, zero_policy=policy)
                                  for _ in range(3000))
        spent[policy] = oracle.query_count
    keys = sorted(set(results["resample"]) | set(results["restart"]))
    table = np.array([[results[p].get(v, 0) for v in keys] for p in results])
    table = table[:, table.sum(axis=0) >= 10]
    assert chi2_contingency(table)[1] > 1e-3
    assert spent["restart"] > spent["resample"]


def test_restart_frequency_below_union_bound():
    n, ell, T = 60, 15, 40
    k = estimator_flips(n, ell)
    eps = estimator_eps(n, k)
    rng = RngStream(8)
    oracle = QueryOracle(JumpObjective(n, ell))
    x = oracle.submit(_at_distance(n, 15)).handle
    calls = 3000
    stats = {}
    for _ in range(calls):
        estimate_distance(oracle, rng, x, T, k, stats, zero_policy="restart")
    batches = calls + stats.get("zeros", 0)
    freq = stats.get("zeros", 0) / batches
    bound = min(1.0, 2 * T * math.exp(-eps**2 * n / 8))
    assert freq <= bound + 5 * math.sqrt(bound * (1 - bound) / batches)


def test_unknown_policy(rng):
    oracle = QueryOracle(JumpObjective(40, 10))
    x = oracle.submit(BitString.ones(40)).handle
    with pytest.raises(ValueError):
        estimate_distance(oracle, rng, x, 10, 15, zero_policy="skip")


def test_block_layout():
    assert block_layout(64, 16) == [16, 16, 16, 16]
    assert block_layout(20, 3) == [7, 7, 6]
    assert sum(block_layout(50, 12)) == 50


@pytest.mark.parametrize("n,ell", [(64, 16), (60, 17)])
def test_ternary_blocks_partition_positions(n, ell):
    for seed in range(5):
        oracle = QueryOracle(JumpObjective(n, ell))
        trace = {}
        out = ternary_longjump_optimize(oracle, RngStream(seed), trace=trace)
        x = oracle.reveal(trace["x"]).value
        covered = 0
        for i, (y, z, size) in enumerate(zip(trace["y"], trace["z"][1:], trace["sizes"])):
            d = oracle.reveal(y).value ^ x
            assert d.bit_count() == size
            assert covered & d == 0
            covered |= d
            assert (oracle.reveal(z).value ^ x).bit_count() == sum(trace["sizes"][:i + 1])
        assert covered == (1 << n) - 1
        if out is not None:
            assert oracle.reveal(out) == BitString.ones(n)


def test_ternary_phase_one_cost():
    for n in (64, 256):
        costs = []
        for seed in range(200):
            oracle = QueryOracle(JumpObjective(n, n // 4))
            trace = {}
            ternary_longjump_optimize(oracle, RngStream(seed), trace=trace)
            costs.append(trace["x"].id + 1)
        assert math.sqrt(n) <= statistics.fmean(costs) <= 10 * math.sqrt(n)


def test_ternary_needs_even_n(rng):
    with pytest.raises(ValueError):
        ternary_longjump_optimize(QueryOracle(JumpObjective(63, 15)), rng)


def test_unary_walk_reaches_optimum_and_rarely_revisits():
    n, ell = 40, 10
    leaves = Counter()
    visits = Counter()
    for seed in range(10):
        oracle = QueryOracle(JumpObjective(n, ell), stop_on_optimum=True)
        trace = []
        with pytest.raises(OptimumFound):
            unary_longjump_optimize(oracle, RngStream(seed), LongJumpConfig(), trace)
        levels = [n - oracle.reveal(h).value.bit_count() for h in trace]
        for a in set(levels):
            visits[a] += 1
        for a in levels[:-1]:
            leaves[a] += 1
    mean_leaves = sum(leaves.values()) / sum(visits.values())
    assert mean_leaves <= 3
