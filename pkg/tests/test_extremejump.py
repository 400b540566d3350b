import math

import pytest

from jumplab.bits import BitString, RngStream, weight
from jumplab.extremejump import (
    _last_level,
    ExtremeEstimatorConfig,
    SymmetricState,
    binary_extreme_optimize,
    estimate_flips,
    estimate_sym,
    estimate_threshold,
    is_opposing_pair,
    movefirst,
    ternary_extreme_optimize,
    unary_extreme_expected_queries,
    unary_extreme_optimize,
)
from jumplab.objective import BudgetExhausted, JumpObjective, OptimumFound, QueryOracle, extreme
from jumplab.stats import p_flip

B = BitString.from_str


def test_symmetric_state():
    s = SymmetricState.of(B("111110"))
    assert (s.d, s.sgn, s.a_sym) == (2, 1, 1)
    assert SymmetricState.of(B("1100")).sgn == 0
    assert is_opposing_pair(B("111000"), B("100000"), 1) is False
    assert is_opposing_pair(B("111100"), B("110000"), 1)
    with pytest.raises(ValueError):
        SymmetricState.of(B("111"))


def test_requires_extreme_objective(rng):
    with pytest.raises(ValueError):
        ternary_extreme_optimize(QueryOracle(JumpObjective(20, 3)), rng)


@pytest.mark.parametrize("n", [6, 20, 100])
def test_ternary_probes_every_position(n):
    for seed in range(10):
        oracle = QueryOracle(extreme(n))
        trace = {}
        out = ternary_extreme_optimize(oracle, RngStream(seed), trace)
        assert oracle.reveal(out) == BitString.ones(n)
        if not trace:
            continue
        x = oracle.reveal(trace["x"]).value
        diffs = [oracle.reveal(y).value ^ x for y in trace["y"]]
        assert all(d.bit_count() == 1 for d in diffs)
        assert sum(diffs) == (1 << n) - 1


def test_ternary_cost_is_linear():
    n = 100
    oracle = QueryOracle(extreme(n), stop_on_optimum=True)
    with pytest.raises(OptimumFound):
        ternary_extreme_optimize(oracle, RngStream(1))
    assert oracle.first_hit <= 6 * n


def _opposing_pair(oracle, n, k, rng):
    ones = rng.py.sample(range(n), n // 2 + k)
    x = sum(1 << i for i in ones)
    drop = rng.py.sample(ones, 2 * k)
    y = x ^ sum(1 << i for i in drop)
    return oracle.submit(BitString(n, x)).handle, oracle.submit(BitString(n, y)).handle


@pytest.mark.parametrize("k", [1, 3, 7])
def test_movefirst_moves_outward(k):
    n = 32
    rng = RngStream(k)
    wrong = 0
    for _ in range(100):
        oracle = QueryOracle(extreme(n))
        x, y = _opposing_pair(oracle, n, k, rng)
        x2 = movefirst(oracle, rng, x, y, k)
        bx, bx2 = oracle.reveal(x), oracle.reveal(x2)
        assert (bx.value ^ bx2.value).bit_count() == 1
        wrong += weight(bx2) != n // 2 + k + 1
    assert wrong <= 3


def test_binary_pairs_grow_by_one():
    n = 32
    for seed in range(10):
        oracle = QueryOracle(extreme(n))
        trace = []
        out = binary_extreme_optimize(oracle, RngStream(seed), trace)
        if not trace:
            continue
        for k, (x, y) in enumerate(trace, start=1):
            assert is_opposing_pair(oracle.reveal(x), oracle.reveal(y), k)
        assert oracle.reveal(out) == BitString.ones(n)


def test_estimate_flips_and_threshold():
    assert estimate_flips(20, 3) == 10 and estimate_flips(20, 4) == 9
    t = estimate_threshold(20, 4)
    assert t == (p_flip(20, 5) + p_flip(20, 3)) / 2
    assert isinstance(estimate_threshold(300, 4), float)


def _point_with_asym(n, a, high, rng):
    w = n - a if high else a
    ones = rng.py.sample(range(n), w)
    return BitString(n, sum(1 << i for i in ones))


@pytest.mark.parametrize("a", [2, 5, 8])
def test_estimate_sym_separates_neighbouring_levels(a):
    n = 24
    rng = RngStream(a)
    oracle = QueryOracle(extreme(n))
    errors = 0
    for truth in (a - 1, a + 1):
        for high in (False, True):
            for _ in range(25):
                h = oracle.submit(_point_with_asym(n, truth, high, rng)).handle
                errors += estimate_sym(oracle, rng, h, a) != truth
    assert errors <= 3


def test_estimate_sym_boundary_levels(rng):
    n = 12
    oracle = QueryOracle(extreme(n))
    mid = oracle.submit(_point_with_asym(n, 6, True, rng)).handle
    off = oracle.submit(_point_with_asym(n, 4, True, rng)).handle
    assert estimate_sym(oracle, rng, mid, 5) == 6
    assert estimate_sym(oracle, rng, off, 5) == 4
    zeros = oracle.submit(BitString.zeros(n)).handle
    two = oracle.submit(_point_with_asym(n, 2, False, rng)).handle
    assert estimate_sym(oracle, rng, zeros, 1) == 0
    assert estimate_sym(oracle, rng, two, 1) == 2
    with pytest.raises(ValueError):
        estimate_sym(oracle, rng, two, 6)


def test_unary_descends_one_level_at_a_time():
    n = 16
    oracle = QueryOracle(extreme(n), stop_on_optimum=True)
    trace = []
    with pytest.raises(OptimumFound):
        unary_extreme_optimize(oracle, RngStream(3), trace=trace)
    levels = [a for a, _ in trace]
    assert levels == list(range(n // 2 - 1, n // 2 - 1 - len(levels), -1))


def test_last_level_shortcut_spends_budget_when_stuck():
    n = 16
    oracle = QueryOracle(extreme(n), budget=5000)
    rng = RngStream(2)
    # a point at a_sym = 3 can never pass the final test
    x = oracle.submit(_point_with_asym(n, 3, True, rng)).handle
    with pytest.raises(BudgetExhausted):
        _last_level(oracle, rng, x)
    assert oracle.query_count == 5000


def test_last_level_shortcut_finds_optimum():
    n = 16
    oracle = QueryOracle(extreme(n), budget=10**6, stop_on_optimum=True)
    rng = RngStream(2)
    x = oracle.submit(_point_with_asym(n, 1, True, rng)).handle
    with pytest.raises(OptimumFound):
            _last_level(oracle, rng, x)
    assert oracle.query_count == oracle.stored + oracle.batched


def test_expected_cost_grows_polynomially():
    c16, c32 = unary_extreme_expected_queries(16), unary_extreme_expected_queries(32)
    assert 10 < c32 / c16 < 2 ** 4.5 * 2


def test_config_scales_samples(rng):
    n = 24
    oracle = QueryOracle(extreme(n))
    h = oracle.submit(_point_with_asym(n, 3, False, rng)).handle
    before = oracle.query_count
    estimate_sym(oracle, rng, h, 4, ExtremeEstimatorConfig(K=1))
    small = oracle.query_count - before
    before = oracle.query_count
    estimate_sym(oracle, rng, h, 4, ExtremeEstimatorConfig(K=8))
    assert oracle.query_count - before >= 7 * small
