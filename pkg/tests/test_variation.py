import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import chisquare

from jumplab.bits import BitString, RngStream, distance, weight, xor_combine
from jumplab.objective import JumpObjective, QueryOracle, onemax
from jumplab.stats import hypergeom_pmf_exact
from jumplab.variation import (
    OPERATORS,
    apply,
    complement,
    copy_where_differs,
    flip_k,
    flip_where_different,
    flip_where_equal,
    mix,
    sample_flip_k,
    sample_flip_k_batch,
    select_bit,
    uniform_in_subcube,
    uniform_sample,
)

B = BitString.from_str


def test_flip_k_edges(rng):
    x = B("101100")
    assert flip_k(rng, x, 0) == x
    assert flip_k(rng, x, 6) == complement(x)
    with pytest.raises(ValueError):
        flip_k(rng, x, 7)


def test_flip_k_pairs_uniform(rng):
    x = B("000000")
    counts = Counter(flip_k(rng, x, 2).value for _ in range(30_000))
    assert len(counts) == 15
    assert chisquare(list(counts.values())).pvalue > 1e-3


def test_flip_where_equal_examples(rng):
    assert flip_where_equal(rng, B("11"), B("10"), 1) == B("01")
    x = B("1100")
    assert flip_where_equal(rng, x, complement(x), 2) == x
    y = flip_where_equal(rng, x, x, 3)
    assert distance(x, y) == 3


def test_flip_where_different_examples(rng):
    assert flip_where_different(rng, B("10"), B("01"), 2) == B("01")
    x = B("110010")
    seen = {flip_where_different(rng, x, x, 1).value for _ in range(400)}
    assert len(seen) > 30  # falls back to uniform strings


def test_select_bit_and_copy_examples():
    assert select_bit(B("0000"), B("0011"), B("0001")) == B("0010")
    x, y = B("1111"), B("0011")
    assert copy_where_differs(x, y, B("0000")) == B("1111")
    assert copy_where_differs(x, y, B("1111")) == B("0011")
    assert copy_where_differs(x, y, y) == x
    assert copy_where_differs(x, y, x) == y


@settings(max_examples=200)
@given(st.integers(1, 8).flatmap(lambda n: st.tuples(
    *[st.integers(0, (1 << n) - 1).map(lambda v, n=n: BitString(n, v))] * 3)))
def test_select_bit_is_double_xor(triple):
    x, y, z = triple
    assert select_bit(x, y, z) == xor_combine(x, xor_combine(y, z))


def test_mix(rng):
    out = Counter(mix(rng, B("10"), B("01")).to_str() for _ in range(4000))
    assert set(out) == {"11", "00"}
    assert abs(out["11"] - 2000) < 4 * math.sqrt(1000)
    # differing bits equal in x: one gained and one lost
    x, y = B("1101"), B("0001")
    for _ in range(50):
        assert weight(mix(rng, x, y)) == (weight(x) + weight(y)) // 2
    far = {mix(rng, B("000000"), B("111100")).value for _ in range(300)}
    assert len(far) > 20


def test_uniform_sample(rng):
    counts = Counter(uniform_sample(rng, 4).value for _ in range(32_000))
    assert len(counts) == 16
    assert chisquare(list(counts.values())).pvalue > 1e-3


def test_subcube_sampler_stays_in_cube(rng):
    x, y = B("110000"), B("101100")
    for _ in range(100):
        z = uniform_in_subcube(rng, x, y)
        assert (z.value ^ x.value) & ~(x.value ^ y.value) == 0


def test_deterministic_operators_ignore_rng():
    x, y, z = B("1101"), B("0111"), B("0001")
    for name in ("select_bit", "copy_where_differs"):
        op = OPERATORS[name]
        assert op(RngStream(1), x, y, z) == op(RngStream(2), x, y, z)
    assert OPERATORS["complement"](RngStream(3), x) == complement(x)


def test_arity_is_enforced(rng):
    with pytest.raises(ValueError):
        OPERATORS["mix"](rng, B("10"))


def test_flip_k_weight_law_matches_hypergeometric(rng):
    n, w, k = 12, 5, 4
    x = BitString(n, (1 << w) - 1)
    obs = Counter(weight(flip_k(rng, x, k)) for _ in range(40_000))
    pmf = hypergeom_pmf_exact(n, w, k)
    support = [w + k - 2 * z for z in range(k + 1) if pmf[z]]
    expected = [float(pmf[(w + k - v) // 2]) * 40_000 for v in support]
    assert chisquare([obs[v] for v in support], expected).pvalue > 1e-3


def test_apply_submits_once(rng):
    oracle = QueryOracle(onemax(6))
    h = apply(oracle, rng, OPERATORS["uniform_sample"]).handle
    apply(oracle, rng, OPERATORS["flip_k"], (h,), k=2)
    assert oracle.query_count == 2


def test_batch_counts_queries_and_histogram(rng):
    oracle = QueryOracle(JumpObjective(20, 3))
    x = oracle.submit(BitString(20, (1 << 10) - 1)).handle
    res = sample_flip_k_batch(oracle, rng, x, 4, 5000)
    assert res.queries == 5000 and sum(res.counts.values()) == 5000
    assert oracle.query_count == 5001 and oracle.batched == 5000


def test_batch_matches_bit_level_sampling(rng):
    n, k = 16, 5
    oracle = QueryOracle(JumpObjective(n, 2))
    x = oracle.submit(BitString(n, (1 << 11) - 1)).handle
    fast = sample_flip_k_batch(oracle, rng, x, k, 30_000).counts
    slow = Counter(sample_flip_k(oracle, rng, x, k).fitness for _ in range(30_000))
    keys = sorted(set(fast) | set(slow))
    table = np.array([[fast.get(v, 0) for v in keys], [slow.get(v, 0) for v in keys]])
    from scipy.stats import chi2_contingency
    assert chi2_contingency(table)[1] > 1e-3


def test_batch_stops_on_zero(rng):
    oracle = QueryOracle(JumpObjective(10, 4))
    x = oracle.submit(BitString(10, 0b11111)).handle
    res = sample_flip_k_batch(oracle, rng, x, 2, 10_000, stop_on_zero=True)
    assert res.stopped_on_zero and res.count(0) == 1
    assert oracle.query_count == 1 + res.queries


def test_batch_records_first_hit_position():
    rng = RngStream(5)
    oracle = QueryOracle(onemax(6))
    x = oracle.submit(BitString(6, 0b011111)).handle
    sample_flip_k_batch(oracle, rng, x, 1, 600)
    assert oracle.first_hit is not None and 2 <= oracle.first_hit <= 601


def test_batch_skipping_zeros_charges_them(rng):
    n, ell, k, count = 20, 5, 7, 20_000
    oracle = QueryOracle(JumpObjective(n, ell))
    x = oracle.submit(BitString(n, (1 << 14) - 1)).handle
    from jumplab.stats import offspring_weight_pmf
    q = float(offspring_weight_pmf(n, 14, k)[oracle._table == 0].sum())
    res = sample_flip_k_batch(oracle, rng, x, k, count, skip_zero=True)
    zeros = res.count(0)
    assert res.queries == count + zeros == oracle.batched
    mean = count * q / (1 - q)
    assert abs(zeros - mean) < 5 * math.sqrt(mean / (1 - q))
    with pytest.raises(ValueError):
        sample_flip_k_batch(oracle, rng, x, k, 5, stop_on_zero=True, skip_zero=True)
