"""Verification batteries shared by the CLI ``verify`` command and the test suite.

Every check returns a :class:`CheckResult`; suites group them:

* ``operators``: unbiasedness of the variation operators (chi-square)
* ``stats``: exact combinatorics, Robbins bounds, concentration
* ``estimators``: OneMax recovery on short jumps, the distance estimator contract
* ``e2e``: end-to-end runs of every algorithm plus the query-accounting audit
"""
from __future__ import annotations

import itertools
import math
import statistics
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy.stats import chi2_contingency

from ..bits import BitString, RngStream, mix_seed
from ..longjump import make_p_estimator
from ..objective import JumpObjective, QueryOracle
from ..shortjump import simulate_onemax
from ..stats import (
    chernoff_tail,
    p_diff,
    p_flip,
    p_flip_even,
    p_flip_odd,
    robbins_check,
)
from ..variation import OPERATORS
from .fitting import loglog_slope, median_by_n
from .runner import RunConfig, execute


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


@dataclass
class AuditEntry:
    algorithm: str
    n: int
    seed: int
    recorded: int
    expected: int
    query_count: int
    stored_plus_batched: int
    budget: int | None
    success: bool

    def ok(self) -> bool:
        within = self.budget is None or self.query_count <= self.budget
        failed_at_budget = self.success or self.budget is None or self.query_count == self.budget
        return (self.recorded == self.expected and within and failed_at_budget
                and self.query_count == self.stored_plus_batched)


@dataclass
class AuditLog:
    entries: list[AuditEntry] = field(default_factory=list)


def run_audited(alg: str, n: int, reps: int, base_seed: int, audit: AuditLog | None = None,
                ell: int | None = None, budget=None):
    """Run ``reps`` seeded runs and log the oracle counters next to each record."""
    records = []
    for rep in range(reps):
        seed = mix_seed(base_seed, n * 1000 + rep)
        out = execute(RunConfig(alg, n, seed, ell, budget))
        r, o = out.record, out.oracle
        records.append(r)
        if audit is not None:
            audit.entries.append(AuditEntry(
                alg, n, seed, r.queries, o.first_hit if r.success else o.query_count,
                o.query_count, o.stored + o.batched, o.budget, r.success))
    return records


# -- operators ------------------------------------------------------------------

def _histogram(op, rng, parents, n, samples, params) -> np.ndarray:
    counts = np.zeros(1 << n, dtype=np.int64)
    if op.arity == 0:
        draw = lambda: op.sampler(rng, n)
    else:
        draw = lambda: op(rng, *parents, **params)
    for _ in range(samples):
        counts[draw().value] += 1
    return counts


def _permute(x: BitString, perm: list[int]) -> BitString:
    v = 0
    for i, j in enumerate(perm):
        if x.value >> i & 1:
            v |= 1 << j
    return BitString(x.n, v)


def _same_distribution(a: np.ndarray, b: np.ndarray) -> float:
    """p-value of a chi-square homogeneity test between two histograms."""
    keep = (a + b) > 0
    table = np.vstack([a[keep], b[keep]])
    if table.shape[1] == 1:
        return 1.0
    return float(chi2_contingency(table, correction=False)[1])


OPERATOR_CASES = {
    "uniform_sample": ((), {}),
    "flip_k": (("110100",), {"k": 2}),
    "flip_where_equal": (("110100", "011101"), {"k": 2}),
    "flip_where_different": (("110100", "011101"), {"k": 2}),
    "select_bit": (("110100", "100110", "011001"), {}),
    "copy_where_differs": (("110100", "100110", "011001"), {}),
    "complement": (("110100",), {}),
    "mix": (("110100", "100110"), {}),
}


def check_operator_unbiasedness(samples: int = 100_000, alpha: float = 1e-3,
                                seed: int = 11) -> CheckResult:
    """Shift and permutation covariance of each operator at n = 6."""
    n = 6
    rng = RngStream(seed)
    shift = BitString.from_str("101101")
    perm = [3, 0, 5, 1, 4, 2]
    inverse = [perm.index(i) for i in range(n)]
    worst = (1.0, "")
    failures = []
    for name, (parents_txt, params) in OPERATOR_CASES.items():
        op = OPERATORS[name]
        parents = tuple(BitString.from_str(t) for t in parents_txt)
        base = _histogram(op, rng, parents, n, samples, params)
        for kind in ("shift", "permutation"):
            if kind == "shift":
                moved = tuple(BitString(n, p.value ^ shift.value) for p in parents)
                back = lambda v: v ^ shift.value
            else:
                moved = tuple(_permute(p, perm) for p in parents)
                back = lambda v: _permute(BitString(n, v), inverse).value
            raw = _histogram(op, rng, moved, n, samples, params)
            pulled = np.zeros_like(raw)
            for v in np.flatnonzero(raw):
                pulled[back(int(v))] += raw[v]
            p = _same_distribution(base, pulled)
            if p < worst[0]:
                worst = (p, f"{name}/{kind}")
            if p < alpha:
                failures.append(f"{name}/{kind} p={p:.2e}")
    detail = (f"{len(OPERATOR_CASES)} operators x 2 invariances, {samples} draws each; "
              f"min p={worst[0]:.3g} ({worst[1]})")
    if failures:
        detail += "; failed: " + ", ".join(failures)
    return CheckResult("operator unbiasedness", not failures, detail)


# -- stats --------------------------------------------------------------------

def _brute_p_flip(n: int, a: int) -> Fraction:
    x = (1 << a) - 1  # weight a, so min(|x|_1, |x|_0) = a for a <= n/2
    flips = n // 2 if a % 2 == 0 else n // 2 - 1
    hits = total = 0
    for subset in itertools.combinations(range(n), flips):
        mask = sum(1 << i for i in subset)
        hits += (x ^ mask).bit_count() == n // 2
        total += 1
    return Fraction(hits, total)


def check_exact_combinatorics(max_brute: int = 16, max_diff: int = 64,
                              max_robbins: int = 500) -> CheckResult:
    """Closed forms of p_a against enumeration, p_{a-2} - p_a against subtraction, Robbins."""
    problems = []
    cells = 0
    for n in range(2, max_brute + 1, 2):
        for a in range(0, n // 2 + 1):
            want = _brute_p_flip(n, a)
            got = p_flip_odd(n, a) if a % 2 else p_flip_even(n, a)
            cells += 1
            if got != want:
                problems.append(f"p_flip({n},{a})")
    diffs = 0
    for n in range(2, max_diff + 1, 2):
        for a in range(2, n):
            diffs += 1
            if p_diff(n, a) != p_flip(n, a - 2) - p_flip(n, a):
                problems.append(f"p_diff({n},{a})")
    bad_m = [m for m in range(1, max_robbins + 1) if not robbins_check(m)]
    problems += [f"robbins({m})" for m in bad_m]
    detail = (f"{cells} p_flip cells vs enumeration, {diffs} p_diff cells, "
              f"Robbins m<= {max_robbins}")
    if problems:
        detail += "; mismatches: " + ", ".join(problems[:10])
    return CheckResult("exact combinatorics", not problems, detail)


def check_concentration(n: int = 40, a: int = 10, trials: int = 100_000,
                        T_values: tuple[int, ...] = (1, 8), seed: int = 5) -> CheckResult:
    """Tail of the summed +-1 indicators behind the distance estimator vs 2 exp(-d^2/2m).

    x has ``a`` zeros; an offspring flips k = n/2 - eps n/2 bits (eps = 1/2 - ell/n,
    ell = n/4); X_i = +1 iff the i-th zero flips.  Over T offspring m = aT.
    """
    rng = RngStream(seed)
    k = (n + 2 * (n // 4) + 2) // 4
    worst = -math.inf
    violations = []
    for T in T_values:
        z = rng.np.hypergeometric(a, n - a, k, size=(trials, T))
        Y = (2 * z - a).sum(axis=1)
        mean = T * a * (2 * k / n - 1)
        dev = np.abs(Y - mean)
        m = a * T
        for d in np.arange(0.5, 4 * math.sqrt(m) + 1, 0.5):
            freq = float(np.mean(dev >= d))
            bound = chernoff_tail(float(d), m)
            worst = max(worst, freq - bound)
            if freq > bound:
                violations.append(f"T={T} d={d}")
    detail = f"n={n}, a={a}, T in {T_values}, {trials} trials; max(freq - bound)={worst:.3g}"
    if violations:
        detail += "; exceeded at " + ", ".join(violations[:5])
    return CheckResult("concentration bound", not violations, detail)


# -- estimators ----------------------------------------------------------------

def check_onemax_simulation(n: int = 200, ell: int = 2, t: int = 8, points: int = 1000,
                            seed: int = 3) -> CheckResult:
    """OneMax recovery on the upper plateau of a short jump."""
    rng = RngStream(seed)
    oracle = QueryOracle(JumpObjective(n, ell))
    weights = list(range(n - ell, n + 1))
    mass = [math.comb(n, w) for w in weights]
    correct = 0
    for _ in range(points):
        w = rng.py.choices(weights, mass)[0]
        zeros = rng.py.sample(range(n), n - w)
        x = BitString(n, ((1 << n) - 1) ^ sum(1 << i for i in zeros))
        h = oracle.submit(x).handle
        correct += simulate_onemax(oracle, rng, h, ell, t) == w
    need = math.ceil(points * 999 / 1000)
    return CheckResult("OneMax simulation on short jumps", correct >= need,
                       f"n={n}, ell={ell}, t={t}: {correct}/{points} exact (need {need})")


def check_estimator_contract(ns: tuple[int, ...] = (40, 60), calls: int = 10_000,
                             seed: int = 7) -> CheckResult:
    """P(estimate != a) <= a/(16n) + 5 sigma, with alpha = a, at ell = n/4."""
    rng = RngStream(seed)
    rows = []
    ok = True
    for n in ns:
        ell = n // 4
        g = make_p_estimator(n, ell)
        for a in sorted({2, 4, 8, n // 4}):
            oracle = QueryOracle(JumpObjective(n, ell))
            x = oracle.submit(BitString(n, ((1 << n) - 1) >> a)).handle
            wrong = outside = 0
            for _ in range(calls):
                est = g.estimate(oracle, rng, x, a)
                wrong += est != a
                outside += not a / 2 <= est <= 1.5 * a
            p = a / (16 * n)
            limit = p + 5 * math.sqrt(p * (1 - p) / calls)
            rate = wrong / calls
            ok &= rate <= limit
            rows.append(f"n={n},a={a}: {rate:.4f}<={limit:.4f} (outside {outside})")
    return CheckResult("distance estimator contract", ok, "; ".join(rows))


# -- end to end -----------------------------------------------------------------

def _medians(records) -> dict[int, float]:
    ns, ys = median_by_n(records)
    return dict(zip(ns.astype(int).tolist(), ys.tolist()))


def _rate(records) -> float:
    return sum(r.success for r in records) / len(records)


def check_shortjump_scaling(reps: int = 100, seed: int = 101,
                            audit: AuditLog | None = None) -> CheckResult:
    ns = (64, 128, 256)
    recs = [r for n in ns for r in run_audited("shortjump-rls", n, reps, seed, audit, ell=2)]
    rates = {n: _rate([r for r in recs if r.n == n]) for n in ns}
    med = _medians(recs)
    target = 4 * math.log(256) / math.log(64)
    ratio = med[256] / med[64]
    ok = min(rates.values()) >= 0.95 and abs(ratio - target) <= 0.25 * target
    return CheckResult("short jump unary scaling", ok,
                       f"success {rates}, medians {med}, T(256)/T(64)={ratio:.3f} "
                       f"(target {target:.3f} +-25%)")


def check_ternary_longjump(reps: int = 100, seed: int = 102,
                           audit: AuditLog | None = None) -> CheckResult:
    parts = []
    ok = True
    for n in (64, 128):
        recs = run_audited("longjump-ternary", n, reps, seed, audit, ell=n // 4)
        rate = _rate(recs)
        first = sum(r.success and r.restarts == 0 for r in recs) / reps
        med = statistics.median(r.queries for r in recs)
        cap = 40 * n * math.log(n)
        ok &= rate >= 0.8 and med <= cap
        parts.append(f"n={n}: success {rate:.2f} (first attempt {first:.2f}), "
                     f"median {med} <= {cap:.0f}")
    return CheckResult("ternary long jump", ok, "; ".join(parts))


def check_unary_longjump(reps: int = 50, seed: int = 103,
                         audit: AuditLog | None = None) -> CheckResult:
    ns = (50, 100, 150)
    recs = [r for n in ns for r in run_audited("longjump-unary", n, reps, seed, audit, ell=n // 4)]
    rates = {n: _rate([r for r in recs if r.n == n]) for n in ns}
    xs, ys = median_by_n(recs)
    slope = loglog_slope(xs, ys)
    ok = min(rates.values()) >= 0.6 and 1.6 <= slope <= 2.6
    return CheckResult("unary long jump", ok,
                       f"success {rates}, medians {_medians(recs)}, log-log slope {slope:.3f}")


def check_ternary_extreme(reps: int = 100, seed: int = 104,
                          audit: AuditLog | None = None) -> CheckResult:
    ns = (50, 100, 200, 400)
    recs = [r for n in ns for r in run_audited("extreme-ternary", n, reps, seed, audit)]
    means = {n: statistics.fmean(r.queries for r in recs if r.n == n) for n in ns}
    rates = {n: _rate([r for r in recs if r.n == n]) for n in ns}
    slope = loglog_slope(np.array(ns, float), np.array([means[n] for n in ns]))
    ok = (min(rates.values()) == 1.0 and all(means[n] <= 6 * n for n in ns)
          and abs(slope - 1.0) <= 0.15)
    return CheckResult("ternary extreme jump", ok,
                       f"success {rates}, mean/n {({n: round(means[n] / n, 3) for n in ns})}, "
                       f"log-log slope {slope:.3f}")


def check_binary_extreme(reps: int = 100, seed: int = 105,
                         audit: AuditLog | None = None) -> CheckResult:
    ns = (64, 128, 256)
    recs = [r for n in ns for r in run_audited("extreme-binary", n, reps, seed, audit)]
    rates = {n: _rate([r for r in recs if r.n == n]) for n in ns}
    med = _medians(recs)
    C = med[64] / (64 * math.log2(64))
    rel = {n: med[n] / (C * n * math.log2(n)) - 1 for n in ns}
    ok = min(rates.values()) >= 0.9 and all(abs(v) <= 0.4 for v in rel.values())
    return CheckResult("binary extreme jump", ok,
                       f"success {rates}, C={C:.3f}, deviation from C n log2 n "
                       f"{({n: round(v, 3) for n, v in rel.items()})}")


def check_unary_extreme(reps: int = 100, seed: int = 106,
                        audit: AuditLog | None = None) -> CheckResult:
    parts = []
    ok = True
    for n in (16, 32):
        budget = math.ceil(50 * n ** 4.5)
        recs = run_audited("extreme-unary", n, reps, seed, audit, budget=budget)
        rate = _rate(recs)
        over = [r for r in recs if r.queries > budget]
        silent = [r for r in recs if not r.success and r.queries != budget]
        ok &= rate >= 0.5 and not over and not silent
        parts.append(f"n={n}: success {rate:.2f}, median {statistics.median(r.queries for r in recs)}"
                     f", budget {budget}, over-budget {len(over)}")
    return CheckResult("unary extreme jump", ok, "; ".join(parts))


def check_query_accounting(audit: AuditLog | None = None, seed: int = 107) -> CheckResult:
    """Recorded queries equal the oracle counters for every audited run.

    Without a log from the other end-to-end checks, a small run of every
    registered algorithm is audited instead.
    """
    if audit is None or not audit.entries:
        from .registry import ALGORITHMS

        audit = AuditLog()
        small = {"extreme-unary": 16, "longjump-unary": 40}
        for name in ALGORITHMS:
            run_audited(name, small.get(name, 32), 5, seed, audit)
        for budget in (1, 7):
            run_audited("extreme-ternary", 32, 3, seed, audit, budget=budget)
    bad = [e for e in audit.entries if not e.ok()]
    return CheckResult("query accounting", not bad,
                       f"{len(audit.entries)} runs audited, {len(bad)} mismatches"
                       + (f" e.g. {bad[0]}" if bad else ""))


# -- suites ---------------------------------------------------------------------

def _e2e() -> list[CheckResult]:
    audit = AuditLog()
    out = [check(audit=audit) for check in (
        check_shortjump_scaling, check_ternary_longjump, check_unary_longjump,
        check_ternary_extreme, check_binary_extreme, check_unary_extreme)]
    out.append(check_query_accounting(audit))
    return out


SUITES: dict[str, Callable[[], list[CheckResult]]] = {
    "operators": lambda: [check_operator_unbiasedness()],
    "stats": lambda: [check_exact_combinatorics(), check_concentration()],
    "estimators": lambda: [check_onemax_simulation(), check_estimator_contract()],
    "e2e": _e2e,
}


def run_suite(name: str) -> list[CheckResult]:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    return SUITES[name]()
