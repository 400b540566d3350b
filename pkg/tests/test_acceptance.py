"""Acceptance battery: one test per criterion, each printing a PASS/FAIL line.

The end-to-end checks share one audit log so the query-accounting check
covers every run they made.  Run alone with ``pytest tests/test_acceptance.py -v``.
"""
import pytest

from jumplab.harness import checks

AUDIT = checks.AuditLog()


@pytest.fixture
def report(capsys):
    def emit(result):
        with capsys.disabled():
            print("\n" + result.line())
        assert result.passed, result.detail
    return emit


def test_operator_unbiasedness(report):
    report(checks.check_operator_unbiasedness())


def test_onemax_simulation_on_short_jumps(report):
    report(checks.check_onemax_simulation())


def test_short_jump_unary_scaling(report):
    report(checks.check_shortjump_scaling(audit=AUDIT))


def test_ternary_long_jump(report):
    report(checks.check_ternary_longjump(audit=AUDIT))


def test_distance_estimator_contract(report):
    report(checks.check_estimator_contract())


def test_unary_long_jump(report):
    report(checks.check_unary_longjump(audit=AUDIT))


def test_ternary_extreme_jump(report):
    report(checks.check_ternary_extreme(audit=AUDIT))


def test_binary_extreme_jump(report):
    report(checks.check_binary_extreme(audit=AUDIT))


def test_unary_extreme_jump(report):
    report(checks.check_unary_extreme(audit=AUDIT))


def test_exact_combinatorics(report):
    report(checks.check_exact_combinatorics())


def test_concentration_bound(report):
    report(checks.check_concentration())


def test_query_accounting(report):
    report(checks.check_query_accounting(AUDIT))
