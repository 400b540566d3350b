"""Algorithm registry, jump-size rules and budget expressions."""
from __future__ import annotations

import ast
import math
import operator
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from ..bits import RngStream
from ..extremejump import (
    binary_extreme_optimize,
    ternary_extreme_optimize,
    unary_extreme_expected_queries,
    unary_extreme_optimize,
)
from ..longjump import estimator_flips, ternary_longjump_optimize, unary_longjump_optimize
from ..objective import Handle, QueryOracle
from ..onemax import DirectView, rls_optimize
from ..shortjump import shortjump_optimize

# -- budget expressions ----------------------------------------------------

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.FloorDiv: operator.floordiv, ast.Pow: operator.pow}
_FUNCS = {"log": math.log, "log2": math.log2, "sqrt": math.sqrt, "ceil": math.ceil,
          "min": min, "max": max, "unary_extreme_cost": unary_extreme_expected_queries}


def eval_expr(expr: str | int | float, n: int, ell: int = 0) -> float:
    """Evaluate an arithmetic expression in ``n`` and ``ell``.

    Only numbers, + - * / // **, unary minus, the names n, ell, e, pi and the
    functions log, log2, sqrt, ceil, min, max, unary_extreme_cost are allowed.
    """
    if isinstance(expr, (int, float)):
        return expr
    names = {"n": n, "ell": ell, "e": math.e, "pi": math.pi}

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return node.value
        if isinstance(node, ast.Name) and node.id in names:
            return names[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
                and node.func.id in _FUNCS and not node.keywords):
            return _FUNCS[node.func.id](*(ev(a) for a in node.args))
        raise ValueError(f"unsupported element in budget expression: {ast.dump(node)}")

    try:
        tree = ast.parse(str(expr), mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse budget expression {expr!r}") from exc
    return ev(tree)


def eval_budget(expr: str | int | float | None, n: int, ell: int = 0) -> int | None:
    if expr is None:
        return None
    value = math.ceil(eval_expr(expr, n, ell))
    if value < 1:
        raise ValueError(f"budget {expr!r} evaluates to {value} for n={n}")
    return value


# -- jump-size rules ---------------------------------------------------------

def ell_from_rule(rule: str, n: int) -> int:
    """Resolve ``fixed:v``, ``short:eps``, ``long:eps`` or ``extreme`` for this n.

    short gives floor(n^(1/2 - eps)), long gives floor((1/2 - eps) n), extreme n/2 - 1.
    """
    kind, _, arg = rule.partition(":")
    kind = kind.strip().lower()
    if kind == "fixed":
        return int(arg)
    if kind == "short":
        eps = float(Fraction(arg))
        return max(1, math.floor(n ** (0.5 - eps) + 1e-9))
    if kind == "long":
        eps = Fraction(arg)
        return math.floor((Fraction(1, 2) - eps) * n)
    if kind == "extreme":
        if n % 2:
            raise ValueError("extreme jumps need even n")
        return n // 2 - 1
    raise ValueError(f"unknown ell rule {rule!r}")


# -- algorithms --------------------------------------------------------------

Attempt = Callable[[QueryOracle, RngStream], "Handle | None"]


def _onemax_rls(oracle, rng):
    best, _ = rls_optimize(DirectView(oracle, rng), None, rng)
    return best


def _check_even(n: int, ell: int) -> None:
    if n % 2:
        raise ValueError("this algorithm needs even n")


def _check_extreme(n: int, ell: int) -> None:
    _check_even(n, ell)
    if ell != n // 2 - 1:
        raise ValueError(f"extreme jumps have ell = n/2 - 1 = {n // 2 - 1}, got {ell}")


def _check_short(n: int, ell: int) -> None:
    if not 1 <= ell <= n / 4:
        raise ValueError("short-jump simulation needs 1 <= ell <= n/4")


def _check_long(n: int, ell: int) -> None:
    if not 1 <= ell < n / 2:
        raise ValueError("need 1 <= ell < n/2")
    estimator_flips(n, ell)


def _check_ternary_long(n: int, ell: int) -> None:
    _check_even(n, ell)
    _check_long(n, ell)


def _check_onemax(n: int, ell: int) -> None:
    if ell != 0:
        raise ValueError("onemax-rls runs on OneMax (ell = 0)")


@dataclass(frozen=True)
class AlgorithmEntry:
    """A registered algorithm: how to run one attempt and its default budgets.

    ``attempt_budget`` caps a single attempt (restart when spent), ``budget``
    caps the whole run.  Both are expressions in n and ell.
    """

    name: str
    function: str
    arity: int
    attempt: Attempt
    ell_rule: str
    budget: str
    attempt_budget: str | None = None
    validate: Callable[[int, int], None] = lambda n, ell: None


ALGORITHMS: dict[str, AlgorithmEntry] = {a.name: a for a in (
    AlgorithmEntry("onemax-rls", "onemax", 1, _onemax_rls, "fixed:0",
                  budget="16*n*log(n) + 64", validate=_check_onemax),
    AlgorithmEntry("shortjump-rls", "jump", 1, shortjump_optimize, "fixed:2",
                  budget="32*n*log(n) + 256", validate=_check_short),
    AlgorithmEntry("longjump-ternary", "jump", 3, ternary_longjump_optimize, "long:1/4",
                  budget="40*n*log(n)", attempt_budget="20*n*log(n)",
                  validate=_check_ternary_long),
    AlgorithmEntry("longjump-unary", "jump", 1, unary_longjump_optimize, "long:1/4",
                  budget="50000*n**2", validate=_check_long),
    AlgorithmEntry("extreme-ternary", "extreme", 3, ternary_extreme_optimize, "extreme",
                  budget="24*n + 64", validate=_check_extreme),
    AlgorithmEntry("extreme-binary", "extreme", 2, binary_extreme_optimize, "extreme",
                  budget="24*n*log2(n) + 256", attempt_budget="8*n*log2(n) + 64",
                  validate=_check_extreme),
    AlgorithmEntry("extreme-unary", "extreme", 1, unary_extreme_optimize, "extreme",
                  budget="50*n**4.5", attempt_budget="4*unary_extreme_cost(n)",
                  validate=_check_extreme),
)}


def get_algorithm(name: str) -> AlgorithmEntry:
    try:
        return ALGORITHMS[name]
    except KeyError:
        raise ValueError(f"unknown algorithm {name!r}; choose from {sorted(ALGORITHMS)}") from None
