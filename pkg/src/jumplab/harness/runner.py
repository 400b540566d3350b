"""Single runs with restarts, and reproducible sweeps."""
from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from ..bits import MASK64, RngStream, mix_seed
from ..objective import BudgetExhausted, JumpObjective, OptimumFound, QueryOracle
from .records import RunRecord
from .registry import ell_from_rule, eval_budget, get_algorithm


@dataclass(frozen=True)
class RunConfig:
    algorithm: str
    n: int
    seed: int
    ell: int | None = None
    budget: str | int | None = None
    attempt_budget: str | int | None = None


@dataclass
class RunOutcome:
    record: RunRecord
    oracle: QueryOracle
    attempts: list[int] = field(default_factory=list)


def resolve(config: RunConfig) -> tuple:
    """Validated (registry entry, ell, total budget, attempt budget) for a config."""
    entry = get_algorithm(config.algorithm)
    if config.n < 4:
        raise ValueError("n must be at least 4")
    ell = config.ell if config.ell is not None else ell_from_rule(entry.ell_rule, config.n)
    JumpObjective(config.n, ell)
    entry.validate(config.n, ell)
    total = eval_budget(config.budget if config.budget is not None else entry.budget,
                        config.n, ell)
    attempt_expr = (config.attempt_budget if config.attempt_budget is not None
                    else entry.attempt_budget)
    per_attempt = eval_budget(attempt_expr, config.n, ell)
    return entry, ell, total, per_attempt


def execute(config: RunConfig) -> RunOutcome:
    """Run with independent restarts until the optimum is queried or the budget is spent.

    Every attempt shares one oracle, so query counts and the first-hit index
    accumulate across restarts.  An attempt ends when it returns without
    having queried the optimum or when its own query allowance runs out.
    """
    entry, ell, total, per_attempt = resolve(config)
    oracle = QueryOracle(JumpObjective(config.n, ell), budget=total, stop_on_optimum=True)
    rng = RngStream(config.seed)
    attempts = []
    start = time.perf_counter()
    while True:
        before = oracle.query_count
        oracle.set_attempt_limit(per_attempt)
        try:
            entry.attempt(oracle, rng)
        except OptimumFound:
            attempts.append(oracle.query_count - before)
            break
        except BudgetExhausted:
            if oracle.budget is not None and oracle.query_count >= oracle.budget:
                attempts.append(oracle.query_count - before)
                break
        attempts.append(oracle.query_count - before)
        if oracle.first_hit is not None:
            break
    wall_ms = int(round((time.perf_counter() - start) * 1000))
    success = oracle.first_hit is not None
    record = RunRecord(
        algorithm=entry.name, function=entry.function, n=config.n, ell=ell, arity=entry.arity,
        seed=config.seed & MASK64,
        queries=oracle.first_hit if success else oracle.query_count,
        success=success, restarts=len(attempts) - 1, wall_ms=wall_ms)
    return RunOutcome(record, oracle, attempts)


def run_single(config: RunConfig) -> RunRecord:
    return execute(config).record


# -- sweeps -------------------------------------------------------------------

@dataclass(frozen=True)
class SweepConfig:
    algorithm: str
    n_values: tuple[int, ...]
    reps: int
    base_seed: int
    ell_rule: str | None = None
    budget_rule: str | None = None
    attempt_rule: str | None = None

    @classmethod
    def from_dict(cls, data: dict) -> "SweepConfig":
        known = {"algorithm", "n_values", "reps", "base_seed", "ell_rule", "budget_rule",
                 "attempt_rule"}
        extra = set(data) - known
        if extra:
            raise ValueError(f"unknown sweep config keys: {sorted(extra)}")
        try:
            cfg = cls(algorithm=data["algorithm"], n_values=tuple(int(v) for v in data["n_values"]),
                      reps=int(data["reps"]), base_seed=int(data["base_seed"]),
                      ell_rule=data.get("ell_rule"), budget_rule=data.get("budget_rule"),
                      attempt_rule=data.get("attempt_rule"))
        except KeyError as exc:
            raise ValueError(f"sweep config is missing {exc.args[0]!r}") from None
        cfg.run_configs()  # validate every row up front
        return cfg

    @classmethod
    def from_json(cls, text: str) -> "SweepConfig":
        return cls.from_dict(json.loads(text))

    def run_configs(self) -> list[RunConfig]:
        if self.reps < 1 or not self.n_values:
            raise ValueError("need reps >= 1 and at least one n")
        entry = get_algorithm(self.algorithm)
        rule = self.ell_rule or entry.ell_rule
        configs = []
        for n in self.n_values:
            ell = ell_from_rule(rule, n)
            for _ in range(self.reps):
                seed = mix_seed(self.base_seed, len(configs))
                configs.append(RunConfig(self.algorithm, n, seed, ell, self.budget_rule,
                                         self.attempt_rule))
        for c in configs[::self.reps]:
            resolve(c)
        return configs


def sweep(config: SweepConfig, workers: int = 1) -> list[RunRecord]:
    """All reps x n_values records in row order; row i uses seed mix_seed(base_seed, i)."""
    configs = config.run_configs()
    if workers <= 1:
        return [run_single(c) for c in configs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_single, configs, chunksize=max(1, len(configs) // (4 * workers))))


def rerun_row(config: SweepConfig, row_index: int) -> RunRecord:
    return run_single(config.run_configs()[row_index])
