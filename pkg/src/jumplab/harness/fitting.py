"""Least-squares scaling fits of median query counts."""
from __future__ import annotations

import math
import statistics
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

MODELS = {
    "n": lambda n: n,
    "nlogn": lambda n: n * math.log(n),
    "n2": lambda n: n * n,
    "n4.5": lambda n: n ** 4.5,
}


@dataclass(frozen=True)
class ScalingFit:
    model: str
    coefficient: float
    residual: float
    slope: float


def median_by_n(rows) -> tuple[np.ndarray, np.ndarray]:
    groups = defaultdict(list)
    for r in rows:
        groups[r.n].append(r.queries)
    ns = sorted(groups)
    return np.array(ns, dtype=float), np.array([statistics.median(groups[n]) for n in ns], float)


def loglog_slope(ns, ys) -> float:
    return float(np.polyfit(np.log(ns), np.log(ys), 1)[0])


def fit_points(ns, ys, model: str) -> ScalingFit:
    """Fit ys ~ c * model(ns).

    The residual is the root-mean-square relative error, so values from
    different n weigh equally.
    """
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}; choose from {sorted(MODELS)}")
    ns = np.asarray(ns, float)
    ys = np.asarray(ys, float)
    if len(set(ns.tolist())) < 3:
        raise ValueError("need at least 3 distinct n")
    if np.any(ys <= 0):
        raise ValueError("query counts must be positive")
    f = np.array([MODELS[model](v) for v in ns])
    # minimize sum ((y - c f) / y)^2
    w = f / ys
    c = float(np.sum(w) / np.sum(w * w))
    residual = float(np.sqrt(np.mean((1 - c * w) ** 2)))
    return ScalingFit(model, c, residual, loglog_slope(ns, ys))


def fit_scaling(rows, model: str = "auto") -> ScalingFit:
    """Fit the median queries per n; ``model="auto"`` picks the smallest residual."""
    ns, ys = median_by_n(rows)
    if model == "auto":
        return min((fit_points(ns, ys, m) for m in MODELS), key=lambda r: r.residual)
    return fit_points(ns, ys, model)
