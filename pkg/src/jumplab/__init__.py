"""Unbiased black-box optimization of jump functions."""
from .bits import BitString, RngStream, mix_seed
from .objective import (
    BudgetExhausted,
    Handle,
    JumpObjective,
    OptimumFound,
    QueryOracle,
    Sample,
    extreme,
    onemax,
)

__version__ = "0.1.0"

__all__ = [
    "BitString",
    "BudgetExhausted",
    "Handle",
    "JumpObjective",
    "OptimumFound",
    "QueryOracle",
    "RngStream",
    "Sample",
    "extreme",
    "mix_seed",
    "onemax",
]
