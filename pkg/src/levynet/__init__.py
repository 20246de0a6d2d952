"""Stable Lévy processes, CSBPs, stable forests and random-metric toy models.

Submodules are imported on first access, so ``import levynet`` stays cheap
and analytic tools do not pull in the simulation stack.
"""
from __future__ import annotations

import importlib
from typing import Any

from .errors import (
    BudgetExceededError,
    DegenerateSampleError,
    LevyNetError,
    NumericError,
    ParameterError,
    RangeError,
    StructureError,
)

__version__ = "0.1.0"

_SUBMODULES = (
    "brownian_map",
    "characterization",
    "csbp",
    "harness",
    "kernels",
    "levy_net",
    "rng",
    "stable_forest",
    "stable_levy",
)

__all__ = [
    "__version__",
    "BudgetExceededError",
    "DegenerateSampleError",
    "LevyNetError",
    "NumericError",
    "ParameterError",
    "RangeError",
    "StructureError",
    *_SUBMODULES,
]


def __getattr__(name: str) -> Any:
    if name in _SUBMODULES:
        return importlib.import_module(f".{name}", __name__)
    raise AttributeError(f"module 'levynet' has no attribute {name!r}")
