"""Functor enumeration, witness sets and the bijection checks built on them."""

from .functors import (
    DEFAULT_BUDGET,
    BudgetExceeded,
    HomotopyResult,
    InfiniteEnumerationError,
    are_homotopic,
    enumerate_functors,
    homotopy_classes,
)
from .witness import TruncatedPresentation, WitnessSet, kappa_set, lambda_set, rho_set, witness_set

__all__ = [
    "DEFAULT_BUDGET",
    "BudgetExceeded",
    "HomotopyResult",
    "InfiniteEnumerationError",
    "TruncatedPresentation",
    "WitnessSet",
    "are_homotopic",
    "enumerate_functors",
    "homotopy_classes",
    "kappa_set",
    "lambda_set",
    "rho_set",
    "witness_set",
]
