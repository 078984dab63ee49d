"""Exact experiments on Kloosterman sums, reciprocal energies, lattices and smooth numbers."""
from .errors import BadParameters, BudgetExceeded, KlabError, NotInvertible, WitnessViolation
from .kernels import BACKEND
from .report import BoundReport

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BadParameters",
    "BoundReport",
    "BudgetExceeded",
    "KlabError",
    "NotInvertible",
    "WitnessViolation",
]
