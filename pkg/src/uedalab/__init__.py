"""Formal linearization along cycles of charts: cocycle solvers, small divisors,
deformation-family estimates and majorant certificates."""

from .cech import CycleCover, ObstructedError
from .exact import GaussianRational
from .family import ArcSolveReport, ParamCochain1, family_solve, improved_vs_naive
from .linearize import LinearizationResult, TransitionSystem, verify_residual
from .majorant import domination_check, general_majorant, toy_majorant
from .multiplier import ArcBox, Multiplier, diophantine_check, divisor_profile
from .series import MultiSeries, UniSeries

__version__ = "0.1.0"

__all__ = [
    "ArcBox", "ArcSolveReport", "CycleCover", "GaussianRational", "LinearizationResult",
    "MultiSeries", "Multiplier", "ObstructedError", "ParamCochain1", "TransitionSystem",
    "UniSeries", "diophantine_check", "divisor_profile", "domination_check", "family_solve",
    "general_majorant", "improved_vs_naive", "toy_majorant",
    "verify_residual",
]
