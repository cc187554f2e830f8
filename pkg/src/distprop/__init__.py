"""Distributional estimates of proportions beyond a cut-point for two-group
and regression-adjusted comparisons."""

from distprop.distcore import (
    ComparisonResult,
    EffectRow,
    Equal,
    KnownRatio,
    Tail,
    UnknownUnequal,
    dist_gamma,
    dist_normal,
    dist_skewnormal,
    t_test,
)
from distprop.fitting import GroupSummary

__version__ = "0.1.0"

__all__ = [
    "ComparisonResult",
    "EffectRow",
    "Equal",
    "GroupSummary",
    "KnownRatio",
    "Tail",
    "UnknownUnequal",
    "dist_gamma",
    "dist_normal",
    "dist_skewnormal",
    "t_test",
]
