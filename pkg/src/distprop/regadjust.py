"""Regression-adjusted comparisons of each exposure level against a reference."""

import math
import re
from dataclasses import dataclass

from distprop.distcore import Equal, Tail, normal_comparison
from distprop.errors import DomainError
from distprop.fitting import GroupSummary, marginal_means


def level_sort_key(label):
    """Numeric labels sort numerically, everything else lexicographically after."""
    s = str(label)
    try:
        return (0, float(s), s)
    except ValueError:
        return (1, 0.0, s)


@dataclass(frozen=True)
class AdjustedModelSummary:
    marginal_means: dict
    residual_sd: float
    level_counts: dict
    reference_level: str
    random_intercept_sd: float = 0.0

    def __post_init__(self):
        if self.reference_level not in self.marginal_means:
            raise DomainError(f"reference level {self.reference_level!r} has no marginal mean")
        if set(self.marginal_means) != set(self.level_counts):
            raise DomainError("marginal_means and level_counts name different levels")
        if len(self.marginal_means) < 2:
            raise DomainError("need at least two exposure levels")
        if any(int(c) < 2 for c in self.level_counts.values()):
            raise DomainError("every level needs a count of at least 2")
        if not self.residual_sd > 0:
            raise DomainError("residual_sd must be > 0")
        if self.random_intercept_sd < 0:
            raise DomainError("random_intercept_sd must be >= 0")

    @property
    def total_sd(self):
        return math.hypot(self.residual_sd, self.random_intercept_sd)

    def to_dict(self):
        return {
            "marginal_means": dict(self.marginal_means),
            "residual_sd": self.residual_sd,
            "random_intercept_sd": self.random_intercept_sd,
            "level_counts": dict(self.level_counts),
            "reference_level": self.reference_level,
        }

    @classmethod
    def from_dict(cls, doc):
        try:
            return cls(
                marginal_means={str(k): float(v) for k, v in doc["marginal_means"].items()},
                residual_sd=float(doc["residual_sd"]),
                random_intercept_sd=float(doc.get("random_intercept_sd", 0.0)),
                level_counts={str(k): int(v) for k, v in doc["level_counts"].items()},
                reference_level=str(doc["reference_level"]),
            )
        except KeyError as exc:
            raise DomainError(f"model summary is missing field {exc.args[0]!r}") from None


def adjusted_comparisons(summary, cp, tail=Tail.LOWER, level=0.95):
    """One normal comparison per non-reference level, sharing the model SD."""
    sigma = summary.total_sd
    ref = summary.reference_level
    control = GroupSummary(n=summary.level_counts[ref], mean=summary.marginal_means[ref], sd=sigma)
    out = []
    for lev in sorted(summary.marginal_means, key=level_sort_key):
        if lev == ref:
            continue
        exposed = GroupSummary(n=summary.level_counts[lev], mean=summary.marginal_means[lev],
                               sd=sigma)
        out.append(normal_comparison(exposed, control, sigma, sigma, cp, tail, Equal(), level,
                                     labels=(lev, ref)))
    return out


_INTERACTION = re.compile(r"[:*]")


def from_ols(model, group_var):
    if group_var not in model.factors:
        raise DomainError(f"{group_var!r} is not a categorical term of the model")
    if any(_INTERACTION.search(lab) for lab in model.design_labels):
        raise DomainError("interaction terms are not supported for adjusted comparisons")
    f = model.factors[group_var]
    return AdjustedModelSummary(
        marginal_means=marginal_means(model, group_var),
        residual_sd=model.residual_sd,
        random_intercept_sd=0.0,
        level_counts=dict(model.level_counts[group_var]),
        reference_level=f.reference,
    )
