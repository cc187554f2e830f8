"""Print the worked-example tables from their published summary statistics."""

import math

from distprop.cli.render import render_comparison, render_ttest
from distprop.distcore import (
    KnownRatio,
    Tail,
    UnknownUnequal,
    dist_gamma,
    dist_normal,
    dist_skewnormal,
    t_test,
)
from distprop.fitting import GroupSummary
from distprop.regadjust import AdjustedModelSummary, adjusted_comparisons

SMOKER = (GroupSummary(483, 3266.965, 437.7330), GroupSummary(975, 3452.728, 436.4585))
PARITY = (GroupSummary(891, 0.04439543, 0.005884324), GroupSummary(890, 0.04295239, 0.006217391))
EMPLOY = (GroupSummary(851, 0.04385758, 0.005646543), GroupSummary(709, 0.04338577, 0.006462314))
BMI = (GroupSummary(890, 23.84148, 4.012678), GroupSummary(891, 22.96176, 3.388547))
APGAR = (GroupSummary(628, 0.4331210, 0.9108517), GroupSummary(1277, 0.4628034, 0.9282585))


def show(title, result, ttest=None):
    print(f"\n#### {title}\n")
    if ttest is not None:
        print(render_ttest(ttest))
    print(render_comparison(result))


def main():
    show("Example 1", dist_normal(*SMOKER, 2500, labels=("smoker", "non-smoker")),
         t_test(*SMOKER, "pooled"))
    show("Example 2", dist_normal(*PARITY, 0.033, labels=("primiparous", "multiparous")))
    show("Example 3", dist_normal(*EMPLOY, 0.033, assumption=UnknownUnequal(),
                                  labels=("employed", "unemployed")),
         t_test(*EMPLOY, "welch"))
    show("Example 4", dist_normal(*EMPLOY, 0.033, assumption=KnownRatio(1.3),
                                  labels=("employed", "unemployed")))
    # the printed skew-normal tables use the exposed n in both variance terms
    show("Example 5", dist_skewnormal(*SMOKER, 0.8668926, 2500, exposed_n_only=True,
                                      labels=("smoker", "non-smoker")))
    show("Example 6", dist_skewnormal(*BMI, 4.119313, 30, Tail.UPPER, exposed_n_only=True,
                                      labels=("primiparous", "multiparous")))
    show("Example 7", dist_gamma(*APGAR, 0.2371702, 3, Tail.UPPER, labels=("boy", "girl")))

    linear = AdjustedModelSummary(
        marginal_means={"0": 3289.364, "1": 3135.952, "2": 3167.609}, residual_sd=420.2215,
        level_counts={"0": 1279, "1": 620, "2": 184}, reference_level="0")
    mixed = AdjustedModelSummary(
        marginal_means={"0": 3291.335, "1": 3125.941, "2": 3163.117}, residual_sd=36.76134,
        random_intercept_sd=420.2496, level_counts={"0": 1287, "1": 631, "2": 188},
        reference_level="0")
    for title, summary in (("Example 8", linear), ("Example 9", mixed)):
        for r in adjusted_comparisons(summary, 2500):
            show(f"{title}, {r.exposed.label} vs {r.control.label}", r)
    print(f"\nExample 9 total sd: {math.hypot(36.76134, 420.2496):.7g}")


if __name__ == "__main__":
    main()
