"""Text and JSON renderings of comparison results and t-tests."""

import json
import math
from decimal import Decimal

from distprop.distcore import (
    ComparisonResult,
    EffectRow,
    GroupResult,
    KnownRatio,
    Tail,
    UnknownUnequal,
    assumption_from_dict,
    assumption_to_dict,
)

RULE = "=" * 54
THIN = "-" * 54
EFFECT_NAMES = {"diff": "Diff. prop", "rr": "Risk ratio", "or": "Odds ratio"}


def _decimals_needed(x, digits):
    """Decimals needed to show ``x`` at ``digits`` significant digits,
    after dropping trailing zeros."""
    if x == 0 or not math.isfinite(x):
        return 0
    s = f"{x:.{digits - 1}e}"
    d = Decimal(s).normalize()
    return max(0, -d.as_tuple().exponent)


def format_column(values, digits=7):
    """Common fixed-point format: enough decimals for every entry to carry
    ``digits`` significant digits; scientific when that is narrower."""
    decimals = max((_decimals_needed(v, digits) for v in values), default=0)
    fixed = [f"{v:.{decimals}f}" for v in values]
    sci = [f"{v:.{digits - 1}e}" for v in values]
    if max(map(len, fixed)) > max(map(len, sci)):
        return sci
    return fixed


def format_number(x, digits=7):
    return format_column([x], digits)[0]


def _table(header, rows):
    cols = list(zip(header, *rows))
    widths = [max(len(c) for c in col) for col in cols]
    lines = []
    for row in (header, *rows):
        lines.append("".join(" " + cell.rjust(w) for cell, w in zip(row, widths)))
    return lines


def _pval(p):
    if p < 2.2e-16:
        return "< 2.2e-16"
    return "= " + format_number(p, 4)


def render_ttest(tt):
    title = "Welch Two Sample t-test" if tt.variant == "welch" else "Two Sample t-test"
    m = format_column(list(tt.means))
    width = max(len("mean of x"), *(len(v) for v in m))
    return "\n".join([
        RULE,
        "===              t-Test                            ===",
        RULE,
        "",
        f"\t{title}",
        "",
        f"t = {format_number(tt.t, 5)}, df = {format_number(tt.df, 5)}, p-value {_pval(tt.p_value)}",
        "alternative hypothesis: true difference in means is not equal to 0",
        f"{tt.level * 100:g} percent confidence interval:",
        " " + " ".join(format_column([tt.ci_lower, tt.ci_upper])),
        "sample estimates:",
        " ".join(s.rjust(width) for s in ("mean of x", "mean of y")),
        " ".join(v.rjust(width) for v in m),
        "",
    ])


def _assumption_line(a):
    if isinstance(a, UnknownUnequal):
        return "Standard error computed with correction for unknown variance ratio"
    ratio = a.ratio if isinstance(a, KnownRatio) else 1
    return ("Standard error computed under the hypothesis that the ratio of variances "
            f"is equal to {ratio:g}")


def render_comparison(r, distributional_note=True):
    side = "below" if r.tail is Tail.LOWER else "above"
    lines = [
        RULE,
        "===              Distributional method             ===",
        RULE,
        f"Distributional estimates for the comparison of proportions {side} the cut-point "
        f"{r.cut_point:.7g}",
        _assumption_line(r.assumption),
        "",
    ]
    if r.shape is not None:
        lines += [f"Alpha: {format_number(r.shape)}", ""]
    g = r.groups
    lines += _table(
        ["Group", "Obs", "Mean", "Std.Dev", "Dist.prop."],
        list(zip(
            [x.label for x in g],
            [str(x.n) for x in g],
            format_column([x.mean for x in g]),
            format_column([x.sd for x in g]),
            format_column([x.prop for x in g]),
        )),
    )
    e = r.effects
    lines += ["", THIN]
    lines += _table(
        ["Stat", "Estimate", "Std.Err", "CI.lower", "CI.upper"],
        list(zip(
            [EFFECT_NAMES[x.name] for x in e],
            format_column([x.estimate for x in e]),
            format_column([x.se for x in e]),
            format_column([x.ci_lower for x in e]),
            format_column([x.ci_upper for x in e]),
        )),
    )
    lines += ["", THIN, f"* {r.level * 100:g} percent confidence interval"]
    if distributional_note:
        lines.append("* confidence interval calculated using distributional standard error")
        lines += ["", THIN]
    else:
        lines.append(THIN)
    return "\n".join(lines)


def result_to_dict(r):
    doc = {
        "model": r.model,
        "cut_point": r.cut_point,
        "tail": r.tail.value,
        "assumption": assumption_to_dict(r.assumption),
        "level": r.level,
        "groups": [
            {"label": g.label, "n": g.n, "mean": g.mean, "sd": g.sd, "prop": g.prop}
            for g in r.groups
        ],
        "effects": {},
    }
    if r.shape is not None:
        doc["alpha"] = r.shape
    for e in r.effects:
        row = {"est": e.estimate, "se": e.se, "ci": [e.ci_lower, e.ci_upper]}
        if e.se_log is not None:
            row["se_log"] = e.se_log
        doc["effects"][e.name] = row
    return doc


def result_from_dict(doc):
    effects = tuple(
        EffectRow(
            name=name,
            estimate=row["est"],
            se=row["se"],
            ci_lower=row["ci"][0],
            ci_upper=row["ci"][1],
            se_log=row.get("se_log"),
        )
        for name, row in ((k, doc["effects"][k]) for k in ("diff", "rr", "or"))
    )
    return ComparisonResult(
        cut_point=doc["cut_point"],
        tail=Tail(doc["tail"]),
        assumption=assumption_from_dict(doc["assumption"]),
        groups=tuple(GroupResult(**g) for g in doc["groups"]),
        effects=effects,
        level=doc["level"],
        model=doc.get("model", "normal"),
        shape=doc.get("alpha"),
    )


def ttest_to_dict(tt):
    return {
        "variant": tt.variant,
        "t": tt.t,
        "df": tt.df,
        "p_value": tt.p_value,
        "ci": [tt.ci_lower, tt.ci_upper],
        "means": list(tt.means),
        "level": tt.level,
    }


def render(result, fmt="text"):
    """Render one result or a list of results."""
    many = isinstance(result, (list, tuple))
    items = list(result) if many else [result]
    if fmt == "json":
        docs = [result_to_dict(r) for r in items]
        return json.dumps(docs if many else docs[0], indent=2)
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    return "\n".join(render_comparison(r) for r in items)
