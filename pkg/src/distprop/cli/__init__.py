"""Command-line front end.

Subcommands: ``dicho`` / ``dichoi`` (normal model from raw data or from
summaries), ``dichogen`` (normal, skew-normal or gamma), ``regdicho``
(regression-adjusted) and ``simulate`` (Monte-Carlo scenario).
Exit status: 0 success, 1 computation error, 2 usage error.
"""

import argparse
import json
import sys

import numpy as np

from distprop.cli.dataset import read_csv
from distprop.cli.formula import FormulaError, build_design, parse_formula
from distprop.cli.render import (
    render_comparison,
    render_ttest,
    result_to_dict,
    ttest_to_dict,
)
from distprop.distcore import (
    Equal,
    Tail,
    UnknownUnequal,
    assumption_from_ratio,
    dist_gamma,
    dist_normal,
    dist_skewnormal,
    t_test,
)
from distprop.errors import DistPropError
from distprop.fitting import GroupSummary, fit_gamma_shape, fit_sn_shape, ols_fit
from distprop.mc_validate import SimScenario, run_scenario
from distprop.regadjust import AdjustedModelSummary, adjusted_comparisons, from_ols


class UsageError(Exception):
    pass


def _add_common(p, with_variance=True):
    p.add_argument("--cp", type=float, required=True, help="cut-point")
    p.add_argument("--tail", choices=["lower", "upper"], default="lower")
    p.add_argument("--level", type=float, default=0.95)
    p.add_argument("--format", choices=["text", "json"], default="text")
    if with_variance:
        g = p.add_mutually_exclusive_group()
        g.add_argument("--ratio", type=float, default=None,
                       help="known variance ratio exposed/control; 0 means unknown")
        g.add_argument("--uneq", action="store_true",
                       help="unknown variance ratio (same as --ratio 0)")


def _add_data(p, required=True):
    p.add_argument("--data", required=required)
    p.add_argument("--outcome", required=required)
    p.add_argument("--group", required=required)
    p.add_argument("--exposed", required=required, help="level of --group that is exposed")


def _add_summaries(p, required=True):
    for k in ("1", "2"):
        p.add_argument(f"--n{k}", type=int, required=required)
        p.add_argument(f"--m{k}", type=float, required=required)
        p.add_argument(f"--s{k}", type=float, required=required)
    p.add_argument("--label1", default="exposed")
    p.add_argument("--label2", default="control")


def build_parser():
    parser = argparse.ArgumentParser(prog="distprop", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dicho", help="normal model from individual data")
    _add_data(p)
    _add_common(p)

    p = sub.add_parser("dichoi", help="normal model from summary statistics")
    _add_summaries(p)
    _add_common(p)

    p = sub.add_parser("dichogen", help="normal, skew-normal or gamma model")
    _add_data(p, required=False)
    _add_summaries(p, required=False)
    _add_common(p)
    p.add_argument("--dist", choices=["normal", "sk_normal", "gamma"], default="normal")
    p.add_argument("--alpha", type=float, default=None, help="shape; fitted when omitted")
    p.add_argument("--shift", type=float, default=0.0,
                   help="added to outcome and cut-point before a gamma analysis")
    p.add_argument("--legacy-n", action="store_true",
                   help="skew-normal only: exposed n in both variance terms")

    p = sub.add_parser("regdicho", help="regression-adjusted comparisons")
    p.add_argument("--data")
    p.add_argument("--formula")
    p.add_argument("--group-var")
    p.add_argument("--reference", default=None, help="reference level of --group-var")
    p.add_argument("--summary", help="JSON model summary (e.g. from a mixed model)")
    _add_common(p, with_variance=False)

    p = sub.add_parser("simulate", help="run a Monte-Carlo scenario")
    p.add_argument("--scenario", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--seed", type=int, default=None)
    return parser


def _assumption(args):
    if getattr(args, "uneq", False):
        return UnknownUnequal()
    return assumption_from_ratio(getattr(args, "ratio", None))


def _load_two_groups(args, shift=0.0):
    """Group summaries (and raw vectors) for exposed vs the other level."""
    data = read_csv(args.data)
    out = data[args.outcome]
    grp = data[args.group]
    if out.numeric is None:
        raise UsageError(f"outcome {args.outcome!r} is not numeric")
    keep = data.complete_mask([args.outcome, args.group])
    levels = grp.levels(keep)
    if args.exposed not in levels:
        raise UsageError(f"exposed level {args.exposed!r} not found in {args.group!r}")
    if len(levels) != 2:
        raise UsageError(
            f"{args.group!r} has {len(levels)} levels; two are required (use regdicho)"
        )
    control = next(lev for lev in levels if lev != args.exposed)
    y = out.numeric + shift
    labels = np.array([v for v in grp.raw], dtype=object)
    xe = y[keep & (labels == args.exposed)]
    xc = y[keep & (labels == control)]
    deleted = int(data.n_rows - keep.sum())
    return (GroupSummary.from_values(xe), GroupSummary.from_values(xc),
            (args.exposed, control), xe, xc, deleted)


def _summaries(args, shift=0.0):
    missing = [f"--{k}" for k in ("n1", "m1", "s1", "n2", "m2", "s2") if getattr(args, k) is None]
    if missing:
        raise UsageError("missing summary statistics: " + " ".join(missing))
    g1 = GroupSummary(args.n1, args.m1 + shift, args.s1)
    g2 = GroupSummary(args.n2, args.m2 + shift, args.s2)
    return g1, g2, (args.label1, args.label2)


def _emit(args, blocks, tt=None, deleted=0, note=True):
    if args.format == "json":
        if tt is None and len(blocks) != 1:
            doc = {"comparisons": [result_to_dict(r) for r in blocks]}
        else:
            doc = {"comparison": result_to_dict(blocks[0])}
        if tt is not None:
            doc["t_test"] = ttest_to_dict(tt)
        doc["deleted"] = deleted
        print(json.dumps(doc, indent=2))
        return
    if deleted:
        print(f"({deleted} observations deleted due to missingness)")
    if tt is not None:
        print(render_ttest(tt))
    for r in blocks:
        print(render_comparison(r, distributional_note=note))


def _ttest_variant(assumption):
    return "pooled" if isinstance(assumption, Equal) else "welch"


def cmd_dicho(args):
    ge, gc, labels, _, _, deleted = _load_two_groups(args)
    a = _assumption(args)
    r = dist_normal(ge, gc, args.cp, Tail(args.tail), a, args.level, labels)
    _emit(args, [r], t_test(ge, gc, _ttest_variant(a), args.level), deleted)


def cmd_dichoi(args):
    ge, gc, labels = _summaries(args)
    a = _assumption(args)
    r = dist_normal(ge, gc, args.cp, Tail(args.tail), a, args.level, labels)
    _emit(args, [r], t_test(ge, gc, _ttest_variant(a), args.level))


def cmd_dichogen(args):
    tail = Tail(args.tail)
    a = _assumption(args)
    shift = args.shift if args.dist == "gamma" else 0.0
    if args.shift and args.dist != "gamma":
        raise UsageError("--shift applies to --dist gamma only")
    if args.legacy_n and args.dist != "sk_normal":
        raise UsageError("--legacy-n applies to --dist sk_normal only")
    if args.dist != "normal" and not isinstance(a, Equal):
        raise UsageError("skew-normal and gamma models assume equal variances")
    deleted = 0
    if args.data is not None:
        if args.outcome is None or args.group is None or args.exposed is None:
            raise UsageError("--data needs --outcome, --group and --exposed")
        ge, gc, labels, xe, xc, deleted = _load_two_groups(args, shift)
    else:
        ge, gc, labels = _summaries(args, shift)
        xe = xc = None
    alpha = args.alpha
    if args.dist != "normal" and alpha is None:
        if xe is None:
            raise UsageError("--alpha is required with summary statistics")
        x = np.concatenate([xe, xc])
        g = np.repeat([0, 1], [xe.size, xc.size])
        alpha = fit_sn_shape(x, g) if args.dist == "sk_normal" else fit_gamma_shape(x, g)
    cp = args.cp + shift
    if args.dist == "normal":
        r = dist_normal(ge, gc, cp, tail, a, args.level, labels)
    elif args.dist == "sk_normal":
        r = dist_skewnormal(ge, gc, alpha, cp, tail, args.level, labels,
                            exposed_n_only=args.legacy_n)
    else:
        r = dist_gamma(ge, gc, alpha, cp, tail, args.level, labels)
    _emit(args, [r], t_test(ge, gc, _ttest_variant(a), args.level), deleted)


def cmd_regdicho(args):
    tail = Tail(args.tail)
    deleted = 0
    if args.summary:
        if args.data or args.formula:
            raise UsageError("use either --summary or --data/--formula, not both")
        with open(args.summary, encoding="utf-8") as fh:
            summary = AdjustedModelSummary.from_dict(json.load(fh))
    else:
        if not (args.data and args.formula and args.group_var):
            raise UsageError("regdicho needs --summary, or --data with --formula and --group-var")
        formula = parse_formula(args.formula)
        if args.group_var not in formula.terms:
            raise UsageError(f"--group-var {args.group_var!r} is not a term of the formula")
        data = read_csv(args.data)
        ref = {args.group_var: args.reference} if args.reference else None
        X, y, labels, factors, deleted = build_design(
            data, formula, categorical={args.group_var}, reference=ref)
        model = ols_fit(X, y, labels, factors)
        model.n_deleted = deleted
        summary = from_ols(model, args.group_var)
    blocks = adjusted_comparisons(summary, args.cp, tail, args.level)
    _emit(args, blocks, deleted=deleted, note=False)


def cmd_simulate(args):
    with open(args.scenario, encoding="utf-8") as fh:
        doc = json.load(fh)
    if args.seed is not None:
        doc["seed"] = args.seed
    if args.jobs < 1:
        raise UsageError("--jobs must be >= 1")
    report = run_scenario(SimScenario.from_dict(doc), jobs=args.jobs)
    print(report.to_json())


COMMANDS = {
    "dicho": cmd_dicho,
    "dichoi": cmd_dichoi,
    "dichogen": cmd_dichogen,
    "regdicho": cmd_regdicho,
    "simulate": cmd_simulate,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except (UsageError, FormulaError) as exc:
        print(f"distprop {args.command}: usage error: {exc}", file=sys.stderr)
        return 2
    except (DistPropError, OSError, KeyError, ValueError) as exc:
        print(f"distprop {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0
