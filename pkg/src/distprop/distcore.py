"""Distributional estimators of proportions beyond a cut-point.

Each estimator maps two group summaries to a :class:`ComparisonResult`
holding both proportions and the difference / risk ratio / odds ratio with
delta-method standard errors. Ratio CIs are built on the log scale.
"""

import enum
import math
from dataclasses import dataclass, field

from distprop import distributions as dist
from distprop import specfun
from distprop.errors import DomainError, SupportError
from distprop.fitting import pooled_sd, ratio_pooled_sds, welch_df

P_FLOOR = 1e-15


class Tail(str, enum.Enum):
    LOWER = "lower"
    UPPER = "upper"

    @classmethod
    def coerce(cls, value):
        return value if isinstance(value, cls) else cls(str(value).lower())


@dataclass(frozen=True)
class Equal:
    kind = "equal"


@dataclass(frozen=True)
class KnownRatio:
    """Known variance ratio var(exposed) / var(control)."""

    ratio: float
    kind = "known_ratio"

    def __post_init__(self):
        if not self.ratio > 0:
            raise DomainError(f"variance ratio must be > 0, got {self.ratio!r}")


@dataclass(frozen=True)
class UnknownUnequal:
    kind = "unknown_unequal"


def assumption_from_ratio(ratio):
    """Map a user ``R`` option to an assumption; 0 means unknown (corrected)."""
    if ratio is None or ratio == 1:
        return Equal()
    if ratio == 0:
        return UnknownUnequal()
    return KnownRatio(float(ratio))


def assumption_to_dict(assumption):
    if isinstance(assumption, KnownRatio):
        return {"kind": assumption.kind, "ratio": assumption.ratio}
    return {"kind": assumption.kind}


def assumption_from_dict(doc):
    if isinstance(doc, str):
        doc = {"kind": doc}
    kind = doc.get("kind")
    if kind == "equal":
        return Equal()
    if kind == "unknown_unequal":
        return UnknownUnequal()
    if kind == "known_ratio":
        return KnownRatio(float(doc["ratio"]))
    raise DomainError(f"unknown variance assumption {kind!r}")


@dataclass(frozen=True)
class EffectRow:
    name: str
    estimate: float
    se: float
    ci_lower: float
    ci_upper: float
    se_log: float = None


@dataclass(frozen=True)
class GroupResult:
    label: str
    n: int
    mean: float
    sd: float
    prop: float


@dataclass(frozen=True)
class ComparisonResult:
    cut_point: float
    tail: Tail
    assumption: object
    groups: tuple
    effects: tuple
    level: float = 0.95
    model: str = "normal"
    shape: float = None

    @property
    def exposed(self):
        return self.groups[0]

    @property
    def control(self):
        return self.groups[1]

    def effect(self, name):
        for row in self.effects:
            if row.name == name:
                return row
        raise KeyError(name)

    @property
    def diff(self):
        return self.effect("diff")

    @property
    def rr(self):
        return self.effect("rr")

    @property
    def odds_ratio(self):
        return self.effect("or")


def _z_crit(level):
    if not 0.0 < level < 1.0:
        raise DomainError(f"confidence level must be in (0, 1), got {level!r}")
    return specfun.normal_quantile(1.0 - (1.0 - level) / 2.0)


def _check_prop(p, label):
    if not P_FLOOR <= p <= 1.0 - P_FLOOR:
        raise SupportError(
            f"cut-point outside distribution support precision (group {label!r}, p={p:.3g})"
        )


def lognormal_sd(estimate, se_log):
    """SD of a lognormal with median ``estimate`` and log-scale SD ``se_log``."""
    s2 = se_log * se_log
    return estimate * math.exp(0.5 * s2) * math.sqrt(math.expm1(s2))


def _ratio_row(name, log_est, se_log, q):
    est = math.exp(log_est)
    return EffectRow(
        name=name,
        estimate=est,
        se=lognormal_sd(est, se_log),
        se_log=se_log,
        ci_lower=math.exp(log_est - q * se_log),
        ci_upper=math.exp(log_est + q * se_log),
    )


def effect_rows(p1, var1, p2, var2, level=0.95):
    """Difference, risk ratio and odds ratio rows from two proportions and
    the delta-method variances of each."""
    q = _z_crit(level)
    d = p1 - p2
    se_d = math.sqrt(var1 + var2)
    diff = EffectRow("diff", d, se_d, d - q * se_d, d + q * se_d)
    se_lrr = math.sqrt(var1 / p1 ** 2 + var2 / p2 ** 2)
    o1 = p1 * (1.0 - p1)
    o2 = p2 * (1.0 - p2)
    se_lor = math.sqrt(var1 / o1 ** 2 + var2 / o2 ** 2)
    log_rr = math.log(p1) - math.log(p2)
    log_or = log_rr - math.log1p(-p1) + math.log1p(-p2)
    return (diff, _ratio_row("rr", log_rr, se_lrr, q), _ratio_row("or", log_or, se_lor, q))


def _build(cut_point, tail, assumption, labels, summaries, sds, props, variances,
           level, model="normal", shape=None):
    for label, p in zip(labels, props):
        _check_prop(p, label)
    groups = tuple(
        GroupResult(label=str(lab), n=g.n, mean=g.mean, sd=g.sd, prop=p)
        for lab, g, p in zip(labels, summaries, props)
    )
    return ComparisonResult(
        cut_point=cut_point,
        tail=tail,
        assumption=assumption,
        groups=groups,
        effects=effect_rows(props[0], variances[0], props[1], variances[1], level),
        level=level,
        model=model,
        shape=shape,
    )


def normal_comparison(exposed, control, sd_exposed, sd_control, cp, tail=Tail.LOWER,
                      assumption=Equal(), level=0.95, labels=("exposed", "control"),
                      correct=False):
    """Normal-model comparison with the group SDs imposed by the caller.

    With ``correct`` each variance is inflated by (1 + z^2/2), the extra
    term from estimating the SD itself.
    """
    tail = Tail.coerce(tail)
    props, variances = [], []
    for g, sd in ((exposed, sd_exposed), (control, sd_control)):
        z = (cp - g.mean) / sd
        p = specfun.normal_cdf(z) if tail is Tail.LOWER else specfun.normal_sf(z)
        f = specfun.normal_pdf(z) / sd
        var = sd * sd / g.n * f * f
        if correct:
            var *= 1.0 + 0.5 * z * z
        props.append(p)
        variances.append(var)
    return _build(cp, tail, assumption, labels, (exposed, control),
                  (sd_exposed, sd_control), props, variances, level)


def dist_normal(exposed, control, cp, tail=Tail.LOWER, assumption=Equal(), level=0.95,
                labels=("exposed", "control")):
    if isinstance(assumption, Equal):
        s = pooled_sd(exposed, control)
        sd_e = sd_c = s
    elif isinstance(assumption, KnownRatio):
        sd_e, sd_c = ratio_pooled_sds(exposed, control, assumption.ratio)
    elif isinstance(assumption, UnknownUnequal):
        sd_e, sd_c = exposed.sd, control.sd
    else:
        raise DomainError(f"unknown variance assumption {assumption!r}")
    return normal_comparison(exposed, control, sd_e, sd_c, cp, tail, assumption, level,
                             labels, correct=isinstance(assumption, UnknownUnequal))


def dist_skewnormal(exposed, control, shape, cp, tail=Tail.LOWER, level=0.95,
                    labels=("exposed", "control"), exposed_n_only=False):
    """Skew-normal comparison with common pooled SD and shape.

    ``exposed_n_only`` uses the exposed group's n in both variance terms.
    That is a legacy convention kept only to reproduce published tables;
    it mis-scales the control variance whenever the group sizes differ.
    """
    tail = Tail.coerce(tail)
    s = pooled_sd(exposed, control)
    props, variances = [], []
    for g in (exposed, control):
        p_sn = dist.SkewNormalCentred(mean=g.mean, sd=s, shape=shape)
        p = dist.sn_cdf(p_sn, cp) if tail is Tail.LOWER else dist.sn_sf(p_sn, cp)
        f = dist.sn_pdf(p_sn, cp)
        n = exposed.n if exposed_n_only else g.n
        props.append(p)
        variances.append(s * s / n * f * f)
    return _build(cp, tail, Equal(), labels, (exposed, control), (s, s), props, variances,
                  level, model="skew_normal", shape=shape)


def gamma_mean_derivative(shape, mean, cp):
    """q with dP(X < cp)/d mean = -q / mean for a gamma(shape, mean) outcome."""
    if not (mean > 0 and cp > 0):
        raise DomainError("gamma model needs positive means and cut-point")
    r = shape * cp / mean
    return math.exp(shape * math.log(r) - r - specfun.log_gamma(shape))


def dist_gamma(exposed, control, shape, cp, tail=Tail.LOWER, level=0.95,
               labels=("exposed", "control")):
    tail = Tail.coerce(tail)
    if not shape > 0:
        raise DomainError(f"gamma shape must be > 0, got {shape!r}")
    props, variances = [], []
    for g in (exposed, control):
        params = dist.GammaParams(shape=shape, mean=g.mean)
        if not cp > 0:
            raise DomainError("gamma model needs a positive cut-point")
        p = dist.gamma_cdf(params, cp) if tail is Tail.LOWER else dist.gamma_sf(params, cp)
        qq = gamma_mean_derivative(shape, g.mean, cp)
        props.append(p)
        variances.append(qq * qq / (g.n * shape))
    return _build(cp, tail, Equal(), labels, (exposed, control), (exposed.sd, control.sd),
                  props, variances, level, model="gamma", shape=shape)


@dataclass(frozen=True)
class TTestResult:
    variant: str
    t: float
    df: float
    p_value: float
    ci_lower: float
    ci_upper: float
    means: tuple
    level: float = 0.95
    labels: tuple = field(default=("exposed", "control"))


def t_test(exposed, control, variant="pooled", level=0.95):
    d = exposed.mean - control.mean
    if variant == "pooled":
        s = pooled_sd(exposed, control)
        se = s * math.sqrt(1.0 / exposed.n + 1.0 / control.n)
        df = float(exposed.n + control.n - 2)
    elif variant == "welch":
        se = math.sqrt(exposed.sd ** 2 / exposed.n + control.sd ** 2 / control.n)
        df = welch_df(exposed, control)
    else:
        raise DomainError(f"unknown t-test variant {variant!r}")
    t = d / se
    tdist = dist.StudentT(df)
    crit = dist.t_quantile(tdist, 1.0 - (1.0 - level) / 2.0)
    return TTestResult(
        variant=variant,
        t=t,
        df=df,
        p_value=dist.t_two_sided_p(tdist, t),
        ci_lower=d - crit * se,
        ci_upper=d + crit * se,
        means=(exposed.mean, control.mean),
        level=level,
    )
