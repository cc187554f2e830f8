"""Monte-Carlo harness: empirical SE, bias and CI coverage of the estimators.

Replication ``i`` draws from its own substream, derived from
``SeedSequence(seed, spawn_key=(i,))``, so a report depends only on the
scenario and never on how replications are split across workers.
"""

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from distprop import distributions as dist
from distprop.distcore import (
    Equal,
    Tail,
    assumption_from_dict,
    assumption_to_dict,
    dist_gamma,
    dist_normal,
    dist_skewnormal,
)
from distprop.errors import DistPropError, DomainError
from distprop.fitting import GroupSummary

MODELS = ("normal", "skew_normal", "gamma")
EFFECTS = ("diff", "rr", "or")


@dataclass(frozen=True)
class GroupParams:
    mean: float
    sd: float = None


@dataclass(frozen=True)
class DistributionSpec:
    """Outcome model with true per-group parameters.

    ``sd`` is ignored for gamma (implied by mean and shape); ``shape`` is
    required for skew_normal and gamma.
    """

    model: str
    exposed: GroupParams
    control: GroupParams
    shape: float = None

    def __post_init__(self):
        if self.model not in MODELS:
            raise DomainError(f"unknown model {self.model!r}")
        if self.model != "normal" and self.shape is None:
            raise DomainError(f"{self.model} needs a shape")
        if self.model != "gamma":
            for g in (self.exposed, self.control):
                if g.sd is None or not g.sd > 0:
                    raise DomainError(f"{self.model} groups need sd > 0")

    def group(self, which):
        return self.exposed if which == "exposed" else self.control

    def true_proportion(self, which, cp, tail):
        g = self.group(which)
        upper = Tail.coerce(tail) is Tail.UPPER
        if self.model == "normal":
            d = dist.NormalParams(g.mean, g.sd)
        elif self.model == "skew_normal":
            d = dist.SkewNormalCentred(g.mean, g.sd, self.shape)
        else:
            d = dist.GammaParams(self.shape, g.mean)
        return d.sf(cp) if upper else d.cdf(cp)


@dataclass(frozen=True)
class SimScenario:
    distribution: DistributionSpec
    n_exposed: int
    n_control: int
    cut_point: float
    tail: Tail = Tail.LOWER
    assumption: object = field(default_factory=Equal)
    reps: int = 1000
    seed: int = 0
    level: float = 0.95

    def __post_init__(self):
        if self.reps < 100:
            raise DomainError("a scenario needs reps >= 100")
        if self.n_exposed < 2 or self.n_control < 2:
            raise DomainError("group sizes must be >= 2")
        if not 0 <= self.seed < 2 ** 64:
            raise DomainError("seed must be a 64-bit unsigned integer")

    def to_dict(self):
        d = self.distribution
        return {
            "distribution": {
                "model": d.model,
                "exposed": asdict(d.exposed),
                "control": asdict(d.control),
                "shape": d.shape,
            },
            "n_exposed": self.n_exposed,
            "n_control": self.n_control,
            "cut_point": self.cut_point,
            "tail": Tail.coerce(self.tail).value,
            "assumption": assumption_to_dict(self.assumption),
            "reps": self.reps,
            "seed": self.seed,
            "level": self.level,
        }

    @classmethod
    def from_dict(cls, doc):
        dd = doc["distribution"]
        spec = DistributionSpec(
            model=dd["model"],
            exposed=GroupParams(**dd["exposed"]),
            control=GroupParams(**dd["control"]),
            shape=dd.get("shape"),
        )
        return cls(
            distribution=spec,
            n_exposed=int(doc["n_exposed"]),
            n_control=int(doc["n_control"]),
            cut_point=float(doc["cut_point"]),
            tail=Tail.coerce(doc.get("tail", "lower")),
            assumption=assumption_from_dict(doc.get("assumption", "equal")),
            reps=int(doc["reps"]),
            seed=int(doc.get("seed", 0)),
            level=float(doc.get("level", 0.95)),
        )


@dataclass
class SimReport:
    true_effects: dict
    true_proportions: dict
    mean_estimates: dict
    mean_proportions: dict
    proportion_sd: dict
    empirical_sd: dict
    mean_formula_se: dict
    coverage: dict
    failures: int
    reps: int

    def to_dict(self):
        return asdict(self)

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def substream(seed, index):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


def sample(spec, which, n, rng):
    g = spec.group(which)
    if spec.model == "normal":
        return rng.normal(g.mean, g.sd, size=n)
    if spec.model == "skew_normal":
        d = dist.SkewNormalCentred(g.mean, g.sd, spec.shape).direct()
        delta = d.shape / math.sqrt(1.0 + d.shape * d.shape)
        z1 = np.abs(rng.standard_normal(n))
        z2 = rng.standard_normal(n)
        return d.location + d.scale * (delta * z1 + math.sqrt(1.0 - delta * delta) * z2)
    return rng.gamma(spec.shape, g.mean / spec.shape, size=n)


def _estimate(s, xe, xc):
    ge = GroupSummary.from_values(xe)
    gc = GroupSummary.from_values(xc)
    spec = s.distribution
    if spec.model == "normal":
        return dist_normal(ge, gc, s.cut_point, s.tail, s.assumption, s.level)
    if spec.model == "skew_normal":
        return dist_skewnormal(ge, gc, spec.shape, s.cut_point, s.tail, s.level)
    return dist_gamma(ge, gc, spec.shape, s.cut_point, s.tail, s.level)


def _run_chunk(args):
    s, indices = args
    rows = []
    for i in indices:
        rng = substream(s.seed, i)
        xe = sample(s.distribution, "exposed", s.n_exposed, rng)
        xc = sample(s.distribution, "control", s.n_control, rng)
        try:
            r = _estimate(s, xe, xc)
        except DistPropError:
            rows.append(None)
            continue
        row = [r.exposed.prop, r.control.prop]
        for name in EFFECTS:
            e = r.effect(name)
            row += [e.estimate, e.se, e.ci_lower, e.ci_upper]
        rows.append(row)
    return rows


def run_scenario(s, jobs=1):
    indices = list(range(s.reps))
    if jobs <= 1:
        rows = _run_chunk((s, indices))
    else:
        size = math.ceil(s.reps / jobs)
        chunks = [(s, indices[k:k + size]) for k in range(0, s.reps, size)]
        rows = []
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for part in pool.map(_run_chunk, chunks):
                rows.extend(part)
    ok = np.array([r for r in rows if r is not None], dtype=float).reshape(-1, 14)
    failures = len(rows) - ok.shape[0]

    pe = s.distribution.true_proportion("exposed", s.cut_point, s.tail)
    pc = s.distribution.true_proportion("control", s.cut_point, s.tail)
    truth = {
        "diff": pe - pc,
        "rr": pe / pc,
        "or": (pe / (1.0 - pe)) / (pc / (1.0 - pc)),
    }
    mean_est, emp_sd, mean_se, coverage = {}, {}, {}, {}
    for k, name in enumerate(EFFECTS):
        est, se, lo, hi = (ok[:, 2 + 4 * k + j] for j in range(4))
        mean_est[name] = float(est.mean()) if est.size else math.nan
        emp_sd[name] = float(est.std(ddof=1)) if est.size > 1 else math.nan
        mean_se[name] = float(se.mean()) if se.size else math.nan
        coverage[name] = float(np.mean((lo <= truth[name]) & (truth[name] <= hi))) if est.size else math.nan
    return SimReport(
        true_effects=truth,
        true_proportions={"exposed": pe, "control": pc},
        mean_estimates=mean_est,
        mean_proportions={
            "exposed": float(ok[:, 0].mean()) if ok.size else math.nan,
            "control": float(ok[:, 1].mean()) if ok.size else math.nan,
        },
        proportion_sd={
            "exposed": float(ok[:, 0].std(ddof=1)) if ok.shape[0] > 1 else math.nan,
            "control": float(ok[:, 1].std(ddof=1)) if ok.shape[0] > 1 else math.nan,
        },
        empirical_sd=emp_sd,
        mean_formula_se=mean_se,
        coverage=coverage,
        failures=failures,
        reps=s.reps,
    )
