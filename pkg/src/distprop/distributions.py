"""Normal, skew-normal, gamma and Student-t distributions.

Skew-normal parameters are carried in centred form (mean, sd, shape) and
converted to the direct form (location, scale, shape) on demand.
"""

import math
from dataclasses import dataclass

from distprop import specfun
from distprop.errors import ConvergenceError, DomainError

_TWO_OVER_PI = 2.0 / math.pi


@dataclass(frozen=True)
class NormalParams:
    mean: float
    sd: float

    def __post_init__(self):
        if not self.sd > 0:
            raise DomainError(f"sd must be > 0, got {self.sd!r}")

    def pdf(self, x):
        return specfun.normal_pdf((x - self.mean) / self.sd) / self.sd

    def cdf(self, x):
        return specfun.normal_cdf((x - self.mean) / self.sd)

    def sf(self, x):
        return specfun.normal_sf((x - self.mean) / self.sd)

    def quantile(self, p):
        return self.mean + self.sd * specfun.normal_quantile(p)


@dataclass(frozen=True)
class SkewNormalDirect:
    location: float
    scale: float
    shape: float

    def __post_init__(self):
        if not self.scale > 0:
            raise DomainError(f"scale must be > 0, got {self.scale!r}")
        if not math.isfinite(self.shape):
            raise DomainError("shape must be finite")


@dataclass(frozen=True)
class SkewNormalCentred:
    mean: float
    sd: float
    shape: float

    def __post_init__(self):
        if not self.sd > 0:
            raise DomainError(f"sd must be > 0, got {self.sd!r}")
        if not math.isfinite(self.shape):
            raise DomainError("shape must be finite")

    def direct(self):
        return sn_centred_to_direct(self)

    def pdf(self, x):
        return sn_pdf(self, x)

    def cdf(self, x):
        return sn_cdf(self, x)

    def sf(self, x):
        return sn_sf(self, x)


def _mu_z(shape):
    """Mean of the standardised skew-normal, signed like ``shape``."""
    delta = shape / math.sqrt(1.0 + shape * shape)
    return math.sqrt(_TWO_OVER_PI) * delta


def sn_centred_to_direct(p):
    mu_z = _mu_z(p.shape)
    scale = p.sd / math.sqrt(1.0 - mu_z * mu_z)
    return SkewNormalDirect(location=p.mean - scale * mu_z, scale=scale, shape=p.shape)


def sn_direct_to_centred(d):
    mu_z = _mu_z(d.shape)
    return SkewNormalCentred(
        mean=d.location + d.scale * mu_z,
        sd=d.scale * math.sqrt(1.0 - mu_z * mu_z),
        shape=d.shape,
    )


def _as_direct(p):
    return p if isinstance(p, SkewNormalDirect) else sn_centred_to_direct(p)


def sn_pdf(p, x):
    d = _as_direct(p)
    z = (x - d.location) / d.scale
    return 2.0 * specfun.normal_pdf(z) * specfun.normal_cdf(d.shape * z) / d.scale


def sn_cdf(p, x):
    """Skew-normal CDF, Phi(z) - 2 T(z, shape)."""
    d = _as_direct(p)
    z = (x - d.location) / d.scale
    value = specfun.normal_cdf(z) - 2.0 * specfun.owens_t(z, d.shape)
    return min(1.0, max(0.0, value))


def sn_sf(p, x):
    d = _as_direct(p)
    z = (x - d.location) / d.scale
    value = specfun.normal_sf(z) + 2.0 * specfun.owens_t(z, d.shape)
    return min(1.0, max(0.0, value))


@dataclass(frozen=True)
class GammaParams:
    """Gamma distribution parameterised by shape and mean (rate = shape/mean)."""

    shape: float
    mean: float

    def __post_init__(self):
        if not self.shape > 0:
            raise DomainError(f"shape must be > 0, got {self.shape!r}")
        if not self.mean > 0:
            raise DomainError(f"mean must be > 0, got {self.mean!r}")

    @property
    def rate(self):
        return self.shape / self.mean

    @property
    def variance(self):
        return self.mean * self.mean / self.shape

    def pdf(self, x):
        return gamma_pdf(self, x)

    def cdf(self, x):
        return gamma_cdf(self, x)

    def sf(self, x):
        return gamma_sf(self, x)

    def quantile(self, p):
        return gamma_quantile(self, p)


def _check_support(x):
    if math.isnan(x) or x < 0:
        raise DomainError(f"gamma support is x >= 0, got {x!r}")


def gamma_pdf(p, x):
    _check_support(x)
    if x == 0.0:
        if p.shape < 1:
            return math.inf
        return p.rate if p.shape == 1 else 0.0
    log_f = (
        p.shape * math.log(p.rate) + (p.shape - 1.0) * math.log(x)
        - p.rate * x - specfun.log_gamma(p.shape)
    )
    return math.exp(log_f)


def gamma_cdf(p, x):
    _check_support(x)
    return specfun.reg_gamma_lower(p.shape, p.rate * x)


def gamma_sf(p, x):
    _check_support(x)
    return specfun.reg_gamma_upper(p.shape, p.rate * x)


def gamma_quantile(p, prob, tol=1e-10):
    """Inverse CDF by bisection; relative tolerance, geometric midpoints
    for small shapes whose lower quantiles sit many decades below the mean."""
    if not 0.0 < prob < 1.0:
        raise DomainError(f"quantile requires p in (0, 1), got {prob!r}")
    lo, hi = p.mean, p.mean
    while gamma_cdf(p, hi) < prob:
        hi *= 2.0
    while lo > 1e-300 and gamma_cdf(p, lo) >= prob:
        lo *= 1e-3
    for _ in range(2000):
        mid = math.sqrt(lo * hi) if hi > 4.0 * lo else 0.5 * (lo + hi)
        if gamma_cdf(p, mid) < prob:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol * hi:
            return 0.5 * (lo + hi)
    raise ConvergenceError("gamma quantile bisection did not converge", last=0.5 * (lo + hi))


@dataclass(frozen=True)
class StudentT:
    df: float

    def __post_init__(self):
        if not self.df > 0:
            raise DomainError(f"df must be > 0, got {self.df!r}")

    def cdf(self, t):
        return t_cdf(self, t)

    def sf(self, t):
        return t_cdf(self, -t)

    def quantile(self, p):
        return t_quantile(self, p)


def _t_tail(df, t):
    # P(T < -|t|)
    tt = t * t
    x = df / (df + tt)
    y = tt / (df + tt)
    return 0.5 * specfun.reg_beta_pair(0.5 * df, 0.5, x, y)


def t_cdf(dist, t):
    if math.isnan(t):
        raise DomainError("NaN argument")
    if math.isinf(t):
        return 1.0 if t > 0 else 0.0
    tail = _t_tail(dist.df, t)
    return 1.0 - tail if t > 0 else tail


def t_two_sided_p(dist, t):
    return min(1.0, 2.0 * _t_tail(dist.df, t))


def t_quantile(dist, p, tol=1e-12):
    if not 0.0 < p < 1.0:
        raise DomainError(f"quantile requires p in (0, 1), got {p!r}")
    if p == 0.5:
        return 0.0
    if p < 0.5:
        return -t_quantile(dist, 1.0 - p, tol)
    hi = max(1.0, specfun.normal_quantile(p))
    while t_cdf(dist, hi) < p:
        hi *= 2.0
    lo = 0.0
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if t_cdf(dist, mid) < p:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol * max(1.0, hi):
            break
    return 0.5 * (lo + hi)
