"""Parameter estimation: pooled SDs, Welch df, shape MLEs, OLS."""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import log_ndtr

from distprop import specfun
from distprop.errors import ConvergenceError, DomainError, RankError


@dataclass(frozen=True)
class GroupSummary:
    n: int
    mean: float
    sd: float

    def __post_init__(self):
        if self.n < 2:
            raise DomainError(f"group needs n >= 2, got {self.n}")
        if not self.sd > 0:
            raise DomainError(f"group sd must be > 0, got {self.sd!r}")

    @classmethod
    def from_values(cls, values):
        x = np.asarray(values, dtype=float)
        if x.size < 2:
            raise DomainError("group needs at least 2 observations")
        return cls(n=int(x.size), mean=float(x.mean()), sd=float(x.std(ddof=1)))


def _ratio_pooled_variance(g1, g2, ratio):
    # variance of group 2 when var(g1) = ratio * var(g2)
    return ((g1.n - 1) * g1.sd ** 2 / ratio + (g2.n - 1) * g2.sd ** 2) / (g1.n + g2.n - 2)


def pooled_sd(g1, g2):
    return math.sqrt(_ratio_pooled_variance(g1, g2, 1.0))


def ratio_pooled_sds(g_exposed, g_control, ratio):
    """SDs (exposed, control) pooled under var(exposed) = ratio * var(control)."""
    if not ratio > 0:
        raise DomainError(f"variance ratio must be > 0, got {ratio!r}")
    var_c = _ratio_pooled_variance(g_exposed, g_control, ratio)
    return math.sqrt(ratio * var_c), math.sqrt(var_c)


def welch_df(g1, g2):
    v1 = g1.sd ** 2 / g1.n
    v2 = g2.sd ** 2 / g2.n
    return (v1 + v2) ** 2 / (v1 ** 2 / (g1.n - 1) + v2 ** 2 / (g2.n - 1))


# --- shape estimation -----------------------------------------------------

def _group_codes(groups, n):
    labels = np.asarray(groups)
    if labels.shape[0] != n:
        raise DomainError("data and groups differ in length")
    _, codes = np.unique(labels, return_inverse=True)
    return codes.ravel()


def _sn_profile_loglik(alpha, x, codes, means, sigma):
    delta = alpha / math.sqrt(1.0 + alpha * alpha)
    mu_z = math.sqrt(2.0 / math.pi) * delta
    w = sigma / math.sqrt(1.0 - mu_z * mu_z)
    z = (x - (means[codes] - w * mu_z)) / w
    return (
        x.size * (math.log(2.0) - math.log(w) - 0.5 * math.log(2.0 * math.pi))
        - 0.5 * float(np.dot(z, z))
        + float(log_ndtr(alpha * z).sum())
    )


def sn_profile_loglik(alpha, data, groups):
    """Log-likelihood at shape ``alpha`` with each group recentred on its
    sample mean and a common ML-pooled SD."""
    x = np.asarray(data, dtype=float)
    codes = _group_codes(groups, x.size)
    means = np.bincount(codes, weights=x) / np.bincount(codes)
    resid = x - means[codes]
    sigma = math.sqrt(float(np.dot(resid, resid)) / x.size)
    return _sn_profile_loglik(alpha, x, codes, means, sigma)


def fit_sn_shape(data, groups, bound=50.0, tol=1e-6, max_iter=200):
    """Common skew-normal shape for two groups sharing SD and shape.

    The profile is scanned on a grid dense near zero; golden-section search
    then refines inside the best grid cell.
    """
    x = np.asarray(data, dtype=float)
    if x.size < 10:
        raise DomainError("fit_sn_shape needs at least 10 observations")
    if not np.all(np.isfinite(x)):
        raise DomainError("data contain non-finite values")
    codes = _group_codes(groups, x.size)
    counts = np.bincount(codes)
    if counts.size > 2:
        raise DomainError("fit_sn_shape expects at most two groups")
    means = np.bincount(codes, weights=x) / counts
    resid = x - means[codes]
    sigma = math.sqrt(float(np.dot(resid, resid)) / x.size)
    if sigma == 0.0:
        raise DomainError("data have zero within-group variance")

    def ll(a):
        return _sn_profile_loglik(a, x, codes, means, sigma)

    top = math.asinh(bound)
    grid = [math.sinh(t) for t in np.linspace(-top, top, 161)]
    grid[80] = 0.0
    values = [ll(a) for a in grid]
    k = int(np.argmax(values))
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, len(grid) - 1)]

    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    c = hi - inv_phi * (hi - lo)
    d = lo + inv_phi * (hi - lo)
    fc, fd = ll(c), ll(d)
    for _ in range(max_iter):
        if hi - lo < tol:
            return 0.5 * (lo + hi)
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - inv_phi * (hi - lo)
            fc = ll(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + inv_phi * (hi - lo)
            fd = ll(d)
    raise ConvergenceError("skew-normal shape search did not converge", last=0.5 * (lo + hi))


def gamma_moment_shape(summaries):
    """Pooled method-of-moments shape: inverse of the pooled squared CV."""
    num = sum(g.n - 1 for g in summaries)
    den = sum((g.n - 1) * (g.sd / g.mean) ** 2 for g in summaries)
    return num / den


def fit_gamma_shape(data, groups, tol=1e-10, max_iter=100):
    """Common gamma shape with group-specific means (profile MLE).

    Solves ln(a) - digamma(a) = mean(ln xbar_g - ln x) by Newton iteration
    in ln(a), started from the pooled moment estimate.
    """
    x = np.asarray(data, dtype=float)
    if np.any(~np.isfinite(x)):
        raise DomainError("data contain non-finite values")
    if np.any(x < 0):
        raise DomainError("gamma data must be non-negative")
    if np.any(x == 0):
        raise DomainError(
            "gamma shape cannot be fitted with zero observations; "
            "supply a positive shift (e.g. --shift 0.5)"
        )
    codes = _group_codes(groups, x.size)
    counts = np.bincount(codes)
    if np.any(counts < 2):
        raise DomainError("each group needs at least 2 observations")
    means = np.bincount(codes, weights=x) / counts
    target = float(np.mean(np.log(means[codes]) - np.log(x)))
    if not target > 0:
        raise DomainError("data are constant within groups; shape is unbounded")

    summaries = [GroupSummary.from_values(x[codes == j]) for j in range(counts.size)]
    u = math.log(gamma_moment_shape(summaries))
    for _ in range(max_iter):
        a = math.exp(u)
        g = u - specfun.digamma(a) - target
        dg = 1.0 - a * specfun.trigamma(a)
        step = -g / dg
        step = max(-2.0, min(2.0, step))
        u += step
        if abs(step) < tol:
            return math.exp(u)
    raise ConvergenceError("gamma shape Newton iteration did not converge", last=math.exp(u))


# --- linear models --------------------------------------------------------

@dataclass(frozen=True)
class Factor:
    """Reference-coded categorical term: ``columns[i]`` is the dummy for ``levels[i]``."""

    name: str
    reference: str
    levels: tuple
    columns: tuple


@dataclass
class FittedLinearModel:
    coefficients: np.ndarray
    residual_sd: float
    covariate_means: np.ndarray
    level_counts: dict
    design_labels: list
    factors: dict = field(default_factory=dict)
    n_obs: int = 0
    n_deleted: int = 0

    def coefficient(self, label):
        return float(self.coefficients[self.design_labels.index(label)])


def ols_fit(design, response, labels=None, factors=(), rank_tol=1e-10):
    """Least squares fit with listwise deletion of rows containing NaN."""
    X = np.asarray(design, dtype=float)
    y = np.asarray(response, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if labels is None:
        labels = [f"x{j}" for j in range(X.shape[1])]
    labels = list(labels)
    keep = np.all(np.isfinite(X), axis=1) & np.isfinite(y)
    n_deleted = int((~keep).sum())
    X, y = X[keep], y[keep]
    rows, cols = X.shape
    if rows < cols + 1:
        raise DomainError(f"need at least {cols + 1} complete rows, got {rows}")

    q, r = np.linalg.qr(X)
    diag = np.abs(np.diag(r))
    scale = np.linalg.norm(X, axis=0)
    for j in range(cols):
        if diag[j] <= rank_tol * max(scale[j], np.finfo(float).tiny):
            raise RankError(f"design is rank deficient at column {labels[j]!r}", column=labels[j])
    beta = np.linalg.solve(r, q.T @ y)
    resid = y - X @ beta
    residual_sd = math.sqrt(float(resid @ resid) / (rows - cols))

    factor_map = {}
    level_counts = {}
    for f in factors:
        idx = [labels.index(c) for c in f.columns]
        dummies = X[:, idx] if idx else np.zeros((rows, 0))
        counts = {f.reference: int(rows - dummies.sum())}
        for level, j in zip(f.levels, range(len(idx))):
            counts[level] = int(dummies[:, j].sum())
        level_counts[f.name] = counts
        factor_map[f.name] = f

    return FittedLinearModel(
        coefficients=beta,
        residual_sd=residual_sd,
        covariate_means=X.mean(axis=0),
        level_counts=level_counts,
        design_labels=labels,
        factors=factor_map,
        n_obs=rows,
        n_deleted=n_deleted,
    )


def marginal_means(model, group_var):
    """Predicted mean per level of ``group_var`` with other columns at their means."""
    if group_var not in model.factors:
        raise DomainError(f"{group_var!r} is not a categorical term of the model")
    f = model.factors[group_var]
    dummy_idx = {model.design_labels.index(c) for c in f.columns}
    base = 0.0
    for j, label in enumerate(model.design_labels):
        if j in dummy_idx:
            continue
        base += model.coefficients[j] * model.covariate_means[j]
    out = {f.reference: float(base)}
    for level, col in zip(f.levels, f.columns):
        out[level] = float(base + model.coefficient(col))
    return out
