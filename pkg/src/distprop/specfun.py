"""Scalar special functions: gamma family, incomplete beta, normal, Owen's T.

All functions take and return Python floats and reject NaN with
:class:`~distprop.errors.DomainError`.
"""

import math
from statistics import NormalDist

from distprop.errors import ConvergenceError, DomainError

MAX_ITER = 1000
EPS = 1e-15
_TINY = 1e-300
_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
_STD_NORMAL = NormalDist()


def _check(*values):
    for v in values:
        if math.isnan(v):
            raise DomainError("NaN argument")


# --- gamma family ---------------------------------------------------------

def log_gamma(x):
    """ln Gamma(x) for x > 0."""
    _check(x)
    if not (x > 0) or math.isinf(x):
        raise DomainError(f"log_gamma requires finite x > 0, got {x!r}")
    return math.lgamma(x)


def digamma(x):
    """psi(x) for x > 0 via upward recurrence + asymptotic series."""
    _check(x)
    if not x > 0:
        raise DomainError(f"digamma requires x > 0, got {x!r}")
    acc = 0.0
    while x < 8.0:
        acc -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    series = inv2 * (1 / 12 - inv2 * (1 / 120 - inv2 * (1 / 252 - inv2 * (1 / 240 - inv2 / 132))))
    return acc + math.log(x) - 0.5 / x - series


def trigamma(x):
    """psi'(x) for x > 0."""
    _check(x)
    if not x > 0:
        raise DomainError(f"trigamma requires x > 0, got {x!r}")
    acc = 0.0
    while x < 8.0:
        acc += 1.0 / (x * x)
        x += 1.0
    inv = 1.0 / x
    inv2 = inv * inv
    series = inv + 0.5 * inv2 + inv * inv2 * (
        1 / 6 - inv2 * (1 / 30 - inv2 * (1 / 42 - inv2 * (1 / 30 - inv2 * 5 / 66)))
    )
    return acc + series


def _gamma_prefactor(shape, x):
    # x^a e^{-x} / Gamma(a)
    return math.exp(shape * math.log(x) - x - math.lgamma(shape))


def _gamma_series(shape, x):
    term = 1.0 / shape
    total = term
    ap = shape
    for _ in range(MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * EPS:
            return total * _gamma_prefactor(shape, x)
    raise ConvergenceError("incomplete gamma series did not converge", last=total)


def _gamma_cfrac(shape, x):
    # modified Lentz for the upper tail Q(a, x)
    b = x + 1.0 - shape
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, MAX_ITER + 1):
        an = -i * (i - shape)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < EPS:
            return h * _gamma_prefactor(shape, x)
    raise ConvergenceError("incomplete gamma continued fraction did not converge", last=h)


def _check_gamma_args(shape, x):
    _check(shape, x)
    if not shape > 0 or math.isinf(shape):
        raise DomainError(f"shape must be finite and > 0, got {shape!r}")
    if x < 0:
        raise DomainError(f"x must be >= 0, got {x!r}")


def reg_gamma_lower(shape, x):
    """Regularized lower incomplete gamma P(shape, x)."""
    _check_gamma_args(shape, x)
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return 1.0
    if x < shape + 1.0:
        return min(1.0, _gamma_series(shape, x))
    return max(0.0, 1.0 - _gamma_cfrac(shape, x))


def reg_gamma_upper(shape, x):
    """Regularized upper incomplete gamma Q(shape, x) = 1 - P(shape, x)."""
    _check_gamma_args(shape, x)
    if x == 0.0:
        return 1.0
    if math.isinf(x):
        return 0.0
    if x < shape + 1.0:
        return max(0.0, 1.0 - _gamma_series(shape, x))
    return min(1.0, _gamma_cfrac(shape, x))


# --- incomplete beta ------------------------------------------------------

def _beta_cfrac(a, b, x):
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < EPS:
            return h
    raise ConvergenceError("incomplete beta continued fraction did not converge", last=h)


def reg_beta_pair(a, b, x, y):
    """I_x(a, b) where the caller also supplies y = 1 - x.

    Passing ``y`` separately keeps full precision when x is close to 1.
    """
    if x <= 0.0:
        return 0.0
    if y <= 0.0:
        return 1.0
    log_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log(y)
    )
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cfrac(a, b, x) / a
    return 1.0 - front * _beta_cfrac(b, a, y) / b


def reg_beta(a, b, x):
    """Regularized incomplete beta I_x(a, b)."""
    _check(a, b, x)
    if not (a > 0 and b > 0) or math.isinf(a) or math.isinf(b):
        raise DomainError(f"reg_beta requires finite a, b > 0, got {a!r}, {b!r}")
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"reg_beta requires x in [0, 1], got {x!r}")
    return min(1.0, max(0.0, reg_beta_pair(a, b, x, 1.0 - x)))


# --- normal ---------------------------------------------------------------

def normal_cdf(z):
    _check(z)
    return 0.5 * math.erfc(-z / _SQRT2)


def normal_sf(z):
    """Upper tail 1 - Phi(z), accurate for large z."""
    _check(z)
    return 0.5 * math.erfc(z / _SQRT2)


def normal_pdf(z):
    _check(z)
    return _INV_SQRT_2PI * math.exp(-0.5 * z * z)


def normal_quantile(p):
    _check(p)
    if not 0.0 < p < 1.0:
        raise DomainError(f"normal_quantile requires p in (0, 1), got {p!r}")
    return _STD_NORMAL.inv_cdf(p)


# --- Owen's T -------------------------------------------------------------

# Gauss-Kronrod 7/15 nodes on [-1, 1] (positive half, last node is 0).
_XGK = (
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
)
_WGK = (
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
)
_WG = (
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
)


def _gk15(f, lo, hi):
    centre = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    fc = f(centre)
    kronrod = fc * _WGK[7]
    gauss = fc * _WG[3]
    for j in range(7):
        dx = half * _XGK[j]
        fsum = f(centre - dx) + f(centre + dx)
        kronrod += _WGK[j] * fsum
        if j % 2 == 1:
            gauss += _WG[j // 2] * fsum
    return kronrod * half, abs((kronrod - gauss) * half)


def _adaptive(f, lo, hi, tol, depth=0):
    value, err = _gk15(f, lo, hi)
    # second test stops refinement once the error estimate is at roundoff level
    if err <= tol or err <= 1e-15 * abs(value) or depth >= 40:
        return value
    mid = 0.5 * (lo + hi)
    return _adaptive(f, lo, mid, 0.5 * tol, depth + 1) + _adaptive(f, mid, hi, 0.5 * tol, depth + 1)


def _owens_t_small(h, a):
    # 0 <= a <= 1, h >= 0
    hh = -0.5 * h * h
    scale = math.exp(hh)
    if scale == 0.0:
        return 0.0

    def integrand(x):
        xx = x * x
        return math.exp(hh * xx) / (1.0 + xx)

    # the rescaled integrand underflows beyond x = 40 / h
    upper = min(a, 40.0 / h)
    return scale * _adaptive(integrand, 0.0, upper, 1e-15) / (2.0 * math.pi)


def owens_t(h, a):
    """Owen's T function T(h, a)."""
    _check(h, a)
    if math.isinf(h) or math.isinf(a):
        raise DomainError("owens_t requires finite arguments")
    if a == 0.0:
        return 0.0
    sign = 1.0 if a > 0 else -1.0
    a = abs(a)
    h = abs(h)
    if h == 0.0:
        return sign * math.atan(a) / (2.0 * math.pi)
    if a <= 1.0:
        return sign * _owens_t_small(h, a)
    ah = a * h
    qh = normal_sf(h)
    qah = normal_sf(ah)
    value = 0.5 * qh + 0.5 * qah - qh * qah - _owens_t_small(ah, 1.0 / a)
    return sign * value
