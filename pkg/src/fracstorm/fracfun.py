"""Special functions of fractional-order calculus.

Contents
--------
* ``mittag_leffler(beta, x)``      E_beta(x) = sum_k x^k / Gamma(1 + beta k)
* ``mittag_leffler_log(beta, x)``  log E_beta(x) for x >= 0 (huge arguments)
* ``stable_subordinator_density``  density g_beta of the standard beta-stable
                                   subordinator at time 1 (Laplace exponent s^beta)
* ``inverse_subordinator_density`` density of the first-passage inverse E_t
* ``caputo_derivative``            order-beta Caputo derivative of sampled data
* ``fractional_integral``          order-gamma Riemann-Liouville integral

Evaluation strategy for E_beta(-y), y > 0, 0 < beta < 1: the Taylor series
is used only for y <= 0.9 where alternating cancellation costs at most one
digit.  Beyond the seam the completely monotone spectral representation

    E_beta(-y) = sin(pi beta)/(pi beta) *
                 int_0^inf exp(-w^(1/beta)) / (w^2/y + 2 w cos(pi beta) + y) dw

is integrated on fixed composite Gauss panels (positive smooth integrand, no
cancellation; the quadratic in w has negative discriminant so the denominator
never vanishes).  Both branches agree to ~1e-15 at the seam, checked in the
test suite.  For y >= 1e4 the reflection-form asymptotic series is cheaper
and accurate below 1e-11, so it takes over.

g_beta is evaluated from the exact single-integral representation

    g_beta(u) = beta/(pi (1-beta)) * u^(-1/(1-beta)) *
                int_0^pi A(phi) exp(-u^(-beta/(1-beta)) A(phi)) dphi,
    A(phi) = sin(beta phi)^(beta/(1-beta)) * sin((1-beta) phi)
             / sin(phi)^(1/(1-beta)),

for u < 1 and from the convergent reciprocal power series for u >= 1.
Closed forms for beta = 1/2 are kept out of the evaluation path so they can
serve as independent oracles in the tests.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, gamma

from .errors import DomainError, NumericsError
from .quadrature import fixed_panel_nodes

__all__ = [
    "FracOrder",
    "SampledFunction",
    "mittag_leffler",
    "mittag_leffler_log",
    "stable_subordinator_density",
    "subordinator_small_u_law",
    "subordinator_tail_law",
    "inverse_subordinator_density",
    "caputo_derivative",
    "fractional_integral",
]

_SERIES_SEAM = 0.9  # |x| at which the Taylor series hands over to the integral
_FAR_ASYMPTOTIC = 1.0e4  # -x beyond which the reflection asymptotic is used


@dataclass(frozen=True)
class FracOrder:
    """Validated fractional order beta in (0, 1]; beta = 1 is the classical limit."""

    beta: float

    def __post_init__(self):
        b = float(self.beta)
        if not np.isfinite(b) or not (0.0 < b <= 1.0):
            raise DomainError(f"fractional order must lie in (0, 1], got {self.beta}")

    def __float__(self):
        return float(self.beta)


@dataclass(frozen=True)
class SampledFunction:
    """Function sampled on a strictly increasing time grid starting at 0.

    Between samples the function is treated as piecewise linear; the
    fractional-calculus operators below integrate that interpolant exactly.
    """

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, float)
        v = np.asarray(self.values, float)
        if t.ndim != 1 or v.shape != t.shape or t.size < 2:
            raise DomainError("SampledFunction needs matching 1-d times/values, >= 2 samples")
        if t[0] != 0.0:
            raise DomainError(f"times must start at 0.0, got {t[0]}")
        if not np.all(np.diff(t) > 0.0):
            raise DomainError("times must be strictly increasing")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(v))):
            raise DomainError("SampledFunction requires finite samples")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    @property
    def horizon(self):
        return float(self.times[-1])


def _check_beta(beta, strict_upper=False):
    b = float(beta)
    hi_ok = b < 1.0 if strict_upper else b <= 1.0
    if not np.isfinite(b) or not (0.0 < b and hi_ok):
        rng = "(0, 1)" if strict_upper else "(0, 1]"
        raise DomainError(f"order must lie in {rng}, got {beta}")
    return b


def _ml_series(beta, x, kmax=512):
    """Taylor series of E_beta at x, |x| <= ~1 (alternating part is benign)."""
    x = np.asarray(x, float)
    k = np.arange(kmax)
    lg = gammaln(1.0 + beta * k)
    ax = np.abs(x)[..., None]
    with np.errstate(divide="ignore"):
        logs = np.where(ax > 0, k * np.log(np.where(ax > 0, ax, 1.0)), np.where(k == 0, 0.0, -np.inf))
    terms = np.exp(logs - lg) * np.where(x[..., None] < 0, (-1.0) ** k, 1.0)
    return terms.sum(axis=-1)


def _ml_neg_integral_nodes(beta, y_band_max):
    """Panel nodes for the spectral integral, shared across a y array."""
    W = 40.0 ** beta
    edges = [0.0] + list(np.geomspace(1e-8, W, 90))
    cb = np.cos(np.pi * beta)
    if cb < 0.0:
        # Lorentzian ridge at w = |cos(pi beta)| * y; cover every peak that
        # can sit inside the panel window for y in the integral band.
        wmax = min(-cb * y_band_max * 1.5, W)
        if wmax > 1e-8:
            edges += list(np.geomspace(max(-cb * 0.9 * 0.5, 1e-8), wmax, 80))
    return fixed_panel_nodes(np.unique(np.clip(edges, 0.0, W)), n=14)


def _ml_neg(beta, y):
    """E_beta(-y) for y >= 0 (array), 0 < beta < 1."""
    y = np.asarray(y, float)
    out = np.empty_like(y)
    small = y <= _SERIES_SEAM
    far = y >= _FAR_ASYMPTOTIC
    mid = ~small & ~far
    if small.any():
        out[small] = _ml_series(beta, -y[small])
    if mid.any():
        ym = y[mid]
        w, pw = _ml_neg_integral_nodes(beta, float(ym.max()))
        ew = pw * np.exp(-w ** (1.0 / beta))
        cb = np.cos(np.pi * beta)
        den = (w * w)[:, None] / ym[None, :] + 2.0 * cb * w[:, None] + ym[None, :]
        out[mid] = np.sin(np.pi * beta) / (np.pi * beta) * (ew @ (1.0 / den))
    if far.any():
        # E_beta(-y) ~ sum_{k>=1} (-1)^(k-1) y^-k sin(pi beta k) Gamma(beta k) / pi
        yf = y[far]
        acc = np.zeros_like(yf)
        for k in (1, 2, 3):
            coef = np.sin(np.pi * beta * k) * np.exp(gammaln(beta * k)) / np.pi
            acc += (-1.0) ** (k - 1) * coef * yf ** (-float(k))
        out[far] = acc
    return out


def mittag_leffler(beta, x):
    """Mittag-Leffler function E_beta(x) for beta in (0, 1], real x.

    Accepts scalars or ndarrays.  E_1(x) = exp(x) exactly.  For x -> +inf the
    true value eventually exceeds the double range; the function then returns
    +inf (the nearest representable answer).  Accuracy target 1e-10 relative
    on |x| <= 50, verified against closed forms in the test suite.
    """
    b = _check_beta(beta)
    x = np.asarray(x, float)
    if not np.all(np.isfinite(x)):
        raise DomainError("mittag_leffler requires finite arguments")
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    if b == 1.0:
        out = np.exp(x)
    else:
        out = np.empty_like(x)
        neg = x < 0.0
        if neg.any():
            out[neg] = _ml_neg(b, -x[neg])
        if (~neg).any():
            logs = mittag_leffler_log(b, x[~neg])
            with np.errstate(over="ignore"):
                out[~neg] = np.exp(logs)
    return float(out[0]) if scalar else out


def mittag_leffler_log(beta, x):
    """log E_beta(x) for x >= 0, stable for arbitrarily large arguments.

    For x <= 40^beta the positive series is summed directly (its largest term
    stays below e^40 and its peak index 40/beta stays inside the summation
    window); beyond that the exponential asymptotic
    log E_beta(x) = x^(1/beta) - log(beta) holds with relative error below
    e^-40 of an e^40-sized value, far under double precision.  The seam is
    therefore exact to working precision.
    """
    b = _check_beta(beta)
    x = np.asarray(x, float)
    if np.any(x < 0.0) or not np.all(np.isfinite(x)):
        raise DomainError("mittag_leffler_log requires finite x >= 0")
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    if b == 1.0:
        out = x.astype(float).copy()
    else:
        kmax = max(1024, int(120.0 / b))
        if kmax > 20000:
            raise NumericsError(
                f"mittag_leffler_log: order {b} too small for the series "
                "window (needs > 20000 terms)")
        out = np.empty_like(x)
        cut = 40.0 ** b
        lo = x <= cut
        if lo.any():
            out[lo] = np.log(_ml_series(b, x[lo], kmax=kmax))
        if (~lo).any():
            out[~lo] = x[~lo] ** (1.0 / b) - np.log(b)
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# one-sided stable subordinator density
# ---------------------------------------------------------------------------

def _zolotarev_log_a(beta, phi):
    ob = 1.0 - beta
    return (beta / ob) * np.log(np.sin(beta * phi)) \
        + np.log(np.sin(ob * phi)) - np.log(np.sin(phi)) / ob


def _g_small_u(beta, u):
    """Kanter integral, exact for all u; used on u < 1 where it is best behaved."""
    ob = 1.0 - beta
    half = np.geomspace(1e-12, 0.5, 44) * np.pi
    edges = np.unique(np.concatenate([[0.0], half, np.pi - half[::-1], [np.pi]]))
    phi, w = fixed_panel_nodes(edges, n=16)
    la = _zolotarev_log_a(beta, phi)
    c = u ** (-beta / ob)
    with np.errstate(over="ignore", under="ignore"):
        f = np.exp(la[:, None] - c[None, :] * np.exp(la)[:, None])
    integral = w @ f
    return beta / (np.pi * ob) * u ** (-1.0 / ob) * integral


def _g_large_u(beta, u, kmax=700):
    """Reciprocal power series sum_k (-1)^(k+1) Gamma(beta k + 1)/k! sin(pi beta k) u^(-beta k - 1) / pi."""
    k = np.arange(1, kmax + 1)
    lg = gammaln(beta * k + 1.0) - gammaln(k + 1.0)
    sk = np.sin(np.pi * beta * k) * (-1.0) ** (k + 1)
    logs = lg[None, :] - (beta * k + 1.0)[None, :] * np.log(u)[:, None]
    terms = sk[None, :] * np.exp(logs)
    tail = np.abs(terms[:, -1])
    s = terms.sum(axis=1) / np.pi
    if np.any(tail > 1e-14 * np.maximum(np.abs(s) * np.pi, 1e-300)):
        raise NumericsError("subordinator series failed to converge; beta too close to 1")
    return s


def stable_subordinator_density(beta, u):
    """Density g_beta(u) of the standard one-sided beta-stable law, beta in (0,1).

    Laplace transform int_0^inf e^(-s u) g_beta(u) du = exp(-s^beta).
    Positive on u > 0; tiny left-tail values below the double floor are
    reported as 0.0.  Scalar or ndarray u.
    """
    b = _check_beta(beta, strict_upper=True)
    u = np.asarray(u, float)
    scalar = u.ndim == 0
    u = np.atleast_1d(u)
    if np.any(~np.isfinite(u)) or np.any(u <= 0.0):
        raise DomainError("stable_subordinator_density requires u > 0")
    out = np.empty_like(u)
    lo = u < 1.0
    if lo.any():
        out[lo] = _g_small_u(b, u[lo])
    if (~lo).any():
        out[~lo] = _g_large_u(b, u[~lo])
    return float(out[0]) if scalar else out


def subordinator_small_u_law(beta, u):
    """Leading small-u law K (beta/u)^((1-beta/2)/(1-beta)) exp(-(1-beta)(u/beta)^(-beta/(1-beta))).

    The prefactor K = (2 pi beta (1-beta))^(-1/2) is the steepest-descent
    constant; it reproduces the beta=1/2 closed form exactly and is validated
    against the density's normalization in the tests.
    """
    b = _check_beta(beta, strict_upper=True)
    u = np.asarray(u, float)
    ob = 1.0 - b
    K = 1.0 / np.sqrt(2.0 * np.pi * b * ob)
    return K * (b / u) ** ((1.0 - b / 2.0) / ob) * np.exp(-ob * (u / b) ** (-b / ob))


def subordinator_tail_law(beta, u):
    """Leading large-u law beta/Gamma(1-beta) * u^(-beta-1)."""
    b = _check_beta(beta, strict_upper=True)
    u = np.asarray(u, float)
    return b / gamma(1.0 - b) * u ** (-b - 1.0)


def inverse_subordinator_density(beta, t, x):
    """Density f_{E_t}(x) of the inverse subordinator E_t = inf{r : D_r > t}.

    f_{E_t}(x) = (t/beta) x^(-1-1/beta) g_beta(t x^(-1/beta)) for x > 0 and
    0 for x <= 0 (the support convention), t > 0.  The Laplace identity
    int_0^inf e^(-mu x) f_{E_t}(x) dx = E_beta(-mu t^beta) ties this to the
    Mittag-Leffler function and is enforced as a test oracle.
    """
    b = _check_beta(beta, strict_upper=True)
    t = float(t)
    if not np.isfinite(t) or t <= 0.0:
        raise DomainError(f"inverse_subordinator_density requires t > 0, got {t}")
    x = np.asarray(x, float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    if np.any(~np.isfinite(x)):
        raise DomainError("inverse_subordinator_density requires finite x")
    out = np.zeros(x.shape)
    pos = x > 0.0
    if np.any(pos):
        xp = x[pos]
        g = stable_subordinator_density(b, t * xp ** (-1.0 / b))
        out[pos] = (t / b) * xp ** (-1.0 - 1.0 / b) * g
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# Caputo derivative and Riemann-Liouville integral of sampled data
# ---------------------------------------------------------------------------

def _cells_up_to(times, t):
    """Indices and clipped right edges of grid cells intersecting (0, t]."""
    if not (times[0] < t <= times[-1]):
        raise DomainError(
            f"evaluation time {t} outside sampled range ({times[0]}, {times[-1]}]"
        )
    last = int(np.searchsorted(times, t, side="left"))  # times[last-1] < t <= times[last]
    a = times[:last].copy()
    c = np.minimum(times[1:last + 1], t)
    return last, a, c


def caputo_derivative(g, beta, t):
    """Caputo derivative of order beta in (0,1) of sampled data at time(s) t.

    D^beta g(t) = 1/Gamma(1-beta) int_0^t g'(r) (t-r)^(-beta) dr with g the
    piecewise-linear interpolant of the samples; the product integral of the
    power kernel against each constant-slope cell is evaluated in closed
    form, so the quadrature is exact for the interpolant.
    """
    if not isinstance(g, SampledFunction):
        raise DomainError("caputo_derivative expects a SampledFunction")
    b = _check_beta(beta, strict_upper=True)
    ts = np.atleast_1d(np.asarray(t, float))
    scalar = np.ndim(t) == 0
    slopes = np.diff(g.values) / np.diff(g.times)
    out = np.empty_like(ts)
    for i, ti in enumerate(ts):
        last, a, c = _cells_up_to(g.times, float(ti))
        wa = (ti - a) ** (1.0 - b)
        wc = (ti - c) ** (1.0 - b)
        out[i] = np.dot(slopes[:last], wa - wc) / ((1.0 - b) * gamma(1.0 - b))
    return float(out[0]) if scalar else out


def fractional_integral(g, order, t):
    """Riemann-Liouville integral of order in (0, 1] of sampled data at time(s) t.

    I^gamma g(t) = 1/Gamma(gamma) int_0^t (t-tau)^(gamma-1) g(tau) dtau,
    evaluated exactly for the piecewise-linear interpolant cell by cell.
    """
    if not isinstance(g, SampledFunction):
        raise DomainError("fractional_integral expects a SampledFunction")
    gam = _check_beta(order)  # (0, 1]; order 1 reduces to the plain integral
    ts = np.atleast_1d(np.asarray(t, float))
    scalar = np.ndim(t) == 0
    slopes = np.diff(g.values) / np.diff(g.times)
    out = np.empty_like(ts)
    for i, ti in enumerate(ts):
        last, a, c = _cells_up_to(g.times, float(ti))
        sl = slopes[:last]
        ga = g.values[:last]
        wa = ti - a
        wc = ti - c
        # int_a^c (t-tau)^(g-1) [g_a + s (tau - a)] dtau with w = t - tau:
        #   [g_a + s (t-a)] (wa^g - wc^g)/g - s (wa^(g+1) - wc^(g+1))/(g+1)
        head = (ga + sl * wa) * (wa ** gam - wc ** gam) / gam
        tail = sl * (wa ** (gam + 1.0) - wc ** (gam + 1.0)) / (gam + 1.0)
        out[i] = (head - tail).sum() / gamma(gam)
    return float(out[0]) if scalar else out
