"""Special functions needed by the oscillator extensions.

Everything here is a pure function of its arguments.  Array arguments are
accepted wherever the natural argument is ``x`` (or ``y``); the order and
parameter arguments are scalars.

Gamma ratios are handled through the reciprocal gamma function, which is
entire, so pole cases turn into exact zeros instead of NaNs.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, special

from .errors import DomainError, NonConvergent, PoleAtB, QuadratureFailure

SERIES_TERM_CAP = 10_000
QUAD_SUBINTERVAL_CAP = 200
SERIES_TOL = 1e-17
# Relative error an asymptotic expansion must reach before it is preferred
# over the convergent series.
ACCEPT_TOL = 4 * np.finfo(float).eps
KUMMER_SWITCH = 30.0

SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class SeriesResult:
    """Value of a summed series together with its bookkeeping.

    ``value`` may be a scalar or an array (one entry per argument point);
    ``terms_used`` and ``truncation_estimate`` are then the worst case over
    the points.
    """

    value: object
    terms_used: int
    truncation_estimate: float

    def __float__(self):
        return float(self.value)


def recip_gamma(x):
    """1/Gamma(x); exactly zero at the non-positive integers."""
    return special.rgamma(x)


def _is_nonpos_int(v):
    return v <= 0 and float(v).is_integer()


def _series_1f1(a, b, x):
    """Maclaurin series of 1F1(a; b; x), vectorised over ``x``."""
    x = np.asarray(x, dtype=float)
    total = np.ones_like(x)
    term = np.ones_like(x)
    est = np.zeros_like(x)
    active = np.ones(x.shape, dtype=bool)
    n = 0
    # masked-out lanes may overflow harmlessly
    with np.errstate(all="ignore"):
        while n < SERIES_TERM_CAP:
            term = np.where(active, term * ((a + n) / (b + n)) * x / (n + 1), 0.0)
            total = total + term
            n += 1
            ratio = np.abs((a + n) / (b + n) * x / (n + 1))
            small = np.abs(term) <= SERIES_TOL * np.abs(total)
            done = active & (((ratio < 0.5) & small) | (term == 0.0))
            if np.any(done):
                est = np.where(done, np.abs(term) * ratio / np.maximum(1.0 - ratio, 0.5), est)
                active &= ~done
            if not active.any():
                return total, n, est
    raise NonConvergent(f"1F1({a}; {b}; x) series hit the {SERIES_TERM_CAP}-term cap")


def _asym_sum(p, q, inv_x):
    """Sum_n (p)_n (q)_n / n! * inv_x**n truncated at its smallest term.

    Returns the partial sum, the magnitude of the first omitted term and
    the number of terms summed (worst lane).
    """
    inv_x = np.asarray(inv_x, dtype=float)
    total = np.ones_like(inv_x)
    term = np.ones_like(inv_x)
    est = np.full(inv_x.shape, np.inf)
    active = np.ones(inv_x.shape, dtype=bool)
    n = 0
    with np.errstate(all="ignore"):
        for n in range(SERIES_TERM_CAP):
            nxt = term * (p + n) * (q + n) / (n + 1) * inv_x
            grows = np.abs(nxt) >= np.abs(term)
            stop = active & (grows | (np.abs(nxt) <= SERIES_TOL * np.abs(total)))
            est = np.where(stop, np.abs(nxt), est)
            active &= ~stop
            if not active.any():
                break
            term = np.where(active, nxt, term)
            total = total + np.where(active, nxt, 0.0)
    return total, est, n + 1


def _asym_1f1_pos(a, b, x):
    """Dominant asymptotic branch of 1F1(a; b; x) for large positive ``x``."""
    s, est, n = _asym_sum(b - a, 1.0 - a, 1.0 / x)
    pref = special.gamma(b) * recip_gamma(a) * np.exp(x) * x ** (a - b)
    # the dropped algebraic branch counts as error, so near-pole a falls back to the series
    dropped = np.abs(special.gamma(b) * recip_gamma(b - a)) * x ** (-a)
    return pref * s, np.abs(pref) * est + dropped, n


def _asym_1f1_neg(a, b, x):
    """Asymptotic 1F1(a; b; x) for large negative ``x`` (algebraic branch)."""
    ax = -x
    s, est, n = _asym_sum(a, 1.0 + a - b, 1.0 / ax)
    pref = special.gamma(b) * recip_gamma(b - a) * ax ** (-a)
    return pref * s, np.abs(pref) * est, n


def kummer_1f1(a, b, x, switch=KUMMER_SWITCH):
    """Confluent hypergeometric function 1F1(a; b; x).

    Positive arguments use the Maclaurin series.  Negative arguments go
    through Kummer's transformation ``1F1(a;b;x) = e^x 1F1(b-a;b;-x)`` so the
    summed series has no cancellation.  Beyond ``|x| > switch`` the
    asymptotic expansion is tried first and kept only if it reaches
    ``ACCEPT_TOL``.
    """
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    a = float(a)
    b = float(b)
    terminating = _is_nonpos_int(a)
    if _is_nonpos_int(b) and not (terminating and -a < -b):
        raise PoleAtB(f"1F1 parameter b={b} is a pole of the series")

    value = np.empty_like(x)
    est = np.zeros_like(x)
    terms = 0
    done = np.zeros(x.shape, dtype=bool)

    if not terminating:
        big = np.abs(x) > switch
        if big.any():
            xb = x[big]
            vb = np.empty_like(xb)
            eb = np.full(xb.shape, np.inf)
            pos = xb > 0
            if pos.any():
                vb[pos], eb[pos], na = _asym_1f1_pos(a, b, xb[pos])
                terms = max(terms, na)
            if (~pos).any() and not _is_nonpos_int(b - a):
                vb[~pos], eb[~pos], na = _asym_1f1_neg(a, b, xb[~pos])
                terms = max(terms, na)
            good = eb <= ACCEPT_TOL * np.abs(vb)
            idx = np.flatnonzero(big)[good]
            value[idx] = vb[good]
            est[idx] = eb[good]
            done[idx] = True

    rest = ~done
    if rest.any():
        xr = x[rest]
        neg = (xr < 0) & (not terminating)
        vr = np.empty_like(xr)
        er = np.empty_like(xr)
        if (~neg).any():
            vr[~neg], n1, er[~neg] = _series_1f1(a, b, xr[~neg])
            terms = max(terms, n1)
        if neg.any():
            s, n2, e2 = _series_1f1(b - a, b, -xr[neg])
            scale = np.exp(xr[neg])
            vr[neg] = scale * s
            er[neg] = scale * e2
            terms = max(terms, n2)
        value[rest] = vr
        est[rest] = er

    if np.any(est > 1e-8 * np.maximum(np.abs(value), 1e-300)):
        raise NonConvergent(f"1F1({a}; {b}; x) did not reach tolerance")
    if scalar:
        return SeriesResult(float(value[0]), terms, float(est[0]))
    return SeriesResult(value, terms, float(est.max(initial=0.0)))


_LAGUERRE_NODES = 100


@lru_cache(maxsize=64)
def _genlaguerre(alpha):
    return special.roots_genlaguerre(_LAGUERRE_NODES, alpha)


def _hermite_negative_order(mu, x):
    """H_mu(x) for mu < 0 and x > 0 from its Laplace-type integral.

    H_mu(x) = (2x)^mu / Gamma(-mu) int_0^inf s^(-mu-1) e^(-s) e^(-s^2/(4x^2)) ds;
    the integrand is positive, so there is no cancellation.
    """
    nodes, weights = _genlaguerre(-mu - 1.0)
    damp = np.exp(-np.outer(1.0 / (4.0 * x * x), nodes * nodes))
    return (2.0 * x) ** mu * recip_gamma(-mu) * (damp @ weights)


def _hermite_recessive(lam, x):
    """H_lam(x) for x > 0 (about 1 and up), non-integer lam, without cancellation."""
    if lam < -0.5:
        return _hermite_negative_order(lam, x)
    # upward recurrence H_{m+1} = 2x H_m - 2m H_{m-1} from two negative orders;
    # starting at mu in [-1.5, -0.5) keeps the Laguerre weight away from alpha = -1
    k = math.floor(lam + 0.5) + 1
    mu = lam - k
    prev = _hermite_negative_order(mu - 1.0, x)
    cur = _hermite_negative_order(mu, x)
    for _ in range(k):
        prev, cur = cur, 2.0 * x * cur - 2.0 * mu * prev
        mu += 1.0
    return cur


def hermite_fn(lam, x):
    """Hermite function H_lam(x) of real order ``lam``.

    Defined by the even/odd pair of 1F1 terms with reciprocal-gamma
    prefactors, which reduces to the physicists' Hermite polynomial for
    integer ``lam >= 0``.  For x >= 1 the two terms cancel towards a small
    (recessive) result, so there the value comes from the equivalent
    Laplace integral instead; the 1F1 pair is used everywhere else.
    """
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    lam = float(lam)
    z = x * x
    pref = 2.0**lam * SQRT_PI
    c_even = pref * recip_gamma((1.0 - lam) / 2.0)
    c_odd = -2.0 * pref * recip_gamma(-lam / 2.0)
    polynomial = c_even == 0.0 or c_odd == 0.0
    rec = (x >= 1.0) & (not polynomial)
    out = np.empty_like(x)
    if rec.any():
        out[rec] = _hermite_recessive(lam, x[rec])
    rest = ~rec
    if rest.any():
        xr = x[rest]
        even = c_even * kummer_1f1(-lam / 2.0, 0.5, z[rest]).value if c_even != 0.0 else 0.0
        odd = c_odd * xr * kummer_1f1((1.0 - lam) / 2.0, 1.5, z[rest]).value if c_odd != 0.0 else 0.0
        out[rest] = even + odd
    return float(out[0]) if scalar else out


def hyp_1f4(b1, b2, b3, b4, w, numer=1.0):
    """1F4(numer; b1, b2, b3, b4; w); with numer = 1 this is sum_n w^n / prod_i (b_i)_n.

    ``w`` may be complex (scalar only).  The series is entire in ``w``.
    """
    bs = (float(b1), float(b2), float(b3), float(b4))
    for bi in bs:
        if _is_nonpos_int(bi):
            raise PoleAtB(f"1F4 parameter {bi} is a non-positive integer")
    a = float(numer)
    total = 1.0 + 0j if isinstance(w, complex) else 1.0
    term = total
    for n in range(SERIES_TERM_CAP):
        denom = (bs[0] + n) * (bs[1] + n) * (bs[2] + n) * (bs[3] + n)
        term = term * w * (a + n) / ((n + 1) * denom)
        total = total + term
        nxt = abs(w * (a + n + 1)) / abs((n + 2) * (bs[0] + n + 1) * (bs[1] + n + 1)
                                         * (bs[2] + n + 1) * (bs[3] + n + 1))
        if term == 0 or (nxt < 0.5 and abs(term) <= SERIES_TOL * abs(total)):
            est = abs(term) * nxt / (1.0 - nxt)
            return SeriesResult(total, n + 1, est)
    raise NonConvergent(f"1F4 series hit the {SERIES_TERM_CAP}-term cap (w={w})")


def bessel_k(tau, zarg):
    """Modified Bessel function of the third kind K_tau(zarg), zarg > 0.

    Half-integer orders 1/2 and 3/2 use their elementary closed forms;
    other orders go to ``scipy.special.kv``.
    """
    z = np.asarray(zarg, dtype=float)
    if np.any(z <= 0):
        raise DomainError("bessel_k needs a positive argument")
    t = abs(float(tau))
    if t == 0.5:
        out = np.sqrt(np.pi / (2.0 * z)) * np.exp(-z)
    elif t == 1.5:
        out = np.sqrt(np.pi / (2.0 * z)) * np.exp(-z) * (1.0 + 1.0 / z)
    else:
        out = special.kv(t, z)
    return float(out) if out.ndim == 0 else out


def _log_g2002(a, b, y):
    y = np.asarray(y, dtype=float)
    arg = 2.0 * np.sqrt(y)
    return math.log(2.0) + 0.5 * (a + b) * np.log(y) + np.log(special.kve(abs(a - b), arg)) - arg


def meijer_g2002(a, b, y):
    """G^{2,0}_{0,2}(y | a, b) = 2 y^{(a+b)/2} K_{a-b}(2 sqrt(y))."""
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0):
        raise DomainError("meijer_g2002 needs y > 0")
    out = 2.0 * y ** (0.5 * (a + b)) * bessel_k(a - b, 2.0 * np.sqrt(y))
    return float(out) if np.ndim(out) == 0 else out


def quad(func, lo, hi, rtol=1e-10, points=None):
    """Adaptive Gauss-Kronrod quadrature with a hard failure on miss.

    Thin wrapper over QUADPACK: raises QuadratureFailure instead of
    returning a result whose error estimate misses ``rtol``.
    """
    kw = {"limit": QUAD_SUBINTERVAL_CAP, "epsabs": 0.0, "epsrel": rtol, "full_output": 1}
    if points is not None and np.isfinite(lo) and np.isfinite(hi):
        kw["points"] = points
    res = integrate.quad(func, lo, hi, **kw)
    val, err = res[0], res[1]
    if not np.isfinite(val) or err > max(rtol * abs(val), 1e-300):
        raise QuadratureFailure(f"quadrature on [{lo}, {hi}] missed rtol={rtol}: value={val}, err={err}")
    return val


def _g4004_scalar(b1, b2, b3, b4, y, rtol):
    # t = exp(v); integrand g(y/t) h(t) decays double-exponentially both ways.
    def logf(v):
        return _log_g2002(b1, b2, y * np.exp(-v)) + _log_g2002(b3, b4, np.exp(v))

    v = np.linspace(-80.0, 80.0, 3201)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        lf = logf(v)
    lf = np.where(np.isfinite(lf), lf, -np.inf)
    k = int(np.argmax(lf))
    peak = lf[k]
    keep = np.flatnonzero(lf > peak - 80.0)
    lo, hi = v[max(keep[0] - 1, 0)], v[min(keep[-1] + 1, v.size - 1)]

    def integrand(s):
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            val = np.exp(logf(s) - peak)
        return float(val) if np.isfinite(val) else 0.0

    return math.exp(peak) * quad(integrand, lo, hi, rtol=rtol, points=[v[k]])


def meijer_g4004(b1, b2, b3, b4, y, rtol=1e-6):
    """G^{4,0}_{0,4}(y | b1, b2, b3, b4) via the Mellin convolution.

    f(y) = int_0^inf g(y/t) h(t) dt/t with g = G^{2,0}_{0,2}(.|b1,b2) and
    h = G^{2,0}_{0,2}(.|b3,b4).  Both factors are non-negative, so the
    result is too.
    """
    ys = np.atleast_1d(np.asarray(y, dtype=float))
    if np.any(ys <= 0):
        raise DomainError("meijer_g4004 needs y > 0")
    out = np.array([_g4004_scalar(b1, b2, b3, b4, yi, rtol) for yi in ys])
    return float(out[0]) if np.ndim(y) == 0 else out
