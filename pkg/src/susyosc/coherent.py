"""Barut-Girardello coherent states L-|z> = z|z> on the ladders nu = -2, 1.

In the basis |nu + 2n> the expansion is

    c_n = c0 (z/4)^n / sqrt((a)_n (b)_n (c)_n (d)_n),
    c0  = 1F4(1; a, b, c, d; |z|^2/16)^(-1/2),

with a = (2nu - 2eps + 5)/4, b = (2nu - 2eps + 1)/4, c = (nu + 4)/2 and
d = (nu + 1)/2.  Those bases satisfy N4(E_n) = 16 (a+n-1)(b+n-1)(c+n-1)(d+n-1),
which is what makes L- act as multiplication by z.
"""

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import special

from .errors import DomainError, ParameterPole, PoleAtB, SubspaceMismatch
from .grid import default_grid, integrate
from .ladder import LADDER_LABELS, LadderPair
from .specfun import hyp_1f4, meijer_g4004, quad

TAIL_TOL = 1e-16
FIGURE_NMAX = 12
THETA_POINTS = 128
RADIAL_NODES = 240


def pochhammer_bases(nu, eps):
    """(a, b, c, d) of the coefficient formula."""
    return ((2 * nu - 2 * eps + 5) / 4.0, (2 * nu - 2 * eps + 1) / 4.0,
            (nu + 4) / 2.0, (nu + 1) / 2.0)


def _check(nu, eps):
    if nu not in LADDER_LABELS:
        raise ValueError(f"nu must be one of {LADDER_LABELS}")
    if not -1.5 < eps < 0.5:
        raise ValueError(f"eps must lie in (-3/2, 1/2), got {eps}")
    for p in pochhammer_bases(nu, eps):
        if p <= 0 and float(p).is_integer():
            raise ParameterPole(f"Pochhammer base {p} is a non-positive integer")


def _log_weights(nu, eps, r, nmax):
    """log of (r/4)^n / sqrt(prod (a)_n) for n = 0..nmax (no c0)."""
    a, b, c, d = pochhammer_bases(nu, eps)
    n = np.arange(1, nmax + 1)
    prod = (a + n - 1) * (b + n - 1) * (c + n - 1) * (d + n - 1)
    if np.any(prod <= 0):
        raise ParameterPole("non-positive Pochhammer product")
    with np.errstate(divide="ignore"):
        step = math.log(r) - math.log(4.0) - 0.5 * np.log(prod) if r > 0 else np.full(nmax, -np.inf)
    return np.concatenate([[0.0], np.cumsum(step)])


def adaptive_nmax(nu, eps, r, tol=TAIL_TOL):
    """Smallest nmax past the peak with |c_nmax|^2 below ``tol`` relative to the peak."""
    if r == 0:
        return 1
    nmax = 16
    while True:
        lw = 2.0 * _log_weights(nu, eps, r, nmax)
        k = int(np.argmax(lw))
        below = np.flatnonzero((lw - lw[k] < math.log(tol)) & (np.arange(nmax + 1) > k))
        if below.size:
            return max(int(below[0]), 1)
        nmax *= 2


def normalization_c0(nu, eps, r):
    """c0 = 1F4(1; a, b, c, d; r^2/16)^(-1/2)."""
    _check(nu, eps)
    return hyp_1f4(*pochhammer_bases(nu, eps), abs(r) ** 2 / 16.0).value ** -0.5


def coefficients(nu, eps, z, nmax=None):
    """Expansion coefficients c_0..c_nmax (adaptive nmax when None)."""
    _check(nu, eps)
    z = complex(z)
    r = abs(z)
    if nmax is None:
        nmax = adaptive_nmax(nu, eps, r)
    if nmax < 1:
        raise ValueError("nmax must be >= 1")
    c0 = normalization_c0(nu, eps, r)
    mag = np.exp(_log_weights(nu, eps, r, nmax))
    # numpy angle: cmath.phase overflows on subnormal parts
    phase = np.exp(1j * float(np.angle(z)) * np.arange(nmax + 1)) if r > 0 else np.ones(nmax + 1)
    out = c0 * mag * phase
    if r == 0:
        out[1:] = 0.0
    return out


@lru_cache(maxsize=16)
def ladder_pair(eps, gamma):
    return LadderPair(float(eps), float(gamma))


@dataclass(frozen=True)
class CoherentState:
    nu: int
    z: complex
    eps: float = 0.0
    gamma: float = 2.0
    nmax: int = None
    coeffs: np.ndarray = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "z", complex(self.z))
        c = coefficients(self.nu, self.eps, self.z, self.nmax)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "nmax", c.size - 1)

    @property
    def pocha(self):
        return pochhammer_bases(self.nu, self.eps)

    @property
    def c0(self):
        return normalization_c0(self.nu, self.eps, abs(self.z))

    @property
    def energies(self):
        return self.nu + 2.0 * np.arange(self.nmax + 1) + 0.5

    def norm2(self):
        return float(np.sum(np.abs(self.coeffs) ** 2))

    def with_label(self, z):
        return CoherentState(self.nu, z, self.eps, self.gamma, None)


def n4(eps, energy):
    e = np.asarray(energy, dtype=float)
    return (e - eps) * (e + 1.5) * (e - 1.5) * (e - eps - 2.0)


def lower_spectral(state):
    """Coefficients of L-|z> (one rung shorter) via sqrt(N4)."""
    c = state.coeffs
    return np.sqrt(n4(state.eps, state.energies[1:])) * c[1:]


def eigen_residual(state):
    """||L-|z> - z|z>|| with the truncated top rung excluded."""
    diff = lower_spectral(state) - state.z * state.coeffs[:-1]
    return float(np.linalg.norm(diff))


def overlap(s1, s2, orthogonal_zero=False):
    """<s1|s2> = c0(z1) c0(z2) 1F4(1; a, b, c, d; conj(z1) z2 / 16)."""
    if s1.nu != s2.nu or s1.eps != s2.eps or s1.gamma != s2.gamma:
        if orthogonal_zero and s1.eps == s2.eps and s1.gamma == s2.gamma:
            return 0j
        raise SubspaceMismatch("coherent states live in different subspaces")
    w = complex(s1.z.conjugate() * s2.z / 16.0)
    return s1.c0 * s2.c0 * complex(hyp_1f4(*s1.pocha, w).value)


@dataclass
class MeanEnergy:
    """Direct sum next to the closed form (printed parameters and corrected ones)."""

    direct: float
    closed_form_printed: float
    closed_form_corrected: float

    def __float__(self):
        return self.direct


def _closed_form(nu, eps, r, numer_params, denom_params):
    w = r * r / 16.0
    pre = 8.0 * r * r / ((2 * nu - 2 * eps + 5) * (2 * nu - 2 * eps + 1) * (nu + 1) * (nu + 4))
    try:
        num = hyp_1f4(*numer_params, w, numer=2.0).value
        den = hyp_1f4(*denom_params, w).value
    except PoleAtB:
        return math.nan
    return nu + 0.5 + pre * num / den


def mean_energy(state):
    """<z|H~|z>; ``.direct`` is the primary value."""
    nu, eps, r = state.nu, state.eps, abs(state.z)
    direct = float(np.sum(np.abs(state.coeffs) ** 2 * state.energies) / state.norm2())
    a, b, c, d = state.pocha
    printed = _closed_form(nu, eps, r,
                           ((2 * nu - 2 * eps + 8) / 4.0, (2 * nu - 2 * eps + 5) / 4.0, (nu + 6) / 2.0, (nu + 3) / 2.0),
                           (a, b, (nu + 5) / 2.0, d))
    corrected = _closed_form(nu, eps, r, (a + 1, b + 1, c + 1, d + 1), (a, b, c, d))
    return MeanEnergy(direct, printed, corrected)


def evolve(state, t):
    """(global phase, evolved state): e^{-iHt}|z> = e^{-i(nu+1/2)t} |z e^{-2it}>."""
    phase = cmath.exp(-1j * (state.nu + 0.5) * t)
    return phase, CoherentState(state.nu, state.z * cmath.exp(-2j * t), state.eps, state.gamma, state.nmax)


def basis_block(state, x, nmax=None):
    """Rows |nu + 2n>(x) for n = 0..nmax."""
    nmax = state.nmax if nmax is None else nmax
    pair = ladder_pair(state.eps, state.gamma)
    x = np.asarray(x, dtype=float)
    return np.array([pair.basis_function(state.nu, n)(x) for n in range(nmax + 1)])


def wavefunction(state, x=None, t=0.0, nmax=FIGURE_NMAX, block=None):
    """sum_n c_n e^{-2int} <x|nu+2n> (global phase dropped)."""
    x = default_grid() if x is None else np.asarray(x, dtype=float)
    c = coefficients(state.nu, state.eps, state.z, nmax)
    if block is None:
        block = basis_block(state, x, nmax)
    c = c * np.exp(-2j * t * np.arange(nmax + 1))
    return c @ block


def density(state, x=None, t=0.0, nmax=FIGURE_NMAX, block=None):
    """|psi(x, t)|^2 truncated at ``nmax`` rungs (12 reproduces the figures)."""
    return np.abs(wavefunction(state, x, t, nmax, block)) ** 2


# completeness measure

@dataclass(frozen=True)
class MeasureSpec:
    nu: int
    eps: float

    @property
    def meijer_params(self):
        nu, eps = self.nu, self.eps
        return ((2 * nu - 2 * eps + 1) / 4.0, (2 * nu - 2 * eps - 3) / 4.0, (nu + 2) / 2.0, (nu - 1) / 2.0)

    def f(self, y, rtol=1e-9):
        """Weight f(y) = G^{4,0}_{0,4}(y/16 | b1..b4)."""
        return meijer_g4004(*self.meijer_params, np.asarray(y, dtype=float) / 16.0, rtol=rtol)

    def gamma_product(self, s):
        return float(np.prod(special.gamma(np.array(self.meijer_params) + s)))


def _moment(spec, s, rtol):
    """int_0^inf x^{s-1} G(x) dx on v = ln x (x = y/16)."""
    b = spec.meijer_params
    lead = s + min(b)
    if lead <= 0:
        raise DomainError(f"moment s={s} diverges at the origin (s + min b = {lead})")
    # x^s G(x) ~ e^{lead v} for v -> -inf and ~ exp(-4 e^{v/4}) for v -> +inf
    lo, hi = -45.0 / lead, 16.0

    def integrand(v):
        x = math.exp(v)
        return x ** s * float(meijer_g4004(*b, x, rtol=rtol))

    peak = max(lo + 1.0, min(hi - 1.0, 4.0 * math.log(max(s + max(b), 1.0))))
    return quad(integrand, lo, hi, rtol=1e3 * rtol, points=[peak])


def measure_moments(spec, s_max=5, rtol=1e-10):
    """[(s, quadrature, gamma product, relative error)] for s = 1..s_max."""
    if s_max > 6:
        raise ValueError("s_max must be <= 6")
    rows = []
    for s in range(1, s_max + 1):
        val = _moment(spec, s, rtol)
        ref = spec.gamma_product(s)
        rows.append((s, val, ref, abs(val - ref) / abs(ref)))
    return rows


def measure_density(nu, eps, r):
    """mu(z) at |z| = r."""
    a = pochhammer_bases(nu, eps)
    c0 = normalization_c0(nu, eps, r)
    spec = MeasureSpec(nu, eps)
    return float(spec.f(r * r)) / (16.0 * math.pi * c0 ** 2 * float(np.prod(special.gamma(np.array(a)))))


def resolution_of_identity(nu, eps, mmax=2, radius=None, theta_points=THETA_POINTS, radial_nodes=RADIAL_NODES):
    """Matrix int mu(z) <m|z><z|m'> d^2z for m, m' <= mmax (polar quadrature).

    Radial part: Gauss-Legendre in u with r = u^2, which removes the
    r^(2 min b + 1) behaviour at the origin; angular part: trapezoid.
    """
    _check(nu, eps)
    spec = MeasureSpec(nu, eps)
    if min(spec.meijer_params) + 1 <= 0:
        raise DomainError("the m = 0 moment of the measure diverges for these parameters")
    if radius is None:
        radius = _measure_radius(nu, eps, mmax)
    nodes, weights = np.polynomial.legendre.leggauss(radial_nodes)
    umax = math.sqrt(radius)
    u = 0.5 * umax * (nodes + 1.0)
    wu = 0.5 * umax * weights
    r = u * u
    theta = 2.0 * math.pi * np.arange(theta_points) / theta_points
    dtheta = 2.0 * math.pi / theta_points
    mu = np.array([measure_density(nu, eps, ri) for ri in r])
    out = np.zeros((mmax + 1, mmax + 1), dtype=complex)
    for i, ri in enumerate(r):
        z = ri * np.exp(1j * theta)
        cs = np.array([coefficients(nu, eps, zz, mmax) for zz in z])
        block = cs.T @ cs.conj() * dtheta
        # d^2z = r dr dtheta, dr = 2u du
        out += block * mu[i] * ri * 2.0 * u[i] * wu[i]
    return out


def _measure_radius(nu, eps, mmax, tol=1e-12):
    """Radius beyond which the radial integrand of the top moment is < tol of its peak."""
    spec = MeasureSpec(nu, eps)
    r = np.geomspace(0.5, 4000.0, 80)
    vals = np.array([float(spec.f(ri * ri, rtol=1e-6)) * ri ** (2 * mmax + 1) for ri in r])
    k = int(np.argmax(vals))
    tail = np.flatnonzero((vals < tol * vals[k]) & (np.arange(r.size) > k))
    return float(r[tail[0]]) if tail.size else float(r[-1])


__all__ = [
    "CoherentState", "MeasureSpec", "MeanEnergy", "pochhammer_bases", "adaptive_nmax",
    "normalization_c0", "coefficients", "overlap", "mean_energy", "evolve", "density",
    "wavefunction", "basis_block", "lower_spectral", "eigen_residual", "measure_moments",
    "measure_density", "resolution_of_identity", "ladder_pair", "n4",
]
