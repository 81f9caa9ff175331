"""Second-order supersymmetric (Darboux) transformations of the oscillator.

A transformation is fixed by two seeds u1, u2 with factorization energies
eps1, eps2.  With W = W(u1, u2) = u1 u2' - u1' u2:

    g = W'/W,   h = g'/2 + g^2/2 - 2V + eps1 + eps2,   V~ = V - (ln W)''
    B+ = [d^2 - g d + h] / 2,   B = [d^2 + g d + g' + h] / 2

Every operator acts on :class:`~susyosc.jets.Jet` objects, so derivatives
are exact to rounding.  Differentiating W once and eliminating u'' with
the seeds' equations gives W' = 2 (eps1 - eps2) u1 u2.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DeletedLevel, ZeroWronskian
from .grid import GridFunction, default_grid, integrate, uniform_grid
from .jets import Jet
from .oscillator import SeedSolution

ZERO_WRONSKIAN_RTOL = 1e-12
# windows for the normalisability test of missing states
INNER_WINDOW = 10.0
OUTER_WINDOW = 14.0
NORMALIZABLE_RTOL = 1e-6
_CACHE_ORDER = 12


def _grid_key(x):
    x = np.ascontiguousarray(x, dtype=float)
    return (x.shape, hash(x.tobytes()))


@dataclass(frozen=True, eq=False)
class SusyTransform:
    seed1: SeedSolution
    seed2: SeedSolution
    label: str = ""
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def eps1(self):
        return self.seed1.energy

    @property
    def eps2(self):
        return self.seed2.energy

    def _seed_jets(self, x, order):
        return self.seed1.jet(x, order), self.seed2.jet(x, order)

    def coefficients(self, x, order):
        """Jets (W, g, h, V~) on ``x``, each of order >= ``order``."""
        key = _grid_key(x)
        hit = self._cache.get(key)
        if hit is None or hit[0] < order:
            k = max(order, _CACHE_ORDER)
            if len(self._cache) > 8:
                self._cache.clear()
            u1, u2 = self._seed_jets(x, k + 3)
            w = u1 * u2.deriv() - u1.deriv() * u2
            scale = np.abs(u1[0] * u2[1]) + np.abs(u1[1] * u2[0])
            if np.any(np.abs(w[0]) < ZERO_WRONSKIAN_RTOL * scale) or not np.all(np.isfinite(w[0])):
                raise ZeroWronskian(f"{self.label or 'transform'}: Wronskian vanishes on the grid")
            g = w.deriv() / w
            v0 = Jet.quadratic(x, 0.5, 0.0, k + 1)
            # full eps1 + eps2 so that B+ u1 = B+ u2 = 0
            h = 0.5 * g.deriv() + 0.5 * g * g - 2.0 * v0 + (self.eps1 + self.eps2)
            v = v0 - g.deriv()
            hit = (k, w, g.truncate(k), h.truncate(k), v.truncate(k))
            self._cache[key] = hit
        return hit[1:]

    def potential(self, x):
        x = np.asarray(x, dtype=float)
        return self.coefficients(x, 0)[3][0]

    def b_plus(self, f):
        """B+ f for a jet ``f``; the result has order ``f.order - 2``."""
        _, g, h, _ = self.coefficients(f.x, f.order)
        return 0.5 * (f.deriv(2) - g * f.deriv() + h * f)

    def b(self, f):
        """B f for a jet ``f``; the result has order ``f.order - 2``."""
        _, g, h, _ = self.coefficients(f.x, f.order)
        return 0.5 * (f.deriv(2) + g * f.deriv() + (g.deriv() + h) * f)

    def hamiltonian(self, f):
        """H~ f = -f''/2 + V~ f as a jet of order ``f.order - 2``."""
        v = self.coefficients(f.x, f.order)[3]
        return -0.5 * f.deriv(2) + v * f

    def b_plus_wronskian(self, f):
        """B+ f through W(u1, u2, f) / (2 W(u1, u2)), values only."""
        x = f.x
        u1, u2 = self._seed_jets(x, 2)
        w = self.coefficients(x, 0)[0][0]
        m = np.stack([np.stack([u1[k], u2[k], f[k]]) for k in range(3)])
        w3 = np.linalg.det(np.moveaxis(m, -1, 0))
        return 0.5 * w3 / w


def _check_h1_params(eps, gamma):
    if not (-1.5 < eps < 0.5):
        raise ConfigError(f"eps must lie in (-3/2, 1/2), got {eps}")
    if not gamma > 0:
        raise ConfigError(f"gamma must be positive, got {gamma}")
    if float(eps - 0.5).is_integer():
        raise ConfigError("eps = -1/2 gives an integer Hermite order; the H2 seed degenerates")


def h1_transform(eps, gamma):
    """Transformation adding levels at eps and -3/2 below the oscillator."""
    _check_h1_params(eps, gamma)
    lam1 = eps - 0.5
    return SusyTransform(SeedSolution.general(lam1, gamma), SeedSolution.phi(1), "H1")


def h2_transform(eps, gamma):
    """Transformation moving the first excited level from 3/2 to eps + 2."""
    _check_h1_params(eps, gamma)
    lam2 = eps - 0.5 + 2.0
    return SusyTransform(SeedSolution.fock(1), SeedSolution.general(lam2, gamma), "H2")


def wronskian2(t, x):
    """(W, W', W'') at ``x``; W' and W'' come from W' = 2(eps1 - eps2) u1 u2."""
    x = np.asarray(x, dtype=float)
    u1, u2 = t._seed_jets(x, 2)
    w = u1[0] * u2[1] - u1[1] * u2[0]
    scale = np.abs(u1[0] * u2[1]) + np.abs(u1[1] * u2[0])
    if np.any(np.abs(w) < ZERO_WRONSKIAN_RTOL * scale):
        raise ZeroWronskian("Wronskian vanishes")
    c = 2.0 * (t.eps1 - t.eps2)
    return w, c * u1[0] * u2[0], c * (u1[1] * u2[0] + u1[0] * u2[1])


def partner_potential(t, x):
    return t.potential(x)


def _as_jet(f, x, order):
    if isinstance(f, Jet):
        return f
    return f.jet(np.asarray(x, dtype=float), order)


def apply_b_plus(t, f, x=None):
    """B+ f.  ``f`` is a Jet (returns a Jet) or a state with ``.jet`` (returns values)."""
    if isinstance(f, Jet):
        return t.b_plus(f)
    return t.b_plus(_as_jet(f, x, 2))[0]


def apply_b(t, f, x=None):
    if isinstance(f, Jet):
        return t.b(f)
    return t.b(_as_jet(f, x, 2))[0]


class State:
    """Something with an energy and analytic derivative stacks."""

    energy = math.nan
    label = ""

    def jet(self, x, order):
        raise NotImplementedError

    def __call__(self, x):
        return self.jet(np.asarray(x, dtype=float), 0)[0]

    def on_grid(self, x=None):
        x = default_grid() if x is None else np.asarray(x, dtype=float)
        j = self.jet(x, 1)
        return GridFunction(x, j[0], j[1], self.label, {"energy": self.energy})


class TransformedState(State):
    """B+ ψ_n / sqrt((E_n - eps1)(E_n - eps2)), optionally with a sign flip."""

    def __init__(self, t, n, sign=1.0):
        energy = n + 0.5
        if t.seed1.kind == "fock" and t.seed1.index == n or t.seed2.kind == "fock" and t.seed2.index == n:
            raise DeletedLevel(f"{t.label}: level n={n} is annihilated by B+")
        norm2 = (energy - t.eps1) * (energy - t.eps2)
        if norm2 <= 0:
            raise DeletedLevel(f"{t.label}: level n={n} has (E-eps1)(E-eps2) <= 0")
        self.t = t
        self.n = n
        self.sign = sign
        self.energy = energy
        self.scale = sign / math.sqrt(norm2)
        self.label = f"{t.label}:psi~_{n}"

    def with_sign(self, sign):
        return TransformedState(self.t, self.n, sign)

    def jet(self, x, order):
        f = SeedSolution.fock(self.n).jet(x, order + 2)
        return self.t.b_plus(f) * self.scale


class MissingState(State):
    """Missing state at eps_j: u_other / W, normalised when square integrable."""

    def __init__(self, t, which):
        if which not in (1, 2):
            raise ValueError("which must be 1 or 2")
        self.t = t
        self.which = which
        self.energy = t.eps1 if which == 1 else t.eps2
        self.numerator = t.seed2 if which == 1 else t.seed1
        self.label = f"{t.label}:missing@{self.energy:g}"
        self.normalizable, self.scale = self._calibrate()

    def _raw(self, x, order):
        w = self.t.coefficients(x, order)[0]
        return self.numerator.jet(x, order) / w

    def _calibrate(self):
        xi = uniform_grid(-INNER_WINDOW, INNER_WINDOW, 8001)
        xo = uniform_grid(-OUTER_WINDOW, OUTER_WINDOW, 11201)
        vi = self._raw(xi, 0)[0]
        vo = self._raw(xo, 0)[0]
        ni = integrate(vi * vi, xi)
        no = integrate(vo * vo, xo)
        normalizable = bool(abs(no - ni) <= NORMALIZABLE_RTOL * ni)
        k = int(np.argmax(np.abs(vi)))
        sign = 1.0 if vi[k] > 0 else -1.0
        size = math.sqrt(no) if normalizable else float(np.abs(vi).max())
        return normalizable, sign / size

    def jet(self, x, order):
        return self._raw(x, order) * self.scale


class SeedState(State):
    """A seed viewed as a (formal) eigenfunction; used for kernel bookkeeping."""

    def __init__(self, seed, label=""):
        self.seed = seed
        self.energy = seed.energy
        self.label = label

    def jet(self, x, order):
        return self.seed.jet(x, order)


class ImageState(State):
    """B+ applied to another state (no normalisation)."""

    def __init__(self, t, inner, label=""):
        self.t = t
        self.inner = inner
        self.energy = inner.energy
        self.label = label

    def jet(self, x, order):
        return self.t.b_plus(self.inner.jet(x, order + 2))


def transformed_eigenstate(t, n, x=None):
    """Normalised B+ ψ_n on a grid (raises DeletedLevel for removed levels)."""
    return TransformedState(t, n).on_grid(x)


def missing_states(t, x=None):
    """[(energy, GridFunction, normalizable)] for eps1 then eps2."""
    out = []
    for which in (1, 2):
        s = MissingState(t, which)
        out.append((s.energy, s.on_grid(x), s.normalizable))
    return out


@dataclass
class ExtendedHamiltonian:
    """The partner Hamiltonian of a transformation with its bound-state list."""

    transform: SusyTransform

    def spectrum(self, levels=10):
        """First ``levels`` (label, energy) pairs in increasing energy."""
        t = self.transform
        out = []
        for which in (1, 2):
            ms = MissingState(t, which)
            if ms.normalizable:
                out.append((f"eps{which}", ms.energy))
        n = 0
        while len(out) < levels + 2:
            try:
                TransformedState(t, n)
                out.append((f"n={n}", n + 0.5))
            except DeletedLevel:
                pass
            n += 1
        out.sort(key=lambda p: p[1])
        return out[:levels]

    def potential(self, x):
        return self.transform.potential(x)

    def eigenstates(self):
        """Bound states as State objects, ordered by energy (first 8)."""
        t = self.transform
        states = [MissingState(t, w) for w in (1, 2)]
        states = [s for s in states if s.normalizable]
        n = 0
        while len(states) < 8:
            try:
                states.append(TransformedState(t, n))
            except DeletedLevel:
                pass
            n += 1
        return sorted(states, key=lambda s: s.energy)


def schrodinger_residual(t, state, x=None):
    """||(H~ - E) psi|| / ||psi|| on a grid."""
    x = default_grid() if x is None else np.asarray(x, dtype=float)
    j = state.jet(x, 2)
    r = t.hamiltonian(j)[0] - state.energy * j[0]
    return math.sqrt(integrate(r * r, x) / integrate(j[0] * j[0], x))


@dataclass
class EquivalenceReport:
    eps1: float
    gamma: float
    x: np.ndarray
    v1: np.ndarray
    v2: np.ndarray
    sup_deviation: float
    omega: np.ndarray
    omega_deviation: float
    phi_relation_residual: float
    annihilation_relation_residual: float

    def omega_samples(self, count=11):
        idx = np.linspace(0, self.x.size - 1, count).astype(int)
        return [(float(self.x[i]), float(self.omega[i])) for i in idx]


def equivalence_report(eps1, gamma, x=None):
    """Numerical check that V2 = V1 + 2 for the two transformations.

    Besides the potentials this samples Omega = d/dx ln(W1/W2), which must
    equal 2x, and the two seed relations
    u2^(1) = sqrt(2 sqrt(pi)) e^{x^2} u1^(2) and
    a^- a^- u2^(2) = 2 lam2 (lam2 - 1) u1^(1) (the latter on [-5, 5]).
    """
    x = uniform_grid(-6.0, 6.0, 1201) if x is None else np.asarray(x, dtype=float)
    t1 = h1_transform(eps1, gamma)
    t2 = h2_transform(eps1, gamma)
    v1 = t1.potential(x)
    v2 = t2.potential(x)
    dev = float(np.max(np.abs(v2 - v1 - 2.0)))
    g1 = t1.coefficients(x, 0)[1][0]
    g2 = t2.coefficients(x, 0)[1][0]
    omega = g1 - g2
    odev = float(np.max(np.abs(omega - 2.0 * x)))

    phi1 = t1.seed2(x)
    scaled = math.sqrt(2.0 * math.sqrt(math.pi)) * np.exp(x * x) * t2.seed1(x)
    phi_res = float(np.max(np.abs(phi1 - scaled) / np.maximum(np.abs(phi1) + np.abs(scaled), 1e-300)))

    xs = x[np.abs(x) <= 5.0]
    lam2 = t2.seed2.lam
    u = t2.seed2.jet(xs, 2)
    aa = 0.5 * (u[2] + 2.0 * xs * u[1] + (1.0 + xs * xs) * u[0])
    target = 2.0 * lam2 * (lam2 - 1.0) * t1.seed1(xs)
    scale = np.abs(0.5 * u[2]) + np.abs(xs * u[1]) + np.abs(0.5 * (1.0 + xs * xs) * u[0])
    aa_res = float(np.max(np.abs(aa - target) / scale))
    return EquivalenceReport(eps1, gamma, x, v1, v2, dev, omega, odev, phi_res, aa_res)
