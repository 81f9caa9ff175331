"""Harmonic oscillator H = -d^2/dx^2 / 2 + x^2 / 2: eigenfunctions and seeds."""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import OscillatorOverflow
from .grid import default_grid, sign_changes
from .jets import ode_jet
from .specfun import hermite_fn

MAX_FOCK = 200
PI_QUARTER = math.pi ** -0.25


@dataclass(frozen=True)
class FockState:
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("Fock index must be non-negative")

    @property
    def energy(self):
        return self.n + 0.5


def psi_block(nmax, x):
    """Rows ψ_0 .. ψ_nmax at ``x`` from the normalised three-term recurrence."""
    if nmax > MAX_FOCK:
        raise OscillatorOverflow(f"psi_n is limited to n <= {MAX_FOCK}")
    x = np.asarray(x, dtype=float)
    out = np.empty((nmax + 1,) + x.shape)
    out[0] = PI_QUARTER * np.exp(-0.5 * x * x)
    if nmax >= 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    for k in range(1, nmax):
        out[k + 1] = math.sqrt(2.0 / (k + 1)) * x * out[k] - math.sqrt(k / (k + 1)) * out[k - 1]
    return out


def psi_n(n, x):
    """Normalised n-th oscillator eigenfunction."""
    return psi_block(n, x)[n]


def psi_n_deriv(n, x):
    """ψ_n and ψ_n' (via ψ_n' = sqrt(n/2) ψ_{n-1} - sqrt((n+1)/2) ψ_{n+1})."""
    block = psi_block(n + 1, x)
    d = -math.sqrt((n + 1) / 2.0) * block[n + 1]
    if n >= 1:
        d = d + math.sqrt(n / 2.0) * block[n - 1]
    return block[n], d


@lru_cache(maxsize=None)
def _phi_poly(m):
    """Integer coefficients (ascending) of (-i)^m H_m(ix)."""
    prev, cur = [1], [0, 2]
    if m == 0:
        return tuple(prev)
    for k in range(1, m):
        # P_{k+1} = 2x P_k + 2k P_{k-1}
        nxt = [0] + [2 * c for c in cur]
        for j, c in enumerate(prev):
            nxt[j] += 2 * k * c
        prev, cur = cur, nxt
    return tuple(cur)


def phi_m(m, x):
    """Non-normalisable solution e^{x^2/2} (-i)^m H_m(ix) at energy -(m + 1/2)."""
    x = np.asarray(x, dtype=float)
    return np.polynomial.polynomial.polyval(x, _phi_poly(m)) * np.exp(0.5 * x * x)


def phi_m_deriv(m, x):
    x = np.asarray(x, dtype=float)
    g = np.exp(0.5 * x * x)
    p = np.polynomial.polynomial.polyval(x, _phi_poly(m))
    dp = 2 * m * np.polynomial.polynomial.polyval(x, _phi_poly(m - 1)) if m else 0.0
    return p * g, (x * p + dp) * g


def ladder_a(direction, state):
    """Action of a^- / a^+ on a Fock state as (coefficient, new state).

    Lowering the ground state returns coefficient 0 (the null vector); the
    accompanying state is then meaningless and set to the ground state.
    """
    n = state.n
    if direction == "lower":
        if n == 0:
            return 0.0, FockState(0)
        return math.sqrt(n), FockState(n - 1)
    if direction == "raise":
        return math.sqrt(n + 1), FockState(n + 1)
    raise ValueError(f"unknown direction {direction!r}")


@dataclass(frozen=True)
class SeedSolution:
    """A real solution u of H u = (lam + 1/2) u.

    ``kind`` is ``"general"`` for e^{-x^2/2}[H_lam(x) + gamma H_lam(-x)],
    ``"fock"`` for ψ_n and ``"phi"`` for φ_m (lam = -m - 1).
    """

    kind: str
    lam: float
    gamma: float = 0.0

    @classmethod
    def general(cls, lam, gamma):
        return cls("general", float(lam), float(gamma))

    @classmethod
    def fock(cls, n):
        return cls("fock", float(n))

    @classmethod
    def phi(cls, m):
        return cls("phi", float(-m - 1))

    @property
    def energy(self):
        return self.lam + 0.5

    @property
    def index(self):
        """n for a Fock seed, m for a φ seed."""
        if self.kind == "fock":
            return int(self.lam)
        if self.kind == "phi":
            return int(-self.lam - 1)
        raise AttributeError("general seeds have no integer index")

    def value_and_slope(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "fock":
            return psi_n_deriv(self.index, x)
        if self.kind == "phi":
            return phi_m_deriv(self.index, x)
        lam, gam = self.lam, self.gamma
        gauss = np.exp(-0.5 * x * x)
        h = hermite_fn(lam, x)
        hm = hermite_fn(lam, -x)
        u = gauss * (h + gam * hm) if gam else gauss * h
        if lam == 0.0:
            dh = 0.0
        else:
            dh = 2.0 * lam * gauss * (hermite_fn(lam - 1.0, x) - gam * hermite_fn(lam - 1.0, -x))
        return u, -x * u + dh

    def jet(self, x, order):
        u, du = self.value_and_slope(x)
        return ode_jet(x, u, du, self.energy, order)

    def __call__(self, x):
        return self.value_and_slope(x)[0]


def seed_value(seed, x, deriv_order=0):
    """u, u' or u'' of a seed at ``x`` (analytic, no differencing)."""
    if deriv_order not in (0, 1, 2):
        raise ValueError("deriv_order must be 0, 1 or 2")
    return seed.jet(x, 2)[deriv_order]


def count_zeros(seed, x=None):
    """Real zeros of a seed detected as sign changes on a grid."""
    x = default_grid() if x is None else x
    return sign_changes(seed(x), rel_floor=0.0)


def hamiltonian_residual(jet, energy):
    """(H - E) f evaluated from a jet of order >= 2."""
    x = jet.x
    return -0.5 * jet[2] + (0.5 * x * x - energy) * jet[0]
