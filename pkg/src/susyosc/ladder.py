"""Fourth-order ladder operators L+ = B1+ B2 and L- = B2+ B1.

The partner Hamiltonian H~ of the first transformation equals that of the
second minus 2, so L+- shift energies by +-2 and split the spectrum into
two infinite ladders (labelled nu = -2 and nu = 1) plus the isolated
level at eps.  On eigenstates L+ L- = N4(H~) with

    N4(E) = (E - eps)(E + 3/2)(E - 3/2)(E - eps - 2).

Ladder actions are bookkept spectrally; the differential route (jets
pushed through four first-order-in-W intertwiners) is for verification.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .grid import integrate, uniform_grid
from .oscillator import psi_n
from .susy import ImageState, MissingState, SeedState, State, TransformedState, h1_transform, h2_transform

EPS_SINGLET = "eps"
LADDER_LABELS = (-2, 1)
# grid used to fix phases by overlap
_PHASE_GRID = (-12.0, 12.0, 4001)
_TAIL_INNER = 10.0
_TAIL_OUTER = 14.0


@dataclass(frozen=True)
class SpectralState:
    """A basis vector |nu + 2n> (or the isolated eps level)."""

    nu: object
    n: int
    energy: float


class SignedState(State):
    def __init__(self, base, sign, label):
        self.base = base
        self.sign = sign
        self.energy = base.energy
        self.label = label

    def jet(self, x, order):
        return self.base.jet(x, order) * self.sign


@dataclass(eq=False)
class LadderPair:
    """The two equivalent transformations sharing eps and gamma."""

    eps: float
    gamma: float
    _signs: dict = field(default_factory=dict, repr=False)
    kappas: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.t1 = h1_transform(self.eps, self.gamma)
        self.t2 = h2_transform(self.eps, self.gamma)

    @property
    def factorization_energies(self):
        return (self.eps, -1.5, 1.5, self.eps + 2.0)

    def n4(self, energy):
        e = energy
        return (e - self.eps) * (e + 1.5) * (e - 1.5) * (e - self.eps - 2.0)

    def n1(self, energy):
        return (energy - self.eps) * (energy + 1.5)

    def state(self, nu, n=0):
        if nu == EPS_SINGLET:
            if n != 0:
                raise ValueError("the eps singlet has a single rung")
            return SpectralState(EPS_SINGLET, 0, self.eps)
        if nu not in LADDER_LABELS:
            raise ValueError(f"nu must be -2, 1 or {EPS_SINGLET!r}")
        if n < 0:
            raise ValueError("rung index must be non-negative")
        return SpectralState(nu, int(n), nu + 2 * n + 0.5)

    def _unsigned(self, nu, n):
        """The transformed eigenstate with its default sign."""
        if nu == EPS_SINGLET:
            return MissingState(self.t1, 1)
        if nu == -2 and n == 0:
            return MissingState(self.t1, 2)
        m = 2 * n - 2 if nu == -2 else 2 * n + 1
        return TransformedState(self.t1, m)

    def _kappa(self, base):
        """<psi_m | B2 base> with psi_m the oscillator state at energy E + 2."""
        x = uniform_grid(*_PHASE_GRID)
        m = int(round(base.energy + 1.5))
        img = self.t2.b(base.jet(x, 2))[0]
        return float(integrate(psi_n(m, x) * img, x))

    def sign(self, nu, n):
        """Sign making every raising matrix element positive (rung 0 has +1)."""
        if nu == EPS_SINGLET or n == 0:
            return 1.0
        key = (nu, n)
        if key not in self._signs:
            prev = self.sign(nu, n - 1)
            kappa = self._kappa(self._unsigned(nu, n - 1))
            self.kappas[(nu, n - 1)] = kappa
            self._signs[key] = prev * (1.0 if kappa > 0 else -1.0)
        return self._signs[key]

    def basis_function(self, nu, n=0):
        """Phase-fixed basis state as a :class:`State`."""
        self.state(nu, n)  # validates the label
        return SignedState(self._unsigned(nu, n), self.sign(nu, n), f"|{nu},{n}>")

    def raise_lower(self, direction, f):
        """Differential L+ or L- applied to a jet (loses four orders)."""
        if direction == "raise":
            return self.t1.b_plus(self.t2.b(f))
        if direction == "lower":
            return self.t2.b_plus(self.t1.b(f))
        raise ValueError(f"unknown direction {direction!r}")


def basis_state(pair, nu, n=0, x=None):
    """Normalised eigenstate |nu + 2n> of H~ on a grid."""
    return pair.basis_function(nu, n).on_grid(x)


def apply_ladder(pair, direction, state):
    """Spectral action of L+ or L-: returns (coefficient, resulting state).

    A zero coefficient signals the kernel; the returned state is then the
    input unchanged.
    """
    if direction not in ("raise", "lower"):
        raise ValueError(f"unknown direction {direction!r}")
    if state.nu == EPS_SINGLET:
        return 0.0, state
    if direction == "lower":
        if state.n == 0:
            return 0.0, state
        return math.sqrt(pair.n4(state.energy)), pair.state(state.nu, state.n - 1)
    return math.sqrt(pair.n4(state.energy + 2.0)), pair.state(state.nu, state.n + 1)


def _rel_l2(a, b, x):
    num = integrate((a - b) ** 2, x)
    den = max(integrate(a * a, x), integrate(b * b, x))
    return math.sqrt(num / den) if den > 0 else math.sqrt(num)


def differential_check(pair, direction, state, x=None):
    """Relative L2 gap between differential L+- psi and coefficient * target."""
    x = uniform_grid(-8.0, 8.0, 1601) if x is None else np.asarray(x, dtype=float)
    f = pair.basis_function(state.nu, state.n)
    got = pair.raise_lower(direction, f.jet(x, 4))[0]
    coef, target = apply_ladder(pair, direction, state)
    if coef == 0.0:
        scale = math.sqrt(integrate(f(x) ** 2, x)) * max(1.0, pair.n4(state.energy + 2.0)) ** 0.5
        return math.sqrt(integrate(got * got, x)) / scale
    want = coef * pair.basis_function(target.nu, target.n)(x)
    return _rel_l2(got, want, x)


def pha_check(pair, states, x=None):
    """Residuals of the polynomial Heisenberg algebra on the given states.

    For each state: the commutators [H~, L+-] = +-2 L+- applied
    differentially, and <psi|[L-, L+]|psi> against N4(E+2) - N4(E).
    """
    x = uniform_grid(-8.0, 8.0, 1601) if x is None else np.asarray(x, dtype=float)
    rows = []
    for st in states:
        f = pair.basis_function(st.nu, st.n)
        j = f.jet(x, 8)
        hj = pair.t1.hamiltonian(j)
        row = {"nu": st.nu, "n": st.n, "energy": st.energy}
        for direction, shift in (("raise", 2.0), ("lower", -2.0)):
            lf = pair.raise_lower(direction, j)
            a = pair.t1.hamiltonian(lf)[0]
            b = pair.raise_lower(direction, hj)[0]
            c = shift * lf[0]
            # reference size keeps kernel states (L- psi = 0) from giving 0/0
            ref = (abs(st.energy) + 2.0) * math.sqrt(max(pair.n4(st.energy + 2.0), 1.0)) * np.max(np.abs(j[0]))
            scale = np.max(np.abs(a)) + np.max(np.abs(b)) + np.max(np.abs(c)) + ref
            res = a - b - c
            row[f"commutator_{direction}"] = float(np.max(np.abs(res)) / scale) if scale > 0 else 0.0
        up = pair.raise_lower("raise", j)
        lo = pair.raise_lower("lower", j)
        comm = pair.raise_lower("lower", up)[0] - pair.raise_lower("raise", lo)[0]
        v = j[0]
        got = integrate(v * comm, x) / integrate(v * v, x)
        want = pair.n4(st.energy + 2.0) - pair.n4(st.energy)
        row["bracket"] = float(got)
        row["bracket_expected"] = float(want)
        row["bracket_rel_error"] = float(abs(got - want) / max(abs(want), 1e-300))
        rows.append(row)
    worst = max((max(r["commutator_raise"], r["commutator_lower"]) for r in rows), default=0.0)
    return {
        "eps": pair.eps,
        "gamma": pair.gamma,
        "omega": 2.0,
        "states": rows,
        "max_commutator_residual": worst,
        "max_bracket_rel_error": max((r["bracket_rel_error"] for r in rows), default=0.0),
    }


def tail_normalizable(state, rtol=1e-6):
    """True when the squared norm on [-14, 14] exceeds that on [-10, 10] by < rtol."""
    xi = uniform_grid(-_TAIL_INNER, _TAIL_INNER, 8001)
    xo = uniform_grid(-_TAIL_OUTER, _TAIL_OUTER, 11201)
    ni = integrate(state(xi) ** 2, xi)
    no = integrate(state(xo) ** 2, xo)
    return bool(abs(no - ni) <= rtol * ni), float(ni), float(no)


def kernel_basis(pair):
    """[(state, physical)] spanning the kernel of L-.

    The fourth element B1+ u2 (u2 the general seed of the second transform)
    is only a formal solution; its verdict comes from the tail test.
    """
    out = [
        (pair.basis_function(-2, 0), True),
        (pair.basis_function(EPS_SINGLET), True),
        (pair.basis_function(1, 0), True),
    ]
    formal = ImageState(pair.t1, SeedState(pair.t2.seed2), "B1+ u2")
    out.append((formal, tail_normalizable(formal)[0]))
    return out


def kernel_residual(pair, state, x=None):
    """max|L- f| relative to the size of f's derivatives weighted by (1 + x^2)^(k/2)."""
    x = uniform_grid(-6.0, 6.0, 1201) if x is None else np.asarray(x, dtype=float)
    j = state.jet(x, 4)
    out = pair.raise_lower("lower", j)[0]
    w = np.sqrt(1.0 + x * x)
    scale = sum(np.abs(j[k]) * w ** (4 - k) for k in range(5))
    return float(np.max(np.abs(out) / scale))


def kernel_tail_report(pair):
    """Squared norms of the formal kernel element on two windows."""
    formal = kernel_basis(pair)[3][0]
    ok, ni, no = tail_normalizable(formal)
    return {"normalizable": ok, "norm2_inner": ni, "norm2_outer": no,
            "inner_window": _TAIL_INNER, "outer_window": _TAIL_OUTER}


__all__ = [
    "EPS_SINGLET", "SpectralState", "LadderPair", "basis_state", "apply_ladder",
    "differential_check", "pha_check", "kernel_basis", "kernel_residual",
    "kernel_tail_report", "tail_normalizable",
]
