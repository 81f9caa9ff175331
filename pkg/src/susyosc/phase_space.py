"""Wigner functions and number statistics.

The Wigner function is evaluated as

    W(x, p) = (1/pi) int psi*(x - s) psi(x + s) e^{2ips} ds

with the state sampled on a fine grid of step h that contains every
requested x, so x +- s_k (s_k = k h) are grid points and the s-sum is a
trapezoid rule done as one matrix product for all p.
"""

import math
from dataclasses import dataclass

import numpy as np

from .coherent import CoherentState, FIGURE_NMAX, basis_block, wavefunction
from .errors import QuadratureFailure, ZeroMeanOccupation
from .grid import GridFunction, integrate, sign_changes, uniform_grid

DEFAULT_PHASE_BOUNDS = (-15.0, 15.0)
DEFAULT_PHASE_POINTS = 301
# states are sampled on [-SAMPLE_HALF_WIDTH, SAMPLE_HALF_WIDTH] and taken as 0 outside
SAMPLE_HALF_WIDTH = 14.0
FINE_STEP = 0.01
TAIL_RTOL = 1e-8


@dataclass
class WignerGrid:
    x: np.ndarray
    p: np.ndarray
    values: np.ndarray  # shape (len(x), len(p))
    imag_residual: float = 0.0

    def mass(self):
        return float(integrate(integrate(self.values, self.p), self.x))

    def marginal_x(self):
        return integrate(self.values, self.p)

    def marginal_p(self):
        return integrate(self.values.T, self.x)

    def minimum(self):
        return float(self.values.min())

    def rows(self):
        """Long-format (x, p, W) rows."""
        xx, pp = np.meshgrid(self.x, self.p, indexing="ij")
        return np.column_stack([xx.ravel(), pp.ravel(), self.values.ravel()])


def _sampler(state, t=0.0, nmax=FIGURE_NMAX):
    """Turn a state description into a callable x -> psi(x)."""
    if isinstance(state, CoherentState):
        def f(x):
            return wavefunction(state, x, t, nmax, basis_block(state, x, nmax))
        return f
    if isinstance(state, GridFunction):
        def f(x):
            re = np.interp(x, state.x, np.real(state.values), left=0.0, right=0.0)
            im = np.interp(x, state.x, np.imag(state.values), left=0.0, right=0.0)
            return re + 1j * im
        return f
    return state


def wigner_grid(state, x=None, p=None, t=0.0, nmax=FIGURE_NMAX, step=FINE_STEP):
    """W on the tensor grid ``x`` x ``p`` (default [-15, 15]^2 with 301 x 301)."""
    x = uniform_grid(*DEFAULT_PHASE_BOUNDS, DEFAULT_PHASE_POINTS) if x is None else np.atleast_1d(np.asarray(x, dtype=float))
    p = uniform_grid(*DEFAULT_PHASE_BOUNDS, DEFAULT_PHASE_POINTS) if p is None else np.atleast_1d(np.asarray(p, dtype=float))
    psi = _sampler(state, t, nmax)

    # fine grid through x[0] whose step divides every x spacing
    if x.size > 1:
        dx = np.diff(x)
        m = max(1, int(math.ceil(dx.min() / step - 1e-9)))
        h = dx.min() / m
        idx = np.rint((x - x[0]) / h).astype(int)
        if np.max(np.abs(x[0] + idx * h - x)) > 1e-9 * max(1.0, np.abs(x).max()):
            raise ValueError("x grid must be uniform")
    else:
        h = step
        idx = np.zeros(1, dtype=int)
    half = SAMPLE_HALF_WIDTH
    k_lo = min(0, int(math.floor((-half - x[0]) / h)))
    k_hi = max(int(idx[-1]), int(math.ceil((half - x[0]) / h)))
    fine = x[0] + h * np.arange(k_lo, k_hi + 1)
    inside = np.abs(fine) <= half
    vals = np.zeros(fine.size, dtype=complex)
    vals[inside] = np.asarray(psi(fine[inside]), dtype=complex)
    core = vals[inside]
    edge = max(abs(core[0]), abs(core[-1]))
    if edge > TAIL_RTOL * np.abs(core).max():
        raise QuadratureFailure(f"state has not decayed at |x| = {half} (edge/peak = {edge / np.abs(core).max():.2e})")

    # zero-pad so that every shifted index exists
    smax = fine.size
    padded = np.concatenate([np.zeros(smax, complex), vals, np.zeros(smax, complex)])
    centre = idx - k_lo + smax
    s_idx = np.arange(-smax + 1, smax)
    s = s_idx * h
    corr = np.conj(padded[centre[:, None] - s_idx[None, :]]) * padded[centre[:, None] + s_idx[None, :]]
    phase = np.exp(2j * np.outer(s, p))
    w = (h / math.pi) * (corr @ phase)
    return WignerGrid(x, p, w.real, float(np.abs(w.imag).max()))


def wigner(state, x, p, t=0.0, nmax=FIGURE_NMAX):
    """W at a single point."""
    return float(wigner_grid(state, [x], [p], t, nmax).values[0, 0])


def wigner_marginals(grid, state, t=0.0, nmax=FIGURE_NMAX):
    """Total mass and sup-norm gap between int W dp and |psi(x)|^2."""
    psi = _sampler(state, t, nmax)
    rho = np.abs(np.asarray(psi(grid.x))) ** 2
    return {
        "mass": grid.mass(),
        "mass_error": abs(grid.mass() - 1.0),
        "marginal_error": float(np.max(np.abs(grid.marginal_x() - rho))),
        "min": grid.minimum(),
        "imag_residual": grid.imag_residual,
    }


def ring_centre(state, half_width=5.0, points=1001):
    """x where |W(x, 0)| peaks: the centre of the ring pattern of a Fock-like state."""
    xs = np.linspace(-half_width, half_width, points)
    w0 = wigner_grid(state, xs, [0.0]).values[:, 0]
    return float(xs[int(np.argmax(np.abs(w0)))])


def radial_sign_changes(state, x0=None, pmax=8.0, points=161, rel_floor=1e-6):
    """Sign changes of W(x0, p) for p in [0, pmax]; x0 defaults to the ring centre."""
    if x0 is None:
        x0 = ring_centre(state)
    p = np.linspace(0.0, pmax, points)
    w = wigner_grid(state, [x0], p).values[0]
    return sign_changes(w, rel_floor)


# number statistics

def number_moments(state):
    """(<N>, <N^2>) with N counting rungs; ``state`` has ``.coeffs``."""
    prob = np.abs(np.asarray(state.coeffs)) ** 2
    prob = prob / prob.sum()
    n = np.arange(prob.size, dtype=float)
    return float(prob @ n), float(prob @ (n * n))


def mandel_q(state, limit=False):
    """Q = Var(N)/<N> - 1, evaluated as <N(N-1)>/<N> - <N> to avoid cancellation.

    At z = 0 the ratio is 0/0; ``limit=True`` returns the limiting value 0.
    """
    prob = np.abs(np.asarray(state.coeffs)) ** 2
    prob = prob / prob.sum()
    n = np.arange(prob.size, dtype=float)
    mean = float(prob @ n)
    if mean == 0.0:
        if limit:
            return 0.0
        raise ZeroMeanOccupation("<N> = 0: Mandel Q is 0/0 (pass limit=True for the z -> 0 value)")
    return float(prob @ (n * (n - 1.0))) / mean - mean


@dataclass
class PoissonState:
    """c_n = e^{-|w|^2/2} w^n / sqrt(n!), the Poissonian reference.

    ``nmax`` defaults to |w|^2 + 12|w| + 40, which leaves a tail far below 1e-16.
    """

    w: complex
    nmax: int = None

    @property
    def coeffs(self):
        nmax = self.nmax
        if nmax is None:
            nmax = int(math.ceil(abs(self.w) ** 2 + 12 * abs(self.w) + 40))
        n = np.arange(nmax + 1)
        if self.w == 0:
            return (n == 0).astype(complex)
        logmag = -0.5 * abs(self.w) ** 2 + n * math.log(abs(self.w)) - 0.5 * np.array([math.lgamma(k + 1) for k in n])
        return np.exp(logmag) * np.exp(1j * np.angle(self.w) * n)


__all__ = [
    "WignerGrid", "wigner", "wigner_grid", "wigner_marginals", "radial_sign_changes", "ring_centre",
    "number_moments", "mandel_q", "PoissonState",
]
