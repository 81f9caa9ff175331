"""Uniform evaluation grids and sampled functions on them."""

import os
from dataclasses import dataclass, field

import numpy as np

DEFAULT_BOUNDS = (-10.0, 10.0)
DEFAULT_POINTS = 2001
GRID_POINTS_ENV = "SUSYOSC_GRID_POINTS"


def default_points():
    env = os.environ.get(GRID_POINTS_ENV)
    return int(env) if env else DEFAULT_POINTS


def uniform_grid(lo=DEFAULT_BOUNDS[0], hi=DEFAULT_BOUNDS[1], points=None):
    """Uniform grid on [lo, hi]; ``points`` defaults to 2001 (or the env override)."""
    if points is None:
        # keep the default spacing when the window is changed
        base = default_points()
        span = DEFAULT_BOUNDS[1] - DEFAULT_BOUNDS[0]
        points = int(round((hi - lo) / span * (base - 1))) + 1
    return np.linspace(lo, hi, int(points))


def default_grid():
    return uniform_grid(*DEFAULT_BOUNDS, default_points())


def integrate(values, x):
    """Trapezoid rule; spectrally accurate for smooth functions with decayed tails."""
    return np.trapezoid(values, x)


@dataclass
class GridFunction:
    """Samples of a (possibly complex) function on a real grid."""

    x: np.ndarray
    values: np.ndarray
    derivs: np.ndarray = None
    label: str = ""
    meta: dict = field(default_factory=dict)

    def norm(self):
        return float(np.sqrt(integrate(np.abs(self.values) ** 2, self.x)))

    def inner(self, other):
        """<self|other> with the conjugate on ``self``."""
        v = integrate(np.conj(self.values) * other.values, self.x)
        return complex(v) if np.iscomplexobj(v) else float(v)

    def density(self):
        return np.abs(self.values) ** 2

    def normalized(self):
        n = self.norm()
        return GridFunction(self.x, self.values / n,
                            None if self.derivs is None else self.derivs / n,
                            self.label, dict(self.meta))

    def __mul__(self, c):
        return GridFunction(self.x, self.values * c,
                            None if self.derivs is None else self.derivs * c,
                            self.label, dict(self.meta))

    __rmul__ = __mul__


def sign_changes(values, rel_floor=1e-10):
    """Number of sign changes, ignoring samples below ``rel_floor * max|values|``."""
    v = np.asarray(values, dtype=float)
    keep = np.abs(v) > rel_floor * np.abs(v).max()
    s = np.sign(v[keep])
    return int(np.count_nonzero(s[1:] != s[:-1]))
