"""Truncated derivative stacks ("jets") sampled on a set of points.

A :class:`Jet` holds ``f, f', ..., f^(K)`` at every point of ``x``.  Sums,
products and quotients follow the Leibniz rule, so composing differential
operators never needs finite differences.
"""

from math import comb

import numpy as np


class Jet:
    __slots__ = ("x", "d")

    def __init__(self, x, d):
        self.x = x
        self.d = np.asarray(d)

    @property
    def order(self):
        return self.d.shape[0] - 1

    @property
    def value(self):
        return self.d[0]

    def __getitem__(self, k):
        return self.d[k]

    @classmethod
    def constant(cls, x, c, order):
        d = np.zeros((order + 1,) + np.shape(x))
        d[0] = c
        return cls(x, d)

    @classmethod
    def identity(cls, x, order):
        """The jet of the coordinate function ``x`` itself."""
        d = np.zeros((order + 1,) + np.shape(x))
        d[0] = x
        if order >= 1:
            d[1] = 1.0
        return cls(x, d)

    @classmethod
    def quadratic(cls, x, a, c, order):
        """Jet of ``a*x**2 + c``."""
        d = np.zeros((order + 1,) + np.shape(x))
        d[0] = a * x * x + c
        if order >= 1:
            d[1] = 2.0 * a * x
        if order >= 2:
            d[2] = 2.0 * a
        return cls(x, d)

    def truncate(self, order):
        return Jet(self.x, self.d[: order + 1])

    def deriv(self, times=1):
        return Jet(self.x, self.d[times:])

    def _coerce(self, other):
        if isinstance(other, Jet):
            k = min(self.order, other.order)
            return self.d[: k + 1], other.d[: k + 1]
        return self.d, None

    def __add__(self, other):
        a, b = self._coerce(other)
        if b is None:
            out = a.copy()
            out[0] = out[0] + other
            return Jet(self.x, out)
        return Jet(self.x, a + b)

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.x, -self.d)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b = self._coerce(other)
        if b is None:
            return Jet(self.x, a * other)
        k = a.shape[0] - 1
        out = np.zeros(np.broadcast_shapes(a.shape, b.shape), dtype=np.result_type(a, b))
        for n in range(k + 1):
            for j in range(n + 1):
                out[n] += comb(n, j) * a[j] * b[n - j]
        return Jet(self.x, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.x, self.d / other)
        a, b = self._coerce(other)
        k = a.shape[0] - 1
        q = np.zeros(np.broadcast_shapes(a.shape, b.shape), dtype=np.result_type(a, b, float))
        for n in range(k + 1):
            acc = a[n].astype(q.dtype, copy=True)
            for j in range(1, n + 1):
                acc -= comb(n, j) * b[j] * q[n - j]
            q[n] = acc / b[0]
        return Jet(self.x, q)

    def __rtruediv__(self, other):
        return Jet.constant(self.x, other, self.order) / self

    def conj(self):
        return Jet(self.x, np.conj(self.d))


def ode_jet(x, f, df, energy, order):
    """Jet of a solution of ``-f''/2 + x^2 f/2 = energy * f``.

    Only ``f`` and ``f'`` are needed; every higher derivative follows from
    ``f^(k+2) = sum_j C(k,j) P^(j) f^(k-j)`` with ``P = x^2 - 2*energy``.
    """
    x = np.asarray(x, dtype=float)
    d = np.zeros((max(order, 1) + 1,) + x.shape, dtype=np.result_type(f, df, float))
    d[0] = f
    d[1] = df
    p = (x * x - 2.0 * energy, 2.0 * x, 2.0)
    for k in range(order - 1):
        acc = p[0] * d[k]
        if k >= 1:
            acc = acc + k * p[1] * d[k - 1]
        if k >= 2:
            acc = acc + comb(k, 2) * p[2] * d[k - 2]
        d[k + 2] = acc
    return Jet(x, d[: order + 1])
