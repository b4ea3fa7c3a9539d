"""Minimal truncated power-series arithmetic (complex coefficients).

Used to expand the impedance summand in powers of 1/n so the tail of the
mode sum can be summed with Hurwitz zeta functions.
"""
import numpy as np


class Series:
    __slots__ = ("c",)

    def __init__(self, coeffs, order=None):
        c = np.asarray(coeffs, dtype=complex)
        if order is not None:
            c = np.concatenate([c, np.zeros(max(0, order + 1 - c.size), complex)])[: order + 1]
        self.c = c

    @property
    def order(self):
        return self.c.size - 1

    @classmethod
    def const(cls, value, order):
        c = np.zeros(order + 1, complex)
        c[0] = value
        return cls(c)

    @classmethod
    def variable(cls, order):
        c = np.zeros(order + 1, complex)
        if order >= 1:
            c[1] = 1.0
        return cls(c)

    def _lift(self, other):
        if isinstance(other, Series):
            return other
        return Series.const(other, self.order)

    def __add__(self, other):
        return Series(self.c + self._lift(other).c)

    __radd__ = __add__

    def __neg__(self):
        return Series(-self.c)

    def __sub__(self, other):
        return Series(self.c - self._lift(other).c)

    def __rsub__(self, other):
        return Series(self._lift(other).c - self.c)

    def __mul__(self, other):
        if isinstance(other, Series):
            return Series(np.convolve(self.c, other.c)[: self.order + 1])
        return Series(self.c * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Series):
            return self * other.reciprocal()
        return Series(self.c / other)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def shift(self, k=1):
        """Multiply by x**k."""
        return Series(np.concatenate([np.zeros(k, complex), self.c[: self.order + 1 - k]]))

    def reciprocal(self):
        a = self.c
        if a[0] == 0:
            raise ZeroDivisionError("series with zero constant term has no reciprocal")
        b = np.zeros_like(a)
        b[0] = 1.0 / a[0]
        for k in range(1, a.size):
            b[k] = -np.dot(a[1 : k + 1], b[k - 1 :: -1][:k]) / a[0]
        return Series(b)

    def sqrt(self):
        a = self.c
        if a[0] == 0:
            raise ZeroDivisionError("series with zero constant term has no sqrt")
        b = np.zeros_like(a)
        b[0] = np.sqrt(a[0])
        for k in range(1, a.size):
            b[k] = (a[k] - np.dot(b[1:k], b[k - 1 : 0 : -1])) / (2.0 * b[0])
        return Series(b)

    def atanh(self):
        """atanh of a series without constant term."""
        if self.c[0] != 0:
            raise ValueError("atanh expansion needs a zero constant term")
        y2 = self * self
        power = self
        out = Series(np.zeros_like(self.c))
        for k in range(0, self.order // 2 + 1):
            out = out + power * (1.0 / (2 * k + 1))
            power = power * y2
        return out
