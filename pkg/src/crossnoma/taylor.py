"""Truncated Taylor-coefficient arithmetic.

A TaylorScalar stores c_0..c_K with c_k = f^(k)(s0) / k!, i.e. the Taylor
coefficients of a function around the evaluation point. Arithmetic on these
tuples gives exact derivatives of any expression built from +, *, /, sqrt and
exp, which is how high-order derivatives of the interference Laplace
transforms are obtained without symbolic work or finite differencing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True, slots=True)
class TaylorScalar:
    coeffs: tuple[float, ...]

    # -- constructors -------------------------------------------------

    @classmethod
    def constant(cls, value: float, order: int) -> "TaylorScalar":
        return cls((float(value),) + (0.0,) * order)

    @classmethod
    def variable(cls, value: float, order: int) -> "TaylorScalar":
        """The identity function s -> s expanded at `value`."""
        if order == 0:
            return cls((float(value),))
        return cls((float(value), 1.0) + (0.0,) * (order - 1))

    # -- views ---------------------------------------------------------

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def value(self) -> float:
        return self.coeffs[0]

    def derivative(self, k: int) -> float:
        """The k-th derivative at the expansion point (k! * c_k)."""
        return self.coeffs[k] * math.factorial(k)

    # -- ring operations -----------------------------------------------

    def _lift(self, other) -> "TaylorScalar":
        if isinstance(other, TaylorScalar):
            if other.order != self.order:
                raise ValueError("mixed truncation orders")
            return other
        return TaylorScalar.constant(float(other), self.order)

    def __add__(self, other) -> "TaylorScalar":
        o = self._lift(other)
        return TaylorScalar(tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self) -> "TaylorScalar":
        return TaylorScalar(tuple(-a for a in self.coeffs))

    def __sub__(self, other) -> "TaylorScalar":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "TaylorScalar":
        return (-self) + other

    def __mul__(self, other) -> "TaylorScalar":
        if not isinstance(other, TaylorScalar):
            c = float(other)
            return TaylorScalar(tuple(a * c for a in self.coeffs))
        o = self._lift(other)
        n = self.order + 1
        out = [0.0] * n
        for i, a in enumerate(self.coeffs):
            if a == 0.0:
                continue
            for j in range(n - i):
                out[i + j] += a * o.coeffs[j]
        return TaylorScalar(tuple(out))

    __rmul__ = __mul__

    def reciprocal(self) -> "TaylorScalar":
        g = self.coeffs
        if g[0] == 0.0:
            raise ZeroDivisionError("reciprocal of a Taylor scalar with zero value")
        n = self.order + 1
        q = [1.0 / g[0]] + [0.0] * (n - 1)
        for k in range(1, n):
            acc = 0.0
            for j in range(1, k + 1):
                acc += g[j] * q[k - j]
            q[k] = -acc / g[0]
        return TaylorScalar(tuple(q))

    def __truediv__(self, other) -> "TaylorScalar":
        if not isinstance(other, TaylorScalar):
            return self * (1.0 / float(other))
        return self * self._lift(other).reciprocal()

    def __rtruediv__(self, other) -> "TaylorScalar":
        return self.reciprocal() * other

    # -- elementary functions -------------------------------------------

    def sqrt(self) -> "TaylorScalar":
        g = self.coeffs
        if g[0] <= 0.0:
            raise ValueError("sqrt requires a positive leading coefficient")
        n = self.order + 1
        r = [math.sqrt(g[0])] + [0.0] * (n - 1)
        for k in range(1, n):
            acc = 0.0
            for j in range(1, k):
                acc += r[j] * r[k - j]
            r[k] = (g[k] - acc) / (2.0 * r[0])
        return TaylorScalar(tuple(r))

    def exp(self) -> "TaylorScalar":
        g = self.coeffs
        n = self.order + 1
        e = [math.exp(g[0])] + [0.0] * (n - 1)
        for k in range(1, n):
            acc = 0.0
            for j in range(1, k + 1):
                acc += j * g[j] * e[k - j]
            e[k] = acc / k
        return TaylorScalar(tuple(e))
