"""Rational functions and elements A(x) + B(x)*y of the curve function field.

Polynomials are ascending complex coefficient arrays (numpy.polynomial
convention).  An :class:`AlgebraicFunction` represents A(x) + B(x)*y modulo
the relation y^2 = Q0(x) = x^3 + a*x + b; sums, products, quotients and
d/dx stay in this form.
"""

from __future__ import annotations

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import DivisionByZeroFunction, ExpressionSwell

_TRIM_REL = 1e-13
MAX_DEGREE = 360


def _aspoly(c):
    arr = np.atleast_1d(np.asarray(c, dtype=complex))
    return arr if arr.size else np.zeros(1, dtype=complex)


def _trim(c):
    """Drop trailing (leading-degree) coefficients that are pure noise."""
    c = _aspoly(c)
    top = np.max(np.abs(c))
    if top == 0.0:
        return np.zeros(1, dtype=complex)
    keep = np.nonzero(np.abs(c) > _TRIM_REL * top)[0]
    return c[: keep[-1] + 1].copy()


class Rat:
    """Quotient of two polynomials, normalized to monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=(1.0,)):
        num = _trim(num)
        den = _trim(den)
        if np.all(den == 0):
            raise DivisionByZeroFunction("zero denominator polynomial")
        lead = den[-1]
        self.num = num / lead
        self.den = den / lead
        if len(self.num) > MAX_DEGREE or len(self.den) > MAX_DEGREE:
            raise ExpressionSwell(
                f"rational degree {len(self.num)}/{len(self.den)} exceeds bound"
            )

    @classmethod
    def const(cls, c):
        return cls([c])

    @classmethod
    def x(cls):
        return cls([0.0, 1.0])

    def is_zero(self):
        return np.all(self.num == 0)

    def __add__(self, other):
        other = other if isinstance(other, Rat) else Rat.const(other)
        num = P.polyadd(P.polymul(self.num, other.den), P.polymul(other.num, self.den))
        return Rat(num, P.polymul(self.den, other.den))

    __radd__ = __add__

    def __neg__(self):
        return Rat(-self.num, self.den)

    def __sub__(self, other):
        other = other if isinstance(other, Rat) else Rat.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = other if isinstance(other, Rat) else Rat.const(other)
        return Rat(P.polymul(self.num, other.num), P.polymul(self.den, other.den))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = other if isinstance(other, Rat) else Rat.const(other)
        if other.is_zero():
            raise DivisionByZeroFunction("division by zero rational function")
        return Rat(P.polymul(self.num, other.den), P.polymul(self.den, other.num))

    def __rtruediv__(self, other):
        return Rat.const(other) / self

    def deriv(self):
        dn = P.polyder(self.num) if len(self.num) > 1 else np.zeros(1, complex)
        dd = P.polyder(self.den) if len(self.den) > 1 else np.zeros(1, complex)
        num = P.polysub(P.polymul(dn, self.den), P.polymul(self.num, dd))
        return Rat(num, P.polymul(self.den, self.den))

    def __call__(self, x):
        return P.polyval(x, self.num) / P.polyval(x, self.den)

    def __repr__(self):
        return f"Rat({self.num.tolist()}, {self.den.tolist()})"


def q0_poly(a, b):
    """Ascending coefficients of Q0(x) = x^3 + a x + b."""
    return np.array([b, a, 0.0, 1.0], dtype=complex)


class AlgebraicFunction:
    """Element A(x) + B(x)*y of the function field of y^2 = x^3 + a x + b."""

    __slots__ = ("a_part", "b_part", "curve")

    def __init__(self, a_part, b_part, curve):
        self.a_part = a_part if isinstance(a_part, Rat) else Rat.const(a_part)
        self.b_part = b_part if isinstance(b_part, Rat) else Rat.const(b_part)
        self.curve = (complex(curve[0]), complex(curve[1]))

    # -- constructors ---------------------------------------------------
    @classmethod
    def const(cls, c, curve):
        return cls(Rat.const(c), Rat.const(0.0), curve)

    @classmethod
    def x(cls, curve):
        return cls(Rat.x(), Rat.const(0.0), curve)

    @classmethod
    def y(cls, curve):
        return cls(Rat.const(0.0), Rat.const(1.0), curve)

    @classmethod
    def rational(cls, num, den, curve):
        return cls(Rat(num, den), Rat.const(0.0), curve)

    def _q0(self):
        a, b = self.curve
        return Rat(q0_poly(a, b))

    def _check(self, other):
        if not np.allclose(self.curve, other.curve, rtol=0, atol=0):
            raise ValueError("operands live on different curves")

    def is_zero(self):
        return self.a_part.is_zero() and self.b_part.is_zero()

    # -- field operations ----------------------------------------------
    def __add__(self, other):
        if not isinstance(other, AlgebraicFunction):
            other = AlgebraicFunction.const(other, self.curve)
        self._check(other)
        return AlgebraicFunction(
            self.a_part + other.a_part, self.b_part + other.b_part, self.curve
        )

    __radd__ = __add__

    def __neg__(self):
        return AlgebraicFunction(-self.a_part, -self.b_part, self.curve)

    def __sub__(self, other):
        if not isinstance(other, AlgebraicFunction):
            other = AlgebraicFunction.const(other, self.curve)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, AlgebraicFunction):
            other = AlgebraicFunction.const(other, self.curve)
        self._check(other)
        q0 = self._q0()
        a = self.a_part * other.a_part + self.b_part * other.b_part * q0
        b = self.a_part * other.b_part + self.b_part * other.a_part
        return AlgebraicFunction(a, b, self.curve)

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise DivisionByZeroFunction("inverse of zero function")
        q0 = self._q0()
        norm = self.a_part * self.a_part - self.b_part * self.b_part * q0
        return AlgebraicFunction(self.a_part / norm, -self.b_part / norm, self.curve)

    def __truediv__(self, other):
        if not isinstance(other, AlgebraicFunction):
            other = AlgebraicFunction.const(other, self.curve)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return AlgebraicFunction.const(other, self.curve) * self.inverse()

    def deriv(self):
        """d/dx with y' = Q0'(x) / (2y) reduced back to A + B*y form."""
        q0 = self._q0()
        dq0 = Rat(P.polyder(q0_poly(*self.curve)))
        a = self.a_part.deriv()
        b = self.b_part.deriv() + self.b_part * dq0 / (Rat.const(2.0) * q0)
        return AlgebraicFunction(a, b, self.curve)

    def __call__(self, x, y):
        """Evaluate at a point with the caller's branch value y."""
        return self.a_part(x) + self.b_part(x) * y

    def eval_rational_parts(self, x):
        return self.a_part(x), self.b_part(x)

    def __repr__(self):
        return f"AlgebraicFunction(A={self.a_part!r}, B={self.b_part!r})"


def alg_arith(f: AlgebraicFunction, g: AlgebraicFunction, op: str) -> AlgebraicFunction:
    """Field arithmetic dispatcher, op in {'+', '-', '*', '/'}."""
    if op == "+":
        return f + g
    if op == "-":
        return f - g
    if op == "*":
        return f * g
    if op == "/":
        return f / g
    raise ValueError(f"unknown op {op!r}")


def alg_derivative(f: AlgebraicFunction) -> AlgebraicFunction:
    return f.deriv()
