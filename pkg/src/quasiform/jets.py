"""Second-order forward-mode jets: value, gradient and dense Hessian."""

from __future__ import annotations

import math

import numpy as np


class Jet2:
    """Truncated second-order Taylor data of a scalar function of ``n`` variables.

    Arithmetic follows the first and second order Leibniz / chain rules, so
    derivatives are exact up to floating point rounding. Hessians stay
    symmetric because every update is a symmetric expression.
    """

    __slots__ = ("value", "grad", "hess")

    def __init__(self, value: float, grad: np.ndarray, hess: np.ndarray):
        self.value = float(value)
        self.grad = grad
        self.hess = hess

    @classmethod
    def constant(cls, value: float, n: int) -> "Jet2":
        return cls(value, np.zeros(n), np.zeros((n, n)))

    @classmethod
    def variable(cls, value: float, index: int, n: int) -> "Jet2":
        g = np.zeros(n)
        g[index] = 1.0
        return cls(value, g, np.zeros((n, n)))

    @property
    def n(self) -> int:
        return self.grad.shape[0]

    def is_constant(self) -> bool:
        return not self.grad.any() and not self.hess.any()

    def is_finite(self) -> bool:
        return (
            math.isfinite(self.value)
            and bool(np.isfinite(self.grad).all())
            and bool(np.isfinite(self.hess).all())
        )

    def _lift(self, other) -> "Jet2":
        if isinstance(other, Jet2):
            return other
        return Jet2.constant(float(other), self.n)

    def __add__(self, other) -> "Jet2":
        o = self._lift(other)
        return Jet2(self.value + o.value, self.grad + o.grad, self.hess + o.hess)

    __radd__ = __add__

    def __neg__(self) -> "Jet2":
        return Jet2(-self.value, -self.grad, -self.hess)

    def __sub__(self, other) -> "Jet2":
        o = self._lift(other)
        return Jet2(self.value - o.value, self.grad - o.grad, self.hess - o.hess)

    def __rsub__(self, other) -> "Jet2":
        return self._lift(other) - self

    def __mul__(self, other) -> "Jet2":
        o = self._lift(other)
        cross = np.outer(self.grad, o.grad)
        return Jet2(
            self.value * o.value,
            self.value * o.grad + o.value * self.grad,
            self.value * o.hess + o.value * self.hess + (cross + cross.T),
        )

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet2":
        v = self.value
        if v == 0.0:
            raise ZeroDivisionError("reciprocal of a jet with zero value")
        return self.compose(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v))

    def __truediv__(self, other) -> "Jet2":
        return self * self._lift(other).reciprocal()

    def __rtruediv__(self, other) -> "Jet2":
        return self._lift(other) * self.reciprocal()

    def compose(self, f0: float, f1: float, f2: float) -> "Jet2":
        """Apply a scalar function with value f0, first derivative f1, second f2 at self.value."""
        return Jet2(f0, f1 * self.grad, f1 * self.hess + f2 * np.outer(self.grad, self.grad))

    def int_power(self, k: int) -> "Jet2":
        """Integer power by repeated squaring; negative k goes through the reciprocal."""
        if k < 0:
            return self.reciprocal().int_power(-k)
        result = Jet2.constant(1.0, self.n)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def real_power(self, exponent: "Jet2") -> "Jet2":
        """``self ** exponent`` for a positive base via exp(exponent * log(self))."""
        if self.value <= 0:
            raise ValueError("real power needs a positive base")
        x = self.value
        log_self = self.compose(math.log(x), 1.0 / x, -1.0 / (x * x))
        prod = exponent * log_self
        v = math.exp(prod.value)
        return prod.compose(v, v, v)

    def __repr__(self) -> str:
        return f"Jet2(value={self.value!r}, grad={self.grad.tolist()!r}, hess={self.hess.tolist()!r})"
