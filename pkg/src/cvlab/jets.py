"""Second-order forward jets in the axial coordinate t.

A :class:`Jet2` bundles a value together with its first and second
t-derivatives and pushes all three through arithmetic, so metric
coefficients report exact derivatives at every evaluation point.  The
angular coordinate rides along as a passive parameter and never
contributes to the derivative slots.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class DomainError(ValueError):
    """Evaluation left the real domain (log/sqrt of a nonpositive value,
    division by zero, overflow) or produced a non-finite number."""


class Overflow(DomainError):
    """The true value is finite but exceeds double range.  Kept separate
    from genuine domain violations so callers can treat "too large to
    represent" differently from "undefined"."""


@dataclass(frozen=True)
class Jet2:
    """Value and first two t-derivatives at a point."""

    f: float
    d1: float = 0.0
    d2: float = 0.0

    def __add__(self, other) -> "Jet2":
        o = as_jet(other)
        return Jet2(self.f + o.f, self.d1 + o.d1, self.d2 + o.d2)

    __radd__ = __add__

    def __sub__(self, other) -> "Jet2":
        o = as_jet(other)
        return Jet2(self.f - o.f, self.d1 - o.d1, self.d2 - o.d2)

    def __rsub__(self, other) -> "Jet2":
        return as_jet(other) - self

    def __neg__(self) -> "Jet2":
        return Jet2(-self.f, -self.d1, -self.d2)

    def __mul__(self, other) -> "Jet2":
        o = as_jet(other)
        return Jet2(
            self.f * o.f,
            self.f * o.d1 + self.d1 * o.f,
            self.f * o.d2 + 2.0 * self.d1 * o.d1 + self.d2 * o.f,
        )

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Jet2":
        o = as_jet(other)
        if o.f == 0.0:
            raise DomainError("division by zero")
        q = self.f / o.f
        q1 = (self.d1 - q * o.d1) / o.f
        q2 = (self.d2 - 2.0 * q1 * o.d1 - q * o.d2) / o.f
        return Jet2(q, q1, q2)

    def __rtruediv__(self, other) -> "Jet2":
        return as_jet(other) / self

    def __pow__(self, exponent) -> "Jet2":
        return jpow(self, exponent)

    def is_finite(self) -> bool:
        return (
            math.isfinite(self.f)
            and math.isfinite(self.d1)
            and math.isfinite(self.d2)
        )


def as_jet(x) -> Jet2:
    if isinstance(x, Jet2):
        return x
    return Jet2(float(x))


def ensure_finite(jet: Jet2, context: str = "expression") -> Jet2:
    if not jet.is_finite():
        raise DomainError(f"non-finite result in {context}")
    return jet


def _lift(g: Jet2, v: float, dv: float, ddv: float) -> Jet2:
    # chain rule at second order: (u g)'' = u''(g) g'^2 + u'(g) g''
    return Jet2(v, dv * g.d1, ddv * g.d1 * g.d1 + dv * g.d2)


def jexp(x) -> Jet2:
    g = as_jet(x)
    try:
        v = math.exp(g.f)
    except OverflowError as err:
        raise Overflow(f"overflow in exp({g.f!r})") from err
    return _lift(g, v, v, v)


def jlog(x) -> Jet2:
    g = as_jet(x)
    if g.f <= 0.0:
        raise DomainError(f"log of nonpositive value {g.f!r}")
    inv = 1.0 / g.f
    return _lift(g, math.log(g.f), inv, -inv * inv)


def jsqrt(x) -> Jet2:
    g = as_jet(x)
    if g.f <= 0.0:
        raise DomainError(f"sqrt of nonpositive value {g.f!r}")
    s = math.sqrt(g.f)
    return _lift(g, s, 0.5 / s, -0.25 / (s * g.f))


def jsin(x) -> Jet2:
    g = as_jet(x)
    s, c = math.sin(g.f), math.cos(g.f)
    return _lift(g, s, c, -s)


def jcos(x) -> Jet2:
    g = as_jet(x)
    s, c = math.sin(g.f), math.cos(g.f)
    return _lift(g, c, -s, -c)


def jsinh(x) -> Jet2:
    g = as_jet(x)
    try:
        s, c = math.sinh(g.f), math.cosh(g.f)
    except OverflowError as err:
        raise Overflow(f"overflow in sinh({g.f!r})") from err
    return _lift(g, s, c, s)


def jcosh(x) -> Jet2:
    g = as_jet(x)
    try:
        s, c = math.sinh(g.f), math.cosh(g.f)
    except OverflowError as err:
        raise Overflow(f"overflow in cosh({g.f!r})") from err
    return _lift(g, c, s, c)


def jtanh(x) -> Jet2:
    g = as_jet(x)
    v = math.tanh(g.f)
    sech2 = 1.0 - v * v
    return _lift(g, v, sech2, -2.0 * v * sech2)


def _ipow(g: Jet2, n: int) -> Jet2:
    if n == 0:
        return Jet2(1.0)
    if n < 0:
        return Jet2(1.0) / _ipow(g, -n)
    if n == 1:
        return g
    try:
        v = g.f**n
        vm1 = g.f ** (n - 1)
        vm2 = g.f ** (n - 2)
    except OverflowError as err:
        raise Overflow(f"overflow in power {g.f!r}^{n}") from err
    return Jet2(
        v,
        n * vm1 * g.d1,
        n * (n - 1) * vm2 * g.d1 * g.d1 + n * vm1 * g.d2,
    )


def jpow(base, exponent) -> Jet2:
    """Power with an integer fast path.

    A non-integer (or t-dependent) exponent routes through exp/log and
    therefore requires a positive base.
    """
    g = as_jet(base)
    e = as_jet(exponent)
    if e.d1 == 0.0 and e.d2 == 0.0 and float(e.f).is_integer() and abs(e.f) < 1e9:
        return _ipow(g, int(e.f))
    return jexp(e * jlog(g))


FUNCTIONS = {
    "exp": jexp,
    "log": jlog,
    "sqrt": jsqrt,
    "sin": jsin,
    "cos": jcos,
    "sinh": jsinh,
    "cosh": jcosh,
    "tanh": jtanh,
}
