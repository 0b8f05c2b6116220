import math

import pytest

from cvlab.jets import DomainError, Jet2, jcosh, jexp, jlog, jpow, jsin, jsqrt, jtanh


def fd_checks(fn, jfn, x0, h=1e-5):
    """Central finite differences of fn as an independent derivative oracle."""
    d1 = (fn(x0 + h) - fn(x0 - h)) / (2 * h)
    d2 = (fn(x0 + h) - 2 * fn(x0) + fn(x0 - h)) / (h * h)
    jet = jfn(Jet2(x0, 1.0, 0.0))
    assert jet.f == pytest.approx(fn(x0), rel=1e-12)
    assert jet.d1 == pytest.approx(d1, rel=1e-7, abs=1e-9)
    assert jet.d2 == pytest.approx(d2, rel=1e-4, abs=1e-6)


def test_elementary_functions_match_finite_differences():
    fd_checks(math.exp, jexp, 0.7)
    fd_checks(math.log, jlog, 1.3)
    fd_checks(math.sqrt, jsqrt, 2.1)
    fd_checks(math.sin, jsin, 0.4)
    fd_checks(math.cosh, jcosh, 0.9)
    fd_checks(math.tanh, jtanh, -0.6)


def test_product_and_quotient_rules():
    t = Jet2(1.7, 1.0, 0.0)
    prod = jsin(t) * jexp(t)
    # (sin t e^t)' = (sin t + cos t) e^t ; '' = 2 cos t e^t
    e = math.exp(1.7)
    assert prod.d1 == pytest.approx((math.sin(1.7) + math.cos(1.7)) * e, rel=1e-13)
    assert prod.d2 == pytest.approx(2 * math.cos(1.7) * e, rel=1e-13)

    quot = jsin(t) / jcosh(t)
    h = 1e-5

    def f(x):
        return math.sin(x) / math.cosh(x)

    assert quot.d1 == pytest.approx((f(1.7 + h) - f(1.7 - h)) / (2 * h), rel=1e-8)


def test_integer_power_fast_path_handles_negative_base():
    t = Jet2(-2.0, 1.0, 0.0)
    cubed = jpow(t, 3)
    assert cubed.f == -8.0
    assert cubed.d1 == 12.0
    assert cubed.d2 == -12.0


def test_fractional_power_requires_positive_base():
    assert jpow(Jet2(4.0, 1.0, 0.0), 0.5).f == pytest.approx(2.0)
    with pytest.raises(DomainError):
        jpow(Jet2(-4.0, 1.0, 0.0), 0.5)


def test_domain_errors():
    with pytest.raises(DomainError):
        jlog(Jet2(-1.0))
    with pytest.raises(DomainError):
        jsqrt(Jet2(0.0))
    with pytest.raises(DomainError):
        Jet2(1.0) / Jet2(0.0)
    with pytest.raises(DomainError):
        jexp(Jet2(1e9))


def test_scalar_coercion():
    t = Jet2(3.0, 1.0, 0.0)
    assert (2 + t).f == 5.0
    assert (2 * t).d1 == 2.0
    assert (1 / t).f == pytest.approx(1 / 3)
    assert (t - 1).f == 2.0
