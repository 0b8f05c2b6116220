import math

import pytest

from cvlab.model import AnalyticCore, PolarCap, euler_char, validate_surface
from cvlab.quadrature import Tolerance
from cvlab.sweep import compute_sample, detect_h1
from cvlab.zoo import (
    InvalidParameter,
    MeridianArcProfile,
    all_entries,
    make_capped_cone,
    paraboloid_radius_oracle,
    zoo_entry,
    zoo_names,
)

TWO_PI = 2.0 * math.pi
HEIGHTS = [0.25 * (k + 1) for k in range(32)]


def test_zoo_roster():
    assert zoo_names() == (
        "flat-cylinder",
        "polar-plane",
        "paraboloid",
        "capped-cone",
        "catenoid",
        "cusp-cap",
    )


def test_unknown_name_raises():
    with pytest.raises(KeyError):
        zoo_entry("klein-bottle")


@pytest.mark.parametrize("name", zoo_names())
def test_oracle_self_consistency(name):
    # the closed forms must satisfy the truncated closed-surface count
    # identically in h
    entry = zoo_entry(name)
    oracle = entry.oracle
    assert oracle.chi == euler_char(entry.model.topology)
    for h in HEIGHTS:
        residual = abs(TWO_PI * oracle.chi - oracle.c_trunc(h) - oracle.lam(h))
        assert residual < 1e-10, (name, h, residual)


@pytest.mark.parametrize("name", zoo_names())
def test_computed_quantities_match_oracles(name):
    entry = zoo_entry(name)
    oracle = entry.oracle
    tol = Tolerance()
    for h in (0.5, 1.0, 2.0, 4.0, 8.0, 16.0):
        sample = compute_sample(entry.model, h, tol)
        for got, want, label in (
            (sample.mu, oracle.mu(h), "mu"),
            (sample.lam, oracle.lam(h), "lambda"),
            (sample.c_trunc, oracle.c_trunc(h), "c_trunc"),
        ):
            assert abs(got - want) <= max(1e-6, 1e-6 * abs(want)), (
                name,
                h,
                label,
                got,
                want,
            )


@pytest.mark.parametrize("name", zoo_names())
def test_hypothesis_flag_agrees_with_detection(name):
    entry = zoo_entry(name)
    h1 = detect_h1(entry.model, h_probe_max=64.0)
    assert (h1 is not None) == entry.oracle.hypothesis_holds, (name, h1)


def test_flat_cylinder_entry():
    entry = zoo_entry("flat-cylinder")
    assert entry.oracle.chi == 0
    assert entry.oracle.lam(7.0) == 0.0
    assert entry.oracle.mu(3.0) == pytest.approx(2 * TWO_PI)
    # equality case of the curvature bound
    assert TWO_PI * entry.oracle.chi - entry.oracle.c_total == pytest.approx(0.0)


def test_polar_plane_entry():
    entry = zoo_entry("polar-plane")
    for h in (0.5, 1.0, 9.0):
        assert entry.oracle.lam(h) == pytest.approx(TWO_PI)
    assert entry.oracle.L == pytest.approx(TWO_PI)
    assert TWO_PI * entry.oracle.chi - entry.oracle.L == pytest.approx(
        entry.oracle.c_total
    )
    assert entry.oracle.c_total == pytest.approx(0.0)


def test_paraboloid_entry():
    entry = zoo_entry("paraboloid")
    assert entry.oracle.c_total == pytest.approx(TWO_PI)
    # boundary turning angle when the parallel radius reaches 1:
    # cos(slope angle) = 1/sqrt(2)
    h_at_radius_one = 0.5 * (math.sqrt(2.0) + math.asinh(1.0))
    assert entry.oracle.lam(h_at_radius_one) == pytest.approx(
        TWO_PI / math.sqrt(2.0), rel=1e-10
    )
    assert entry.oracle.gauss_K(3.0, 0.0) > 0.0
    # L vanishes: the boundary turning dies off like 1/r
    assert entry.oracle.lam(50.0) < 0.7
    assert entry.oracle.L == 0.0


def test_paraboloid_profile_matches_closed_form_inverse():
    profile = MeridianArcProfile(
        slope=lambda r: 1.0 / math.sqrt(1.0 + r * r),
        dslope_dr=lambda r: -r * (1.0 + r * r) ** -1.5,
    )
    for t in (0.3, 1.0, 4.0, 37.0, 512.0, 10000.0):
        assert profile.radius(t) == pytest.approx(
            paraboloid_radius_oracle(t), rel=1e-10
        )
    r, r1, r2 = profile.jets(2.0)
    assert r1 == pytest.approx(1.0 / math.sqrt(1.0 + r * r), rel=1e-12)
    assert r2 == pytest.approx(-r / (1.0 + r * r) ** 2, rel=1e-10)


class TestCappedCone:
    def test_slant_validation(self):
        with pytest.raises(InvalidParameter):
            make_capped_cone(0.0)
        with pytest.raises(InvalidParameter):
            make_capped_cone(1.0)
        with pytest.raises(InvalidParameter):
            make_capped_cone(-0.3)

    def test_half_slant_oracle(self):
        entry = make_capped_cone(0.5)
        assert entry.oracle.c_total == pytest.approx(math.pi)
        assert entry.oracle.L == pytest.approx(math.pi)
        # strict-inequality margin equals pi
        assert TWO_PI * entry.oracle.chi - entry.oracle.c_total == pytest.approx(
            math.pi
        )

    def test_lambda_constant_beyond_cap(self):
        entry = make_capped_cone(0.5)
        values = [entry.oracle.lam(h) for h in (11.0, 20.0, 45.0)]
        assert max(values) - min(values) < 1e-10
        sample = compute_sample(entry.model, 12.0)
        assert abs(sample.lam - math.pi) < 1e-10

    def test_flat_plane_degeneration(self):
        entry = make_capped_cone(0.999)
        assert entry.oracle.c_total == pytest.approx(TWO_PI * 0.001, rel=1e-9)

    def test_cap_curvature_nonnegative(self):
        entry = make_capped_cone(0.5)
        ks = [entry.oracle.gauss_K(t, 0.0) for t in (0.01, 0.5, 3.0, 9.0, 15.0)]
        assert all(k >= 0.0 for k in ks)
        assert max(ks) > 0.0


def test_catenoid_entry():
    entry = zoo_entry("catenoid")
    assert entry.oracle.chi == 0
    assert entry.oracle.c_total == pytest.approx(-2 * TWO_PI)
    assert not entry.oracle.hypothesis_holds
    # lambda increases toward its limit: the nonincreasing control fails
    assert entry.oracle.lam(2.0) > entry.oracle.lam(1.0)


def test_cusp_cap_entry():
    entry = zoo_entry("cusp-cap")
    assert entry.oracle.chi == 1
    for h in (0.5, 1.0, 3.0):
        assert entry.oracle.mu(h) == pytest.approx(TWO_PI * math.exp(-h))
        assert entry.oracle.mu(h) > 0.0
        assert entry.oracle.lam(h) == pytest.approx(-TWO_PI * math.exp(-h))
    # strictly increasing lambda
    assert entry.oracle.lam(2.0) > entry.oracle.lam(1.0)
    assert entry.oracle.gauss_K(5.0, 1.0) == -1.0


def test_core_descriptors_match_construction():
    assert isinstance(zoo_entry("polar-plane").model.core, PolarCap)
    assert isinstance(zoo_entry("paraboloid").model.core, PolarCap)
    assert isinstance(zoo_entry("capped-cone").model.core, PolarCap)
    core = zoo_entry("cusp-cap").model.core
    assert isinstance(core, AnalyticCore)
    assert core.total_curvature == pytest.approx(2 * TWO_PI)


def test_entries_validate_cleanly():
    for entry in all_entries():
        assert validate_surface(entry.model, 32).ok
