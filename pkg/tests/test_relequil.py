"""Rate constraints, member selection, and rigidity of relative equilibria."""

import math

import numpy as np
import pytest

from curved_nbody import (
    Configuration,
    GeneratorKind,
    IsometryGenerator,
    REConstraint,
    REInstance,
    Space,
    certify_rigidity,
    make_report,
    pick_member,
    re_criterion_residual,
    re_family_from_cc,
    swap_xy_zw,
)
from curved_nbody.errors import InadmissibleBetaError, NotACentralConfigError
from curved_nbody.fixtures import FIXTURE_BUILDERS

from helpers import random_config


def _family(name, *args):
    cfg = FIXTURE_BUILDERS[name](*args).config
    return re_family_from_cc(make_report(cfg), cfg)


# ─── constraint derivation ───────────────────────────────────────────────


@pytest.mark.parametrize(
    "name,args,expected",
    [
        ("lagrangian_s2", (1.0, 0.5), REConstraint.FIXED_DIFFERENCE),
        ("example1_s3", (), REConstraint.FIXED_DIFFERENCE),
        ("lagrangian_h2", (1.0, 0.8), REConstraint.FIXED_SUM),
        ("example2_h3", (), REConstraint.FIXED_SUM),
        ("tetrahedron_s2", (1.0,), REConstraint.EQUAL_MAGNITUDE),
        ("pentatope_s3", (1.0,), REConstraint.EQUAL_MAGNITUDE),
        ("acute_triangle_s1", (2.1, 2.2), REConstraint.FREE),
        ("double_triangle_s3", (1.0,), REConstraint.FREE),
    ],
)
def test_constraint_kind_per_fixture(name, args, expected):
    fam = _family(name, *args)
    assert fam.constraint is expected
    if expected in (REConstraint.EQUAL_MAGNITUDE, REConstraint.FREE):
        assert fam.lam == 0.0


def test_family_rejects_non_solutions():
    cfg = random_config(Space.S3, 3, np.random.default_rng(2))
    with pytest.raises(NotACentralConfigError):
        re_family_from_cc(make_report(cfg), cfg)


def test_family_rejects_impossible_hyperbolic_claims():
    cfg = FIXTURE_BUILDERS["geodesic_h1"](1.0, 0.7).config
    report = make_report(cfg)
    report.is_special = True  # true hyperbolic solutions are never special
    with pytest.raises(NotACentralConfigError):
        re_family_from_cc(report, cfg)


# ─── member selection ────────────────────────────────────────────────────


def test_pick_member_sphere_rates():
    fam = _family("example1_s3")
    a10 = pick_member(fam, 0)
    assert a10.alpha == pytest.approx(1.0, rel=1e-12)
    assert a10.beta == 0.0
    assert a10.classification == "positive elliptic"
    assert a10.periodic is True

    a_irr = pick_member(fam, 1)
    assert a_irr.alpha == pytest.approx(math.sqrt(2.0), rel=1e-15)
    assert a_irr.classification == "positive elliptic-elliptic"
    assert a_irr.periodic is False  # sqrt(2) : 1 never closes up


def test_pick_member_hyperbolic_rates():
    fam = _family("example2_h3")
    b10 = pick_member(fam, 0)
    assert b10.alpha == pytest.approx(1.0, rel=1e-12)
    assert b10.beta == 0.0
    assert b10.classification == "negative elliptic"
    assert b10.periodic is True

    b01 = pick_member(fam, 1)
    assert b01.alpha == pytest.approx(0.0, abs=2e-8)
    assert b01.beta == 1.0
    assert b01.classification == "negative hyperbolic"
    assert b01.periodic is False

    mixed = pick_member(fam, math.sqrt(3.0) / 2.0)
    assert mixed.alpha == pytest.approx(0.5, rel=1e-12)
    assert mixed.classification == "negative elliptic-hyperbolic"
    assert mixed.periodic is False


def test_pick_member_rejects_out_of_range_rates():
    swapped = swap_xy_zw(FIXTURE_BUILDERS["lagrangian_s2"](1.0, 0.5).config)
    fam = re_family_from_cc(make_report(swapped), swapped)
    assert fam.lam > 0.0
    with pytest.raises(InadmissibleBetaError):
        pick_member(fam, 0.0)  # beta^2 must reach 2 lambda on the sphere
    ok = pick_member(fam, 3.0)
    assert ok.alpha == pytest.approx(math.sqrt(9.0 - 2.0 * fam.lam))

    hfam = _family("geodesic_h1", 1.0, 0.7)
    with pytest.raises(InadmissibleBetaError):
        pick_member(hfam, 2.0)  # beta^2 exceeds -2 lambda


def test_equal_magnitude_members():
    fam = _family("tetrahedron_s2", 1.0)
    inst = pick_member(fam, 0.8)
    assert inst.alpha == inst.beta == 0.8
    assert inst.periodic is True
    res = re_criterion_residual(fam.config, inst.alpha, inst.beta)
    assert float(np.max(np.linalg.norm(res, axis=1))) < 1e-9


def test_free_family_accepts_any_rates():
    fam = _family("acute_triangle_s1", 2.1, 2.2)
    inst = pick_member(fam, 2, alpha=3)
    assert (inst.alpha, inst.beta) == (3.0, 2.0)
    assert inst.periodic is True  # integer rate ratio
    res = re_criterion_residual(fam.config, 3.0, 2.0)
    assert float(np.max(np.linalg.norm(res, axis=1))) < 1e-9


# ─── direct criterion vs. multiplier ─────────────────────────────────────


@pytest.mark.parametrize(
    "name,args",
    [
        ("lagrangian_s2", (1.0, 0.5)),
        ("geodesic_s1_isosceles", (1.0, 0.6)),
        ("lagrangian_h2", (1.0, 0.8)),
        ("geodesic_h1", (1.0, 0.7)),
        ("example1_s3", ()),
        ("example2_h3", ()),
    ],
)
def test_rates_from_multiplier_solve_the_direct_criterion(name, args):
    fix = FIXTURE_BUILDERS[name](*args)
    lam = fix.expected_lambda
    assert lam < 0.0
    alpha, beta = math.sqrt(-2.0 * lam), 0.0
    res = re_criterion_residual(fix.config, alpha, beta)
    assert float(np.max(np.linalg.norm(res, axis=1))) < 1e-9


def test_positive_multiplier_maps_to_pure_second_rotation():
    swapped = swap_xy_zw(FIXTURE_BUILDERS["lagrangian_s2"](1.0, 0.5).config)
    from curved_nbody import lambda_estimate

    lam = lambda_estimate(swapped)
    assert lam > 0.0
    res = re_criterion_residual(swapped, 0.0, math.sqrt(2.0 * lam))
    assert float(np.max(np.linalg.norm(res, axis=1))) < 1e-9


def test_wrong_rates_fail_the_direct_criterion():
    fix = FIXTURE_BUILDERS["lagrangian_s2"](1.0, 0.5)
    res = re_criterion_residual(fix.config, 1.0, 0.0)  # constraint wants beta^2 - alpha^2 = 2 lam
    assert float(np.max(np.linalg.norm(res, axis=1))) > 1e-2


# ─── integration certificates ────────────────────────────────────────────


def test_certified_rigid_orbit():
    fam = _family("example1_s3")
    inst = pick_member(fam, 0)
    drift, cons = certify_rigidity(inst, horizon=1.0, dt=1e-3)
    assert drift < 1e-8
    assert cons < 1e-10


def test_rigidity_certificate_fails_for_wrong_rates():
    fam = _family("example1_s3")
    bad = REInstance(
        config=fam.config,
        generator=IsometryGenerator(GeneratorKind.DOUBLE_ROTATION, 5.0, 0.0),
        classification=None,
        lam=fam.lam,
        periodic=None,
    )
    drift, _ = certify_rigidity(bad, horizon=1.0, dt=1e-3)
    assert drift > 1e-3


def test_instance_json_payload():
    fam = _family("example2_h3")
    inst = pick_member(fam, 0)
    d = inst.to_json_dict()
    assert set(d) == {"alpha", "beta", "type", "lambda", "periodic"}
    full = inst.to_json_dict(include_base=True)
    assert full["base"]["lambda"] == pytest.approx(-0.5, abs=1e-10)
