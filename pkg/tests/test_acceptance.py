"""Acceptance gate: one pass/fail check per shipped guarantee, at fixed tolerances."""

import math

import numpy as np
import pytest

from curved_nbody import (
    Configuration,
    LevelSetSpec,
    Space,
    canonicalize,
    cc_residual,
    certify_rigidity,
    criterion_residual,
    enumerate_geodesic_h,
    equivalent,
    find_cc,
    force_function,
    grad_I,
    grad_U,
    lambda_estimate,
    make_report,
    moment_of_inertia,
    orthogonality_relations,
    pick_member,
    re_criterion_residual,
    re_family_from_cc,
    solve_geodesic_h,
    solve_two_body_s,
    swap_xy_zw,
)
from curved_nbody.errors import CurvedNBodyError, DegenerateDenominatorError
from curved_nbody.inertia import axis_distance_identity, locked_inertia
from curved_nbody.manifold import GeneratorKind, IsometryGenerator, isometry_matrix
from curved_nbody.fixtures import FIXTURE_BUILDERS, default_fixtures

from helpers import geodesic_shift, random_config, tangent_basis


def _rates_from_multiplier(space, lam):
    """The rigid-motion rates equivalent to a multiplier value, when any."""
    if lam <= 0.0:
        return math.sqrt(-2.0 * lam), 0.0
    if space is Space.S3:
        return 0.0, math.sqrt(2.0 * lam)
    return None  # positive multipliers have no hyperbolic realization


def test_criterion_01_named_example_multipliers():
    ex1 = FIXTURE_BUILDERS["example1_s3"]()
    ex2 = FIXTURE_BUILDERS["example2_h3"]()
    assert abs(lambda_estimate(ex1.config) - (-0.5)) < 1e-10
    assert abs(lambda_estimate(ex2.config) - (-0.5)) < 1e-10
    eq = FIXTURE_BUILDERS["geodesic_s1_equilateral"](2.0, 1.0, 3.0, math.pi / 4.0)
    assert abs(lambda_estimate(eq.config) - (-8.0 / 3.0)) < 1e-10
    print("PASS 1: multipliers -1/2 (sphere), -1/2 (hyperbolic), -8/3 (equilateral)")


def test_criterion_02_closed_form_multiplier_grids():
    for r in np.linspace(0.05, 0.95, 20):
        got = lambda_estimate(FIXTURE_BUILDERS["lagrangian_s2"](1.0, r).config)
        want = -1.0 / (2.0 * math.sqrt(3.0) * r**3 * (1.0 - 0.75 * r * r) ** 1.5)
        assert abs(got - want) < 1e-9 * max(1.0, abs(want))
    for r in np.linspace(0.1, 2.0, 20):
        got = lambda_estimate(FIXTURE_BUILDERS["lagrangian_h2"](1.0, r).config)
        want = -1.0 / (2.0 * math.sqrt(3.0) * r**3 * (1.0 + 0.75 * r * r) ** 1.5)
        assert abs(got - want) < 1e-9 * max(1.0, abs(want))
    for r in np.linspace(0.1, 2.0, 20):
        got = lambda_estimate(FIXTURE_BUILDERS["geodesic_h1"](1.0, r).config)
        w = math.sqrt(1.0 + r * r)
        want = -(1.0 / (2.0 * r**3)) * (1.0 / w + 1.0 / (4.0 * w**3))
        assert abs(got - want) < 1e-9 * max(1.0, abs(want))
    # sign pattern of the isosceles geodesic family against its height
    lam = lambda z: lambda_estimate(
        FIXTURE_BUILDERS["geodesic_s1_isosceles"](1.0, z).config)
    for z in (-0.95, -0.75, -0.6):
        assert lam(z) > 0.0
    assert abs(lam(-0.5)) < 1e-9
    for z in (-0.4, -0.1, 0.3, 0.8):
        assert lam(z) < 0.0
    print("PASS 2: 20-point multiplier grids within 1e-9 plus the sign pattern")


def test_criterion_03_gradient_free_solutions():
    rng = np.random.default_rng(303)
    worst = 0.0
    for _ in range(3):
        while True:
            a, b = rng.uniform(0.2, math.pi - 0.2, size=2)
            if math.pi + 0.1 < a + b < 2.0 * math.pi - 0.1:
                break
        cfg = FIXTURE_BUILDERS["acute_triangle_s1"](a, b).config
        worst = max(worst, float(np.max(np.linalg.norm(grad_U(cfg), axis=1))))
    for name in ("tetrahedron_s2", "pentatope_s3", "double_triangle_s3"):
        cfg = FIXTURE_BUILDERS[name](1.0).config
        worst = max(worst, float(np.max(np.linalg.norm(grad_U(cfg), axis=1))))
    assert worst < 1e-11
    print(f"PASS 3: gradient-free solutions, max |grad U| = {worst:.2e} < 1e-11")


def test_criterion_04_rigidity_of_five_reference_orbits():
    ex1 = FIXTURE_BUILDERS["example1_s3"]().config
    ex2 = FIXTURE_BUILDERS["example2_h3"]().config
    fam1 = re_family_from_cc(make_report(ex1), ex1)
    fam2 = re_family_from_cc(make_report(ex2), ex2)
    members = [
        pick_member(fam1, 0),                      # rates (1, 0)
        pick_member(fam1, 1),                      # rates (sqrt 2, 1)
        pick_member(fam2, 0),                      # rates (1, 0)
        pick_member(fam2, 1),                      # rates (0, 1)
        pick_member(fam2, math.sqrt(3.0) / 2.0),   # rates (1/2, sqrt3/2)
    ]
    for inst in members:
        drift, cons = certify_rigidity(inst, horizon=10.0, dt=1e-3)
        assert drift < 1e-6, (inst.alpha, inst.beta, drift)
        assert cons < 1e-8, (inst.alpha, inst.beta, cons)
    print("PASS 4: five reference orbits stay rigid over T=10 (drift < 1e-6, "
          "conserved < 1e-8)")


def test_criterion_05_three_residual_forms_agree():
    tol = 1e-8
    rng = np.random.default_rng(505)

    def verdicts(cfg, lam):
        out = [cc_residual(cfg, lam)[1] < tol,
               float(np.max(np.abs(criterion_residual(cfg, lam)))) < tol]
        rates = _rates_from_multiplier(cfg.space, lam)
        if rates is not None:
            res = re_criterion_residual(cfg, *rates)
            out.append(float(np.max(np.linalg.norm(res, axis=1))) < tol)
        return out

    for space in (Space.S3, Space.H3):
        for _ in range(100):
            cfg = random_config(space, int(rng.integers(2, 6)), rng)
            try:
                lam = lambda_estimate(cfg)
            except DegenerateDenominatorError:
                lam = 0.0
            v = verdicts(cfg, lam)
            assert len(set(v)) == 1, (space, v)
    for fix in default_fixtures():
        lam = 0.0 if fix.expected_lambda is None else fix.expected_lambda
        v = verdicts(fix.config, lam)
        assert len(set(v)) == 1 and v[0], (fix.name, v)
    print("PASS 5: residual, scalar-criterion, and rigid-rate verdicts agree on "
          "200 random configurations and the full catalog")


def test_criterion_06_gradients_match_geodesic_finite_differences():
    h = 1e-6
    rng = np.random.default_rng(606)
    for space in (Space.S3, Space.H3):
        for _ in range(50):
            cfg = random_config(space, 3, rng)
            for field, value in ((grad_U, force_function),
                                 (grad_I, moment_of_inertia)):
                g = field(cfg)
                scale = max(1.0, float(np.max(np.abs(g))))
                for i in range(cfg.n):
                    for b in tangent_basis(cfg.points[i], space):
                        up = geodesic_shift(cfg, i, b, h, space)
                        dn = geodesic_shift(cfg, i, b, -h, space)
                        fd = (value(up) - value(dn)) / (2.0 * h)
                        want = float(np.sum(g[i] * b * space.metric_diagonal))
                        assert abs(fd - want) / scale < 1e-6
            # axis-distance identity for the moment of inertia
            direct, from_distances = axis_distance_identity(cfg)
            assert abs(direct - from_distances) < 1e-12 * max(1.0, abs(direct))
            # per-body locked values against the generator quadratic form
            alpha, beta = rng.uniform(0.3, 1.5, size=2)
            kind = (GeneratorKind.DOUBLE_ROTATION if space is Space.S3
                    else GeneratorKind.ROTATION_BOOST)
            xi = IsometryGenerator(kind, alpha=alpha, beta=beta).matrix_log()
            vel = cfg.points @ xi.T
            quad = float(np.sum(cfg.masses * np.sum(
                vel * vel * space.metric_diagonal, axis=1)))
            total = sum(locked_inertia(q, m, alpha, beta, space)
                        for q, m in zip(cfg.points, cfg.masses))
            assert abs(total - quad / (alpha**2 + beta**2)) < 1e-12 * max(1.0, abs(total))
    print("PASS 6: gradients match geodesic finite differences (rel 1e-6); "
          "inertia identities hold to 1e-12")


def test_criterion_07_hyperbolic_geodesic_counting():
    rng = np.random.default_rng(707)
    for n in (2, 3, 4):
        masses = rng.uniform(0.5, 2.0, size=n)
        sols = enumerate_geodesic_h(masses, 1.0)
        assert len(sols) == math.factorial(n) // 2
        for s in sols:
            assert s.min_hessian_eig > 0.0
            t, m = s.config.thetas, s.config.masses
            assert abs(float(np.sum(m * np.sinh(2.0 * t)))) < 1e-10
    # restart stability: twenty seeds agree on the same ordering's solution
    masses = rng.uniform(0.5, 2.0, size=3)
    ref = solve_geodesic_h(masses, 1.0, ordering=[0, 1, 2],
                           rng=np.random.default_rng(0)).thetas
    for k in range(1, 20):
        t = solve_geodesic_h(masses, 1.0, ordering=[0, 1, 2],
                             rng=np.random.default_rng(k)).thetas
        assert float(np.max(np.abs(t - ref))) < 1e-8
    print("PASS 7: n!/2 ordering classes with positive-definite reduced Hessians, "
          "balance to 1e-10, 20-seed restarts within 1e-8")


def test_criterion_08_two_body_circle_counts():
    # unequal masses: two solutions either side of the dead window
    for c, count in ((0.5, 2), (1.5, 0), (2.5, 2)):
        res = solve_two_body_s(1.0, 2.0, c)
        assert res.count == count
        for sol in res.solutions:
            assert abs(sol.balance_residual()) < 1e-12
            assert abs(sol.inertia() - c) < 1e-12 * max(1.0, c)
    # equal masses: the midpoint level degenerates into a continuum
    assert solve_two_body_s(1.0, 1.0, 0.5).count == 2
    res = solve_two_body_s(1.0, 1.0, 1.0)
    assert res.count == math.inf
    member = res.family.member(0.4)
    cfg = member.to_configuration()
    from curved_nbody import pairwise_distances

    assert abs(pairwise_distances(cfg)[0, 1] - math.pi / 2.0) < 1e-12
    assert abs(force_function(cfg)) < 1e-12
    assert solve_two_body_s(1.0, 1.0, 1.5).count == 2
    print("PASS 8: circle-pair counts 2/0/2 and 2/continuum/2 with closed forms "
          "satisfied to 1e-12")


def test_criterion_09_orthogonality_relations():
    for fix in default_fixtures():
        if fix.is_special:
            continue
        assert max(abs(v) for v in orthogonality_relations(fix.config)) < 1e-10
    searches = [
        find_cc([1.0, 1.0, 1.0], Space.S3, LevelSetSpec(0.4),
                rng=np.random.default_rng(9)),
        find_cc([1.0, 2.0], Space.H3, LevelSetSpec(1.0),
                rng=np.random.default_rng(9)),
    ]
    for cfg, _ in searches:
        assert max(abs(v) for v in orthogonality_relations(cfg)) < 1e-10
    # a perturbed witness violates the relations loudly
    base = FIXTURE_BUILDERS["lagrangian_s2"](1.0, 0.5).config
    Q = base.points.copy()
    Q[0, 0] += 0.05
    witness = Configuration.from_raw(Space.S3, base.masses, Q)
    assert max(abs(v) for v in orthogonality_relations(witness)) > 1e-3
    print("PASS 9: mixed first moments < 1e-10 on solutions, > 1e-3 on the witness")


def test_criterion_10_search_succeeds_across_levels():
    rng = np.random.default_rng(1010)

    def search(masses, space, c):
        last = None
        for k in range(5):
            try:
                cfg, report = find_cc(masses, space, LevelSetSpec(c),
                                      rng=np.random.default_rng(k))
                assert report.residual_max < 1e-8
                return cfg
            except CurvedNBodyError as exc:
                last = exc
        raise last

    for space in (Space.S3, Space.H3):
        for _ in range(5):
            masses = rng.uniform(0.5, 2.0, size=3)
            total = float(np.sum(masses))
            if space is Space.S3:
                levels = [0.23 * total, 0.41 * total, 0.57 * total]
            else:
                levels = [0.5, 1.2, 2.5]
            found = [search(masses, space, c) for c in levels]
            for i in range(3):
                for j in range(i + 1, 3):
                    assert not equivalent(found[i], found[j])
    print("PASS 10: searches succeed for 5 random mass vectors per geometry at "
          "3 levels each, pairwise inequivalent")


def test_criterion_11_symmetry_behaviour_of_the_reductions():
    rng = np.random.default_rng(1111)
    for space in (Space.S3, Space.H3):
        kind = (GeneratorKind.DOUBLE_ROTATION if space is Space.S3
                else GeneratorKind.ROTATION_BOOST)
        met = space.metric_diagonal
        for _ in range(5):
            cfg = random_config(space, 4, rng)
            lam = lambda_estimate(cfg)
            rows0, _ = cc_residual(cfg, lam)
            A = isometry_matrix(IsometryGenerator(kind, 1.0, 0.63), 0.9)
            moved = cfg.with_points(cfg.points @ A.T)
            rows1, _ = cc_residual(moved, lam)
            # residual rows transform covariantly, so their sigma-metric norms
            # are the frame-independent comparison (boosts stretch Euclidean ones)
            n0 = np.sum(rows0 * rows0 * met, axis=1)
            n1 = np.sum(rows1 * rows1 * met, axis=1)
            scale = max(1.0, float(np.max(np.abs(n0))))
            assert float(np.max(np.abs(n1 - n0))) < 1e-10 * scale
            c0 = criterion_residual(cfg, lam)
            c1 = criterion_residual(moved, lam)
            assert float(np.max(np.abs(c1 - c0))) < 1e-10 * max(
                1.0, float(np.max(np.abs(c0)))
            )
            # canonical form is a projection: applying it twice changes nothing
            c1, _ = canonicalize(cfg)
            c2, _ = canonicalize(c1)
            assert float(np.max(np.abs(c1.points - c2.points))) < 1e-10
    # the plane swap flips the sign of the multiplier
    fix = FIXTURE_BUILDERS["lagrangian_s2"](1.0, 0.5)
    swapped = swap_xy_zw(fix.config)
    assert abs(lambda_estimate(swapped) + fix.expected_lambda) < 1e-10
    print("PASS 11: residuals are block-rotation invariant, the plane swap "
          "negates the multiplier, canonical form is idempotent")
