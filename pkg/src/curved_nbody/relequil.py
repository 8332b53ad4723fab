"""Relative equilibria: rigid orbits generated from central configurations.

Every central configuration spawns a one-parameter family of relative
equilibria: on the sphere the double rotations A_{alpha,beta} with
beta^2 - alpha^2 = 2 lambda, on the hyperbolic side the rotation-boosts
B_{alpha,beta} with alpha^2 + beta^2 = -2 lambda.  Special (gradient-free)
configurations admit beta^2 = alpha^2 members, or any rates at all when
every body also sits on the axes.  The five resulting motion types are the
standard positive elliptic / elliptic-elliptic and negative elliptic /
hyperbolic / elliptic-hyperbolic ones.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    InadmissibleBetaError,
    NotACentralConfigError,
    SingularEncounterError,
    SingularPairError,
)
from .manifold import GeneratorKind, IsometryGenerator, Space, project_tangent
from .dynamics import (
    _OMEGA_PAIRS,
    _potential_raw,
    _project_rows,
    _rhs_raw,
    Configuration,
    generator_momenta,
    grad_U,
)
from .inertia import grad_I, _r2_rho2
from .centralconfig import CCReport, cc_residual


class REConstraint(enum.Enum):
    # ordinary CC on S3: beta^2 - alpha^2 = 2 lambda
    FIXED_DIFFERENCE = "beta_sq_minus_alpha_sq_eq_2lambda"
    # ordinary CC on H3: alpha^2 + beta^2 = -2 lambda
    FIXED_SUM = "alpha_sq_plus_beta_sq_eq_minus_2lambda"
    # special CC with some body off the axes: beta^2 = alpha^2
    EQUAL_MAGNITUDE = "beta_sq_eq_alpha_sq"
    # special CC with every body on the axes: any rates work
    FREE = "unconstrained"


@dataclass(eq=False)
class REFamily:
    space: Space
    lam: float
    constraint: REConstraint
    config: Configuration
    report: CCReport | None = None


@dataclass(eq=False)
class REInstance:
    config: Configuration
    generator: IsometryGenerator
    classification: str | None
    lam: float
    periodic: bool | None

    @property
    def alpha(self) -> float:
        return self.generator.alpha

    @property
    def beta(self) -> float:
        return self.generator.beta

    def to_json_dict(self, include_base: bool = False) -> dict:
        out = {
            "alpha": float(self.alpha),
            "beta": float(self.beta),
            "type": self.classification,
            "lambda": float(self.lam),
            "periodic": self.periodic,
        }
        if include_base:
            from .centralconfig import make_report

            out["base"] = make_report(self.config, self.lam).to_json_dict()
        return out


def re_family_from_cc(
    report: CCReport, config: Configuration, tol: float = 1e-8
) -> REFamily:
    """Derive the admissible rate constraint from a verified CC.

    Raises NotACentralConfig when the residual at report.lam exceeds tol,
    or when a claimed hyperbolic CC has lambda >= 0 or claims to be special
    (neither can happen for true hyperbolic CCs).
    """
    _, rmax = cc_residual(config, report.lam)
    if rmax >= tol:
        raise NotACentralConfigError(
            f"residual {rmax:.3e} at lambda = {report.lam} exceeds {tol}"
        )
    if config.space is Space.H3 and (report.is_special or report.lam >= 0.0):
        raise NotACentralConfigError(
            "hyperbolic central configurations always have lambda < 0"
        )
    if report.is_special:
        gi = float(np.max(np.linalg.norm(grad_I(config), axis=1)))
        constraint = REConstraint.FREE if gi < tol else REConstraint.EQUAL_MAGNITUDE
        lam = 0.0
    elif config.space is Space.S3:
        constraint, lam = REConstraint.FIXED_DIFFERENCE, report.lam
    else:
        constraint, lam = REConstraint.FIXED_SUM, report.lam
    return REFamily(config.space, lam, constraint, config, report)


def _rational_sqrt(v: Fraction):
    if v < 0:
        return None
    rn, rd = math.isqrt(v.numerator), math.isqrt(v.denominator)
    if rn * rn == v.numerator and rd * rd == v.denominator:
        return Fraction(rn, rd)
    return None


def _classify_rates(space: Space, alpha: float, beta: float) -> str | None:
    if alpha == 0.0 and beta == 0.0:
        return None
    if space is Space.S3:
        return "positive elliptic-elliptic" if alpha and beta else "positive elliptic"
    if alpha and beta:
        return "negative elliptic-hyperbolic"
    return "negative elliptic" if alpha else "negative hyperbolic"


def pick_member(family: REFamily, beta, alpha=None) -> REInstance:
    """Resolve one member of the family from its free rate beta.

    alpha is derived from the constraint (nonnegative by convention); the
    extra alpha argument applies only to unconstrained families.  The
    periodic flag is decided exactly when the inputs allow it: rationality
    of alpha/beta is checked with exact arithmetic when beta is supplied as
    an int or Fraction (the stored lambda is interpreted exactly as stored),
    boosts are never periodic, single rotations and fixed points always
    are; otherwise the flag is None.
    """
    exact_beta = isinstance(beta, (int, Fraction)) and not isinstance(beta, bool)
    b = float(beta)
    lam = family.lam
    periodic: bool | None = None
    if family.constraint is REConstraint.FIXED_DIFFERENCE:
        a_sq = b * b - 2.0 * lam
        if a_sq < -1e-15:
            raise InadmissibleBetaError(
                f"beta^2 = {b * b} is below 2*lambda = {2 * lam}"
            )
        a = math.sqrt(max(0.0, a_sq))
        if exact_beta:
            r = _rational_sqrt(Fraction(beta) ** 2 - 2 * Fraction(lam))
            periodic = r is not None if (a and b) else True
    elif family.constraint is REConstraint.FIXED_SUM:
        a_sq = -2.0 * lam - b * b
        if a_sq < -1e-15:
            raise InadmissibleBetaError(
                f"beta^2 = {b * b} exceeds -2*lambda = {-2 * lam}"
            )
        a = math.sqrt(max(0.0, a_sq))
    elif family.constraint is REConstraint.EQUAL_MAGNITUDE:
        a = abs(b)
        periodic = True if b else None
    else:  # FREE
        a = abs(float(alpha)) if alpha is not None else 0.0
        exact_alpha = isinstance(alpha, (int, Fraction)) and not isinstance(alpha, bool)
        if (exact_beta or beta == 0) and (exact_alpha or not a):
            periodic = True  # rational ratio (or a pure/zero rotation)
    if family.space is Space.S3:
        gen = IsometryGenerator(GeneratorKind.DOUBLE_ROTATION, a, b)
        if a == 0.0 or b == 0.0:
            periodic = True
    else:
        gen = IsometryGenerator(GeneratorKind.ROTATION_BOOST, a, b)
        periodic = b == 0.0  # any boost component is unbounded
    return REInstance(
        config=family.config,
        generator=gen,
        classification=_classify_rates(family.space, a, b),
        lam=lam,
        periodic=periodic,
    )


def re_criterion_residual(
    config: Configuration, alpha: float, beta: float
) -> np.ndarray:
    """Rows of the direct rigid-orbit criterion, one 4-vector per body.

    Sphere:      grad_i U - m_i (beta^2 - alpha^2) (x rho^2, y rho^2, -z r^2, -w r^2)
    Hyperbolic:  grad_i U + m_i (alpha^2 + beta^2) (x rho^2, y rho^2,  z r^2,  w r^2)

    with r^2 = x^2 + y^2 and rho^2 = sigma z^2 + w^2.  All rows vanish iff
    rigid motion at rates (alpha, beta) solves the equations of motion.
    """
    Q = config.points
    m = config.masses
    r2, rho2 = _r2_rho2(config.space, Q)
    block = np.empty_like(Q)
    block[:, 0] = Q[:, 0] * rho2
    block[:, 1] = Q[:, 1] * rho2
    if config.space is Space.S3:
        block[:, 2] = -Q[:, 2] * r2
        block[:, 3] = -Q[:, 3] * r2
        coeff = m * (beta * beta - alpha * alpha)
    else:
        block[:, 2] = Q[:, 2] * r2
        block[:, 3] = Q[:, 3] * r2
        coeff = -m * (alpha * alpha + beta * beta)
    return grad_U(config) - coeff[:, None] * block


def _comoving_frame(generator: IsometryGenerator, t) -> np.ndarray:
    """exp(xi t) in extended precision.

    Boost entries grow like e^{|beta| t}, and float64 rounding of cosh/sinh
    feeds straight into the reconstructed momenta, so the frame has to carry
    more precision than the state it multiplies.
    """
    ld = np.longdouble
    a = ld(generator.alpha) * ld(t)
    R = np.eye(4, dtype=ld)
    R[0, 0] = np.cos(a)
    R[0, 1] = -np.sin(a)
    R[1, 0] = np.sin(a)
    R[1, 1] = np.cos(a)
    if generator.kind is GeneratorKind.PARABOLIC:
        u = ld(generator.eta) * ld(t)
        R[1, 2] = -u
        R[1, 3] = u
        R[2, 1] = u
        R[2, 2] = 1.0 - u * u / 2.0
        R[2, 3] = u * u / 2.0
        R[3, 1] = u
        R[3, 2] = -u * u / 2.0
        R[3, 3] = 1.0 + u * u / 2.0
        return R
    b = ld(generator.beta) * ld(t)
    if generator.kind is GeneratorKind.ROTATION_BOOST:
        R[2, 2] = np.cosh(b)
        R[2, 3] = np.sinh(b)
        R[3, 2] = np.sinh(b)
        R[3, 3] = np.cosh(b)
    else:
        R[2, 2] = np.cos(b)
        R[2, 3] = -np.sin(b)
        R[3, 2] = np.sin(b)
        R[3, 3] = np.cos(b)
    return R


def _conserved_ambient(space: Space, m, Y, Z, R) -> np.ndarray:
    """Energy + six omegas of the ambient state (Y R^T, Z R^T).

    Evaluated in extended precision: at large boost rapidity the omega
    products cancel huge coordinates down to O(1) values, which float64
    cannot do below the certification tolerances.
    """
    Q = Y.astype(np.longdouble) @ R.T
    P = Z.astype(np.longdouble) @ R.T
    met = space.metric_diagonal.astype(np.longdouble)
    ml = m.astype(np.longdouble)
    kin = 0.5 * np.sum(np.sum(P * P * met, axis=1) / ml)
    vals = [kin - _potential_raw(space, ml, Q)]
    vals.extend(
        np.sum(P[:, a] * Q[:, b] - Q[:, a] * P[:, b]) for _, a, b in _OMEGA_PAIRS
    )
    return np.array([float(v) for v in vals])


def certify_rigidity(instance: REInstance, horizon: float = 10.0, dt: float = 1e-3):
    """Integrate the instance and measure how rigid the orbit stays.

    Momenta start as m_i (xi q_i).  Integration runs in the frame co-moving
    with the generator: the substitution q = exp(t xi) y leaves the equations
    of motion unchanged (the force law is equivariant under isometries) and
    turns a rigid orbit into a fixed point, so the reported numbers measure
    failure of rigidity rather than integrator error accumulated along an
    unbounded group orbit.  Mutual distances are isometry-invariant and are
    read off the co-moving state directly.

    Returns (max_distance_drift, conserved_drift): the largest
    |d_ij(t) - d_ij(0)| over steps and pairs, and the largest drift among
    energy and the six omegas of the reconstructed ambient states.
    """
    cfg = instance.config
    space = cfg.space
    m = cfg.masses
    met = space.metric_diagonal
    xiT = np.ascontiguousarray(instance.generator.matrix_log().T)
    Y = cfg.points.copy()
    Z = generator_momenta(cfg, instance.generator)
    steps = max(1, round(horizon / dt))
    stride = max(1, steps // 100)

    iu = np.triu_indices(cfg.n, 1)

    def distances(Y):
        s = space.sigma * ((Y * met) @ Y.T)[iu]
        if space is Space.S3:
            return np.arccos(np.clip(s, -1.0, 1.0))
        return np.arccosh(np.maximum(s, 1.0))

    def rhs(Y, Z):
        dY, dZ = _rhs_raw(space, m, Y, Z)
        return dY - Y @ xiT, dZ - Z @ xiT

    d0 = distances(Y)
    c0 = _conserved_ambient(space, m, Y, Z, _comoving_frame(instance.generator, 0.0))
    drift = 0.0
    cons = 0.0
    try:
        for k in range(1, steps + 1):
            k1y, k1z = rhs(Y, Z)
            k2y, k2z = rhs(Y + 0.5 * dt * k1y, Z + 0.5 * dt * k1z)
            k3y, k3z = rhs(Y + 0.5 * dt * k2y, Z + 0.5 * dt * k2z)
            k4y, k4z = rhs(Y + dt * k3y, Z + dt * k3z)
            Y = Y + (dt / 6.0) * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
            Z = Z + (dt / 6.0) * (k1z + 2.0 * k2z + 2.0 * k3z + k4z)
            Y = _project_rows(space, Y)
            Z = project_tangent(Y, Z, space)
            if len(d0):
                drift = max(drift, float(np.max(np.abs(distances(Y) - d0))))
            if k % stride == 0 or k == steps:
                ck = _conserved_ambient(
                    space, m, Y, Z, _comoving_frame(instance.generator, k * dt)
                )
                cons = max(cons, float(np.max(np.abs(ck - c0))))
    except SingularPairError as exc:
        raise SingularEncounterError(str(exc)) from exc
    return drift, cons
