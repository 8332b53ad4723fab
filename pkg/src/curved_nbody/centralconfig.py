"""Central configurations: residuals, multipliers, classes, and a solver.

A configuration is central when the force function's gradient is parallel
to the gradient of the moment of inertia body by body,

    grad_i U = lambda grad_i I   for all i, one shared lambda,

and special when grad U vanishes outright (possible only on the sphere).
This module evaluates those residuals in several equivalent formulations,
estimates lambda, classifies configurations by the dimension they span,
canonicalizes within the block-isometry equivalence group, and searches
level sets I = c for critical points of U.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateDenominatorError,
    NoConvergenceError,
    OffShellError,
    OutOfRangeError,
    SingularApproachError,
    SingularPairError,
)
from .manifold import Space, inner, project_point, project_tangent
from .dynamics import Configuration, force_function, grad_U
from .inertia import grad_I, moment_of_inertia, _r2_rho2

EPS_FLAT = 1e-9    # rank tolerance in classify
EPS_AXIS = 1e-9    # a body this close to the axes uses the special branch


class CCClass(enum.Enum):
    GEODESIC = "geodesic"
    SPHERE_S2 = "sphere_s2"
    HYPERBOLIC_H2 = "hyperbolic_h2"
    FULL_S3 = "full_s3"
    FULL_H3 = "full_h3"


@dataclass(eq=False)
class CCReport:
    lam: float
    residual_max: float
    is_special: bool
    cc_class: CCClass
    orth: tuple
    I: float
    U: float
    masses: np.ndarray
    points: np.ndarray

    def to_json_dict(self) -> dict:
        return {
            "lambda": float(self.lam),
            "residual_max": float(self.residual_max),
            "is_special": bool(self.is_special),
            "class": self.cc_class.value,
            "orth": [float(v) for v in self.orth],
            "I": float(self.I),
            "U": float(self.U),
            "masses": [float(v) for v in self.masses],
            "points": [[float(c) for c in row] for row in self.points],
        }


@dataclass(frozen=True)
class LevelSetSpec:
    """Target moment-of-inertia level I = c and the solver tolerance."""

    c: float
    tol: float = 1e-10

    def validate(self, space: Space, masses) -> None:
        m = np.asarray(masses, dtype=float)
        if space is Space.H3:
            if self.c <= 0.0:
                raise OutOfRangeError("hyperbolic level sets need c > 0")
            return
        total = float(np.sum(m))
        if not 0.0 < self.c < total:
            raise OutOfRangeError(f"spherical I ranges over (0, {total}); got c = {self.c}")
        # I^-1(c) fails to be a smooth manifold exactly at subset sums of
        # the masses, where bodies can pin to the axes.
        for k in range(1, len(m) + 1):
            for idx in itertools.combinations(range(len(m)), k):
                if abs(self.c - float(np.sum(m[list(idx)]))) < 1e-9:
                    raise OutOfRangeError(
                        f"c = {self.c} is within 1e-9 of mass subset sum over {idx}"
                    )


# ─── residuals and multiplier ────────────────────────────────────────────


def cc_residual(config: Configuration, lam: float):
    """Rows grad_i U - lambda grad_i I and the max Euclidean row norm."""
    R = grad_U(config) - lam * grad_I(config)
    return R, float(np.max(np.linalg.norm(R, axis=1)))


def lambda_estimate(config: Configuration) -> float:
    """The multiplier consistent with the central-configuration equation.

    Ratio-of-sums form: numerator sums m_i m_j [2x_ix_j + 2y_iy_j -
    (r_i^2 + r_j^2) csn d_ij] / sn^3 d_ij over unordered pairs, denominator
    is 2 sum_i m_i r_i^2 rho_i^2.  The denominator vanishing means every
    body sits on the axes, where lambda is undetermined.
    """
    from .dynamics import _gram_checked, _sn_powers

    space, m, Q = config.space, config.masses, config.points
    r2, rho2 = _r2_rho2(space, Q)
    den = 2.0 * float(np.sum(m * r2 * rho2))
    if abs(den) <= 1e-12 * max(1.0, float(np.sum(m))):
        raise DegenerateDenominatorError(
            "all bodies on the axes: multiplier undetermined"
        )
    s = _gram_checked(space, Q)
    _, sn3 = _sn_powers(space, s)
    xy = 2.0 * (np.outer(Q[:, 0], Q[:, 0]) + np.outer(Q[:, 1], Q[:, 1]))
    A = xy - (r2[:, None] + r2[None, :]) * s
    W = np.outer(m, m) / sn3
    np.fill_diagonal(W, 0.0)
    return 0.5 * float(np.sum(W * A)) / den


def is_special_cc(config: Configuration, tol: float = 1e-10) -> bool:
    """True when the force-function gradient vanishes for every body."""
    return float(np.max(np.linalg.norm(grad_U(config), axis=1))) < tol


def criterion_residual(config: Configuration, lam: float) -> np.ndarray:
    """Per-body triple of scalar equations, 3N values in body order.

    Off the axes the triple contracts G_i = grad_i U - lambda grad_i I with
    (x, y, 0, 0), (-y, x, 0, 0) and (0, 0, -w, z): the radial equation in
    force units (the m_i-weighted form) and the two determinant equations.
    A body on the axes (where grad_i I = 0) instead reports three ambient
    components of grad_i U, dropping the one along q_i's largest coordinate.
    """
    space = config.space
    Q = config.points
    G = grad_U(config) - lam * grad_I(config)
    r2, rho2 = _r2_rho2(space, Q)
    on_axes = (
        np.sqrt(r2 * np.abs(rho2)) < EPS_AXIS
        if space is Space.S3
        else np.sqrt(r2) < EPS_AXIS
    )
    out = np.empty(3 * config.n)
    for i in range(config.n):
        x, y, z, w = Q[i]
        if on_axes[i]:
            keep = [k for k in range(4) if k != int(np.argmax(np.abs(Q[i])))]
            out[3 * i : 3 * i + 3] = G[i, keep]
        else:
            out[3 * i] = G[i, 0] * x + G[i, 1] * y
            out[3 * i + 1] = -G[i, 0] * y + G[i, 1] * x
            out[3 * i + 2] = -G[i, 2] * w + G[i, 3] * z
    return out


def orthogonality_relations(config: Configuration):
    """The four mixed first moments (sum m x z, m x w, m y z, m y w).

    All four vanish at every ordinary central configuration; they are cheap
    necessary conditions and useful sanity checks on solver output.
    """
    m, Q = config.masses, config.points
    return (
        float(np.sum(m * Q[:, 0] * Q[:, 2])),
        float(np.sum(m * Q[:, 0] * Q[:, 3])),
        float(np.sum(m * Q[:, 1] * Q[:, 2])),
        float(np.sum(m * Q[:, 1] * Q[:, 3])),
    )


def classify(config: Configuration, eps_flat: float = EPS_FLAT) -> CCClass:
    """Geodesic / great-2-sphere / full, by bilinear Gram rank of positions."""
    Q = config.points
    G = (Q * config.space.metric_diagonal) @ Q.T
    sv = np.linalg.svd(G, compute_uv=False)
    rank = int(np.sum(sv > eps_flat * max(1.0, sv[0])))
    if rank <= 2:
        return CCClass.GEODESIC
    if rank == 3:
        return CCClass.SPHERE_S2 if config.space is Space.S3 else CCClass.HYPERBOLIC_H2
    return CCClass.FULL_S3 if config.space is Space.S3 else CCClass.FULL_H3


def swap_xy_zw(config: Configuration) -> Configuration:
    """The spherical involution (x, y, z, w) -> (z, w, x, y).

    Maps central configurations to central configurations with the negated
    multiplier, and sends I to (sum of masses) - I.
    """
    if config.space is not Space.S3:
        raise ValueError("the plane-swap involution is an isometry of S3 only")
    return config.with_points(config.points[:, [2, 3, 0, 1]])


def make_report(
    config: Configuration, lam: float | None = None, special_tol: float = 1e-10
) -> CCReport:
    """Assemble the standard report; lambda defaults to lambda_estimate
    (zero when the multiplier is undetermined because all bodies sit on
    the axes)."""
    special = is_special_cc(config, special_tol)
    if lam is None:
        try:
            lam = lambda_estimate(config)
        except DegenerateDenominatorError:
            lam = 0.0
    _, rmax = cc_residual(config, lam)
    return CCReport(
        lam=float(lam),
        residual_max=rmax,
        is_special=special,
        cc_class=classify(config),
        orth=orthogonality_relations(config),
        I=moment_of_inertia(config),
        U=force_function(config),
        masses=config.masses,
        points=config.points,
    )


# ─── equivalence and canonical form ──────────────────────────────────────


def _rot2(t: float) -> np.ndarray:
    c, s = math.cos(t), math.sin(t)
    return np.array([[c, -s], [s, c]])


def canonicalize(config: Configuration, eps: float = 1e-9):
    """Rotate/boost within the block group to a canonical representative.

    xy plane: the first body with r_i > eps is turned to y_i = 0, x_i > 0.
    zw plane: on the sphere the first body with rho_i > eps is turned to
    w_i = 0, z_i > 0; on the hyperbolic side the unique boost zeroing the
    mass-weighted sum of z_i w_i is applied (unique because every on-sheet
    body has w > |z|, so the defining equation tanh(2s) = -2 sum(m z w) /
    sum(m (z^2 + w^2)) always has exactly one root).  Idempotent, and
    invariant under pre-composition with any block-group element.

    Returns (canonical_config, transform) with points' = points @ T^T.
    """
    m, Q = config.masses, config.points
    T = np.eye(4)
    r2, rho2 = _r2_rho2(config.space, Q)
    idx = np.nonzero(np.sqrt(r2) > eps)[0]
    if len(idx):
        i = int(idx[0])
        T[:2, :2] = _rot2(-math.atan2(Q[i, 1], Q[i, 0]))
    if config.space is Space.S3:
        idx = np.nonzero(np.sqrt(np.abs(rho2)) > eps)[0]
        if len(idx):
            i = int(idx[0])
            T[2:, 2:] = _rot2(-math.atan2(Q[i, 3], Q[i, 2]))
    else:
        p = float(np.sum(m * (Q[:, 2] ** 2 + Q[:, 3] ** 2)))
        q = float(np.sum(m * Q[:, 2] * Q[:, 3]))
        s = 0.5 * math.atanh(-2.0 * q / p)
        ch, sh = math.cosh(s), math.sinh(s)
        T[2:, 2:] = np.array([[ch, sh], [sh, ch]])
    return config.with_points(Q @ T.T), T


def equivalent(a: Configuration, b: Configuration, tol: float = 1e-8) -> bool:
    """Same labeled configuration up to the block isometry group."""
    if a.space is not b.space or a.n != b.n:
        return False
    if not np.allclose(a.masses, b.masses, rtol=0.0, atol=tol):
        return False
    ca, _ = canonicalize(a)
    cb, _ = canonicalize(b)
    return bool(np.max(np.abs(ca.points - cb.points)) <= tol)


# ─── solver on level sets I = c ──────────────────────────────────────────


def default_seed(masses, space: Space, c: float, rng=None) -> Configuration:
    """A nonsingular starting configuration with I = c exactly.

    Sphere: bodies ring around (0, 0, 1, 0) on the w = 0 great 2-sphere at
    common ring radius sqrt(c / sum m) — points of I^-1(c) exist there for
    every admissible c.  Hyperbolic: bodies spread along the xw geodesic
    with sinh-coordinates rescaled onto the constraint ellipsoid.
    """
    m = np.asarray(masses, dtype=float)
    n = len(m)
    if rng is None:
        rng = np.random.default_rng(0)
    if space is Space.S3:
        rr = math.sqrt(c / float(np.sum(m)))
        zz = math.sqrt(max(0.0, 1.0 - rr * rr))
        phis = 2.0 * math.pi * np.arange(n) / max(n, 1)
        phis = phis + rng.uniform(-0.05, 0.05, n) / max(n, 1)
        pts = np.stack(
            [rr * np.cos(phis), rr * np.sin(phis), np.full(n, zz), np.zeros(n)],
            axis=1,
        )
        return Configuration(space, m, np.array([project_point(p, space) for p in pts]))
    u = np.linspace(-1.0, 1.0, n) if n > 1 else np.array([1.0])
    u = u + rng.uniform(-0.02, 0.02, n)
    u = u * math.sqrt(c / float(np.sum(m * u * u)))
    th = np.arcsinh(u)
    pts = np.stack(
        [np.sinh(th), np.zeros(n), np.zeros(n), np.cosh(th)], axis=1
    )
    return Configuration(space, m, pts)


def _restore_level(space, m, Q, c, max_iter=40):
    """One-dimensional Newton along grad_I to put I back on the level."""
    for _ in range(max_iter):
        cfg = Configuration(space, m, Q)
        err = moment_of_inertia(cfg) - c
        if abs(err) <= 1e-13 * max(1.0, abs(c)):
            return Q
        G = grad_I(cfg)
        gg = float(np.sum(G * G))
        if gg < 1e-30:
            raise NoConvergenceError("cannot restore I = c: grad I vanished")
        step = -err / gg
        Q = _reproject(space, Q + step * G)
    raise NoConvergenceError("level-set restoration stalled")


def _reproject(space, Q):
    return np.array([project_point(row, space) for row in Q])


def _tangent_bases(space, Q):
    """Per-body orthonormal tangent triples (sigma-metric Gram-Schmidt)."""
    bases = []
    for q in Q:
        vecs = []
        for e in np.eye(4):
            v = project_tangent(q, e, space)
            for b in vecs:
                v = v - inner(b, v, space) * b
            nrm = inner(v, v, space)
            if nrm > 1e-12:
                vecs.append(v / math.sqrt(nrm))
            if len(vecs) == 3:
                break
        bases.append(np.array(vecs))
    return np.array(bases)  # (N, 3, 4)


def _residual_components(space, m, Q, lam, bases):
    cfg = Configuration(space, m, Q)
    R = grad_U(cfg) - lam * grad_I(cfg)
    comps = np.einsum("nkd,nd,d->nk", bases, R, space.metric_diagonal)
    return comps.ravel()


def _kkt_newton(space, m, Q, c, lam, tol, max_iter=60, damped=False):
    """Solve the stationarity system on I = c by finite-difference Newton.

    Unknowns: 3 tangent chart coordinates per body plus lambda.  Equations:
    tangent components of grad U - lambda grad I plus the level constraint.
    Re-charts at every accepted step.  damped=True switches to a
    Levenberg-style least-squares step, used when starting far out.
    """
    n = len(m)
    mu = 1e-3
    for _ in range(max_iter):
        bases = _tangent_bases(space, Q)

        def eval_G(x, lam_v):
            Qx = _reproject(space, Q + np.einsum("nk,nkd->nd", x.reshape(n, 3), bases))
            comps = _residual_components(space, m, Qx, lam_v, bases)
            lvl = moment_of_inertia(Configuration(space, m, Qx)) - c
            return np.concatenate([comps, [lvl]]), Qx

        y = np.zeros(3 * n + 1)
        y[-1] = lam
        G0, _ = eval_G(y[:-1], y[-1])
        if not np.all(np.isfinite(G0)):
            raise NoConvergenceError("refinement residual is not finite")
        crit = criterion_residual(Configuration(space, m, Q), lam)
        if (
            np.max(np.abs(crit)) < tol
            and abs(G0[-1]) <= tol * max(1.0, abs(c))
        ):
            return Q, lam
        # finite-difference Jacobian, central differences
        h = 1e-7
        J = np.empty((3 * n + 1, 3 * n + 1))
        try:
            for k in range(3 * n + 1):
                yp = y.copy(); yp[k] += h
                ym = y.copy(); ym[k] -= h
                gp, _ = eval_G(yp[:-1], yp[-1])
                gm, _ = eval_G(ym[:-1], ym[-1])
                J[:, k] = (gp - gm) / (2.0 * h)
        except (SingularPairError, OffShellError) as exc:
            raise NoConvergenceError(
                f"jacobian probe left the feasible region: {exc}"
            ) from exc
        if not np.all(np.isfinite(J)):
            raise NoConvergenceError("refinement jacobian is not finite")
        try:
            if damped:
                A = J.T @ J + mu * np.eye(3 * n + 1)
                delta = np.linalg.solve(A, -J.T @ G0)
            else:
                try:
                    delta = np.linalg.solve(J, -G0)
                except np.linalg.LinAlgError:
                    delta = np.linalg.lstsq(J, -G0, rcond=None)[0]
        except np.linalg.LinAlgError as exc:
            raise NoConvergenceError(f"refinement step solve failed: {exc}") from exc
        base = float(np.linalg.norm(G0))
        t, ok = 1.0, False
        while t >= 1e-6:
            try:
                Gt, Qt = eval_G(y[:-1] + t * delta[:-1], y[-1] + t * delta[-1])
            except (SingularPairError, OffShellError):
                t *= 0.5
                continue
            if np.linalg.norm(Gt) < (1.0 - 1e-4 * t) * base:
                Q, lam = Qt, float(y[-1] + t * delta[-1])
                ok = True
                mu = max(mu / 3.0, 1e-12)
                break
            t *= 0.5
        if not ok:
            if damped:
                mu *= 10.0
                if mu > 1e8:
                    raise NoConvergenceError("least-squares refinement stalled")
            else:
                raise NoConvergenceError("refinement step rejected")
    raise NoConvergenceError("refinement did not reach tolerance")


def find_cc(
    masses,
    space: Space,
    level: LevelSetSpec,
    seed: Configuration | None = None,
    mode: str = "descent",
    rng=None,
    max_iter: int = 2000,
):
    """Find a central configuration on the level set I = c.

    mode="descent" minimizes U over the level set (projected gradient with
    Armijo backtracking, multiplier re-estimated each step) and finishes
    with a Newton refinement of the stationarity system — correct wherever
    critical points are minima, which covers the guaranteed-existence
    settings in both geometries.  mode="saddle" skips the descent bias and
    drives the stationarity residual itself to zero from the seed, finding
    non-minimal critical points too.

    Returns (configuration, report).  Raises NoConvergence when iterations
    run out and SingularApproach when the iterate degenerates into the
    singular set.
    """
    m = np.asarray(masses, dtype=float)
    level.validate(space, m)
    c = float(level.c)
    if seed is None:
        seed = default_seed(m, space, c, rng=rng)
    if seed.space is not space or len(seed.masses) != len(m):
        raise ValueError("seed does not match the requested problem")
    Q = _restore_level(space, m, seed.points.copy(), c)

    def residual_dir(Q):
        cfg = Configuration(space, m, Q)
        Gu = project_tangent(Q, grad_U(cfg), space)
        Gi = project_tangent(Q, grad_I(cfg), space)
        gg = float(np.sum(Gi * Gi))
        lam_hat = float(np.sum(Gu * Gi)) / gg if gg > 1e-20 else 0.0
        return Gu - lam_hat * Gi, lam_hat, cfg

    lam = 0.0
    if mode == "descent":
        gamma = 0.1
        for _ in range(max_iter):
            try:
                R, lam, cfg = residual_dir(Q)
            except SingularPairError as exc:
                raise SingularApproachError(str(exc)) from exc
            rnorm2 = float(np.sum(R * R))
            if math.sqrt(rnorm2) < 1e-6:
                break
            u0 = force_function(cfg)
            accepted = False
            while gamma > 1e-16:
                try:
                    Qt = _restore_level(space, m, _reproject(space, Q - gamma * R), c)
                    ut = force_function(Configuration(space, m, Qt))
                except (SingularPairError, NoConvergenceError, OffShellError):
                    gamma *= 0.5
                    continue
                if ut <= u0 - 1e-4 * gamma * rnorm2:
                    Q = Qt
                    gamma = min(gamma * 1.3, 10.0)
                    accepted = True
                    break
                gamma *= 0.5
            if not accepted:
                break  # flat to line-search resolution; hand off to Newton
        try:
            lam = lambda_estimate(Configuration(space, m, Q))
        except DegenerateDenominatorError:
            pass
        try:
            Q, lam = _kkt_newton(space, m, Q, c, lam, level.tol)
        except NoConvergenceError:
            Q, lam = _kkt_newton(space, m, Q, c, lam, level.tol, damped=True)
        except SingularPairError as exc:
            raise SingularApproachError(str(exc)) from exc
    elif mode == "saddle":
        try:
            _, lam, _ = residual_dir(Q)
            Q, lam = _kkt_newton(
                space, m, Q, c, lam, level.tol, damped=True, max_iter=200
            )
        except SingularPairError as exc:
            raise SingularApproachError(str(exc)) from exc
    else:
        raise ValueError(f"unknown mode {mode!r}")

    config = Configuration(space, m, Q)
    try:
        lam_final = lambda_estimate(config)
    except DegenerateDenominatorError:
        lam_final = lam
    crit = criterion_residual(config, lam_final)
    if np.max(np.abs(crit)) >= level.tol:
        raise NoConvergenceError(
            f"criterion residual {np.max(np.abs(crit)):.3e} above tolerance"
        )
    return config, make_report(config, lam_final)
