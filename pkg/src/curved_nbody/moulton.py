"""Geodesic central configurations on a single geodesic.

Two settings are covered:

* N bodies on the hyperbolic geodesic H1_xw, embedded as
  ``(sinh theta, 0, 0, cosh theta)``.  For every ordering of the bodies
  there is exactly one central configuration, found by minimizing the
  cotangent potential on a fixed moment-of-inertia level set; the
  certified Hessian shows it is a minimum, and enumeration over all
  orderings yields exactly N!/2 distinct classes after identifying a
  configuration with its 180-degree xy-rotation (theta -> -theta).

* Two bodies on the circle S1_xz, embedded as ``(-sin theta, 0, cos theta, 0)``,
  where the count of solutions depends on the size c of the configuration
  and is given in closed form, including a degenerate equal-mass continuum.
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .dynamics import Configuration
from .errors import (
    NoConvergenceError,
    OutOfRangeError,
    SingularPairError,
)
from .manifold import Space

__all__ = [
    "GeodesicHConfig",
    "GeodesicHSolution",
    "TwoBodySConfig",
    "TwoBodySFamily",
    "TwoBodySResult",
    "hessian_geodesic_h",
    "geodesic_lambda",
    "solve_geodesic_h",
    "enumerate_geodesic_h",
    "solve_two_body_s",
]


# ---------------------------------------------------------------------------
# hyperbolic geodesic: types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GeodesicHConfig:
    """Bodies on the geodesic H1_xw, located by oriented distance from (0,0,0,1).

    ``thetas[i]`` is the signed hyperbolic distance of body i from the vertex,
    so the embedded position is ``(sinh theta_i, 0, 0, cosh theta_i)``.
    """

    thetas: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        thetas = np.asarray(self.thetas, dtype=float).reshape(-1)
        masses = np.asarray(self.masses, dtype=float).reshape(-1)
        if thetas.shape != masses.shape:
            raise ValueError("thetas and masses must have the same length")
        if thetas.size < 2:
            raise ValueError("need at least two bodies")
        if not np.all(np.isfinite(thetas)):
            raise ValueError("thetas must be finite")
        if not (np.all(np.isfinite(masses)) and np.all(masses > 0.0)):
            raise ValueError("masses must be positive and finite")
        order = np.argsort(thetas)
        gaps = np.diff(thetas[order])
        if np.any(gaps <= 0.0):
            k = int(np.argmin(gaps))
            i, j = int(order[k]), int(order[k + 1])
            # coincident points on the geodesic: cosh(0) = 1
            raise SingularPairError(i, j, 1.0)
        thetas.setflags(write=False)
        masses.setflags(write=False)
        object.__setattr__(self, "thetas", thetas)
        object.__setattr__(self, "masses", masses)

    @property
    def n(self) -> int:
        return self.thetas.size

    def to_configuration(self) -> Configuration:
        """Embed into the hyperbolic 3-sphere as (sinh t, 0, 0, cosh t) rows."""
        t = self.thetas
        points = np.zeros((t.size, 4))
        points[:, 0] = np.sinh(t)
        points[:, 3] = np.cosh(t)
        return Configuration(Space.H3, self.masses, points)

    def potential(self) -> float:
        return _potential_theta(self.thetas, self.masses)

    def inertia(self) -> float:
        return float(np.sum(self.masses * np.sinh(self.thetas) ** 2))


@dataclass(frozen=True)
class GeodesicHSolution:
    """One solved ordering: the configuration plus its certification data."""

    ordering: tuple
    config: GeodesicHConfig
    lam: float
    inertia: float
    potential: float
    min_hessian_eig: float


# ---------------------------------------------------------------------------
# hyperbolic geodesic: scalar reductions of U and I
# ---------------------------------------------------------------------------

def _gap_trig(thetas):
    """Pairwise |theta_i - theta_j| with its sinh/cosh, diagonal patched to 1."""
    d = np.abs(thetas[:, None] - thetas[None, :])
    np.fill_diagonal(d, 1.0)
    return d, np.sinh(d), np.cosh(d)


def _potential_theta(thetas, masses) -> float:
    d, sh, ch = _gap_trig(thetas)
    mm = np.outer(masses, masses)
    np.fill_diagonal(mm, 0.0)
    return float(0.5 * np.sum(mm * ch / sh))


def _grad_potential_theta(thetas, masses):
    d, sh, _ = _gap_trig(thetas)
    mm = np.outer(masses, masses)
    np.fill_diagonal(mm, 0.0)
    sgn = np.sign(thetas[:, None] - thetas[None, :])
    return -np.sum(mm * sgn / sh**2, axis=1)


def _grad_inertia_theta(thetas, masses):
    return masses * np.sinh(2.0 * thetas)


def hessian_geodesic_h(config: GeodesicHConfig, lam: float) -> np.ndarray:
    """Constrained second variation D2U - lambda * D2I along the geodesic.

    Off-diagonal entries are -2 m_i m_j cosh d_ij / sinh^3 d_ij; the D2U part
    has zero row sums, and the multiplier contributes -2 lam m_i cosh 2theta_i
    on the diagonal.  At a minimizer with its own lambda (< 0) the matrix is
    positive definite, which certifies the configuration.
    """
    t = config.thetas
    m = config.masses
    _, sh, ch = _gap_trig(t)
    mm = np.outer(m, m)
    np.fill_diagonal(mm, 0.0)
    off = -2.0 * mm * ch / sh**3
    np.fill_diagonal(off, 0.0)
    hess = off - np.diag(np.sum(off, axis=1))
    hess -= lam * np.diag(2.0 * m * np.cosh(2.0 * t))
    return hess


def geodesic_lambda(config: GeodesicHConfig) -> float:
    """Least-squares multiplier matching dU/dtheta = lam * dI/dtheta."""
    g_u = _grad_potential_theta(config.thetas, config.masses)
    g_i = _grad_inertia_theta(config.thetas, config.masses)
    den = float(np.dot(g_i, g_i))
    if den <= 0.0:
        raise ZeroDivisionError("degenerate inertia gradient on the geodesic")
    return float(np.dot(g_u, g_i) / den)


# ---------------------------------------------------------------------------
# hyperbolic geodesic: solver
# ---------------------------------------------------------------------------

def _barrier_value(u, mu, w, masses_sorted):
    """Potential plus ordering barrier, in u = sinh(theta) coordinates."""
    t = np.arcsinh(u)
    val = _potential_theta(t, masses_sorted)
    if w > 0.0:
        gaps = np.diff(u)
        val -= w * float(np.sum(np.log(gaps)))
    return val


def _barrier_grad(u, w, masses_sorted):
    t = np.arcsinh(u)
    g = _grad_potential_theta(t, masses_sorted) / np.cosh(t)
    if w > 0.0:
        inv = 1.0 / np.diff(u)
        g[:-1] += w * inv
        g[1:] -= w * inv
    return g


def _project_ellipsoid(u, masses, c):
    return u * math.sqrt(c / float(np.sum(masses * u * u)))


def _descend_ordered(u, masses, c, w, max_iter=300, gtol=1e-8):
    """Projected gradient descent on {sum m u^2 = c}, ordering kept by barrier."""
    grad_con = lambda v: 2.0 * masses * v
    val = _barrier_value(u, masses, w, masses)
    step = 1.0
    for _ in range(max_iter):
        g = _barrier_grad(u, w, masses)
        gc = grad_con(u)
        g = g - (np.dot(g, gc) / np.dot(gc, gc)) * gc
        gnorm = float(np.linalg.norm(g))
        if gnorm < gtol:
            break
        step = min(step * 1.5, 1.0 / max(gnorm, 1e-6))
        moved = False
        for _ in range(60):
            trial = _project_ellipsoid(u - step * g, masses, c)
            if np.all(np.diff(trial) > 0.0):
                tval = _barrier_value(trial, masses, w, masses)
                if np.isfinite(tval) and tval <= val - 1e-4 * step * gnorm**2:
                    u, val, moved = trial, tval, True
                    break
            step *= 0.5
        if not moved:
            break
    return u


def _kkt_polish(t, lam, masses, c, tol=1e-12, max_iter=80):
    """Damped Newton on [dU - lam dI; I - c] in theta coordinates."""
    n = t.size

    def residual(tv, lv):
        f = np.empty(n + 1)
        f[:n] = _grad_potential_theta(tv, masses) - lv * _grad_inertia_theta(tv, masses)
        f[n] = float(np.sum(masses * np.sinh(tv) ** 2)) - c
        return f

    f = residual(t, lam)
    for _ in range(max_iter):
        nrm = float(np.max(np.abs(f)))
        if nrm < tol:
            break
        cfg = GeodesicHConfig(t, masses)
        hess = hessian_geodesic_h(cfg, lam)
        g_i = _grad_inertia_theta(t, masses)
        jac = np.zeros((n + 1, n + 1))
        jac[:n, :n] = hess
        jac[:n, n] = -g_i
        jac[n, :n] = g_i
        try:
            delta = np.linalg.solve(jac, -f)
        except np.linalg.LinAlgError:
            jac += 1e-12 * np.eye(n + 1)
            delta = np.linalg.solve(jac, -f)
        scale = 1.0
        for _ in range(40):
            t_new = t + scale * delta[:n]
            lam_new = lam + scale * delta[n]
            if np.all(np.diff(t_new) > 0.0):
                f_new = residual(t_new, lam_new)
                if float(np.max(np.abs(f_new))) < nrm * (1.0 - 1e-4 * scale) + 1e-15:
                    t, lam, f = t_new, lam_new, f_new
                    break
            scale *= 0.5
        else:
            break
    return t, lam, float(np.max(np.abs(f)))


def solve_geodesic_h(masses, c: float, ordering: Optional[Sequence[int]] = None,
                     rng=None) -> GeodesicHConfig:
    """Find the unique geodesic central configuration for one body ordering.

    ``ordering`` lists body indices from most negative to most positive theta;
    the identity ordering is used when omitted.  ``rng`` jitters the initial
    guess (the minimizer is unique per ordering, so all seeds agree).
    """
    masses = np.asarray(masses, dtype=float).reshape(-1)
    n = masses.size
    if n < 2:
        raise ValueError("need at least two bodies")
    if not (np.all(np.isfinite(masses)) and np.all(masses > 0.0)):
        raise ValueError("masses must be positive and finite")
    if not (np.isfinite(c) and c > 0.0):
        raise OutOfRangeError("size parameter c must be positive")
    if ordering is None:
        ordering = tuple(range(n))
    ordering = tuple(int(k) for k in ordering)
    if sorted(ordering) != list(range(n)):
        raise ValueError("ordering must be a permutation of body indices")

    m_sorted = masses[list(ordering)]

    # initial guess: spread in theta, jittered, pushed onto the level set
    base = math.asinh(math.sqrt(c / float(np.sum(masses))))
    t0 = np.linspace(-1.0, 1.0, n) * max(1.0, base)
    if rng is not None:
        t0 = np.sort(rng.uniform(-1.5, 1.5, size=n) * max(1.0, base))
        t0 += np.arange(n) * 1e-3
    u = _project_ellipsoid(np.sinh(t0), m_sorted, c)

    # annealed barrier keeps the ordering while descending toward the minimum
    w = 1e-2 * max(1.0, abs(_potential_theta(np.arcsinh(u), m_sorted)))
    while w > 1e-9:
        u = _descend_ordered(u, m_sorted, c, w)
        w *= 0.1
    u = _descend_ordered(u, m_sorted, c, 0.0, max_iter=500)

    t = np.arcsinh(u)
    g_u = _grad_potential_theta(t, m_sorted)
    g_i = _grad_inertia_theta(t, m_sorted)
    lam = float(np.dot(g_u, g_i) / np.dot(g_i, g_i))
    t, lam, res = _kkt_polish(t, lam, m_sorted, c)
    if res >= 1e-10:
        raise NoConvergenceError(
            f"geodesic solve stalled at residual {res:.3e} for ordering {ordering}")

    thetas = np.empty(n)
    thetas[list(ordering)] = t
    return GeodesicHConfig(thetas, masses)


def _solution_record(ordering, config: GeodesicHConfig) -> GeodesicHSolution:
    lam = geodesic_lambda(config)
    eigs = np.linalg.eigvalsh(hessian_geodesic_h(config, lam))
    return GeodesicHSolution(
        ordering=tuple(ordering),
        config=config,
        lam=lam,
        inertia=config.inertia(),
        potential=config.potential(),
        min_hessian_eig=float(eigs[0]),
    )


def _max_workers(n_jobs: int) -> int:
    cap = os.environ.get("CURVED_NBODY_THREADS")
    workers = os.cpu_count() or 1
    if cap:
        workers = max(1, int(cap))
    return max(1, min(workers, n_jobs))


def enumerate_geodesic_h(masses, c: float, max_workers: Optional[int] = None):
    """Solve every ordering and deduplicate mirror images.

    Reversing an ordering produces the 180-degree xy-rotated configuration
    (theta -> -theta), so the N! solves collapse to exactly N!/2 classes.
    Returns one :class:`GeodesicHSolution` per class, in first-seen order.
    """
    masses = np.asarray(masses, dtype=float).reshape(-1)
    orderings = list(itertools.permutations(range(masses.size)))
    if max_workers is None:
        max_workers = _max_workers(len(orderings))

    def solve_one(ordering):
        return ordering, solve_geodesic_h(masses, c, ordering)

    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            solved = list(pool.map(solve_one, orderings))
    else:
        solved = [solve_one(o) for o in orderings]

    reps = []
    out = []
    for ordering, config in solved:
        t = config.thetas
        # the mirror image negates every body's theta, body labels unchanged
        if any(np.allclose(t, r, atol=1e-7) or np.allclose(t, -r, atol=1e-7)
               for r in reps):
            continue
        reps.append(t.copy())
        out.append(_solution_record(ordering, config))
    return out


# ---------------------------------------------------------------------------
# two bodies on the circle S1_xz
# ---------------------------------------------------------------------------

_EQ19_TOL = 1e-12


@dataclass(frozen=True)
class TwoBodySConfig:
    """A two-body circular central configuration (-sin t, 0, cos t, 0).

    theta1 lies in (0, pi/2); theta2 lies in (pi/2, pi) or (3pi/2, 2pi).
    """

    theta1: float
    theta2: float
    m1: float
    m2: float
    c: float

    def masses(self):
        return np.array([self.m1, self.m2])

    def to_configuration(self) -> Configuration:
        t = np.array([self.theta1, self.theta2])
        points = np.zeros((2, 4))
        points[:, 0] = -np.sin(t)
        points[:, 2] = np.cos(t)
        return Configuration(Space.S3, self.masses(), points)

    def balance_residual(self) -> float:
        """m1 sin 2theta1 + m2 sin 2theta2, zero at a central configuration."""
        return float(self.m1 * math.sin(2.0 * self.theta1)
                     + self.m2 * math.sin(2.0 * self.theta2))

    def inertia(self) -> float:
        return float(self.m1 * math.sin(self.theta1) ** 2
                     + self.m2 * math.sin(self.theta2) ** 2)


@dataclass(frozen=True)
class TwoBodySFamily:
    """Equal-mass degenerate continuum at c = m: theta2 = theta1 + pi/2 or + 3pi/2.

    Every member has d12 = pi/2 and zero potential.
    """

    mass: float
    c: float

    def member(self, theta1: float, branch: int = 0) -> TwoBodySConfig:
        if not 0.0 < theta1 < 0.5 * math.pi:
            raise OutOfRangeError("theta1 must lie in (0, pi/2)")
        if branch not in (0, 1):
            raise ValueError("branch must be 0 (+pi/2) or 1 (+3pi/2)")
        offset = 0.5 * math.pi if branch == 0 else 1.5 * math.pi
        return TwoBodySConfig(theta1, theta1 + offset, self.mass, self.mass, self.c)


@dataclass
class TwoBodySResult:
    solutions: list = field(default_factory=list)
    family: Optional[TwoBodySFamily] = None

    @property
    def count(self):
        return math.inf if self.family is not None else len(self.solutions)


def solve_two_body_s(m1: float, m2: float, c: float) -> TwoBodySResult:
    """All two-body circular central configurations of size c, in closed form.

    sin^2 theta1 = c (m2 - c) / (m1 (M - 2c)) and
    sin^2 theta2 = c (m1 - c) / (m2 (M - 2c)) with M = m1 + m2; a candidate
    survives only if both squares land strictly inside (0, 1) and the balance
    relation m1 sin 2theta1 + m2 sin 2theta2 = 0 holds numerically.  The count
    is 2 for c in (0, min m) or (max m, M), 0 between, with an equal-mass
    degenerate continuum at c = m reported as ``family``.
    """
    if not (m1 > 0.0 and m2 > 0.0 and np.isfinite(m1) and np.isfinite(m2)):
        raise ValueError("masses must be positive and finite")
    total = m1 + m2
    if not np.isfinite(c) or c <= 0.0 or c >= total:
        raise OutOfRangeError(
            f"size parameter c={c} outside the admissible range (0, {total})")

    if math.isclose(m1, m2, rel_tol=1e-12) and math.isclose(c, m1, rel_tol=1e-12):
        return TwoBodySResult(solutions=[], family=TwoBodySFamily(0.5 * (m1 + m2), c))

    den = total - 2.0 * c
    if abs(den) <= 1e-14 * total:
        return TwoBodySResult(solutions=[])

    s1 = c * (m2 - c) / (m1 * den)
    s2 = c * (m1 - c) / (m2 * den)
    eps = 1e-15
    if not (eps < s1 < 1.0 - eps and eps < s2 < 1.0 - eps):
        return TwoBodySResult(solutions=[])

    theta1 = math.asin(math.sqrt(s1))
    a2 = math.asin(math.sqrt(s2))
    result = TwoBodySResult()
    for theta2 in (math.pi - a2, 2.0 * math.pi - a2):
        cand = TwoBodySConfig(theta1, theta2, m1, m2, c)
        if abs(cand.balance_residual()) < _EQ19_TOL and \
                abs(cand.inertia() - c) < _EQ19_TOL * max(1.0, c):
            result.solutions.append(cand)
    return result
