"""Cotangent-law gravitation on the curved 3-spheres.

The force function is U = sum_{i<j} m_i m_j ctn(d_ij) (cot on S3, coth on
H3).  Motion follows the constrained second-order system

    dq_i/dt = p_i / m_i
    dp_i/dt = sum_{j != i} m_i m_j [q_j - csn(d_ij) q_i] / sn^3(d_ij)
              - sigma m_i <qdot_i, qdot_i> q_i

with p_i stored componentwise as m_i qdot_i and every pairing taken in the
sigma-inner product.  A classical RK4 step followed by projection back onto
the manifold (and of momenta onto tangent spaces) keeps constraint drift at
round-off level.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    OffShellError,
    SingularEncounterError,
    SingularPairError,
)
from .manifold import EPS_MANIFOLD, EPS_SINGULAR, Space, inner, project_tangent

__all__ = [
    "Body",
    "Configuration",
    "PhaseState",
    "ConservedSet",
    "Trajectory",
    "force_function",
    "pair_force",
    "grad_U",
    "eom_rhs",
    "integrate",
    "conserved",
    "kinetic_energy",
    "pairwise_distances",
    "generator_momenta",
    "trajectory_to_csv",
]


class Body(NamedTuple):
    mass: float
    point: np.ndarray


# ─── configuration and phase state ───────────────────────────────────────


@dataclass(frozen=True, eq=False)
class Configuration:
    """N positive masses at pairwise-nonsingular points of one manifold."""

    space: Space
    masses: np.ndarray
    points: np.ndarray

    def __post_init__(self):
        m = np.atleast_1d(np.asarray(self.masses, dtype=float)).copy()
        q = np.asarray(self.points, dtype=float).reshape(-1, 4).copy()
        if m.ndim != 1 or len(m) != len(q) or len(m) < 1:
            raise ValueError("need one mass per point, at least one body")
        if not np.all(np.isfinite(m)) or np.any(m <= 0.0):
            raise ValueError("masses must be positive and finite")
        sigma = self.space.sigma
        unit = inner(q, q, self.space)
        # the quadratic form carries rounding noise ~ |q|^2 eps, so the
        # on-shell tolerance has to scale with the squared coordinate size
        scale = np.maximum(1.0, np.sum(q * q, axis=1))
        if np.max(np.abs(unit - sigma) / scale) > EPS_MANIFOLD:
            raise OffShellError(
                f"point constraint violated by {np.max(np.abs(unit - sigma)):.3e}"
            )
        if self.space is Space.H3 and np.min(q[:, 3]) < 1.0 - EPS_MANIFOLD:
            raise OffShellError("hyperbolic points must lie on the w >= 1 sheet")
        _gram_checked(self.space, q)  # raises SingularPairError on bad pairs
        m.setflags(write=False)
        q.setflags(write=False)
        object.__setattr__(self, "masses", m)
        object.__setattr__(self, "points", q)

    @classmethod
    def from_raw(cls, space: Space, masses, raw_points) -> "Configuration":
        """Build after scaling each raw 4-vector onto the manifold."""
        from .manifold import project_point

        raw = np.asarray(raw_points, dtype=float).reshape(-1, 4)
        pts = np.array([project_point(row, space) for row in raw])
        return cls(space, masses, pts)

    @property
    def n(self) -> int:
        return len(self.masses)

    def bodies(self) -> list[Body]:
        return [Body(float(m), p) for m, p in zip(self.masses, self.points)]

    def with_points(self, points) -> "Configuration":
        return Configuration(self.space, self.masses, points)

    def to_dict(self) -> dict:
        return {
            "space": self.space.value,
            "masses": [float(v) for v in self.masses],
            "points": [[float(c) for c in row] for row in self.points],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Configuration":
        return cls.from_raw(
            Space(data["space"]), data["masses"], np.asarray(data["points"], float)
        )


@dataclass(frozen=True, eq=False)
class PhaseState:
    """A configuration plus componentwise momenta p_i = m_i qdot_i."""

    config: Configuration
    momenta: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.momenta, dtype=float).reshape(-1, 4).copy()
        if len(p) != self.config.n:
            raise ValueError("need one momentum row per body")
        tang = np.abs(inner(self.config.points, p, self.config.space))
        tol = 1e-10 * max(1.0, float(np.max(np.abs(p), initial=0.0)))
        if np.max(tang) > tol:
            raise OffShellError(
                f"momentum not tangent: |<p, q>| = {np.max(tang):.3e}"
            )
        p.setflags(write=False)
        object.__setattr__(self, "momenta", p)

    @property
    def velocities(self) -> np.ndarray:
        return self.momenta / self.config.masses[:, None]


@dataclass
class ConservedSet:
    """Energy and the six rotational/boost first integrals."""

    energy: float
    omega_xy: float
    omega_xz: float
    omega_xw: float
    omega_yz: float
    omega_yw: float
    omega_zw: float

    def as_dict(self) -> dict:
        return {
            "energy": self.energy,
            "omega_xy": self.omega_xy,
            "omega_xz": self.omega_xz,
            "omega_xw": self.omega_xw,
            "omega_yz": self.omega_yz,
            "omega_yw": self.omega_yw,
            "omega_zw": self.omega_zw,
        }

    def max_abs_diff(self, other: "ConservedSet") -> float:
        a, b = self.as_dict(), other.as_dict()
        return max(abs(a[k] - b[k]) for k in a)


@dataclass
class Trajectory:
    """Recorded (t, q, p) samples from one integration run."""

    space: Space
    masses: np.ndarray
    times: np.ndarray          # (S,)
    positions: np.ndarray      # (S, N, 4)
    momenta: np.ndarray        # (S, N, 4)
    completed: bool = True

    def __len__(self) -> int:
        return len(self.times)

    def state_at(self, k: int) -> PhaseState:
        cfg = Configuration(self.space, self.masses, self.positions[k])
        return PhaseState(cfg, self.momenta[k])

    def final_state(self) -> PhaseState:
        return self.state_at(len(self) - 1)


# ─── pairwise geometry kernels (raw arrays, no validation) ───────────────


def _gram_checked(space: Space, Q: np.ndarray) -> np.ndarray:
    """Matrix s_ij = csn(d_ij); raises SingularPairError on singular pairs.

    The predicate is one-sided where the geometry is one-sided: on H3 any
    off-diagonal s below 1 + EPS_SINGULAR is singular (true points always
    have cosh d > 1; integrator stages that cross a collision dip below 1),
    and on S3 anything within EPS_SINGULAR of +-1, from either side.
    """
    s = space.sigma * ((Q * space.metric_diagonal) @ Q.T)
    n = len(Q)
    if n > 1:
        off = ~np.eye(n, dtype=bool)
        bad = off & ~np.isfinite(s)
        if space is Space.S3:
            bad |= off & ((s > 1.0 - EPS_SINGULAR) | (s < -1.0 + EPS_SINGULAR))
        else:
            bad |= off & (s < 1.0 + EPS_SINGULAR)
        if np.any(bad):
            i, j = map(int, np.argwhere(bad)[0])
            raise SingularPairError(i, j, float(s[i, j]))
    return s


def _sn_powers(space: Space, s: np.ndarray):
    """(sn d_ij, sn^3 d_ij) with the diagonal patched to 1."""
    sn2 = space.sigma * (1.0 - s * s)
    np.fill_diagonal(sn2, 1.0)
    sn = np.sqrt(np.maximum(sn2, 0.0))
    return sn, sn * sn * sn


def _potential_raw(space: Space, m: np.ndarray, Q: np.ndarray) -> float:
    s = _gram_checked(space, Q)
    sn, _ = _sn_powers(space, s)
    ctn = s / sn
    np.fill_diagonal(ctn, 0.0)
    return 0.5 * float(np.sum(np.outer(m, m) * ctn))


def _grad_U_raw(space: Space, m: np.ndarray, Q: np.ndarray) -> np.ndarray:
    s = _gram_checked(space, Q)
    _, sn3 = _sn_powers(space, s)
    w = np.outer(m, m) / sn3
    np.fill_diagonal(w, 0.0)
    return w @ Q - np.sum(w * s, axis=1)[:, None] * Q


def _rhs_raw(space: Space, m: np.ndarray, Q: np.ndarray, P: np.ndarray):
    V = P / m[:, None]
    G = _grad_U_raw(space, m, Q)
    vsq = inner(V, V, space)
    dP = G - space.sigma * (m * vsq)[:, None] * Q
    return V, dP


def _project_rows(space: Space, Q: np.ndarray) -> np.ndarray:
    if space is Space.S3:
        return Q / np.linalg.norm(Q, axis=1)[:, None]
    norm2 = -inner(Q, Q, space)
    if np.any(norm2 <= 0.0) or np.any(Q[:, 3] <= 0.0):
        raise OffShellError("integration step left the w >= 1 sheet")
    return Q / np.sqrt(norm2)[:, None]


# ─── public operations ───────────────────────────────────────────────────


def force_function(config: Configuration) -> float:
    """Total force function U = sum over pairs of m_i m_j ctn(d_ij)."""
    return _potential_raw(config.space, config.masses, config.points)


def pair_force(i: int, j: int, config: Configuration) -> np.ndarray:
    """Force exerted on body i by body j (tangent to the manifold at q_i)."""
    if i == j:
        raise ValueError("pair_force needs two distinct bodies")
    s = _gram_checked(config.space, config.points)
    _, sn3 = _sn_powers(config.space, s)
    qi, qj = config.points[i], config.points[j]
    return (
        config.masses[i]
        * config.masses[j]
        * (qj - s[i, j] * qi)
        / sn3[i, j]
    )


def grad_U(config: Configuration) -> np.ndarray:
    """Manifold gradient of U, one tangent row per body: the net forces."""
    return _grad_U_raw(config.space, config.masses, config.points)


def eom_rhs(state: PhaseState):
    """(dq/dt, dp/dt) rows for the constrained equations of motion."""
    return _rhs_raw(
        state.config.space, state.config.masses, state.config.points, state.momenta
    )


def kinetic_energy(state: PhaseState, half: bool = False) -> float:
    """sum_i m_i^-1 <p_i, p_i>.

    The bare sum is the convention used throughout the closed-form material
    here; pass half=True for the (1/2)-weighted value, which is the one that
    combines with -U into a drift-free first integral.
    """
    val = float(
        np.sum(inner(state.momenta, state.momenta, state.config.space)
               / state.config.masses)
    )
    return 0.5 * val if half else val


_OMEGA_PAIRS = (
    ("omega_xy", 0, 1),
    ("omega_xz", 0, 2),
    ("omega_xw", 0, 3),
    ("omega_yz", 1, 2),
    ("omega_yw", 1, 3),
    ("omega_zw", 2, 3),
)


def conserved(state: PhaseState) -> ConservedSet:
    """Evaluate the seven first integrals at one state.

    energy = (1/2) sum m_i^-1 <p_i, p_i> - U: the 1/2 makes it constant
    along solutions (see kinetic_energy for the bare-sum convention).  The
    six omegas are sum_i (p_a q_b - q_a p_b) over coordinate pairs; all six
    are constant in both geometries.
    """
    Q, P = state.config.points, state.momenta
    vals = {
        name: float(np.sum(P[:, a] * Q[:, b] - Q[:, a] * P[:, b]))
        for name, a, b in _OMEGA_PAIRS
    }
    energy = kinetic_energy(state, half=True) - force_function(state.config)
    return ConservedSet(energy=energy, **vals)


def pairwise_distances(config: Configuration) -> np.ndarray:
    """Symmetric (N, N) matrix of geodesic separations, zero diagonal."""
    s = _gram_checked(config.space, config.points)
    if config.space is Space.S3:
        d = np.arccos(np.clip(s, -1.0, 1.0))
    else:
        d = np.arccosh(np.maximum(s, 1.0))
    np.fill_diagonal(d, 0.0)
    return d


def generator_momenta(config: Configuration, generator) -> np.ndarray:
    """Momenta m_i (xi q_i) for rigid motion along a one-parameter subgroup."""
    if generator.space is not config.space:
        raise ValueError("generator kind does not act on this configuration's space")
    xi = generator.matrix_log()
    return config.masses[:, None] * (config.points @ xi.T)


def integrate(
    state: PhaseState, dt: float, steps: int, record_every: int = 1
) -> Trajectory:
    """Advance the equations of motion with fixed-step RK4 plus projection.

    After each step, positions are rescaled onto the manifold and momenta
    re-projected onto tangent spaces, so recorded states satisfy the
    constraints to round-off.  A singular pair encountered mid-run raises
    SingularEncounterError carrying the trajectory up to the last good step.
    """
    if dt <= 0.0 or steps < 1:
        raise ValueError("need dt > 0 and steps >= 1")
    space, m = state.config.space, state.config.masses
    Q = state.config.points.copy()
    P = state.momenta.copy()
    times = [0.0]
    qs, ps = [Q.copy()], [P.copy()]

    def partial() -> Trajectory:
        return Trajectory(
            space, m, np.array(times), np.array(qs), np.array(ps), completed=False
        )

    for k in range(1, steps + 1):
        try:
            k1q, k1p = _rhs_raw(space, m, Q, P)
            k2q, k2p = _rhs_raw(space, m, Q + 0.5 * dt * k1q, P + 0.5 * dt * k1p)
            k3q, k3p = _rhs_raw(space, m, Q + 0.5 * dt * k2q, P + 0.5 * dt * k2p)
            k4q, k4p = _rhs_raw(space, m, Q + dt * k3q, P + dt * k3p)
            Q = Q + (dt / 6.0) * (k1q + 2.0 * k2q + 2.0 * k3q + k4q)
            P = P + (dt / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
            if not (np.all(np.isfinite(Q)) and np.all(np.isfinite(P))):
                raise OffShellError("non-finite state")
            Q = _project_rows(space, Q)
            P = project_tangent(Q, P, space)
        except SingularPairError as exc:
            raise SingularEncounterError(
                f"singular pair ({exc.i}, {exc.j}) near t = {(k - 1) * dt:.6g}",
                partial=partial(),
            ) from exc
        except OffShellError as exc:
            raise SingularEncounterError(
                f"step left the resolvable region near t = {(k - 1) * dt:.6g}: {exc}",
                partial=partial(),
            ) from exc
        if k % record_every == 0 or k == steps:
            times.append(k * dt)
            qs.append(Q.copy())
            ps.append(P.copy())
    return Trajectory(space, m, np.array(times), np.array(qs), np.array(ps))


# ─── export ──────────────────────────────────────────────────────────────


def trajectory_to_csv(
    traj: Trajectory, csv_path, sidecar_path=None, sample_stride: int = 100
) -> None:
    """Write `t,i,x,y,z,w,px,py,pz,pw` rows plus an optional JSON sidecar
    of conserved-quantity samples (every sample_stride-th record)."""
    lines = ["t,i,x,y,z,w,px,py,pz,pw"]
    for k, t in enumerate(traj.times):
        for i in range(len(traj.masses)):
            q = traj.positions[k, i]
            p = traj.momenta[k, i]
            fields = [repr(float(t)), str(i)]
            fields += [repr(float(v)) for v in q] + [repr(float(v)) for v in p]
            lines.append(",".join(fields))
    with open(csv_path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    if sidecar_path is None:
        return
    samples = []
    for k in range(0, len(traj), max(1, sample_stride)):
        entry = {"t": float(traj.times[k])}
        entry.update(conserved(traj.state_at(k)).as_dict())
        samples.append(entry)
    last = len(traj) - 1
    if last % max(1, sample_stride) != 0:
        entry = {"t": float(traj.times[last])}
        entry.update(conserved(traj.state_at(last)).as_dict())
        samples.append(entry)
    with open(sidecar_path, "w") as fh:
        json.dump({"completed": traj.completed, "samples": samples}, fh, indent=2)
        fh.write("\n")
