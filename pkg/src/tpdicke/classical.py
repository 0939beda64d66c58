"""Mean-field classical limit: Hamiltonian flow, energy shells, Poincare sections.

The intensive classical Hamiltonian over the bosonic pair (q, p) and the
atomic pair (Q, P) on the Bloch disk Q^2 + P^2 <= 4 is

    h = (omega/2)(q^2 + p^2) + (omega0/2)(Q^2 + P^2) - omega0
        + gamma (q^2 - p^2) Q sqrt(1 - (Q^2 + P^2)/4),

with energy shell epsilon = E/j.  The normal phase gamma < omega/2 keeps the
quadratic-in-q coefficient positive, so the shell equation h = epsilon has a
nonnegative root q_+(epsilon, p, Q, P) wherever the shell is reachable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .errors import (
    BoundarySingularity,
    DomainExit,
    DomainViolation,
    EmptyShell,
    OutsideShell,
    StepFailure,
)
from .model import ModelParams

EDGE_MARGIN = 1e-9
DEFAULT_TOL = 1e-11
DEFAULT_T_MAX = 1e3
MAX_CROSSINGS = 10_000


@dataclass(frozen=True)
class ClassicalState:
    """Phase-space point (q, p; Q, P); the atomic pair lives on the Bloch disk."""

    q: float
    p: float
    Q: float
    P: float

    def as_array(self) -> np.ndarray:
        return np.array([self.q, self.p, self.Q, self.P], dtype=float)

    @classmethod
    def from_array(cls, y) -> "ClassicalState":
        return cls(float(y[0]), float(y[1]), float(y[2]), float(y[3]))

    @property
    def bloch_radius2(self) -> float:
        return self.Q * self.Q + self.P * self.P


@dataclass(frozen=True)
class ShellSampling:
    """How to scatter initial conditions over the atomic disk.

    kind='grid' lays a count x count lattice over [-2, 2]^2; kind='random'
    draws ``count`` seeded-uniform points from the open disk.
    """

    kind: str = "random"
    count: int = 25

    def __post_init__(self):
        if self.kind not in ("grid", "random"):
            raise ValueError(f"sampling kind must be 'grid' or 'random', got {self.kind!r}")
        if self.count < 1:
            raise ValueError(f"sampling count must be >= 1, got {self.count}")


@dataclass
class Trajectory:
    """Integrated orbit with its conserved-energy monitor.

    ``energy_drift`` is the largest |h(x(t)) - h(x(0))| over the stored
    points; ``sol`` keeps the dense interpolant for crossing refinement.
    """

    times: np.ndarray
    states: np.ndarray  # shape (n, 4), columns q, p, Q, P
    epsilon0: float
    energy_drift: float
    sol: object = field(repr=False, default=None)


def _check_domain(Q, P):
    r2 = Q * Q + P * P
    if r2 > 4.0:
        raise DomainViolation(f"Q^2 + P^2 = {r2:.6g} exceeds the Bloch disk bound 4")
    return r2


def h_classical(x: ClassicalState, params: ModelParams) -> float:
    """Scaled energy epsilon = h(x) of a phase-space point."""
    r2 = _check_domain(x.Q, x.P)
    f = math.sqrt(1.0 - 0.25 * r2)
    return (
        0.5 * params.omega * (x.q * x.q + x.p * x.p)
        + 0.5 * params.omega0 * r2
        - params.omega0
        + params.gamma * (x.q * x.q - x.p * x.p) * x.Q * f
    )


def gradient(x: ClassicalState, params: ModelParams) -> tuple[float, float, float, float]:
    """Closed-form partials (dh/dq, dh/dp, dh/dQ, dh/dP).

    The square-root factor makes the Q, P derivatives singular on the disk
    edge; points within 1e-9 of it are rejected.
    """
    r2 = _check_domain(x.Q, x.P)
    if r2 > 4.0 - EDGE_MARGIN:
        raise BoundarySingularity(
            f"Q^2 + P^2 = {r2:.12g} is within {EDGE_MARGIN} of the disk edge"
        )
    f = math.sqrt(1.0 - 0.25 * r2)
    w, w0, g = params.omega, params.omega0, params.gamma
    d = x.q * x.q - x.p * x.p
    gQf = g * x.Q * f
    g4f = g * d / (4.0 * f)
    return (
        x.q * (w + 2.0 * gQf),
        x.p * (w - 2.0 * gQf),
        w0 * x.Q + g * d * f - g4f * x.Q * x.Q,
        w0 * x.P - g4f * x.Q * x.P,
    )


def equations_of_motion(x: ClassicalState, params: ModelParams) -> tuple[float, float, float, float]:
    """Hamilton's equations (dq/dt, dp/dt, dQ/dt, dP/dt)."""
    hq, hp, hQ, hP = gradient(x, params)
    return (hp, -hq, hP, -hQ)


def _make_rhs(params: ModelParams):
    """Raw-array flow field for the integrator (edge-clamped, never raises)."""
    w, w0, g = params.omega, params.omega0, params.gamma

    def rhs(t, y):
        q, p, Q, P = y
        f2 = 1.0 - 0.25 * (Q * Q + P * P)
        f = math.sqrt(f2) if f2 > 1e-24 else 1e-12
        d = q * q - p * p
        gQf = g * Q * f
        g4f = g * d / (4.0 * f)
        return (
            p * (w - 2.0 * gQf),
            -q * (w + 2.0 * gQf),
            w0 * P - g4f * Q * P,
            -(w0 * Q + g * d * f - g4f * Q * Q),
        )

    return rhs


def classical_jx(Q: float, P: float) -> float:
    """Mean-field spin projection j_x(Q, P) = Q sqrt(1 - (Q^2 + P^2)/4)."""
    return Q * math.sqrt(1.0 - 0.25 * (Q * Q + P * P))


def q_plus(epsilon: float, p: float, Q: float, P: float, params: ModelParams) -> float:
    """Nonnegative root of h(q, p, Q, P) = epsilon in q.

    Raises OutsideShell when the point does not reach the shell.  Requires
    the normal phase, which keeps the q^2 coefficient positive.
    """
    params.require_normal_phase()
    r2 = _check_domain(Q, P)
    f = math.sqrt(1.0 - 0.25 * r2)
    den = 0.5 * params.omega + params.gamma * Q * f
    num = (
        epsilon
        + params.omega0
        - 0.5 * params.omega0 * r2
        - p * p * (0.5 * params.omega - params.gamma * Q * f)
    )
    if num < 0.0:
        raise OutsideShell(
            f"no real root at (p={p}, Q={Q}, P={P}) on the shell epsilon={epsilon}"
        )
    return math.sqrt(num / den)


def sample_shell(
    epsilon: float,
    grid_spec: ShellSampling,
    params: ModelParams,
    seed: int | None = None,
) -> list[ClassicalState]:
    """Initial conditions on the shell: p0 = 0, q0 = q_+(epsilon, 0, Q0, P0).

    (Q0, P0) come from a grid or a seeded-uniform scatter over the open
    Bloch disk; points without a real root are dropped.
    """
    candidates: list[tuple[float, float]] = []
    if grid_spec.kind == "grid":
        axis = np.linspace(-2.0, 2.0, grid_spec.count + 2)[1:-1]
        for Q0 in axis:
            for P0 in axis:
                if Q0 * Q0 + P0 * P0 < 4.0:
                    candidates.append((float(Q0), float(P0)))
    else:
        rng = np.random.default_rng(seed)
        attempts = 0
        found = 0
        while found < grid_spec.count and attempts < 10_000 * grid_spec.count:
            Q0, P0 = rng.uniform(-2.0, 2.0, size=2)
            attempts += 1
            if Q0 * Q0 + P0 * P0 >= 4.0:
                continue
            try:
                q_plus(epsilon, 0.0, Q0, P0, params)
            except OutsideShell:
                continue
            candidates.append((float(Q0), float(P0)))
            found += 1

    states = []
    for Q0, P0 in candidates:
        try:
            q0 = q_plus(epsilon, 0.0, Q0, P0, params)
        except OutsideShell:
            continue
        states.append(ClassicalState(q0, 0.0, Q0, P0))
    if not states:
        raise EmptyShell(f"no sampled point reaches the shell epsilon={epsilon}")
    return states


def integrate(
    x0: ClassicalState,
    t_max: float = DEFAULT_T_MAX,
    tol: float = DEFAULT_TOL,
    params: ModelParams = None,
    truncate_on_exit: bool = False,
) -> Trajectory:
    """Adaptive high-order integration with dense output.

    Uses an 8th-order embedded Runge-Kutta pair; the run fails with
    DomainExit if the orbit reaches the Bloch-disk edge (the (Q, P) chart is
    singular there), and StepFailure if the stepper gives up.  With
    ``truncate_on_exit`` an edge hit instead returns the valid segment up to
    the exit time.
    """
    eps0 = h_classical(x0, params)

    def edge_event(t, y):
        return (4.0 - EDGE_MARGIN) - (y[2] * y[2] + y[3] * y[3])

    edge_event.terminal = True
    sol = solve_ivp(
        _make_rhs(params),
        (0.0, t_max),
        x0.as_array(),
        method="DOP853",
        rtol=tol,
        atol=tol * 1e-2,
        dense_output=True,
        events=edge_event,
    )
    if sol.status == -1:
        raise StepFailure(f"integration failed at t={sol.t[-1]:.6g}: {sol.message}")
    if sol.status == 1 and not truncate_on_exit:
        raise DomainExit(f"trajectory hit the Bloch-disk edge at t={sol.t_events[0][0]:.6g}")
    states = sol.y.T
    energies = np.array(
        [h_classical(ClassicalState.from_array(y), params) for y in states]
    )
    drift = float(np.max(np.abs(energies - eps0)))
    return Trajectory(sol.t, states, eps0, drift, sol.sol)


def poincare_section(
    traj: Trajectory,
    params: ModelParams,
    p_tol: float = 1e-10,
    max_crossings: int = MAX_CROSSINGS,
) -> np.ndarray:
    """Crossings of the surface p = 0 with q > 0, projected onto (Q, P).

    Sign changes of p between stored steps are refined by bisection on the
    dense output until |p| <= p_tol.  Returns rows (t, Q, P).
    """
    t, y = traj.times, traj.states
    crossings = []

    def record(tc, yc):
        if yc[0] > 0.0:
            crossings.append((tc, yc[2], yc[3]))

    if abs(y[0, 1]) <= p_tol:
        record(t[0], y[0])
    p = y[:, 1]
    for i in range(len(t) - 1):
        if len(crossings) >= max_crossings:
            break
        a, b = p[i], p[i + 1]
        if abs(b) <= p_tol:
            record(t[i + 1], y[i + 1])
            continue
        if a * b < 0.0 and abs(a) > p_tol:
            ta, tb = t[i], t[i + 1]
            fa = a
            for _ in range(200):
                tm = 0.5 * (ta + tb)
                fm = traj.sol(tm)[1]
                if abs(fm) <= p_tol:
                    break
                if fa * fm < 0.0:
                    tb = tm
                else:
                    ta, fa = tm, fm
            record(tm, traj.sol(tm))
    return np.array(crossings).reshape(-1, 3)


def section_for_shell(
    epsilon: float,
    params: ModelParams,
    sampling: ShellSampling,
    t_max: float = DEFAULT_T_MAX,
    tol: float = DEFAULT_TOL,
    seed: int | None = None,
) -> list[np.ndarray]:
    """Poincare sections for an ensemble of shell-sampled initial conditions.

    Orbits that reach the Bloch-disk edge contribute their segment up to the
    exit time (high shells can pass arbitrarily close to the chart
    singularity; discarding them entirely would bias the ensemble).
    """
    sections = []
    for x0 in sample_shell(epsilon, sampling, params, seed=seed):
        traj = integrate(x0, t_max=t_max, tol=tol, params=params, truncate_on_exit=True)
        sections.append(poincare_section(traj, params))
    return sections


def accessible_boundary(
    epsilon: float, params: ModelParams, n_theta: int = 256
) -> np.ndarray:
    """Locus in (Q, P) where q_+ marginally exists at p = 0.

    Traced numerically by bisecting along rays from the origin; rows are
    (Q, P).  Rays that stay reachable all the way to the disk edge stop at
    radius 2.
    """

    def reachable(r, theta):
        Q, P = r * math.cos(theta), r * math.sin(theta)
        try:
            q_plus(epsilon, 0.0, Q, P, params)
        except OutsideShell:
            return False
        return True

    r_edge = 2.0 * (1.0 - 1e-12)
    points = []
    for k in range(n_theta):
        theta = 2.0 * math.pi * k / n_theta
        if not reachable(0.0, theta):
            continue  # shell empty along this ray (cannot happen for epsilon >= -omega0)
        if reachable(r_edge, theta):
            points.append((r_edge * math.cos(theta), r_edge * math.sin(theta)))
            continue
        lo, hi = 0.0, r_edge
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if reachable(mid, theta):
                lo = mid
            else:
                hi = mid
        points.append((lo * math.cos(theta), lo * math.sin(theta)))
    if not points:
        raise EmptyShell(f"shell epsilon={epsilon} is empty")
    return np.array(points)


def bloch_boundary(n_theta: int = 256) -> np.ndarray:
    """The bare Bloch-disk edge Q^2 + P^2 = 4, for plotting alongside sections."""
    theta = 2.0 * np.pi * np.arange(n_theta) / n_theta
    return np.column_stack((2.0 * np.cos(theta), 2.0 * np.sin(theta)))


def occupancy_fraction(points: np.ndarray, radius: float, n_cells: int = 100) -> float:
    """Fraction of grid cells inside the accessible circle visited by points.

    ``points`` are (Q, P) rows; the grid spans [-radius, radius]^2 with
    n_cells per side, and only cells whose centers lie inside the circle
    count toward the denominator.
    """
    centers = (np.arange(n_cells) + 0.5) * (2.0 * radius / n_cells) - radius
    cx, cy = np.meshgrid(centers, centers, indexing="ij")
    inside = cx * cx + cy * cy < radius * radius
    total = int(np.count_nonzero(inside))
    if total == 0:
        return 0.0
    occupied = np.zeros((n_cells, n_cells), dtype=bool)
    if len(points):
        ij = np.floor((points + radius) / (2.0 * radius / n_cells)).astype(int)
        ok = (ij >= 0).all(axis=1) & (ij < n_cells).all(axis=1)
        occupied[ij[ok, 0], ij[ok, 1]] = True
    return float(np.count_nonzero(occupied & inside)) / total
