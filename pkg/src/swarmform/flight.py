"""Double-integrator swarm flight simulation with three controllers.

The logarithmic and quadratic controllers are consensus-style formation
laws on a connected undirected graph; only the leader carries the
absolute position term toward its desired slot, so the swarm tracks the
target through the leader. The APF controller attracts every member to
its own absolute slot and adds short-range pairwise repulsion.

The logarithmic law saturates: each edge contributes at most k1/2 of
force regardless of the formation error, which is what bounds control
authority (and energy) during large transitions. Its Lyapunov function

    V = (k1/2) * sum_edges ln(1 + |e_ij|^2) + (1/2) * sum |v_i|^2
        + (kp/2) * |P_L - P_L_des|^2

decreases monotonically along trajectories for a stationary target
(dV/dt = -k2 * sum |v_i|^2); the k1/2 and kp/2 coefficients are exactly
the ones that make the cross terms cancel.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels


@dataclass
class SwarmState:
    positions: np.ndarray      # (n, 3) m
    velocities: np.ndarray     # (n, 3) m/s
    time: float = 0.0

    def __post_init__(self):
        self.positions = np.atleast_2d(np.asarray(self.positions, dtype=float))
        self.velocities = np.atleast_2d(np.asarray(self.velocities, dtype=float))
        if self.positions.shape != self.velocities.shape or self.positions.shape[1] != 3:
            raise ValueError("positions and velocities must both be (n, 3)")
        if not (np.isfinite(self.positions).all() and np.isfinite(self.velocities).all()):
            raise ValueError("swarm state must be finite")

    @property
    def n(self) -> int:
        return self.positions.shape[0]


def complete_graph(n: int) -> np.ndarray:
    return np.ones((n, n)) - np.eye(n)


def _connected(adj: np.ndarray) -> bool:
    n = adj.shape[0]
    seen = {0}
    frontier = [0]
    while frontier:
        i = frontier.pop()
        for j in range(n):
            if adj[i, j] != 0 and j not in seen:
                seen.add(j)
                frontier.append(j)
    return len(seen) == n


@dataclass
class ControlGains:
    k1: float = 4.0
    k2: float = 1.5
    kp: float = 10.0
    masses: np.ndarray | None = None   # kg per member; default 1.0
    leader: int = 0
    graph: np.ndarray | None = None    # symmetric adjacency; default complete

    def __post_init__(self):
        if min(self.k1, self.k2, self.kp) <= 0:
            raise ValueError("gains must be positive")

    def resolved(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        """(masses, adjacency) materialized for an n-member swarm."""
        masses = np.ones(n) if self.masses is None else np.asarray(self.masses, dtype=float)
        if masses.shape != (n,) or (masses <= 0).any():
            raise ValueError("masses must be n positive values")
        adj = complete_graph(n) if self.graph is None else np.asarray(self.graph, dtype=float)
        if adj.shape != (n, n) or not np.allclose(adj, adj.T):
            raise ValueError("graph must be a symmetric n x n adjacency")
        if not 0 <= self.leader < n:
            raise ValueError(f"leader index {self.leader} out of range")
        if not _connected(adj):
            raise ValueError("communication graph must be connected")
        return masses, adj


@dataclass
class ApfParams:
    ka: float = 10.0    # slot attraction
    kr: float = 5.0     # repulsion strength
    d0: float = 2.0     # repulsion activation distance, m
    k2: float = 1.5     # velocity damping

    def __post_init__(self):
        if min(self.ka, self.kr, self.d0, self.k2) <= 0:
            raise ValueError("APF parameters must be positive")


@dataclass
class FormationPlan:
    """Desired formation as slot offsets from the (moving) target."""

    slots: np.ndarray                          # (n, 3) offsets from target
    target_position: np.ndarray = field(default_factory=lambda: np.zeros(3))
    target_velocity: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        self.slots = np.atleast_2d(np.asarray(self.slots, dtype=float))
        self.target_position = np.asarray(self.target_position, dtype=float)
        self.target_velocity = np.asarray(self.target_velocity, dtype=float)

    @property
    def n(self) -> int:
        return self.slots.shape[0]

    def offset(self, i: int, j: int) -> np.ndarray:
        """Desired displacement d_ij between members i and j."""
        return self.slots[i] - self.slots[j]

    def target_at(self, t: float) -> np.ndarray:
        return self.target_position + t * self.target_velocity

    def desired_positions(self, t: float) -> np.ndarray:
        return self.target_at(t) + self.slots


@dataclass
class Trajectory:
    times: np.ndarray          # (steps+1,)
    positions: np.ndarray      # (steps+1, n, 3)
    velocities: np.ndarray     # (steps+1, n, 3)
    controls: np.ndarray       # (steps, n, 3)
    lyapunov: np.ndarray       # (steps+1,)
    plan: FormationPlan
    controller: str


@dataclass
class FlightMetrics:
    avg_distance: float
    avg_vel_err: float
    max_vel_err: float
    avg_final_pos_err: float
    lyapunov_trace: np.ndarray

    def __post_init__(self):
        if not self.max_vel_err >= self.avg_vel_err >= 0:
            raise ValueError("velocity-error aggregates are inconsistent")


def _formation_errors(state: SwarmState, plan: FormationPlan) -> np.ndarray:
    """(n, n, 3) array of e_ij = (P_i - P_j) - d_ij."""
    p = state.positions
    return (p[:, None, :] - p[None, :, :]) - (plan.slots[:, None, :] - plan.slots[None, :, :])


def control_log(state: SwarmState, plan: FormationPlan, gains: ControlGains) -> np.ndarray:
    """Saturating formation law: per-edge force k1*e/(1+|e|^2)."""
    _, adj = gains.resolved(state.n)
    e = _formation_errors(state, plan)
    w = adj / (1.0 + np.einsum("ijk,ijk->ij", e, e))
    u = -gains.k1 * np.einsum("ij,ijk->ik", w, e) - gains.k2 * state.velocities
    err_l = state.positions[gains.leader] - plan.desired_positions(state.time)[gains.leader]
    u[gains.leader] -= gains.kp * err_l
    return u


def control_quad(state: SwarmState, plan: FormationPlan, gains: ControlGains) -> np.ndarray:
    """Linear formation law: per-edge force k1*e (unbounded)."""
    _, adj = gains.resolved(state.n)
    e = _formation_errors(state, plan)
    u = -gains.k1 * np.einsum("ij,ijk->ik", adj, e) - gains.k2 * state.velocities
    err_l = state.positions[gains.leader] - plan.desired_positions(state.time)[gains.leader]
    u[gains.leader] -= gains.kp * err_l
    return u


def control_apf(state: SwarmState, plan: FormationPlan, apf: ApfParams,
                graph: np.ndarray | None = None) -> np.ndarray:
    """Absolute slot attraction plus short-range pairwise repulsion."""
    n = state.n
    adj = complete_graph(n) if graph is None else np.asarray(graph, dtype=float)
    u = -apf.ka * (state.positions - plan.desired_positions(state.time)) \
        - apf.k2 * state.velocities
    d = state.positions[:, None, :] - state.positions[None, :, :]
    dn = np.sqrt(np.einsum("ijk,ijk->ij", d, d))
    np.fill_diagonal(dn, np.inf)
    if ((adj > 0) & (dn < kernels._TINY)).any():
        raise FloatingPointError("coincident UAVs: repulsive force singular")
    active = (adj > 0) & (dn < apf.d0)
    coef = np.zeros_like(dn)
    coef[active] = apf.kr * (1.0 / dn[active] - 1.0 / apf.d0) / dn[active] ** 3
    return u + np.einsum("ij,ijk->ik", coef, d)


def step(state: SwarmState, forces: np.ndarray, masses: np.ndarray, dt: float) -> SwarmState:
    """Semi-implicit Euler: velocity first, then position with the new velocity."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    forces = np.asarray(forces, dtype=float)
    if not np.isfinite(forces).all():
        raise FloatingPointError("non-finite control force")
    v = state.velocities + forces / np.asarray(masses, dtype=float)[:, None] * dt
    p = state.positions + v * dt
    return SwarmState(positions=p, velocities=v, time=state.time + dt)


def lyapunov_value(state: SwarmState, plan: FormationPlan, gains: ControlGains) -> float:
    """Lyapunov candidate for the logarithmic controller (module docstring)."""
    _, adj = gains.resolved(state.n)
    e = _formation_errors(state, plan)
    sq = np.einsum("ijk,ijk->ij", e, e)
    upper = np.triu(adj, 1) > 0
    val = 0.5 * gains.k1 * float(np.log1p(sq[upper]).sum())
    val += 0.5 * float(np.sum(state.velocities ** 2))
    err_l = state.positions[gains.leader] - plan.desired_positions(state.time)[gains.leader]
    return val + 0.5 * gains.kp * float(err_l @ err_l)


_CTRL_CODES = {"log": kernels.CTRL_LOG, "quad": kernels.CTRL_QUAD, "apf": kernels.CTRL_APF}


def simulate(
    initial: SwarmState,
    plan: FormationPlan,
    controller: str,
    gains: ControlGains,
    dt: float = 0.01,
    horizon: float = 60.0,
    apf: ApfParams | None = None,
) -> Trajectory:
    """Fixed-step rollout; deterministic for fixed inputs.

    The recorded Lyapunov trace always uses the logarithmic candidate,
    so traces are comparable across controllers.
    """
    if controller not in _CTRL_CODES:
        raise ValueError(f"unknown controller {controller!r}; expected log, quad or apf")
    if dt <= 0 or horizon <= 0:
        raise ValueError("dt and horizon must be positive")
    if initial.n != plan.n:
        raise ValueError("state and plan disagree on swarm size")
    masses, adj = gains.resolved(initial.n)
    apf = apf or ApfParams()
    steps = int(round(horizon / dt))
    P, V, U, lyap = kernels.rollout(
        initial.positions, initial.velocities, plan.slots, adj, masses,
        gains.leader, _CTRL_CODES[controller],
        gains.k1, gains.k2, gains.kp, apf.ka, apf.kr, apf.d0,
        plan.target_at(initial.time), plan.target_velocity, dt, steps,
    )
    if not np.isfinite(U).all():
        raise FloatingPointError("non-finite control force during rollout")
    times = initial.time + dt * np.arange(steps + 1)
    return Trajectory(times=times, positions=P, velocities=V, controls=U,
                      lyapunov=lyap, plan=plan, controller=controller)


def metrics(traj: Trajectory) -> FlightMetrics:
    """Aggregate flight-quality metrics over a trajectory.

    avg_distance: mean over UAVs of per-step path length summed over time.
    Velocity error is measured against the target's instantaneous
    velocity; final position error against the time-varying desired slots.
    """
    if traj.positions.shape[0] < 2:
        raise ValueError("trajectory has no steps")
    deltas = np.diff(traj.positions, axis=0)
    avg_distance = float(np.linalg.norm(deltas, axis=2).sum(axis=0).mean())
    vel_err = np.linalg.norm(traj.velocities - traj.plan.target_velocity, axis=2)
    final_err = np.linalg.norm(
        traj.positions[-1] - traj.plan.desired_positions(traj.times[-1]), axis=1
    )
    return FlightMetrics(
        avg_distance=avg_distance,
        avg_vel_err=float(vel_err.mean()),
        max_vel_err=float(vel_err.max()),
        avg_final_pos_err=float(final_err.mean()),
        lyapunov_trace=traj.lyapunov,
    )
