"""Predator-prey phase: prey flight, the two hunting strategies, and capture."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List

import numpy as np

from .core import DivergenceError, PredatorState, SimParams, Strategy, SwarmState
from .metrics import count_subgroups, school_center, school_diameter, velocity_std
from .noise import NoiseSource, uniform_direction, wiener_increments
from .school import cap_speed, check_finite, interaction_sums
from .survival import Frame, TrialRecord

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class StepEvents:
    step_index: int
    eaten_ids: List[int] = field(default_factory=list)


def flight_force(xi, y, params: SimParams) -> np.ndarray:
    """Repulsion of prey at ``xi`` away from the predator at ``y``."""
    dx = np.asarray(xi, dtype=float) - np.asarray(y, dtype=float)
    dist = max(float(np.linalg.norm(dx)), params.eps_dist)
    return params.delta * (params.r1_flee / dist) ** params.theta1 * dx


def _flight_forces(x: np.ndarray, y: np.ndarray, params: SimParams) -> np.ndarray:
    dx = x - y
    dist = np.maximum(np.sqrt(np.einsum("ij,ij->i", dx, dx)), params.eps_dist)
    return (params.delta * (params.r1_flee / dist) ** params.theta1)[:, None] * dx


def _pursuit(dy: np.ndarray, dv: np.ndarray, params: SimParams) -> np.ndarray:
    # rows of dy are y - x_j, rows of dv are v - v_j
    dist = np.maximum(np.sqrt(np.einsum("ij,ij->i", dy, dy)), params.eps_dist)
    w = (params.r2_hunt / dist) ** params.theta2
    return -w[:, None] * (params.gamma1 * dy + params.gamma1 * params.gamma2 * dv)


def hunting_force_center(state: SwarmState, pred: PredatorState, params: SimParams) -> np.ndarray:
    """Pull toward the mean position and velocity of the surviving prey."""
    xc, vc = school_center(state)
    return _pursuit((pred.position - xc)[None, :], (pred.velocity - vc)[None, :], params)[0]


def hunting_force_nearest(state: SwarmState, pred: PredatorState, params: SimParams) -> np.ndarray:
    """Average of distance-weighted pulls toward every surviving prey.

    Nearer prey carry larger weights; with ``theta2 > 1`` the closest
    individual dominates the sum.
    """
    a = state.alive
    if not a.any():
        raise ValueError("no prey alive")
    terms = _pursuit(pred.position - state.positions[a], pred.velocity - state.velocities[a], params)
    return terms.sum(axis=0) / len(terms)


def hunting_force(state: SwarmState, pred: PredatorState, params: SimParams) -> np.ndarray:
    if params.strategy is Strategy.CENTER:
        return hunting_force_center(state, pred, params)
    return hunting_force_nearest(state, pred, params)


def prey_acceleration(state: SwarmState, pred: PredatorState, params: SimParams) -> np.ndarray:
    """Pair interactions plus predator repulsion for alive prey; dead rows are zero."""
    acc = interaction_sums(state.positions, state.velocities, state.alive, params)
    a = state.alive
    acc[a] += _flight_forces(state.positions[a], pred.position, params)
    acc[~a] = 0.0
    return acc


def predation_step(state: SwarmState, pred: PredatorState, params: SimParams, src: NoiseSource, t: int):
    """Advance prey and predator by one step and apply the capture rule.

    Returns ``(new_state, new_pred, events)``.  Eaten prey keep their last
    position and velocity with ``alive`` cleared.
    """
    a = state.alive
    if not a.any():
        raise ValueError("no prey alive")
    dt = params.dt
    noise_prey = wiener_increments(src, state.n, state.dims, params.sigma_prey, dt)
    noise_pred = wiener_increments(src, 1, state.dims, params.sigma_pred, dt)[0]

    x = state.positions.copy()
    x[a] += state.velocities[a] * dt + noise_prey[a]
    y = pred.position + pred.velocity * dt + noise_pred

    moved = SwarmState(x, state.velocities, a)
    pred_moved = PredatorState(y, pred.velocity)
    v = state.velocities.copy()
    v[a] += prey_acceleration(moved, pred_moved, params)[a] * dt

    after = SwarmState(x, v, a)
    v_pred = pred.velocity + hunting_force(after, pred_moved, params) * dt

    if params.cap_prey_velocity:
        v[a] = cap_speed(v[a], params.v_max)
    check_finite(x, v, y, v_pred, step=t)

    gap = x - y
    caught = a & (np.sqrt(np.einsum("ij,ij->i", gap, gap)) < params.m_catch * params.r_crit)
    alive = a & ~caught
    return (
        SwarmState(x, v, alive),
        PredatorState(y, v_pred),
        StepEvents(step_index=t, eaten_ids=[int(i) for i in np.flatnonzero(caught)]),
    )


def predator_spawn(school: SwarmState, params: SimParams, src: NoiseSource) -> PredatorState:
    """Predator at rest, ``spawn_dist`` from the school centre in a uniform direction."""
    xc, _ = school_center(school)
    direction = uniform_direction(src, school.dims)
    return PredatorState(xc + params.resolved_spawn_dist() * direction, np.zeros(school.dims))


def _frame(t, state: SwarmState, pred: PredatorState) -> Frame:
    return Frame(t, state.positions, state.velocities, state.alive, pred.position, pred.velocity)


def run_predation(
    initial: SwarmState,
    pred0: PredatorState,
    params: SimParams,
    src: NoiseSource,
    record_every: int = 10,
    keep_frames: bool = False,
) -> TrialRecord:
    """Iterate :func:`predation_step` for up to ``t_max`` steps.

    Survivor counts are kept every step; metrics (and frames, if requested)
    every ``record_every`` steps plus the final step.  The run stops early
    once every prey has been eaten.
    """
    if record_every < 1:
        raise ValueError("record_every must be >= 1")
    link = params.resolved_link_dist()
    state, pred = initial, pred0
    survived = [state.n_alive]
    eaten = {}
    steps, diam, vstd, groups, frames = [], [], [], [], []

    def record(t):
        steps.append(t)
        if state.n_alive:
            diam.append(school_diameter(state))
            vstd.append(velocity_std(state))
        else:
            diam.append(0.0)
            vstd.append(0.0)
        groups.append(count_subgroups(state, link))
        if keep_frames:
            frames.append(_frame(t, state, pred))

    record(0)
    t = 0
    for t in range(1, params.t_max + 1):
        try:
            state, pred, events = predation_step(state, pred, params, src, t)
        except DivergenceError:
            log.error("predation diverged at step %d", t)
            raise
        for i in events.eaten_ids:
            eaten[i] = t
        survived.append(state.n_alive)
        if state.n_alive == 0:
            record(t)
            break
        if t % record_every == 0 or t == params.t_max:
            record(t)

    return TrialRecord(
        n_initial=initial.n_alive,
        t_max=params.t_max,
        n_survived=np.array(survived),
        eaten_times=eaten,
        metric_steps=np.array(steps, dtype=int),
        diameter=np.array(diam),
        velocity_std=np.array(vstd),
        n_groups=np.array(groups, dtype=int),
        frames=frames,
    )
