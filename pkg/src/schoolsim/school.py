"""Predator-free schooling phase.

Prey start scattered and at rest, then follow the pairwise attraction /
repulsion / velocity-matching law with linear friction until they settle
into a school.  The settled school, recentred on the origin, is the initial
condition of the predation phase.
"""

from __future__ import annotations

import numpy as np

from ._kernels import pair_sums
from .core import DivergenceError, SimParams, SwarmState
from .noise import NoiseSource, uniform_positions, wiener_increments


def pair_interaction(xi, xj, vi, vj, params: SimParams):
    """Position and velocity coupling exerted on prey ``i`` by prey ``j``.

    The position term vanishes at separation ``r_crit``, attracts beyond it
    and repels inside it.
    """
    xi, xj, vi, vj = (np.asarray(a, dtype=float) for a in (xi, xj, vi, vj))
    dx = xi - xj
    dist = max(float(np.linalg.norm(dx)), params.eps_dist)
    s = params.r_crit / dist
    sp, sq = s ** params.p_exp, s ** params.q_exp
    pos_force = -params.alpha * (sp - sq) * dx
    vel_force = -params.beta * (sp + sq) * (vi - vj)
    return pos_force, vel_force


def interaction_sums(positions, velocities, alive, params: SimParams) -> np.ndarray:
    """Sum of pair interactions over alive partners, zero rows for dead prey."""
    return pair_sums(
        positions, velocities, alive,
        params.alpha, params.beta, params.r_crit, params.p_exp, params.q_exp, params.eps_dist,
    )


def cap_speed(velocities: np.ndarray, v_max: float) -> np.ndarray:
    speed = np.sqrt(np.einsum("ij,ij->i", velocities, velocities))
    over = speed > v_max
    if over.any():
        velocities = velocities.copy()
        velocities[over] *= (v_max / speed[over])[:, None]
    return velocities


def check_finite(*arrays, step=None):
    for arr in arrays:
        if not np.isfinite(arr).all():
            raise DivergenceError("non-finite state encountered", step)


def school_step(state: SwarmState, params: SimParams, src: NoiseSource) -> SwarmState:
    """One semi-explicit Euler step of the schooling equations.

    Positions move with the pre-step velocities; velocities then update from
    the post-step positions; finally speeds above ``v_max`` are rescaled.
    """
    x, v = state.positions, state.velocities
    noise = wiener_increments(src, state.n, state.dims, params.resolved_sigma_school(), params.dt)
    x_new = x + v * params.dt + noise
    acc = interaction_sums(x_new, v, state.alive, params) - params.k_friction * v
    v_new = cap_speed(v + acc * params.dt, params.v_max)
    return SwarmState(x_new, v_new, state.alive)


def generate_school(params: SimParams, src: NoiseSource, steps: "int | None" = None) -> SwarmState:
    """Settle ``n_prey`` scattered prey into a school centred at the origin."""
    steps = params.t_max_school if steps is None else steps
    x = uniform_positions(src, params.n_prey, params.dims, params.resolved_half_width())
    state = SwarmState(x, np.zeros_like(x))
    for t in range(1, steps + 1):
        state = school_step(state, params, src)
        check_finite(state.velocities, state.positions, step=t)
    centred = state.positions - state.positions.mean(axis=0)
    return SwarmState(centred, state.velocities)
