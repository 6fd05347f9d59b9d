"""School summary statistics and pattern-signature extraction."""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .core import Pattern, SimParams, SwarmState


class EmptySchoolError(ValueError):
    """Raised when a statistic is requested for a school with no survivors."""


def _alive_arrays(state: SwarmState):
    a = state.alive
    if not a.any():
        raise EmptySchoolError("no prey alive")
    return state.positions[a], state.velocities[a]


def school_center(state: SwarmState):
    """Mean position and mean velocity of the alive prey."""
    x, v = _alive_arrays(state)
    return x.mean(axis=0), v.mean(axis=0)


def school_diameter(state: SwarmState) -> float:
    """Largest distance from an alive prey to the school centre."""
    x, _ = _alive_arrays(state)
    dev = x - x.mean(axis=0)
    return float(np.sqrt(np.einsum("ij,ij->i", dev, dev).max()))


def velocity_std(state: SwarmState) -> float:
    """Root-mean-square deviation of alive velocities from their mean."""
    _, v = _alive_arrays(state)
    dev = v - v.mean(axis=0)
    return float(np.sqrt(np.einsum("ij,ij->", dev, dev) / len(v)))


def count_subgroups(state: SwarmState, link_dist: float) -> int:
    """Connected components of the proximity graph ``|x_i - x_j| <= link_dist``."""
    if link_dist <= 0:
        raise ValueError("link_dist must be positive")
    x = state.positions[state.alive]
    if len(x) == 0:
        return 0
    diff = x[:, None, :] - x[None, :, :]
    adj = np.einsum("ijk,ijk->ij", diff, diff) <= link_dist * link_dist
    n_comp, _ = connected_components(csr_matrix(adj), directed=False)
    return int(n_comp)


def classify_pattern(
    diam_series: Sequence[float],
    vstd_series: Optional[Sequence[float]],
    group_series: Sequence[int],
    params: Optional[SimParams] = None,
) -> Pattern:
    """Rule-based label for a recorded run.

    Rules are tried in order: Scattered, SplitReunion, SplitTwoGroups,
    MaintainFormation.  ``vstd_series`` is accepted for interface symmetry;
    the current rules read only diameters and group counts.
    """
    params = SimParams() if params is None else params
    diam = np.asarray(diam_series, dtype=float)
    groups = np.asarray(group_series, dtype=int)
    if len(diam) == 0 or len(groups) == 0:
        return Pattern.UNCLASSIFIED
    d0, d_end = diam[0], diam[-1]
    g_end = groups[-1]

    if d_end > params.scatter_ratio * d0 and g_end > 2:
        return Pattern.SCATTERED
    if (groups[1:-1] >= 2).any() and g_end == 1 and d_end < params.reunion_ratio * d0:
        return Pattern.SPLIT_REUNION
    if g_end == 2:
        return Pattern.SPLIT_TWO_GROUPS
    if (groups == 1).all() and abs(d_end - d0) <= params.maintain_tol * d0:
        return Pattern.MAINTAIN_FORMATION
    return Pattern.UNCLASSIFIED
