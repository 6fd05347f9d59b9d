"""Per-trial survival statistics: eaten probability and average living time."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np


@dataclass
class Frame:
    """Snapshot of the full system at one recorded step."""

    step: int
    positions: np.ndarray
    velocities: np.ndarray
    alive: np.ndarray
    predator_position: np.ndarray
    predator_velocity: np.ndarray


@dataclass
class TrialRecord:
    """Outcome of one predation run.

    ``n_survived[t]`` is the survivor count after step ``t`` (index 0 is the
    initial school).  A run that ends early because every prey was eaten has
    a short series; :func:`padded_survived` extends it to ``t_max``.
    """

    n_initial: int
    t_max: int
    n_survived: np.ndarray
    eaten_times: Dict[int, int] = field(default_factory=dict)
    metric_steps: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))
    diameter: np.ndarray = field(default_factory=lambda: np.zeros(0))
    velocity_std: np.ndarray = field(default_factory=lambda: np.zeros(0))
    n_groups: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))
    frames: List[Frame] = field(default_factory=list)
    seed: Optional[int] = None
    trial_index: Optional[int] = None

    def __post_init__(self):
        self.n_survived = np.asarray(self.n_survived, dtype=int)
        if len(self.n_survived) == 0 or self.n_survived[0] != self.n_initial:
            raise ValueError("n_survived must start at n_initial")
        if (np.diff(self.n_survived) > 0).any():
            raise ValueError("n_survived must be nonincreasing")
        if len(self.eaten_times) != self.n_initial - self.n_survived[-1]:
            raise ValueError("eaten_times does not match the survivor count")

    @property
    def n_eaten(self) -> int:
        return len(self.eaten_times)


def padded_survived(rec: TrialRecord) -> np.ndarray:
    """Survivor counts for steps ``0..t_max``; missing tail repeats the last value."""
    s = rec.n_survived
    if len(s) >= rec.t_max + 1:
        return s[: rec.t_max + 1]
    return np.concatenate([s, np.full(rec.t_max + 1 - len(s), s[-1], dtype=int)])


def p_eaten_series(rec: TrialRecord) -> np.ndarray:
    """Probability of an individual being eaten by each step, built recursively."""
    s = padded_survived(rec)
    n = rec.n_initial
    out = np.zeros(len(s))
    for t in range(1, len(s)):
        out[t] = out[t - 1] + (s[t - 1] - s[t]) / n
    return out


def p_eaten_final(rec: TrialRecord) -> float:
    return (rec.n_initial - int(padded_survived(rec)[-1])) / rec.n_initial


def living_times(rec: TrialRecord) -> np.ndarray:
    """Per-prey living time in steps; survivors are credited ``t_max``."""
    t = np.full(rec.n_initial, rec.t_max, dtype=float)
    for i, step in rec.eaten_times.items():
        t[i] = step
    return t


def average_living_time(rec: TrialRecord) -> float:
    if rec.n_eaten == 0:
        return float(rec.t_max)
    return float(living_times(rec).mean())
