"""Shared domain types, parameter validation and the pattern presets."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, fields, replace
from typing import Any, Optional

import numpy as np


class ValidationError(ValueError):
    """Raised when a parameter set violates a model constraint."""


class DivergenceError(RuntimeError):
    """Raised when the explicit integrator produces non-finite values."""

    def __init__(self, message: str, step: Optional[int] = None):
        super().__init__(message if step is None else f"{message} (step {step})")
        self.step = step


class Strategy(str, enum.Enum):
    CENTER = "center"
    NEAREST = "nearest"

    @classmethod
    def parse(cls, value: "str | Strategy") -> "Strategy":
        if isinstance(value, Strategy):
            return value
        key = str(value).strip().lower()
        aliases = {
            "center": cls.CENTER, "centerattack": cls.CENTER, "i": cls.CENTER, "1": cls.CENTER,
            "nearest": cls.NEAREST, "nearestattack": cls.NEAREST, "ii": cls.NEAREST, "2": cls.NEAREST,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ValidationError(f"unknown strategy {value!r}") from None


class Pattern(str, enum.Enum):
    SPLIT_REUNION = "SplitReunion"
    SPLIT_TWO_GROUPS = "SplitTwoGroups"
    SCATTERED = "Scattered"
    MAINTAIN_FORMATION = "MaintainFormation"
    UNCLASSIFIED = "Unclassified"

    @property
    def roman(self) -> str:
        return _ROMAN.get(self, "")

    @classmethod
    def parse(cls, value: "str | Pattern") -> "Pattern":
        if isinstance(value, Pattern):
            return value
        key = str(value).strip()
        for p in cls:
            if key.lower() in (p.value.lower(), p.roman.lower()) and key:
                return p
        raise ValidationError(f"unknown pattern {value!r}")


_ROMAN = {
    Pattern.SPLIT_REUNION: "I",
    Pattern.SPLIT_TWO_GROUPS: "II",
    Pattern.SCATTERED: "III",
    Pattern.MAINTAIN_FORMATION: "IV",
}


@dataclass(frozen=True)
class SimParams:
    """Every coefficient, threshold and integration setting of one run.

    Optional knobs left as ``None`` resolve to geometry-dependent defaults
    (see :meth:`resolved_half_width` and :meth:`resolved_spawn_dist`).
    """

    n_prey: int = 30
    dims: int = 2
    # prey-prey coupling
    alpha: float = 15.0
    beta: float = 0.5
    p_exp: float = 4.0
    q_exp: float = 6.0
    r_crit: float = 1.0
    k_friction: float = 0.5
    # prey flight
    delta: float = 1.0
    r1_flee: float = 3.0
    theta1: float = 1.0
    # predator pursuit
    r2_hunt: float = 5.0
    theta2: float = 0.5
    gamma1: float = 0.08
    gamma2: float = 0.1
    strategy: Strategy = Strategy.NEAREST
    m_catch: float = 0.5
    # noise and integration
    sigma_prey: float = 0.05
    sigma_pred: float = 0.05
    sigma_school: Optional[float] = None
    dt: float = 5e-3
    t_max: int = 3000
    t_max_school: int = 2000
    v_max: float = 2.0
    cap_prey_velocity: bool = True
    eps_dist: float = 1e-8
    # initial geometry
    half_width: Optional[float] = None
    spawn_dist: Optional[float] = None
    # diagnostics
    link_dist: Optional[float] = None
    scatter_ratio: float = 3.0
    reunion_ratio: float = 1.5
    maintain_tol: float = 0.25

    def __post_init__(self):
        object.__setattr__(self, "strategy", Strategy.parse(self.strategy))

    def resolved_half_width(self) -> float:
        if self.half_width is not None:
            return self.half_width
        return self.r_crit * self.n_prey ** (1.0 / self.dims)

    def resolved_spawn_dist(self) -> float:
        return self.spawn_dist if self.spawn_dist is not None else 2.0 * self.r1_flee

    def resolved_sigma_school(self) -> float:
        """Noise magnitude of the schooling phase; defaults to ``sigma_prey``."""
        return self.sigma_prey if self.sigma_school is None else self.sigma_school

    def resolved_link_dist(self) -> float:
        return self.link_dist if self.link_dist is not None else 3.0 * self.r_crit

    def with_(self, **changes: Any) -> "SimParams":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            out[f.name] = value.value if isinstance(value, enum.Enum) else value
        return out


_POSITIVE = (
    "alpha", "beta", "delta", "r_crit", "theta1", "theta2",
    "gamma1", "gamma2", "dt", "v_max", "eps_dist",
    "scatter_ratio", "reunion_ratio", "maintain_tol",
)
_NONNEGATIVE = ("k_friction", "sigma_prey", "sigma_pred")
_OPTIONAL_POSITIVE = ("half_width", "spawn_dist", "link_dist")


def _is_int(value) -> bool:
    return isinstance(value, (int, np.integer)) and not isinstance(value, bool)


def validate_params(raw: SimParams) -> SimParams:
    """Return ``raw`` unchanged if every constraint holds.

    Raises :class:`ValidationError` naming the first violated constraint.
    """
    if not _is_int(raw.n_prey) or raw.n_prey < 1:
        raise ValidationError(f"n_prey must be a positive integer, got {raw.n_prey!r}")
    if raw.dims not in (2, 3) or not _is_int(raw.dims):
        raise ValidationError(f"dims must be 2 or 3, got {raw.dims!r}")
    for name in ("t_max", "t_max_school"):
        value = getattr(raw, name)
        if not _is_int(value) or value < (1 if name == "t_max" else 0):
            raise ValidationError(f"{name} must be a positive integer, got {value!r}")

    for name in _POSITIVE:
        value = getattr(raw, name)
        if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
            raise ValidationError(f"{name} must be positive, got {value!r}")
    for name in _NONNEGATIVE:
        value = getattr(raw, name)
        if not (isinstance(value, (int, float)) and math.isfinite(value) and value >= 0):
            raise ValidationError(f"{name} must be nonnegative, got {value!r}")
    for name in _OPTIONAL_POSITIVE:
        value = getattr(raw, name)
        if value is not None and not (math.isfinite(value) and value > 0):
            raise ValidationError(f"{name} must be positive, got {value!r}")
    if raw.sigma_school is not None and not (math.isfinite(raw.sigma_school) and raw.sigma_school >= 0):
        raise ValidationError(f"sigma_school must be nonnegative, got {raw.sigma_school!r}")

    if not raw.p_exp > 1:
        raise ValidationError(f"p must exceed 1, got p={raw.p_exp}")
    if not raw.q_exp > raw.p_exp:
        raise ValidationError(f"q must exceed p, got p={raw.p_exp}, q={raw.q_exp}")
    if not raw.r1_flee > raw.r_crit:
        raise ValidationError(f"R1 must exceed r, got R1={raw.r1_flee}, r={raw.r_crit}")
    if not raw.r2_hunt > raw.r_crit:
        raise ValidationError(f"R2 must exceed r, got R2={raw.r2_hunt}, r={raw.r_crit}")
    if not 0.01 <= raw.m_catch <= 1:
        raise ValidationError(f"m out of [0.01, 1], got m={raw.m_catch}")
    if not isinstance(raw.cap_prey_velocity, bool):
        raise ValidationError("cap_prey_velocity must be a boolean")
    return raw


@dataclass(frozen=True)
class SwarmState:
    """Positions, velocities and alive flags of the prey at one step."""

    positions: np.ndarray
    velocities: np.ndarray
    alive: np.ndarray = field(default=None)

    def __post_init__(self):
        pos = np.array(self.positions, dtype=float)
        vel = np.array(self.velocities, dtype=float)
        if pos.ndim != 2 or pos.shape != vel.shape:
            raise ValueError(f"positions {pos.shape} and velocities {vel.shape} must be matching N x d arrays")
        alive = np.ones(len(pos), dtype=bool) if self.alive is None else np.array(self.alive, dtype=bool)
        if alive.shape != (len(pos),):
            raise ValueError("alive mask must have one flag per prey")
        for arr in (pos, vel, alive):
            arr.flags.writeable = False
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "velocities", vel)
        object.__setattr__(self, "alive", alive)

    @property
    def n(self) -> int:
        return len(self.positions)

    @property
    def dims(self) -> int:
        return self.positions.shape[1]

    @property
    def n_alive(self) -> int:
        return int(self.alive.sum())

    def survivors(self) -> "SwarmState":
        """Compacted copy holding only alive prey."""
        a = self.alive
        return SwarmState(self.positions[a], self.velocities[a])


@dataclass(frozen=True)
class PredatorState:
    position: np.ndarray
    velocity: np.ndarray

    def __post_init__(self):
        pos = np.array(self.position, dtype=float).reshape(-1)
        vel = np.array(self.velocity, dtype=float).reshape(-1)
        if pos.shape != vel.shape:
            raise ValueError("predator position and velocity must share a shape")
        pos.flags.writeable = False
        vel.flags.writeable = False
        object.__setattr__(self, "position", pos)
        object.__setattr__(self, "velocity", vel)


@dataclass(frozen=True)
class PatternPreset:
    label: Pattern
    overrides: dict
    strategy: Strategy

    def apply(self, base: Optional[SimParams] = None) -> SimParams:
        base = SimParams() if base is None else base
        return replace(base, strategy=self.strategy, **self.overrides)


# alpha, beta, delta, p, theta1, theta2, gamma1, gamma2
_PATTERN_ROWS = {
    Pattern.SPLIT_REUNION: ((15.0, 0.5, 1.0, 4.0, 1.0, 0.5, 0.08, 0.1), Strategy.NEAREST),
    Pattern.SPLIT_TWO_GROUPS: ((1.0, 0.5, 1.0, 4.0, 5.0, 1.0, 0.1, 0.1), Strategy.CENTER),
    Pattern.SCATTERED: ((1.0, 0.5, 5.0, 2.0, 1.0, 2.0, 1.0, 0.1), Strategy.NEAREST),
    Pattern.MAINTAIN_FORMATION: ((2.0, 0.5, 0.1, 2.0, 1.0, 1.0, 5.0, 10.0), Strategy.CENTER),
}
_ROW_KEYS = ("alpha", "beta", "delta", "p_exp", "theta1", "theta2", "gamma1", "gamma2")


def pattern_preset(label: "str | Pattern") -> PatternPreset:
    """Coefficient row and hunting strategy for one of the four evasive patterns.

    ``q`` is not part of the coefficient row; it is tied to ``p + 2``.
    """
    label = Pattern.parse(label)
    if label not in _PATTERN_ROWS:
        raise ValidationError(f"no preset for {label.value}")
    row, strategy = _PATTERN_ROWS[label]
    overrides = dict(zip(_ROW_KEYS, row))
    overrides["q_exp"] = overrides["p_exp"] + 2.0
    return PatternPreset(label=label, overrides=overrides, strategy=strategy)


# coefficients held fixed across the school-size sweeps
SWEEP_DEFAULT = {
    "alpha": 15.0, "beta": 1.0, "delta": 1.0, "p_exp": 4.0, "q_exp": 6.0,
    "theta1": 0.1, "theta2": 0.5, "gamma1": 0.1, "gamma2": 0.1,
}


def sweep_default(base: Optional[SimParams] = None, strategy: "str | Strategy" = Strategy.CENTER) -> SimParams:
    base = SimParams() if base is None else base
    return replace(base, strategy=Strategy.parse(strategy), **SWEEP_DEFAULT)
