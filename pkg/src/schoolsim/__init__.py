"""Stochastic predator-avoidance fish schooling simulator."""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    DivergenceError,
    Pattern,
    PatternPreset,
    PredatorState,
    SimParams,
    Strategy,
    SwarmState,
    ValidationError,
    pattern_preset,
    sweep_default,
    validate_params,
)
from .noise import NoiseSource, derive_seed  # noqa: E402

__all__ = [
    "DivergenceError", "NoiseSource", "Pattern", "PatternPreset", "PredatorState",
    "SimParams", "Strategy", "SwarmState", "ValidationError", "derive_seed",
    "pattern_preset", "sweep_default", "validate_params",
]
