"""Seeded random streams for initial conditions and Wiener increments.

All randomness goes through :class:`NoiseSource`, a thin wrapper over numpy's
counter-based Philox generator.  Child streams are a pure function of
``(seed, index)`` so Monte Carlo trials can be scheduled in any order.
"""

from __future__ import annotations

import math
import secrets

import numpy as np

U64_MASK = (1 << 64) - 1


def entropy_seed() -> int:
    """Fresh 64-bit seed from system entropy."""
    return secrets.randbits(64)


def derive_seed(base_seed: int, index: int) -> int:
    """64-bit seed of child stream ``index``; a pure function of its inputs."""
    ss = np.random.SeedSequence([int(base_seed), int(index)])
    return int(ss.generate_state(1, np.uint64)[0])


class NoiseSource:
    def __init__(self, seed: int):
        seed = int(seed)
        if not 0 <= seed <= U64_MASK:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
        self.seed = seed
        self._rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))

    def child(self, index: int) -> "NoiseSource":
        """Independent stream for trial ``index``; does not touch this stream."""
        return NoiseSource(derive_seed(self.seed, index))

    def standard_normal(self, shape) -> np.ndarray:
        return self._rng.standard_normal(shape)

    def uniform(self, low: float, high: float, shape) -> np.ndarray:
        return self._rng.uniform(low, high, shape)


def wiener_increments(src: NoiseSource, rows: int, dims: int, sigma_w: float, dt: float) -> np.ndarray:
    """``sigma_w * sqrt(dt) * Z`` with ``Z`` a rows x dims standard-normal draw."""
    z = src.standard_normal((rows, dims))
    return (sigma_w * math.sqrt(dt)) * z


def uniform_positions(src: NoiseSource, n: int, dims: int, half_width: float) -> np.ndarray:
    if half_width <= 0:
        raise ValueError("half_width must be positive")
    return src.uniform(-half_width, half_width, (n, dims))


def uniform_direction(src: NoiseSource, dims: int) -> np.ndarray:
    """Unit vector uniformly distributed on the sphere S^(dims-1)."""
    while True:
        z = src.standard_normal(dims)
        norm = float(np.linalg.norm(z))
        if norm > 1e-12:
            return z / norm
