"""Noise models and reproducible per-step sampling.

Random streams
--------------
Every realization gets its own PCG64 generator seeded from
``SeedSequence(master_seed, spawn_key=(realization_index,))``. This is the
same derivation ``SeedSequence.spawn`` uses, so child streams are
statistically independent and the mapping (seed, index) -> stream is stable
across runs, worker counts and execution order.
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass

import numpy as np

from .operators import LinkSet, StepNoise
from .state_space import Family, WalkSpec

__all__ = [
    "NoiseKind",
    "NoiseSpec",
    "realization_rng",
    "derive_seed",
    "realize_step_noise",
    "sample_link_mask",
    "strength_from_delta",
    "edge_count",
]


class NoiseKind(str, enum.Enum):
    NONE = "none"
    SYSTEMATIC = "systematic"  # model I
    GAUSSIAN = "gaussian"  # model II
    BROKEN_LINK = "broken-link"  # model III
    UNMARKED_SYSTEMATIC = "unmarked-systematic"
    UNMARKED_GAUSSIAN = "unmarked-gaussian"

    @property
    def is_random(self) -> bool:
        return self in (NoiseKind.GAUSSIAN, NoiseKind.BROKEN_LINK, NoiseKind.UNMARKED_GAUSSIAN)

    @property
    def unmarked(self) -> bool:
        return self in (NoiseKind.UNMARKED_SYSTEMATIC, NoiseKind.UNMARKED_GAUSSIAN)


@dataclass(frozen=True)
class NoiseSpec:
    """Noise model, its strength (theta, sigma or p) and the master seed."""

    kind: NoiseKind = NoiseKind.NONE
    strength: float = 0.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", NoiseKind(self.kind))
        s = float(self.strength)
        if not np.isfinite(s):
            raise ValueError(f"noise strength must be finite, got {s}")
        if self.kind in (NoiseKind.GAUSSIAN, NoiseKind.UNMARKED_GAUSSIAN) and s < 0:
            raise ValueError(f"gaussian width must be >= 0, got {s}")
        if self.kind is NoiseKind.BROKEN_LINK and not 0.0 <= s <= 1.0:
            raise ValueError(f"broken-link probability must lie in [0, 1], got {s}")
        object.__setattr__(self, "strength", s)

    @property
    def is_noiseless(self) -> bool:
        return self.kind is NoiseKind.NONE or self.strength == 0.0


def realization_rng(seed: int, index: int = 0) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(index),))
    return np.random.Generator(np.random.PCG64(ss))


def derive_seed(master_seed: int, *keys: int) -> int:
    """64-bit child seed for a sweep point, from the master seed and integer keys."""
    ss = np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, np.uint64)[0])


@functools.lru_cache(maxsize=None)
def _lower_endpoints(n: int) -> np.ndarray:
    """For each axis, the hypercube vertices whose bit ``axis`` is 0, ascending."""
    x = np.arange(2**n)
    return np.stack([x[(x >> d) & 1 == 0] for d in range(n)])


def edge_count(walk: WalkSpec) -> int:
    """Number of links: n * 2**(n-1) on a hypercube, 2 * side**2 on a periodic grid."""
    if walk.family is Family.HYPERCUBE:
        return walk.size * 2 ** (walk.size - 1)
    return 2 * walk.size**2


def sample_link_mask(walk: WalkSpec, p: float, rng: np.random.Generator) -> np.ndarray:
    """Break every link independently with probability ``p``; returns a normalized mask."""
    if walk.family is Family.GRID:
        return rng.random((2, walk.vertex_count)) < p
    lower = _lower_endpoints(walk.size)
    mask = np.zeros((walk.size, walk.vertex_count), dtype=bool)
    np.put_along_axis(mask, lower, rng.random(lower.shape) < p, axis=1)
    return mask


def realize_step_noise(spec: NoiseSpec, walk: WalkSpec, rng: np.random.Generator) -> StepNoise:
    """Draw the noise acting on one step.

    Systematic kinds return the constant phase; Gaussian kinds draw a fresh
    N(0, sigma^2) phase; broken-link noise draws a fresh link set. Zero
    strength consumes no random numbers.
    """
    kind, s = spec.kind, spec.strength
    if kind is NoiseKind.NONE:
        return StepNoise()
    if kind is NoiseKind.BROKEN_LINK:
        if s == 0.0:
            return StepNoise(links=LinkSet.empty(walk))
        return StepNoise(links=LinkSet(walk, sample_link_mask(walk, s, rng)))
    if kind in (NoiseKind.SYSTEMATIC, NoiseKind.UNMARKED_SYSTEMATIC):
        phase = s
    else:
        phase = float(rng.normal(0.0, s)) if s > 0 else 0.0
    return StepNoise(phase=phase, unmarked=kind.unmarked)


def strength_from_delta(N: int, delta: float) -> float:
    """Noise strength N**(-delta) for the size-scaling study."""
    if N < 2:
        raise ValueError(f"N must be >= 2, got {N}")
    return float(N) ** (-float(delta))
