"""Walker Hilbert space: coin ⊗ vertex amplitudes on hypercubes and periodic grids.

Layout
------
A state is a flat complex128 vector of length ``coin_dim * vertex_count`` with

    index = coin * vertex_count + vertex

so ``amplitudes.reshape(coin_dim, vertex_count)`` gives one row per coin
direction. Hypercube vertices are the integers ``0 .. 2**n - 1`` and direction
``d`` flips bit ``d``. Grid sites ``(n0, n1)`` map to ``n0 * side + n1`` and the
grid coin index packs ``(d, j)`` as ``2 * d + j`` (``j = 0`` forward).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Family",
    "WalkSpec",
    "WalkerState",
    "CorruptStateError",
    "make_uniform_state",
    "basis_state",
    "position_distribution",
    "marked_probability",
    "norm_error",
]


class CorruptStateError(ValueError):
    """Raised when a state has drifted away from unit norm."""


class Family(str, enum.Enum):
    HYPERCUBE = "hypercube"
    GRID = "grid"


@dataclass(frozen=True)
class WalkSpec:
    """Graph family, size and marked vertex of a search walk.

    Use :meth:`hypercube` or :meth:`grid` rather than the raw constructor.
    ``marked`` is always a flat vertex index.
    """

    family: Family
    size: int
    marked: int = 0

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if self.family is Family.HYPERCUBE and self.size < 2:
            raise ValueError(f"hypercube dimension must be >= 2, got {self.size}")
        if self.family is Family.GRID and self.size < 2:
            raise ValueError(f"grid side must be >= 2, got {self.size}")
        if not 0 <= self.marked < self.vertex_count:
            raise ValueError(
                f"marked vertex {self.marked} out of range for {self.vertex_count} vertices"
            )

    @classmethod
    def hypercube(cls, n: int, marked: int = 0) -> WalkSpec:
        return cls(Family.HYPERCUBE, int(n), int(marked))

    @classmethod
    def grid(cls, side: int, marked: int | tuple[int, int] = 0) -> WalkSpec:
        if isinstance(marked, tuple):
            n0, n1 = marked
            if not (0 <= n0 < side and 0 <= n1 < side):
                raise ValueError(f"marked site {marked} outside {side}x{side} grid")
            marked = n0 * side + n1
        return cls(Family.GRID, int(side), int(marked))

    @property
    def n(self) -> int:
        if self.family is not Family.HYPERCUBE:
            raise AttributeError("grid specs have no hypercube dimension")
        return self.size

    @property
    def side(self) -> int:
        if self.family is not Family.GRID:
            raise AttributeError("hypercube specs have no grid side")
        return self.size

    @property
    def coin_dim(self) -> int:
        return self.size if self.family is Family.HYPERCUBE else 4

    @property
    def axes(self) -> int:
        """Number of link orientations per vertex (n for hypercubes, 2 for grids)."""
        return self.size if self.family is Family.HYPERCUBE else 2

    @property
    def vertex_count(self) -> int:
        return 2**self.size if self.family is Family.HYPERCUBE else self.size**2

    @property
    def dim(self) -> int:
        return self.coin_dim * self.vertex_count

    def index(self, coin: int, vertex: int) -> int:
        if not (0 <= coin < self.coin_dim and 0 <= vertex < self.vertex_count):
            raise IndexError(f"(coin={coin}, vertex={vertex}) outside {self}")
        return coin * self.vertex_count + vertex

    def unindex(self, i: int) -> tuple[int, int]:
        if not 0 <= i < self.dim:
            raise IndexError(f"index {i} outside state of length {self.dim}")
        return divmod(i, self.vertex_count)

    def site(self, vertex: int) -> tuple[int, int]:
        """Grid coordinates ``(n0, n1)`` of a flat vertex index."""
        return divmod(vertex, self.side)

    def label(self) -> str:
        if self.family is Family.HYPERCUBE:
            return f"hypercube-n{self.size}"
        return f"grid-{self.size}x{self.size}"


@dataclass
class WalkerState:
    spec: WalkSpec
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (self.spec.dim,):
            raise ValueError(
                f"expected {self.spec.dim} amplitudes for {self.spec.label()}, "
                f"got shape {self.amplitudes.shape}"
            )

    def blocks(self) -> np.ndarray:
        """View of the amplitudes with shape ``(coin_dim, vertex_count)``."""
        return self.amplitudes.reshape(self.spec.coin_dim, self.spec.vertex_count)

    def copy(self) -> WalkerState:
        return WalkerState(self.spec, self.amplitudes.copy())


def make_uniform_state(spec: WalkSpec) -> WalkerState:
    """Return |s^C> ⊗ |s^P>, the equal superposition over every coin and vertex."""
    amp = 1.0 / np.sqrt(spec.dim)
    return WalkerState(spec, np.full(spec.dim, amp, dtype=np.complex128))


def basis_state(spec: WalkSpec, coin: int, vertex: int) -> WalkerState:
    psi = np.zeros(spec.dim, dtype=np.complex128)
    psi[spec.index(coin, vertex)] = 1.0
    return WalkerState(spec, psi)


def norm_error(state: WalkerState) -> float:
    return abs(float(np.vdot(state.amplitudes, state.amplitudes).real) - 1.0)


def position_distribution(state: WalkerState, tol: float = 1e-6) -> np.ndarray:
    """Probability of measuring each vertex, summed over the coin register.

    Raises
    ------
    CorruptStateError
        If the state norm deviates from 1 by more than ``tol``.
    """
    err = norm_error(state)
    if err > tol:
        raise CorruptStateError(f"state norm deviates from 1 by {err:.3e}")
    return np.sum(np.abs(state.blocks()) ** 2, axis=0)


def marked_probability(state: WalkerState, v0: int | None = None) -> float:
    if v0 is None:
        v0 = state.spec.marked
    if not 0 <= v0 < state.spec.vertex_count:
        raise IndexError(f"vertex {v0} out of range")
    return float(position_distribution(state)[v0])
