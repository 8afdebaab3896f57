"""Matrix-free coin and shift operators.

The kernels (``*_kernel`` functions and :func:`evolve`) act on arrays shaped
``(..., coin_dim, vertex_count)`` so a whole Monte Carlo ensemble can be
stepped at once; the public ``apply_*`` functions wrap them for a single
:class:`~qwsearch.state_space.WalkerState`.

Broken links
------------
Both shifts are flip-flop shifts: every link pairs two basis states into a
2-cycle. Breaking a link replaces that 2-cycle by the identity, so the shift
stays a permutation matrix (hence unitary and an involution) for any set of
broken links.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .state_space import Family, WalkerState, WalkSpec

__all__ = [
    "LinkSet",
    "StepNoise",
    "wrap_phase",
    "marked_phase_factor",
    "grover_coin_kernel",
    "marked_coin_kernel",
    "unmarked_phase_coin_kernel",
    "shift_kernel",
    "evolve",
    "apply_grover_coin",
    "apply_modified_coin",
    "apply_unmarked_phase_coin",
    "apply_shift_hypercube",
    "apply_shift_grid",
    "apply_shift",
    "step",
]


class LinkSet:
    """Set of undirected links broken for one time step.

    An edge is ``(vertex, axis)``. On a hypercube it is normalized to the
    endpoint whose bit ``axis`` is 0; on a grid it is the site the link leaves
    in the forward (+e_axis, periodic) direction. Internally stored as a
    boolean ``(axes, vertex_count)`` mask indexed by the normalized edge.
    """

    __slots__ = ("spec", "mask")

    def __init__(self, spec: WalkSpec, mask: np.ndarray | None = None):
        shape = (spec.axes, spec.vertex_count)
        if mask is None:
            mask = np.zeros(shape, dtype=bool)
        else:
            mask = np.asarray(mask, dtype=bool)
            if mask.shape != shape:
                raise ValueError(f"link mask must have shape {shape}, got {mask.shape}")
            if spec.family is Family.HYPERCUBE and np.any(mask & _upper_endpoints(spec.size)):
                raise ValueError("hypercube link mask flags a non-normalized edge")
        self.spec = spec
        self.mask = mask

    @classmethod
    def empty(cls, spec: WalkSpec) -> LinkSet:
        return cls(spec)

    @classmethod
    def from_edges(cls, spec: WalkSpec, edges: Iterable[tuple[int, int]]) -> LinkSet:
        mask = np.zeros((spec.axes, spec.vertex_count), dtype=bool)
        for vertex, axis in edges:
            vertex, axis = _normalize_edge(spec, int(vertex), int(axis))
            mask[axis, vertex] = True
        return cls(spec, mask)

    def edges(self) -> list[tuple[int, int]]:
        axis, vertex = np.nonzero(self.mask)
        return sorted(zip(vertex.tolist(), axis.tolist()))

    def __contains__(self, edge) -> bool:
        vertex, axis = _normalize_edge(self.spec, int(edge[0]), int(edge[1]))
        return bool(self.mask[axis, vertex])

    def __len__(self) -> int:
        return int(self.mask.sum())

    def __eq__(self, other) -> bool:
        if not isinstance(other, LinkSet):
            return NotImplemented
        return self.spec == other.spec and np.array_equal(self.mask, other.mask)

    def __repr__(self) -> str:
        return f"LinkSet({self.spec.label()}, {len(self)} broken)"


def _normalize_edge(spec: WalkSpec, vertex: int, axis: int) -> tuple[int, int]:
    if not 0 <= axis < spec.axes:
        raise ValueError(f"axis {axis} invalid for {spec.label()}")
    if not 0 <= vertex < spec.vertex_count:
        raise ValueError(f"vertex {vertex} invalid for {spec.label()}")
    if spec.family is Family.HYPERCUBE:
        vertex &= ~(1 << axis)
    return vertex, axis


@functools.lru_cache(maxsize=None)
def _upper_endpoints(n: int) -> np.ndarray:
    x = np.arange(2**n)
    return ((x[None, :] >> np.arange(n)[:, None]) & 1).astype(bool)


@functools.lru_cache(maxsize=None)
def _hypercube_partners(n: int) -> np.ndarray:
    x = np.arange(2**n)
    return x[None, :] ^ (1 << np.arange(n))[:, None]


def wrap_phase(theta: float) -> float:
    """Map an angle into [-pi, pi]; values already inside are returned unchanged."""
    if -np.pi <= theta <= np.pi:
        return float(theta)
    return float((theta + np.pi) % (2 * np.pi) - np.pi)


@dataclass
class StepNoise:
    """Noise realization for a single step.

    ``unmarked`` routes ``phase`` to the unmarked-vertex coin instead of the
    marked-vertex coin.
    """

    phase: float = 0.0
    links: LinkSet | None = field(default=None)
    unmarked: bool = False

    def __post_init__(self):
        self.phase = wrap_phase(float(self.phase))


def marked_phase_factor(theta) -> np.ndarray:
    """e^{i(pi + theta)}; exactly -1 at theta = 0."""
    return -np.exp(1j * np.asarray(theta, dtype=float))


def grover_coin_kernel(psi: np.ndarray) -> np.ndarray:
    return 2.0 * psi.mean(axis=-2, keepdims=True) - psi


def marked_coin_kernel(psi: np.ndarray, v0: int, theta=0.0) -> np.ndarray:
    """Grover coin everywhere except ``v0``, whose coin block gets e^{i(pi + theta)}.

    ``theta`` may be a scalar or an array matching the batch shape of ``psi``.
    """
    out = grover_coin_kernel(psi)
    factor = marked_phase_factor(theta)[..., None]
    out[..., :, v0] = factor * psi[..., :, v0]
    return out


def unmarked_phase_coin_kernel(psi: np.ndarray, v0: int, theta=0.0) -> np.ndarray:
    """Phase-error Grover coin (1 + e^{i theta})|s><s| - I off ``v0``; -I at ``v0``.

    This is the Grover coin with the |s> eigenvalue moved from 1 to e^{i theta}.
    """
    weight = (1.0 + np.exp(1j * np.asarray(theta, dtype=float)))[..., None, None]
    out = weight * psi.mean(axis=-2, keepdims=True) - psi
    out[..., :, v0] = -psi[..., :, v0]
    return out


def _hypercube_shift(psi: np.ndarray, n: int, mask: np.ndarray | None) -> np.ndarray:
    partners = _hypercube_partners(n)
    out = psi[..., np.arange(n)[:, None], partners]
    if mask is not None:
        # both endpoints of a broken edge keep their amplitude
        frozen = mask | mask[..., np.arange(n)[:, None], partners]
        out = np.where(frozen, psi, out)
    return out


def _grid_shift(psi: np.ndarray, side: int, mask: np.ndarray | None) -> np.ndarray:
    batch = psi.shape[:-2]
    a = psi.reshape(*batch, 4, side, side)
    out = np.empty_like(a)
    if mask is not None:
        mask = mask.reshape(*mask.shape[:-2], 2, side, side)
    for d in (0, 1):
        ax = -2 if d == 0 else -1
        fwd, bwd = a[..., 2 * d, :, :], a[..., 2 * d + 1, :, :]
        # |d,0>|n> -> |d,1>|n+e_d> and |d,1>|n+e_d> -> |d,0>|n>
        new_bwd = np.roll(fwd, 1, axis=ax)
        new_fwd = np.roll(bwd, -1, axis=ax)
        if mask is not None:
            broken = mask[..., d, :, :]
            new_fwd = np.where(broken, fwd, new_fwd)
            new_bwd = np.where(np.roll(broken, 1, axis=ax), bwd, new_bwd)
        out[..., 2 * d, :, :] = new_fwd
        out[..., 2 * d + 1, :, :] = new_bwd
    return out.reshape(psi.shape)


def shift_kernel(psi: np.ndarray, spec: WalkSpec, mask: np.ndarray | None = None) -> np.ndarray:
    """Apply the flip-flop shift; ``mask`` is a (batched) normalized broken-link mask."""
    if spec.family is Family.HYPERCUBE:
        return _hypercube_shift(psi, spec.size, mask)
    return _grid_shift(psi, spec.size, mask)


def evolve(
    psi: np.ndarray,
    spec: WalkSpec,
    phase=0.0,
    mask: np.ndarray | None = None,
    *,
    unmarked: bool = False,
    search: bool = True,
) -> np.ndarray:
    """One step S·C' on a (batched) amplitude array.

    With ``search=False`` the plain Grover coin is used everywhere (the
    unperturbed walk U); ``phase`` is then ignored.
    """
    if not search:
        coined = grover_coin_kernel(psi)
    elif unmarked:
        coined = unmarked_phase_coin_kernel(psi, spec.marked, phase)
    else:
        coined = marked_coin_kernel(psi, spec.marked, phase)
    return shift_kernel(coined, spec, mask)


def _wrap(state: WalkerState, blocks: np.ndarray) -> WalkerState:
    return WalkerState(state.spec, blocks.reshape(-1))


def apply_grover_coin(state: WalkerState) -> WalkerState:
    return _wrap(state, grover_coin_kernel(state.blocks()))


def apply_modified_coin(state: WalkerState, theta: float = 0.0) -> WalkerState:
    return _wrap(state, marked_coin_kernel(state.blocks(), state.spec.marked, wrap_phase(theta)))


def apply_unmarked_phase_coin(state: WalkerState, theta: float = 0.0) -> WalkerState:
    return _wrap(
        state, unmarked_phase_coin_kernel(state.blocks(), state.spec.marked, wrap_phase(theta))
    )


def _links_mask(spec: WalkSpec, links: LinkSet | None) -> np.ndarray | None:
    if links is None or not links.mask.any():
        return None
    if links.spec.family is not spec.family or links.spec.size != spec.size:
        raise ValueError(f"{links!r} is not valid for {spec.label()}")
    return links.mask


def apply_shift_hypercube(state: WalkerState, links: LinkSet | None = None) -> WalkerState:
    spec = state.spec
    if spec.family is not Family.HYPERCUBE:
        raise ValueError("apply_shift_hypercube needs a hypercube state")
    return _wrap(state, _hypercube_shift(state.blocks(), spec.size, _links_mask(spec, links)))


def apply_shift_grid(state: WalkerState, links: LinkSet | None = None) -> WalkerState:
    spec = state.spec
    if spec.family is not Family.GRID:
        raise ValueError("apply_shift_grid needs a grid state")
    return _wrap(state, _grid_shift(state.blocks(), spec.size, _links_mask(spec, links)))


def apply_shift(state: WalkerState, links: LinkSet | None = None) -> WalkerState:
    if state.spec.family is Family.HYPERCUBE:
        return apply_shift_hypercube(state, links)
    return apply_shift_grid(state, links)


def step(
    state: WalkerState, noise: StepNoise | None = None, *, search: bool = True
) -> WalkerState:
    """Apply one full iteration U' = S·C' (coin first, then shift)."""
    noise = noise or StepNoise()
    mask = _links_mask(state.spec, noise.links)
    out = evolve(
        state.blocks(), state.spec, noise.phase, mask, unmarked=noise.unmarked, search=search
    )
    return _wrap(state, out)
