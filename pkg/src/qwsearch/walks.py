"""Search-walk drivers: SKW on hypercubes, AKR on grids, and the Grover baseline."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .noise import NoiseKind, NoiseSpec, realization_rng, realize_step_noise
from .operators import evolve, step
from .state_space import CorruptStateError, Family, WalkSpec, make_uniform_state

__all__ = [
    "Trajectory",
    "run_walk",
    "run_ensemble",
    "theoretical_stop_skw",
    "default_horizon",
    "verify_initial_eigenstate",
    "run_grover",
    "grover_probabilities",
]

NORM_ABORT = 1e-6
# cap on amplitudes held per ensemble chunk (complex128, ~16 MB)
_CHUNK_AMPLITUDES = 1 << 20


@dataclass
class Trajectory:
    """Per-step statistics; entry ``s`` is measured after ``s`` applications of U'."""

    p_marked: np.ndarray
    p_unmarked_max: np.ndarray
    norm_err: np.ndarray
    vertex_count: int

    @property
    def s_max(self) -> int:
        return len(self.p_marked) - 1

    @property
    def steps(self) -> np.ndarray:
        return np.arange(len(self.p_marked))


def theoretical_stop_skw(n: int) -> int:
    """pi/2 * sqrt(2**(n-1)) rounded half-up to the nearest step."""
    return int(math.floor(math.pi / 2 * math.sqrt(2 ** (n - 1)) + 0.5))


def default_horizon(spec: WalkSpec) -> int:
    """Step budget covering the noiseless success peak.

    Hypercubes: twice the theoretical stopping time. Grids: ceil(2 sqrt(N ln N)),
    since only the O(sqrt(N log N)) scaling is known there.
    """
    if spec.family is Family.HYPERCUBE:
        return 2 * theoretical_stop_skw(spec.size)
    N = spec.vertex_count
    return int(math.ceil(2 * math.sqrt(N * math.log(N))))


def _statistics(psi: np.ndarray, v0: int):
    probs = np.einsum("rcv,rcv->rv", psi.conj(), psi).real
    marked = probs[:, v0].copy()
    norm = np.abs(probs.sum(axis=-1) - 1.0)
    probs[:, v0] = -np.inf
    return marked, probs.max(axis=-1), norm


def _run_chunk(spec: WalkSpec, noise: NoiseSpec, s_max: int, indices: Sequence[int]):
    R = len(indices)
    v0 = spec.marked
    psi = np.broadcast_to(make_uniform_state(spec).blocks(), (R, spec.coin_dim, spec.vertex_count))
    psi = psi.copy()
    pm = np.empty((R, s_max + 1))
    pu = np.empty((R, s_max + 1))
    ne = np.empty((R, s_max + 1))
    pm[:, 0], pu[:, 0], ne[:, 0] = _statistics(psi, v0)

    kind = noise.kind
    quiet = noise.is_noiseless
    rngs = [] if quiet else [realization_rng(noise.seed, i) for i in indices]
    for s in range(1, s_max + 1):
        phase, mask = 0.0, None
        if not quiet:
            draws = [realize_step_noise(noise, spec, rng) for rng in rngs]
            if kind is NoiseKind.BROKEN_LINK:
                mask = np.stack([d.links.mask for d in draws])
            else:
                phase = np.array([d.phase for d in draws])
        psi = evolve(psi, spec, phase, mask, unmarked=kind.unmarked)
        pm[:, s], pu[:, s], ne[:, s] = _statistics(psi, v0)
        worst = ne[:, s].max()
        if worst > NORM_ABORT:
            raise CorruptStateError(
                f"norm drifted by {worst:.3e} at step {s} on {spec.label()} with {noise}"
            )
    return pm, pu, ne


def run_ensemble(
    spec: WalkSpec, noise: NoiseSpec, s_max: int, indices: Sequence[int]
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Evolve several realizations; returns ``(p_marked, p_unmarked_max, norm_err)``
    arrays of shape ``(len(indices), s_max + 1)``.

    Realization ``i`` always draws from ``realization_rng(noise.seed, i)``, so
    results do not depend on how indices are grouped.
    """
    if s_max < 0:
        raise ValueError(f"s_max must be >= 0, got {s_max}")
    indices = list(indices)
    chunk = max(1, _CHUNK_AMPLITUDES // spec.dim)
    parts = [
        _run_chunk(spec, noise, s_max, indices[i : i + chunk])
        for i in range(0, len(indices), chunk)
    ]
    return tuple(np.concatenate(arrs) for arrs in zip(*parts))


def run_walk(
    spec: WalkSpec, noise: NoiseSpec | None = None, s_max: int = 1, realization_index: int = 0
) -> Trajectory:
    """Evolve one realization from the uniform state for ``s_max`` steps."""
    noise = noise or NoiseSpec()
    pm, pu, ne = run_ensemble(spec, noise, s_max, [realization_index])
    return Trajectory(pm[0], pu[0], ne[0], spec.vertex_count)


def verify_initial_eigenstate(spec: WalkSpec, state=None) -> float:
    """Return ||U psi - psi|| for the unperturbed walk U (defaults to the uniform state)."""
    psi = make_uniform_state(spec) if state is None else state
    out = step(psi, search=False)
    return float(np.linalg.norm(out.amplitudes - psi.amplitudes))


def grover_probabilities(n_qubits: int, i0: int, iterations: int) -> np.ndarray:
    """Success probability |<i0|psi_k>|^2 for k = 0..iterations.

    The oracle U_f acting on |x>|-> is the phase flip (-1)^f(x) on the first
    register, so the ancilla is dropped and the walk runs on N amplitudes.
    """
    N = 2**n_qubits
    if not 0 <= i0 < N:
        raise ValueError(f"i0={i0} outside 0..{N - 1}")
    if iterations < 0:
        raise ValueError("iterations must be >= 0")
    psi = np.full(N, 1.0 / math.sqrt(N))
    out = np.empty(iterations + 1)
    out[0] = psi[i0] ** 2
    for k in range(1, iterations + 1):
        psi[i0] = -psi[i0]
        psi = 2.0 * psi.mean() - psi
        out[k] = psi[i0] ** 2
    return out


def run_grover(n_qubits: int, i0: int, iterations: int) -> float:
    return float(grover_probabilities(n_qubits, i0, iterations)[-1])
