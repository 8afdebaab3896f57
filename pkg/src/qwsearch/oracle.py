"""Dense reference operators for small instances.

Everything here is built from explicit matrices (Kronecker products for the
coins, a permutation matrix written out basis state by basis state for the
shift) and never calls the matrix-free kernels, so it can be used to check
them.
"""

from __future__ import annotations

import math

import numpy as np

from .noise import NoiseKind, NoiseSpec, realization_rng, realize_step_noise, sample_link_mask
from .operators import LinkSet, StepNoise, apply_shift, step
from .state_space import Family, WalkerState, WalkSpec, make_uniform_state

__all__ = [
    "InstanceTooLargeError",
    "NotUnitaryError",
    "MAX_DENSE_DIM",
    "grover_coin_matrix",
    "dense_coin",
    "dense_shift",
    "build_dense_step",
    "algebraic_search_coin",
    "unitarity_defect",
    "compare_structured_vs_dense",
    "smallest_eigenphase",
    "unit_eigenvectors",
    "run_verification",
]

MAX_DENSE_DIM = 4096


class InstanceTooLargeError(ValueError):
    pass


class NotUnitaryError(ValueError):
    pass


def grover_coin_matrix(d: int) -> np.ndarray:
    return 2.0 / d * np.ones((d, d)) - np.eye(d)


def _marked_projector(spec: WalkSpec) -> np.ndarray:
    p = np.zeros((spec.vertex_count, spec.vertex_count))
    p[spec.marked, spec.marked] = 1.0
    return p


def algebraic_search_coin(spec: WalkSpec) -> np.ndarray:
    """C' = C ⊗ I - (I + C) ⊗ |v0><v0|, the noiseless search coin."""
    d = spec.coin_dim
    c = grover_coin_matrix(d)
    return np.kron(c, np.eye(spec.vertex_count)) - np.kron(np.eye(d) + c, _marked_projector(spec))


def dense_coin(spec: WalkSpec, noise: StepNoise | None = None, *, search: bool = True) -> np.ndarray:
    noise = noise or StepNoise()
    d, V = spec.coin_dim, spec.vertex_count
    c = grover_coin_matrix(d)
    if not search:
        return np.kron(c, np.eye(V)).astype(complex)
    p0 = _marked_projector(spec)
    rest = np.eye(V) - p0
    if noise.unmarked:
        s = np.full((d, d), 1.0 / d)
        c_noisy = (1.0 + np.exp(1j * noise.phase)) * s - np.eye(d)
        return np.kron(c_noisy, rest) - np.kron(np.eye(d), p0)
    return np.kron(c, rest) + np.exp(1j * (np.pi + noise.phase)) * np.kron(np.eye(d), p0)


def _shift_target(spec: WalkSpec, coin: int, vertex: int, links: LinkSet | None) -> tuple[int, int]:
    broken = links is not None and len(links) > 0
    if spec.family is Family.HYPERCUBE:
        # |d, x> -> |d, x xor e_d>
        if broken and (vertex, coin) in links:
            return coin, vertex
        return coin, vertex ^ (1 << coin)
    side = spec.size
    d, j = divmod(coin, 2)
    n = list(spec.site(vertex))
    sign = 1 if j == 0 else -1
    # the link used runs forward from n (j = 0) or from n - e_d (j = 1)
    tail = list(n)
    if j == 1:
        tail[d] = (tail[d] - 1) % side
    if broken and (tail[0] * side + tail[1], d) in links:
        return coin, vertex
    n[d] = (n[d] + sign) % side
    return 2 * d + (1 - j), n[0] * side + n[1]


def dense_shift(spec: WalkSpec, links: LinkSet | None = None) -> np.ndarray:
    D = spec.dim
    s = np.zeros((D, D))
    for coin in range(spec.coin_dim):
        for vertex in range(spec.vertex_count):
            c2, v2 = _shift_target(spec, coin, vertex, links)
            s[spec.index(c2, v2), spec.index(coin, vertex)] = 1.0
    return s


def build_dense_step(
    spec: WalkSpec,
    noise: StepNoise | None = None,
    *,
    search: bool = True,
    max_dim: int = MAX_DENSE_DIM,
) -> np.ndarray:
    """Explicit D x D matrix of one step S·C' (or S·(C⊗I) with ``search=False``)."""
    if spec.dim > max_dim:
        raise InstanceTooLargeError(f"{spec.label()} has dimension {spec.dim} > {max_dim}")
    noise = noise or StepNoise()
    return dense_shift(spec, noise.links) @ dense_coin(spec, noise, search=search)


def unitarity_defect(m: np.ndarray) -> float:
    return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))


def compare_structured_vs_dense(
    spec: WalkSpec, steps: int, noise: NoiseSpec | None = None, seed: int = 0
) -> float:
    """Evolve a random unit state with both implementations under identical
    noise draws; return the largest entrywise difference seen."""
    noise = noise or NoiseSpec()
    rng = np.random.default_rng(seed)
    vec = rng.normal(size=spec.dim) + 1j * rng.normal(size=spec.dim)
    vec /= np.linalg.norm(vec)
    state = WalkerState(spec, vec.copy())
    noise_rng = realization_rng(noise.seed, 0)
    worst = 0.0
    for _ in range(steps):
        sn = realize_step_noise(noise, spec, noise_rng)
        state = step(state, sn)
        vec = build_dense_step(spec, sn) @ vec
        worst = max(worst, float(np.max(np.abs(state.amplitudes - vec))))
    return worst


def smallest_eigenphase(u: np.ndarray, zero_tol: float = 1e-9) -> tuple[float, int]:
    """Smallest nonzero eigenphase alpha of a unitary and the step count ceil(pi / (2 alpha)).

    Eigenphases below ``zero_tol`` belong to the eigenvalue-1 space, which the
    search evolution never enters, and are skipped.
    """
    if unitarity_defect(u) > 1e-8:
        raise NotUnitaryError("matrix is not unitary to 1e-8")
    phases = np.abs(np.angle(np.linalg.eigvals(u)))
    phases = phases[phases > zero_tol]
    if len(phases) == 0:
        raise ValueError("matrix has no nonzero eigenphase")
    alpha = float(phases.min())
    return alpha, int(math.ceil(math.pi / (2 * alpha)))


def unit_eigenvectors(u: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Orthonormal basis (columns) of the eigenvalue-1 eigenspace."""
    # null space of U - I via SVD; robust to degenerate eigenvalues
    _, sv, vh = np.linalg.svd(u - np.eye(u.shape[0]))
    return vh[sv < tol].conj().T


def run_verification(steps: int = 50, seed: int = 0):
    """Yield ``(name, passed, detail)`` for the dense-oracle checks on small instances.

    Lines with ``passed=None`` are informational.
    """
    specs = [WalkSpec.hypercube(n) for n in (2, 3, 4)] + [WalkSpec.grid(s) for s in (2, 3, 4)]
    rng = np.random.default_rng(seed)
    for spec in specs:
        u = build_dense_step(spec, search=False)
        defect = unitarity_defect(u)
        imag = float(np.abs(u.imag).max())
        yield f"{spec.label()}: U real and unitary", defect <= 1e-12 and imag == 0.0, (
            f"unitarity defect {defect:.1e}, max |Im| {imag:.1e}"
        )
        psi0 = make_uniform_state(spec).amplitudes
        residual = float(np.linalg.norm(u @ psi0 - psi0))
        yield f"{spec.label()}: |psi0> is a +1 eigenvector of U", residual <= 1e-12, f"residual {residual:.1e}"
        dim = unit_eigenvectors(u).shape[1]
        yield f"{spec.label()}: dimension of the +1 eigenspace of U", None, str(dim)

        links = LinkSet(spec, sample_link_mask(spec, 0.3, rng))
        vec = rng.normal(size=spec.dim) + 1j * rng.normal(size=spec.dim)
        state = WalkerState(spec, vec / np.linalg.norm(vec))
        back = apply_shift(apply_shift(state, links), links)
        err = float(np.max(np.abs(back.amplitudes - state.amplitudes)))
        yield f"{spec.label()}: shift is an involution with {len(links)} broken links", err <= 1e-15, f"max dev {err:.1e}"

        for kind in NoiseKind:
            strength = 0.1 if kind is NoiseKind.BROKEN_LINK else 0.3
            dev = compare_structured_vs_dense(spec, steps, NoiseSpec(kind, strength, seed), seed)
            yield f"{spec.label()}: structured == dense, {kind.value}, {steps} steps", dev <= 1e-12, f"max dev {dev:.1e}"
