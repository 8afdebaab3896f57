"""Cost curves, stopping times and Monte Carlo aggregation."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks

from .noise import NoiseSpec
from .state_space import WalkSpec
from .walks import Trajectory, run_ensemble

__all__ = [
    "NoFiniteCostError",
    "CostCurve",
    "McAggregate",
    "cost_curve",
    "scaled_cost",
    "max_unmarked",
    "stopping_step",
    "peak_steps",
    "monte_carlo",
]


class NoFiniteCostError(ValueError):
    """Raised when every recorded success probability is zero."""


@dataclass
class CostCurve:
    """c(s) = s / p_s, with ``c[0]`` unused (NaN) and ``inf`` wherever p_s = 0."""

    c: np.ndarray
    s_star: int
    c_star: float
    scaled: float


@dataclass
class McAggregate:
    mean: Trajectory
    stderr_marked: np.ndarray
    stderr_unmarked_max: np.ndarray
    realizations: int

    # duck-type as a trajectory for cost_curve / max_unmarked
    @property
    def p_marked(self) -> np.ndarray:
        return self.mean.p_marked

    @property
    def p_unmarked_max(self) -> np.ndarray:
        return self.mean.p_unmarked_max

    @property
    def vertex_count(self) -> int:
        return self.mean.vertex_count


def scaled_cost(c_star: float, N: int) -> float:
    """log_N of a cost: 0.5 is a quadratic speedup, 1 is classical search."""
    return math.log(c_star) / math.log(N)


def cost_curve(traj) -> CostCurve:
    """Cost of rerunning the search with a measurement after ``s`` steps.

    ``traj`` is anything with ``p_marked`` and ``vertex_count`` (a
    :class:`Trajectory` or :class:`McAggregate`).
    """
    p = np.asarray(traj.p_marked, dtype=float)
    if len(p) < 2:
        raise ValueError("cost curve needs at least one step (s_max >= 1)")
    s = np.arange(len(p), dtype=float)
    c = np.full(len(p), np.nan)
    with np.errstate(divide="ignore"):
        c[1:] = np.where(p[1:] > 0, s[1:] / p[1:], np.inf)
    if not np.isfinite(c[1:]).any():
        raise NoFiniteCostError("success probability is zero at every step")
    s_star = int(np.argmin(c[1:])) + 1
    c_star = float(c[s_star])
    return CostCurve(c, s_star, c_star, scaled_cost(c_star, traj.vertex_count))


def max_unmarked(traj) -> tuple[float, int]:
    """Highest single-vertex probability off the marked vertex, and its step."""
    pu = np.asarray(traj.p_unmarked_max)
    s = int(np.argmax(pu))
    return float(pu[s]), s


def stopping_step(p_marked) -> int:
    """Step of the first maximum of the success probability.

    The first lobe of ``p_marked`` ends at the first step where it falls below
    half of its running maximum; the stopping step is the (earliest) argmax
    inside that lobe. A curve that never halves is a single lobe.
    """
    p = np.asarray(p_marked, dtype=float)
    running = np.maximum.accumulate(p)
    dropped = np.nonzero(p < 0.5 * running)[0]
    end = int(dropped[0]) if len(dropped) else len(p)
    return int(np.argmax(p[:end]))


def peak_steps(p_marked, rel_prominence: float = 0.05) -> np.ndarray:
    """Steps of the local maxima whose prominence is at least
    ``rel_prominence`` times the curve's range. Flat tops report their middle."""
    p = np.asarray(p_marked, dtype=float)
    span = float(p.max() - p.min())
    if span == 0:
        return np.array([], dtype=int)
    peaks, _ = find_peaks(p, prominence=rel_prominence * span)
    return peaks


def monte_carlo(
    spec: WalkSpec,
    noise: NoiseSpec,
    s_max: int,
    R: int = 200,
    master_seed: int | None = None,
) -> McAggregate:
    """Average ``R`` realizations; realization ``i`` uses the stream derived
    from ``(master_seed, i)``. ``master_seed`` defaults to ``noise.seed``."""
    if R < 1:
        raise ValueError(f"need at least one realization, got R={R}")
    if master_seed is not None:
        noise = NoiseSpec(noise.kind, noise.strength, master_seed)
    if noise.is_noiseless:
        # every realization is the same deterministic run
        pm, pu, ne = run_ensemble(spec, noise, s_max, [0])
        zero = np.zeros(s_max + 1)
        return McAggregate(Trajectory(pm[0], pu[0], ne[0], spec.vertex_count), zero, zero.copy(), R)
    pm, pu, ne = run_ensemble(spec, noise, s_max, range(R))
    root = math.sqrt(R)
    if R > 1:
        se_m = pm.std(axis=0, ddof=1) / root
        se_u = pu.std(axis=0, ddof=1) / root
    else:
        se_m = np.zeros(s_max + 1)
        se_u = np.zeros(s_max + 1)
    mean = Trajectory(pm.mean(axis=0), pu.mean(axis=0), ne.max(axis=0), spec.vertex_count)
    return McAggregate(mean, se_m, se_u, R)
