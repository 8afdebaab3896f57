import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qwsearch.metrics import (
    NoFiniteCostError,
    cost_curve,
    max_unmarked,
    monte_carlo,
    peak_steps,
    scaled_cost,
    stopping_step,
)
from qwsearch.noise import NoiseKind, NoiseSpec
from qwsearch.state_space import WalkSpec
from qwsearch.walks import Trajectory, run_walk

H8 = WalkSpec.hypercube(8)


def traj(p, N=256):
    p = np.asarray(p, dtype=float)
    return Trajectory(p, np.zeros_like(p), np.zeros_like(p), N)


def test_cost_arithmetic():
    p = np.full(19, 0.01)
    p[18] = 0.5
    cc = cost_curve(traj(p))
    assert cc.c[18] == 36.0
    assert math.isnan(cc.c[0])
    assert cc.s_star == 18


def test_cost_skips_zero_probability():
    cc = cost_curve(traj([0.0, 0.0, 0.2, 0.0]))
    assert cc.c[1] == math.inf and cc.c[3] == math.inf
    assert (cc.s_star, cc.c_star) == (2, 10.0)


def test_cost_all_zero_fails():
    with pytest.raises(NoFiniteCostError):
        cost_curve(traj([0.0, 0.0, 0.0]))
    with pytest.raises(ValueError):
        cost_curve(traj([0.5]))


@given(st.lists(st.floats(1e-6, 1.0), min_size=2, max_size=50))
def test_cost_invariants(p):
    cc = cost_curve(traj(p))
    s = np.arange(len(p))
    assert cc.s_star >= 1
    assert np.all(cc.c[1:] >= s[1:])
    np.testing.assert_allclose(cc.c[1:] * np.asarray(p[1:]), s[1:], rtol=1e-15)


def test_systematic_cost_minimum():
    cc = cost_curve(run_walk(H8, NoiseSpec(NoiseKind.SYSTEMATIC, 0.3), 40))
    assert 8 <= cc.s_star <= 12


def test_first_step_cost_is_classical():
    # one step from the uniform state leaves p = 1/N, so c(1) = N
    cc = cost_curve(run_walk(H8, s_max=5))
    assert cc.c[1] == pytest.approx(256, rel=1e-12)


def test_scaled_cost():
    assert scaled_cost(256, 256) == pytest.approx(1.0)
    assert scaled_cost(16, 256) == pytest.approx(0.5)
    assert scaled_cost(100, 1024) < scaled_cost(100, 256)


def test_max_unmarked():
    value, s = max_unmarked(run_walk(H8, s_max=0))
    assert (value, s) == (pytest.approx(1 / 256), 0)
    t = run_walk(H8, s_max=40)
    value, _ = max_unmarked(t)
    # frozen from simulation: the neighbours of v0 never exceed ~0.06
    assert value == pytest.approx(0.05997243325003289, abs=1e-12)
    assert value < 0.2 * t.p_marked.max()


def test_max_unmarked_large_phase_error_is_indistinct():
    mc = monte_carlo(H8, NoiseSpec(NoiseKind.GAUSSIAN, 2.0, 0), 36, R=50)
    assert max_unmarked(mc)[0] > 0.3 * mc.p_marked.max()


def test_stopping_step():
    assert stopping_step([0.0, 0.1, 0.3, 0.2, 0.05, 0.4, 0.5]) == 2
    assert stopping_step([0.0, 0.2, 0.2, 0.15]) == 1
    p = run_walk(H8, s_max=80).p_marked
    assert stopping_step(p) == 18


def test_peak_steps():
    p = np.array([0, 1, 0, 0.5, 0, 0.51, 0.5, 0.0])
    np.testing.assert_array_equal(peak_steps(p), [1, 3, 5])
    assert len(peak_steps(np.ones(5))) == 0


def test_monte_carlo_single_realization():
    noise = NoiseSpec(NoiseKind.GAUSSIAN, 0.3, 4)
    mc = monte_carlo(H8, noise, 20, R=1)
    np.testing.assert_array_equal(mc.p_marked, run_walk(H8, noise, 20).p_marked)
    assert np.all(mc.stderr_marked == 0)


def test_monte_carlo_noiseless_zero_variance():
    mc = monte_carlo(H8, NoiseSpec(), 20, R=50)
    assert mc.realizations == 50
    assert np.all(mc.stderr_marked == 0) and np.all(mc.stderr_unmarked_max == 0)


def test_monte_carlo_stderr_definition():
    from qwsearch.walks import run_ensemble

    spec, noise = WalkSpec.hypercube(5), NoiseSpec(NoiseKind.BROKEN_LINK, 0.1, 8)
    mc = monte_carlo(spec, noise, 12, R=7)
    pm, _, _ = run_ensemble(spec, noise, 12, range(7))
    np.testing.assert_array_equal(mc.p_marked, pm.mean(axis=0))
    np.testing.assert_allclose(mc.stderr_marked, pm.std(axis=0, ddof=1) / math.sqrt(7), rtol=1e-15)
    assert np.all((mc.p_marked >= 0) & (mc.p_marked <= 1))


def test_monte_carlo_master_seed():
    noise = NoiseSpec(NoiseKind.GAUSSIAN, 0.3, 0)
    a = monte_carlo(WalkSpec.hypercube(5), noise, 10, R=5, master_seed=9)
    b = monte_carlo(WalkSpec.hypercube(5), NoiseSpec(NoiseKind.GAUSSIAN, 0.3, 9), 10, R=5)
    np.testing.assert_array_equal(a.p_marked, b.p_marked)
    with pytest.raises(ValueError):
        monte_carlo(H8, noise, 10, R=0)


def test_broken_link_first_peak_near_noiseless():
    ideal = run_walk(H8, s_max=40).p_marked
    mc = monte_carlo(H8, NoiseSpec(NoiseKind.BROKEN_LINK, 0.02, 0), 40, R=200)
    first = peak_steps(mc.p_marked)[0]
    assert abs(first - np.argmax(ideal)) <= 1
    assert mc.p_marked[first] < ideal.max()
