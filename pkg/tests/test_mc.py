"""Unit tests for the Monte Carlo trajectory sampler."""

import numpy as np
import pytest

from pauliweight import dense
from pauliweight.dense import BrickwallSpec, SupportPattern
from pauliweight.mc import (
    dump_trajectory,
    estimate_covariance,
    estimate_occupation,
    estimate_pauli_weight,
    estimate_pauli_weight_trace,
    mover_kind,
    pack_grid,
    sample_trajectory,
    sigma2_from_covariance,
    unpack_grid,
)
from pauliweight.transfer import clifford_tm, dual_unitary_tm


def _spec(n=12, depth=8, alpha=0.5, boundary="open"):
    return BrickwallSpec(n=n, depth=depth, tm=dual_unitary_tm(alpha),
                         boundary=boundary)


def test_trajectory_deterministic_in_seed():
    spec = _spec()
    p = SupportPattern.full(spec.n)
    a = sample_trajectory(spec, p, seed=7, traj_index=3)
    b = sample_trajectory(spec, p, seed=7, traj_index=3)
    c = sample_trajectory(spec, p, seed=8, traj_index=3)
    d = sample_trajectory(spec, p, seed=7, traj_index=4)
    assert np.array_equal(a.grid, b.grid)
    assert not np.array_equal(a.grid, c.grid)
    assert not np.array_equal(a.grid, d.grid)


def test_occupation_deterministic_in_seed():
    spec = _spec(depth=5)
    p = SupportPattern.full(spec.n)
    a = estimate_occupation(spec, p, 2000, seed=1)
    b = estimate_occupation(spec, p, 2000, seed=1)
    c = estimate_occupation(spec, p, 2000, seed=2)
    assert np.array_equal(a.rho, b.rho)
    assert not np.array_equal(a.rho, c.rho)


def test_occupation_matches_batched_trajectories():
    spec = _spec(n=8, depth=4)
    p = SupportPattern.contiguous(8, 4)
    grids = [sample_trajectory(spec, p, seed=3, traj_index=i).grid
             for i in range(10)]
    manual = np.mean(grids, axis=0)
    est = estimate_occupation(spec, p, 10, seed=3)
    assert np.allclose(est.rho, manual)


def test_occupation_agrees_with_dense():
    spec = _spec(n=12, depth=8)
    p = SupportPattern.full(12)
    est = estimate_occupation(spec, p, 40000, seed=1)
    rho_d = np.array([dense.occupation_profile(s)
                      for s in dense.evolve_trace(spec, p)])
    err = np.maximum(est.stderr, 1e-12)
    z = np.abs(est.rho - rho_d) / err
    deterministic = np.abs(est.rho - rho_d) < 1e-12
    assert np.mean((z <= 3.0) | deterministic) >= 0.99


def test_pauli_weight_estimator_unbiased():
    spec = _spec(n=10, depth=6, alpha=1.0 / 3.0)
    p = SupportPattern.full(10)
    mean, stderr = estimate_pauli_weight(spec, p, 60000, seed=5)
    exact = dense.pauli_weight(dense.evolve(spec, p))
    assert abs(mean - exact) <= 4.0 * stderr


def test_pauli_weight_trace_endpoints():
    spec = _spec(n=8, depth=5)
    p = SupportPattern.full(8)
    mean, stderr = estimate_pauli_weight_trace(spec, p, 5000, seed=2)
    assert mean.shape == (6,)
    assert mean[0] == pytest.approx(3.0 ** -8)
    assert stderr[0] == 0.0
    final, final_err = estimate_pauli_weight(spec, p, 5000, seed=2)
    assert mean[-1] == pytest.approx(final)
    assert stderr[-1] == pytest.approx(final_err)


def test_mover_kind_parity():
    assert mover_kind(1, 0) == "R"
    assert mover_kind(2, 0) == "L"
    assert mover_kind(1, 1) == "L"


def test_pack_unpack_roundtrip():
    spec = _spec(n=9, depth=4)
    grid = sample_trajectory(spec, SupportPattern.full(9), seed=1).grid
    assert np.array_equal(unpack_grid(pack_grid(grid), grid.shape), grid)


def test_dump_trajectory_format():
    spec = _spec(n=6, depth=2)
    text = dump_trajectory(sample_trajectory(spec, SupportPattern.full(6), seed=4))
    for line in text.strip().split("\n"):
        t, x, kind = line.split(",")
        assert kind == mover_kind(int(x), int(t))


def test_covariance_requires_periodic_full():
    spec = _spec(n=8, depth=4)
    with pytest.raises(ValueError):
        estimate_covariance(spec, SupportPattern.full(8), 100, seed=0)
    per = _spec(n=8, depth=4, boundary="periodic")
    with pytest.raises(ValueError):
        estimate_covariance(per, SupportPattern.contiguous(8, 2), 100, seed=0)


def test_covariance_window_vanishes_outside_light_cone():
    # correlations cannot extend past separation 2t
    t = 2
    spec = _spec(n=16, depth=t, alpha=0.5, boundary="periodic")
    table = estimate_covariance(spec, SupportPattern.full(16), 40000, seed=9)
    for j in range(2 * t + 1, len(table.f)):
        assert abs(table.f[j]) < 6.0 * max(table.stderr[j], 1e-4)


def test_sigma2_from_covariance_window():
    t = 3
    spec = _spec(n=16, depth=t, alpha=0.5, boundary="periodic")
    table = estimate_covariance(spec, SupportPattern.full(16), 20000, seed=3)
    s_full = sigma2_from_covariance(table, window=8)
    s_cone = sigma2_from_covariance(table, window=2 * t)
    assert s_full == pytest.approx(s_cone, abs=0.01)
