"""Unit tests for the tensor-train engine against the dense reference."""

import numpy as np
import pytest

from pauliweight import dense
from pauliweight.dense import BrickwallSpec, SupportPattern
from pauliweight.mps import (
    mps_amplitude,
    mps_evolve,
    mps_evolve_trace,
    mps_init,
    mps_log_pauli_weight,
    mps_log_weight_trace,
    mps_mass,
    mps_occupation,
    mps_occupation_profile,
    mps_pauli_weight,
    mps_shadow_norm,
    mps_to_dense,
)
from pauliweight.transfer import clifford_tm, dual_unitary_tm


def _spec(n, depth, alpha=0.5):
    return BrickwallSpec(n=n, depth=depth, tm=dual_unitary_tm(alpha))


def test_init_matches_dense():
    p = SupportPattern.from_string("0110101")
    state = mps_init(p)
    ref = dense.init_state(p)
    assert np.allclose(mps_to_dense(state), ref.amplitudes)
    assert mps_mass(state) == pytest.approx(1.0)


def test_exact_evolution_matches_dense():
    n, depth = 10, 8
    p = SupportPattern.full(n)
    for tm in (dual_unitary_tm(1.0 / 3.0), clifford_tm()):
        spec = BrickwallSpec(n=n, depth=depth, tm=tm)
        state = mps_evolve(spec, p, max_bond=64, cutoff=0.0)
        ref = dense.evolve(spec, p)
        assert np.max(np.abs(mps_to_dense(state) - ref.amplitudes)) < 1e-12
        assert mps_pauli_weight(state) == pytest.approx(
            dense.pauli_weight(ref), rel=1e-12)
        assert mps_shadow_norm(state) == pytest.approx(
            dense.shadow_norm(ref), rel=1e-12)


def test_profile_matches_dense():
    n, depth = 12, 6
    p = SupportPattern.contiguous(n, 4)
    spec = _spec(n, depth, alpha=0.4)
    for t, (state, ref) in enumerate(
        zip(mps_evolve_trace(spec, p, cutoff=0.0),
            dense.evolve_trace(spec, p))
    ):
        prof = mps_occupation_profile(state)
        assert np.max(np.abs(prof - dense.occupation_profile(ref))) < 1e-12
        for x in (1, n // 2, n):
            assert mps_occupation(state, x) == pytest.approx(prof[x - 1],
                                                             abs=1e-12)


def test_amplitude_agrees_with_dense_vector():
    n = 8
    spec = _spec(n, 4)
    state = mps_evolve(spec, SupportPattern.full(n), cutoff=0.0)
    vec = mps_to_dense(state)
    rng = np.random.default_rng(1)
    for _ in range(10):
        bits = rng.integers(0, 2, size=n)
        idx = int("".join(map(str, bits)), 2)
        assert mps_amplitude(state, bits) == pytest.approx(vec[idx], abs=1e-13)


def test_tilted_log_weight_matches_dense():
    n, depth = 12, 10
    p = SupportPattern.full(n)
    spec = _spec(n, depth, alpha=2.0 / 3.0)
    logs = [lw for lw, _ in mps_log_weight_trace(spec, p, cutoff=0.0)]
    for t, ref in enumerate(dense.evolve_trace(spec, p)):
        assert logs[t] == pytest.approx(np.log(dense.pauli_weight(ref)),
                                        abs=1e-10)
    assert mps_log_pauli_weight(spec, p, cutoff=0.0) == pytest.approx(
        logs[-1], abs=1e-12)


def test_truncation_error_tracked_and_small():
    n, depth = 40, 12
    spec = _spec(n, depth, alpha=1.0 / 3.0)
    state = mps_evolve(spec, SupportPattern.full(n), max_bond=64, cutoff=1e-12)
    assert state.cumulative_trunc_error < 1e-6
    assert state.max_bond_used() <= 64
    assert abs(mps_mass(state) - 1.0) < 1e-10


def test_mass_renormalized_each_layer():
    n, depth = 20, 6
    spec = _spec(n, depth)
    for state in mps_evolve_trace(spec, SupportPattern.full(n)):
        assert abs(mps_mass(state) - 1.0) < 1e-10


def test_rejects_periodic():
    spec = BrickwallSpec(n=8, depth=2, tm=clifford_tm(), boundary="periodic")
    with pytest.raises(ValueError):
        mps_evolve(spec, SupportPattern.full(8))


def test_large_chain_beta_is_finite_and_sane():
    n = 60
    spec = _spec(n, 10, alpha=0.5)
    logs = [lw for lw, _ in mps_log_weight_trace(spec, SupportPattern.full(n))]
    betas = [np.exp(-lw / n) for lw in logs]
    assert betas[0] == pytest.approx(3.0)
    # beta decreases towards the deep-circuit plateau above 2
    assert all(b2 <= b1 + 1e-9 for b1, b2 in zip(betas, betas[1:]))
    assert betas[-1] > 2.0
