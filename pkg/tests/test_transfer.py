"""Unit tests for the closed-form transfer matrices."""

import numpy as np
import pytest

from pauliweight.transfer import (
    EntanglementCoords,
    TransferMatrix,
    check_feasible,
    clifford_tm,
    dual_unitary_tm,
    general_tm,
    two_qubit_shadow_norm,
)


def test_dual_unitary_columns():
    tm = dual_unitary_tm(0.5)
    assert np.allclose(tm.entries.sum(axis=0), 1.0)
    assert tm[0, 0] == 1.0
    # single-particle columns branch with probability alpha
    assert tm[3, 1] == pytest.approx(0.5)
    assert tm[2, 1] == pytest.approx(0.5)
    assert tm[1, 1] == 0.0


def test_dual_unitary_swap_point():
    # alpha = 0 is the SWAP point: pure permutation of the two legs
    swap = np.array(
        [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=float
    )
    assert np.allclose(dual_unitary_tm(0.0).entries, swap)


def test_dual_unitary_rejects_bad_alpha():
    with pytest.raises(ValueError):
        dual_unitary_tm(-0.1)
    with pytest.raises(ValueError):
        dual_unitary_tm(0.7)


def test_clifford_columns():
    tm = clifford_tm()
    expected_col = np.array([0.0, 0.2, 0.2, 0.6])
    for col in (1, 2, 3):
        assert np.allclose(tm.entries[:, col], expected_col)


def test_general_tm_identity_coords():
    tm = general_tm(EntanglementCoords(i1=1.0, i2=0.0))
    assert np.allclose(tm.entries, np.eye(4))


def test_general_tm_swap_coords():
    tm = general_tm(EntanglementCoords(i1=0.0, i2=1.0))
    swap = dual_unitary_tm(0.0)
    assert np.allclose(tm.entries, swap.entries)


def test_general_matches_dual_unitary_family():
    # dual-unitary gates sit on the i1 = 0 edge with i2 = 1 - alpha
    for alpha in (0.1, 1.0 / 3.0, 0.6):
        a = general_tm(EntanglementCoords(i1=0.0, i2=1.0 - alpha))
        b = dual_unitary_tm(alpha)
        assert np.allclose(a.entries, b.entries, atol=1e-14)


def test_validate_rejects_nonstochastic():
    bad = np.eye(4)
    bad[1, 1] = 0.5
    with pytest.raises(ValueError):
        TransferMatrix(bad)


def test_validate_rejects_vacuum_coupling():
    bad = np.eye(4) * 0.0
    bad[0, 0] = 0.5
    bad[1, 0] = 0.5
    bad[1:, 1:] = np.eye(3)
    with pytest.raises(ValueError):
        TransferMatrix(bad)


def test_column_cdf_monotone():
    cdf = dual_unitary_tm(0.4).column_cdf()
    assert np.all(np.diff(cdf, axis=0) >= -1e-15)
    assert np.allclose(cdf[-1], 1.0)


def test_feasibility_region():
    assert check_feasible(EntanglementCoords(1.0, 0.0))       # identity corner
    assert check_feasible(EntanglementCoords(0.0, 1.0))       # SWAP corner
    assert check_feasible(EntanglementCoords(0.0, 1.0 / 3.0))  # iSWAP corner
    assert check_feasible(EntanglementCoords(1.0 / 3.0, 0.0))
    assert not check_feasible(EntanglementCoords(0.5, 0.5))   # sqrt bound
    assert not check_feasible(EntanglementCoords(0.1, 0.1))   # s >= 1/3 bound
    assert not check_feasible(EntanglementCoords(-0.1, 0.9))


def test_two_qubit_shadow_norm_values():
    assert two_qubit_shadow_norm(0, 0.5) == 1.0
    assert two_qubit_shadow_norm(1, 1.0) == pytest.approx(3.0)
    assert two_qubit_shadow_norm(2, 1.0) == pytest.approx(9.0)
    with pytest.raises(ValueError):
        two_qubit_shadow_norm(3, 0.5)
    with pytest.raises(ValueError):
        two_qubit_shadow_norm(1, 0.1)


def test_to_csv_header():
    text = clifford_tm().to_csv()
    lines = text.strip().split("\n")
    assert lines[0].startswith("out\\in,")
    assert len(lines) == 5
