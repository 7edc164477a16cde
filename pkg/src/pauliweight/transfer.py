"""Closed-form 4x4 transfer matrices acting on two-site support patterns.

Basis order is (00, 01, 10, 11), where the left bit is the left circuit leg.
Matrices are column-stochastic: entry [b, b'] is the probability that input
support pattern b' maps to output pattern b.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Per-site contraction vector for a terminal measurement layer.
MEASUREMENT_VECTOR = np.array([1.0, 1.0 / 3.0])

PATTERNS = ("00", "01", "10", "11")


@dataclass(frozen=True)
class EntanglementCoords:
    """Operator-entanglement coordinates (i1, i2) of a two-qubit gate ensemble."""

    i1: float
    i2: float

    @property
    def s(self) -> float:
        return self.i1 + self.i2


def check_feasible(c: EntanglementCoords, tol: float = 1e-9) -> bool:
    """True iff (i1, i2) lies in the feasible domain of two-qubit gates.

    The domain is the box [0,1]^2 cut by i1 + i2 >= 1/3 and
    sqrt(i1) + sqrt(i2) <= 1.
    """
    i1, i2 = c.i1, c.i2
    if not (-tol <= i1 <= 1 + tol and -tol <= i2 <= 1 + tol):
        return False
    if i1 + i2 < 1.0 / 3.0 - tol:
        return False
    if np.sqrt(max(i1, 0.0)) + np.sqrt(max(i2, 0.0)) > 1 + tol:
        return False
    return True


class TransferMatrix:
    """Column-stochastic 4x4 map on two-site support patterns."""

    def __init__(self, entries, validate: bool = True):
        self.entries = np.asarray(entries, dtype=float)
        if self.entries.shape != (4, 4):
            raise ValueError("transfer matrix must be 4x4")
        if validate:
            self.validate()

    def validate(self, tol: float = 1e-12):
        t = self.entries
        if np.any(t < -tol):
            raise ValueError("transfer matrix has negative entries")
        col_sums = t.sum(axis=0)
        if np.any(np.abs(col_sums - 1.0) > 1e-10):
            raise ValueError(f"columns must sum to one, got {col_sums}")
        if abs(t[0, 0] - 1.0) > tol:
            raise ValueError("vacuum must map to vacuum with probability one")
        if np.any(np.abs(t[0, 1:]) > tol) or np.any(np.abs(t[1:, 0]) > tol):
            raise ValueError("vacuum block must decouple")

    def __getitem__(self, key):
        return self.entries[key]

    def __eq__(self, other):
        return isinstance(other, TransferMatrix) and np.array_equal(
            self.entries, other.entries
        )

    def __repr__(self):
        return f"TransferMatrix({self.entries.tolist()})"

    def column_cdf(self) -> np.ndarray:
        """Cumulative distributions down each column, for inverse-CDF sampling."""
        return np.cumsum(self.entries, axis=0)

    def to_csv(self) -> str:
        """Entries with a header row, for test fixtures."""
        lines = ["out\\in," + ",".join(PATTERNS)]
        for b, row in zip(PATTERNS, self.entries):
            lines.append(b + "," + ",".join(repr(v) for v in row))
        return "\n".join(lines) + "\n"


def general_tm(c: EntanglementCoords) -> TransferMatrix:
    """Transfer matrix of a locally-scrambled two-qubit ensemble with coords c.

    Infeasible coordinates still produce a matrix (useful for plotting sweeps)
    as long as every entry stays non-negative.
    """
    i1, i2 = c.i1, c.i2
    r = 1.0 - i1 - i2
    entries = np.array(
        [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, i1, i2, r / 3.0],
            [0.0, i2, i1, r / 3.0],
            [0.0, r, r, (1.0 + 2.0 * (i1 + i2)) / 3.0],
        ]
    )
    if np.any(entries < -1e-12):
        raise ValueError(f"coords {c} yield negative transfer-matrix entries")
    return TransferMatrix(np.clip(entries, 0.0, None))


def dual_unitary_tm(alpha: float) -> TransferMatrix:
    """Transfer matrix of the random dual-unitary ensemble with scrambling alpha."""
    if not 0.0 <= alpha <= 2.0 / 3.0 + 1e-12:
        raise ValueError(f"alpha must lie in [0, 2/3], got {alpha}")
    a = float(alpha)
    entries = np.array(
        [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 1.0 - a, a / 3.0],
            [0.0, 1.0 - a, 0.0, a / 3.0],
            [0.0, a, a, 1.0 - 2.0 * a / 3.0],
        ]
    )
    return TransferMatrix(entries)


def clifford_tm() -> TransferMatrix:
    """Transfer matrix of the random two-qubit Clifford ensemble."""
    entries = np.array(
        [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.2, 0.2, 0.2],
            [0.0, 0.2, 0.2, 0.2],
            [0.0, 0.6, 0.6, 0.6],
        ]
    )
    return TransferMatrix(entries)


def two_qubit_shadow_norm(k: int, s: float) -> float:
    """Closed-form shadow norm of a k-site Pauli in a two-qubit scheme.

    Depends on the gate ensemble only through s = i1 + i2.
    """
    if s < 1.0 / 3.0 - 1e-9 or s > 1.0 + 1e-9:
        raise ValueError(f"s must lie in [1/3, 1], got {s}")
    if k == 0:
        return 1.0
    if k == 1:
        return 9.0 / (1.0 + 2.0 * s)
    if k == 2:
        return 27.0 / (7.0 - 4.0 * s)
    raise ValueError(f"k must be in {{0, 1, 2}}, got {k}")
