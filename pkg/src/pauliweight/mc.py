"""Monte Carlo sampling of the Markov process defined by a transfer matrix.

Randomness comes from a counter-based splitmix64 hash of
(master seed, trajectory index, layer, block), so results are bit-identical
for a given seed regardless of batch size or parallel scheduling.  Block
outcomes are drawn by inverse CDF over the fixed order (00, 01, 10, 11).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dense import BrickwallSpec, SupportPattern

BATCH = 8192

_U64 = np.uint64
_GOLDEN = _U64(0x9E3779B97F4A7C15)
_MIX1 = _U64(0xBF58476D1CE4E5B9)
_MIX2 = _U64(0x94D049BB133111EB)


def _mix64(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> _U64(30))) * _MIX1
    z = (z ^ (z >> _U64(27))) * _MIX2
    return z ^ (z >> _U64(31))


def _uniforms(seed: int, traj: np.ndarray, layer: int, block: np.ndarray) -> np.ndarray:
    """Uniforms in [0, 1) for every (trajectory, block) pair of one layer."""
    with np.errstate(over="ignore"):
        key = _mix64(_U64(seed & 0xFFFFFFFFFFFFFFFF) + _GOLDEN * traj.astype(_U64))
        ctr = _mix64(_U64(layer + 1) * _GOLDEN + block.astype(_U64) * _MIX1)
        bits = _mix64(key[:, None] ^ ctr[None, :])
    return (bits >> _U64(11)).astype(np.float64) * (2.0**-53)


@dataclass
class TrajectoryConfig:
    """One sampled space-time bit configuration; row t is the slice at depth t."""

    grid: np.ndarray  # (depth+1, n) uint8
    seed: int
    traj_index: int
    spec: BrickwallSpec


@dataclass
class OccupationField:
    """Per-(x, t) sample means of the occupation with binomial standard errors."""

    rho: np.ndarray     # (depth+1, n)
    stderr: np.ndarray  # (depth+1, n)
    n_samples: int


@dataclass
class CovarianceTable:
    """Translation-averaged covariance f(j) at a fixed time slice."""

    f: np.ndarray       # separations j = 0 .. n//2
    stderr: np.ndarray
    rho: float
    t_slice: int
    n_samples: int


def mover_kind(x: int, t: int) -> str:
    """'R' or 'L' for an occupied 1-based site x at depth t.

    Parity-even sites (0-based x + t even) host right movers; this labels
    diagnostics and dumps only, never the sampled dynamics.
    """
    return "R" if ((x - 1) + t) % 2 == 0 else "L"


def _step_rows(rows: np.ndarray, spec: BrickwallSpec, layer: int,
               seed: int, traj: np.ndarray, cdf_t: np.ndarray) -> None:
    """Advance a (batch, n) array of bit rows by one layer, in place."""
    pairs = spec.layer_pairs(layer)
    if not pairs:
        return
    lefts = np.array([p[0] for p in pairs])
    rights = np.array([p[1] for p in pairs])
    idx_in = (rows[:, lefts].astype(np.intp) << 1) | rows[:, rights]
    u = _uniforms(seed, traj, layer, lefts)
    out = (u[:, :, None] >= cdf_t[idx_in]).sum(axis=2)
    rows[:, lefts] = (out >> 1).astype(np.uint8)
    rows[:, rights] = (out & 1).astype(np.uint8)


def _column_cdf_t(spec: BrickwallSpec) -> np.ndarray:
    cdf = spec.tm.column_cdf().T.copy()  # (input, cumulative over outputs)
    cdf[:, -1] = 1.0 + 1e-15             # guard against roundoff at u ~ 1
    return cdf


def _batches(n_samples: int):
    start = 0
    while start < n_samples:
        stop = min(start + BATCH, n_samples)
        yield np.arange(start, stop, dtype=np.int64)
        start = stop


def sample_trajectory(spec: BrickwallSpec, p: SupportPattern, seed: int,
                      traj_index: int = 0) -> TrajectoryConfig:
    """One space-time configuration, deterministic in (spec, p, seed, index)."""
    cdf_t = _column_cdf_t(spec)
    traj = np.array([traj_index], dtype=np.int64)
    rows = np.tile(p.as_array(), (1, 1))
    grid = np.empty((spec.depth + 1, spec.n), dtype=np.uint8)
    grid[0] = rows[0]
    for t in range(spec.depth):
        _step_rows(rows, spec, t, seed, traj, cdf_t)
        grid[t + 1] = rows[0]
    return TrajectoryConfig(grid=grid, seed=seed, traj_index=traj_index, spec=spec)


def pack_grid(grid: np.ndarray) -> np.ndarray:
    """Bit-pack a trajectory grid for bulk storage."""
    return np.packbits(grid, axis=None)


def unpack_grid(packed: np.ndarray, shape) -> np.ndarray:
    return np.unpackbits(packed, count=int(np.prod(shape))).reshape(shape)


def dump_trajectory(cfg: TrajectoryConfig) -> str:
    """One line per occupied cell, 't,x,kind' with 1-based x."""
    lines = []
    for t, row in enumerate(cfg.grid):
        for x0 in np.flatnonzero(row):
            lines.append(f"{t},{x0 + 1},{mover_kind(x0 + 1, t)}")
    return "\n".join(lines) + ("\n" if lines else "")


def estimate_occupation(spec: BrickwallSpec, p: SupportPattern,
                        n_samples: int, seed: int) -> OccupationField:
    """Sample-mean occupation field over n_samples trajectories."""
    if n_samples < 1:
        raise ValueError("need at least one sample")
    cdf_t = _column_cdf_t(spec)
    counts = np.zeros((spec.depth + 1, spec.n), dtype=np.int64)
    init = p.as_array()
    for traj in _batches(n_samples):
        rows = np.tile(init, (len(traj), 1))
        counts[0] += rows.sum(axis=0, dtype=np.int64)
        for t in range(spec.depth):
            _step_rows(rows, spec, t, seed, traj, cdf_t)
            counts[t + 1] += rows.sum(axis=0, dtype=np.int64)
    rho = counts / n_samples
    stderr = np.sqrt(rho * (1.0 - rho) / n_samples)
    return OccupationField(rho=rho, stderr=stderr, n_samples=n_samples)


def estimate_pauli_weight(spec: BrickwallSpec, p: SupportPattern,
                          n_samples: int, seed: int):
    """Unbiased (mean, stderr) of the Pauli weight: mean of 3^-|final row|."""
    cdf_t = _column_cdf_t(spec)
    init = p.as_array()
    s1 = 0.0
    s2 = 0.0
    for traj in _batches(n_samples):
        rows = np.tile(init, (len(traj), 1))
        for t in range(spec.depth):
            _step_rows(rows, spec, t, seed, traj, cdf_t)
        w = 3.0 ** (-rows.sum(axis=1, dtype=np.float64))
        s1 += w.sum()
        s2 += (w * w).sum()
    mean = s1 / n_samples
    if n_samples > 1:
        var = max(s2 - n_samples * mean**2, 0.0) / (n_samples - 1)
    else:
        var = 0.0
    return mean, float(np.sqrt(var / n_samples))


def estimate_pauli_weight_trace(spec: BrickwallSpec, p: SupportPattern,
                                n_samples: int, seed: int):
    """(mean, stderr) arrays of the Pauli weight at every slice t = 0..depth."""
    cdf_t = _column_cdf_t(spec)
    init = p.as_array()
    s1 = np.zeros(spec.depth + 1)
    s2 = np.zeros(spec.depth + 1)
    for traj in _batches(n_samples):
        rows = np.tile(init, (len(traj), 1))
        w = 3.0 ** (-rows.sum(axis=1, dtype=np.float64))
        s1[0] += w.sum()
        s2[0] += (w * w).sum()
        for t in range(spec.depth):
            _step_rows(rows, spec, t, seed, traj, cdf_t)
            w = 3.0 ** (-rows.sum(axis=1, dtype=np.float64))
            s1[t + 1] += w.sum()
            s2[t + 1] += (w * w).sum()
    mean = s1 / n_samples
    if n_samples > 1:
        var = np.maximum(s2 - n_samples * mean**2, 0.0) / (n_samples - 1)
    else:
        var = np.zeros_like(mean)
    return mean, np.sqrt(var / n_samples)


def estimate_covariance(spec: BrickwallSpec, p: SupportPattern,
                        n_samples: int, seed: int,
                        t_slice: int | None = None) -> CovarianceTable:
    """Translation-averaged covariance f(j) of the occupation bits.

    Requires periodic boundaries and full support, the setting where the
    weight distribution is translation invariant.
    """
    if spec.boundary != "periodic":
        raise ValueError("covariance estimator requires periodic boundaries")
    if p.size != p.n:
        raise ValueError("covariance estimator requires full initial support")
    t_slice = spec.depth if t_slice is None else t_slice
    if not 0 <= t_slice <= spec.depth:
        raise ValueError("t_slice out of range")
    n = spec.n
    cdf_t = _column_cdf_t(spec)
    init = p.as_array()
    sg = np.zeros(n)
    sg2 = np.zeros(n)
    dens = 0.0
    for traj in _batches(n_samples):
        rows = np.tile(init, (len(traj), 1))
        for t in range(t_slice):
            _step_rows(rows, spec, t, seed, traj, cdf_t)
        x = rows.astype(np.float64)
        fr = np.fft.rfft(x, axis=1)
        corr = np.fft.irfft(fr * fr.conj(), n=n, axis=1) / n  # g_j per sample
        sg += corr.sum(axis=0)
        sg2 += (corr**2).sum(axis=0)
        dens += x.sum()
    rho = dens / (n_samples * n)
    g_mean = sg / n_samples
    g_var = np.maximum(sg2 / n_samples - g_mean**2, 0.0)
    f = g_mean - rho**2
    stderr = np.sqrt(g_var / n_samples)
    half = n // 2
    return CovarianceTable(f=f[: half + 1], stderr=stderr[: half + 1],
                           rho=float(rho), t_slice=t_slice, n_samples=n_samples)


def sigma2_from_covariance(table: CovarianceTable, window: int) -> float:
    """Normalized variance rho(1-rho) + 2 sum_{j=1}^{window} f(j)."""
    window = min(window, len(table.f) - 1)
    return float(table.f[0] + 2.0 * table.f[1 : window + 1].sum())
