"""Exact evolution of the 2^n Pauli-weight vector under brick-wall layers.

Sites are 1-based in all public interfaces and 0-based internally.  Layer 0
is "even" and pairs sites (1,2), (3,4), ...; odd layers pair (2,3), (4,5),
... and, under periodic boundaries, the wrap pair (n, 1).  Unpaired edge
sites under open boundaries pass through unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .transfer import TransferMatrix

DENSE_MAX_SITES = 26  # ~0.5 GB of float64 amplitudes

CLAMP_TOL = 1e-14     # negative amplitudes above this magnitude are clamped
HARD_NEG_TOL = 1e-10  # below this, evolution aborts


@dataclass(frozen=True)
class SupportPattern:
    """Occupation bits of an operator support; bit x = 1 iff site x is occupied."""

    bits: tuple

    def __post_init__(self):
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("support bits must be 0 or 1")

    @property
    def n(self) -> int:
        return len(self.bits)

    @property
    def size(self) -> int:
        return int(sum(self.bits))

    def as_array(self) -> np.ndarray:
        return np.array(self.bits, dtype=np.uint8)

    @classmethod
    def from_string(cls, s: str) -> "SupportPattern":
        return cls(tuple(int(ch) for ch in s))

    @classmethod
    def empty(cls, n: int) -> "SupportPattern":
        return cls((0,) * n)

    @classmethod
    def full(cls, n: int) -> "SupportPattern":
        return cls((1,) * n)

    @classmethod
    def single_site(cls, n: int, x: int) -> "SupportPattern":
        """Single particle at 1-based site x."""
        if not 1 <= x <= n:
            raise ValueError(f"site {x} out of range 1..{n}")
        bits = [0] * n
        bits[x - 1] = 1
        return cls(tuple(bits))

    @classmethod
    def contiguous(cls, n: int, k: int, center: int | None = None) -> "SupportPattern":
        """Contiguous block of k occupied sites, centered in the chain by default."""
        if k > n:
            raise ValueError(f"support size {k} exceeds site count {n}")
        start = (n - k) // 2 if center is None else center - 1 - (k - 1) // 2
        if start < 0 or start + k > n:
            raise ValueError("contiguous support does not fit in the chain")
        bits = [0] * n
        for i in range(start, start + k):
            bits[i] = 1
        return cls(tuple(bits))


@dataclass(frozen=True)
class BrickwallSpec:
    """Geometry of a brick-wall circuit of two-site transfer matrices."""

    n: int
    depth: int
    tm: TransferMatrix
    boundary: str = "open"

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("need at least two sites")
        if self.depth < 0:
            raise ValueError("depth must be non-negative")
        if self.boundary not in ("open", "periodic"):
            raise ValueError(f"unknown boundary mode {self.boundary!r}")
        if self.boundary == "periodic" and self.n % 2:
            raise ValueError("periodic boundary requires an even site count")

    def layer_pairs(self, layer_index: int) -> list[tuple[int, int]]:
        """0-based (left, right) site pairs acted on by the given layer."""
        n = self.n
        if layer_index % 2 == 0:
            return [(i, i + 1) for i in range(0, n - 1, 2)]
        pairs = [(i, i + 1) for i in range(1, n - 1, 2)]
        if self.boundary == "periodic":
            pairs.append((n - 1, 0))
        return pairs


@dataclass
class WeightState:
    """Probability distribution over the 2^n support patterns."""

    amplitudes: np.ndarray  # flat, length 2^n, site 1 = most significant bit
    n: int
    time: int = 0

    def check(self):
        if np.any(self.amplitudes < -HARD_NEG_TOL):
            raise FloatingPointError(
                f"amplitude below -{HARD_NEG_TOL:g} at t={self.time}"
            )
        total = self.amplitudes.sum()
        if abs(total - 1.0) > 1e-10:
            raise FloatingPointError(f"mass {total} drifted from 1 at t={self.time}")

    def as_tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.n)


def init_state(p: SupportPattern) -> WeightState:
    """Deterministic basis state on the given support pattern."""
    n = p.n
    if n > DENSE_MAX_SITES:
        raise ValueError(f"dense engine capped at n <= {DENSE_MAX_SITES}")
    amps = np.zeros(2**n)
    idx = 0
    for b in p.bits:
        idx = (idx << 1) | b
    amps[idx] = 1.0
    return WeightState(amplitudes=amps, n=n, time=0)


def _gate_tensor(tm: TransferMatrix) -> np.ndarray:
    # G[o1, o2, i1, i2] with pattern index 2*left + right.
    return tm.entries.reshape(2, 2, 2, 2)


def apply_layer(state: WeightState, spec: BrickwallSpec, layer_index: int) -> WeightState:
    """One brick-wall layer of the spec's transfer matrix."""
    if state.time != layer_index:
        raise ValueError(f"state at t={state.time}, expected t={layer_index}")
    g = _gate_tensor(spec.tm)
    arr = state.as_tensor()
    for i, j in spec.layer_pairs(layer_index):
        arr = np.moveaxis(np.tensordot(g, arr, axes=([2, 3], [i, j])), [0, 1], [i, j])
    amps = arr.reshape(-1)
    amps = np.where((amps < 0) & (amps > -HARD_NEG_TOL), 0.0, amps)
    out = WeightState(amplitudes=np.ascontiguousarray(amps), n=state.n,
                      time=layer_index + 1)
    out.check()
    return out


def evolve(spec: BrickwallSpec, p: SupportPattern) -> WeightState:
    """init_state followed by spec.depth brick-wall layers."""
    if p.n != spec.n:
        raise ValueError("pattern length does not match spec")
    state = init_state(p)
    for t in range(spec.depth):
        state = apply_layer(state, spec, t)
    return state


def evolve_trace(spec: BrickwallSpec, p: SupportPattern):
    """Yield the state after every layer, starting with the initial state."""
    if p.n != spec.n:
        raise ValueError("pattern length does not match spec")
    state = init_state(p)
    yield state
    for t in range(spec.depth):
        state = apply_layer(state, spec, t)
        yield state


def occupation(state: WeightState, sites) -> float:
    """Probability that all listed 1-based sites are simultaneously occupied."""
    sites = sorted(set(sites))
    if not sites:
        return 1.0
    if sites[0] < 1 or sites[-1] > state.n:
        raise ValueError(f"site index out of range 1..{state.n}")
    arr = state.as_tensor()
    for k, x in enumerate(sites):
        arr = np.take(arr, 1, axis=(x - 1) - k)
    return float(arr.sum())


def occupation_profile(state: WeightState) -> np.ndarray:
    """Single-site occupations rho(x) for x = 1..n, as an array."""
    arr = state.as_tensor()
    out = np.empty(state.n)
    for x in range(state.n):
        out[x] = np.take(arr, 1, axis=x).sum()
    return out


def pauli_weight(state: WeightState) -> float:
    """Contraction with (1, 1/3) on every site; the shadow norm is its inverse."""
    m = np.array([1.0, 1.0 / 3.0])
    arr = state.as_tensor()
    for _ in range(state.n):
        arr = np.tensordot(m, arr, axes=([0], [0]))
    return float(arr)


def shadow_norm(state: WeightState) -> float:
    return 1.0 / pauli_weight(state)


def marginal(state: WeightState, a) -> float:
    """Direct marginal w(A): probability that the support equals exactly A."""
    a = set(a)
    arr = state.as_tensor()
    for x in range(state.n, 0, -1):
        arr = np.take(arr, 1 if x in a else 0, axis=x - 1)
    return float(arr)


def weight_from_occupations(state: WeightState, a) -> float:
    """w(A) recovered from occupations by inclusion-exclusion (diagnostic)."""
    a = set(a)
    complement = [x for x in range(1, state.n + 1) if x not in a]
    if len(complement) > 20:
        raise ValueError("superset enumeration limited to |A^c| <= 20")
    total = 0.0
    for r in range(len(complement) + 1):
        for extra in combinations(complement, r):
            b = a | set(extra)
            total += (-1.0) ** (len(b) - len(a)) * occupation(state, b)
    return total
