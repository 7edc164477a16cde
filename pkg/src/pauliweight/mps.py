"""Tensor-train form of the Pauli-weight vector for large chains.

Cores are order-3 arrays (left bond, physical 2, right bond).  Layers are
applied in a single sweep that carries the orthogonality center with it, so
every truncated SVD happens against a canonical environment and the discarded
weight is the true global error of that cut.  The state is a probability
vector, so mass (the all-ones contraction) rather than Euclidean norm is
renormalized after every layer.  Open chains only; periodic checks belong to
the dense engine.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dense import BrickwallSpec, SupportPattern

DEFAULT_MAX_BOND = 200
DEFAULT_CUTOFF = 1e-12


@dataclass
class MpsWeightState:
    cores: list
    max_bond: int = DEFAULT_MAX_BOND
    trunc_cutoff: float = DEFAULT_CUTOFF
    time: int = 0
    center: int = 0
    cumulative_trunc_error: float = 0.0
    last_mass_drift: float = 0.0

    @property
    def n(self) -> int:
        return len(self.cores)

    def bond_dims(self) -> list:
        return [c.shape[2] for c in self.cores[:-1]]

    def max_bond_used(self) -> int:
        dims = self.bond_dims()
        return max(dims) if dims else 1


def mps_init(p: SupportPattern, max_bond: int = DEFAULT_MAX_BOND,
             cutoff: float = DEFAULT_CUTOFF) -> MpsWeightState:
    """Bond-1 product state matching the dense basis state on pattern p."""
    cores = []
    for b in p.bits:
        core = np.zeros((1, 2, 1))
        core[0, b, 0] = 1.0
        cores.append(core)
    return MpsWeightState(cores=cores, max_bond=max_bond, trunc_cutoff=cutoff)


def _contract_all(state: MpsWeightState, site_vectors) -> float:
    """Left-to-right contraction with one length-2 vector per site."""
    left = np.ones(1)
    for core, v in zip(state.cores, site_vectors):
        # (Dl) x (Dl, 2, Dr) x (2) -> (Dr)
        left = np.einsum("a,aib,i->b", left, core, v, optimize=True)
    return float(left[0])


def mps_mass(state: MpsWeightState) -> float:
    ones = np.ones(2)
    return _contract_all(state, [ones] * state.n)


def mps_pauli_weight(state: MpsWeightState) -> float:
    m = np.array([1.0, 1.0 / 3.0])
    return _contract_all(state, [m] * state.n)


def mps_shadow_norm(state: MpsWeightState) -> float:
    return 1.0 / mps_pauli_weight(state)


def mps_occupation(state: MpsWeightState, x: int) -> float:
    """Single-site occupation at 1-based site x."""
    if not 1 <= x <= state.n:
        raise ValueError(f"site {x} out of range 1..{state.n}")
    ones = np.ones(2)
    hit = np.array([0.0, 1.0])
    vectors = [hit if i == x - 1 else ones for i in range(state.n)]
    return _contract_all(state, vectors)


def mps_occupation_profile(state: MpsWeightState) -> np.ndarray:
    """All single-site occupations in one pair of sweeps."""
    n = state.n
    ones = np.ones(2)
    # rights[i] contracts cores i..n-1 with ones
    rights = [None] * (n + 1)
    rights[n] = np.ones(1)
    for i in range(n - 1, -1, -1):
        m = np.einsum("aib,i->ab", state.cores[i], ones)
        rights[i] = m @ rights[i + 1]
    out = np.empty(n)
    left = np.ones(1)
    hit = np.array([0.0, 1.0])
    for i in range(n):
        m_hit = np.einsum("aib,i->ab", state.cores[i], hit)
        out[i] = left @ m_hit @ rights[i + 1]
        m = np.einsum("aib,i->ab", state.cores[i], ones)
        left = left @ m
    return out


def _shift_center_right(state: MpsWeightState):
    """QR the center core; absorb the triangular factor into the next core."""
    i = state.center
    core = state.cores[i]
    dl, _, dr = core.shape
    q, r = np.linalg.qr(core.reshape(dl * 2, dr))
    k = q.shape[1]
    state.cores[i] = q.reshape(dl, 2, k)
    state.cores[i + 1] = np.tensordot(r, state.cores[i + 1], axes=([1], [0]))
    state.center = i + 1


def _shift_center_left(state: MpsWeightState):
    """LQ (via transposed QR) the center core; absorb into the previous core."""
    i = state.center
    core = state.cores[i]
    dl, _, dr = core.shape
    q, r = np.linalg.qr(core.reshape(dl, 2 * dr).T)
    k = q.shape[1]
    state.cores[i] = q.T.reshape(k, 2, dr)
    state.cores[i - 1] = np.tensordot(state.cores[i - 1], r.T, axes=([2], [0]))
    state.center = i - 1


def _move_center(state: MpsWeightState, target: int):
    while state.center < target:
        _shift_center_right(state)
    while state.center > target:
        _shift_center_left(state)


def _apply_block(state: MpsWeightState, gate: np.ndarray, i: int,
                 center_right: bool):
    """Contract cores (i, i+1) with the 4x4 gate, split by truncated SVD.

    Requires the orthogonality center at i or i+1.  Leaves it at i+1 when
    center_right, else at i.
    """
    a, b = state.cores[i], state.cores[i + 1]
    dl, _, _ = a.shape
    _, _, dr = b.shape
    theta = np.tensordot(a, b, axes=([2], [0]))        # (Dl, 2, 2, Dr)
    theta = np.einsum("opij,aijb->aopb", gate.reshape(2, 2, 2, 2), theta,
                      optimize=True)
    mat = theta.reshape(dl * 2, 2 * dr)
    u, s, vh = np.linalg.svd(mat, full_matrices=False)
    if s[0] > 0:
        keep = s / s[0] > state.trunc_cutoff
        keep[state.max_bond:] = False
        k = max(int(keep.sum()), 1)
    else:
        k = 1
    total = float(np.sum(s**2))
    if total > 0:
        state.cumulative_trunc_error += float(np.sum(s[k:] ** 2)) / total
    if center_right:
        state.cores[i] = u[:, :k].reshape(dl, 2, k)
        state.cores[i + 1] = (s[:k, None] * vh[:k]).reshape(k, 2, dr)
        state.center = i + 1
    else:
        state.cores[i] = (u[:, :k] * s[:k]).reshape(dl, 2, k)
        state.cores[i + 1] = vh[:k].reshape(k, 2, dr)
        state.center = i


def mps_apply_layer(state: MpsWeightState, spec: BrickwallSpec,
                    layer_index: int) -> MpsWeightState:
    """One brick-wall layer with canonical truncation and mass renormalization.

    Even layers sweep left to right, odd layers right to left, so the
    orthogonality center only ever travels with the active block.
    """
    if spec.boundary != "open":
        raise ValueError("MPS engine supports open boundaries only")
    if state.time != layer_index:
        raise ValueError(f"state at t={state.time}, expected t={layer_index}")
    pairs = spec.layer_pairs(layer_index)
    gate = spec.tm.entries
    rightward = layer_index % 2 == 0
    if not rightward:
        pairs = pairs[::-1]
    for i, _ in pairs:
        _move_center(state, i if rightward else i + 1)
        _apply_block(state, gate, i, center_right=rightward)
    mass = mps_mass(state)
    state.last_mass_drift = abs(mass - 1.0)
    if mass <= 0:
        raise FloatingPointError("state mass collapsed to zero")
    state.cores[state.center] = state.cores[state.center] / mass
    state.time = layer_index + 1
    return state


def mps_evolve(spec: BrickwallSpec, p: SupportPattern,
               max_bond: int = DEFAULT_MAX_BOND,
               cutoff: float = DEFAULT_CUTOFF) -> MpsWeightState:
    if p.n != spec.n:
        raise ValueError("pattern length does not match spec")
    state = mps_init(p, max_bond=max_bond, cutoff=cutoff)
    for t in range(spec.depth):
        mps_apply_layer(state, spec, t)
    return state


def mps_evolve_trace(spec: BrickwallSpec, p: SupportPattern,
                     max_bond: int = DEFAULT_MAX_BOND,
                     cutoff: float = DEFAULT_CUTOFF):
    """Yield the state after every layer, starting with the initial state."""
    if p.n != spec.n:
        raise ValueError("pattern length does not match spec")
    state = mps_init(p, max_bond=max_bond, cutoff=cutoff)
    yield state
    for t in range(spec.depth):
        mps_apply_layer(state, spec, t)
        yield state


def _tilted_gate(tm_entries: np.ndarray) -> np.ndarray:
    """Similarity transform S T S^-1 with S = diag(1, 1/3) per leg.

    Under the tilt the Pauli weight of the evolved state becomes its total
    mass, so truncation errors stay relative to the weight itself instead of
    drowning an exponentially small contraction at large n.
    """
    d = np.array([1.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 9.0])
    return tm_entries * d[:, None] / d[None, :]


def mps_log_weight_trace(spec: BrickwallSpec, p: SupportPattern,
                         max_bond: int = DEFAULT_MAX_BOND,
                         cutoff: float = DEFAULT_CUTOFF):
    """Yield log(pauli weight) after every layer, starting at t=0.

    Evolves the tilted state phi = (diag(1,1/3) per site) psi, whose mass is
    the Pauli weight; the mass factor removed by each layer renormalization
    accumulates in log space.  Also yields the tilted state for diagnostics.
    """
    if p.n != spec.n:
        raise ValueError("pattern length does not match spec")
    if spec.boundary != "open":
        raise ValueError("MPS engine supports open boundaries only")
    state = mps_init(p, max_bond=max_bond, cutoff=cutoff)
    gate = _tilted_gate(spec.tm.entries)
    log_w = -p.size * np.log(3.0)
    yield log_w, state
    for t in range(spec.depth):
        pairs = spec.layer_pairs(t)
        rightward = t % 2 == 0
        if not rightward:
            pairs = pairs[::-1]
        for i, _ in pairs:
            _move_center(state, i if rightward else i + 1)
            _apply_block(state, gate, i, center_right=rightward)
        mass = mps_mass(state)
        if mass <= 0:
            raise FloatingPointError("tilted state mass collapsed to zero")
        state.cores[state.center] = state.cores[state.center] / mass
        log_w += np.log(mass)
        state.time = t + 1
        yield log_w, state


def mps_log_pauli_weight(spec: BrickwallSpec, p: SupportPattern,
                         max_bond: int = DEFAULT_MAX_BOND,
                         cutoff: float = DEFAULT_CUTOFF) -> float:
    """log of the final-depth Pauli weight via the tilted evolution."""
    for log_w, _ in mps_log_weight_trace(spec, p, max_bond=max_bond,
                                         cutoff=cutoff):
        pass
    return float(log_w)


def mps_to_dense(state: MpsWeightState, max_sites: int = 20) -> np.ndarray:
    """Full 2^n vector, for validation against the dense engine."""
    if state.n > max_sites:
        raise ValueError(f"refusing to densify n={state.n} > {max_sites}")
    acc = np.ones((1, 1))
    for core in state.cores:
        # (prefix, Dl) x (Dl, 2, Dr) -> (prefix*2, Dr)
        acc = np.tensordot(acc, core, axes=([1], [0])).reshape(-1, core.shape[2])
    return acc[:, 0]


def mps_amplitude(state: MpsWeightState, bits) -> float:
    """Amplitude of a single basis state, contracted without densifying."""
    vecs = []
    for b in bits:
        v = np.zeros(2)
        v[b] = 1.0
        vecs.append(v)
    return _contract_all(state, vecs)
