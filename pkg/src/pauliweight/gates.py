"""Explicit two-qubit gates and their operator-entanglement analysis.

Pauli-string enumeration order is fixed as (1, X, Y, Z) per site, lexicographic
over sites, with the left site most significant.  Sums over Pauli strings are
order-insensitive mathematically, but test fixtures rely on this order.
"""

from __future__ import annotations

import itertools

import numpy as np

from .transfer import EntanglementCoords, TransferMatrix, check_feasible

UNITARITY_TOL_INGESTED = 1e-8   # matrices read from text files
UNITARITY_TOL_BUILT = 1e-12     # self-constructed gates

_I = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (_I, _X, _Y, _Z)

# All 16 two-qubit Pauli strings, index p = 4*p_left + p_right.
TWO_QUBIT_PAULIS = [np.kron(p, q) for p, q in itertools.product(PAULIS, PAULIS)]

# Support pattern of Pauli index p, in the (left-bit, right-bit) convention.
_PAULI_SUPPORT = [2 * (p // 4 != 0) + (p % 4 != 0) for p in range(16)]


def unitarity_residual(u: np.ndarray) -> float:
    """Max-entry deviation of U†U from the identity."""
    u = np.asarray(u, dtype=complex)
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def require_unitary(u: np.ndarray, tol: float = UNITARITY_TOL_INGESTED) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.shape != (4, 4):
        raise ValueError(f"expected a 4x4 two-qubit gate, got shape {u.shape}")
    res = unitarity_residual(u)
    if res > tol:
        raise ValueError(f"gate is not unitary (residual {res:.3e} > {tol:.0e})")
    return u


def build_v(j: float) -> np.ndarray:
    """Dual-unitary interaction gate V(J) = exp(-i(pi/4 (XX+YY) + J ZZ)).

    J=0 gives the iSWAP gate; J=pi/4 gives SWAP up to a global phase.
    """
    em = np.exp(-1j * j)
    ep = -1j * np.exp(1j * j)
    return np.array(
        [
            [em, 0, 0, 0],
            [0, 0, ep, 0],
            [0, ep, 0, 0],
            [0, 0, 0, em],
        ],
        dtype=complex,
    )


def named_gate(name: str) -> np.ndarray:
    """A handful of reference two-qubit gates."""
    name = name.lower()
    if name in ("identity", "id", "i"):
        return np.eye(4, dtype=complex)
    if name == "swap":
        return np.array(
            [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
        )
    if name == "iswap":
        return build_v(0.0)
    if name == "cnot":
        return np.array(
            [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
        )
    if name == "cz":
        return np.diag([1, 1, 1, -1]).astype(complex)
    raise ValueError(f"unknown gate name: {name!r}")


def alpha_from_j(j: float) -> float:
    """Scrambling parameter of the dual-unitary family, alpha = (2/3) cos^2(2J)."""
    return (2.0 / 3.0) * np.cos(2.0 * j) ** 2


def operator_purities(u: np.ndarray, tol: float = UNITARITY_TOL_INGESTED):
    """Choi-state Renyi-2 purities of the AA' and AB' bipartitions.

    The Choi state of a two-qubit U has legs (A, B) on the output side and
    (A', B') on the input side.  Both purities lie in [1/4, 1].
    """
    u = require_unitary(u, tol)
    # psi[a, b, a', b'] with outputs (a, b), inputs (a', b'); <psi|psi> = 1.
    psi = u.reshape(2, 2, 2, 2) / 2.0

    m_aa = psi.transpose(0, 2, 1, 3).reshape(4, 4)  # rows (a, a'), cols (b, b')
    m_ab = psi.transpose(0, 3, 1, 2).reshape(4, 4)  # rows (a, b'), cols (b, a')

    def purity(m):
        g = m @ m.conj().T
        return float(np.real(np.trace(g @ g)))

    return purity(m_aa), purity(m_ab)


def entanglement_coords(u: np.ndarray, tol: float = UNITARITY_TOL_INGESTED) -> EntanglementCoords:
    """Map a gate to its (i1, i2) coordinates via its Choi-state purities."""
    p_aa, p_ab = operator_purities(u, tol)
    return EntanglementCoords(
        i1=(4.0 * p_aa - 1.0) / 3.0, i2=(4.0 * p_ab - 1.0) / 3.0
    )


def twirled_transfer_matrix(u: np.ndarray, tol: float = UNITARITY_TOL_INGESTED) -> TransferMatrix:
    """Exact transfer matrix of the single-qubit-Haar twirl of a fixed gate.

    The Haar twirl over independent single-qubit dressings uniformizes
    nontrivial Pauli labels within each support class, so the Haar integral
    reduces to finite sums over Pauli strings:

        T[b, b'] = sum_{P: supp=b} 3^{-|b'|} sum_{P': supp=b'} (Tr[U P' U† P] / 4)^2
    """
    u = require_unitary(u, tol)
    coeff = np.empty((16, 16))
    for q, pq in enumerate(TWO_QUBIT_PAULIS):
        evolved = u @ pq @ u.conj().T
        for p, pp in enumerate(TWO_QUBIT_PAULIS):
            coeff[p, q] = np.real(np.trace(evolved @ pp)) ** 2 / 16.0
    entries = np.zeros((4, 4))
    for q in range(16):
        bq = _PAULI_SUPPORT[q]
        w = 3.0 ** -bin(bq).count("1")
        for p in range(16):
            entries[_PAULI_SUPPORT[p], bq] += w * coeff[p, q]
    return TransferMatrix(entries)


def single_qubit_cliffords() -> list[np.ndarray]:
    """The 24 single-qubit Clifford gates (up to global phase), by closure."""
    h = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    s = np.diag([1, 1j]).astype(complex)

    def canon(m):
        # Fix global phase by the first nonzero entry; +0 normalizes -0.0
        # so that tobytes() keys compare equal.
        flat = m.ravel()
        k = np.flatnonzero(np.abs(flat) > 1e-6)[0]
        mm = m * (np.abs(flat[k]) / flat[k])
        mm[np.abs(mm) < 1e-8] = 0
        return np.round(mm, 6) + (0.0 + 0.0j)

    group = {canon(np.eye(2, dtype=complex)).tobytes(): np.eye(2, dtype=complex)}
    frontier = list(group.values())
    while frontier:
        nxt = []
        for g in frontier:
            for gen in (h, s):
                m = gen @ g
                key = canon(m).tobytes()
                if key not in group:
                    group[key] = m
                    nxt.append(m)
        frontier = nxt
    assert len(group) == 24
    return list(group.values())


# ---------------------------------------------------------------------------
# Random two-qubit Cliffords via the symplectic group Sp(4, 2)
# ---------------------------------------------------------------------------

_SYMPLECTIC_CACHE = None


def symplectic_group_4_2() -> np.ndarray:
    """All 720 elements of Sp(4, 2) as binary 4x4 matrices.

    A two-qubit Clifford, modulo Pauli factors and phase, is exactly an
    element of Sp(4, 2) acting on Pauli labels (x1, z1, x2, z2) over GF(2).
    """
    global _SYMPLECTIC_CACHE
    if _SYMPLECTIC_CACHE is not None:
        return _SYMPLECTIC_CACHE
    # Symplectic form pairing x_i with z_i.
    j = np.zeros((4, 4), dtype=np.uint8)
    j[0, 1] = j[1, 0] = 1
    j[2, 3] = j[3, 2] = 1
    bits = ((np.arange(65536)[:, None] >> np.arange(16)) & 1).astype(np.uint8)
    mats = bits.reshape(-1, 4, 4)
    lhs = np.einsum("nij,jk,nkl->nil", mats.transpose(0, 2, 1), j, mats) % 2
    keep = np.all(lhs == j, axis=(1, 2))
    _SYMPLECTIC_CACHE = mats[keep]
    assert len(_SYMPLECTIC_CACHE) == 720
    return _SYMPLECTIC_CACHE


def _coords_from_symplectic(m: np.ndarray) -> EntanglementCoords:
    """(i1, i2) of a Clifford gate given its symplectic action on Pauli labels.

    For Cliffords, Tr[U P' U† P]/4 is ±1 when P' maps to ±P and 0 otherwise,
    so the twirled transfer-matrix entries reduce to counting label maps.
    Entry [01, 01] is i1 and entry [10, 01] is i2.
    """

    def support(v):
        return 2 * int(v[0] | v[1]) + int(v[2] | v[3])

    count_11 = 0  # 01 -> 01
    count_21 = 0  # 01 -> 10
    for v in _nonzero_vectors():
        if support(v) != 1:
            continue
        out = support((m @ v) % 2)
        if out == 1:
            count_11 += 1
        elif out == 2:
            count_21 += 1
    return EntanglementCoords(i1=count_11 / 3.0, i2=count_21 / 3.0)


def _nonzero_vectors():
    vs = ((np.arange(1, 16)[:, None] >> np.arange(4)) & 1).astype(np.uint8)
    return vs


def sample_clifford_coords(n_samples: int, seed: int) -> np.ndarray:
    """Entanglement coords of uniformly random two-qubit Cliffords.

    Returns an (n_samples, 2) array of (i1, i2) pairs.  Pauli factors and
    phases do not affect the coordinates, so sampling uniformly over
    Sp(4, 2) is equivalent to sampling the full Clifford group.
    """
    group = symplectic_group_4_2()
    coords = np.array(
        [[c.i1, c.i2] for c in (_coords_from_symplectic(m) for m in group)]
    )
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, len(group), size=n_samples)
    return coords[idx]


# ---------------------------------------------------------------------------
# Gate file format: 16 complex entries, row-major, "re,im" pairs, one matrix
# row per line, pairs separated by whitespace.
# ---------------------------------------------------------------------------

def save_gate(u: np.ndarray, path) -> None:
    u = np.asarray(u, dtype=complex)
    with open(path, "w") as fh:
        for row in u:
            fh.write(" ".join(f"{z.real:.17g},{z.imag:.17g}" for z in row) + "\n")


def load_gate(path) -> np.ndarray:
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            entries = []
            for field in line.split():
                re_s, im_s = field.split(",")
                entries.append(complex(float(re_s), float(im_s)))
            rows.append(entries)
    u = np.array(rows, dtype=complex)
    if u.shape != (4, 4):
        raise ValueError(f"gate file must contain a 4x4 matrix, got {u.shape}")
    return u


def gate_record(u: np.ndarray, dual_unitary_tol: float = 1e-9) -> dict:
    """(i1, i2, feasible, alpha) record for one gate; alpha only if dual-unitary."""
    c = entanglement_coords(u)
    rec = {
        "i1": c.i1,
        "i2": c.i2,
        "feasible": check_feasible(c),
        "alpha": "",
    }
    if abs(c.i1) < dual_unitary_tol:
        rec["alpha"] = 1.0 - c.i2
    return rec
