"""Jordan-Wigner statevector on an interleaved spin-orbital register.

Qubit 2p holds spin-orbital (p, alpha) and qubit 2p+1 holds (p, beta); the
basis index is sum_q n_q 2^q. The JW ordering of creation operators follows
the qubit index, so a+_i a_j picks up (-1)^(occupied modes strictly between).

Every gate in the ansatz touches two neighbouring spatial orbitals, i.e. four
consecutive qubits 2p .. 2p+3, and is applied as a real 16 x 16 matrix. All
gates are real orthogonal, so amplitudes are kept in float64.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np
import scipy.sparse as sp


# ---------------------------------------------------------------- local gates

def _local_hop(i, j):
    """16x16 matrix of a+_i a_j - a+_j a_i on local modes 0..3 (i < j)."""
    A = np.zeros((16, 16))
    for x in range(16):
        if (x >> j) & 1 and not (x >> i) & 1:
            y = x ^ (1 << i) ^ (1 << j)
            between = bin(x & ((1 << j) - 1) & ~((1 << (i + 1)) - 1)).count("1")
            sg = -1.0 if between % 2 else 1.0
            A[y, x] = sg
            A[x, y] = -sg
    return A


A_ALPHA = _local_hop(0, 2)     # (p,a) <-> (p+1,a), sign from (p,b)
A_BETA = _local_hop(1, 3)      # (p,b) <-> (p+1,b), sign from (p+1,a)
A_GIVENS = A_ALPHA + A_BETA
A_PX = np.zeros((16, 16))
A_PX[12, 3] = 1.0
A_PX[3, 12] = -1.0


def givens_local(theta: float) -> np.ndarray:
    """Spin-restricted Givens rotation exp(theta (A_alpha + A_beta)).

    On one-electron states this is a+_{p+1} -> cos a+_{p+1} + sin a+_p, i.e.
    the orbital rotation exp(kappa) with kappa[p, p+1] = theta.
    """
    c, s = np.cos(theta), np.sin(theta)
    Ga = np.eye(16) + s * A_ALPHA + (1 - c) * A_ALPHA @ A_ALPHA
    Gb = np.eye(16) + s * A_BETA + (1 - c) * A_BETA @ A_BETA
    return Ga @ Gb


def px_local(theta: float) -> np.ndarray:
    """Pair-exchange gate: rotates local |3> (p doubly occupied) and |12>
    (p+1 doubly occupied) by [[c, -s], [s, c]], identity elsewhere."""
    c, s = np.cos(theta), np.sin(theta)
    M = np.eye(16)
    M[3, 3] = M[12, 12] = c
    M[3, 12] = -s
    M[12, 3] = s
    return M


def apply_local(psi: np.ndarray, M: np.ndarray, p: int, nqubits: int) -> np.ndarray:
    """Apply a 16x16 matrix to qubits 2p..2p+3."""
    if p < 0 or 2 * p + 4 > nqubits:
        raise ValueError(f"qubit index out of range: orbitals ({p}, {p + 1}) on {nqubits} qubits")
    lo = 2 * p
    v = psi.reshape(1 << (nqubits - lo - 4), 16, 1 << lo)
    return np.matmul(M, v).reshape(psi.shape)


def apply_givens(psi, p, theta, norb):
    return apply_local(psi, givens_local(theta), p, 2 * norb)


def apply_px(psi, p, theta, norb):
    return apply_local(psi, px_local(theta), p, 2 * norb)


# ---------------------------------------------------------------- basis states

def occupation_index(alpha_occ, beta_occ) -> int:
    idx = 0
    for p in alpha_occ:
        idx |= 1 << (2 * p)
    for p in beta_occ:
        idx |= 1 << (2 * p + 1)
    return idx


def hf_state(norb, n_alpha, n_beta) -> np.ndarray:
    psi = np.zeros(1 << (2 * norb))
    psi[occupation_index(range(n_alpha), range(n_beta))] = 1.0
    return psi


def _popcount(x):
    x = np.asarray(x, dtype=np.int64)
    c = np.zeros_like(x)
    while np.any(x):
        c += x & 1
        x = x >> 1
    return c


@lru_cache(maxsize=None)
def sector_indices(norb, n_alpha, n_beta) -> np.ndarray:
    idx = np.arange(1 << (2 * norb), dtype=np.int64)
    amask = sum(1 << (2 * p) for p in range(norb))
    na = _popcount(idx & amask)
    nb = _popcount(idx & (amask << 1))
    out = idx[(na == n_alpha) & (nb == n_beta)]
    out.setflags(write=False)
    return out


def ci_to_statevector(ci, alpha_strings, beta_strings, norb) -> np.ndarray:
    """Embed a determinant-CI vector (alpha-string x beta-string, alpha
    creators ordered before beta creators) into the interleaved register."""
    psi = np.zeros(1 << (2 * norb))
    for ia, a in enumerate(alpha_strings):
        for ib, b in enumerate(beta_strings):
            # reordering alpha-first -> interleaved: count beta r below alpha p
            swaps = sum(1 for p in a for r in b if r < p)
            psi[occupation_index(a, b)] = (-1.0) ** swaps * ci[ia, ib]
    return psi


# ------------------------------------------------------------ excitation ops

@lru_cache(maxsize=64)
def _spin_hop_table(nq, i, j):
    """Sources, targets and signs of a+_i a_j on the full register."""
    idx = np.arange(1 << nq, dtype=np.int64)
    if i == j:
        src = idx[(idx >> i) & 1 == 1]
        return src, src, np.ones(len(src))
    src = idx[((idx >> j) & 1 == 1) & ((idx >> i) & 1 == 0)]
    lo, hi = min(i, j), max(i, j)
    mask = ((1 << hi) - 1) & ~((1 << (lo + 1)) - 1)
    sgn = 1.0 - 2.0 * (_popcount(src & mask) % 2)
    tgt = src ^ (1 << i) ^ (1 << j)
    return src, tgt, sgn


def apply_E(psi, p, q, norb):
    """Spin-summed excitation E_pq = sum_sigma a+_{p sigma} a_{q sigma}."""
    nq = 2 * norb
    out = np.zeros_like(psi)
    for s in (0, 1):
        src, tgt, sgn = _spin_hop_table(nq, 2 * p + s, 2 * q + s)
        out[tgt] += sgn * psi[src]
    return out


def excitation_vectors(psi, norb) -> np.ndarray:
    """Stack of E_pq psi, shape (norb, norb, dim)."""
    return np.array([[apply_E(psi, p, q, norb) for q in range(norb)] for p in range(norb)])


def statevector_rdms(psi, norb):
    """Spin-summed gamma[p,q] = <E_pq> and Gamma[p,q,r,s] = <E_pr E_qs> - d_qr <E_ps>."""
    D = excitation_vectors(psi, norb).reshape(norb * norb, -1)
    gamma = (D @ psi).reshape(norb, norb)
    M = (D @ D.T).reshape(norb, norb, norb, norb)   # <E_rp psi | E_qs psi>
    Gamma = M.transpose(1, 2, 0, 3) - np.einsum("qr,ps->pqrs", np.eye(norb), gamma)
    return gamma, Gamma


def number_expectation(psi) -> float:
    nq = int(np.log2(len(psi)))
    idx = np.arange(len(psi), dtype=np.int64)
    return float(np.sum(psi * psi * _popcount(idx)))


def z_expectations(psi, norb) -> np.ndarray:
    """<Z_q> for every qubit q, Z = 1 - 2 n."""
    idx = np.arange(len(psi), dtype=np.int64)
    prob = psi * psi
    return np.array([np.sum(prob * (1 - 2 * ((idx >> q) & 1))) for q in range(2 * norb)])


# -------------------------------------------------------------- Hamiltonian

def _sector_E(norb, n_alpha, n_beta):
    sec = sector_indices(norb, n_alpha, n_beta)
    pos = -np.ones(1 << (2 * norb), dtype=np.int64)
    pos[sec] = np.arange(len(sec))
    E = {}
    for p in range(norb):
        for q in range(norb):
            rows, cols, vals = [], [], []
            for s in (0, 1):
                src, tgt, sgn = _spin_hop_table(2 * norb, 2 * p + s, 2 * q + s)
                keep = pos[src] >= 0
                rows.append(pos[tgt[keep]]); cols.append(pos[src[keep]]); vals.append(sgn[keep])
            E[p, q] = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                                    shape=(len(sec), len(sec)))
    return sec, E


def sector_hamiltonian(h, v, n_alpha, n_beta):
    """Active-space Hamiltonian as a sparse matrix on the (n_alpha, n_beta) sector,
    H = sum k_pq E_pq + 1/2 sum_pr E_pr (sum_qs (pr|qs) E_qs)."""
    norb = h.shape[0]
    sec, E = _sector_E(norb, n_alpha, n_beta)
    k = h - 0.5 * np.einsum("prrq->pq", v)
    H = sp.csr_matrix((len(sec), len(sec)))
    for p in range(norb):
        for r in range(norb):
            M = sum(v[p, r, q, s] * E[q, s] for q in range(norb) for s in range(norb))
            H = H + 0.5 * (E[p, r] @ M) + k[p, r] * E[p, r]
    return sec, H.tocsr()
