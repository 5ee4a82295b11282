"""Brick-wall Givens fabric for real orbital rotations.

The fabric on N orbitals has N columns; column c holds rotations on the
neighbouring pairs (p, p+1) with p = c mod 2, giving N(N-1)/2 gates. With
G_p(theta) = exp(kappa), kappa[p, p+1] = theta, the fabric realises
U = G_m ... G_1 (time order left to right), and every U in SO(N) has a
decomposition (Clements et al. rectangular mesh, real case).
"""
from __future__ import annotations

import numpy as np


def fabric_layout(n: int):
    """[(column, p), ...] in application order."""
    return [(c, p) for c in range(n) for p in range(c % 2, n - 1, 2)]


def n_fabric(n: int) -> int:
    return n * (n - 1) // 2


def givens_matrix(n: int, p: int, theta: float) -> np.ndarray:
    G = np.eye(n)
    c, s = np.cos(theta), np.sin(theta)
    G[p, p] = G[p + 1, p + 1] = c
    G[p, p + 1] = s
    G[p + 1, p] = -s
    return G


def fabric_unitary(angles, n: int) -> np.ndarray:
    U = np.eye(n)
    for (c, p), th in zip(fabric_layout(n), angles):
        U = givens_matrix(n, p, th) @ U
    return U


def _layer(gates, n):
    """Assign time-ordered gates [(p, theta)] to the earliest possible columns."""
    depth = np.zeros(n, dtype=int)
    placed = []
    for p, th in gates:
        col = max(depth[p], depth[p + 1])
        # columns alternate parity; skip one if this pair does not fit
        if col % 2 != p % 2:
            col += 1
        depth[p] = depth[p + 1] = col + 1
        placed.append((col, p, th))
    return placed


def fabric_angles(U: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Angles (in ``fabric_layout`` order) with fabric_unitary(angles) == U."""
    U = np.array(U, dtype=float)
    n = U.shape[0]
    if n <= 1:
        return np.zeros(0)
    if np.abs(U @ U.T - np.eye(n)).max() > 1e-8:
        raise ValueError("matrix is not orthogonal")
    if np.linalg.det(U) < 0:
        raise ValueError("matrix has determinant -1; only SO(N) is reachable")
    W = U.copy()
    right, left = [], []
    for i in range(n - 1):
        if i % 2 == 0:
            for j in range(i + 1):
                r, c = n - 1 - j, i - j
                phi = np.arctan2(W[r, c], W[r, c + 1])
                W = W @ givens_matrix(n, c, phi)
                right.append((c, phi))
        else:
            for j in range(1, i + 2):
                r, c = n + j - i - 2, j - 1
                phi = np.arctan2(W[r, c], W[r - 1, c])
                W = givens_matrix(n, r - 1, phi) @ W
                left.append((r - 1, phi))
    d = np.sign(np.diag(W))
    d[d == 0] = 1.0
    # U = L1^T..Lk^T D Rr^T..R1^T  ->  U = D (D L1^T D)..(D Lk^T D) Rr^T..R1^T
    gates = [(c, -phi) for c, phi in right]
    gates += [(p, -phi * d[p] * d[p + 1]) for p, phi in reversed(left)]
    placed = _layer(gates, n)
    layout = fabric_layout(n)
    slot = {cp: k for k, cp in enumerate(layout)}
    angles = np.zeros(len(layout))
    for col, p, th in placed:
        if (col, p) not in slot:
            raise RuntimeError("decomposition does not fit the fabric layout")
        angles[slot[(col, p)]] = th
    # absorb the remaining +-1 diagonal: flip neighbouring pairs at the output
    for k in range(n - 1):
        if d[k] < 0:
            _push_pair_flip(angles, layout, n, k)
            d[k] *= -1
            d[k + 1] *= -1
    if d[-1] < 0:
        raise RuntimeError("odd number of sign flips")
    angles = (angles + np.pi) % (2 * np.pi) - np.pi
    err = np.abs(fabric_unitary(angles, n) - U).max()
    if err > tol:
        raise RuntimeError(f"fabric decomposition failed (error {err:.2e})")
    return angles


def _push_pair_flip(angles, layout, n, k):
    """Rewrite diag(.., -1_k, -1_{k+1}, ..) @ fabric as a fabric with new angles.

    The flip travels from the output backwards; gates sharing exactly one
    orbital with (k, k+1) change sign, the first gate on (k, k+1) absorbs it
    as theta + pi.
    """
    for g in range(len(layout) - 1, -1, -1):
        col, p = layout[g]
        if p == k:
            angles[g] += np.pi
            return
        if p == k - 1 or p == k + 1:
            angles[g] = -angles[g]
    raise RuntimeError("no gate available to absorb the sign flip")
