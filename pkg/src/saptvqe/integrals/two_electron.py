"""Electron repulsion integrals (ab|cd) in chemists' notation.

Shell pairs are batched by angular class; for every pair of classes the
Hermite Coulomb tensor is evaluated once over all primitive quartets and then
contracted with the bra and ket Hermite expansions. The unique quartets are
scattered into a dense tensor using the 8-fold permutational symmetry.
"""
import numpy as np

from .md import build_pair_batch, group_pairs, hermite_r, hermite_index

_CHUNK = 4_000_000  # max primitive-quartet x Hermite elements held at once


def _offsets(shells):
    return np.cumsum([0] + [s.ncart for s in shells])


_RMAP = {}


def _rmap(L1, L2):
    key = (L1, L2)
    if key not in _RMAP:
        t1, _ = hermite_index(L1)
        t2, _ = hermite_index(L2)
        _, idx = hermite_index(L1 + L2)
        m = np.array([[idx[tuple(a + b)] for b in t2] for a in t1])
        sign = (-1.0) ** t2.sum(axis=1)
        _RMAP[key] = (m, sign)
    return _RMAP[key]


def _class_block(bra, ket):
    """Contracted integrals for all bra pairs x ket pairs of two classes.

    Returns shape (nbra_pairs, nab, nket_pairs, ncd).
    """
    L1, L2 = bra.la + bra.lb, ket.la + ket.lb
    m, sign = _rmap(L1, L2)
    nh1, nh2 = m.shape
    ket_E = ket.Eh * sign[None, None, :]            # (nQ, ncd, h2)
    q, Q = ket.p, ket.P
    nQ = len(q)
    rows = max(1, _CHUNK // max(1, nQ * nh1 * nh2))
    out = []
    for s in range(0, len(bra.p), rows):
        p = bra.p[s:s + rows]
        P = bra.P[s:s + rows]
        pq = p[:, None] + q[None, :]
        alpha = p[:, None] * q[None, :] / pq
        PQ = P[:, None, :] - Q[None, :, :]
        R = hermite_r(L1 + L2, alpha, PQ[..., 0], PQ[..., 1], PQ[..., 2])  # (h, nP, nQ)
        pref = 2 * np.pi ** 2.5 / (p[:, None] * q[None, :] * np.sqrt(pq))
        R = R * pref
        Rm = R[m]                                   # (h1, h2, nP, nQ)
        # contract ket first: (h1, nP, nQ, ncd)
        tmp = np.einsum("klPQ,Qcl->kPQc", Rm, ket_E, optimize=True)
        out.append(np.einsum("Pak,kPQc->PaQc", bra.Eh[s:s + rows], tmp, optimize=True))
    prim = np.concatenate(out, axis=0)
    prim = np.add.reduceat(prim, bra.starts, axis=0)
    prim = np.add.reduceat(prim, ket.starts, axis=2)
    return prim


def _pair_ao_index(shells_a, shells_b, pairs, oa, ob):
    na = shells_a[pairs[0][0]].ncart
    nb = shells_b[pairs[0][1]].ncart
    ia = np.array([[oa[i] + x for x in range(na) for _ in range(nb)] for i, j in pairs])
    ib = np.array([[ob[j] + y for _ in range(na) for y in range(nb)] for i, j in pairs])
    return ia, ib


def eri_tensor(shells) -> np.ndarray:
    """Full (n, n, n, n) ERI tensor over one shell list."""
    off = _offsets(shells)
    n = off[-1]
    pairs = [(i, j) for i in range(len(shells)) for j in range(i + 1)]
    groups = group_pairs(shells, shells, pairs)
    keys = sorted(groups)
    batches = {k: build_pair_batch(shells, shells, groups[k]) for k in keys}
    index = {k: _pair_ao_index(shells, shells, groups[k], off, off) for k in keys}
    eri = np.zeros((n, n, n, n))
    for x, kx in enumerate(keys):
        ia, ib = index[kx]
        for ky in keys[x:]:
            ic, id_ = index[ky]
            blk = _class_block(batches[kx], batches[ky])  # (sX, ab, sY, cd)
            A = ia[:, :, None, None]; B = ib[:, :, None, None]
            C = ic[None, None]; D = id_[None, None]
            for (a, b) in ((A, B), (B, A)):
                for (c, d) in ((C, D), (D, C)):
                    eri[a, b, c, d] = blk
                    eri[c, d, a, b] = blk
    return eri


def eri_cross(shells_x, shells_y) -> np.ndarray:
    """(xx'|yy') with the bra pair on shell list X and the ket pair on Y."""
    ox, oy = _offsets(shells_x), _offsets(shells_y)
    px = [(i, j) for i in range(len(shells_x)) for j in range(i + 1)]
    py = [(i, j) for i in range(len(shells_y)) for j in range(i + 1)]
    gx = group_pairs(shells_x, shells_x, px)
    gy = group_pairs(shells_y, shells_y, py)
    eri = np.zeros((ox[-1], ox[-1], oy[-1], oy[-1]))
    by = {k: build_pair_batch(shells_y, shells_y, v) for k, v in gy.items()}
    iy = {k: _pair_ao_index(shells_y, shells_y, v, oy, oy) for k, v in gy.items()}
    for kx, vx in gx.items():
        bx = build_pair_batch(shells_x, shells_x, vx)
        ia, ib = _pair_ao_index(shells_x, shells_x, vx, ox, ox)
        A = ia[:, :, None, None]; B = ib[:, :, None, None]
        for ky in gy:
            ic, id_ = iy[ky]
            blk = _class_block(bx, by[ky])
            C = ic[None, None]; D = id_[None, None]
            for (a, b) in ((A, B), (B, A)):
                for (c, d) in ((C, D), (D, C)):
                    eri[a, b, c, d] = blk
    return eri
