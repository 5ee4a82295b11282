"""Overlap, kinetic and nuclear-attraction matrices between two shell lists."""
import numpy as np

from .md import build_pair_batch, group_pairs, hermite_r, hermite_index


def _all_pairs(shells_a, shells_b):
    return [(i, j) for i in range(len(shells_a)) for j in range(len(shells_b))]


def _scatter(M, batch, vals, off_a, off_b, na, nb):
    # vals: (npairs, na*nb)
    for (i, j), v in zip(batch.pairs, vals):
        M[off_a[i]:off_a[i] + na, off_b[j]:off_b[j] + nb] = v.reshape(na, nb)


def _segsum(x, starts):
    return np.add.reduceat(x, starts, axis=0)


def _offsets(shells):
    return np.cumsum([0] + [s.ncart for s in shells])


def overlap(shells_a, shells_b=None) -> np.ndarray:
    shells_b = shells_a if shells_b is None else shells_b
    oa, ob = _offsets(shells_a), _offsets(shells_b)
    S = np.zeros((oa[-1], ob[-1]))
    for (la, lb), pairs in group_pairs(shells_a, shells_b, _all_pairs(shells_a, shells_b)).items():
        bt = build_pair_batch(shells_a, shells_b, pairs)
        vals = bt.Eh[:, :, 0] * ((np.pi / bt.p) ** 1.5)[:, None]
        _scatter(S, bt, _segsum(vals, bt.starts), oa, ob,
                 (la + 1) * (la + 2) // 2, (lb + 1) * (lb + 2) // 2)
    return S


def kinetic(shells_a, shells_b=None) -> np.ndarray:
    shells_b = shells_a if shells_b is None else shells_b
    oa, ob = _offsets(shells_a), _offsets(shells_b)
    T = np.zeros((oa[-1], ob[-1]))
    for (la, lb), pairs in group_pairs(shells_a, shells_b, _all_pairs(shells_a, shells_b)).items():
        bt = build_pair_batch(shells_a, shells_b, pairs, extra_b=2)
        sa, sb = shells_a[pairs[0][0]], shells_b[pairs[0][1]]
        b = bt.b
        pref = (np.pi / bt.p) ** 1.5 * bt.c
        norm = np.outer(sa.comp_norm, sb.comp_norm).ravel()
        vals = np.zeros((len(b), len(sa.comps) * len(sb.comps)))
        for ia, ca in enumerate(sa.comps):
            for ib, cb in enumerate(sb.comps):
                s = [bt.Ex[d][:, ca[d], cb[d], 0] for d in range(3)]
                k = []
                for d in range(3):
                    i, j = ca[d], cb[d]
                    Ed = bt.Ex[d][:, i, :, 0]
                    v = -2 * b * (2 * j + 1) * Ed[:, j] + 4 * b * b * Ed[:, j + 2]
                    if j >= 2:
                        v = v + j * (j - 1) * Ed[:, j - 2]
                    k.append(v)
                tot = k[0] * s[1] * s[2] + s[0] * k[1] * s[2] + s[0] * s[1] * k[2]
                vals[:, ia * len(sb.comps) + ib] = -0.5 * tot * pref * norm[ia * len(sb.comps) + ib]
        _scatter(T, bt, _segsum(vals, bt.starts), oa, ob, len(sa.comps), len(sb.comps))
    return T


def nuclear_attraction(shells_a, shells_b, charges, coords) -> np.ndarray:
    """sum_C -Z_C <a| 1/|r - R_C| |b>."""
    shells_b = shells_a if shells_b is None else shells_b
    charges = np.asarray(charges, float)
    coords = np.asarray(coords, float).reshape(-1, 3)
    oa, ob = _offsets(shells_a), _offsets(shells_b)
    V = np.zeros((oa[-1], ob[-1]))
    if len(charges) == 0:
        return V
    for (la, lb), pairs in group_pairs(shells_a, shells_b, _all_pairs(shells_a, shells_b)).items():
        bt = build_pair_batch(shells_a, shells_b, pairs)
        L = la + lb
        PC = bt.P[:, None, :] - coords[None, :, :]
        alpha = np.broadcast_to(bt.p[:, None], PC.shape[:2])
        R = hermite_r(L, alpha, PC[..., 0], PC[..., 1], PC[..., 2])  # (h, nP, nC)
        Rz = np.einsum("hPC,C->Ph", R, -charges)
        vals = np.einsum("Pkh,Ph->Pk", bt.Eh, Rz) * (2 * np.pi / bt.p)[:, None]
        _scatter(V, bt, _segsum(vals, bt.starts), oa, ob,
                 (la + 1) * (la + 2) // 2, (lb + 1) * (lb + 2) // 2)
    return V
