"""McMurchie-Davidson machinery shared by the one- and two-electron integrals.

Everything is vectorised over primitive pairs: a shell pair (or a whole batch
of shell pairs of the same angular class) becomes a flat list of primitive
pairs with Gaussian product data and Hermite expansion coefficients.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .basis import Shell
from .boys import boys


@lru_cache(maxsize=None)
def hermite_index(L: int):
    """All (t, u, v) with t + u + v <= L and a lookup dict."""
    tuv = [(t, u, v) for n in range(L + 1)
           for t in range(n, -1, -1) for u in range(n - t, -1, -1) for v in [n - t - u]]
    return np.array(tuv, dtype=int), {k: i for i, k in enumerate(tuv)}


def hermite_e(la: int, lb: int, a, b, xa, xb):
    """E^{ij}_t for one Cartesian direction, shape (npair, la+1, lb+1, la+lb+1).

    a, b: exponents per primitive pair; xa, xb: centre coordinate per pair.
    The Gaussian prefactor exp(-mu X_AB^2) is included in E^{00}_0.
    """
    p = a + b
    mu = a * b / p
    xab = xa - xb
    xpa = -b / p * xab
    xpb = a / p * xab
    E = np.zeros((len(p), la + 1, lb + 1, la + lb + 2))
    E[:, 0, 0, 0] = np.exp(-mu * xab * xab)
    ip = 0.5 / p
    for i in range(la + 1):
        for j in range(lb + 1):
            if i == 0 and j == 0:
                continue
            for t in range(i + j + 1):
                if i > 0:
                    v = xpa * E[:, i - 1, j, t] + (t + 1) * E[:, i - 1, j, t + 1]
                    if t > 0:
                        v = v + ip * E[:, i - 1, j, t - 1]
                else:
                    v = xpb * E[:, i, j - 1, t] + (t + 1) * E[:, i, j - 1, t + 1]
                    if t > 0:
                        v = v + ip * E[:, i, j - 1, t - 1]
                E[:, i, j, t] = v
    return E[..., : la + lb + 1]


def hermite_r(L: int, alpha, X, Y, Z) -> np.ndarray:
    """Hermite Coulomb integrals R^0_{tuv}, shape (nherm(L),) + alpha.shape."""
    tuv, idx = hermite_index(L)
    T = alpha * (X * X + Y * Y + Z * Z)
    F = boys(L, T)
    # level n holds R^n_{tuv} for t+u+v <= L-n
    m2a = -2.0 * alpha
    prev = None
    for n in range(L, -1, -1):
        nh = len(hermite_index(L - n)[0])
        cur = np.empty((nh,) + np.shape(alpha))
        cur[0] = m2a ** n * F[n]
        for k in range(1, nh):
            t, u, v = tuv[k]
            if t > 0:
                val = X * prev[idx[(t - 1, u, v)]]
                if t > 1:
                    val = val + (t - 1) * prev[idx[(t - 2, u, v)]]
            elif u > 0:
                val = Y * prev[idx[(t, u - 1, v)]]
                if u > 1:
                    val = val + (u - 1) * prev[idx[(t, u - 2, v)]]
            else:
                val = Z * prev[idx[(t, u, v - 1)]]
                if v > 1:
                    val = val + (v - 1) * prev[idx[(t, u, v - 2)]]
            cur[k] = val
        prev = cur
    return prev


@dataclass
class PairBatch:
    """Primitive-pair data for a batch of shell pairs of one angular class."""

    la: int
    lb: int
    p: np.ndarray         # (nP,)
    P: np.ndarray         # (nP, 3)
    Eh: np.ndarray        # (nP, ncart_a*ncart_b, nherm(la+lb)), coefficients folded in
    starts: np.ndarray    # segment start of each shell pair in the primitive list
    pairs: list           # [(ishell, jshell), ...]


def _pair_primitives(sa: Shell, sb: Shell):
    a = np.repeat(sa.exps, len(sb.exps))
    b = np.tile(sb.exps, len(sa.exps))
    c = np.outer(sa.coefs, sb.coefs).ravel()
    return a, b, c


def build_pair_batch(shells_a, shells_b, pairs, extra_b: int = 0) -> PairBatch:
    """Hermite expansions for all *pairs* (i, j) of one class (la, lb).

    ``extra_b`` raises the ket angular momentum used in the E tables; it is
    only needed by the kinetic-energy integrals and leaves ``Eh`` unset.
    """
    la = shells_a[pairs[0][0]].l
    lb = shells_b[pairs[0][1]].l
    A, B, C, RA, RB, starts = [], [], [], [], [], []
    n = 0
    for i, j in pairs:
        a, b, c = _pair_primitives(shells_a[i], shells_b[j])
        A.append(a); B.append(b); C.append(c)
        RA.append(np.broadcast_to(shells_a[i].center, (len(a), 3)))
        RB.append(np.broadcast_to(shells_b[j].center, (len(a), 3)))
        starts.append(n)
        n += len(a)
    a = np.concatenate(A); b = np.concatenate(B); c = np.concatenate(C)
    ra = np.concatenate(RA); rb = np.concatenate(RB)
    p = a + b
    P = (a[:, None] * ra + b[:, None] * rb) / p[:, None]
    Ex = [hermite_e(la, lb + extra_b, a, b, ra[:, d], rb[:, d]) for d in range(3)]
    batch = PairBatch(la, lb, p, P, None, np.array(starts), list(pairs))
    batch.a, batch.b, batch.c = a, b, c
    batch.Ex = Ex
    if extra_b == 0:
        batch.Eh = _hermite_pair_matrix(la, lb, Ex, c, shells_a[pairs[0][0]], shells_b[pairs[0][1]])
    return batch


def _hermite_pair_matrix(la, lb, Ex, c, sa, sb):
    L = la + lb
    tuv, _ = hermite_index(L)
    ca, cb = sa.comps, sb.comps
    norm = np.outer(sa.comp_norm, sb.comp_norm).ravel()
    out = np.zeros((len(c), len(ca) * len(cb), len(tuv)))
    for ia, (ax, ay, az) in enumerate(ca):
        for ib, (bx, by, bz) in enumerate(cb):
            k = ia * len(cb) + ib
            ex = Ex[0][:, ax, bx]
            ey = Ex[1][:, ay, by]
            ez = Ex[2][:, az, bz]
            for h, (t, u, v) in enumerate(tuv):
                if t <= ax + bx and u <= ay + by and v <= az + bz:
                    out[:, k, h] = ex[:, t] * ey[:, u] * ez[:, v]
            out[:, k, :] *= norm[k]
    return out * c[:, None, None]


def group_pairs(shells_a, shells_b, pairs):
    """Group shell pairs by (la, lb)."""
    groups = {}
    for i, j in pairs:
        groups.setdefault((shells_a[i].l, shells_b[j].l), []).append((i, j))
    return groups
