"""Determinant CI in the active space, with spin-summed reduced density matrices.

Conventions (used throughout the package):
    gamma[p, q]       = <E_pq>,  E_pq = sum_sigma a+_{p sigma} a_{q sigma}
    Gamma[p, q, r, s] = <E_pr E_qs> - delta_qr <E_ps>
                      = sum_{sigma tau} <a+_{p sigma} a+_{q tau} a_{s tau} a_{r sigma}>
    E = sum h_pq gamma_pq + 1/2 sum (pr|qs) Gamma[p, q, r, s]
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .active_space import ActiveHamiltonian

DENSE_LIMIT = 10_000
MAX_DIM = 10_000_000


class CASCIError(RuntimeError):
    pass


class StringSpace:
    """Occupation strings of *nelec* electrons in *norb* orbitals.

    Strings are enumerated in lexicographic order of occupied orbitals, so
    index 0 is the aufbau string. Single-excitation links carry the fermionic
    sign of a+_p a_q acting on the string.
    """

    def __init__(self, norb, nelec):
        self.norb, self.nelec = norb, nelec
        self.occ = [c for c in combinations(range(norb), nelec)]
        self.bits = np.array([sum(1 << i for i in c) for c in self.occ], dtype=np.int64)
        index = {b: i for i, b in enumerate(self.bits.tolist())}
        I, J, P, Q, sgn = [], [], [], [], []
        for i, b in enumerate(self.bits.tolist()):
            for q in range(norb):
                if not b >> q & 1:
                    continue
                for p in range(norb):
                    if p != q and b >> p & 1:
                        continue
                    nb = (b ^ (1 << q)) | (1 << p)
                    lo, hi = min(p, q), max(p, q)
                    between = bin(b & ((1 << hi) - 1) & ~((1 << (lo + 1)) - 1)).count("1")
                    I.append(i); J.append(index[nb]); P.append(p); Q.append(q)
                    sgn.append(-1.0 if between % 2 else 1.0)
        self.link = (np.array(I, int), np.array(J, int), np.array(P, int),
                     np.array(Q, int), np.array(sgn))
        self.occupation = np.array([[1.0 if b >> k & 1 else 0.0 for k in range(norb)]
                                    for b in self.bits.tolist()]).reshape(len(self.bits), norb)

    def __len__(self):
        return len(self.bits)


class CISpace:
    def __init__(self, norb, n_alpha, n_beta):
        self.norb = norb
        self.a = StringSpace(norb, n_alpha)
        self.b = StringSpace(norb, n_beta) if n_beta != n_alpha else self.a
        self.shape = (len(self.a), len(self.b))
        self.dim = self.shape[0] * self.shape[1]

    def excitations(self, C):
        """D[p, q] = E_pq C for every p, q. C has shape (nA, nB, ...)."""
        n = self.norb
        D = np.zeros((n, n) + C.shape)
        I, J, P, Q, s = self.a.link
        np.add.at(D, (P, Q, J), s.reshape((-1,) + (1,) * (C.ndim - 1)) * C[I])
        I, J, P, Q, s = self.b.link
        Ct = np.moveaxis(C, 1, 0)
        Dt = np.zeros((n, n) + Ct.shape)
        np.add.at(Dt, (P, Q, J), s.reshape((-1,) + (1,) * (C.ndim - 1)) * Ct[I])
        D += np.moveaxis(Dt, 2, 3)
        return D

    def apply_E(self, G):
        """sum_pq E_pq G[p, q] for a stack G of shape (n, n, nA, nB, ...)."""
        I, J, P, Q, s = self.a.link
        out = np.zeros(G.shape[2:])
        np.add.at(out, J, s.reshape((-1,) + (1,) * (out.ndim - 1)) * G[P, Q, I])
        I, J, P, Q, s = self.b.link
        Gt = np.moveaxis(G, 3, 2)
        outt = np.zeros((G.shape[3], G.shape[2]) + G.shape[4:])
        np.add.at(outt, J, s.reshape((-1,) + (1,) * (outt.ndim - 1)) * Gt[P, Q, I])
        return out + np.moveaxis(outt, 0, 1)

    def sigma(self, ham: ActiveHamiltonian, C):
        k = ham.h - 0.5 * np.einsum("prrq->pq", ham.v)
        D = self.excitations(C)
        G = 0.5 * np.tensordot(ham.v, D, axes=([2, 3], [0, 1]))
        G += k.reshape(k.shape + (1,) * C.ndim) * C[None, None]
        return self.apply_E(G)

    def diagonal(self, ham: ActiveHamiltonian):
        oa, ob = self.a.occupation, self.b.occupation
        hd = np.diag(ham.h)
        Jm = np.einsum("iijj->ij", ham.v)
        Km = np.einsum("ijji->ij", ham.v)
        ea = oa @ hd + 0.5 * np.einsum("Ii,ij,Ij->I", oa, Jm - Km, oa)
        eb = ob @ hd + 0.5 * np.einsum("Ii,ij,Ij->I", ob, Jm - Km, ob)
        return ea[:, None] + eb[None, :] + oa @ Jm @ ob.T

    def rdms(self, C):
        """Spin-summed 1- and 2-RDMs of a normalised CI vector."""
        n = self.norb
        D = self.excitations(C).reshape(n * n, -1)
        gamma = (D @ C.ravel()).reshape(n, n)
        M = (D @ D.T).reshape(n, n, n, n)        # M[r, p, q, s] = <E_rp C | E_qs C>
        Gamma = M.transpose(1, 2, 0, 3) - np.einsum("qr,ps->pqrs", np.eye(n), gamma)
        return gamma, Gamma


def rdm_energy(h, v, gamma, Gamma, e_const=0.0):
    return float(np.einsum("pq,pq->", h, gamma) + 0.5 * np.einsum("prqs,pqrs->", v, Gamma)
                 + e_const)


def spin_square(gamma, Gamma):
    """<S^2> from spin-summed RDMs: -1/2 sum_pq Gamma[p,q,q,p] - N(N-4)/4."""
    N = np.trace(gamma)
    return float(-0.5 * np.einsum("pqqp->", Gamma) - N * (N - 4) / 4)


@dataclass
class CASCIResult:
    energy: float
    e_active: float
    ci: np.ndarray
    gamma: np.ndarray
    Gamma: np.ndarray
    s2: float
    dim: int
    method: str


def davidson(matvec, diag, x0, tol=1e-10, max_space=20, max_iter=500):
    n = len(diag)
    V = (x0 / np.linalg.norm(x0))[:, None]
    AV = matvec(V[:, 0])[:, None]
    theta = 0.0
    for it in range(max_iter):
        Hs = V.T @ AV
        w, U = np.linalg.eigh(0.5 * (Hs + Hs.T))
        theta, u = w[0], U[:, 0]
        x = V @ u
        r = AV @ u - theta * x
        if np.linalg.norm(r) < tol:
            return theta, x
        if V.shape[1] >= max_space:
            V, AV = x[:, None], (AV @ u)[:, None]
            continue
        denom = diag - theta
        denom[np.abs(denom) < 1e-8] = 1e-8
        t = r / denom
        t -= V @ (V.T @ t)
        t -= V @ (V.T @ t)
        nt = np.linalg.norm(t)
        if nt < 1e-14:
            return theta, x
        t /= nt
        V = np.hstack([V, t[:, None]])
        AV = np.hstack([AV, matvec(t)[:, None]])
    raise CASCIError(f"Davidson did not converge (residual {np.linalg.norm(r):.2e})")


def casci(ham: ActiveHamiltonian, tol=1e-10, s2_tol=1e-8) -> CASCIResult:
    space = CISpace(ham.norb, ham.n_alpha, ham.n_beta)
    if space.dim > MAX_DIM:
        raise CASCIError(f"CI dimension {space.dim} exceeds {MAX_DIM}")
    if space.dim <= DENSE_LIMIT:
        H = np.empty((space.dim, space.dim))
        eye = np.eye(space.dim)
        chunk = max(1, 2_000_000 // (space.dim * ham.norb ** 2))
        for s in range(0, space.dim, chunk):
            cols = eye[:, s:s + chunk].reshape(space.shape + (-1,))
            H[:, s:s + chunk] = space.sigma(ham, cols).reshape(space.dim, -1)
        w, U = np.linalg.eigh(0.5 * (H + H.T))
        e, x = w[0], U[:, 0]
        method = "dense"
    else:
        diag = space.diagonal(ham).ravel()
        x0 = np.zeros(space.dim)
        x0[0] = 1.0
        e, x = davidson(lambda y: space.sigma(ham, y.reshape(space.shape)).ravel(),
                        diag, x0, tol=tol)
        method = "davidson"
    if x[0] < 0:
        x = -x
    C = x.reshape(space.shape)
    gamma, Gamma = space.rdms(C)
    s2 = spin_square(gamma, Gamma)
    if abs(s2) > s2_tol:
        raise CASCIError(f"CASCI ground state is not a singlet (<S^2> = {s2:.3e})")
    return CASCIResult(float(e) + ham.e_frozen, float(e), C, gamma, Gamma, s2, space.dim, method)
