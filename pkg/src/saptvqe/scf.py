"""Closed-shell Hartree-Fock with DIIS."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .integrals import IntegralSet, nuclear_repulsion


class SCFError(RuntimeError):
    def __init__(self, msg, energy=None, residual=None):
        super().__init__(msg)
        self.energy, self.residual = energy, residual


def build_JK(D, eri):
    """Coulomb and exchange matrices J_mn = (mn|ls) D_ls, K_mn = (ml|ns) D_ls."""
    J = np.einsum("mnls,ls->mn", eri, D, optimize=True)
    K = np.einsum("mlns,ls->mn", eri, D, optimize=True)
    return J, K


def orthogonalizer(S, cutoff=1e-8, max_cond=1e10):
    """Symmetric S^-1/2, switching to canonical form if eigenvalues fall below *cutoff*."""
    w, U = np.linalg.eigh(S)
    if w[0] <= 0 or w[-1] / w[0] > max_cond:
        raise SCFError(f"overlap matrix is singular (condition number {w[-1] / max(w[0], 1e-300):.2e})")
    keep = w > cutoff
    if keep.all():
        return (U / np.sqrt(w)) @ U.T
    return U[:, keep] / np.sqrt(w[keep])


def _fix_phase(C):
    idx = np.argmax(np.abs(C) > np.abs(C).max(axis=0) - 1e-10, axis=0)
    sgn = np.sign(C[idx, np.arange(C.shape[1])])
    sgn[sgn == 0] = 1.0
    return C * sgn


@dataclass
class RHFResult:
    C: np.ndarray
    eps: np.ndarray
    energy: float
    n_occ: int
    e_nuc: float
    h: np.ndarray
    S: np.ndarray
    converged: bool
    niter: int
    residual: float
    history: list = field(default_factory=list)

    @property
    def D(self):
        """Spin-summed AO density 2 C_occ C_occ^T."""
        Co = self.C[:, : self.n_occ]
        return 2 * Co @ Co.T

    @property
    def nmo(self):
        return self.C.shape[1]


class DIIS:
    def __init__(self, depth=8):
        self.depth = depth
        self.F, self.err = [], []

    def reset(self):
        self.F, self.err = [], []

    def update(self, F, err):
        self.F.append(F)
        self.err.append(err)
        if len(self.F) > self.depth:
            self.F.pop(0)
            self.err.pop(0)
        n = len(self.F)
        B = -np.ones((n + 1, n + 1))
        B[n, n] = 0
        for i in range(n):
            for j in range(i + 1):
                B[i, j] = B[j, i] = np.vdot(self.err[i], self.err[j])
        rhs = np.zeros(n + 1)
        rhs[n] = -1
        try:
            c = np.linalg.solve(B, rhs)[:n]
        except np.linalg.LinAlgError:
            c = np.linalg.lstsq(B, rhs, rcond=None)[0][:n]
        return sum(ci * Fi for ci, Fi in zip(c, self.F))


def _check_aufbau(F, C, n_occ, tol, E):
    if n_occ == 0 or n_occ == C.shape[1]:
        return
    Co, Cv = C[:, :n_occ], C[:, n_occ:]
    homo = np.linalg.eigvalsh(Co.T @ F @ Co)[-1]
    lumo = np.linalg.eigvalsh(Cv.T @ F @ Cv)[0]
    if homo > lumo + tol:
        raise SCFError(f"SCF reached a non-aufbau stationary point (HOMO {homo:.6f} above "
                       f"LUMO {lumo:.6f}); supply a symmetric density guess", E, 0.0)


def rhf(h, S, eri, nelec, e_nuc=0.0, conv_tol=1e-8, max_iter=100,
        diis_depth=8, diis_start=2, diis_patience=10, guess=None,
        aufbau_tol=1e-6) -> RHFResult:
    """Closed-shell SCF with DIIS from a core-Hamiltonian guess.

    *guess* optionally replaces the core guess by the Fock matrix of a
    spin-summed AO density. The DIIS history is dropped whenever the
    commutator residual has not improved for *diis_patience* iterations
    (stale vectors can trap the extrapolation in a cycle, e.g. for stretched
    bonds). A stationary point whose occupied orbital energies lie above a
    virtual one (possible when the guess is exactly degenerate) is rejected.
    """
    if nelec % 2:
        raise SCFError(f"odd electron count ({nelec}) is not supported by closed-shell RHF")
    n_occ = nelec // 2
    X = orthogonalizer(S)

    def diag(F):
        e, Cp = np.linalg.eigh(X.T @ F @ X)
        return e, X @ Cp

    if guess is None:
        eps, C = diag(h)
    else:
        J, K = build_JK(0.5 * np.asarray(guess, float), eri)
        eps, C = diag(h + 2 * J - K)
    diis = DIIS(diis_depth)
    history = []
    res = best = np.inf
    since_best = 0
    for it in range(1, max_iter + 1):
        Co = C[:, :n_occ]
        D = Co @ Co.T
        J, K = build_JK(D, eri)
        F = h + 2 * J - K
        E = float(np.sum(D * (h + F))) + e_nuc
        err = F @ D @ S - S @ D @ F
        res = float(np.abs(err).max()) if n_occ else 0.0
        history.append((it, E, res))
        if res < conv_tol:
            _check_aufbau(F, C, n_occ, aufbau_tol, E)
            eps, C = diag(F)
            return RHFResult(_fix_phase(C), eps, E, n_occ, e_nuc, h, S, True, it, res, history)
        if res < best:
            best, since_best = res, 0
        else:
            since_best += 1
        if since_best >= diis_patience:
            diis.reset()
            best, since_best = res, 0
        if it >= diis_start:
            F = diis.update(F, X.T @ err @ X)
        eps, C = diag(F)
    raise SCFError(f"RHF did not converge in {max_iter} iterations "
                   f"(last energy {E:.10f}, residual {res:.3e})", E, res)


def rhf_monomer(ints: IntegralSet, which: str, conv_tol=1e-8, **kw) -> RHFResult:
    mol = ints.system.monomer_a if which == "A" else ints.system.monomer_b
    return rhf(ints.h(which), ints.S_intra(which), ints.eri_intra(which), mol.nelectron,
               mol.nuclear_repulsion(), conv_tol=conv_tol, **kw)


def supermolecular_interaction(ints: IntegralSet, conv_tol=1e-8) -> dict:
    """RHF interaction energy E_AB - E_A - E_B, monomers in their own bases
    and, for the counterpoise value, in the full dimer basis."""
    dimer = ints.system.dimer
    e_ab = rhf(ints.h_dimer, ints.S, ints.eri, dimer.nelectron,
               dimer.nuclear_repulsion(), conv_tol=conv_tol).energy
    out = {"E_AB": e_ab}
    for w, mol, V in (("A", ints.system.monomer_a, ints.VA), ("B", ints.system.monomer_b, ints.VB)):
        out["E_" + w] = rhf_monomer(ints, w, conv_tol).energy if mol.nelectron else 0.0
        out["E_" + w + "_cp"] = (rhf(ints.T + V, ints.S, ints.eri, mol.nelectron,
                                     mol.nuclear_repulsion(), conv_tol=conv_tol).energy
                                 if mol.nelectron else 0.0)
    out["E_int"] = e_ab - out["E_A"] - out["E_B"]
    out["E_int_cp"] = e_ab - out["E_A_cp"] - out["E_B_cp"]
    return out
