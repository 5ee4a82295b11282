"""Monomer density-matrix containers for first-order SAPT."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..active_space import MOSpace


class MonomerStateError(ValueError):
    pass


@dataclass(frozen=True)
class MonomerState:
    """Core + active partition with spin-summed active RDMs.

    ``C`` holds all MO coefficients in the dimer AO space (rows of the other
    monomer are zero). ``gamma``/``Gamma`` are active-space RDMs in the
    convention of :mod:`saptvqe.casci`. An empty active space is the RHF case.
    """

    which: str
    C: np.ndarray
    n_core: int
    gamma: np.ndarray
    Gamma: np.ndarray
    source: str = "RHF"

    def __post_init__(self):
        na = self.n_active
        if self.gamma.shape != (na, na) or self.Gamma.shape != (na,) * 4:
            raise MonomerStateError("RDM shapes do not match the active space")
        if self.n_core + na > self.C.shape[1]:
            raise MonomerStateError("core + active exceeds the number of MOs")

    @classmethod
    def from_space(cls, which, C_dimer, space: MOSpace, gamma=None, Gamma=None, source="RHF"):
        na = space.n_active
        if gamma is None:
            gamma = np.zeros((na, na))
            Gamma = np.zeros((na,) * 4)
        return cls(which, C_dimer, space.n_core, np.asarray(gamma), np.asarray(Gamma), source)

    @property
    def n_active(self):
        return self.gamma.shape[0]

    @property
    def n_mo(self):
        return self.C.shape[1]

    @property
    def C_core(self):
        return self.C[:, : self.n_core]

    @property
    def C_active(self):
        return self.C[:, self.n_core: self.n_core + self.n_active]

    @property
    def D_core(self):
        """Spin-summed core density in the AO basis, 2 C_c C_c^T."""
        return 2 * self.C_core @ self.C_core.T

    @property
    def D_active(self):
        Ca = self.C_active
        return Ca @ self.gamma @ Ca.T

    @property
    def D(self):
        return self.D_core + self.D_active

    @property
    def n_electrons(self) -> float:
        return 2 * self.n_core + float(np.trace(self.gamma))

    # full-MO tensors, used only by the naive reference contraction
    def gamma_full(self):
        g = np.zeros((self.n_mo, self.n_mo))
        g[: self.n_core, : self.n_core] = 2 * np.eye(self.n_core)
        a = slice(self.n_core, self.n_core + self.n_active)
        g[a, a] = self.gamma
        return g

    def Gamma_full(self):
        g = self.gamma_full()
        G = hf_like(g, g)
        a = slice(self.n_core, self.n_core + self.n_active)
        G[a, a, a, a] = self.Gamma
        return G


def hf_like(x, y):
    """Gamma[p,q,r,s] = x_pr y_qs - 1/2 x_ps y_qr (core-like factorised 2-RDM)."""
    return np.einsum("pr,qs->pqrs", x, y) - 0.5 * np.einsum("ps,qr->pqrs", x, y)


def check_rdms(gamma, Gamma, n_electrons, tol=1e-8):
    """Validate the invariants every physical spin-summed RDM pair satisfies."""
    n = gamma.shape[0]
    errs = []
    if abs(np.trace(gamma) - n_electrons) > tol:
        errs.append("tr(gamma) != N")
    if np.abs(gamma - gamma.T).max() > tol:
        errs.append("gamma not symmetric")
    if n and np.abs(np.einsum("pqrq->pr", Gamma) - (n_electrons - 1) * gamma).max() > tol:
        errs.append("partial trace of Gamma != (N-1) gamma")
    if abs(np.einsum("pqpq->", Gamma) - n_electrons * (n_electrons - 1)) > tol:
        errs.append("full trace of Gamma != N(N-1)")
    if np.abs(Gamma - Gamma.transpose(1, 0, 3, 2)).max() > tol:
        errs.append("Gamma not pair-symmetric")
    if errs:
        raise MonomerStateError("; ".join(errs))
