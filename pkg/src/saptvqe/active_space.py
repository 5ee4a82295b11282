"""Frozen-core active-space Hamiltonians built on RHF orbitals."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .scf import RHFResult, build_JK

MAX_ACTIVE = 12


class ActiveSpaceError(ValueError):
    pass


@dataclass(frozen=True)
class MOSpace:
    """Partition of the RHF MOs of one monomer into core / active / virtual."""

    C: np.ndarray
    n_core: int
    n_active: int
    n_active_electrons: int

    @property
    def core(self):
        return slice(0, self.n_core)

    @property
    def active(self):
        return slice(self.n_core, self.n_core + self.n_active)

    @property
    def C_core(self):
        return self.C[:, self.core]

    @property
    def C_active(self):
        return self.C[:, self.active]

    @property
    def n_mo(self):
        return self.C.shape[1]


def select_window(scf: RHFResult, n_below: int, n_above: int) -> MOSpace:
    """Active window HOMO-n_below ... LUMO+n_above (both inclusive)."""
    homo = scf.n_occ - 1
    lo, hi = homo - n_below, homo + 1 + n_above
    if lo < 0:
        raise ActiveSpaceError(f"HOMO-{n_below} lies below the lowest MO")
    if hi >= scf.nmo:
        raise ActiveSpaceError(f"LUMO+{n_above} exceeds the {scf.nmo} available MOs")
    n_act = hi - lo + 1
    if n_act > MAX_ACTIVE:
        raise ActiveSpaceError(f"{n_act} active orbitals exceeds the limit of {MAX_ACTIVE}")
    return MOSpace(scf.C, lo, n_act, 2 * (n_below + 1))


def rhf_space(scf: RHFResult) -> MOSpace:
    """All occupied orbitals frozen, empty active space (the RHF-only path)."""
    return MOSpace(scf.C, scf.n_occ, 0, 0)


def align_active(space: MOSpace, C_ref: np.ndarray, S_cross: np.ndarray) -> MOSpace:
    """Permute and re-sign the active orbitals of *space* to follow *C_ref*.

    *C_ref* holds reference active orbitals (typically from a nearby geometry)
    and ``S_cross = <ref AO | new AO>``. Columns are matched by maximum |overlap|
    and flipped so the matched overlaps are positive. The active space as a set
    is untouched, so CASCI energies and density matrices in the AO basis are
    invariant; only a warm-started circuit sees the difference.
    """
    Ca = space.C_active
    if C_ref.shape[1] != Ca.shape[1]:
        raise ActiveSpaceError(f"reference has {C_ref.shape[1]} active orbitals, "
                               f"space has {Ca.shape[1]}")
    O = C_ref.T @ S_cross @ Ca
    row, col = linear_sum_assignment(-np.abs(O))
    sign = np.where(O[row, col] < 0, -1.0, 1.0)
    C = space.C.copy()
    C[:, space.active] = Ca[:, col] * sign
    return MOSpace(C, space.n_core, space.n_active, space.n_active_electrons)


@dataclass(frozen=True)
class ActiveHamiltonian:
    h: np.ndarray        # effective one-electron integrals (N_a, N_a)
    v: np.ndarray        # (pq|rs) over active MOs
    e_frozen: float      # nuclear repulsion + frozen-core energy
    n_alpha: int
    n_beta: int

    @property
    def norb(self):
        return self.h.shape[0]


def active_hamiltonian(h_ao, eri_ao, e_nuc, space: MOSpace) -> ActiveHamiltonian:
    Cc, Ca = space.C_core, space.C_active
    gc = Cc @ Cc.T
    J, K = build_JK(gc, eri_ao)
    h_fc = h_ao + 2 * J - K
    e_frozen = e_nuc + float(np.sum(gc * (h_ao + h_fc)))
    h_eff = Ca.T @ h_fc @ Ca
    v = np.einsum("mnls,mp,nq,lr,st->pqrt", eri_ao, Ca, Ca, Ca, Ca, optimize=True)
    na = space.n_active_electrons // 2
    return ActiveHamiltonian(h_eff, v, e_frozen, na, na)


def monomer_active_hamiltonian(ints, which, scf, space) -> ActiveHamiltonian:
    mol = ints.system.monomer_a if which == "A" else ints.system.monomer_b
    return active_hamiltonian(ints.h(which), ints.eri_intra(which), mol.nuclear_repulsion(), space)


def write_fcidump(path, ham: ActiveHamiltonian, tol=1e-14):
    """Standard FCIDUMP export (8-fold unique two-electron integrals)."""
    n = ham.norb
    lines = [f" &FCI NORB={n},NELEC={ham.n_alpha + ham.n_beta},MS2={ham.n_alpha - ham.n_beta},",
             "  ORBSYM=" + "1," * n, "  ISYM=1,", " &END"]
    for p in range(n):
        for q in range(p + 1):
            for r in range(p + 1):
                for s in range(r + 1):
                    if p * (p + 1) // 2 + q < r * (r + 1) // 2 + s:
                        continue
                    x = ham.v[p, q, r, s]
                    if abs(x) > tol:
                        lines.append(f"{x:23.16e} {p + 1:4d} {q + 1:4d} {r + 1:4d} {s + 1:4d}")
    for p in range(n):
        for q in range(p + 1):
            if abs(ham.h[p, q]) > tol:
                lines.append(f"{ham.h[p, q]:23.16e} {p + 1:4d} {q + 1:4d}    0    0")
    lines.append(f"{ham.e_frozen:23.16e}    0    0    0    0")
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")
