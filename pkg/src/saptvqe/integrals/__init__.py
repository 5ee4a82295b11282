"""Gaussian integrals over a monomer-centred dimer basis.

The dimer AO space lists the functions of monomer A first, then those of B.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import BasisSet, BasisError, parse_gaussian94
from .boys import boys
from .geometry import (ANGSTROM_TO_BOHR, DimerSystem, GeometryError, Molecule,
                       nuclear_repulsion, parse_dimer_xyz)
from .one_electron import kinetic, nuclear_attraction, overlap
from .two_electron import eri_cross, eri_tensor

__all__ = [
    "ANGSTROM_TO_BOHR", "BasisError", "BasisSet", "DimerSystem", "GeometryError",
    "IntegralSet", "Molecule", "boys", "build_integrals", "generalized_eri",
    "kinetic", "kinetic_matrix", "nuclear_attraction", "overlap", "overlap_matrix",
    "parse_dimer_xyz", "parse_gaussian94", "two_electron_integrals",
    "nuclear_repulsion", "one_electron_hamiltonian",
]


def _frozen(a):
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


def overlap_matrix(bx: BasisSet, by: BasisSet) -> np.ndarray:
    return overlap(bx.shells, by.shells)


def kinetic_matrix(bx: BasisSet, by: BasisSet = None) -> np.ndarray:
    return kinetic(bx.shells, (by or bx).shells)


def one_electron_hamiltonian(basis: BasisSet, mol: Molecule) -> np.ndarray:
    return kinetic(basis.shells) + nuclear_attraction(basis.shells, basis.shells,
                                                      mol.charges, mol.coords)


def two_electron_integrals(bx: BasisSet, by: BasisSet = None) -> np.ndarray:
    """(xx'|xx') when *by* is omitted or identical, else the cross tensor (xx'|yy')."""
    if by is None or by is bx:
        return eri_tensor(bx.shells)
    return eri_cross(bx.shells, by.shells)


@dataclass(frozen=True)
class IntegralSet:
    """Dimer-basis AO integrals; monomer blocks are views into them."""

    system: DimerSystem
    basis_a: BasisSet
    basis_b: BasisSet
    S: np.ndarray      # dimer overlap
    T: np.ndarray      # kinetic energy
    VA: np.ndarray     # attraction to the nuclei of A, full dimer AO space
    VB: np.ndarray     # attraction to the nuclei of B
    eri: np.ndarray    # (mn|ls) over the dimer AO space

    @property
    def nA(self) -> int:
        return self.basis_a.nbf

    @property
    def nB(self) -> int:
        return self.basis_b.nbf

    @property
    def sl_a(self):
        return slice(0, self.nA)

    @property
    def sl_b(self):
        return slice(self.nA, self.nA + self.nB)

    def _sl(self, which):
        return {"A": self.sl_a, "B": self.sl_b}[which]

    # named sub-blocks
    def S_intra(self, which):
        s = self._sl(which)
        return self.S[s, s]

    @property
    def S_cross(self):
        return self.S[self.sl_a, self.sl_b]

    def h(self, which):
        """Monomer one-electron Hamiltonian (own nuclei only)."""
        s = self._sl(which)
        V = self.VA if which == "A" else self.VB
        return self.T[s, s] + V[s, s]

    def eri_intra(self, which):
        s = self._sl(which)
        return self.eri[s, s, s, s]

    @property
    def eri_cross(self):
        a, b = self.sl_a, self.sl_b
        return self.eri[a, a, b, b]

    @property
    def V_A_on_B(self):
        return self.VA[self.sl_b, self.sl_b]

    @property
    def V_B_on_A(self):
        return self.VB[self.sl_a, self.sl_a]

    @property
    def V_AB(self) -> float:
        a, b = self.system.monomer_a, self.system.monomer_b
        return nuclear_repulsion(a.charges, a.coords, b.charges, b.coords)

    @property
    def N_A(self) -> int:
        return self.system.monomer_a.nelectron

    @property
    def N_B(self) -> int:
        return self.system.monomer_b.nelectron

    @property
    def h_dimer(self):
        return self.T + self.VA + self.VB

    def pad(self, C, which):
        """Embed monomer-AO coefficients into the dimer AO space."""
        C = np.asarray(C)
        out = np.zeros((self.nA + self.nB,) + C.shape[1:])
        out[self._sl(which)] = C
        return out


def build_integrals(system: DimerSystem) -> IntegralSet:
    ma, mb = system.monomer_a, system.monomer_b
    ba = BasisSet.build(ma, system.basis_a)
    bb = BasisSet.build(mb, system.basis_b)
    shells = (ba + bb).shells
    S = overlap(shells)
    T = kinetic(shells)
    VA = nuclear_attraction(shells, shells, ma.charges, ma.coords)
    VB = nuclear_attraction(shells, shells, mb.charges, mb.coords)
    eri = eri_tensor(shells)
    return IntegralSet(system, ba, bb, _frozen(S), _frozen(T), _frozen(VA),
                       _frozen(VB), _frozen(eri))


def generalized_eri(Cw, Cx, Cz, Cy, ints: IntegralSet, N_A=None, N_B=None) -> np.ndarray:
    """Intermolecular operator in an arbitrary orbital basis, electron 1 on A.

    v~(wx|zy) = (wx|zy) + (wx|V_B) S_zy / N_B + S_wx (V_A|zy) / N_A
               + V_AB S_wx S_zy / (N_A N_B)

    Coefficient matrices are given in the dimer AO space (see ``IntegralSet.pad``).
    """
    N_A = ints.N_A if N_A is None else N_A
    N_B = ints.N_B if N_B is None else N_B
    if N_A <= 0 or N_B <= 0:
        raise ValueError("generalised interaction needs electrons on both monomers")
    v = np.einsum("mnls,mw,nx,lz,sy->wxzy", ints.eri, Cw, Cx, Cz, Cy, optimize=True)
    S1 = Cw.T @ ints.S @ Cx
    S2 = Cz.T @ ints.S @ Cy
    VB1 = Cw.T @ ints.VB @ Cx
    VA2 = Cz.T @ ints.VA @ Cy
    v += np.einsum("wx,zy->wxzy", VB1 / N_B + ints.V_AB * S1 / (N_A * N_B), S2)
    v += np.einsum("wx,zy->wxzy", S1, VA2 / N_A)
    return v
