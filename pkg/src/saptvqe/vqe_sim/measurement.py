"""Electrostatics of a quantum monomer from one group of Z measurements.

The electrostatic potential W of the partner monomer (its nuclei plus the
Coulomb field of its density) is one-body, so its active-space part can be
diagonalised classically, W_tt' = sum_s U_ts w_s U_t's. Rotating the state
with the orbital fabric for U^T turns every term into a number operator:

    sum_tt' gamma_tt' W_tt' = sum_s w_s - 1/2 sum_s w_s <Z_s_alpha + Z_s_beta>.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fabric import fabric_angles, fabric_layout
from .statevector import apply_givens, z_expectations


@dataclass(frozen=True)
class ElstMeasurementPlan:
    W_ao: np.ndarray          # potential in the dimer AO basis
    W_active: np.ndarray      # C_act^T W C_act
    U: np.ndarray             # eigenvectors, det +1, columns ordered like the active MOs
    w: np.ndarray             # eigenvalues
    angles: np.ndarray        # fabric angles realising U^T
    core_offset: float        # <gamma_core, W>, evaluated classically

    @property
    def norb(self):
        return len(self.w)

    def rotate(self, psi):
        """Apply the basis-change circuit V(U) to a statevector."""
        for (_, p), th in zip(fabric_layout(self.norb), self.angles):
            psi = apply_givens(psi, p, th, self.norb)
        return psi

    def active_energy(self, psi) -> float:
        z = z_expectations(self.rotate(psi), self.norb)
        zs = z[0::2] + z[1::2]
        return float(np.sum(self.w) - 0.5 * np.dot(zs, self.w))


def _align(U):
    """Order and sign eigenvectors so U is as close to the identity as possible."""
    n = U.shape[0]
    order, free = [], list(range(n))
    for t in range(n):
        j = max(free, key=lambda c: abs(U[t, c]))
        order.append(j)
        free.remove(j)
    U = U[:, order]
    U = U * np.where(np.diag(U) < 0, -1.0, 1.0)
    if np.linalg.det(U) < 0:
        U[:, -1] *= -1
    return U, order


def electrostatic_plan(W_ao, C_core, C_active) -> ElstMeasurementPlan:
    W_act = C_active.T @ W_ao @ C_active
    w, U = np.linalg.eigh(W_act)
    U, order = _align(U)
    w = w[order]
    angles = fabric_angles(U.T)
    core = float(np.vdot(2 * C_core @ C_core.T, W_ao))
    return ElstMeasurementPlan(W_ao, W_act, U, w, angles, core)


def elst_measurement_plan(psi, W_ao, C_core, C_active):
    """(plan, active-space electrostatic energy measured on *psi*)."""
    plan = electrostatic_plan(W_ao, C_core, C_active)
    return plan, plan.active_energy(psi)


__all__ = ["ElstMeasurementPlan", "electrostatic_plan", "elst_measurement_plan"]
