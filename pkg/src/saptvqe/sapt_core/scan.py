"""Geometry continuation for deep VQE circuits.

A k-layer circuit started at random angles at a compressed geometry tends to
stall in a local minimum. Optimising along a path of geometries, each run
warm-started from the previous angles, avoids this as long as the active
orbitals are followed continuously: canonical RHF orbitals swap order and flip
sign between neighbouring geometries, and either silently scrambles the
meaning of the inherited angles. Every step therefore aligns its active
orbitals to those of the step before.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..casci import casci
from ..integrals import ANGSTROM_TO_BOHR, DimerSystem, Molecule, build_integrals
from .exchange import SAPTError
from .pipeline import OrbitalReference, SAPTConfig, _solve_monomer, run_sapt


def stretch_monomer(system: DimerSystem, which: str, center: int, R: float,
                    atoms=None) -> DimerSystem:
    """Move *atoms* of one monomer along their bonds to *center* so each sits at R angstrom."""
    mol = system.monomer_a if which == "A" else system.monomer_b
    xyz = np.array(mol.coords)
    if atoms is None:
        atoms = [i for i in range(mol.natom) if i != center]
    for i in atoms:
        d = xyz[i] - xyz[center]
        n = np.linalg.norm(d)
        if n == 0.0:
            raise SAPTError(f"atom {i} coincides with the centre atom {center}")
        xyz[i] = xyz[center] + R * ANGSTROM_TO_BOHR * d / n
    new = Molecule(mol.symbols, xyz, mol.charge)
    return replace(system, **{"monomer_a" if which == "A" else "monomer_b": new})


@dataclass
class ContinuationResult:
    points: list          # per-geometry summaries
    params: np.ndarray    # optimised angles at the last geometry
    reference: OrbitalReference


def vqe_continuation(systems, which: str, spec, scf_tol=1e-8, reference=None,
                     with_casci=False) -> ContinuationResult:
    """Optimise the VQE monomer *which* along *systems*, warm-starting each step."""
    if spec.method != "vqe":
        raise SAPTError("continuation needs a VQE monomer")
    if not systems:
        raise SAPTError("empty geometry path")
    points, params = [], None
    for system in systems:
        ints = build_integrals(system)
        step = spec if params is None else replace(spec, init_params=tuple(params))
        run = _solve_monomer(ints, which, step, scf_tol, reference)
        params = run.vqe.params
        sl = ints.sl_a if which == "A" else ints.sl_b
        basis = ints.basis_a if which == "A" else ints.basis_b
        reference = OrbitalReference(run.state.C_active[sl], basis)
        point = {"geometry_hash": system.geometry_hash(), **run.meta["vqe"]}
        if with_casci:
            point["casci_energy"] = casci(run.ham).energy
        points.append(point)
    return ContinuationResult(points, np.array(params), reference)


def continued_sapt(path, target: DimerSystem, config: SAPTConfig, which="B", ints=None):
    """SAPT at *target* with the VQE monomer warm-started by continuation along *path*."""
    spec = config.monomer_a if which == "A" else config.monomer_b
    cont = vqe_continuation(path, which, spec, config.scf_conv_tol)
    spec = replace(spec, init_params=tuple(cont.params))
    config = replace(config, **{"monomer_a" if which == "A" else "monomer_b": spec})
    report = run_sapt(target, config, ints, orbital_references={which: cont.reference})
    report.data["continuation"] = {"monomer": which, "points": cont.points}
    return report
