"""End-to-end SAPT(RHF | CASCI | VQE) driver producing a JSON-ready report."""
from __future__ import annotations

import hashlib
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone

import numpy as np

from ..active_space import align_active, monomer_active_hamiltonian, rhf_space, select_window
from ..casci import CISpace, casci
from ..integrals import BasisSet, DimerSystem, IntegralSet, build_integrals, overlap_matrix
from ..scf import build_JK, rhf_monomer, supermolecular_interaction
from ..vqe_sim import ci_to_statevector, elst_measurement_plan, run_vqe
from .exchange import SAPTError, e_exch1
from .monomer import MonomerState
from .naive import naive_exch1_oracle

METHODS = ("rhf", "casci", "vqe")


@dataclass(frozen=True)
class MonomerSpec:
    method: str = "rhf"
    n_below: int = 0
    n_above: int = 0
    k: int = 1
    gtol: float = 1e-6
    max_iter: int = 1000
    init: str = "zeros"
    seed: int | None = None
    gradient: str = "adjoint"
    init_params: tuple | None = None   # explicit starting angles (e.g. a checkpoint)
    tied_fabrics: bool = True          # closing fabric = inverse of the opening one

    def __post_init__(self):
        if self.method not in METHODS:
            raise SAPTError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if self.n_below < 0 or self.n_above < 0:
            raise SAPTError("active window sizes must be non-negative")
        if self.k < 1:
            raise SAPTError("number of ansatz layers k must be >= 1")
        if not 0 < self.gtol < 1:
            raise SAPTError("gtol must lie in (0, 1)")
        if self.max_iter < 1:
            raise SAPTError("max_iter must be positive")
        if self.init not in ("zeros", "random"):
            raise SAPTError("init must be 'zeros' or 'random'")

    @property
    def source(self):
        tag = f"VQE(k={self.k})" if self.tied_fabrics else f"VQE(k={self.k},untied)"
        return {"rhf": "RHF", "casci": "CASCI"}.get(self.method, tag)


@dataclass(frozen=True)
class SAPTConfig:
    monomer_a: MonomerSpec = field(default_factory=MonomerSpec)
    monomer_b: MonomerSpec = field(default_factory=MonomerSpec)
    run_supermolecular: bool = False
    run_naive_oracle: bool = False
    run_measurement_plan: bool = False
    scf_conv_tol: float = 1e-8


@dataclass
class SAPTReport:
    """JSON-ready results plus the in-memory monomer solutions."""

    data: dict
    runs: dict

    def __getitem__(self, key):
        return self.data[key]

    def deterministic(self):
        """Report without the wall-clock fields (timestamp, timings)."""
        return {k: v for k, v in self.data.items() if k not in ("timestamp", "timings")}


@dataclass(frozen=True)
class OrbitalReference:
    """Active orbitals (monomer AO basis) that a later run should follow."""

    C_active: np.ndarray
    basis: BasisSet

    def align(self, space, basis: BasisSet):
        return align_active(space, self.C_active, overlap_matrix(self.basis, basis))


@dataclass
class MonomerRun:
    state: MonomerState
    meta: dict
    psi: np.ndarray | None = None
    vqe: object = None
    ham: object = None


def _solve_monomer(ints: IntegralSet, which: str, spec: MonomerSpec, scf_tol,
                   reference: OrbitalReference | None = None) -> MonomerRun:
    scf = rhf_monomer(ints, which, conv_tol=scf_tol)
    C = ints.pad(scf.C, which)
    meta = {"method": spec.method, "source": spec.source,
            "scf": {"energy": scf.energy, "converged": bool(scf.converged),
                    "iterations": int(scf.niter), "residual": float(scf.residual)}}
    if spec.method == "rhf":
        return MonomerRun(MonomerState.from_space(which, C, rhf_space(scf)), meta)
    space = select_window(scf, spec.n_below, spec.n_above)
    if reference is not None:
        space = reference.align(space, ints.basis_a if which == "A" else ints.basis_b)
        C = ints.pad(space.C, which)
    ham = monomer_active_hamiltonian(ints, which, scf, space)
    meta["active_space"] = {"n_core": space.n_core, "n_active": space.n_active,
                            "n_active_electrons": space.n_active_electrons}
    if spec.method == "casci":
        res = casci(ham)
        meta["casci"] = {"energy": res.energy, "dim": res.dim, "method": res.method,
                         "s2": res.s2}
        ci = CISpace(ham.norb, ham.n_alpha, ham.n_beta)
        psi = ci_to_statevector(res.ci, ci.a.occ, ci.b.occ, ham.norb)
        st = MonomerState.from_space(which, C, space, res.gamma, res.Gamma, spec.source)
        return MonomerRun(st, meta, psi, ham=ham)
    init = spec.init if spec.init_params is None else np.array(spec.init_params, float)
    res = run_vqe(ham, spec.k, gtol=spec.gtol, maxiter=spec.max_iter, init=init,
                  seed=spec.seed, gradient=spec.gradient, tied=spec.tied_fabrics)
    meta["vqe"] = {"energy": res.energy, "k": res.k, "gtol": res.gtol,
                   "iterations": res.n_iter, "evaluations": res.n_eval,
                   "converged": bool(res.converged), "grad_inf_norm": res.grad_norm,
                   "message": res.message, "n_params": len(res.params),
                   "tied_fabrics": spec.tied_fabrics,
                   "init": spec.init if spec.init_params is None else "explicit",
                   "seed": spec.seed}
    st = MonomerState.from_space(which, C, space, res.gamma, res.Gamma, spec.source)
    return MonomerRun(st, meta, res.state, res, ham)


def measured_e_pol1(run_q: MonomerRun, other: MonomerState, ints: IntegralSet):
    """E_pol1 with the quantum monomer's active part taken from Z measurements."""
    q = run_q.state
    V_q = ints.VA if q.which == "A" else ints.VB
    V_o = ints.VB if q.which == "A" else ints.VA
    J, _ = build_JK(other.D, ints.eri)
    W = V_o + J
    nuc = ints.V_AB + float(np.vdot(V_q, other.D))
    plan, active = elst_measurement_plan(run_q.psi, W, q.C_core, q.C_active)
    direct = float(np.vdot(q.gamma, plan.W_active))
    return {"E_pol1": nuc + plan.core_offset + active, "nuclear_offset": nuc,
            "core_offset": plan.core_offset, "active_measured": active,
            "active_direct": direct, "w": plan.w.tolist()}


def basis_label(basis: str) -> str:
    """Built-in basis name, or a short content hash for inline basis text."""
    if "****" in basis:
        return "custom-" + hashlib.sha256(basis.encode()).hexdigest()[:12]
    return basis


@contextmanager
def _stage(name, timings):
    """Time a pipeline stage and tag any escaping exception with its name."""
    t = time.perf_counter()
    try:
        yield
    except Exception as e:
        if not hasattr(e, "sapt_stage"):
            e.sapt_stage = name
        raise
    timings[name] = time.perf_counter() - t


def _spec_dict(spec):
    d = asdict(spec)
    if d["init_params"] is not None:
        d["init_params"] = list(d["init_params"])
    return d


def run_sapt(system: DimerSystem, config: SAPTConfig = SAPTConfig(), ints=None,
             orbital_references=None) -> SAPTReport:
    """Both monomers, then E_pol1 and E_exch1 (plus the optional checks in *config*).

    *orbital_references* maps "A"/"B" to an OrbitalReference; that monomer's
    active orbitals are then permuted and re-signed to follow it (needed when
    warm-starting a circuit optimised at a neighbouring geometry).
    """
    refs = orbital_references or {}
    timings = {}
    if ints is None:
        with _stage("integrals", timings):
            ints = build_integrals(system)
    runs = {}
    for which, spec in (("A", config.monomer_a), ("B", config.monomer_b)):
        with _stage(f"monomer_{which}", timings):
            runs[which] = _solve_monomer(ints, which, spec, config.scf_conv_tol,
                                         refs.get(which))
    with _stage("sapt", timings):
        ex = e_exch1(runs["A"].state, runs["B"].state, ints)

    report = {
        "geometry_hash": system.geometry_hash(),
        "basis": {"A": basis_label(system.basis_a), "B": basis_label(system.basis_b)},
        "n_basis": {"A": ints.nA, "B": ints.nB},
        "monomers": {w: runs[w].meta for w in "AB"},
        "source": {w: runs[w].state.source for w in "AB"},
        "E_pol1": ex.E_pol1,
        "E_exch1": ex.E_exch1,
        "E_total1": ex.E_pol1 + ex.E_exch1,
        "terms": dict(ex.T),
        "blocks": {k: dict(v) for k, v in ex.blocks.items()},
    }
    if config.run_naive_oracle:
        with _stage("naive_oracle", timings):
            nv = naive_exch1_oracle(runs["A"].state, runs["B"].state, ints)
        report["naive_oracle"] = {"E_exch1": nv, "abs_diff": abs(nv - ex.E_exch1)}
    if config.run_measurement_plan:
        quantum = [w for w in "AB" if runs[w].psi is not None]
        if not quantum:
            e = SAPTError("measurement plan needs a CASCI or VQE monomer")
            e.sapt_stage = "measurement_plan"
            raise e
        q = quantum[0]
        o = "B" if q == "A" else "A"
        with _stage("measurement_plan", timings):
            m = measured_e_pol1(runs[q], runs[o].state, ints)
        m["quantum_monomer"] = q
        m["abs_diff"] = abs(m["E_pol1"] - ex.E_pol1)
        report["measurement_plan"] = m
    if config.run_supermolecular:
        with _stage("supermolecular", timings):
            report["supermolecular"] = supermolecular_interaction(ints, config.scf_conv_tol)
    report["config"] = {"monomer_a": _spec_dict(config.monomer_a),
                        "monomer_b": _spec_dict(config.monomer_b),
                        "run_supermolecular": config.run_supermolecular,
                        "run_naive_oracle": config.run_naive_oracle,
                        "run_measurement_plan": config.run_measurement_plan}
    report["timings"] = timings
    report["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return SAPTReport(report, runs)
