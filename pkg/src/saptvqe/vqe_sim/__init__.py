"""Exact statevector simulation of the k-layer cluster-Jastrow VQE."""
from .ansatz import KmuCJAnsatz, Op, VQEProblem, px_layout
from .fabric import fabric_angles, fabric_layout, fabric_unitary, givens_matrix, n_fabric
from .measurement import ElstMeasurementPlan, electrostatic_plan, elst_measurement_plan
from .optimize import VQEError, VQEResult, initial_params, read_checkpoint, run_vqe
from .statevector import (apply_E, apply_givens, apply_local, apply_px, ci_to_statevector,
                          givens_local, hf_state, number_expectation, px_local,
                          sector_hamiltonian, sector_indices, statevector_rdms,
                          z_expectations)

__all__ = [
    "ElstMeasurementPlan", "KmuCJAnsatz", "Op", "VQEError", "VQEProblem", "VQEResult",
    "apply_E", "apply_givens", "apply_local", "apply_px", "ci_to_statevector",
    "electrostatic_plan", "elst_measurement_plan", "fabric_angles", "fabric_layout",
    "fabric_unitary", "givens_local", "givens_matrix", "hf_state", "initial_params",
    "n_fabric", "number_expectation", "px_layout", "px_local", "read_checkpoint",
    "run_vqe", "sector_hamiltonian", "sector_indices", "statevector_rdms",
    "z_expectations",
]
