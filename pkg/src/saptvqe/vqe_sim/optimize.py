"""Classical optimisation loop for the statevector VQE."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .ansatz import KmuCJAnsatz, VQEProblem
from .statevector import statevector_rdms


class VQEError(RuntimeError):
    def __init__(self, msg, params=None):
        super().__init__(msg)
        self.params = params


@dataclass
class VQEResult:
    params: np.ndarray
    energy: float
    gamma: np.ndarray
    Gamma: np.ndarray
    state: np.ndarray
    k: int
    gtol: float
    n_iter: int
    n_eval: int
    converged: bool
    message: str
    grad_norm: float
    trace: list = field(default_factory=list)
    ansatz: KmuCJAnsatz | None = None

    def write_trace(self, path):
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["iteration", "energy", "grad_inf_norm"])
            for row in self.trace:
                w.writerow([row[0], f"{row[1]:.12f}", f"{row[2]:.6e}"])

    def write_checkpoint(self, path):
        with open(path, "w") as f:
            f.write("# layer gate angle\n")
            for (layer, gid), th in zip(self.ansatz.gate_labels(), self.params):
                f.write(f"{layer} {gid} {th:.17e}\n")


def read_checkpoint(path) -> np.ndarray:
    vals = []
    with open(path) as f:
        for line in f:
            if line.strip() and not line.startswith("#"):
                vals.append(float(line.split()[2]))
    return np.array(vals)


def initial_params(nparams, init="zeros", seed=None):
    if isinstance(init, np.ndarray):
        return init.astype(float).copy()
    if init == "zeros":
        return np.zeros(nparams)
    if init == "random":
        return np.random.default_rng(seed).uniform(-0.1, 0.1, nparams)
    raise ValueError(f"unknown initialisation {init!r}")


def run_vqe(ham, k=1, gtol=1e-6, maxiter=1000, init="zeros", seed=None,
            gradient="adjoint", px_columns=None, fd_step=1e-5, tied=True) -> VQEResult:
    """Minimise <psi(theta)|H|psi(theta)> with L-BFGS-B.

    gradient: "adjoint" (reverse-mode analytic), "parameter_shift" or
    "finite_difference" (central, step *fd_step*). *tied* selects whether each
    layer closes with the inverse of its opening fabric (see KmuCJAnsatz).
    """
    ansatz = KmuCJAnsatz(ham.norb, ham.n_alpha, ham.n_beta, k, px_columns, tied)
    prob = VQEProblem(ham, ansatz)
    x0 = initial_params(ansatz.nparams, init, seed)
    if len(x0) != ansatz.nparams:
        raise ValueError(f"expected {ansatz.nparams} initial parameters, got {len(x0)}")

    def fun(x):
        if gradient == "adjoint":
            e, g = prob.energy_and_gradient(x)
        elif gradient == "parameter_shift":
            e, g = prob.energy(x), prob.gradient_param_shift(x)
        elif gradient == "finite_difference":
            e, g = prob.energy(x), prob.gradient_fd(x, fd_step)
        else:
            raise ValueError(f"unknown gradient method {gradient!r}")
        if not np.isfinite(e) or not np.all(np.isfinite(g)):
            raise VQEError("non-finite energy or gradient during optimisation", x.copy())
        last["e"], last["g"] = e, g
        return e, g

    last = {}
    trace = []
    e0, g0 = fun(x0)
    trace.append((0, e0, float(np.abs(g0).max())))

    def callback(xk):
        trace.append((len(trace), last["e"], float(np.abs(last["g"]).max())))

    res = minimize(fun, x0, jac=True, method="L-BFGS-B", callback=callback,
                   options={"gtol": gtol, "maxiter": maxiter, "ftol": 1e-16,
                            "maxcor": 20, "maxls": 50})
    psi = ansatz.state(res.x)
    gamma, Gamma = statevector_rdms(psi, ham.norb)
    e, g = prob.energy_and_gradient(res.x)
    gn = float(np.abs(g).max())
    return VQEResult(res.x, e, gamma, Gamma, psi, k, gtol, int(res.nit), int(res.nfev),
                     gn <= gtol, str(res.message), gn, trace, ansatz)
