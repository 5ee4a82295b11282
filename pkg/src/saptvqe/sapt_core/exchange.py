"""First-order electrostatics and S^2 exchange from monomer RDMs.

Everything is written in the dimer AO space with the generalised interaction

    v~(mn|ls) = (mn|ls) + V^B_mn S_ls / N_B + S_mn V^A_ls / N_A + V_AB S_mn S_ls / (N_A N_B)

where electron 1 belongs to A. Three contractions of v~ with a (not
necessarily symmetric) AO matrix D cover every term:

    Jt(D)_mn  = sum_ls D_ls v~(mn|ls)       (trace over electron 2)
    Jt1(D)_ls = sum_mn D_mn v~(mn|ls)       (trace over electron 1)
    Kt(D)_ab  = sum_ls D_ls v~(as|lb)       (exchange-type)

Each 2-RDM is split into four pieces. With core/active AO densities c, a and
hf(x, y)[p,q,r,s] = x_pr y_qs - 1/2 x_ps y_qr, the blocks are cc = hf(c, c),
ac = hf(a, c), ca = hf(c, a) and aa = the correlated active 2-RDM. The first
three are evaluated with Jt/Jt1/Kt builds; aa blocks go through half
transformed overlaps E = D S C_act and generalised ERIs over active indices
only, so no intermediate larger than O(N_act^4) is formed.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..integrals import IntegralSet, generalized_eri
from .monomer import MonomerState

BLOCKS = ("cc", "ac", "ca", "aa")


class SAPTError(ValueError):
    pass


# ------------------------------------------------------------- v~ builds

class VTilde:
    """Jt/Jt1/Kt builds and active-index slices of the generalised interaction."""

    def __init__(self, ints: IntegralSet):
        if ints.N_A <= 0 or ints.N_B <= 0:
            raise SAPTError("both monomers need electrons")
        self.ints = ints
        self.eri, self.S, self.VA, self.VB = ints.eri, ints.S, ints.VA, ints.VB
        self.N_A, self.N_B, self.V_AB = ints.N_A, ints.N_B, ints.V_AB

    def mo(self, Cw, Cx, Cz, Cy):
        return generalized_eri(Cw, Cx, Cz, Cy, self.ints)

    @property
    def c(self):
        return self.V_AB / (self.N_A * self.N_B)

    def J(self, D):
        S = self.S
        out = np.einsum("mnls,ls->mn", self.eri, D, optimize=True)
        out += self.VB * (np.vdot(S, D) / self.N_B)
        out += S * (np.vdot(self.VA, D) / self.N_A + self.c * np.vdot(S, D))
        return out

    def J1(self, D):
        S = self.S
        out = np.einsum("mnls,mn->ls", self.eri, D, optimize=True)
        out += S * (np.vdot(self.VB, D) / self.N_B + self.c * np.vdot(S, D))
        out += self.VA * (np.vdot(S, D) / self.N_A)
        return out

    def K(self, D):
        S = self.S
        Dt = D.T
        out = np.einsum("aslb,ls->ab", self.eri, D, optimize=True)
        out += self.VB @ Dt @ S / self.N_B
        out += S @ Dt @ self.VA / self.N_A
        out += self.c * (S @ Dt @ S)
        return out


def _split(M: MonomerState):
    """AO densities (x1, x2) per 2-RDM block; None marks the aa block."""
    c, a = M.D_core, M.D_active
    return {"cc": (c, c), "ac": (a, c), "ca": (c, a), "aa": None}


def _mo(C, M):
    return C.T @ M @ C


# ------------------------------------------------------------- energies

def e_pol1(A: MonomerState, B: MonomerState, ints: IntegralSet) -> float:
    """First-order electrostatic energy <gamma_A, Jt(gamma_B)>."""
    _check_counts(A, B, ints)
    vt = VTilde(ints)
    return float(np.vdot(A.D, vt.J(B.D)))


def _check_counts(A, B, ints, tol=1e-6):
    for M, n in ((A, ints.N_A), (B, ints.N_B)):
        if abs(M.n_electrons - n) > tol:
            raise SAPTError(f"monomer {M.which}: RDM holds {M.n_electrons:.8f} electrons, "
                            f"molecule has {n}")


def _t2(vt, x, B, blk):
    """sum gamma_A[p,p'] Gamma_B[q,q',q'',q'''] S[p',q'] v~(p q'''|q q'')."""
    S = vt.S
    if blk != "aa":
        z1, z2 = _split(B)[blk]
        E = x @ S @ z2
        return float(np.vdot(E, vt.J(z1)) - 0.5 * np.vdot(E, vt.K(z1)))
    if B.n_active == 0:
        return 0.0
    Cb = B.C_active
    V = vt.mo(x @ S @ Cb, Cb, Cb, Cb)
    return float(np.einsum("abcd,bdac->", B.Gamma, V, optimize=True))


def _t3(vt, z, A, blk):
    """sum gamma_B[q,q'] Gamma_A[p,p',p'',p'''] S[p',q'] v~(p p''|q p''')."""
    S = vt.S
    if blk != "aa":
        x1, x2 = _split(A)[blk]
        E = z @ S @ x2
        return float(np.vdot(E, vt.J1(x1)) - 0.5 * np.vdot(E.T, vt.K(x1.T)))
    if A.n_active == 0:
        return 0.0
    Ca = A.C_active
    V = vt.mo(Ca, Ca, z @ S @ Ca, Ca)
    return float(np.einsum("abcd,acbd->", A.Gamma, V, optimize=True))


def _t4(vt, A, B, ba, bb):
    """sum Gamma_A[p,p',p'',p'''] Gamma_B[q,q',q'',q'''] S[p',q'''] S[p''',q'] v~(p p''|q q'')."""
    S = vt.S
    if ba != "aa" and bb != "aa":
        x1, x2 = _split(A)[ba]
        z1, z2 = _split(B)[bb]
        t = np.vdot(x1, vt.J(z1)) * np.trace(x2 @ S @ z2 @ S)
        t -= 0.5 * np.vdot(x1, vt.J(z1 @ S @ x2 @ S @ z2))
        t -= 0.5 * np.vdot(x1 @ S @ z2 @ S @ x2, vt.J(z1))
        t += 0.25 * np.vdot(x1 @ S @ z2, vt.K(z1 @ S @ x2))
        return float(t)
    if ba == "aa" and A.n_active == 0 or bb == "aa" and B.n_active == 0:
        return 0.0
    if ba == "aa" and bb != "aa":
        Ca = A.C_active
        z1, z2 = _split(B)[bb]
        t = np.einsum("abcd,ac,bd->", A.Gamma, _mo(Ca, vt.J(z1)), _mo(Ca, S @ z2 @ S),
                      optimize=True)
        V = vt.mo(Ca, Ca, z1 @ S @ Ca, z2 @ S @ Ca)
        return float(t - 0.5 * np.einsum("abcd,acbd->", A.Gamma, V, optimize=True))
    if bb == "aa" and ba != "aa":
        Cb = B.C_active
        x1, x2 = _split(A)[ba]
        t = np.einsum("abcd,ac,bd->", B.Gamma, _mo(Cb, vt.J1(x1)), _mo(Cb, S @ x2 @ S),
                      optimize=True)
        V = vt.mo(x1 @ S @ Cb, x2 @ S @ Cb, Cb, Cb)
        return float(t - 0.5 * np.einsum("abcd,bdac->", B.Gamma, V, optimize=True))
    Ca, Cb = A.C_active, B.C_active
    Sab = Ca.T @ S @ Cb
    V = vt.mo(Ca, Ca, Cb, Cb)
    return float(np.einsum("abcd,efgh,bh,df,aceg->", A.Gamma, B.Gamma, Sab, Sab, V,
                           optimize=True))


@dataclass
class ExchangeResult:
    E_exch1: float
    E_pol1: float
    T: dict
    blocks: dict = field(default_factory=dict)

    def as_dict(self):
        return {"E_exch1": self.E_exch1, "E_pol1": self.E_pol1, "T": dict(self.T),
                "blocks": {k: dict(v) for k, v in self.blocks.items()}}


def e_exch1(A: MonomerState, B: MonomerState, ints: IntegralSet,
            naive_blocks=()) -> ExchangeResult:
    """S^2 exchange E = T1 + T2 + T3 + T4 + T5 with a per-block breakdown.

    Each T carries the overall -1/2 prefactor. *naive_blocks* lists block keys
    ("T2:aa", "T4:ac,cc", ...) to evaluate with the literal full-MO
    contraction instead, which helps when bisecting a mismatch.
    """
    _check_counts(A, B, ints)
    vt = VTilde(ints)
    x, z = A.D, B.D
    epol = float(np.vdot(x, vt.J(z)))
    naive = set(naive_blocks)
    twin = None
    if naive:
        from .naive import NaiveExchange
        twin = NaiveExchange(A, B, ints)

    def pick(key, fast):
        return -0.5 * (twin.raw_block(key) if key in naive else fast())

    T = {"T1": -0.5 * float(np.vdot(x, vt.K(z)))}
    blocks = {"T2": {}, "T3": {}, "T4": {}}
    for b in BLOCKS:
        blocks["T2"][b] = pick(f"T2:{b}", lambda: _t2(vt, x, B, b))
    for b in BLOCKS:
        blocks["T3"][b] = pick(f"T3:{b}", lambda: _t3(vt, z, A, b))
    for ba in BLOCKS:
        for bb in BLOCKS:
            k = f"{ba},{bb}"
            blocks["T4"][k] = pick(f"T4:{k}", lambda: _t4(vt, A, B, ba, bb))
    for t in ("T2", "T3", "T4"):
        T[t] = _accumulate(blocks[t].values())
    T["T5"] = 0.5 * epol * float(np.trace(x @ vt.S @ z @ vt.S))
    total = _accumulate(T[t] for t in ("T1", "T2", "T3", "T4", "T5"))
    return ExchangeResult(total, epol, T, blocks)


def _accumulate(values):
    acc = 0.0
    for v in values:
        acc += v
    return acc
