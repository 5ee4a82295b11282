"""Literal full-MO contraction of the first-order exchange energy.

Reference implementation for testing only: the full-space 1- and 2-RDMs of
both monomers are materialised and every term is one einsum against the
generalised interaction over all dimer MOs. Cost grows like n^8, hence the
size guard.
"""
from __future__ import annotations

import numpy as np

from ..integrals import IntegralSet, generalized_eri
from .exchange import BLOCKS, SAPTError
from .monomer import MonomerState, hf_like

MAX_MO = 30


def _block_rdm(M: MonomerState, blk):
    n, nc = M.n_mo, M.n_core
    c = np.zeros((n, n))
    c[:nc, :nc] = 2 * np.eye(nc)
    a = np.zeros((n, n))
    s = slice(nc, nc + M.n_active)
    a[s, s] = M.gamma
    if blk == "cc":
        return hf_like(c, c)
    if blk == "ac":
        return hf_like(a, c)
    if blk == "ca":
        return hf_like(c, a)
    G = np.zeros((n,) * 4)
    G[s, s, s, s] = M.Gamma
    return G


class NaiveExchange:
    def __init__(self, A: MonomerState, B: MonomerState, ints: IntegralSet, max_mo=MAX_MO):
        nA, nB = A.n_mo, B.n_mo
        if nA + nB > max_mo:
            raise SAPTError(f"naive oracle limited to {max_mo} MOs (got {nA + nB})")
        C = np.hstack([A.C, B.C])
        v = generalized_eri(C, C, C, C, ints)
        a, b = slice(0, nA), slice(nA, nA + nB)
        self.v_aabb = v[a, a, b, b]
        self.v_abba = v[a, b, b, a]
        self.v_abbb = v[a, b, b, b]
        self.v_aaba = v[a, a, b, a]
        self.S = A.C.T @ ints.S @ B.C
        self.A, self.B = A, B
        self.gA, self.gB = A.gamma_full(), B.gamma_full()

    def e_pol1(self):
        return float(np.einsum("pP,qQ,pPqQ->", self.gA, self.gB, self.v_aabb, optimize=True))

    # raw terms (without the -1/2 prefactor)
    def t1(self):
        return float(np.einsum("pP,qQ,pQqP->", self.gA, self.gB, self.v_abba, optimize=True))

    def t2(self, GB):
        return float(np.einsum("pP,qQRU,PQ,pUqR->", self.gA, GB, self.S, self.v_abbb,
                               optimize=True))

    def t3(self, GA):
        return float(np.einsum("qQ,pPRU,PQ,pRqU->", self.gB, GA, self.S, self.v_aaba,
                               optimize=True))

    def t4(self, GA, GB):
        return float(np.einsum("pPRU,qQTW,PW,UQ,pRqT->", GA, GB, self.S, self.S, self.v_aabb,
                               optimize=True))

    def t5(self):
        return -self.e_pol1() * float(np.trace(self.gA @ self.S @ self.gB @ self.S.T))

    def raw_block(self, key):
        term, blk = key.split(":")
        if term == "T2":
            return self.t2(_block_rdm(self.B, blk))
        if term == "T3":
            return self.t3(_block_rdm(self.A, blk))
        if term == "T4":
            ba, bb = blk.split(",")
            return self.t4(_block_rdm(self.A, ba), _block_rdm(self.B, bb))
        raise KeyError(key)

    def terms(self):
        """T1..T5 with the -1/2 prefactor, full RDMs, no block splitting."""
        GA, GB = self.A.Gamma_full(), self.B.Gamma_full()
        raw = {"T1": self.t1(), "T2": self.t2(GB), "T3": self.t3(GA),
               "T4": self.t4(GA, GB), "T5": self.t5()}
        return {k: -0.5 * v for k, v in raw.items()}


def naive_exch1_oracle(A: MonomerState, B: MonomerState, ints: IntegralSet,
                       max_mo=MAX_MO) -> float:
    """Direct contraction of all five exchange terms in the full MO basis."""
    return sum(NaiveExchange(A, B, ints, max_mo).terms().values())


__all__ = ["BLOCKS", "MAX_MO", "NaiveExchange", "naive_exch1_oracle"]
