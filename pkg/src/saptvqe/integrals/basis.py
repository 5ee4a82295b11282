"""Contracted Cartesian Gaussian basis sets (Gaussian94 text format)."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from math import pi

import numpy as np

from .geometry import Molecule, atomic_number, ELEMENTS

L_LETTERS = "SPDFG"


class BasisError(ValueError):
    pass


def cartesian_components(l: int):
    """(lx, ly, lz) in the usual order: xx, xy, xz, yy, yz, zz for l = 2."""
    return [(l - i, i - j, j) for i in range(l + 1) for j in range(i + 1)]


def _dfact(n: int) -> float:
    # (n)!! with (-1)!! = 1
    out = 1.0
    while n > 1:
        out *= n
        n -= 2
    return out


@dataclass(frozen=True)
class Shell:
    """One contracted shell. ``coefs`` already carry the radial primitive
    normalisation and the contraction normalisation; ``comp_norm`` is the
    per-Cartesian-component factor that makes every function unit-normalised."""

    l: int
    center: np.ndarray
    exps: np.ndarray
    coefs: np.ndarray
    atom: int = 0

    @property
    def ncart(self) -> int:
        return (self.l + 1) * (self.l + 2) // 2

    @property
    def comps(self):
        return cartesian_components(self.l)

    @property
    def comp_norm(self) -> np.ndarray:
        return np.array([1.0 / np.sqrt(_dfact(2 * a - 1) * _dfact(2 * b - 1) * _dfact(2 * c - 1))
                         for a, b, c in self.comps])


def make_shell(l, center, exps, raw_coefs, atom=0) -> Shell:
    exps = np.asarray(exps, float)
    raw = np.asarray(raw_coefs, float)
    # radial normalisation of x^l exp(-a r^2) with the (2l-1)!! part left to comp_norm
    prim = (2 * exps / pi) ** 0.75 * (4 * exps) ** (l / 2)
    c = raw * prim
    ee = exps[:, None] + exps[None]
    # self overlap of the contracted (lx=l, ly=lz=0) function, (2l-1)!! cancelled
    ovl = np.sum(np.outer(c, c) * (pi / ee) ** 1.5 / (2 * ee) ** l)
    c = c / np.sqrt(ovl)
    return Shell(l, np.asarray(center, float), exps, c, atom)


def parse_gaussian94(text: str) -> dict:
    """Parse Gaussian94 basis text into {element: [(l, exps, coefs), ...]}."""
    out = {}
    lines = [ln.split("!", 1)[0].rstrip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln.strip()]
    i = 0
    element = None
    while i < len(lines):
        tok = lines[i].split()
        if tok[0] == "****":
            element = None
            i += 1
            continue
        if element is None:
            element = ELEMENTS[atomic_number(tok[0])]
            out.setdefault(element, [])
            i += 1
            continue
        kind = tok[0].upper()
        if kind not in L_LETTERS and kind != "SP":
            raise BasisError(f"{element}: unknown shell type {tok[0]!r}")
        try:
            nprim = int(tok[1])
            rows = [[float(x.replace("D", "E").replace("d", "e"))
                     for x in lines[i + 1 + k].split()] for k in range(nprim)]
            rows = np.array(rows, dtype=float)
        except (IndexError, ValueError):
            raise BasisError(f"{element}: malformed {kind} shell block") from None
        if rows.ndim != 2 or rows.shape[1] != (3 if kind == "SP" else 2):
            raise BasisError(f"{element}: malformed {kind} shell block")
        if np.any(rows[:, 0] <= 0):
            raise BasisError(f"{element}: non-positive exponent in {kind} shell")
        if kind == "SP":
            out[element].append((0, rows[:, 0], rows[:, 1]))
            out[element].append((1, rows[:, 0], rows[:, 2]))
        else:
            l = L_LETTERS.index(kind)
            out[element].append((l, rows[:, 0], rows[:, 1]))
        i += 1 + nprim
    return out


@lru_cache(maxsize=None)
def _builtin_text(name: str) -> str:
    fname = name.lower().replace("*", "s") + ".g94"
    try:
        return resources.files("saptvqe.data.basis").joinpath(fname).read_text()
    except FileNotFoundError:
        raise BasisError(f"basis {name!r} is not bundled") from None


def load_basis_data(name_or_text: str) -> dict:
    if "****" in name_or_text:
        return parse_gaussian94(name_or_text)
    return parse_gaussian94(_builtin_text(name_or_text))


class BasisSet:
    """Ordered list of shells placed on the atoms of a molecule."""

    def __init__(self, shells, name="custom"):
        self.shells = list(shells)
        self.name = name
        offs = np.cumsum([0] + [s.ncart for s in self.shells])
        self.offsets = offs[:-1]
        self.nbf = int(offs[-1])

    @classmethod
    def build(cls, mol: Molecule, name: str = "6-31g") -> "BasisSet":
        data = load_basis_data(name)
        shells = []
        for ia, (sym, r) in enumerate(zip(mol.symbols, mol.coords)):
            el = ELEMENTS[atomic_number(sym)]
            if el not in data:
                raise BasisError(f"basis {name!r} has no functions for element {el}")
            for l, e, c in data[el]:
                shells.append(make_shell(l, r, e, c, ia))
        return cls(shells, name)

    def __add__(self, other: "BasisSet") -> "BasisSet":
        return BasisSet(self.shells + other.shells, f"{self.name}+{other.name}")

    def __len__(self):
        return self.nbf

    def ao_labels(self):
        labs = []
        for s in self.shells:
            for c in s.comps:
                labs.append((s.atom, "x" * c[0] + "y" * c[1] + "z" * c[2] or "s"))
        return labs
