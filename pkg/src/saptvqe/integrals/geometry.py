"""Molecular geometry containers and the dimer geometry reader."""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

ANGSTROM_TO_BOHR = 1.8897261254578281

ELEMENTS = [
    "X", "H", "He", "Li", "Be", "B", "C", "N", "O", "F", "Ne",
    "Na", "Mg", "Al", "Si", "P", "S", "Cl", "Ar",
]
_Z = {sym.upper(): z for z, sym in enumerate(ELEMENTS)}


class GeometryError(ValueError):
    pass


def atomic_number(symbol: str) -> int:
    try:
        return _Z[symbol.strip().upper()]
    except KeyError:
        raise GeometryError(f"unknown element {symbol!r}") from None


@dataclass(frozen=True)
class Molecule:
    """A set of nuclei. Coordinates are stored in bohr."""

    symbols: tuple
    coords: np.ndarray
    charge: int = 0

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=float).reshape(-1, 3)
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "symbols", tuple(self.symbols))
        for s in self.symbols:
            atomic_number(s)
        _check_clashes(coords)

    @property
    def charges(self) -> np.ndarray:
        return np.array([atomic_number(s) for s in self.symbols], dtype=float)

    @property
    def natom(self) -> int:
        return len(self.symbols)

    @property
    def nelectron(self) -> int:
        return int(round(self.charges.sum())) - self.charge

    def nuclear_repulsion(self) -> float:
        return nuclear_repulsion(self.charges, self.coords)

    def __add__(self, other: "Molecule") -> "Molecule":
        return Molecule(self.symbols + other.symbols,
                        np.vstack([self.coords, other.coords]),
                        self.charge + other.charge)


def _check_clashes(coords):
    if len(coords) < 2:
        return
    d = np.linalg.norm(coords[:, None] - coords[None], axis=-1)
    d[np.diag_indices_from(d)] = np.inf
    if d.min() < 1e-6:
        i, j = np.unravel_index(np.argmin(d), d.shape)
        raise GeometryError(f"nuclei {i} and {j} overlap (distance {d[i, j]:.2e} bohr)")


def nuclear_repulsion(charges_a, coords_a, charges_b=None, coords_b=None) -> float:
    """Intra (one set) or inter (two sets) nuclear repulsion energy."""
    za = np.asarray(charges_a, float)
    ra = np.asarray(coords_a, float).reshape(-1, 3)
    if charges_b is None:
        if len(za) < 2:
            return 0.0
        d = np.linalg.norm(ra[:, None] - ra[None], axis=-1)
        iu = np.triu_indices(len(za), 1)
        return float(np.sum(za[iu[0]] * za[iu[1]] / d[iu]))
    zb = np.asarray(charges_b, float)
    rb = np.asarray(coords_b, float).reshape(-1, 3)
    if len(za) == 0 or len(zb) == 0:
        return 0.0
    d = np.linalg.norm(ra[:, None] - rb[None], axis=-1)
    return float(np.sum(np.outer(za, zb) / d))


@dataclass(frozen=True)
class DimerSystem:
    monomer_a: Molecule
    monomer_b: Molecule
    basis_a: str = "6-31g"
    basis_b: str = "6-31g"
    units: str = field(default="angstrom")

    def __post_init__(self):
        _check_clashes(np.vstack([self.monomer_a.coords, self.monomer_b.coords]))

    @property
    def dimer(self) -> Molecule:
        return self.monomer_a + self.monomer_b

    def geometry_hash(self) -> str:
        h = hashlib.sha256()
        for mol in (self.monomer_a, self.monomer_b):
            for s, r in zip(mol.symbols, mol.coords):
                h.update(f"{s.upper()} {r[0]:.10f} {r[1]:.10f} {r[2]:.10f}\n".encode())
            h.update(f"charge {mol.charge}\n--\n".encode())
        h.update(f"{self.basis_a}|{self.basis_b}".lower().encode())
        return h.hexdigest()


def parse_dimer_xyz(text: str, basis_a="6-31g", basis_b=None, units="angstrom") -> DimerSystem:
    """Read an xyz-like block with the two monomers separated by a ``--`` line.

    Blank lines and ``#`` comments are skipped. A line ``units bohr`` (or
    ``units angstrom``) anywhere overrides *units*; a line ``charge n`` sets the
    charge of the monomer currently being read.
    """
    blocks = [[]]
    charges = [0]
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        low = line.lower().split()
        if low[0] in ("units", "charge") and len(low) != 2:
            raise GeometryError(f"line {lineno}: expected '{low[0]} <value>'")
        if low[0] == "units":
            units = low[1]
            continue
        if low[0] == "charge":
            try:
                charges[-1] = int(low[1])
            except ValueError:
                raise GeometryError(f"line {lineno}: charge must be an integer") from None
            continue
        if line.startswith("--"):
            blocks.append([])
            charges.append(0)
            continue
        parts = line.split()
        try:
            if len(parts) != 4:
                raise ValueError
            xyz = [float(x) for x in parts[1:]]
        except ValueError:
            raise GeometryError(f"line {lineno}: cannot parse {raw.strip()!r} "
                                "(expected 'symbol x y z')") from None
        try:
            atomic_number(parts[0])
        except GeometryError as e:
            raise GeometryError(f"line {lineno}: {e}") from None
        blocks[-1].append((parts[0], xyz))
    if len(blocks) == 1:
        raise GeometryError("missing '--' separator between the two monomers")
    if len(blocks) != 2:
        raise GeometryError(f"expected two monomer blocks separated by '--', found {len(blocks)}")
    if not blocks[0] or not blocks[1]:
        raise GeometryError("empty monomer block")
    if units.lower().startswith("ang"):
        scale = ANGSTROM_TO_BOHR
    elif units.lower() == "bohr":
        scale = 1.0
    else:
        raise GeometryError(f"unknown units {units!r}")
    mols = []
    for blk, q in zip(blocks, charges):
        syms = [s for s, _ in blk]
        xyz = np.array([r for _, r in blk], dtype=float).reshape(-1, 3) * scale
        mols.append(Molecule(syms, xyz, q))
    return DimerSystem(mols[0], mols[1], basis_a, basis_b or basis_a, units)
