"""Diffraction measures on the spherical parameter set, and their classification.

A measure here is a finite list of atoms plus a multiple of the Plancherel
measure. Random lattice orbits of a finite graph are purely atomic; the unit
intensity Poisson process is the trivial atom plus Plancherel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from .errors import NotConnected
from .graph_core import Graph, is_bipartite
from .rational_atoms import RationalAngle, lambda_rat_member, rational_angle_of
from .spectral import (
    DEFAULT_CLUSTER_TOL,
    DEFAULT_EIG_TOL,
    DEFAULT_SNAP_TOL,
    Atom,
    Branch,
    SpectralParam,
    atom_masses,
    symmetric_eigen,
)


@dataclass(frozen=True)
class DiffractionMeasure:
    q: int
    atoms: tuple[Atom, ...]
    plancherel_coefficient: float = 0.0
    notes: tuple[str, ...] = field(default=())

    def __post_init__(self):
        keys = [(a.param.branch, a.param.value) for a in self.atoms]
        if len(set(keys)) != len(keys):
            raise ValueError("atom parameters must be pairwise distinct")
        if not any(a.param.is_trivial for a in self.atoms):
            raise ValueError("a diffraction measure needs the trivial atom")
        for a in self.atoms:
            if a.param.q != self.q:
                raise ValueError("atom parameter belongs to a different tree")
            if not a.mass > 0:
                raise ValueError(f"atom mass must be positive, got {a.mass}")
        if self.plancherel_coefficient < 0:
            raise ValueError("plancherel_coefficient must be non-negative")

    @property
    def trivial_mass(self) -> float:
        return next(a.mass for a in self.atoms if a.param.is_trivial)

    @property
    def nontrivial_atoms(self) -> tuple[Atom, ...]:
        return tuple(a for a in self.atoms if not a.param.is_trivial)

    @property
    def sub_oscillatory_atoms(self) -> tuple[Atom, ...]:
        """Atoms that count towards NV*: everything but the trivial and sign atoms."""
        return tuple(a for a in self.atoms if not (a.param.is_trivial or a.param.is_sign))

    @property
    def sign_atom(self) -> Atom | None:
        return next((a for a in self.atoms if a.param.is_sign), None)

    @property
    def is_atomic(self) -> bool:
        return self.plancherel_coefficient == 0.0


def poisson_diffraction(q: int) -> DiffractionMeasure:
    if q < 2:
        raise ValueError(f"q must be >= 2, got {q}")
    trivial = Atom(SpectralParam.trivial(q), 1.0, float(q + 1))
    return DiffractionMeasure(q, (trivial,), 1.0)


def lattice_orbit_diffraction(
    g: Graph,
    root: int = 0,
    eig_tol: float = DEFAULT_EIG_TOL,
    cluster_tol: float = DEFAULT_CLUSTER_TOL,
    snap_tol: float = DEFAULT_SNAP_TOL,
) -> DiffractionMeasure:
    decomp = symmetric_eigen(g, eig_tol, cluster_tol)
    atoms = atom_masses(decomp, root, g.n, snap_tol)
    if not atoms[0].param.is_trivial:
        raise NotConnected("top eigenvalue is not q+1")
    # Eigenvalue clusters can have zero weight at the root (not for
    # vertex-transitive graphs, but in general); those carry no mass.
    kept = tuple(a for a in atoms if a.mass > 1e-15)
    notes = tuple(
        f"eigenvalue {a.alpha!r} snapped to {a.snapped}"
        for a in kept
        if a.snapped and not (a.param.is_trivial or a.param.is_sign)
    )
    dropped = [a for a in atoms if a.mass <= 1e-15]
    notes += tuple(f"eigenvalue {a.alpha!r} has no weight at the root; omitted" for a in dropped)
    return DiffractionMeasure(g.q, kept, 0.0, notes)


@dataclass(frozen=True)
class Classification:
    ramanujan: bool
    stealthy: bool
    spectrally_hyperuniform: bool
    hyperfluctuating: bool
    has_rational_principal_atom: bool
    sign_atom: bool
    notes: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "ramanujan": self.ramanujan,
            "stealthy": self.stealthy,
            "spectrally_hyperuniform": self.spectrally_hyperuniform,
            "hyperfluctuating": self.hyperfluctuating,
            "has_rational_principal_atom": self.has_rational_principal_atom,
            "sign_atom": self.sign_atom,
        }


RationalProbe = Callable[[SpectralParam], "RationalAngle | None"]


def _is_exceptional_atom(p: SpectralParam) -> bool:
    """A complementary-type atom strictly inside i[0,1/2) or tau/2 + i[0,1/2)."""
    return p.branch is not Branch.PRINCIPAL and p.value < 0.5


def classify(measure: DiffractionMeasure, rational_probe: RationalProbe | None = rational_angle_of) -> Classification:
    """Ramanujan / stealthy / hyperfluctuating flags for a measure.

    The sign atom tau/2 + i/2 does not break stealth; only the half-open
    complementary intervals must carry no mass. Pass ``rational_probe=None``
    to skip the rational-atom test.
    """
    atoms = measure.nontrivial_atoms
    notes = list(measure.notes)
    ramanujan = not any(
        a.param.branch is not Branch.PRINCIPAL and 0.0 < a.param.value < 0.5 for a in atoms
    )
    hyperfluctuating = any(_is_exceptional_atom(a.param) for a in atoms)
    edge_atoms = any(a.param.branch is not Branch.PRINCIPAL and a.param.value == 0.0 for a in atoms)
    stealthy = ramanujan and not edge_atoms and measure.is_atomic
    if measure.is_atomic:
        hyperuniform = stealthy
    else:
        hyperuniform = False
        notes.append("Plancherel part decays cubically at the spectrum edges: not spectrally hyperuniform")
    sign = measure.sign_atom is not None
    if sign and stealthy:
        notes.append("sign atom tau/2 + i/2 present (bipartite); stealth only excludes i[0,1/2) and tau/2 + i[0,1/2)")

    has_rational = False
    if rational_probe is not None:
        for a in atoms:
            if a.param.branch is not Branch.PRINCIPAL:
                continue
            angle = rational_probe(a.param)
            if angle is None:
                continue
            if lambda_rat_member(measure.q, angle):
                has_rational = True
                notes.append(f"principal atom {angle.a}/{angle.b} * tau/2 lies in Lambda_q^Rat")
            else:
                notes.append(f"principal atom {angle.a}/{angle.b} * tau/2 is an exceptional rational (sine equation solvable)")
    return Classification(ramanujan, stealthy, hyperuniform, hyperfluctuating, has_rational, sign, tuple(notes))


def measure_report(measure: DiffractionMeasure, classification: Classification | None = None) -> dict:
    out = {
        "q": measure.q,
        "atoms": [a.to_json() for a in measure.atoms],
        "plancherel_coefficient": measure.plancherel_coefficient,
    }
    if classification is not None:
        out["classification"] = classification.to_json()
        out["notes"] = list(classification.notes)
    else:
        out["notes"] = list(measure.notes)
    return out


def total_atomic_mass(measure: DiffractionMeasure) -> float:
    return math.fsum(a.mass for a in measure.atoms)


def bipartite_consistent(g: Graph, measure: DiffractionMeasure) -> bool:
    """Sign atom present exactly when the graph is bipartite."""
    return (measure.sign_atom is not None) == is_bipartite(g)
