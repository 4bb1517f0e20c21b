"""Adjacency spectra of finite regular graphs and their spherical parameters.

Eigenvalues alpha of a (q+1)-regular graph live in [-(q+1), q+1] and map onto
the parameter set of positive-definite spherical functions on the tree via
alpha = 2 sqrt(q) cos(log(q) lambda). The three branches are

* ``PRINCIPAL``            lambda = t in (0, tau/2),        |alpha| < 2 sqrt(q)
* ``COMPLEMENTARY``        lambda = i s, s in [0, 1/2],     alpha in [2 sqrt(q), q+1]
* ``SIGNED_COMPLEMENTARY`` lambda = tau/2 + i s,            alpha in [-(q+1), -2 sqrt(q)]

with tau = 2 pi / log(q).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NoConvergence, OutOfSpectrum, RootOutOfRange
from .graph_core import Graph

DEFAULT_EIG_TOL = 1e-12
DEFAULT_CLUSTER_TOL = 1e-7
DEFAULT_SNAP_TOL = 1e-9
MAX_SWEEPS = 100


class Branch(str, enum.Enum):
    PRINCIPAL = "principal"
    COMPLEMENTARY = "complementary"
    SIGNED_COMPLEMENTARY = "signed_complementary"


@dataclass(frozen=True)
class SpectralParam:
    """A point of the spherical parameter set in canonical branch form.

    The endpoints lambda = 0 and lambda = tau/2 are stored as
    ``COMPLEMENTARY(0)`` and ``SIGNED_COMPLEMENTARY(0)``, never as principal.
    """

    branch: Branch
    value: float
    q: int

    def __post_init__(self):
        if self.q < 2:
            raise ValueError(f"q must be >= 2, got {self.q}")
        if self.branch is Branch.PRINCIPAL:
            if not 0.0 < self.value < math.pi / math.log(self.q):
                raise ValueError(f"principal value {self.value} outside (0, tau/2)")
        elif not 0.0 <= self.value <= 0.5:
            raise ValueError(f"{self.branch.value} value {self.value} outside [0, 1/2]")

    @classmethod
    def principal(cls, t: float, q: int) -> "SpectralParam":
        return cls(Branch.PRINCIPAL, float(t), q)

    @classmethod
    def complementary(cls, s: float, q: int) -> "SpectralParam":
        return cls(Branch.COMPLEMENTARY, float(s), q)

    @classmethod
    def signed_complementary(cls, s: float, q: int) -> "SpectralParam":
        return cls(Branch.SIGNED_COMPLEMENTARY, float(s), q)

    @classmethod
    def trivial(cls, q: int) -> "SpectralParam":
        return cls(Branch.COMPLEMENTARY, 0.5, q)

    @classmethod
    def sign(cls, q: int) -> "SpectralParam":
        return cls(Branch.SIGNED_COMPLEMENTARY, 0.5, q)

    @property
    def is_trivial(self) -> bool:
        return self.branch is Branch.COMPLEMENTARY and self.value == 0.5

    @property
    def is_sign(self) -> bool:
        return self.branch is Branch.SIGNED_COMPLEMENTARY and self.value == 0.5

    @property
    def angle(self) -> float:
        """log(q) * value: the real angle (principal) or real rate (complementary)."""
        return self.value * math.log(self.q)

    @property
    def tau(self) -> float:
        return 2.0 * math.pi / math.log(self.q)

    def to_json(self) -> dict:
        return {"branch": self.branch.value, "value": self.value}

    def __str__(self):
        if self.branch is Branch.PRINCIPAL:
            return f"{self.value!r}"
        if self.branch is Branch.COMPLEMENTARY:
            return f"i*{self.value!r}"
        return f"tau/2 + i*{self.value!r}"


def snap_alpha(alpha: float, q: int, tol: float = DEFAULT_SNAP_TOL) -> tuple[float, str | None]:
    """Move alpha onto a branch boundary (+-2 sqrt q, +-(q+1)) when within tol.

    Returns the (possibly) snapped value and the boundary label, or None.
    """
    if abs(alpha) > q + 1 + tol:
        raise OutOfSpectrum(f"|alpha| = {abs(alpha)} exceeds q+1 = {q + 1}")
    two_rq = 2.0 * math.sqrt(q)
    for target, label in ((q + 1.0, "q+1"), (-(q + 1.0), "-(q+1)"), (two_rq, "2sqrt(q)"), (-two_rq, "-2sqrt(q)")):
        if abs(alpha - target) <= tol:
            return target, label
    return float(alpha), None


def alpha_to_lambda(alpha: float, q: int, tol: float = DEFAULT_SNAP_TOL) -> SpectralParam:
    alpha, label = snap_alpha(alpha, q, tol)
    log_q = math.log(q)
    if label == "q+1":
        return SpectralParam.trivial(q)
    if label == "-(q+1)":
        return SpectralParam.sign(q)
    if label == "2sqrt(q)":
        return SpectralParam.complementary(0.0, q)
    if label == "-2sqrt(q)":
        return SpectralParam.signed_complementary(0.0, q)
    x = alpha / (2.0 * math.sqrt(q))
    if abs(x) < 1.0:
        return SpectralParam.principal(math.acos(x) / log_q, q)
    s = min(math.acosh(abs(x)) / log_q, 0.5)
    if x > 0:
        return SpectralParam.complementary(s, q)
    return SpectralParam.signed_complementary(s, q)


def lambda_to_alpha(param: SpectralParam) -> float:
    q = param.q
    if param.is_trivial:
        return float(q + 1)
    if param.is_sign:
        return -float(q + 1)
    two_rq = 2.0 * math.sqrt(q)
    if param.branch is Branch.PRINCIPAL:
        return two_rq * math.cos(param.angle)
    if param.branch is Branch.COMPLEMENTARY:
        return two_rq * math.cosh(param.angle)
    return -two_rq * math.cosh(param.angle)


# ---------------------------------------------------------------------------
# Dense cyclic Jacobi

def jacobi_eigh(a: np.ndarray, rel_tol: float = 1e-14, max_sweeps: int = MAX_SWEEPS):
    """Eigen-decompose a real symmetric matrix by cyclic Jacobi rotations.

    Returns ``(eigenvalues, eigenvectors)`` unsorted, eigenvectors as columns.
    Stops once the off-diagonal Frobenius norm drops below ``rel_tol * ||A||_F``.
    """
    a = np.array(a, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n) or not np.allclose(a, a.T, rtol=0, atol=0):
        raise ValueError("jacobi_eigh needs a square symmetric matrix")
    v = np.eye(n)
    norm = math.sqrt(float(np.sum(a * a)))
    if n == 1 or norm == 0.0:
        return np.diag(a).copy(), v
    target = rel_tol * norm
    iu = np.triu_indices(n, 1)
    for _ in range(max_sweeps):
        off = math.sqrt(2.0 * float(np.sum(a[iu] ** 2)))
        if off <= target:
            return np.diag(a).copy(), v
        for p in range(n - 1):
            for r in range(p + 1, n):
                apr = a[p, r]
                if apr == 0.0:
                    continue
                app, arr = a[p, p], a[r, r]
                # rotation would not change either diagonal entry in floating point
                if abs(apr) < 1e-18 * (abs(app) + abs(arr)):
                    a[p, r] = a[r, p] = 0.0
                    continue
                theta = (arr - app) / (2.0 * apr)
                t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                if theta < 0:
                    t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                col_p = a[:, p].copy()
                a[:, p] = c * col_p - s * a[:, r]
                a[:, r] = s * col_p + c * a[:, r]
                row_p = a[p, :].copy()
                a[p, :] = c * row_p - s * a[r, :]
                a[r, :] = s * row_p + c * a[r, :]
                a[p, r] = a[r, p] = 0.0
                vp = v[:, p].copy()
                v[:, p] = c * vp - s * v[:, r]
                v[:, r] = s * vp + c * v[:, r]
    raise NoConvergence(f"Jacobi did not converge within {max_sweeps} sweeps")


@dataclass(frozen=True)
class Cluster:
    alpha: float
    multiplicity: int
    members: tuple[int, ...]


@dataclass(frozen=True)
class EigenDecomposition:
    """Sorted (descending) spectrum, orthonormal eigenvectors (columns), clusters."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    clusters: tuple[Cluster, ...]
    q: int
    residual: float = field(default=0.0)

    @property
    def n(self) -> int:
        return len(self.eigenvalues)

    def multiplicities(self) -> dict[float, int]:
        return {c.alpha: c.multiplicity for c in self.clusters}


def cluster_eigenvalues(eigenvalues, cluster_tol: float = DEFAULT_CLUSTER_TOL) -> tuple[Cluster, ...]:
    """Group a descending eigenvalue list into runs separated by gaps >= cluster_tol."""
    clusters = []
    start = 0
    vals = list(eigenvalues)
    for i in range(1, len(vals) + 1):
        if i == len(vals) or vals[i - 1] - vals[i] >= cluster_tol:
            members = tuple(range(start, i))
            rep = float(np.mean(vals[start:i]))
            clusters.append(Cluster(rep, len(members), members))
            start = i
    return tuple(clusters)


def symmetric_eigen(
    g: Graph,
    eig_tol: float = DEFAULT_EIG_TOL,
    cluster_tol: float = DEFAULT_CLUSTER_TOL,
) -> EigenDecomposition:
    if eig_tol <= 0 or cluster_tol <= 0:
        raise ValueError("tolerances must be positive")
    a = g.adjacency_matrix(dtype=float)
    w, v = jacobi_eigh(a)
    order = np.argsort(-w, kind="stable")
    w = w[order]
    v = v[:, order]
    residual = float(np.max(np.abs(a @ v - v * w)))
    if residual > eig_tol:
        raise NoConvergence(f"eigen-residual {residual:.3e} exceeds eig_tol {eig_tol:.1e}")
    w.setflags(write=False)
    v.setflags(write=False)
    return EigenDecomposition(w, v, cluster_eigenvalues(w, cluster_tol), g.q, residual)


@dataclass(frozen=True)
class Atom:
    """A point mass of a diffraction measure, with the eigenvalue it came from."""

    param: SpectralParam
    mass: float
    alpha: float
    multiplicity: int = 0
    snapped: str | None = None

    def to_json(self) -> dict:
        out = {**self.param.to_json(), "alpha": self.alpha, "mass": self.mass}
        if self.multiplicity:
            out["multiplicity"] = self.multiplicity
        if self.snapped:
            out["snapped_to"] = self.snapped
        return out


def atom_masses(
    decomp: EigenDecomposition,
    root: int,
    n: int | None = None,
    snap_tol: float = DEFAULT_SNAP_TOL,
) -> list[Atom]:
    """One atom per eigenvalue cluster with mass (1/n) * sum_k phi_k(root)^2.

    This is the root diagonal entry of the cluster's spectral projector divided
    by n, so it does not depend on the eigenbasis chosen inside a cluster.
    """
    n = decomp.n if n is None else n
    if n != decomp.n:
        raise ValueError(f"vertex count {n} does not match decomposition size {decomp.n}")
    if not 0 <= root < n:
        raise RootOutOfRange(f"root {root} outside [0, {n})")
    row = decomp.eigenvectors[root, :]
    atoms = []
    for c in decomp.clusters:
        mass = float(np.sum(row[list(c.members)] ** 2)) / n
        alpha, label = snap_alpha(c.alpha, decomp.q, snap_tol)
        atoms.append(Atom(alpha_to_lambda(alpha, decomp.q, snap_tol), mass, alpha, c.multiplicity, label))
    return atoms


def spectrum_json(decomp: EigenDecomposition, atoms: list[Atom]) -> list[dict]:
    return [
        {
            "eigenvalue": a.alpha,
            "multiplicity": c.multiplicity,
            "branch": a.param.branch.value,
            "value": a.param.value,
            "mass": a.mass,
            **({"snapped_to": a.snapped} if a.snapped else {}),
        }
        for c, a in zip(decomp.clusters, atoms)
    ]
