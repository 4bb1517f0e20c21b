"""Combinatorial ground truth from the universal covering tree.

Tree vertices at distance n from a lift of the root correspond to
non-backtracking walks of length n in the quotient graph, so lattice-orbit
counts in balls reduce to integer matrix recursions. None of this touches
eigenvalues, which is what makes it an independent check of the spectral side.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import CountOverflow, RadiusTooLarge, RootOutOfRange
from .graph_core import Graph

INT64_MAX = np.iinfo(np.int64).max
ENUMERATION_MAX_RADIUS = 12


def nb_walk_counts(g: Graph, n_max: int) -> list[np.ndarray]:
    """[A_0, ..., A_n_max]: (A_n)_{v,u} = number of non-backtracking v-u walks of length n."""
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    q = g.q
    a1 = g.adjacency_matrix(np.int64)
    eye = np.eye(g.n, dtype=np.int64)
    mats = [eye]
    if n_max >= 1:
        mats.append(a1)
    if n_max >= 2:
        mats.append(a1 @ a1 - (q + 1) * eye)
    for n in range(2, n_max):
        # entries of A_1 A_n are bounded by the row sum (q+1) * |dB_n|
        if (q + 1) * (q + 1) * q ** (n - 1) > INT64_MAX:
            raise CountOverflow(f"non-backtracking counts at length {n + 1} exceed 64-bit range")
        mats.append(a1 @ mats[n] - q * mats[n - 1])
    return mats


@dataclass(frozen=True)
class FiberCountTable:
    """counts[r, v] = number of tree vertices in B_r(lift of v) lying over root."""

    root: int
    counts: np.ndarray

    @property
    def r_max(self) -> int:
        return self.counts.shape[0] - 1

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["r"] + [f"v{v}" for v in range(self.counts.shape[1])])
        for r, row in enumerate(self.counts):
            w.writerow([r] + [int(x) for x in row])
        return buf.getvalue()


def fiber_counts(g: Graph, root: int, r_max: int) -> FiberCountTable:
    if not 0 <= root < g.n:
        raise RootOutOfRange(f"root {root} outside [0, {g.n})")
    mats = nb_walk_counts(g, r_max)
    column = np.array([m[:, root] for m in mats])
    counts = np.cumsum(column, axis=0)
    counts.setflags(write=False)
    return FiberCountTable(root, counts)


def oracle_nv(g: Graph, root: int, r_max: int) -> list[float]:
    """Variance over a uniform quotient vertex v of c_r(v), for r = 0..r_max.

    Computed exactly as (n sum c^2 - (sum c)^2) / n^2 in Python integers.
    """
    table = fiber_counts(g, root, r_max)
    n = g.n
    out = []
    for row in table.counts:
        c = [int(x) for x in row]
        s1 = sum(c)
        s2 = sum(x * x for x in c)
        out.append((n * s2 - s1 * s1) / (n * n))
    return out


def enumerate_cover_ball(g: Graph, root: int, r: int) -> tuple[int, int]:
    """Walk every non-backtracking path from root of length <= r.

    Returns (number of paths, number ending at root): the ball size in the
    covering tree and the fiber count c_r(root).
    """
    if r > ENUMERATION_MAX_RADIUS:
        raise RadiusTooLarge(f"explicit enumeration is capped at r = {ENUMERATION_MAX_RADIUS}")
    if r < 0:
        raise ValueError("radius must be non-negative")
    if not 0 <= root < g.n:
        raise RootOutOfRange(f"root {root} outside [0, {g.n})")
    ball, hits = 1, 1
    frontier = [(-1, root)]
    for _ in range(r):
        nxt = []
        for prev, cur in frontier:
            for w in g.adjacency[cur]:
                if w != prev:
                    nxt.append((cur, w))
                    if w == root:
                        hits += 1
        ball += len(nxt)
        frontier = nxt
    return ball, hits
