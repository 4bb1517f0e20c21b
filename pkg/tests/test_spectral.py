import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import tau
from treehu.errors import OutOfSpectrum, RootOutOfRange
from treehu.graph_core import named_graph
from treehu.spectral import (
    Branch,
    SpectralParam,
    alpha_to_lambda,
    atom_masses,
    cluster_eigenvalues,
    jacobi_eigh,
    lambda_to_alpha,
    symmetric_eigen,
)


def spectrum(decomp):
    return [(c.alpha, c.multiplicity) for c in decomp.clusters]


@pytest.mark.parametrize(
    "key, expected",
    [
        ("K4", [(3, 1), (-1, 3)]),
        ("K33", [(3, 1), (0, 4), (-3, 1)]),
        ("petersen", [(3, 1), (1, 5), (-2, 4)]),
    ],
)
def test_named_spectra(graphs, key, expected):
    got = spectrum(symmetric_eigen(graphs[key]))
    assert [m for _, m in got] == [m for _, m in expected]
    for (a, _), (b, _) in zip(got, expected):
        assert a == pytest.approx(b, abs=1e-10)


def test_circular_ladder_spectrum(graphs):
    # C_n x K_2: eigenvalues 2 cos(2 pi k / n) +- 1
    n = 24
    expected = sorted((2 * math.cos(2 * math.pi * k / n) + s for k in range(n) for s in (1, -1)), reverse=True)
    d = symmetric_eigen(graphs["ladder24"])
    assert np.allclose(d.eigenvalues, expected, atol=1e-10)


@pytest.mark.parametrize("key", ["K4", "K33", "petersen", "ladder24"])
def test_against_lapack(graphs, key):
    a = graphs[key].adjacency_matrix(float)
    d = symmetric_eigen(graphs[key])
    assert np.allclose(d.eigenvalues, np.sort(np.linalg.eigvalsh(a))[::-1], atol=1e-12)
    assert np.allclose(d.eigenvectors.T @ d.eigenvectors, np.eye(len(a)), atol=1e-12)
    assert d.residual <= 1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 12).flatmap(lambda n: st.lists(st.floats(-5, 5), min_size=n * n, max_size=n * n).map(lambda xs: np.array(xs).reshape(n, n))))
def test_jacobi_random_symmetric(m):
    a = m + m.T
    w, v = jacobi_eigh(a)
    assert np.allclose(np.sort(w), np.linalg.eigvalsh(a), atol=1e-10 * max(1, np.abs(a).max()))
    assert np.allclose(a @ v, v * w, atol=1e-10 * max(1, np.abs(a).max()))


def test_jacobi_rejects_nonsymmetric():
    with pytest.raises(ValueError):
        jacobi_eigh(np.array([[0.0, 1.0], [2.0, 0.0]]))


def test_clusters_by_gap():
    cl = cluster_eigenvalues([3.0, 1.0 + 1e-9, 1.0, 1.0 - 1e-9, -2.0])
    assert [c.multiplicity for c in cl] == [1, 3, 1]
    assert cl[1].alpha == pytest.approx(1.0, abs=1e-15)


# alpha <-> lambda

def test_map_examples():
    q = 2
    assert alpha_to_lambda(3.0, q) == SpectralParam.trivial(q)
    assert alpha_to_lambda(-3.0, q) == SpectralParam.sign(q)
    assert alpha_to_lambda(2 * math.sqrt(2), q) == SpectralParam.complementary(0.0, q)
    assert alpha_to_lambda(-2 * math.sqrt(2), q) == SpectralParam.signed_complementary(0.0, q)
    p = alpha_to_lambda(-1.0, q)
    assert p.branch is Branch.PRINCIPAL
    assert 2 * math.sqrt(2) * math.cos(p.value * math.log(2)) == pytest.approx(-1.0, abs=1e-12)
    assert alpha_to_lambda(0.0, q).value == pytest.approx(tau(2) / 4, abs=1e-15)


def test_snap_near_boundaries():
    assert alpha_to_lambda(3.0 + 5e-10, 2).is_trivial
    assert alpha_to_lambda(2 * math.sqrt(2) - 5e-10, 2) == SpectralParam.complementary(0.0, 2)
    with pytest.raises(OutOfSpectrum):
        alpha_to_lambda(3.1, 2)


def test_param_validation():
    with pytest.raises(ValueError):
        SpectralParam.principal(0.0, 2)
    with pytest.raises(ValueError):
        SpectralParam.principal(tau(2) / 2, 2)
    with pytest.raises(ValueError):
        SpectralParam.complementary(0.6, 2)


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 30), st.floats(-1, 1))
def test_round_trip(q, x):
    alpha = x * (q + 1)
    back = lambda_to_alpha(alpha_to_lambda(alpha, q, tol=1e-300))
    assert back == pytest.approx(alpha, abs=1e-9 * (q + 1))


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 30), st.floats(1e-6, 1 - 1e-6))
def test_branch_follows_alpha(q, x):
    edge = 2 * math.sqrt(q)
    p = alpha_to_lambda(x * edge, q)
    assert p.branch is Branch.PRINCIPAL
    alpha = edge + x * (q + 1 - edge)
    assert alpha_to_lambda(alpha, q).branch is Branch.COMPLEMENTARY
    assert alpha_to_lambda(-alpha, q).branch is Branch.SIGNED_COMPLEMENTARY


# atom masses

@pytest.mark.parametrize("key", ["K4", "K33", "petersen", "ladder24"])
def test_masses_sum_to_one_over_n(graphs, key):
    g = graphs[key]
    atoms = atom_masses(symmetric_eigen(g), 0)
    assert math.fsum(a.mass for a in atoms) == pytest.approx(1 / g.n, abs=1e-10)
    assert atoms[0].param.is_trivial
    assert atoms[0].mass == pytest.approx(1 / g.n**2, abs=1e-10)


def test_masses_are_multiplicity_over_n_squared_for_transitive(graphs):
    for key in ("K4", "K33", "petersen"):
        g = graphs[key]
        for a in atom_masses(symmetric_eigen(g), 3):
            assert a.mass == pytest.approx(a.multiplicity / g.n**2, abs=1e-12)


def test_masses_basis_independent(graphs):
    # the projector diagonal must not depend on the basis inside a cluster
    g = graphs["petersen"]
    d = symmetric_eigen(g)
    a = g.adjacency_matrix(float)
    w, v = np.linalg.eigh(a)
    for c in d.clusters:
        lapack = np.sum(v[0, np.abs(w - c.alpha) < 1e-7] ** 2) / g.n
        ours = np.sum(d.eigenvectors[0, list(c.members)] ** 2) / g.n
        assert ours == pytest.approx(lapack, abs=1e-12)


def test_root_out_of_range(graphs):
    with pytest.raises(RootOutOfRange):
        atom_masses(symmetric_eigen(graphs["K4"]), 4)
