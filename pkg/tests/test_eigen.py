import math

import numpy as np
import pytest
import scipy.linalg
import scipy.sparse as sp

from eigshape import eigen
from eigshape.assembly import assemble, fem_space
from eigshape.eigen import (
    eigenvalue_intervals,
    smallest_eigenpairs,
    sym2_interval_eig,
)
from eigshape.geometry import ShapeParam, triangle_of
from eigshape.intervals import IntervalSymMatrix
from eigshape.mesh import uniform_mesh

from helpers import sym2_eig_fuzz

P0 = ShapeParam(1.0, math.pi / 3)

# Dirichlet spectrum of the unit-side equilateral triangle:
# lambda = (16 pi^2 / 9)(m^2 + m n + n^2), m, n >= 1.
EXACT_EQUILATERAL = [
    (16.0 * math.pi**2 / 9.0) * c for c in (3, 7, 7, 12, 13, 13)
]


def _pencil(p, n, kind):
    mesh = uniform_mesh(triangle_of(p), n)
    space = fem_space(mesh, kind)
    k_mat, m_mat, _ = assemble(space)
    return k_mat, m_mat


def test_one_by_one_pencil():
    k_mat = sp.csr_matrix(np.array([[2.0]]))
    m_mat = sp.csr_matrix(np.array([[1.0]]))
    sys_ = smallest_eigenpairs(k_mat, m_mat, 1)
    assert sys_.eigenvalues[0] == pytest.approx(2.0)
    assert abs(sys_.vectors[0, 0]) == pytest.approx(1.0)


def test_equilateral_cg_against_analytic():
    k_mat, m_mat = _pencil(P0, 64, "CG")
    sys_ = smallest_eigenpairs(k_mat, m_mat, 4, kind="CG")
    lam1 = sys_.eigenvalues[0]
    exact1 = EXACT_EQUILATERAL[0]
    assert exact1 < lam1 < exact1 * 1.01  # upper bound, within 1%
    for lam, exact in zip(sys_.eigenvalues, EXACT_EQUILATERAL):
        assert exact <= lam <= exact * 1.02
    assert np.all(np.diff(sys_.eigenvalues) >= -1e-9)


def test_equilateral_cr_corrected_below_analytic():
    k_mat, m_mat = _pencil(P0, 64, "CR")
    sys_ = smallest_eigenpairs(k_mat, m_mat, 4, kind="CR")
    c = 0.1893 / 64.0
    for lam, exact in zip(sys_.eigenvalues, EXACT_EQUILATERAL):
        corrected = lam / (1.0 + c * c * lam)
        assert corrected < exact
        assert corrected > exact * 0.95


def test_mass_gram_identity():
    k_mat, m_mat = _pencil(P0, 32, "CG")
    sys_ = smallest_eigenpairs(k_mat, m_mat, 5)
    assert np.linalg.norm(sys_.mass_gram - np.eye(5), "fro") < 1e-10


def test_residual_contract():
    for kind in ("CG", "CR"):
        k_mat, m_mat = _pencil(P0, 24, kind)
        sys_ = smallest_eigenpairs(k_mat, m_mat, 4, kind=kind)
        for i in range(4):
            x = sys_.vectors[:, i]
            lam = sys_.eigenvalues[i]
            r = np.linalg.norm(k_mat @ x - lam * (m_mat @ x))
            assert r <= 1e-10 * np.linalg.norm(m_mat @ x) * max(1.0, lam)


def test_dense_matches_full_decomposition():
    for kind, n in (("CG", 4), ("CR", 4)):
        k_mat, m_mat = _pencil(P0, n, kind)
        dim = k_mat.shape[0]
        sys_ = smallest_eigenpairs(k_mat, m_mat, min(3, dim), kind=kind)
        w = scipy.linalg.eigh(
            np.asarray(k_mat.todense()), np.asarray(m_mat.todense()), eigvals_only=True
        )
        for lam, ref in zip(sys_.eigenvalues, w):
            assert lam == pytest.approx(ref, rel=1e-9)


def test_sparse_path_matches_dense(monkeypatch):
    k_mat, m_mat = _pencil(P0, 40, "CG")  # dim 741
    dense = smallest_eigenpairs(k_mat, m_mat, 4)
    monkeypatch.setattr(eigen, "DENSE_CUTOFF", 10)
    sparse = smallest_eigenpairs(k_mat, m_mat, 4)
    assert np.allclose(dense.eigenvalues, sparse.eigenvalues, rtol=1e-9)
    assert np.linalg.norm(sparse.mass_gram - np.eye(4), "fro") < 1e-10


def test_eigenvalue_intervals_cluster_aware():
    k_mat, m_mat = _pencil(P0, 32, "CG")
    sys_ = smallest_eigenpairs(k_mat, m_mat, 4)
    ivs = eigenvalue_intervals(sys_)
    for lam, enc in zip(sys_.eigenvalues, ivs):
        assert enc.contains(lam)
        # degenerate pair must not blow up the enclosure
        assert enc.width < 1e-6 * lam


def test_invalid_k():
    k_mat = sp.csr_matrix(np.eye(3))
    with pytest.raises(ValueError):
        smallest_eigenpairs(k_mat, k_mat, 5)


# -- 2x2 interval eigenvalue enclosures -----------------------------------


def test_sym2_exact_diagonal():
    lo, hi = sym2_interval_eig(IntervalSymMatrix.point(2.0, 0.0, 3.0))
    assert lo.contains(2.0) and hi.contains(3.0)
    assert lo.width < 1e-14


def test_sym2_regular_triangle_limit_matrix():
    c = 1.0 / math.sqrt(3.0)
    lo, hi = sym2_interval_eig(IntervalSymMatrix.point(0.0, c, 2.0))
    # eigenvalues 1 -+ 2/sqrt(3)
    assert lo.contains(1.0 - 2.0 / math.sqrt(3.0))
    assert hi.contains(1.0 + 2.0 / math.sqrt(3.0))
    assert lo.width < 1e-13


def test_sym2_reference_matrix():
    a11, a12, a22 = 89.1793, 17.4075, 156.4683
    lo, hi = sym2_interval_eig(IntervalSymMatrix.point(a11, a12, a22))
    mid = 0.5 * (a11 + a22)
    rad = math.hypot(0.5 * (a22 - a11), a12)
    assert lo.contains(mid - rad) and hi.contains(mid + rad)
    assert mid - rad == pytest.approx(84.9428, abs=5e-4)
    assert mid + rad == pytest.approx(160.7048, abs=5e-4)


def test_sym2_fuzz_small():
    assert sym2_eig_fuzz(10_000, seed=21) == 0
