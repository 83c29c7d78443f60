"""Finite element assembly on the uniform triangle mesh.

Two spaces are supported: P1 Lagrange (CG, dofs on interior nodes) and
Crouzeix-Raviart (CR, dofs on interior edge midpoints; the boundary-edge
integral-zero constraint removes boundary dofs exactly because the CR basis
value at an edge midpoint equals the edge mean).

All integrands are polynomials of degree <= 2 per element, so element
matrices are exact closed forms; no quadrature error enters.  Dirichlet
constraints are applied by dof elimination.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.io
import scipy.sparse as sp

from .errors import DimensionMismatch
from .intervals import Interval, IntervalSymMatrix
from .mesh import Mesh


@dataclass(frozen=True)
class DerivativeCouplings:
    """First-derivative coupling matrices on the constrained space.

    dxx[i, j] = (phi_i_x, phi_j_x), dxy[i, j] = (phi_i_x, phi_j_y) (stored
    unsymmetric), dyy[i, j] = (phi_i_y, phi_j_y).  dxx + dyy equals the
    stiffness matrix.
    """

    dxx: sp.csr_matrix
    dxy: sp.csr_matrix
    dyy: sp.csr_matrix


@dataclass(frozen=True)
class FemSpace:
    kind: str                # "CG" or "CR"
    mesh: Mesh
    dof_map: np.ndarray      # entity index -> dof index, -1 if constrained
    element_dofs: np.ndarray  # (n_elements, 3) global dof per local basis fn
    n_dofs: int


def fem_space(mesh: Mesh, kind: str, *, constrained: bool = True) -> FemSpace:
    """Dof layout for the element kind; constrained=False keeps all dofs
    (useful for kernel/row-sum checks, not for eigenvalue bounds)."""
    if kind == "CG":
        free = mesh.interior_node_flags
        entities = mesh.elements
    elif kind == "CR":
        free = ~mesh.boundary_edge_flags
        entities = mesh.element_edges
    else:
        raise ValueError(f"unknown element kind {kind!r}")
    if not constrained:
        free = np.ones_like(free)
    dof_map = -np.ones(len(free), dtype=np.int64)
    dof_map[free] = np.arange(int(free.sum()))
    element_dofs = dof_map[entities]
    return FemSpace(kind, mesh, dof_map, element_dofs, int(free.sum()))


def _element_geometry(mesh: Mesh):
    """Per-element barycentric gradients (bx, by per local fn) and areas."""
    p = mesh.nodes[mesh.elements]          # (m, 3, 2)
    d1 = p[:, 1] - p[:, 0]
    d2 = p[:, 2] - p[:, 0]
    det = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]   # 2 * area, positive
    area = 0.5 * det
    # grad of barycentric fn i: rot90 of opposite edge / det
    gx = np.stack([p[:, 1, 1] - p[:, 2, 1], p[:, 2, 1] - p[:, 0, 1], p[:, 0, 1] - p[:, 1, 1]], axis=1)
    gy = np.stack([p[:, 2, 0] - p[:, 1, 0], p[:, 0, 0] - p[:, 2, 0], p[:, 1, 0] - p[:, 0, 0]], axis=1)
    gx /= det[:, None]
    gy /= det[:, None]
    return gx, gy, area


def _scatter(space: FemSpace, local: np.ndarray) -> sp.csr_matrix:
    """Assemble (m, 3, 3) local blocks into the constrained global matrix."""
    dofs = space.element_dofs
    rows = np.repeat(dofs, 3, axis=1).ravel()
    cols = np.tile(dofs, (1, 3)).ravel()
    vals = local.reshape(len(dofs), 9).ravel()
    keep = (rows >= 0) & (cols >= 0)
    mat = sp.coo_matrix(
        (vals[keep], (rows[keep], cols[keep])), shape=(space.n_dofs, space.n_dofs)
    )
    return mat.tocsr()


def assemble(space: FemSpace):
    """Stiffness, mass and derivative-coupling matrices for the space.

    Returns (K, M, DerivativeCouplings), all on the constrained dofs.
    """
    gx, gy, area = _element_geometry(space.mesh)
    if space.kind == "CR":
        # CR basis on edge opposite vertex l is 1 - 2*phi_l
        gx, gy = -2.0 * gx, -2.0 * gy

    a = area[:, None, None]
    dxx = a * gx[:, :, None] * gx[:, None, :]
    dxy = a * gx[:, :, None] * gy[:, None, :]
    dyy = a * gy[:, :, None] * gy[:, None, :]
    k_local = dxx + dyy

    if space.kind == "CG":
        m_local = (area[:, None, None] / 12.0) * (np.ones((3, 3)) + np.eye(3))
    else:
        m_local = (area[:, None, None] / 3.0) * np.eye(3)

    return (
        _scatter(space, k_local),
        _scatter(space, m_local),
        DerivativeCouplings(_scatter(space, dxx), _scatter(space, dxy), _scatter(space, dyy)),
    )


def _check_dims(space_dim: int, *vecs):
    for v in vecs:
        if v.shape != (space_dim,):
            raise DimensionMismatch(f"vector shape {v.shape} != ({space_dim},)")


def l2_inner(mass: sp.csr_matrix, u: np.ndarray, v: np.ndarray) -> float:
    _check_dims(mass.shape[0], u, v)
    return float(u @ (mass @ v))


def energy_inner(stiffness: sp.csr_matrix, u: np.ndarray, v: np.ndarray) -> float:
    _check_dims(stiffness.shape[0], u, v)
    return float(u @ (stiffness @ v))


def gradient_moments(d: DerivativeCouplings, u: np.ndarray, v: np.ndarray):
    """((u_x, v_x), (u_x, v_y), (u_y, v_x), (u_y, v_y)) as floats."""
    _check_dims(d.dxx.shape[0], u, v)
    return (
        float(u @ (d.dxx @ v)),
        float(u @ (d.dxy @ v)),
        float(v @ (d.dxy @ u)),
        float(u @ (d.dyy @ v)),
    )


def f_p_form(p, d: DerivativeCouplings, u: np.ndarray, v: np.ndarray):
    """Bilinear form (P grad u, grad v) for a symmetric 2x2 matrix P.

    With a point matrix (anything exposing a11/a12/a22 floats) the result is
    a float; with an IntervalSymMatrix it is an Interval treating the
    discrete moments as exact point values (the floating-point rigor
    boundary documented by the eigensolver).
    """
    sxx, sxy, syx, syy = gradient_moments(d, u, v)
    if isinstance(p, IntervalSymMatrix):
        return p.a11 * sxx + p.a12 * (sxy + syx) + p.a22 * syy
    return p.a11 * sxx + p.a12 * (sxy + syx) + p.a22 * syy


def f_p_form_interval(p: IntervalSymMatrix, d: DerivativeCouplings, u, v) -> Interval:
    res = f_p_form(p, d, u, v)
    return res if isinstance(res, Interval) else Interval.point(res)


def export_matrix_market(path, mat: sp.spmatrix) -> None:
    """Dump a matrix in MatrixMarket coordinate format for cross-checking."""
    scipy.io.mmwrite(path, sp.coo_matrix(mat))
