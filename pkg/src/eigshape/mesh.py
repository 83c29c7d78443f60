"""Uniform triangulation of a parametrized triangle.

The mesh is the affine image of the standard N-fold refinement of the
reference triangle: nodes sit on the barycentric lattice
O + (i/N)(A-O) + (j/N)(B-O), every element is similar to the parent triangle
scaled by 1/N, and the element count is N^2.  Node ordering is lexicographic
by (row j, column i), so matrices assembled on the mesh are reproducible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .geometry import Triangle
from .intervals import Interval


@dataclass(frozen=True)
class Mesh:
    nodes: np.ndarray            # (n_nodes, 2) float
    elements: np.ndarray         # (n_elements, 3) int, counterclockwise
    edges: np.ndarray            # (n_edges, 2) int, sorted node pairs
    edge_midpoints: np.ndarray   # (n_edges, 2) float
    element_edges: np.ndarray    # (n_elements, 3) int; local edge l opposite vertex l
    boundary_edge_flags: np.ndarray  # (n_edges,) bool
    interior_node_flags: np.ndarray  # (n_nodes,) bool
    lattice_ij: np.ndarray       # (n_nodes, 2) barycentric lattice coordinates
    h: float                     # upper bound for the maximal edge length
    subdivision: int

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_elements(self) -> int:
        return len(self.elements)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def to_json_dict(self) -> dict:
        return {
            "nodes": self.nodes.tolist(),
            "elements": self.elements.tolist(),
        }

    def dump_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_json_dict(), f)


def _lattice_index(n: int):
    """Index table idx[j, i] for the barycentric lattice, -1 off-lattice."""
    idx = -np.ones((n + 1, n + 1), dtype=np.int64)
    count = 0
    for j in range(n + 1):
        width = n + 1 - j
        idx[j, :width] = np.arange(count, count + width)
        count += width
    return idx, count


def uniform_mesh(tri: Triangle, n: int) -> Mesh:
    """Uniform N-subdivision of tri into N^2 similar sub-triangles."""
    if n < 1:
        raise ValueError(f"subdivision count must be >= 1, got {n}")
    o = np.asarray(tri.o)
    ea = np.asarray(tri.a) - o
    eb = np.asarray(tri.b) - o

    idx, n_nodes = _lattice_index(n)
    nodes = np.empty((n_nodes, 2))
    ii = np.concatenate([np.arange(n + 1 - j) for j in range(n + 1)])
    jj = np.concatenate([np.full(n + 1 - j, j) for j in range(n + 1)])
    nodes[:] = o + np.outer(ii / n, ea) + np.outer(jj / n, eb)

    lower = []
    upper = []
    for j in range(n):
        i = np.arange(n - j)
        lower.append(np.column_stack([idx[j, i], idx[j, i + 1], idx[j + 1, i]]))
        i_up = np.arange(n - j - 1)
        if len(i_up):
            upper.append(
                np.column_stack([idx[j + 1, i_up + 1], idx[j + 1, i_up], idx[j, i_up + 1]])
            )
    elements = np.vstack(lower + upper) if upper else np.vstack(lower)

    # edge l of an element sits opposite local vertex l
    pair_per_local = (
        elements[:, [1, 2]],
        elements[:, [2, 0]],
        elements[:, [0, 1]],
    )
    all_pairs = np.sort(np.vstack(pair_per_local), axis=1)
    edges, inverse, counts = np.unique(
        all_pairs, axis=0, return_inverse=True, return_counts=True
    )
    m = len(elements)
    element_edges = np.column_stack([inverse[:m], inverse[m : 2 * m], inverse[2 * m :]])
    boundary_edge_flags = counts == 1

    interior_node_flags = (ii > 0) & (jj > 0) & (ii + jj < n)

    # rigorous h: longest parent edge / N, rounded outward
    lengths = []
    for u, v in ((tri.o, tri.a), (tri.o, tri.b), (tri.a, tri.b)):
        dx = Interval.point(u[0]) - Interval.point(v[0])
        dy = Interval.point(u[1]) - Interval.point(v[1])
        lengths.append((dx.sq() + dy.sq()).sqrt().hi)
    h = (Interval.point(max(lengths)) / float(n)).hi

    lattice_ij = np.column_stack([ii, jj])
    for arr in (
        nodes, elements, edges, element_edges,
        boundary_edge_flags, interior_node_flags, lattice_ij,
    ):
        arr.setflags(write=False)
    midpoints = 0.5 * (nodes[edges[:, 0]] + nodes[edges[:, 1]])
    midpoints.setflags(write=False)

    return Mesh(
        nodes=nodes,
        elements=elements,
        edges=edges,
        edge_midpoints=midpoints,
        element_edges=element_edges,
        boundary_edge_flags=boundary_edge_flags,
        interior_node_flags=interior_node_flags,
        lattice_ij=lattice_ij,
        h=h,
        subdivision=n,
    )


def dof_counts(mesh: Mesh) -> tuple[int, int]:
    """(interior node count, interior edge count).

    These are the homogeneous-Dirichlet dof counts of the P1 Lagrange and
    Crouzeix-Raviart spaces on the mesh: (N-1)(N-2)/2 and 3N(N-1)/2 for
    subdivision N.
    """
    return int(mesh.interior_node_flags.sum()), int((~mesh.boundary_edge_flags).sum())
