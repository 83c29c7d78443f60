"""Guaranteed Dirichlet-Laplacian eigenvalue bounds and shape-derivative
enclosures over parametrized triangles."""

from .bounds import (
    EigenBounds,
    ProjectionConstants,
    eigenvalue_bounds,
    projection_constants,
    segment_bounds,
    transport_bounds,
)
from .derivative import (
    DerivativeEnclosure,
    DerivativeMatrix,
    derivative_range_near_multiple,
    quotient_ranges,
    simple_derivative,
)
from .eigen import DiscreteEigenSystem, smallest_eigenpairs, sym2_interval_eig
from .geometry import (
    AffineMap,
    Direction,
    ShapeParam,
    SymMatrix2,
    Triangle,
    perturbation_matrix,
    qq_spectrum,
    transform_between,
    triangle_of,
)
from .intervals import Interval, IntervalSymMatrix
from .mesh import Mesh, dof_counts, uniform_mesh
from .subspace import (
    Cluster,
    SubspaceErrorBounds,
    bar_delta_b,
    delta_a_from_b,
    delta_b_projection,
    delta_bounds_recursive,
    linear_independence_check,
    orthonormal_correction,
)

__version__ = "0.1.0"

__all__ = [
    "AffineMap",
    "Cluster",
    "DerivativeEnclosure",
    "DerivativeMatrix",
    "DiscreteEigenSystem",
    "Direction",
    "EigenBounds",
    "Interval",
    "IntervalSymMatrix",
    "Mesh",
    "ProjectionConstants",
    "ShapeParam",
    "SubspaceErrorBounds",
    "SymMatrix2",
    "Triangle",
    "bar_delta_b",
    "delta_a_from_b",
    "delta_b_projection",
    "delta_bounds_recursive",
    "derivative_range_near_multiple",
    "dof_counts",
    "eigenvalue_bounds",
    "linear_independence_check",
    "orthonormal_correction",
    "perturbation_matrix",
    "projection_constants",
    "qq_spectrum",
    "quotient_ranges",
    "segment_bounds",
    "simple_derivative",
    "smallest_eigenpairs",
    "sym2_interval_eig",
    "transform_between",
    "transport_bounds",
    "triangle_of",
    "uniform_mesh",
]
