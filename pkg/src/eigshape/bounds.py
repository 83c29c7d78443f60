"""Two-sided Dirichlet eigenvalue bounds on T^p and their transport.

Upper bounds come from the conforming P1 space (min-max), lower bounds from
the Crouzeix-Raviart values through lambda/(1 + C_h^2 lambda) with the
projection constant C_h^CR <= 0.1893 h.  Bounds at one shape transport to
nearby shapes through the QQ^T spectrum of the connecting affine map, which
also yields bounds valid on a whole perturbation segment at once.

The projection constants are stated for uniform meshes; following the
source framework we apply them to the uniform mesh of a general T^p and
record that assumption in reports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import assembly, eigen, geometry
from .errors import ConvergenceFailure, DegenerateShape
from .eigen import DiscreteEigenSystem, eigenvalue_intervals
from .geometry import AffineMap, Direction, ShapeParam, qq_spectrum_interval, triangle_of
from .intervals import Interval
from .mesh import Mesh, uniform_mesh

CG_CONSTANT = 0.493
CR_CONSTANT = 0.1893


@dataclass(frozen=True)
class ProjectionConstants:
    c_cg: Interval
    c_cr: Interval


def projection_constants(h: float) -> ProjectionConstants:
    """Projection error constant intervals [0, 0.493h] and [0, 0.1893h]."""
    if h <= 0.0:
        raise ValueError(f"mesh size must be positive, got {h}")
    return ProjectionConstants(
        c_cg=Interval(0.0, (Interval.point(CG_CONSTANT) * h).hi),
        c_cr=Interval(0.0, (Interval.point(CR_CONSTANT) * h).hi),
    )


@dataclass(frozen=True)
class EigenBounds:
    """Per-index two-sided bounds lower_k <= lambda_k <= upper_k (1-based k)."""

    lower: tuple[float, ...]
    upper: tuple[float, ...]
    provenance: str

    @property
    def k_max(self) -> int:
        return len(self.lower)

    def interval(self, k: int) -> Interval:
        return Interval(self.lower[k - 1], self.upper[k - 1])

    def intersect(self, other: "EigenBounds") -> "EigenBounds":
        k = min(self.k_max, other.k_max)
        lower = tuple(max(self.lower[i], other.lower[i]) for i in range(k))
        upper = tuple(min(self.upper[i], other.upper[i]) for i in range(k))
        if any(lo > up for lo, up in zip(lower, upper)):
            raise ConvergenceFailure("inconsistent bound intersection")
        return EigenBounds(lower, upper, "intersection")


@dataclass(frozen=True)
class BoundsData:
    """Everything produced while bounding eigenvalues at one shape."""

    p: ShapeParam
    mesh: Mesh
    constants: ProjectionConstants
    cg_space: assembly.FemSpace
    cg_stiffness: object
    cg_mass: object
    cg_couplings: assembly.DerivativeCouplings
    cg_system: DiscreteEigenSystem
    cr_system: DiscreteEigenSystem
    cg_intervals: tuple[Interval, ...]
    cr_intervals: tuple[Interval, ...]
    bounds: EigenBounds


def compute_bounds_data(p: ShapeParam, n_mesh: int, k_max: int) -> BoundsData:
    """Assemble, solve and bound the first k_max eigenvalues at T^p.

    One extra eigenpair is computed per space so the residual-inflation gap
    of the top requested eigenvalue is known.
    """
    mesh = uniform_mesh(triangle_of(p), n_mesh)
    consts = projection_constants(mesh.h)

    cg_space = assembly.fem_space(mesh, "CG")
    cr_space = assembly.fem_space(mesh, "CR")
    if k_max > min(cg_space.n_dofs, cr_space.n_dofs):
        raise ValueError(
            f"k_max={k_max} exceeds space dimensions "
            f"({cg_space.n_dofs} CG / {cr_space.n_dofs} CR)"
        )
    k_solve_cg = min(k_max + 1, cg_space.n_dofs)
    k_solve_cr = min(k_max + 1, cr_space.n_dofs)

    kc, mc, dc = assembly.assemble(cg_space)
    cg_system = eigen.smallest_eigenpairs(kc, mc, k_solve_cg, kind="CG")
    kr, mr, _ = assembly.assemble(cr_space)
    cr_system = eigen.smallest_eigenpairs(kr, mr, k_solve_cr, kind="CR")

    cg_int = tuple(eigenvalue_intervals(cg_system))[:k_max]
    cr_int = tuple(eigenvalue_intervals(cr_system))[:k_max]

    lower = []
    upper = []
    c2 = consts.c_cr.sq()
    for k in range(k_max):
        lam_cr = cr_int[k]
        lower_k = (lam_cr / (1.0 + c2 * lam_cr)).lo
        lower.append(max(lower_k, lower[-1] if lower else 0.0))
        upper.append(float(cg_int[k].hi))
    bounds = EigenBounds(tuple(lower), tuple(upper), "direct")
    for k in range(k_max):
        if bounds.lower[k] > bounds.upper[k]:
            raise ConvergenceFailure(f"crossed bounds at index {k + 1}")

    return BoundsData(
        p=p,
        mesh=mesh,
        constants=consts,
        cg_space=cg_space,
        cg_stiffness=kc,
        cg_mass=mc,
        cg_couplings=dc,
        cg_system=cg_system,
        cr_system=cr_system,
        cg_intervals=cg_int,
        cr_intervals=cr_int,
        bounds=bounds,
    )


def eigenvalue_bounds(p: ShapeParam, n_mesh: int, k_max: int) -> EigenBounds:
    """Guaranteed intervals lower_k <= lambda_k(T^p) <= upper_k, k <= k_max."""
    return compute_bounds_data(p, n_mesh, k_max).bounds


def transport_bounds(bounds: EigenBounds, transform) -> EigenBounds:
    """Bounds at p from bounds at q via lambda_min/max(S S^T) of the map
    S: T^p -> T^q.  transform is an AffineMap or an (alpha, beta) interval
    pair describing a family of maps; the result is valid for every member.
    """
    if isinstance(transform, AffineMap):
        alpha = Interval.point(transform.alpha)
        beta = Interval.point(transform.beta)
    else:
        alpha, beta = transform
    lo_f, hi_f = qq_spectrum_interval(alpha, beta)
    lower = tuple((lo_f * lo).lo for lo in bounds.lower)
    upper = tuple((hi_f * up).hi for up in bounds.upper)
    return EigenBounds(lower, upper, "transported")


@dataclass(frozen=True)
class SegmentBounds:
    """Bounds for lambda_i^{p + t e} valid for every t in [0, eps]."""

    p: ShapeParam
    direction: Direction
    eps: float
    bounds: EigenBounds           # valid uniformly on the segment
    endpoint: BoundsData          # full data at p + eps*e
    qq_min: Interval              # QQ^T spectrum hull of S_{p_t -> p_eps}
    qq_max: Interval
    pullback_cond: Interval       # hull of cond(S_{p -> p_t} S^T), t in [0, eps]


def _segment_box(p: ShapeParam, e: Direction, eps: float):
    """Interval box of parameters p + t e over t in [0, eps]."""
    e1, e2 = e.vector
    r = Interval(min(p.r, p.r + eps * e1), max(p.r, p.r + eps * e1))
    th = Interval(min(p.theta, p.theta + eps * e2), max(p.theta, p.theta + eps * e2))
    if r.lo <= 0.0 or th.lo <= 0.0 or th.hi >= math.pi:
        raise DegenerateShape("perturbation segment leaves the admissible region")
    return r, th


def segment_bounds(
    p: ShapeParam, e: Direction, eps: float, n_mesh: int, k_max: int
) -> SegmentBounds:
    """Eigenvalue bounds holding for all t in (0, eps] (and at t = 0).

    Bounds are computed at the endpoint p + eps*e and transported to every
    point of the segment through the interval hull of the connecting maps'
    QQ^T spectra.
    """
    if eps <= 0.0:
        raise DegenerateShape(f"need eps > 0, got {eps}")
    p_eps = p.shifted(e, eps)
    endpoint = compute_bounds_data(p_eps, n_mesh, k_max)

    box_r, box_th = _segment_box(p, e, eps)
    # maps from the moving triangle T^{p_t} onto the fixed endpoint T^{p_eps}
    alpha, beta = geometry.interval_transform(
        box_r, box_th, Interval.point(p_eps.r), Interval.point(p_eps.theta)
    )
    lo_f, hi_f = qq_spectrum_interval(alpha, beta)
    seg = transport_bounds(endpoint.bounds, (alpha, beta))

    # pullback maps T^p -> T^{p_t}: Rayleigh quotients of pulled-back
    # eigenfunctions change by at most cond(SS^T)
    al2, be2 = geometry.interval_transform(
        Interval.point(p.r), Interval.point(p.theta), box_r, box_th
    )
    lo2, hi2 = qq_spectrum_interval(al2, be2)
    cond = hi2 / lo2
    cond = Interval(max(cond.lo, 1.0), max(cond.hi, 1.0))

    return SegmentBounds(
        p=p,
        direction=e,
        eps=eps,
        bounds=seg,
        endpoint=endpoint,
        qq_min=lo_f,
        qq_max=hi_f,
        pullback_cond=cond,
    )
