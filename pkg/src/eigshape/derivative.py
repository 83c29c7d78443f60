"""Guaranteed enclosures for eigenvalue difference quotients and
directional-derivative ranges near clustered eigenvalues.

The pipeline for a direction e and a cluster of eigenvalue indices:

1. two-sided bounds at the perturbed endpoint p + eps*e,
2. bounds valid on the whole segment t in (0, eps] by transport,
3. an L2-orthonormal discrete cluster basis at p and the small matrix of
   the perturbation form on it,
4. distance bounds between the exact cluster eigenspace, its pullback along
   the perturbation, and the discrete basis,
5. the resulting error radius eta around the small-matrix eigenvalues,
6. enclosures [F_lo_i, F_hi_i] of the difference quotients
   (lambda_i^{p+te} - lambda_i^p)/t, uniform over t.

For an exactly multiple eigenvalue the t -> 0 limit of the small matrix
gives the directional-derivative matrix; its eigenvalues are enclosed the
same way, and the ill-posedness of individual eigenfunctions appears as a
rotation-uncertainty radius in Frobenius norm.

Basis gauge: inside a numerically degenerate cluster the orthonormal basis
is a free rotation.  When the triangle is symmetric under the reflection
that swaps vertices O and A (b_x = 1/2), the basis is canonicalized to the
parity eigenvectors of that reflection, antisymmetric mode first; published
reference matrices for the regular triangle were computed in an unreported
solver-dependent gauge, so only rotation invariants of the small matrices
are reproducible (see the acceptance suite).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import subspace as subspace_mod
from .assembly import f_p_form_interval
from .bounds import BoundsData, EigenBounds, SegmentBounds, compute_bounds_data, segment_bounds
from .eigen import eigenvalue_intervals
from .errors import (
    GapTooSmall,
    LinearDependence,
    NotCertifiedSimple,
    SingularEnclosure,
)
from .geometry import Direction, ShapeParam, perturbation_limit, perturbation_matrix
from .intervals import Interval, IntervalSymMatrix, spectral_upper
from .subspace import (
    Cluster,
    ClusterApproxData,
    SubspaceErrorBounds,
    bar_delta_b,
    delta_a_from_b,
    delta_b_projection_detailed,
    delta_bounds_recursive,
    linear_independence_check,
    orthonormal_correction,
)

MIRROR_TOL = 1e-9
DEGENERACY_RELTOL = 1e-6


@dataclass(frozen=True)
class DerivativeMatrix:
    """Small-matrix data of one derivative computation."""

    m_hat: IntervalSymMatrix | Interval
    err_m: Interval
    err_n: Interval
    eta: Interval
    rotation_radius: Interval | None = None

    def m_hat_spectral_upper(self) -> float:
        if isinstance(self.m_hat, Interval):
            return self.m_hat.mag
        return spectral_upper(self.m_hat)


@dataclass(frozen=True)
class DerivativeEnclosure:
    """Per-index quotient ranges [F_lo, F_hi] over t in (0, eps]."""

    direction: Direction
    eps: float
    cluster: Cluster
    mu_hat: tuple[float, ...]
    quotient_ranges: tuple[Interval, ...]
    separated: bool
    linear_independent: bool
    matrix: DerivativeMatrix
    subspace: SubspaceErrorBounds
    gauge: str
    assume_multiple: bool


# -- canonical cluster basis ------------------------------------------------


def _mirror_permutation(mesh) -> np.ndarray:
    """Node permutation of the reflection swapping O and A ((i,j) -> (N-i-j, j))."""
    n = mesh.subdivision
    ii = mesh.lattice_ij[:, 0]
    jj = mesh.lattice_ij[:, 1]
    ri = n - ii - jj
    offset = jj * (n + 1) - (jj * (jj - 1)) // 2
    return offset + ri


def has_oa_mirror(p: ShapeParam) -> bool:
    """True if T^p is symmetric under the reflection swapping O and A."""
    return abs(p.r * math.cos(p.theta) - 0.5) <= MIRROR_TOL


def cluster_basis(data: BoundsData, cluster: Cluster) -> tuple[np.ndarray, str]:
    """L2-orthonormal basis of the discrete cluster space, canonical gauge.

    Returns (vectors, gauge) with gauge one of "split" (eigenvalue ordering
    fixes the basis) or "mirror-parity" (degenerate pair on a symmetric
    shape, parity-adapted and ordered antisymmetric first).
    """
    sys_ = data.cg_system
    block = np.array(sys_.vectors[:, cluster.n - 1 : cluster.last])
    lam = sys_.eigenvalues[cluster.n - 1 : cluster.last]
    if cluster.size != 2:
        return block, "split"
    rel_split = (lam[1] - lam[0]) / max(lam[0], 1e-300)
    if rel_split > DEGENERACY_RELTOL or not has_oa_mirror(data.p):
        return block, "split"

    perm_nodes = _mirror_permutation(data.mesh)
    node_of_dof = np.flatnonzero(data.cg_space.dof_map >= 0)
    perm_dof = data.cg_space.dof_map[perm_nodes[node_of_dof]]
    reflected = block[perm_dof, :]
    m_mat = data.cg_mass
    parity = block.T @ (m_mat @ reflected)
    parity = 0.5 * (parity + parity.T)
    _, rot = np.linalg.eigh(parity)  # eigenvalues -1 (antisym) then +1 (sym)
    basis = block @ rot
    for i in range(2):
        basis[:, i] /= math.sqrt(basis[:, i] @ (m_mat @ basis[:, i]))
        jmax = int(np.argmax(np.abs(basis[:, i])))
        if basis[jmax, i] < 0.0:
            basis[:, i] = -basis[:, i]
    return basis, "mirror-parity"


# -- error radii -------------------------------------------------------------


def matrix_error_radii(
    cluster_size: int,
    lambda_hat_last: Interval,
    p_norm: Interval,
    bar_delta_a: Interval,
    bar_db: Interval,
    err_star_a: Interval,
) -> tuple[Interval, Interval]:
    """(err_m, err_n) radii of the small-matrix construction.

    err_m = size * sqrt(lambda_hat_last) * ||P||_2 * (bar_delta_a + 2 err_star_a)
    bounds the Frobenius distance between the pencil matrix built from exact
    pulled-back eigenfunctions and the computed one; err_n = size *
    bar_delta_b bounds the mass-side deviation from the identity.
    """
    size = float(cluster_size)
    err_m = size * lambda_hat_last.sqrt() * p_norm * (bar_delta_a + 2.0 * err_star_a)
    err_n = size * bar_db
    return subspace_mod._upper(err_m), subspace_mod._upper(err_n)


def eta_bound(err_m: Interval, m_hat, err_n: Interval) -> Interval:
    """Eigenvalue perturbation radius err_m + ||m_hat||_2 err_n/(1 - err_n)."""
    if err_n.hi >= 1.0:
        raise SingularEnclosure(f"mass-matrix deviation {err_n.hi} >= 1")
    norm = m_hat.mag if isinstance(m_hat, Interval) else spectral_upper(m_hat)
    neumann = err_n / (1.0 - err_n)
    return subspace_mod._upper(err_m + Interval.point(norm) * neumann)


# -- distance chains ---------------------------------------------------------


def _cluster_hull(bounds: EigenBounds, cluster: Cluster) -> Interval:
    return Interval(bounds.lower[cluster.n - 1], bounds.upper[cluster.last - 1])


def _pullback_chain(
    bounds_at_p: EigenBounds,
    cluster: Cluster,
    cond: Interval,
    assume_multiple: bool,
) -> tuple[Interval, Interval, Interval]:
    """(delta_b, bar_delta_b, bar_delta_a) between the exact cluster space at
    p and the pullback of the perturbed one, uniform over the segment.

    Rayleigh quotients of pulled-back eigenfunctions lie within the factor
    interval [1/cond, cond] of the matching eigenvalue at p; pullbacks of
    distinct clusters stay exactly L2-orthogonal, so the recursion's mixing
    terms vanish.
    """
    factor = Interval((1.0 / Interval.point(cond.hi)).lo, cond.hi)
    shift = factor - 1.0

    chain: list[ClusterApproxData] = []
    for l in range(1, cluster.n):
        lam_l = bounds_at_p.interval(l)
        rho_l = Interval.point(bounds_at_p.lower[l])  # lower bound of lambda_{l+1}
        if rho_l.lo <= lam_l.hi:
            raise GapTooSmall(f"eigenvalues {l} and {l + 1} not separated at p")
        chain.append(
            ClusterApproxData(
                cluster=Cluster(l, l),
                lam_n=lam_l,
                lam_last=lam_l,
                lam_hat_last=subspace_mod._clamped(lam_l * factor),
                rho=rho_l,
                hat_gap=lam_l * shift,
            )
        )

    if bounds_at_p.k_max < cluster.last + 1:
        raise GapTooSmall("need a bound for the eigenvalue above the cluster")
    lam_n = bounds_at_p.interval(cluster.n)
    lam_last = bounds_at_p.interval(cluster.last)
    hull = _cluster_hull(bounds_at_p, cluster)
    rho = Interval.point(bounds_at_p.lower[cluster.last])
    if rho.lo <= lam_last.hi:
        raise GapTooSmall("cluster not separated from the spectrum above")
    lam_tilde = subspace_mod._clamped(hull * factor)
    if assume_multiple:
        hat_gap = hull * shift
        gap_last_n = Interval.point(0.0)
    else:
        hat_gap = lam_tilde - lam_n
        gap_last_n = lam_last - lam_n
    chain.append(
        ClusterApproxData(
            cluster=cluster,
            lam_n=lam_n,
            lam_last=lam_last,
            lam_hat_last=lam_tilde,
            rho=rho,
            hat_gap=hat_gap,
        )
    )
    # only the L2 branch of the recursion is consumed here: the energy
    # branch would need energy non-orthogonality terms of the pullbacks
    _, delta_b = delta_bounds_recursive(chain)[-1]
    bar_db = bar_delta_b(delta_b)
    _, bar_da = delta_a_from_b(
        lam_n,
        lam_last,
        lam_tilde,
        delta_b,
        gap_last_n=gap_last_n,
        gap_hat_n=hat_gap,
    )
    return delta_b, bar_db, bar_da


def _discrete_delta_b(
    data: BoundsData, bounds_at_p: EigenBounds, cluster: Cluster
) -> tuple[Interval, SubspaceErrorBounds]:
    """delta_b between the exact cluster space and the discrete basis at p.

    The projection route applies to clusters of size >= 2; the recursive
    Rayleigh-quotient route always applies (with discrete non-orthogonality
    terms at residual level).  The minimum of the available bounds is used.
    """
    cg = data.cg_system
    hat = eigenvalue_intervals(cg)
    diag = SubspaceErrorBounds(delta_b=Interval(0.0, np.inf))

    candidates = []
    if cluster.size >= 2:
        try:
            pb = delta_b_projection_detailed(
                cluster, bounds_at_p, cg, data.constants.c_cg
            )
            candidates.append(pb.delta_b)
            diag.tau, diag.tau_h = pb.tau, pb.tau_h
            diag.xi, diag.beta_amp = pb.xi, pb.beta_amp
        except GapTooSmall:
            pass

    chain: list[ClusterApproxData] = []
    eps_rows_a: list[list[Interval]] = []
    eps_rows_b: list[list[Interval]] = []
    blocks = []
    singles = [Cluster(l, l) for l in range(1, cluster.n)] + [cluster]
    for idx, cl in enumerate(singles):
        block = cg.vectors[:, cl.n - 1 : cl.last]
        blocks.append(block)
        eps_a_row, eps_b_row = [], []
        for prev in blocks[:-1]:
            ea, eb = subspace_mod.nonorthogonality(
                prev, block, data.cg_mass, data.cg_stiffness
            )
            eps_a_row.append(ea)
            eps_b_row.append(eb)
        eps_rows_a.append(eps_a_row)
        eps_rows_b.append(eps_b_row)
        lam_n = bounds_at_p.interval(cl.n)
        lam_last = bounds_at_p.interval(cl.last)
        if bounds_at_p.k_max < cl.last + 1:
            raise GapTooSmall("need a bound above the cluster")
        rho = Interval.point(bounds_at_p.lower[cl.last])
        if rho.lo <= lam_last.hi:
            raise GapTooSmall(f"no verified gap above index {cl.last}")
        chain.append(
            ClusterApproxData(
                cluster=cl,
                lam_n=lam_n,
                lam_last=lam_last,
                lam_hat_last=hat[cl.last - 1],
                rho=rho,
                eps_a=tuple(eps_a_row),
                eps_b=tuple(eps_b_row),
            )
        )
    _, delta_b_rec = delta_bounds_recursive(chain)[-1]
    candidates.append(delta_b_rec)

    best = min(candidates, key=lambda c: c.hi)
    diag.delta_b = best
    return best, diag


# -- main pipelines -----------------------------------------------------------


def _cluster_matrix(data: BoundsData, basis: np.ndarray, p_enc: IntervalSymMatrix):
    size = basis.shape[1]
    if size == 1:
        return f_p_form_interval(p_enc, data.cg_couplings, basis[:, 0], basis[:, 0])
    e11 = f_p_form_interval(p_enc, data.cg_couplings, basis[:, 0], basis[:, 0])
    e22 = f_p_form_interval(p_enc, data.cg_couplings, basis[:, 1], basis[:, 1])
    e12 = f_p_form_interval(p_enc, data.cg_couplings, basis[:, 0], basis[:, 1])
    e21 = f_p_form_interval(p_enc, data.cg_couplings, basis[:, 1], basis[:, 0])
    return IntervalSymMatrix(e11, e12.hull(e21), e22)


def derivative_matrix(
    data: BoundsData, e: Direction, t: Interval, basis: np.ndarray
):
    """Interval matrix of the perturbation form on an L2-orthonormal basis,
    with entries hulled over the whole t range.  For t = [0, 0] this is the
    directional-derivative matrix of the basis.

    basis columns must be mass-orthonormal coefficient vectors on the
    conforming space of data (clusters of size 1 or 2); a zero or
    non-normalized column is rejected.
    """
    gram = basis.T @ (data.cg_mass @ basis)
    if np.linalg.norm(gram - np.eye(basis.shape[1])) > 1e-8:
        raise ValueError("basis is not mass-orthonormal")
    p_enc = perturbation_matrix(e, data.p, t)
    return _cluster_matrix(data, basis, p_enc)


def _subspace_package(
    data: BoundsData, bounds_at_p: EigenBounds, cluster: Cluster
) -> SubspaceErrorBounds:
    """Discrete-basis distance bounds and orthonormal-correction errors."""
    delta_b, diag = _discrete_delta_b(data, bounds_at_p, cluster)
    hat = eigenvalue_intervals(data.cg_system)
    lam_first = bounds_at_p.interval(cluster.n)
    lam_last = bounds_at_p.interval(cluster.last)
    lam_last_h = hat[cluster.last - 1]
    diag.bar_delta_b = bar_delta_b(delta_b)
    if cluster.size == 1:
        # a single unit vector is already the orthonormalized system
        err_b = diag.bar_delta_b
        err_a = subspace_mod._clamped(
            lam_last * err_b.sq() + (lam_last_h - lam_first)
        ).sqrt()
        diag.err_star_a, diag.err_star_b = subspace_mod._upper(err_a), err_b
    else:
        diag.err_star_a, diag.err_star_b = orthonormal_correction(
            delta_b, lam_first, lam_last, lam_last_h
        )
    _, diag.bar_delta_a = delta_a_from_b(lam_first, lam_last, lam_last_h, delta_b)
    return diag


def quotient_ranges(
    p: ShapeParam,
    e: Direction,
    eps: float,
    n_mesh: int,
    cluster: Cluster = Cluster(2, 3),
    *,
    k_max: int | None = None,
    assume_multiple: bool = False,
    data_p: BoundsData | None = None,
    segment: SegmentBounds | None = None,
) -> DerivativeEnclosure:
    """Enclose the difference quotients (lambda_i^{p+te} - lambda_i^p)/t for
    the cluster indices i, uniformly over t in (0, eps].

    With assume_multiple the cluster eigenvalues at p are taken as exactly
    equal (an external fact the caller asserts, e.g. symmetry of the shape);
    the transported Rayleigh-quotient gaps then shrink from the enclosure
    width to a multiplicative O(eps) term.
    """
    k_need = max(k_max or 0, cluster.last + 1)
    if data_p is None:
        data_p = compute_bounds_data(p, n_mesh, k_need)
    if segment is None:
        segment = segment_bounds(p, e, eps, n_mesh, k_need)
    bounds_at_p = data_p.bounds.intersect(segment.bounds)

    # cluster isolation on the whole segment (precondition of the theory)
    seg = segment.bounds
    if cluster.n >= 2 and seg.upper[cluster.n - 2] >= seg.lower[cluster.n - 1]:
        raise GapTooSmall("cluster not separated from below on the segment")
    if seg.upper[cluster.last - 1] >= seg.lower[cluster.last]:
        raise GapTooSmall("cluster not separated from above on the segment")

    basis, gauge = cluster_basis(data_p, cluster)
    p_enc = perturbation_matrix(e, p, Interval(0.0, eps))
    m_hat = _cluster_matrix(data_p, basis, p_enc)
    p_norm = Interval(0.0, spectral_upper(p_enc))

    diag = _subspace_package(data_p, bounds_at_p, cluster)
    delta_b_tilde, bar_db_tilde, bar_da_tilde = _pullback_chain(
        bounds_at_p, cluster, segment.pullback_cond, assume_multiple
    )

    hat = eigenvalue_intervals(data_p.cg_system)
    err_m, err_n = matrix_error_radii(
        cluster.size,
        hat[cluster.last - 1],
        p_norm,
        bar_da_tilde,
        bar_db_tilde,
        diag.err_star_a,
    )
    independent = linear_independence_check(bar_db_tilde, cluster.size)
    if not independent:
        raise LinearDependence(
            "pullback comparison system not verifiably independent "
            f"(2 * {cluster.size} * {bar_db_tilde.hi:.3e} >= 1)"
        )
    eta = eta_bound(err_m, m_hat, err_n)

    if isinstance(m_hat, Interval):
        mu_enc = (m_hat,)
    else:
        mu_enc = m_hat.eig_bounds()
    ranges = tuple(
        Interval(enc.lo - eta.hi, enc.hi + eta.hi) for enc in mu_enc
    )
    mu_hat = tuple(enc.mid for enc in mu_enc)
    separated = all(
        ranges[i].hi < ranges[i + 1].lo for i in range(len(ranges) - 1)
    )
    matrix = DerivativeMatrix(m_hat=m_hat, err_m=err_m, err_n=err_n, eta=eta)
    return DerivativeEnclosure(
        direction=e,
        eps=eps,
        cluster=cluster,
        mu_hat=mu_hat,
        quotient_ranges=ranges,
        separated=separated,
        linear_independent=independent,
        matrix=matrix,
        subspace=diag,
        gauge=gauge,
        assume_multiple=assume_multiple,
    )


def derivative_range_near_multiple(
    p: ShapeParam,
    e: Direction,
    n_mesh: int,
    cluster: Cluster = Cluster(2, 3),
    *,
    k_max: int | None = None,
    data_p: BoundsData | None = None,
) -> tuple[DerivativeMatrix, DerivativeEnclosure]:
    """Directional-derivative matrix at p with its rotation-uncertainty radius.

    The exact matrix equals a rotation conjugate of the computed one up to
    rotation_radius in Frobenius norm, so its eigenvalue enclosures (inflated
    by the radius) cover every possible directional-derivative value of the
    cluster; the possible diagonal values under the unknown rotation span the
    same inflated eigenvalue hull.
    """
    k_need = max(k_max or 0, cluster.last + 1)
    if data_p is None:
        data_p = compute_bounds_data(p, n_mesh, k_need)
    bounds_at_p = data_p.bounds

    basis, gauge = cluster_basis(data_p, cluster)
    p_enc = perturbation_limit(e, p)
    m_hat = _cluster_matrix(data_p, basis, p_enc)
    p_norm = Interval(0.0, spectral_upper(p_enc))

    diag = _subspace_package(data_p, bounds_at_p, cluster)
    hat = eigenvalue_intervals(data_p.cg_system)
    radius = subspace_mod._upper(
        2.0
        * float(cluster.size)
        * hat[cluster.last - 1].sqrt()
        * p_norm
        * diag.err_star_a
    )
    if isinstance(m_hat, Interval):
        mu_enc = (m_hat,)
    else:
        mu_enc = m_hat.eig_bounds()
    ranges = tuple(Interval(enc.lo - radius.hi, enc.hi + radius.hi) for enc in mu_enc)
    matrix = DerivativeMatrix(
        m_hat=m_hat,
        err_m=radius,
        err_n=Interval.point(0.0),
        eta=radius,
        rotation_radius=radius,
    )
    enclosure = DerivativeEnclosure(
        direction=e,
        eps=0.0,
        cluster=cluster,
        mu_hat=tuple(enc.mid for enc in mu_enc),
        quotient_ranges=ranges,
        separated=all(ranges[i].hi < ranges[i + 1].lo for i in range(len(ranges) - 1)),
        linear_independent=True,
        matrix=matrix,
        subspace=diag,
        gauge=gauge,
        assume_multiple=False,
    )
    return matrix, enclosure


def simple_derivative(
    p: ShapeParam,
    e: Direction,
    index: int,
    n_mesh: int,
    *,
    data_p: BoundsData | None = None,
) -> Interval:
    """Enclosure of the partial derivative of a certified-simple eigenvalue.

    The eigenvalue must be verifiably separated from both neighbours; the
    derivative equals the perturbation form on the (unit) eigenfunction, and
    the returned interval accounts for the discrete eigenfunction error via
    the one-dimensional error radius.
    """
    k_need = index + 1
    if data_p is None:
        data_p = compute_bounds_data(p, n_mesh, k_need)
    bounds_at_p = data_p.bounds
    if bounds_at_p.k_max < index + 1:
        raise NotCertifiedSimple("need a bound for the next eigenvalue")
    if index >= 2 and bounds_at_p.upper[index - 2] >= bounds_at_p.lower[index - 1]:
        raise NotCertifiedSimple(f"eigenvalue {index} not separated from below")
    if bounds_at_p.upper[index - 1] >= bounds_at_p.lower[index]:
        raise NotCertifiedSimple(f"eigenvalue {index} not separated from above")

    cluster = Cluster(index, index)
    _, enclosure = derivative_range_near_multiple(
        p, e, n_mesh, cluster, data_p=data_p
    )
    return enclosure.quotient_ranges[0]
