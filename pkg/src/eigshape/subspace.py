"""Guaranteed distances between exact eigenspaces and computed subspaces.

Two routes produce the L2 distance delta_b between the exact cluster
eigenspace and an approximating subspace:

* a projection-based bound (1 + beta) * lambda_N * C_h^2 for conforming
  finite element spaces, with the amplification beta = tau / (1 - tau_h xi)
  built from spectral separation ratios, and
* a Rayleigh-quotient bound (lambda_hat_N - lambda_n + theta_b)/(rho -
  lambda_n) valid for arbitrary approximating families, with recursive
  contributions theta from the clusters below.

The remaining operations convert delta_b into the energy distance, into the
unit-norm-constrained variants, and into errors of an explicitly
orthonormalized basis.  Exact eigenvalues inside the formulas are always
replaced by the worst valid endpoint of their verified enclosures.

xi is not pinned down by the source framework; this library instantiates it
as the a-priori bound lambda_N C_h^2 followed by one fixed-point re-pass,
and reports that choice in output metadata.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bounds import EigenBounds
from .eigen import DiscreteEigenSystem, eigenvalue_intervals
from .errors import DeltaTooLarge, GapTooSmall, InvalidDeltaB
from .intervals import Interval

_SQRT2 = Interval(2.0, 2.0).sqrt()


@dataclass(frozen=True)
class Cluster:
    """Consecutive eigenvalue indices n..last (1-based, inclusive)."""

    n: int
    last: int
    rho: Interval | None = None

    def __post_init__(self):
        if not (1 <= self.n <= self.last):
            raise ValueError(f"invalid cluster [{self.n}, {self.last}]")

    @property
    def size(self) -> int:
        return self.last - self.n + 1

    def indices(self):
        return range(self.n, self.last + 1)


@dataclass(frozen=True)
class ProjectionBound:
    """delta_b bound with the amplification diagnostics that produced it."""

    delta_b: Interval
    tau: Interval
    tau_h: Interval
    xi: Interval
    beta_amp: Interval


@dataclass
class SubspaceErrorBounds:
    """Collected distance and orthonormal-correction bounds for one cluster."""

    delta_b: Interval
    delta_a: Interval | None = None
    bar_delta_a: Interval | None = None
    bar_delta_b: Interval | None = None
    err_star_a: Interval | None = None
    err_star_b: Interval | None = None
    tau: Interval | None = None
    tau_h: Interval | None = None
    xi: Interval | None = None
    beta_amp: Interval | None = None


def _upper(x: Interval) -> Interval:
    """Distances are nonnegative; keep only the informative upper end."""
    return Interval(0.0, max(x.hi, 0.0))


def delta_b_projection_detailed(
    cluster: Cluster,
    lambda_bounds: EigenBounds,
    discrete: DiscreteEigenSystem,
    c_cg: Interval,
) -> ProjectionBound:
    """Projection-based delta_b(E_k, E_hat_k) for a conforming discrete basis.

    Needs the discrete eigenvalue adjacent to the cluster on each existing
    side; the separation ratios tau, tau_h are maximized at those adjacent
    values by monotonicity, so no further spectrum is required.
    """
    n, last = cluster.n, cluster.last
    if cluster.size < 2:
        # the stated applicability condition tau_h xi < 1 - 1/sqrt(|J|) is
        # empty for |J| = 1; use the Rayleigh-quotient route instead
        raise GapTooSmall("projection bound not applicable to singleton clusters")
    if lambda_bounds.k_max < last:
        raise GapTooSmall("cluster extends past the available bounds")
    if discrete.k <= last:
        raise GapTooSmall("need the discrete eigenvalue just above the cluster")
    hat = eigenvalue_intervals(discrete)
    lam_j = Interval(lambda_bounds.lower[n - 1], lambda_bounds.upper[last - 1])

    # lambda/(lambda - a) and a/(lambda - a) are monotone in lambda on the
    # cluster range, so each ratio peaks at a known endpoint
    quotients_tau = []
    quotients_tau_h = []
    if n > 1:
        below = hat[n - 2]
        if below.hi >= lam_j.lo:
            raise GapTooSmall("no verified gap below the cluster")
        lam_lo = Interval.point(lam_j.lo)
        quotients_tau.append(lam_lo / (lam_lo - below))
        quotients_tau_h.append(below / (lam_lo - below))
    above = hat[last]
    if above.lo <= lam_j.hi:
        raise GapTooSmall("no verified gap above the cluster")
    lam_hi = Interval.point(lam_j.hi)
    quotients_tau.append(lam_hi / (above - lam_hi))
    quotients_tau_h.append(above / (above - lam_hi))

    tau = Interval(0.0, max(q.hi for q in quotients_tau))
    tau_h = Interval(0.0, max(q.hi for q in quotients_tau_h))

    lam_top = Interval.point(lambda_bounds.upper[last - 1])
    base = _upper(lam_top * c_cg.sq())

    size_term = 1.0 - (1.0 / Interval.point(float(cluster.size))).sqrt()

    def amplification(xi: Interval) -> Interval:
        margin = 1.0 - tau_h * xi
        if (tau_h * xi).hi >= size_term.lo:
            raise GapTooSmall("tau_h * xi violates the applicability condition")
        return tau / margin

    beta0 = amplification(base)
    xi = _upper((1.0 + beta0) * base)
    beta = amplification(xi)
    delta = _upper((1.0 + beta) * base)
    return ProjectionBound(delta, tau, tau_h, xi, _upper(beta))


def delta_b_projection(
    cluster: Cluster,
    lambda_bounds: EigenBounds,
    discrete: DiscreteEigenSystem,
    c_cg: Interval,
) -> Interval:
    return delta_b_projection_detailed(cluster, lambda_bounds, discrete, c_cg).delta_b


@dataclass(frozen=True)
class ClusterApproxData:
    """Inputs of the recursive Rayleigh-quotient bound for one cluster.

    lam_hat_last must enclose the top Rayleigh quotient over the whole
    approximating span (the largest Ritz value), which per-vector quotients
    of an arbitrary basis can underestimate; for a basis of discrete
    eigenvectors the two coincide.

    hat_gap optionally supplies a tight enclosure of lambda_hat_N - lambda_n
    for callers that can evaluate the difference without decorrelating the
    two enclosures (e.g. multiplicative perturbations of a known multiple
    eigenvalue); by default it is the plain interval difference.
    """

    cluster: Cluster
    lam_n: Interval
    lam_last: Interval
    lam_hat_last: Interval
    rho: Interval
    hat_gap: Interval | None = None
    eps_a: tuple[Interval, ...] = field(default=())
    eps_b: tuple[Interval, ...] = field(default=())


def delta_bounds_recursive(
    clusters: list[ClusterApproxData],
) -> list[tuple[Interval, Interval]]:
    """Per-cluster (delta_a, delta_b) bounds, processed bottom-up.

    Each cluster's theta terms use the delta bounds of all preceding
    clusters together with the supplied non-orthogonality measures (which
    default to zero when omitted, appropriate e.g. for exactly orthogonal
    approximating families).
    """
    results: list[tuple[Interval, Interval]] = []
    zero = Interval.point(0.0)
    for k, data in enumerate(clusters):
        rho, lam_n = data.rho, data.lam_n
        denom = rho - lam_n
        if denom.lo <= 0.0:
            raise GapTooSmall(f"shift rho does not clear lambda_n for cluster {k}")
        hat_gap = (
            data.hat_gap if data.hat_gap is not None else data.lam_hat_last - lam_n
        )

        theta_a = zero
        theta_b = zero
        for l in range(k):
            eps_a = data.eps_a[l] if l < len(data.eps_a) else zero
            eps_b = data.eps_b[l] if l < len(data.eps_b) else zero
            d_a, d_b = results[l]
            lam_nl = clusters[l].lam_n
            weight = rho - lam_nl
            theta_a = theta_a + _upper(weight / lam_nl) * (eps_a + d_a).sq()
            theta_b = theta_b + _upper(weight) * (eps_b + d_b).sq()

        num_b = hat_gap + theta_b
        delta_b = Interval(0.0, max(num_b.hi, 0.0) / denom.lo).sqrt()

        lam_hat = data.lam_hat_last
        num_a = rho * hat_gap + lam_n * lam_hat * theta_a
        den_a = lam_hat * denom
        if den_a.lo <= 0.0:
            raise GapTooSmall(f"nonpositive Rayleigh quotient for cluster {k}")
        delta_a = Interval(0.0, max(num_a.hi, 0.0) / den_a.lo).sqrt()
        results.append((delta_a, delta_b))
    return results


def delta_a_from_b(
    lam_n: Interval,
    lam_last: Interval,
    lam_hat_last: Interval,
    delta_b: Interval,
    *,
    gap_last_n: Interval | None = None,
    gap_hat_n: Interval | None = None,
) -> tuple[Interval, Interval]:
    """(delta_a, bar_delta_a) from delta_b.

    bar_delta_a^2 <= lambda_N + lambda_hat_N - 2 lambda_n sqrt(1 - delta_b^2)
    is evaluated in the algebraically identical split
    (lambda_N - lambda_n) + (lambda_hat_N - lambda_n)
    + 2 lambda_n (1 - sqrt(1 - delta_b^2)), so callers holding tight
    enclosures of the two gaps (gap_last_n, gap_hat_n) avoid decorrelation.
    """
    if delta_b.hi >= 1.0:
        raise InvalidDeltaB(f"delta_b bound {delta_b.hi} >= 1")
    one_minus = _clamped(1.0 - delta_b.sq())
    ratio = one_minus / (lam_last * lam_hat_last)
    d_a_sq = 2.0 - 2.0 * (lam_n * ratio.sqrt())
    delta_a = _clamped(d_a_sq).sqrt()

    g1 = gap_last_n if gap_last_n is not None else lam_last - lam_n
    g2 = gap_hat_n if gap_hat_n is not None else lam_hat_last - lam_n
    bar_sq = g1 + g2 + 2.0 * (lam_n * (1.0 - one_minus.sqrt()))
    bar_delta_a = _clamped(bar_sq).sqrt()
    return delta_a, bar_delta_a


def _clamped(x: Interval) -> Interval:
    return Interval(max(x.lo, 0.0), max(x.hi, 0.0))


def bar_delta_b(delta_b: Interval) -> Interval:
    """Unit-norm-constrained L2 distance: sqrt(2 - 2 sqrt(1 - delta_b^2)).

    The result is intersected with sqrt(2) * delta_b, which dominates the
    same quantity (since sqrt(1 - x^2) >= 1 - x^2) and stays tight where the
    closed form would take a square root of pure rounding noise.
    """
    if delta_b.hi > 1.0:
        raise InvalidDeltaB(f"delta_b bound {delta_b.hi} > 1")
    val = _clamped(2.0 - 2.0 * _clamped(1.0 - delta_b.sq()).sqrt()).sqrt()
    cheap = _SQRT2 * abs(delta_b)
    return Interval(min(val.lo, cheap.lo), min(val.hi, cheap.hi, _SQRT2.hi))


def orthonormal_correction(
    delta_b: Interval,
    lam_first: Interval,
    lam_last: Interval,
    lam_last_h: Interval,
) -> tuple[Interval, Interval]:
    """(err_star_a, err_star_b) of the Gram-Schmidt orthonormal basis.

    err_star_b = 2 delta_b (2 - delta_b) / (1 - 2 delta_b) bounds the L2
    error vector by vector; err_star_a lifts it to the energy norm through
    the cluster's eigenvalue enclosures and the top discrete Rayleigh
    quotient lam_last_h.  Requires delta_b < 1/2.
    """
    if delta_b.hi >= 0.5:
        raise DeltaTooLarge(f"delta_b bound {delta_b.hi} >= 1/2")
    den = 1.0 - 2.0 * delta_b
    err_b = _upper((2.0 * delta_b * (2.0 - delta_b)) / den)
    err_a = _clamped(lam_last * err_b + (lam_last_h - lam_first)).sqrt()
    return _upper(err_a), err_b


def linear_independence_check(bar_db: Interval, cluster_size: int) -> bool:
    """True iff 2 * size * bar_delta_b < 1 holds verifiably."""
    return (2.0 * float(cluster_size) * bar_db).hi < 1.0


# -- discrete non-orthogonality measures -----------------------------------


def _norm_gram(block_a: np.ndarray, block_b: np.ndarray, mat) -> float:
    cross = block_a.T @ (mat @ block_b)
    ga = block_a.T @ (mat @ block_a)
    gb = block_b.T @ (mat @ block_b)
    denom = np.sqrt(
        np.linalg.eigvalsh(ga)[0] * np.linalg.eigvalsh(gb)[0]
    )
    return float(np.linalg.norm(cross, 2) / denom)


def nonorthogonality(
    block_a: np.ndarray,
    block_b: np.ndarray,
    mass,
    stiffness,
    slack: float = 1e-11,
) -> tuple[Interval, Interval]:
    """(eps_hat_a, eps_hat_b) between two discrete cluster bases.

    Computed from stiffness/mass Gram matrices of the blocks and inflated by
    an absolute slack covering the floating-point evaluation.
    """
    eps_b = _norm_gram(block_a, block_b, mass)
    eps_a = _norm_gram(block_a, block_b, stiffness)
    return (
        Interval(0.0, eps_a + slack),
        Interval(0.0, eps_b + slack),
    )
