"""Parametrized triangles, affine maps between them, and perturbation matrices.

A shape parameter p = (r, theta) describes the triangle with vertices
O = (0, 0), A = (1, 0), B = (r cos theta, r sin theta).  The admissible set
is r > 0, 0 < theta < pi; theta >= math.pi is rejected (the closest double
below pi is accepted, anything at or above is numerically degenerate).

The upper-triangular map Q = [[1, alpha], [0, beta]] carries one triangle
onto another; its QQ^T spectrum controls how Rayleigh quotients (hence
eigenvalues) transform.  The perturbation matrix of a parameter shift t*e is
(S_t^{-1} S_t^{-T} - I)/t, with verified closed forms for the two coordinate
directions.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from . import intervals as iv
from .errors import DegenerateShape
from .intervals import Interval, IntervalSymMatrix


class Direction(enum.Enum):
    """Unit perturbation directions with verified closed forms.

    R shrinks the side length r, THETA closes the angle theta (both move the
    parameter down, matching the sign conventions of the closed forms).
    """

    R = (-1.0, 0.0)
    THETA = (0.0, -1.0)

    @property
    def vector(self) -> tuple[float, float]:
        return self.value


@dataclass(frozen=True)
class ShapeParam:
    """Triangle parameter p = (r, theta)."""

    r: float
    theta: float

    def __post_init__(self):
        if not (math.isfinite(self.r) and math.isfinite(self.theta)):
            raise DegenerateShape(f"non-finite parameters ({self.r}, {self.theta})")
        if self.r <= 0.0:
            raise DegenerateShape(f"side length r = {self.r} must be positive")
        if not (0.0 < self.theta < math.pi):
            raise DegenerateShape(f"angle theta = {self.theta} outside (0, pi)")

    def shifted(self, e: Direction, t: float) -> "ShapeParam":
        """Parameter p + t*e (raises DegenerateShape if it leaves the region)."""
        e1, e2 = e.vector
        return ShapeParam(self.r + t * e1, self.theta + t * e2)


@dataclass(frozen=True)
class Triangle:
    """Vertex triple of T^p, counterclockwise."""

    o: tuple[float, float]
    a: tuple[float, float]
    b: tuple[float, float]

    @property
    def signed_area(self) -> float:
        (ox, oy), (ax, ay), (bx, by) = self.o, self.a, self.b
        return 0.5 * ((ax - ox) * (by - oy) - (bx - ox) * (ay - oy))

    def edge_lengths(self) -> tuple[float, float, float]:
        """Lengths (|OA|, |OB|, |AB|)."""
        (ox, oy), (ax, ay), (bx, by) = self.o, self.a, self.b
        return (
            math.hypot(ax - ox, ay - oy),
            math.hypot(bx - ox, by - oy),
            math.hypot(bx - ax, by - ay),
        )

    @property
    def longest_edge(self) -> float:
        return max(self.edge_lengths())


def triangle_of(p: ShapeParam) -> Triangle:
    """Vertices of T^p."""
    return Triangle(
        o=(0.0, 0.0),
        a=(1.0, 0.0),
        b=(p.r * math.cos(p.theta), p.r * math.sin(p.theta)),
    )


def longest_edge_upper(p: ShapeParam) -> float:
    """Rigorous upper bound for the longest edge of T^p."""
    r = Interval.point(p.r)
    th = Interval.point(p.theta)
    ab_sq = r.sq() - 2.0 * (r * iv.cos(th)) + 1.0
    ab = Interval(max(0.0, ab_sq.lo), ab_sq.hi).sqrt()
    return max(1.0, p.r * (1.0 + 1e-15), ab.hi)


@dataclass(frozen=True)
class SymMatrix2:
    """Plain symmetric 2x2 matrix (floating point)."""

    a11: float
    a12: float
    a22: float

    @property
    def spectral_norm(self) -> float:
        mid = 0.5 * (self.a11 + self.a22)
        rad = math.hypot(0.5 * (self.a11 - self.a22), self.a12)
        return max(abs(mid - rad), abs(mid + rad))

    def eigenvalues(self) -> tuple[float, float]:
        mid = 0.5 * (self.a11 + self.a22)
        rad = math.hypot(0.5 * (self.a11 - self.a22), self.a12)
        return mid - rad, mid + rad

    def to_interval(self) -> IntervalSymMatrix:
        return IntervalSymMatrix.point(self.a11, self.a12, self.a22)


@dataclass(frozen=True)
class AffineMap:
    """Shear/scale map Q = [[1, alpha], [0, beta]] with beta > 0."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.beta > 0.0 and math.isfinite(self.beta) and math.isfinite(self.alpha)):
            raise DegenerateShape(f"invalid map (alpha={self.alpha}, beta={self.beta})")

    @property
    def gamma(self) -> float:
        return self.alpha * self.alpha + self.beta * self.beta + 1.0

    @property
    def lambda_min_qqt(self) -> float:
        return qq_spectrum(self)[0]

    @property
    def lambda_max_qqt(self) -> float:
        return qq_spectrum(self)[1]

    def apply(self, xy: tuple[float, float]) -> tuple[float, float]:
        x, y = xy
        return (x + self.alpha * y, self.beta * y)


def transform_between(p: ShapeParam, q: ShapeParam) -> AffineMap:
    """Map carrying T^p onto T^q (fixes O and A, sends B(p) to B(q))."""
    s = p.r * math.sin(p.theta)
    return AffineMap(
        alpha=(q.r * math.cos(q.theta) - p.r * math.cos(p.theta)) / s,
        beta=(q.r * math.sin(q.theta)) / s,
    )


def interval_transform(
    p_r: Interval, p_theta: Interval, q_r: Interval, q_theta: Interval
) -> tuple[Interval, Interval]:
    """Interval (alpha, beta) of the maps T^p -> T^q over parameter boxes."""
    s = p_r * iv.sin(p_theta)
    if s.lo <= 0.0:
        raise DegenerateShape("source triangle family touches the degenerate boundary")
    alpha = (q_r * iv.cos(q_theta) - p_r * iv.cos(p_theta)) / s
    beta = (q_r * iv.sin(q_theta)) / s
    if beta.lo <= 0.0:
        raise DegenerateShape("target triangle family touches the degenerate boundary")
    return alpha, beta


def qq_spectrum(m: AffineMap) -> tuple[float, float]:
    """Eigenvalues (min, max) of QQ^T via the gamma closed form.

    The discriminant gamma^2 - 4 beta^2 factors as
    (alpha^2 + (beta-1)^2) * (alpha^2 + (beta+1)^2), which is evaluated in
    that product form so it can never round below zero.
    """
    a2 = m.alpha * m.alpha
    disc = (a2 + (m.beta - 1.0) ** 2) * (a2 + (m.beta + 1.0) ** 2)
    root = math.sqrt(disc)
    g = m.gamma
    return 0.5 * (g - root), 0.5 * (g + root)


def qq_spectrum_interval(alpha: Interval, beta: Interval) -> tuple[Interval, Interval]:
    """Interval enclosures of the QQ^T eigenvalues over (alpha, beta) boxes."""
    a2 = alpha.sq()
    disc = (a2 + (beta - 1.0).sq()) * (a2 + (beta + 1.0).sq())
    root = disc.sqrt()
    g = a2 + beta.sq() + 1.0
    lo = (g - root) * 0.5
    hi = (g + root) * 0.5
    # lambda_min of QQ^T is positive (det = beta^2 > 0); clamp rounding dips.
    return Interval(max(lo.lo, 0.0), lo.hi), hi


def perturbation_matrix(e: Direction, p: ShapeParam, t: Interval) -> IntervalSymMatrix:
    """Enclosure of (S_t^{-1} S_t^{-T} - I)/t for all t in the given interval.

    t must satisfy 0 <= t.lo and keep p + t*e inside the admissible region.
    For t = [0, 0] the result encloses the limit matrix of the direction.
    The theta direction uses the mean-value representation with
    sin(c) = (cos(theta - t) - cos(theta))/t, c in [theta - t, theta], which
    stays finite as t -> 0; the plain closed form would divide by t.
    """
    if t.lo < 0.0:
        raise DegenerateShape(f"t range {t} extends below zero")
    r = Interval.point(p.r)
    th = Interval.point(p.theta)
    if e is Direction.R:
        if t.hi >= p.r:
            raise DegenerateShape(f"r - t hits zero for t in {t}")
        cot = iv.cot(th)
        denom = (r - t).sq()
        return IntervalSymMatrix(
            a11=(t * cot.sq()) / denom,
            a12=(r * cot) / denom,
            a22=(2.0 * r - t) / denom,
        )
    if e is Direction.THETA:
        if t.hi >= p.theta:
            raise DegenerateShape(f"theta - t hits zero for t in {t}")
        th_t = th - t
        sin_c = iv.sin(Interval(th_t.lo, th.hi))
        s2 = iv.sin(th_t).sq()
        if s2.lo <= 0.0:
            raise DegenerateShape("sin(theta - t) enclosure touches zero")
        mv = IntervalSymMatrix(
            a11=(t * sin_c.sq()) / s2,
            a12=-((sin_c * iv.sin(th)) / s2),
            a22=(sin_c * (iv.cos(th) + iv.cos(th_t))) / s2,
        )
        if t.lo > 0.0:
            # away from t = 0 the raw form is valid too and far tighter for
            # wide angles; both enclose the same matrices, so intersect
            dc = iv.cos(th) - iv.cos(th_t)
            ts2 = t * s2
            raw = IntervalSymMatrix(
                a11=dc.sq() / ts2,
                a12=(dc * iv.sin(th)) / ts2,
                a22=(iv.sin(th).sq() - iv.sin(th_t).sq()) / ts2,
            )
            mv = IntervalSymMatrix(
                mv.a11.intersect(raw.a11),
                mv.a12.intersect(raw.a12),
                mv.a22.intersect(raw.a22),
            )
        return mv
    raise ValueError(f"no verified closed form for direction {e}")


def perturbation_limit(e: Direction, p: ShapeParam) -> IntervalSymMatrix:
    """Enclosure of the t -> 0 limit matrix P^e."""
    return perturbation_matrix(e, p, Interval.point(0.0))


def perturbation_matrix_general(
    e: tuple[float, float], p: ShapeParam, t: float
) -> tuple[float, float, float]:
    """Floating-point (a11, a12, a22) of the perturbation matrix for a general
    unit direction.  Not verified; intended for exploratory evaluation only.
    """
    if t <= 0.0:
        raise ValueError("general-direction evaluation requires t > 0")
    q = ShapeParam(p.r + t * e[0], p.theta + t * e[1])
    s = transform_between(p, q)
    # S^{-1} S^{-T} = [[1 + a^2/b^2, -a/b^2], [-a/b^2, 1/b^2]]
    a, b = s.alpha, s.beta
    b2 = b * b
    return ((a * a / b2) / t, (-a / b2) / t, (1.0 / b2 - 1.0) / t)
