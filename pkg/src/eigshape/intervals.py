"""Outward-rounded interval arithmetic for scalars and symmetric 2x2 matrices.

Every operation returns an interval that contains the exact real result for
all choices of point operands inside the input intervals.  Rounding is
realized by widening round-to-nearest results with ``math.nextafter``: one
ulp for IEEE-correct operations (+, -, *, /, sqrt), two ulps for libm
``sin``/``cos`` (faithful to < 1 ulp on glibc/musl, which this package
assumes; the extra ulp is the safety margin).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DivisionByZeroInterval, NegativeSqrt, SingularEnclosure

_INF = math.inf


def _down(x: float) -> float:
    """Next float below x (identity on -inf)."""
    if x == -_INF:
        return x
    return math.nextafter(x, -_INF)


def _up(x: float) -> float:
    """Next float above x (identity on +inf)."""
    if x == _INF:
        return x
    return math.nextafter(x, _INF)


def _down2(x: float) -> float:
    return _down(_down(x))


def _up2(x: float) -> float:
    return _up(_up(x))


# Enclosure of pi; math.pi is the nearest double to pi.
_PI = (_down(math.pi), _up(math.pi))


@dataclass(frozen=True)
class Interval:
    """Closed interval [lo, hi] of reals, lo <= hi."""

    lo: float
    hi: float

    def __post_init__(self):
        if type(self.lo) is not float:
            object.__setattr__(self, "lo", float(self.lo))
        if type(self.hi) is not float:
            object.__setattr__(self, "hi", float(self.hi))
        if math.isnan(self.lo) or math.isnan(self.hi):
            raise ValueError("NaN endpoint in interval")
        if self.lo > self.hi:
            raise ValueError(f"inverted interval [{self.lo}, {self.hi}]")

    # -- constructors -------------------------------------------------

    @staticmethod
    def point(x: float) -> "Interval":
        """Interval holding the single float x (x taken as exact)."""
        return Interval(float(x), float(x))

    @staticmethod
    def pi() -> "Interval":
        return Interval(*_PI)

    @staticmethod
    def hull_of(*values: float) -> "Interval":
        return Interval(min(values), max(values))

    # -- predicates / accessors ---------------------------------------

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def encloses(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def intersects(self, other: "Interval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mag(self) -> float:
        """max |x| over the interval."""
        return max(abs(self.lo), abs(self.hi))

    @property
    def mig(self) -> float:
        """min |x| over the interval (0 if it straddles zero)."""
        if self.lo <= 0.0 <= self.hi:
            return 0.0
        return min(abs(self.lo), abs(self.hi))

    def __repr__(self):
        return f"Interval({self.lo!r}, {self.hi!r})"

    # -- lattice ops ----------------------------------------------------

    def hull(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def intersect(self, other: "Interval") -> "Interval":
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        if lo > hi:
            raise ValueError("empty intersection")
        return Interval(lo, hi)

    # -- arithmetic -----------------------------------------------------

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def _is_zero(self) -> bool:
        return self.lo == 0.0 and self.hi == 0.0

    def __add__(self, other) -> "Interval":
        o = _coerce(other)
        if o._is_zero():
            return self
        if self._is_zero():
            return o
        return Interval(_down(self.lo + o.lo), _up(self.hi + o.hi))

    __radd__ = __add__

    def __sub__(self, other) -> "Interval":
        o = _coerce(other)
        if o._is_zero():
            return self
        return Interval(_down(self.lo - o.hi), _up(self.hi - o.lo))

    def __rsub__(self, other) -> "Interval":
        return _coerce(other) - self

    def __mul__(self, other) -> "Interval":
        o = _coerce(other)
        if self._is_zero() or o._is_zero():
            return Interval(0.0, 0.0)
        products = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return Interval(_down(min(products)), _up(max(products)))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Interval":
        o = _coerce(other)
        if o.lo <= 0.0 <= o.hi:
            raise DivisionByZeroInterval(f"divisor {o} contains zero")
        quotients = (self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi)
        return Interval(_down(min(quotients)), _up(max(quotients)))

    def __rtruediv__(self, other) -> "Interval":
        return _coerce(other) / self

    def sq(self) -> "Interval":
        """x^2 evaluated as a single-variable function (tighter than x*x)."""
        if self._is_zero():
            return self
        lo_m, hi_m = abs(self.lo), abs(self.hi)
        hi = _up(max(lo_m, hi_m) ** 2)
        if self.lo <= 0.0 <= self.hi:
            return Interval(0.0, hi)
        return Interval(max(0.0, _down(min(lo_m, hi_m) ** 2)), hi)

    def sqrt(self) -> "Interval":
        """Enclosure of sqrt over the nonnegative part of the interval.

        A negative lower endpoint is clamped to zero when the interval reaches
        zero or above (rounding artifacts of provably nonnegative quantities);
        an interval entirely below zero raises NegativeSqrt.
        """
        if self.hi < 0.0:
            raise NegativeSqrt(f"sqrt of {self}")
        lo = max(self.lo, 0.0)
        return Interval(max(0.0, _down(math.sqrt(lo))), _up(math.sqrt(self.hi)))

    def __abs__(self) -> "Interval":
        return Interval(self.mig, self.mag)


def _coerce(x) -> Interval:
    if isinstance(x, Interval):
        return x
    if isinstance(x, (int, float)):
        return Interval.point(float(x))
    raise TypeError(f"cannot mix Interval with {type(x).__name__}")


# -- trigonometric enclosures ------------------------------------------


def _trig_extrema(lo: float, hi: float, offset_halfpi: int):
    """Yield True if some point x = (offset/2 + k) * pi lies in [lo, hi].

    offset_halfpi is the multiple of pi/2 at which the extremum sits
    (1 -> pi/2 + 2k*pi handled by caller via step 2).  Containment is
    checked conservatively against the pi enclosure, so a point that merely
    touches the interval within rounding is treated as inside.
    """
    # Solve lo <= (offset/2 + 2k) * pi <= hi for integer k, conservatively.
    pi_lo, pi_hi = _PI
    base = offset_halfpi / 2.0
    k_min = math.floor(lo / (2.0 * pi_hi) - base / 2.0) - 1
    k_max = math.ceil(hi / (2.0 * pi_lo) - base / 2.0) + 1
    for k in range(k_min, k_max + 1):
        c = base + 2.0 * k
        x_lo = c * pi_lo if c >= 0 else c * pi_hi
        x_hi = c * pi_hi if c >= 0 else c * pi_lo
        if x_hi >= lo and x_lo <= hi:
            return True
    return False


def sin(x: Interval) -> Interval:
    """Enclosure of sin over x."""
    if x.width > 1e9 or x.mag > 1e12:
        return Interval(-1.0, 1.0)
    vals = (math.sin(x.lo), math.sin(x.hi))
    lo, hi = _down2(min(vals)), _up2(max(vals))
    if _trig_extrema(x.lo, x.hi, 1):  # pi/2 + 2k*pi
        hi = 1.0
    if _trig_extrema(x.lo, x.hi, 3):  # 3*pi/2 + 2k*pi
        lo = -1.0
    return Interval(max(lo, -1.0), min(hi, 1.0))


def cos(x: Interval) -> Interval:
    """Enclosure of cos over x."""
    if x.width > 1e9 or x.mag > 1e12:
        return Interval(-1.0, 1.0)
    vals = (math.cos(x.lo), math.cos(x.hi))
    lo, hi = _down2(min(vals)), _up2(max(vals))
    if _trig_extrema(x.lo, x.hi, 0):  # 2k*pi
        hi = 1.0
    if _trig_extrema(x.lo, x.hi, 2):  # pi + 2k*pi
        lo = -1.0
    return Interval(max(lo, -1.0), min(hi, 1.0))


def cot(x: Interval) -> Interval:
    """Enclosure of cos/sin; requires the sin enclosure to exclude zero."""
    return cos(x) / sin(x)


def tan(x: Interval) -> Interval:
    return sin(x) / cos(x)


# -- symmetric 2x2 interval matrices -------------------------------------


@dataclass(frozen=True)
class IntervalSymMatrix:
    """Symmetric 2x2 matrix with interval entries (a12 shared off-diagonal)."""

    a11: Interval
    a12: Interval
    a22: Interval

    @staticmethod
    def point(a11: float, a12: float, a22: float) -> "IntervalSymMatrix":
        return IntervalSymMatrix(Interval.point(a11), Interval.point(a12), Interval.point(a22))

    @staticmethod
    def identity() -> "IntervalSymMatrix":
        return IntervalSymMatrix.point(1.0, 0.0, 1.0)

    def contains_point(self, a11: float, a12: float, a22: float) -> bool:
        return (
            self.a11.contains(a11)
            and self.a12.contains(a12)
            and self.a22.contains(a22)
        )

    def hull(self, other: "IntervalSymMatrix") -> "IntervalSymMatrix":
        return IntervalSymMatrix(
            self.a11.hull(other.a11), self.a12.hull(other.a12), self.a22.hull(other.a22)
        )

    def __add__(self, other: "IntervalSymMatrix") -> "IntervalSymMatrix":
        return IntervalSymMatrix(
            self.a11 + other.a11, self.a12 + other.a12, self.a22 + other.a22
        )

    def __sub__(self, other: "IntervalSymMatrix") -> "IntervalSymMatrix":
        return IntervalSymMatrix(
            self.a11 - other.a11, self.a12 - other.a12, self.a22 - other.a22
        )

    def scale(self, s) -> "IntervalSymMatrix":
        return IntervalSymMatrix(self.a11 * s, self.a12 * s, self.a22 * s)

    def eig_bounds(self) -> tuple[Interval, Interval]:
        """Intervals enclosing the (sorted) eigenvalues of every point matrix.

        Closed form tr/2 -+ sqrt(((a11-a22)/2)^2 + a12^2) evaluated with
        interval arithmetic.
        """
        mid = (self.a11 + self.a22) * 0.5
        rad = (((self.a11 - self.a22) * 0.5).sq() + self.a12.sq()).sqrt()
        return mid - rad, mid + rad

    def midpoint(self):
        return self.a11.mid, self.a12.mid, self.a22.mid


def frobenius_upper(a: IntervalSymMatrix) -> float:
    """Upper bound of the Frobenius norm over all point matrices in a."""
    s = (
        Interval(0.0, a.a11.mag).sq()
        + Interval(0.0, a.a12.mag).sq() * 2.0
        + Interval(0.0, a.a22.mag).sq()
    )
    return s.sqrt().hi


def spectral_upper(a: IntervalSymMatrix) -> float:
    """Upper bound of the spectral norm (max |eigenvalue|) over a."""
    lo_eig, hi_eig = a.eig_bounds()
    return max(abs(lo_eig.lo), abs(hi_eig.hi))


def inverse_2x2(a: IntervalSymMatrix) -> IntervalSymMatrix:
    """Interval enclosure of the inverses of all point matrices in a.

    Cramer's rule with interval arithmetic; the determinant enclosure must
    exclude zero.
    """
    det = a.a11 * a.a22 - a.a12.sq()
    if det.contains(0.0):
        raise SingularEnclosure(f"determinant enclosure {det} contains zero")
    return IntervalSymMatrix(a.a22 / det, -(a.a12 / det), a.a11 / det)
