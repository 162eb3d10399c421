"""Exact arithmetic in the real field Q(sqrt3, sqrt5) and its complex plane.

Every coefficient appearing in the built-in tiling systems lives in the
4-dimensional vector space over Q spanned by {1, sqrt3, sqrt5, sqrt15}:
the golden mean and its inverse square, the rotation by pi/3, and all
translation vectors.  Keeping coordinates rational makes every geometric
predicate decidable; floats are derived views for rendering and metric
estimates, never inputs to a decision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

Rational = Fraction

_SQRT_FLOAT = {3: math.sqrt(3.0), 5: math.sqrt(5.0), 15: math.sqrt(15.0)}


def _root_bounds(n: int, bits: int) -> tuple[Fraction, Fraction]:
    """Rational enclosure of sqrt(n) of width 2**-bits."""
    s = isqrt(n << (2 * bits))
    return Fraction(s, 1 << bits), Fraction(s + 1, 1 << bits)


def _as_fraction(value) -> Fraction | None:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    return None


@dataclass(frozen=True, slots=True)
class QuarticScalar:
    """Field element a + b*sqrt3 + c*sqrt5 + d*sqrt15 with rational coordinates.

    The basis {1, sqrt3, sqrt5, sqrt15} is linearly independent over Q, so an
    element is zero exactly when all four coordinates are zero, and equality
    is coordinate-wise.  Values are immutable and hashable.
    """

    a: Fraction = Fraction(0)
    b: Fraction = Fraction(0)
    c: Fraction = Fraction(0)
    d: Fraction = Fraction(0)

    def __post_init__(self):
        for name in ("a", "b", "c", "d"):
            v = getattr(self, name)
            if not isinstance(v, Fraction):
                object.__setattr__(self, name, Fraction(v))

    # -- ring structure ----------------------------------------------------

    def __add__(self, other) -> "QuarticScalar":
        o = _as_quartic(other)
        if o is None:
            return NotImplemented
        return QuarticScalar(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)

    __radd__ = __add__

    def __sub__(self, other) -> "QuarticScalar":
        o = _as_quartic(other)
        if o is None:
            return NotImplemented
        return QuarticScalar(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)

    def __rsub__(self, other) -> "QuarticScalar":
        o = _as_quartic(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self) -> "QuarticScalar":
        return QuarticScalar(-self.a, -self.b, -self.c, -self.d)

    def __mul__(self, other) -> "QuarticScalar":
        o = _as_quartic(other)
        if o is None:
            return NotImplemented
        a1, b1, c1, d1 = self.a, self.b, self.c, self.d
        a2, b2, c2, d2 = o.a, o.b, o.c, o.d
        return QuarticScalar(
            a1 * a2 + 3 * b1 * b2 + 5 * c1 * c2 + 15 * d1 * d2,
            a1 * b2 + b1 * a2 + 5 * (c1 * d2 + d1 * c2),
            a1 * c2 + c1 * a2 + 3 * (b1 * d2 + d1 * b2),
            a1 * d2 + d1 * a2 + b1 * c2 + c1 * b2,
        )

    __rmul__ = __mul__

    def __truediv__(self, other) -> "QuarticScalar":
        o = _as_quartic(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other) -> "QuarticScalar":
        o = _as_quartic(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, exponent: int) -> "QuarticScalar":
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = Q_ONE
        base = self
        n = exponent
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- conjugation and inversion ------------------------------------------

    def conj_sqrt3(self) -> "QuarticScalar":
        """Galois conjugate sending sqrt3 to -sqrt3."""
        return QuarticScalar(self.a, -self.b, self.c, -self.d)

    def conj_sqrt5(self) -> "QuarticScalar":
        """Galois conjugate sending sqrt5 to -sqrt5."""
        return QuarticScalar(self.a, self.b, -self.c, -self.d)

    def inverse(self) -> "QuarticScalar":
        """Multiplicative inverse via the product of Galois conjugates."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero field element")
        y = self.conj_sqrt3() * self.conj_sqrt5() * self.conj_sqrt3().conj_sqrt5()
        norm = self * y
        if norm.b or norm.c or norm.d:
            raise AssertionError("field norm must be rational")
        n = norm.a
        return QuarticScalar(y.a / n, y.b / n, y.c / n, y.d / n)

    # -- order structure -----------------------------------------------------

    def is_zero(self) -> bool:
        return not (self.a or self.b or self.c or self.d)

    def is_rational(self) -> bool:
        return not (self.b or self.c or self.d)

    def is_integer(self) -> bool:
        return self.is_rational() and self.a.denominator == 1

    def interval(self, bits: int) -> tuple[Fraction, Fraction]:
        """Rational enclosure of the real value, width about 2**-bits scaled."""
        lo = self.a
        hi = self.a
        for coef, root in ((self.b, 3), (self.c, 5), (self.d, 15)):
            if not coef:
                continue
            rl, rh = _root_bounds(root, bits)
            p, q = coef * rl, coef * rh
            if p > q:
                p, q = q, p
            lo += p
            hi += q
        return lo, hi

    def sign(self) -> int:
        """Exact sign, -1, 0 or +1.

        Zero is decided by the coordinate test; otherwise the enclosing
        rational interval is refined (doubling precision) until it excludes
        zero, which terminates because nonzero elements are bounded away
        from zero.
        """
        if self.is_zero():
            return 0
        bits = 32
        while True:
            lo, hi = self.interval(bits)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            bits *= 2

    def __lt__(self, other):
        o = _as_quartic(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() < 0

    def __le__(self, other):
        o = _as_quartic(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() <= 0

    def __gt__(self, other):
        o = _as_quartic(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() > 0

    def __ge__(self, other):
        o = _as_quartic(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() >= 0

    def __abs__(self) -> "QuarticScalar":
        return -self if self.sign() < 0 else self

    # -- floating views -------------------------------------------------------

    def __float__(self) -> float:
        # Fast evaluation for rendering and metrics; good to an ulp or two.
        return (
            float(self.a)
            + float(self.b) * _SQRT_FLOAT[3]
            + float(self.c) * _SQRT_FLOAT[5]
            + float(self.d) * _SQRT_FLOAT[15]
        )

    def approx_fraction(self, bits: int) -> Fraction:
        """Rational approximation with relative error at most 2**-bits."""
        if self.is_zero():
            return Fraction(0)
        prec = max(bits + 8, 32)
        while True:
            lo, hi = self.interval(prec)
            if lo > 0 or hi < 0:
                bound = min(abs(lo), abs(hi))
                if hi - lo <= Fraction(1, 1 << bits) * bound:
                    return (lo + hi) / 2
            prec *= 2

    def __str__(self) -> str:
        parts = [str(self.a)]
        for coef, label in ((self.b, "r3"), (self.c, "r5"), (self.d, "r15")):
            sign = "-" if coef < 0 else "+"
            parts.append(f"{sign} {abs(coef)}*{label}")
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"Q({self})"


def _as_quartic(value) -> QuarticScalar | None:
    if isinstance(value, QuarticScalar):
        return value
    f = _as_fraction(value)
    if f is None:
        return None
    return QuarticScalar(f)


def float_approx(x: QuarticScalar, precision: int = 53) -> float:
    """Floating value of x with relative error at most 2**(1-precision).

    Precision counts bits and must be at least 53; the final rounding to a
    binary64 never costs more than the budget leaves.
    """
    if precision < 53:
        raise ValueError("precision must be at least 53 bits")
    if x.is_zero():
        return 0.0
    return float(x.approx_fraction(precision))


def sign(x: QuarticScalar) -> int:
    return x.sign()


_FIB_CACHE = [0, 1]


def fib(n: int) -> int:
    """Fibonacci number with fib(1) = fib(2) = 1 and fib(0) = 0."""
    if n < 0:
        raise ValueError("negative Fibonacci index")
    while len(_FIB_CACHE) <= n:
        _FIB_CACHE.append(_FIB_CACHE[-1] + _FIB_CACHE[-2])
    return _FIB_CACHE[n]


Q_ZERO = QuarticScalar()
Q_ONE = QuarticScalar(Fraction(1))
Q_HALF = QuarticScalar(Fraction(1, 2))
SQRT3 = QuarticScalar(0, Fraction(1), 0, 0)
SQRT5 = QuarticScalar(0, 0, Fraction(1), 0)
SQRT15 = QuarticScalar(0, 0, 0, Fraction(1))

#: golden mean (1 + sqrt5) / 2
GOLDEN_MEAN = QuarticScalar(Fraction(1, 2), 0, Fraction(1, 2), 0)
#: inverse square of the golden mean, (3 - sqrt5) / 2, the hat contraction
GOLDEN_CONTRACTION = QuarticScalar(Fraction(3, 2), 0, Fraction(-1, 2), 0)


@dataclass(frozen=True, slots=True)
class PlanePoint:
    """Point of the plane, a complex number with QuarticScalar coordinates."""

    re: QuarticScalar = Q_ZERO
    im: QuarticScalar = Q_ZERO

    def __post_init__(self):
        for name in ("re", "im"):
            v = getattr(self, name)
            if not isinstance(v, QuarticScalar):
                q = _as_quartic(v)
                if q is None:
                    raise TypeError(f"cannot build coordinate from {v!r}")
                object.__setattr__(self, name, q)

    def __add__(self, other: "PlanePoint") -> "PlanePoint":
        if not isinstance(other, PlanePoint):
            return NotImplemented
        return PlanePoint(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "PlanePoint") -> "PlanePoint":
        if not isinstance(other, PlanePoint):
            return NotImplemented
        return PlanePoint(self.re - other.re, self.im - other.im)

    def __neg__(self) -> "PlanePoint":
        return PlanePoint(-self.re, -self.im)

    def __mul__(self, other) -> "PlanePoint":
        """Complex product with a PlanePoint, or scaling by a field element."""
        if isinstance(other, PlanePoint):
            return PlanePoint(
                self.re * other.re - self.im * other.im,
                self.re * other.im + self.im * other.re,
            )
        q = _as_quartic(other)
        if q is None:
            return NotImplemented
        return PlanePoint(self.re * q, self.im * q)

    __rmul__ = __mul__

    def conjugate(self) -> "PlanePoint":
        return PlanePoint(self.re, -self.im)

    def rotate(self, sextant: int) -> "PlanePoint":
        """Rotation by sextant * pi/3 about the origin."""
        return self * ROT[sextant % 6]

    def is_zero(self) -> bool:
        return self.re.is_zero() and self.im.is_zero()

    def norm_sq(self) -> QuarticScalar:
        return self.re * self.re + self.im * self.im

    def approx(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __str__(self) -> str:
        return f"{self.re},{self.im}"

    def __repr__(self) -> str:
        return f"P({self.re} | {self.im})"


P_ZERO = PlanePoint()
P_ONE = PlanePoint(Q_ONE)
P_I = PlanePoint(Q_ZERO, Q_ONE)

_HALF = Fraction(1, 2)
#: unit vectors e**(i k pi / 3) for k = 0..5
ROT = (
    PlanePoint(QuarticScalar(Fraction(1)), Q_ZERO),
    PlanePoint(QuarticScalar(_HALF), QuarticScalar(0, _HALF)),
    PlanePoint(QuarticScalar(-_HALF), QuarticScalar(0, _HALF)),
    PlanePoint(QuarticScalar(Fraction(-1)), Q_ZERO),
    PlanePoint(QuarticScalar(-_HALF), QuarticScalar(0, -_HALF)),
    PlanePoint(QuarticScalar(_HALF), QuarticScalar(0, -_HALF)),
)


def point_key(p: PlanePoint):
    """Sort key giving a deterministic total order on exact points."""
    return (
        p.re.a, p.re.b, p.re.c, p.re.d,
        p.im.a, p.im.b, p.im.c, p.im.d,
    )
