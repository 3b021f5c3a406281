"""Exact arithmetic on boundary values of the hyperbolic plane.

A boundary value is a point of R u {inf}: a rational, a real quadratic
surd (a + b*sqrt(d))/c, the single compactification point inf, or a
floating approximation with a tracked error bound.  Rationals and surds
are kept in a canonical form so that equality is structural and the
total order is decided by integer arithmetic alone, never by floating
comparison.  The family is closed under integer Moebius maps of
determinant one (within one quadratic field).
"""

from __future__ import annotations

import math
import re
from fractions import Fraction

__all__ = [
    "BoundaryValue",
    "Rational",
    "Surd",
    "Infinity",
    "Approx",
    "INF",
    "LESS",
    "EQUAL",
    "GREATER",
    "FieldMixError",
    "normalize_surd",
    "compare",
    "compare_detailed",
    "floor_exact",
    "parse_value",
    "emit_value",
    "from_fraction",
]

LESS, EQUAL, GREATER = -1, 0, 1


class FieldMixError(ValueError):
    """Arithmetic mixing sqrt(d1) with sqrt(d2), d1 != d2, is not supported."""


def _squarefree_split(d: int) -> tuple[int, int]:
    """Return (s, d0) with d = s*s*d0 and d0 squarefree."""
    s, d0, f = 1, d, 2
    while f * f <= d0:
        f2 = f * f
        while d0 % f2 == 0:
            d0 //= f2
            s *= f
        f += 1
    return s, d0


class BoundaryValue:
    """Base class; concrete values are Rational, Surd, Infinity, Approx."""

    __slots__ = ()

    # ordering helpers shared by all variants
    def __lt__(self, other):
        return compare(self, _coerce(other)) == LESS

    def __le__(self, other):
        return compare(self, _coerce(other)) != GREATER

    def __gt__(self, other):
        return compare(self, _coerce(other)) == GREATER

    def __ge__(self, other):
        return compare(self, _coerce(other)) != LESS

    def is_infinity(self) -> bool:
        return isinstance(self, Infinity)

    def is_rational(self) -> bool:
        return isinstance(self, Rational)

    def is_exact(self) -> bool:
        return not isinstance(self, Approx)


class Rational(BoundaryValue):
    __slots__ = ("fr",)

    def __init__(self, num, den=1):
        object.__setattr__(self, "fr", Fraction(num, den))

    def __setattr__(self, *a):
        raise AttributeError("Rational is immutable")

    @property
    def numerator(self) -> int:
        return self.fr.numerator

    @property
    def denominator(self) -> int:
        return self.fr.denominator

    def to_float(self) -> float:
        return float(self.fr)

    def __eq__(self, other):
        other = _coerce(other)
        return isinstance(other, Rational) and self.fr == other.fr

    def __hash__(self):
        return hash(("bv-rat", self.fr))

    def __repr__(self):
        return f"Rational({self.fr.numerator}/{self.fr.denominator})"

    def __neg__(self):
        return Rational(-self.fr)

    def __add__(self, other):
        other = _coerce(other)
        if isinstance(other, Rational):
            return Rational(self.fr + other.fr)
        if isinstance(other, Surd):
            return other + self
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if isinstance(other, Rational):
            return Rational(self.fr * other.fr)
        if isinstance(other, Surd):
            return other * self
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if isinstance(other, Rational):
            return Rational(self.fr / other.fr)
        if isinstance(other, Surd):
            return self * other.reciprocal()
        return NotImplemented

    def __rtruediv__(self, other):
        return _coerce(other) / self

    def reciprocal(self):
        return Rational(1 / self.fr)


class Surd(BoundaryValue):
    """Canonical (a + b*sqrt(d))/c: d > 1 squarefree, b != 0, c > 0, gcd(a,b,c) = 1.

    Construct through :func:`normalize_surd`; the raw constructor trusts
    its arguments.
    """

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a: int, b: int, c: int, d: int):
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)

    def __setattr__(self, *a):
        raise AttributeError("Surd is immutable")

    def to_float(self) -> float:
        return (self.a + self.b * math.sqrt(self.d)) / self.c

    def conjugate(self) -> "Surd":
        return Surd(self.a, -self.b, self.c, self.d)

    def __eq__(self, other):
        other = _coerce(other)
        return (
            isinstance(other, Surd)
            and (self.a, self.b, self.c, self.d) == (other.a, other.b, other.c, other.d)
        )

    def __hash__(self):
        return hash(("bv-surd", self.a, self.b, self.c, self.d))

    def __repr__(self):
        return f"Surd(({self.a}+{self.b}*sqrt({self.d}))/{self.c})"

    def __neg__(self):
        return Surd(-self.a, -self.b, self.c, self.d)

    def _parts(self) -> tuple[Fraction, Fraction]:
        """Value as q + r*sqrt(d) with q, r rational."""
        return Fraction(self.a, self.c), Fraction(self.b, self.c)

    def __add__(self, other):
        other = _coerce(other)
        if isinstance(other, Rational):
            q, r = self._parts()
            return _from_parts(q + other.fr, r, self.d)
        if isinstance(other, Surd):
            if other.d != self.d:
                raise FieldMixError(f"cannot add sqrt({self.d}) and sqrt({other.d}) values")
            q1, r1 = self._parts()
            q2, r2 = other._parts()
            return _from_parts(q1 + q2, r1 + r2, self.d)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if isinstance(other, Rational):
            q, r = self._parts()
            return _from_parts(q * other.fr, r * other.fr, self.d)
        if isinstance(other, Surd):
            if other.d != self.d:
                raise FieldMixError(f"cannot multiply sqrt({self.d}) and sqrt({other.d}) values")
            q1, r1 = self._parts()
            q2, r2 = other._parts()
            return _from_parts(q1 * q2 + r1 * r2 * self.d, q1 * r2 + r1 * q2, self.d)
        return NotImplemented

    __rmul__ = __mul__

    def reciprocal(self):
        # 1/((a+b*sqrt(d))/c) = c*(a-b*sqrt(d))/(a^2-b^2 d); the norm is
        # nonzero because the value is irrational.
        n = self.a * self.a - self.b * self.b * self.d
        return _from_parts(Fraction(self.c * self.a, n), Fraction(-self.c * self.b, n), self.d)

    def __truediv__(self, other):
        other = _coerce(other)
        if isinstance(other, Rational):
            return self * other.reciprocal()
        if isinstance(other, Surd):
            return self * other.reciprocal()
        return NotImplemented

    def __rtruediv__(self, other):
        return _coerce(other) * self.reciprocal()


class Infinity(BoundaryValue):
    """The single compactification point; greater than every real."""

    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def to_float(self) -> float:
        return math.inf

    def __eq__(self, other):
        return isinstance(other, Infinity)

    def __hash__(self):
        return hash("bv-inf")

    def __repr__(self):
        return "Infinity()"


INF = Infinity()


class Approx(BoundaryValue):
    """Floating value with an absolute error bound; comparisons are inexact."""

    __slots__ = ("value", "err")

    def __init__(self, value: float, err: float = 1e-12):
        object.__setattr__(self, "value", float(value))
        object.__setattr__(self, "err", float(err))

    def __setattr__(self, *a):
        raise AttributeError("Approx is immutable")

    def to_float(self) -> float:
        return self.value

    def __eq__(self, other):
        return isinstance(other, Approx) and (self.value, self.err) == (other.value, other.err)

    def __hash__(self):
        return hash(("bv-approx", self.value, self.err))

    def __repr__(self):
        return f"Approx({self.value!r}, err={self.err!r})"


def _coerce(x) -> BoundaryValue:
    if isinstance(x, BoundaryValue):
        return x
    if isinstance(x, (int, Fraction)):
        return Rational(x)
    raise TypeError(f"cannot interpret {x!r} as a boundary value")


def from_fraction(fr) -> Rational:
    return Rational(fr)


def _from_parts(q: Fraction, r: Fraction, d: int) -> BoundaryValue:
    """Value q + r*sqrt(d) (d already squarefree) as a canonical Rational/Surd."""
    if r == 0:
        return Rational(q)
    den = math.lcm(q.denominator, r.denominator)
    a = q.numerator * (den // q.denominator)
    b = r.numerator * (den // r.denominator)
    g = math.gcd(math.gcd(abs(a), abs(b)), den)
    return Surd(a // g, b // g, den // g, d)


def normalize_surd(a: int, b: int, c: int, d: int) -> BoundaryValue:
    """Canonicalize (a + b*sqrt(d))/c.

    Collapses to a reduced Rational when d is a perfect square or b = 0.
    Rejects c = 0 and d <= 0.
    """
    if c == 0:
        raise ZeroDivisionError("surd denominator c must be nonzero")
    if d <= 0:
        raise ValueError("only real quadratic fields are supported (d > 0)")
    s, d0 = _squarefree_split(d)
    b *= s
    if b == 0:
        return Rational(Fraction(a, c))
    if d0 == 1:
        return Rational(Fraction(a + b, c))
    if c < 0:
        a, b, c = -a, -b, -c
    g = math.gcd(math.gcd(abs(a), abs(b)), c)
    return Surd(a // g, b // g, c // g, d0)


def _sign_of_root_combination(A: int, B: int, d: int) -> int:
    """Exact sign of A + B*sqrt(d) for squarefree d > 1 (never zero unless A=B=0)."""
    if B == 0:
        return (A > 0) - (A < 0)
    if A == 0:
        return (B > 0) - (B < 0)
    if A > 0 and B > 0:
        return 1
    if A < 0 and B < 0:
        return -1
    t = A * A - B * B * d
    if t == 0:
        raise ArithmeticError("sqrt(d) collapsed to a rational; d not squarefree?")
    if A > 0:  # B < 0
        return 1 if t > 0 else -1
    return 1 if t < 0 else -1  # A < 0, B > 0


def _sqrt_bounds(d: int, bits: int) -> tuple[Fraction, Fraction]:
    """Rational lo <= sqrt(d) <= hi with hi - lo = 2**-bits."""
    scale = 1 << bits
    lo = math.isqrt(d * scale * scale)
    return Fraction(lo, scale), Fraction(lo + 1, scale)


def _interval(x: BoundaryValue, bits: int) -> tuple[Fraction, Fraction]:
    if isinstance(x, Rational):
        return x.fr, x.fr
    assert isinstance(x, Surd)
    lo, hi = _sqrt_bounds(x.d, bits)
    if x.b > 0:
        blo, bhi = x.b * lo, x.b * hi
    else:
        blo, bhi = x.b * hi, x.b * lo
    return (x.a + blo) / x.c, (x.a + bhi) / x.c


def compare(x: BoundaryValue, y: BoundaryValue) -> int:
    """Total-order comparison returning LESS / EQUAL / GREATER."""
    return compare_detailed(x, y)[0]


def compare_detailed(x: BoundaryValue, y: BoundaryValue) -> tuple[int, bool]:
    """Comparison plus an exactness flag (False when an Approx is involved)."""
    x, y = _coerce(x), _coerce(y)
    xi, yi = isinstance(x, Infinity), isinstance(y, Infinity)
    if xi or yi:
        if xi and yi:
            return EQUAL, True
        return (GREATER, True) if xi else (LESS, True)
    if isinstance(x, Approx) or isinstance(y, Approx):
        fx, fy = x.to_float(), y.to_float()
        ex = x.err if isinstance(x, Approx) else 0.0
        ey = y.err if isinstance(y, Approx) else 0.0
        if fx + ex < fy - ey:
            return LESS, False
        if fx - ex > fy + ey:
            return GREATER, False
        return EQUAL, False
    if isinstance(x, Rational) and isinstance(y, Rational):
        fr_x, fr_y = x.fr, y.fr
        return ((fr_x > fr_y) - (fr_x < fr_y)), True
    if isinstance(x, Surd) and isinstance(y, Surd) and x.d != y.d:
        # Distinct quadratic fields never share an irrational value, so
        # rational interval refinement always separates them.
        bits = 16
        while bits <= 4096:
            xlo, xhi = _interval(x, bits)
            ylo, yhi = _interval(y, bits)
            if xhi < ylo:
                return LESS, True
            if yhi < xlo:
                return GREATER, True
            bits *= 2
        raise ArithmeticError("interval refinement failed to separate surds")
    # same field (or surd vs rational): exact sign of the difference
    if isinstance(x, Surd):
        d = x.d
        q1, r1 = x._parts()
    else:
        d = y.d  # type: ignore[union-attr]
        q1, r1 = x.fr, Fraction(0)
    if isinstance(y, Surd):
        q2, r2 = y._parts()
    else:
        q2, r2 = y.fr, Fraction(0)
    dq, dr = q1 - q2, r1 - r2
    if dq == 0 and dr == 0:
        return EQUAL, True
    den = math.lcm(dq.denominator, dr.denominator)
    A = dq.numerator * (den // dq.denominator)
    B = dr.numerator * (den // dr.denominator)
    return _sign_of_root_combination(A, B, d), True


def floor_exact(x: BoundaryValue) -> int:
    """Exact floor of a finite exact value."""
    x = _coerce(x)
    if isinstance(x, Rational):
        return x.fr.numerator // x.fr.denominator
    if isinstance(x, Surd):
        t = x.b * x.b * x.d
        m = math.isqrt(t) if x.b > 0 else -math.isqrt(t) - 1
        return (x.a + m) // x.c
    raise TypeError(f"floor is not defined for {x!r}")


# --- text grammar -----------------------------------------------------------
#
#   rat:<num>/<den>      surd:(<a>+<b>*sqrt(<d>))/<c>      inf      approx:<decimal>

_RAT_RE = re.compile(r"^rat:(-?\d+)/(-?\d+)$")
_SURD_RE = re.compile(r"^surd:\((-?\d+)\+(-?\d+)\*sqrt\((\d+)\)\)/(-?\d+)$")
_APPROX_RE = re.compile(r"^approx:(-?\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)$")


def parse_value(text: str, approx_err: float = 1e-12) -> BoundaryValue:
    """Parse the CLI grammar for boundary values."""
    text = text.strip()
    if text == "inf":
        return INF
    m = _RAT_RE.match(text)
    if m:
        num, den = int(m.group(1)), int(m.group(2))
        if den == 0:
            raise ValueError(f"zero denominator in {text!r}")
        return Rational(num, den)
    m = _SURD_RE.match(text)
    if m:
        a, b, d, c = (int(m.group(i)) for i in (1, 2, 3, 4))
        return normalize_surd(a, b, c, d)
    m = _APPROX_RE.match(text)
    if m:
        return Approx(float(m.group(1)), approx_err)
    raise ValueError(f"unparseable boundary value {text!r}")


def emit_value(x: BoundaryValue) -> str:
    """Emit a value in the same grammar parse_value accepts (round-trips)."""
    x = _coerce(x)
    if isinstance(x, Infinity):
        return "inf"
    if isinstance(x, Rational):
        return f"rat:{x.fr.numerator}/{x.fr.denominator}"
    if isinstance(x, Surd):
        return f"surd:({x.a}+{x.b}*sqrt({x.d}))/{x.c}"
    if isinstance(x, Approx):
        return f"approx:{x.value!r}"
    raise TypeError(f"cannot emit {x!r}")
