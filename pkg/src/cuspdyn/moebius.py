"""Integer Moebius transformations in PSL(2,Z) and their geometry.

Group elements are determinant-one integer matrices normalized to the
sign-canonical representative of their +/- class: c > 0, or c = 0 and
d > 0.  The action on boundary values is exact; the action on points of
the upper half plane is exact for points with rational x and rational
squared height, which is the shape every vertex and crossing point in
this package has.
"""

from __future__ import annotations

from fractions import Fraction

from .exact import (
    INF,
    Approx,
    BoundaryValue,
    Infinity,
    Rational,
    Surd,
    _from_parts,
)

__all__ = ["GroupElement", "HPoint", "IsometricSphere", "identity", "in_gamma0"]


class GroupElement:
    """Sign-canonical integer matrix (a b; c d) with ad - bc = 1."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a: int, b: int, c: int, d: int):
        if a * d - b * c != 1:
            raise ValueError(f"determinant of ({a},{b};{c},{d}) is not 1")
        if c < 0 or (c == 0 and d < 0):
            a, b, c, d = -a, -b, -c, -d
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)

    def __setattr__(self, *args):
        raise AttributeError("GroupElement is immutable")

    def key(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def __eq__(self, other):
        return isinstance(other, GroupElement) and self.key() == other.key()

    def __hash__(self):
        return hash(("psl2", self.key()))

    def __repr__(self):
        return f"GroupElement({self.a}, {self.b}, {self.c}, {self.d})"

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        """Composition: (g*h)(z) = g(h(z))."""
        if not isinstance(other, GroupElement):
            return NotImplemented
        return GroupElement(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inv(self) -> "GroupElement":
        return GroupElement(self.d, -self.b, -self.c, self.a)

    def is_identity(self) -> bool:
        return self.key() == (1, 0, 0, 1)

    # --- actions ------------------------------------------------------------

    def apply_boundary(self, x: BoundaryValue) -> BoundaryValue:
        """Exact image of a boundary value; poles map to inf, inf to a/c."""
        a, b, c, d = self.a, self.b, self.c, self.d
        if isinstance(x, Infinity):
            if c == 0:
                return INF
            return Rational(Fraction(a, c))
        if isinstance(x, Rational):
            num = a * x.fr + b
            den = c * x.fr + d
            if den == 0:
                return INF
            return Rational(num / den)
        if isinstance(x, Surd):
            q, r = x._parts()
            # numerator (a*q+b) + a*r sqrt(d), denominator (c*q+d) + c*r sqrt(d)
            nq, nr = a * q + b, a * r
            dq, dr = c * q + d, Fraction(c) * r
            if dq == 0 and dr == 0:
                return INF
            norm = dq * dq - dr * dr * x.d
            if norm == 0:
                raise ArithmeticError("denominator norm vanished on an irrational value")
            return _from_parts(
                (nq * dq - nr * dr * x.d) / norm,
                (nr * dq - nq * dr) / norm,
                x.d,
            )
        if isinstance(x, Approx):
            den = c * x.value + d
            if den == 0:
                return INF
            # first-order error propagation through the Moebius map
            deriv = 1.0 / (den * den)
            val = (a * x.value + b) / den
            return Approx(val, abs(deriv) * x.err * 1.0000000001 + 1e-17 * (1 + abs(val)))
        raise TypeError(f"cannot apply group element to {x!r}")

    def apply_hpoint(self, z: "HPoint") -> "HPoint":
        a, b, c, d = self.a, self.b, self.c, self.d
        # z = x + iy with y^2 = y2:  g z = ((az+b)(c conj(z)+d)) / |cz+d|^2
        den = (c * z.x + d) ** 2 + c * c * z.y2
        if den == 0:
            raise ZeroDivisionError("point maps to the boundary")
        x_new = ((a * z.x + b) * (c * z.x + d) + a * c * z.y2) / den
        return HPoint(x_new, z.y2 / (den * den))


def identity() -> GroupElement:
    return GroupElement(1, 0, 0, 1)


def in_gamma0(g: GroupElement, p: int) -> bool:
    """Membership in the congruence subgroup: lower-left entry divisible by p."""
    return g.c % p == 0


class HPoint:
    """Upper half plane point with rational x and rational squared height."""

    __slots__ = ("x", "y2")

    def __init__(self, x, y2):
        x, y2 = Fraction(x), Fraction(y2)
        if y2 <= 0:
            raise ValueError("HPoint requires strictly positive imaginary part")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y2", y2)

    def __setattr__(self, *args):
        raise AttributeError("HPoint is immutable")

    @classmethod
    def from_complex(cls, z: complex) -> "HPoint":
        # binary floats convert exactly to Fractions, so no precision is lost
        return cls(Fraction(z.real), Fraction(z.imag) ** 2)

    def to_complex(self) -> complex:
        return complex(float(self.x), float(self.y2) ** 0.5)

    def __eq__(self, other):
        return isinstance(other, HPoint) and (self.x, self.y2) == (other.x, other.y2)

    def __hash__(self):
        return hash(("hpoint", self.x, self.y2))

    def __repr__(self):
        return f"HPoint({self.x}, y2={self.y2})"


class IsometricSphere:
    """The geodesic |cz + d| = 1 of an element with c != 0."""

    __slots__ = ("center", "radius", "element")

    def __init__(self, g: GroupElement):
        if g.c == 0:
            raise ValueError("no isometric sphere for parabolic-at-infinity element")
        object.__setattr__(self, "center", Fraction(-g.d, g.c))
        object.__setattr__(self, "radius", Fraction(1, abs(g.c)))
        object.__setattr__(self, "element", g)

    def __setattr__(self, *args):
        raise AttributeError("IsometricSphere is immutable")

    def side(self, z: HPoint) -> int:
        """Sign of |cz+d|^2 - 1: -1 inside, 0 on the sphere, +1 outside."""
        g = self.element
        t = (g.c * z.x + g.d) ** 2 + g.c * g.c * z.y2 - 1
        return (t > 0) - (t < 0)

    def __repr__(self):
        return f"IsometricSphere(center={self.center}, radius={self.radius})"


def compose(g: GroupElement, h: GroupElement) -> GroupElement:
    return g * h


def apply_boundary(g: GroupElement, x: BoundaryValue) -> BoundaryValue:
    return g.apply_boundary(x)


def isometric_sphere(g: GroupElement) -> IsometricSphere:
    return IsometricSphere(g)
