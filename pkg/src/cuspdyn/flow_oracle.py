"""Geometric first-return oracle for the cusp-expansion cross section.

Completely independent of the branch tables: it enumerates group
elements by raw entry bound, collects the translated boundary geodesics
g.(vertical line), intersects them with a given geodesic, and orders the
crossings along the geodesic by the real coordinate (monotone between
the endpoints).  A numpy prefilter narrows the candidates; every
reported crossing is then verified and ordered in exact arithmetic.

Exact ordering of crossing positions needs products of the two endpoint
values, so the oracle requires both endpoints in a single real quadratic
field (rationals allowed); this covers every geodesic the conjugacy and
classification tests use.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exact import (
    EQUAL,
    GREATER,
    INF,
    LESS,
    BoundaryValue,
    Infinity,
    Rational,
    Surd,
    compare,
    emit_value,
)
from .dynamics import BranchTable
from .moebius import GroupElement

__all__ = [
    "Geodesic",
    "SectionPoint",
    "CrossingPoint",
    "ReturnRecord",
    "Contained",
    "IncreaseBoundError",
    "intersect_vertical",
    "classify",
    "first_return_geometric",
    "previous_exterior_geometric",
    "canonical_section_point",
    "default_bound",
]


class IncreaseBoundError(RuntimeError):
    """The enumeration bound was exhausted before a crossing was confirmed."""


class Contained:
    """Marker: the probe line coincides with the geodesic."""

    def __repr__(self):
        return "Contained()"


CONTAINED = Contained()


def _field_of(x: BoundaryValue) -> int | None:
    if isinstance(x, Surd):
        return x.d
    if isinstance(x, Rational):
        return None
    raise TypeError(f"oracle geodesics need exact finite endpoints, got {x!r}")


@dataclass(frozen=True)
class Geodesic:
    """Oriented geodesic with backward endpoint y and forward endpoint x."""

    forward: BoundaryValue
    backward: BoundaryValue

    def __post_init__(self):
        if compare(self.forward, self.backward) == EQUAL:
            raise ValueError("geodesic endpoints must be distinct")

    def is_vertical(self) -> bool:
        return isinstance(self.forward, Infinity) or isinstance(self.backward, Infinity)

    def travel(self) -> int:
        """+1 if the real coordinate increases along the flow, else -1."""
        return 1 if compare(self.backward, self.forward) == LESS else -1

    def center(self) -> BoundaryValue:
        """Euclidean center of the semicircle (finite endpoints only)."""
        if self.is_vertical():
            raise ValueError("a vertical geodesic has no semicircle center")
        return (self.forward + self.backward) / Rational(2)

    def radius2(self) -> BoundaryValue:
        """Squared Euclidean radius of the semicircle."""
        if self.is_vertical():
            raise ValueError("a vertical geodesic has no semicircle radius")
        half = (self.forward - self.backward) / Rational(2)
        return half * half

    def field(self) -> int | None:
        dx = _field_of(self.forward)
        dy = _field_of(self.backward)
        if dx is not None and dy is not None and dx != dy:
            raise ValueError(
                "oracle needs both endpoints in one quadratic field "
                f"(got sqrt({dx}) and sqrt({dy}))"
            )
        return dx if dx is not None else dy

    def to_json(self) -> dict:
        return {"forward": emit_value(self.forward), "backward": emit_value(self.backward)}


@dataclass(frozen=True)
class CrossingPoint:
    re: BoundaryValue
    height2: BoundaryValue

    def to_complex(self) -> complex:
        return complex(self.re.to_float(), self.height2.to_float() ** 0.5)

    def to_json(self) -> dict:
        return {"re": emit_value(self.re), "height2": emit_value(self.height2)}


@dataclass(frozen=True)
class SectionPoint:
    """A transversal crossing of the geodesic with a representative line."""

    geodesic: Geodesic
    line: Fraction
    direction: int  # +1 left-to-right, -1 right-to-left

    def __post_init__(self):
        x, y = self.geodesic.forward, self.geodesic.backward
        line = Rational(self.line)
        if self.direction == +1:
            ok = compare(y, line) == LESS and compare(line, x) == LESS
        else:
            ok = compare(x, line) == LESS and compare(line, y) == LESS
        if not ok:
            raise ValueError("geodesic does not cross the line transversally in that direction")

    def crossing(self) -> CrossingPoint:
        x, y = self.geodesic.forward, self.geodesic.backward
        line = Rational(self.line)
        h2 = (line - y) * (x - line)
        return CrossingPoint(line, h2)

    def to_json(self) -> dict:
        return {
            "geodesic": self.geodesic.to_json(),
            "line": f"{self.line.numerator}/{self.line.denominator}",
            "direction": self.direction,
            "crossing": self.crossing().to_json(),
        }


def intersect_vertical(geod: Geodesic, a) -> CrossingPoint | None | Contained:
    """Intersection of the geodesic with the vertical line Re = a."""
    a = Fraction(a)
    x, y = geod.forward, geod.backward
    if geod.is_vertical():
        base = y if isinstance(x, Infinity) else x
        if compare(base, Rational(a)) == EQUAL:
            return CONTAINED
        return None
    ra = Rational(a)
    cx, cy = compare(ra, x), compare(ra, y)
    if cx == EQUAL or cy == EQUAL:
        return None
    if cx == cy:  # same side of both endpoints
        return None
    h2 = (ra - y) * (x - ra)
    return CrossingPoint(ra, h2)


def default_bound(p: int | None) -> int:
    if p is None or p <= 7:
        return 50
    return 120


# --- translate family enumeration -------------------------------------------


class _Family:
    """All arcs g.(line j/p) with |entries(g)| <= bound, deduplicated."""

    def __init__(self, kind: str, p: int | None, bound: int):
        self.kind = kind
        self.p = p
        self.bound = bound
        self.rep_lines = (
            [Fraction(0)] if kind == "modular" else [Fraction(j, p) for j in range(p)]
        )
        self.allow_leftward_zero = kind == "gamma0"
        arcs: dict = {}
        for g in _enumerate_elements(kind, p, bound):
            for base in self.rep_lines:
                e1 = g.apply_boundary(Rational(base))
                e2 = g.apply_boundary(INF)
                key = _arc_key(e1, e2)
                entry = arcs.get(key)
                if entry is None:
                    arcs[key] = entry = _Arc(e1, e2)
                entry.labels.append((g, base))
        self.arcs = list(arcs.values())
        n = len(self.arcs)
        self.vertical = np.zeros(n, dtype=bool)
        self.u = np.zeros(n)   # vertical: base; circle: first endpoint
        self.v = np.zeros(n)   # vertical: unused 0.0; circle: second endpoint
        for i, arc in enumerate(self.arcs):
            if arc.is_vertical:
                self.vertical[i] = True
                self.u[i] = float(arc.base)
            else:
                self.u[i] = arc.e1.to_float()
                self.v[i] = arc.e2.to_float()

    def is_interior(self, arc: "_Arc", travel: int) -> bool:
        """Crossing of a representative line in a representative direction."""
        if not arc.is_vertical or arc.base not in self.rep_lines:
            return False
        if travel == +1:
            return True
        return self.allow_leftward_zero and arc.base == 0


class _Arc:
    __slots__ = ("e1", "e2", "labels", "is_vertical", "base")

    def __init__(self, e1: BoundaryValue, e2: BoundaryValue):
        self.e1 = e1
        self.e2 = e2
        self.labels: list[tuple[GroupElement, Fraction]] = []
        self.is_vertical = isinstance(e1, Infinity) or isinstance(e2, Infinity)
        self.base = None
        if self.is_vertical:
            fin = e2 if isinstance(e1, Infinity) else e1
            self.base = fin.fr


def _arc_key(e1: BoundaryValue, e2: BoundaryValue):
    def k(e):
        return (1,) if isinstance(e, Infinity) else (0, e.fr)

    k1, k2 = k(e1), k(e2)
    return (k1, k2) if k1 <= k2 else (k2, k1)


def _enumerate_elements(kind: str, p: int | None, bound: int):
    """Group elements with entries bounded by `bound` (c >= 0 canonical)."""
    step = 1 if kind == "modular" else p
    for b in range(-bound, bound + 1):
        yield GroupElement(1, b, 0, 1)
    for c in range(step, bound + 1, step):
        for a in range(-bound, bound + 1):
            try:
                d0 = pow(a, -1, c)
            except ValueError:
                continue
            d = d0 - c * ((d0 + bound) // c)  # smallest d >= -bound with d = d0 mod c
            while d <= bound:
                bb = (a * d - 1) // c
                if -bound <= bb <= bound and a * d - bb * c == 1:
                    yield GroupElement(a, bb, c, d)
                d += c


_family_cache: dict = {}


def _get_family(kind: str, p: int | None, bound: int) -> _Family:
    key = (kind, p, bound)
    fam = _family_cache.get(key)
    if fam is None:
        fam = _family_cache[key] = _Family(kind, p, bound)
    return fam


# --- exact crossing helpers --------------------------------------------------


def _crosses(geod: Geodesic, arc: _Arc) -> bool:
    x, y = geod.forward, geod.backward
    lo, hi = (y, x) if geod.travel() == +1 else (x, y)
    if arc.is_vertical:
        b = Rational(arc.base)
        return compare(lo, b) == LESS and compare(b, hi) == LESS

    def classify(e):
        c1, c2 = compare(e, lo), compare(e, hi)
        if c1 == EQUAL or c2 == EQUAL:
            return "touch"
        return "in" if (c1 == GREATER and c2 == LESS) else "out"

    s1, s2 = classify(arc.e1), classify(arc.e2)
    if "touch" in (s1, s2):
        return False
    return s1 != s2


def _position(geod: Geodesic, arc: _Arc) -> BoundaryValue:
    """Real coordinate of the crossing point (assumes _crosses)."""
    if arc.is_vertical:
        return Rational(arc.base)
    x, y = geod.forward, geod.backward
    u, v = arc.e1, arc.e2
    num = u * v - x * y
    den = (u + v) - (x + y)
    return num / den


def _height2_at(geod: Geodesic, pos: BoundaryValue) -> BoundaryValue:
    x, y = geod.forward, geod.backward
    return (pos - y) * (x - pos)


# --- first return / previous exterior ----------------------------------------


@dataclass(frozen=True)
class ReturnRecord:
    letter: object
    translate: GroupElement
    line: Fraction
    direction: int
    crossing: CrossingPoint
    renormalized: SectionPoint
    interior_first: bool
    interior_crossings: tuple[CrossingPoint, ...]

    def to_json(self) -> dict:
        from .dynamics import label_to_json
        from .tessellation import matrix_literal

        return {
            "schema": 1,
            "letter": label_to_json(self.letter) if self.letter is not None else None,
            "translate": matrix_literal(self.translate),
            "line": f"{self.line.numerator}/{self.line.denominator}",
            "direction": self.direction,
            "crossing": self.crossing.to_json(),
            "renormalized": self.renormalized.to_json(),
            "interior_first": self.interior_first,
            "interior_crossings": [c.to_json() for c in self.interior_crossings],
        }


def canonical_section_point(table: BranchTable, x: BoundaryValue, y: BoundaryValue) -> SectionPoint:
    """The representative crossing used by the reduced section for (x, y)."""
    rec = table.branch_of(x)
    if not rec.y_interval.contains(y):
        raise ValueError("(x, y) is not on the reduced cross section")
    geod = Geodesic(forward=x, backward=y)
    line, direction = rec.rep_line, rec.rep_dir
    if direction == +1 and not compare(y, Rational(line)) == LESS:
        raise ValueError(
            "no representative line crossing exists for this pair "
            f"(backward endpoint {emit_value(y)} is right of {line})"
        )
    return SectionPoint(geod, line, direction)


def _candidates_sorted(fam: _Family, geod: Geodesic, sp_key: float, forward: bool):
    """Float prefilter: plausible crossings ordered along the scan direction."""
    x0, y0 = geod.forward.to_float(), geod.backward.to_float()
    lo, hi = (min(x0, y0), max(x0, y0))
    s = geod.travel()
    scale = max(1.0, abs(x0), abs(y0))
    eps = 1e-9 * scale

    u, v, vert = fam.u, fam.v, fam.vertical
    in_u = (u > lo - eps) & (u < hi + eps)
    strict_u = (u > lo + eps) & (u < hi - eps)
    in_v = (v > lo - eps) & (v < hi + eps)
    strict_v = (v > lo + eps) & (v < hi - eps)
    cand = np.where(
        vert,
        in_u,
        (in_u | in_v) & ~(strict_u & strict_v),
    )
    den = (u + v) - (x0 + y0)
    safe = np.abs(den) > 1e-30
    pos = np.where(
        vert, u, (u * v - x0 * y0) / np.where(safe, den, 1.0)
    )
    cand &= vert | safe
    scan_key = (s if forward else -s) * pos  # ascending along the scan
    # generous margins: near-concentric arcs can carry noticeable float
    # position error, and every kept candidate is verified exactly anyway
    margin = 1e-6 * (1.0 + np.abs(pos))
    sp_scan = sp_key if forward else -sp_key
    cand &= scan_key > sp_scan - margin
    idx = np.nonzero(cand)[0]
    order = np.argsort(scan_key[idx], kind="stable")
    return idx[order], scan_key


def _scan(
    fam: _Family,
    geod: Geodesic,
    sp_pos: BoundaryValue,
    forward: bool,
):
    """First exterior crossing strictly beyond sp_pos, plus preceding interiors."""
    geod.field()  # validates single-field endpoints
    s = geod.travel()
    sp_key = s * sp_pos.to_float()
    idx, scan_keys = _candidates_sorted(fam, geod, sp_key, forward)

    def earlier(a: BoundaryValue, b: BoundaryValue) -> bool:
        """a strictly precedes b in the scan direction."""
        cmp = compare(a, b)
        want = (LESS if s == +1 else GREATER) if forward else (GREATER if s == +1 else LESS)
        return cmp == want

    best: tuple[BoundaryValue, _Arc] | None = None
    best_key = None
    interiors: list[tuple[BoundaryValue, _Arc]] = []
    for i in idx:
        if best_key is not None and scan_keys[i] > best_key + 1e-6 * (1.0 + abs(best_key)):
            break
        arc = fam.arcs[i]
        if not _crosses(geod, arc):
            continue
        pos = _position(geod, arc)
        if not earlier(sp_pos, pos):
            continue
        if best is not None:
            if compare(pos, best[0]) == EQUAL and not fam.is_interior(arc, s):
                raise AssertionError("two exterior boundary arcs cross at the same point")
            if not earlier(pos, best[0]):
                continue
        if fam.is_interior(arc, s):
            interiors.append((pos, arc))
        else:
            best = (pos, arc)
            best_key = float(scan_keys[i])
    if best is None:
        return None, interiors
    interiors = [(q, a) for (q, a) in interiors if earlier(q, best[0])]
    interiors.sort(key=lambda t: (s if forward else -s) * t[0].to_float())
    return best, interiors


def _valid_label(
    fam: _Family, geod: Geodesic, arc: _Arc
) -> tuple[GroupElement, Fraction, int, BoundaryValue, BoundaryValue]:
    """Pick the arc label whose renormalization lands on the representative family."""
    for g, base in arc.labels:
        ginv = g.inv()
        xt = ginv.apply_boundary(geod.forward)
        yt = ginv.apply_boundary(geod.backward)
        if isinstance(xt, Infinity) or isinstance(yt, Infinity):
            continue
        b = Rational(base)
        if compare(yt, b) == LESS and compare(b, xt) == LESS:
            return g, base, +1, xt, yt
        if (
            fam.allow_leftward_zero
            and base == 0
            and compare(xt, b) == LESS
            and compare(b, yt) == LESS
        ):
            return g, base, -1, xt, yt
    raise IncreaseBoundError(
        "crossing found but no enumerated label renormalizes to the representative family"
    )


def first_return_geometric(
    sp: SectionPoint, table: BranchTable, bound: int | None = None
) -> ReturnRecord:
    """Next exterior crossing after sp, identified and renormalized.

    Brute force over all translates with entries up to the bound; the
    first crossing strictly after sp that is not a representative-family
    crossing is returned, together with any representative (interior)
    crossings that precede it.
    """
    if sp.geodesic.is_vertical():
        raise ValueError("first return needs a finite irrational forward endpoint")
    if isinstance(sp.geodesic.forward, Rational):
        raise ValueError("forward endpoint is a cusp point; no exterior return exists")
    kind = table.kind
    p = table.p
    if bound is None:
        bound = default_bound(p)
    fam = _get_family(kind, p, bound)
    best, interiors = _scan(fam, sp.geodesic, Rational(sp.line), forward=True)
    if best is None:
        raise IncreaseBoundError(f"no exterior crossing found at bound {bound}")
    pos, arc = best
    g, base, direction, xt, yt = _valid_label(fam, sp.geodesic, arc)
    letter = table.letter_for(g, base, direction)
    renorm = SectionPoint(Geodesic(forward=xt, backward=yt), base, direction)
    return ReturnRecord(
        letter=letter,
        translate=g,
        line=base,
        direction=direction,
        crossing=CrossingPoint(pos, _height2_at(sp.geodesic, pos)),
        renormalized=renorm,
        interior_first=bool(interiors),
        interior_crossings=tuple(
            CrossingPoint(q, _height2_at(sp.geodesic, q)) for q, _ in interiors
        ),
    )


def previous_exterior_geometric(
    sp: SectionPoint, table: BranchTable, bound: int | None = None
) -> ReturnRecord | None:
    """Previous exterior crossing before sp, or None when none exists.

    Existence is decided by the exact endpoint criterion; the enumeration
    then locates the crossing, and bound exhaustion raises instead of
    silently returning None.
    """
    if sp.geodesic.is_vertical():
        raise ValueError("previous return needs finite endpoints")
    kind = table.kind
    p = table.p
    if bound is None:
        bound = default_bound(p)
    exists = _previous_exists(kind, p, sp.geodesic)
    fam = _get_family(kind, p, bound)
    best, interiors = _scan(fam, sp.geodesic, Rational(sp.line), forward=False)
    if best is None:
        if exists:
            raise IncreaseBoundError(f"no previous exterior found at bound {bound}")
        return None
    if not exists:
        raise AssertionError("found a previous exterior crossing the criterion excludes")
    pos, arc = best
    g, base, direction, xt, yt = _valid_label(fam, sp.geodesic, arc)
    # a previous crossing sits on h_k^{-1} . (representative line of branch k);
    # the renormalized pair is the previous point, so its branch names the letter
    letter = None
    ginv = g.inv()
    for rec in table.branches:
        if (
            rec.h == ginv
            and rec.rep_line == base
            and rec.rep_dir == direction
            and rec.interval.contains(xt)
        ):
            letter = rec.label
            break
    renorm = SectionPoint(Geodesic(forward=xt, backward=yt), base, direction)
    return ReturnRecord(
        letter=letter,
        translate=g,
        line=base,
        direction=direction,
        crossing=CrossingPoint(pos, _height2_at(sp.geodesic, pos)),
        renormalized=renorm,
        interior_first=bool(interiors),
        interior_crossings=tuple(
            CrossingPoint(q, _height2_at(sp.geodesic, q)) for q, _ in interiors
        ),
    )


def _previous_exists(kind: str, p: int | None, geod: Geodesic) -> bool:
    x, y = geod.forward, geod.backward
    if kind == "modular":
        return not (isinstance(y, Rational) and y.fr in (Fraction(0), Fraction(-1)))
    zero = Rational(0)
    if compare(x, zero) == LESS:
        return not (isinstance(y, Rational) and y.fr == Fraction(1, p))
    singular = {Fraction(k, p) for k in range(-1, p - 1)}
    return not (isinstance(y, Rational) and y.fr in singular)


# --- classification -----------------------------------------------------------


def classify(geod: Geodesic, table: BranchTable, bound: int | None = None) -> dict:
    """Which intersections the geodesic has with the cross section.

    intersects is False exactly when the geodesic coincides with a
    boundary-family component (checked against the enumerated translates,
    so rational-endpoint results carry bounded confidence); a geodesic
    with an irrational endpoint always intersects.
    """
    kind = table.kind
    p = table.p
    if bound is None:
        bound = default_bound(p)

    def infinitely_often(e: BoundaryValue) -> bool:
        return not (isinstance(e, Rational) or isinstance(e, Infinity))

    inf_future = infinitely_often(geod.forward)
    inf_past = infinitely_often(geod.backward)
    if inf_future or inf_past:
        return {
            "intersects": True,
            "inf_future": inf_future,
            "inf_past": inf_past,
            "confidence": "exact",
        }
    fam = _get_family(kind, p, bound)
    key = _arc_key(geod.forward, geod.backward)
    is_component = any(_arc_key(a.e1, a.e2) == key for a in fam.arcs)
    return {
        "intersects": not is_component,
        "inf_future": False,
        "inf_past": False,
        "confidence": f"within-bound-{bound}",
    }
