import random
from fractions import Fraction

import pytest

from cuspdyn.dynamics import NEG_INF_LABEL, apply_F, branch_table, modular_table
from cuspdyn.exact import INF, Rational, Surd, compare, normalize_surd
from cuspdyn.flow_oracle import (
    CONTAINED,
    Geodesic,
    SectionPoint,
    canonical_section_point,
    classify,
    first_return_geometric,
    intersect_vertical,
    previous_exterior_geometric,
)
from cuspdyn.moebius import GroupElement
from cuspdyn.sampling import SQUAREFREE, conjugacy_check, sample_section_pair, sample_surd_in

PHI = Surd(1, 1, 2, 5)
ONE_MINUS_PHI = Surd(1, -1, 2, 5)


def test_intersect_vertical_examples():
    g = Geodesic(forward=PHI, backward=ONE_MINUS_PHI)
    pt = intersect_vertical(g, 0)
    assert pt.re == Rational(0) and pt.height2 == Rational(1)  # the point i
    pt1 = intersect_vertical(g, 1)
    assert pt1.re == Rational(1) and pt1.height2 == Rational(1)  # the point 1 + i
    vertical = Geodesic(forward=INF, backward=Rational(0))
    assert intersect_vertical(vertical, Fraction(1, 2)) is None
    assert intersect_vertical(vertical, 0) is CONTAINED
    assert intersect_vertical(g, 2) is None  # outside the endpoint interval


def test_geodesic_circle_data():
    g = Geodesic(forward=PHI, backward=ONE_MINUS_PHI)
    assert g.center() == Rational(Fraction(1, 2))
    assert g.radius2() == Rational(Fraction(5, 4))
    # crossing heights agree with the circle equation: r^2 - (a - c)^2
    pt = intersect_vertical(g, 0)
    assert pt.height2 == g.radius2() - g.center() * g.center()
    with pytest.raises(ValueError):
        Geodesic(forward=INF, backward=Rational(0)).center()


def test_classify():
    t5 = branch_table(5)
    rec = classify(Geodesic(normalize_surd(0, 1, 1, 2), normalize_surd(0, -1, 1, 3)), t5)
    assert rec["intersects"] and rec["inf_future"] and rec["inf_past"]
    rec2 = classify(Geodesic(Rational(Fraction(3, 7)), normalize_surd(0, -1, 1, 3)), t5)
    assert rec2["inf_future"] is False and rec2["inf_past"] is True
    rec3 = classify(Geodesic(INF, Rational(0)), t5, bound=10)
    assert rec3["intersects"] is False  # the geodesic lies inside the boundary family
    rec4 = classify(Geodesic(Rational(Fraction(1, 5)), Rational(Fraction(2, 5))), t5, bound=10)
    assert rec4["intersects"] is False  # a cell side
    rec5 = classify(Geodesic(Rational(Fraction(1, 3)), Rational(Fraction(17, 7))), t5, bound=10)
    assert rec5["intersects"] is True


def test_first_return_golden_ratio_chain():
    tm = modular_table()
    sp = canonical_section_point(tm, PHI, ONE_MINUS_PHI)
    ret = first_return_geometric(sp, tm, bound=50)
    assert ret.letter == 1
    assert ret.translate == GroupElement(1, 1, 0, 1)
    assert ret.crossing.re == Rational(1) and ret.crossing.height2 == Rational(1)
    assert ret.renormalized.geodesic.forward == Surd(-1, 1, 2, 5)  # phi - 1
    assert ret.renormalized.geodesic.backward == Surd(-1, -1, 2, 5)  # -phi
    assert not ret.interior_first

    ret2 = first_return_geometric(ret.renormalized, tm, bound=50)
    assert ret2.letter == 0
    assert ret2.renormalized.geodesic.forward == PHI
    assert ret2.renormalized.geodesic.backward == ONE_MINUS_PHI


def test_first_return_matches_map_p5():
    t5 = branch_table(5)
    x = normalize_surd(-1, 1, 1, 2)
    y = normalize_surd(0, -1, 1, 2)
    sp = canonical_section_point(t5, x, y)
    ret = first_return_geometric(sp, t5, bound=50)
    x1, lab = apply_F(t5, x)
    assert ret.letter == lab == 2
    assert ret.renormalized.geodesic.forward == x1
    assert ret.translate == t5.branch(2).h


def test_first_return_rejects_cusp_forward():
    tm = modular_table()
    sp = SectionPoint(Geodesic(Rational(Fraction(3, 2)), Rational(Fraction(-1, 2))), Fraction(0), +1)
    with pytest.raises(ValueError):
        first_return_geometric(sp, tm)


def test_previous_none_at_singular_backward():
    t5 = branch_table(5)
    geod = Geodesic(normalize_surd(0, 1, 1, 2), Rational(Fraction(1, 5)))
    sp = SectionPoint(geod, Fraction(2, 5), +1)
    assert previous_exterior_geometric(sp, t5, bound=30) is None


def test_previous_row_examples_p5():
    t5 = branch_table(5)
    T = GroupElement(1, 1, 0, 1)
    # backward in (-inf, -1/5), forward in (0, inf): previous on T^{-1} . line 4/5
    geod = Geodesic(normalize_surd(0, 1, 1, 2), normalize_surd(-2, -1, 2, 2))
    sp = canonical_section_point(t5, geod.forward, geod.backward)
    prev = previous_exterior_geometric(sp, t5, bound=50)
    assert prev.translate == T.inv()
    assert prev.line == Fraction(4, 5) and prev.direction == +1
    assert prev.letter == 5
    # backward in (-1/5, 0), forward in (0, inf): previous on h_{0,0}^{-1} . line 0
    geod2 = Geodesic(normalize_surd(0, 1, 1, 2), normalize_surd(-1, -1, 20, 2))
    sp2 = canonical_section_point(t5, geod2.forward, geod2.backward)
    prev2 = previous_exterior_geometric(sp2, t5, bound=50)
    assert prev2.translate == GroupElement(1, 0, 5, 1).inv()
    assert prev2.line == Fraction(0)
    assert prev2.letter == 0


def _point_image_re(g, re, h2):
    # real part of the Moebius image of the point re + i*sqrt(h2)
    a, b, c, d = (Rational(v) for v in g.key())
    num = (a * re + b) * (c * re + d) + a * c * h2
    den = (c * re + d) * (c * re + d) + c * c * h2
    return num / den


def test_time_symmetry():
    rng = random.Random(19)
    for table in (modular_table(), branch_table(2), branch_table(5)):
        for _ in range(20):
            x, y = sample_section_pair(table, rng)
            sp = canonical_section_point(table, x, y)
            ret = first_return_geometric(sp, table, bound=50)
            back = previous_exterior_geometric(ret.renormalized, table, bound=50)
            assert back is not None
            # the previous crossing is the image of the starting one
            cr = sp.crossing()
            want_re = _point_image_re(ret.translate.inv(), cr.re, cr.height2)
            assert back.crossing.re == want_re
            assert back.letter == ret.letter
            # renormalizing the previous crossing recovers the original pair
            assert back.renormalized.geodesic.forward == sp.geodesic.forward
            assert back.renormalized.geodesic.backward == sp.geodesic.backward
            assert back.line == sp.line and back.direction == sp.direction


def test_interior_absence_modular():
    rng = random.Random(29)
    tm = modular_table()
    for _ in range(40):
        x, y = sample_section_pair(tm, rng)
        sp = canonical_section_point(tm, x, y)
        ret = first_return_geometric(sp, tm, bound=50)
        assert not ret.interior_first


def test_interior_crossings_share_geodesic():
    # when an interior crossing precedes, the endpoint pair is unchanged by it
    t5 = branch_table(5)
    rng = random.Random(41)
    seen_interior = 0
    for _ in range(40):
        x, y = sample_section_pair(t5, rng)
        # start from the line-0 crossing when one exists to force interior hits
        if compare(y, Rational(0)) == -1 and compare(Rational(0), x) == -1:
            sp = SectionPoint(Geodesic(x, y), Fraction(0), +1)
        else:
            sp = canonical_section_point(t5, x, y)
        ret = first_return_geometric(sp, t5, bound=50)
        if ret.interior_first:
            seen_interior += 1
            for c in ret.interior_crossings:
                assert compare(c.height2, Rational(0)) == 1
    assert seen_interior > 0


def test_first_return_independent_of_representative():
    # the next exterior crossing does not depend on which representative
    # line crossing the scan starts from; earlier ones see interior hits
    rng = random.Random(101)
    from fractions import Fraction as F

    for p in (2, 3, 5):
        t = branch_table(p)
        for _ in range(25):
            x, y = sample_section_pair(t, rng)
            canon = canonical_section_point(t, x, y)
            ret_c = first_return_geometric(canon, t, bound=50)
            for j in range(p):
                line = F(j, p)
                if line == canon.line and canon.direction == +1:
                    continue
                try:
                    sp = SectionPoint(Geodesic(x, y), line, +1)
                except ValueError:
                    continue
                ret = first_return_geometric(sp, t, bound=50)
                assert ret.letter == ret_c.letter
                assert ret.translate == ret_c.translate
                assert ret.crossing.re == ret_c.crossing.re
                assert ret.interior_first


def test_doubling_bound_stable():
    rng = random.Random(43)
    for table in (branch_table(3), branch_table(5)):
        for _ in range(12):
            x, y = sample_section_pair(table, rng)
            sp = canonical_section_point(table, x, y)
            r50 = first_return_geometric(sp, table, bound=50)
            r100 = first_return_geometric(sp, table, bound=100)
            assert r50.letter == r100.letter
            assert r50.translate == r100.translate
            assert r50.crossing.re == r100.crossing.re


def test_conjugacy_check_small():
    for table in (modular_table(), branch_table(2), branch_table(3)):
        rep = conjugacy_check(table, 40, seed=5, bound=50)
        assert rep["matches"] == rep["samples"] == 40
        assert rep["mismatches"] == []


def test_oracle_rejects_mixed_fields():
    t5 = branch_table(5)
    x = normalize_surd(-1, 1, 1, 2)
    y = normalize_surd(0, -1, 1, 3)
    sp = canonical_section_point(t5, x, y)
    with pytest.raises(ValueError):
        first_return_geometric(sp, t5, bound=20)
