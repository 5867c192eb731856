import math
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from flatteich.curves import holonomy_stats, twist_curve
from flatteich.errors import BadPairing, ChartMismatch, NonClosingPolygon, NonPositiveK, UnknownCylinder, ZeroArea
from flatteich.surface import (
    Cylinder,
    FlatSurface,
    MarkedPoint,
    Pairing,
    apply_teich_stretch,
    cylinder_modulus,
    develop,
    normalize_area,
    plumb,
    rotate_structure,
    validate,
)


def square_torus(w=1, h=1):
    w, h = F(w), F(h)
    return FlatSurface(
        (((w, 0), (0, h), (-w, 0), (0, -h)),),
        (Pairing((0, 0), (0, 2)), Pairing((0, 1), (0, 3))),
        (Cylinder("C", (w, F(0)), h, (0,), (0, (w / 2, h / 2))),),
    ).with_cores()


def self_glued_square():
    sq = ((F(1), F(0)), (F(0), F(1)), (F(-1), F(0)), (F(0), F(-1)))
    return FlatSurface((sq,), (Pairing((0, 0), (0, 0), 1),))


def test_unit_square_is_a_torus():
    d = validate(square_torus())
    assert d.genus == 1 and d.cone_points == () and d.area == 1 and d.ok


def test_L_fixture_genus_two(lshape):
    d = lshape.diagnostics
    assert d.genus == 2 and d.cone_angles == (6,)
    assert d.completely_periodic


def test_slit_fixture(slit):
    d = slit.diagnostics
    assert d.genus == 2 and d.cone_points == (4, 4) and d.area == 2 and d.translation


def test_mismatched_pairing():
    s = FlatSurface((((F(1), F(0)), (F(0), F(1)), (F(-1), F(0)), (F(0), F(-1))),),
                    (Pairing((0, 0), (0, 1)), Pairing((0, 2), (0, 3))))
    with pytest.raises(BadPairing, match=r"\(0, 0\)"):
        validate(s)


def test_unpaired_and_double_paired_edges():
    sq = ((F(1), F(0)), (F(0), F(1)), (F(-1), F(0)), (F(0), F(-1)))
    with pytest.raises(BadPairing, match="unpaired"):
        validate(FlatSurface((sq,), (Pairing((0, 0), (0, 2)),)))
    with pytest.raises(BadPairing, match="more than once"):
        validate(FlatSurface((sq,), (Pairing((0, 0), (0, 2)), Pairing((0, 0), (0, 2)))))
    with pytest.raises(BadPairing, match="itself"):
        validate(self_glued_square())


def test_non_closing_polygon():
    s = FlatSurface((((F(1), F(0)), (F(0), F(1)), (F(-1), F(0)), (F(0), F(-2))),),
                    (Pairing((0, 0), (0, 2)), Pairing((0, 1), (0, 3))))
    with pytest.raises(NonClosingPolygon, match="polygon 0"):
        validate(s)


def test_half_turn_gluings():
    sq = ((F(1), F(0)), (F(0), F(1)), (F(-1), F(0)), (F(0), F(-1)))
    # equal holonomies need a half-turn
    with pytest.raises(BadPairing, match="translation"):
        validate(FlatSurface((sq, sq), tuple(Pairing((0, j), (1, j), 1) for j in range(4))))
    d = validate(FlatSurface((sq, sq), tuple(Pairing((0, j), (1, j), -1) for j in range(4))))
    assert not d.translation and d.genus == 1 and d.ok
    # a 2x1 rectangle folded into a pillowcase: four cone points of angle pi, genus 0 is rejected
    r = ((F(1), F(0)), (F(1), F(0)), (F(0), F(1)), (F(-1), F(0)), (F(-1), F(0)), (F(0), F(-1)))
    d = validate(FlatSurface((r,), (Pairing((0, 0), (0, 1), -1), Pairing((0, 3), (0, 4), -1),
                                    Pairing((0, 2), (0, 5), 1))))
    assert d.cone_angles == (1, 1, 1, 1) and d.genus == 0 and not d.ok


def test_half_turn_developing():
    """A path crossing a half-turn edge comes back with its chart flipped."""
    r = ((F(1), F(0)), (F(1), F(0)), (F(0), F(1)), (F(-1), F(0)), (F(-1), F(0)), (F(0), F(-1)))
    s = FlatSurface((r,), (Pairing((0, 0), (0, 1), -1), Pairing((0, 3), (0, 4), -1), Pairing((0, 2), (0, 5), 1)))
    p = develop(s, 0, (F(1, 3), F(1, 2)), (F(0), F(-1)))
    # crossing the bottom left half lands on the bottom right half moving up
    assert p.end_sign == -1 and p.end_polygon == 0
    assert p.end_point == (F(5, 3), F(1, 2))


def test_stretch_examples():
    s = square_torus()
    assert apply_teich_stretch(s, 1).polygons == s.polygons
    t = apply_teich_stretch(s, 4)
    assert t.polygons[0] == ((2, 0), (0, F(1, 2)), (-2, 0), (0, F(-1, 2)))
    assert t.area == 1
    e = FlatSurface((((F(3), F(4)), (F(-3), F(-4)), (F(0), F(1))),), ())
    # polygon need not be valid to check the coordinate law
    assert apply_teich_stretch(e, 4).polygons[0][0] == (6, 2)
    with pytest.raises(NonPositiveK):
        apply_teich_stretch(s, 0)


def test_rotation_examples():
    s = square_torus()
    assert rotate_structure(s, 0).polygons == s.polygons
    full = rotate_structure(s, 2 * math.pi)
    assert full.polygons[0] == tuple((-x, -y) for x, y in s.polygons[0])
    assert full.cylinders == s.cylinders
    q = rotate_structure(s, math.pi / 2)
    x, y = q.polygons[0][0]
    assert abs(x - math.sqrt(2) / 2) < 1e-15 and abs(y - math.sqrt(2) / 2) < 1e-15
    assert q.cylinders == ()
    assert abs(q.area - 1) < 1e-12


def test_cylinder_modulus():
    assert cylinder_modulus(Cylinder("a", (F(1), F(0)), F(1))) == 1
    assert cylinder_modulus(Cylinder("a", (F(2), F(0)), F(3))) == F(3, 2)
    s = apply_teich_stretch(square_torus(2, 3), 4)
    assert s.cylinder("C").modulus == F(3, 2) / 4


def test_plumb_examples(slit):
    s = slit.surface
    assert plumb(s, "C1", 0, 0).polygons == s.polygons
    t = plumb(s, "C1", 1, 0)
    assert t.cylinder("C1").modulus == 2
    assert t.cylinder("C1").height == 2
    assert t.polygons[1] == s.polygons[1]
    with pytest.raises(UnknownCylinder):
        plumb(s, "nope", 1, 0)
    from flatteich.bounds import annulus_modulus
    a2 = slit.annuli["A2"]
    assert annulus_modulus(plumb(s, "C1", F(7, 3), F(5, 2)), a2) == annulus_modulus(s, a2) == F(5, 8)


def test_plumb_integer_twist_is_a_twist(slit):
    """Plumbing with dh = 0 and an integer twist is isometric to the input:
    the regluing differs by the Dehn twist, so every curve's holonomy on the
    plumbed surface equals the twisted curve's holonomy on the input."""
    s = slit.surface
    for k in (-2, 1, 3):
        t = plumb(s, "C1", 0, k)
        for g in slit.curves.values():
            assert holonomy_stats(g, t).segments == holonomy_stats(twist_curve(g, s.cylinder("C1"), k), s).segments
        assert validate(t).genus == 2 and t.area == s.area


def test_normalize_area():
    s = square_torus()
    assert normalize_area(s).polygons == s.polygons
    r = normalize_area(square_torus(2, 1))
    assert abs(r.area - 1) < 1e-15
    assert abs(r.polygons[0][0][0] - math.sqrt(2)) < 1e-15
    assert r.cylinder("C").modulus == square_torus(2, 1).cylinder("C").modulus or \
        abs(r.cylinder("C").modulus - F(1, 2)) < 1e-15
    flat = FlatSurface((((F(0), F(0)), (F(0), F(0)), (F(0), F(0))),), ())
    with pytest.raises(ZeroArea):
        normalize_area(flat)


def test_develop_errors():
    s = square_torus()
    with pytest.raises(ChartMismatch, match="corner"):
        develop(s, 0, (F(1, 2), F(1, 2)), (F(1), F(1)))
    with pytest.raises(ChartMismatch, match="ends on edge"):
        develop(s, 0, (F(1, 2), F(1, 3)), (F(1, 2), F(0)))
    with pytest.raises(ChartMismatch, match="interior"):
        develop(s, 0, (F(0), F(1, 3)), (F(1), F(0)))
    p = develop(s, 0, (F(1, 3), F(1, 5)), (F(3), F(1)))
    assert p.end_polygon == 0 and p.end_point == (F(1, 3), F(1, 5))
    assert sum(pc.vector[0] for pc in p.pieces) == 3


def test_marked_point_replay(slit):
    x0 = MarkedPoint(slit.surface)
    y = x0.stretch(F(9, 4)).twist("C1", 3).plumb("C2", F(1, 2), F(1, 3)).normalize()
    again = MarkedPoint(slit.surface, y.marking_log)
    assert again.surface == y.surface
    assert y.twists[0].n == 3


# -- properties -------------------------------------------------------------

square_rationals = st.builds(lambda a, b: F(a, b) ** 2, st.integers(1, 40), st.integers(1, 40))


@given(square_rationals, square_rationals)
def test_stretch_composition_is_exact(K1, K2):
    s = square_torus(3, 2)
    a = apply_teich_stretch(apply_teich_stretch(s, K1), K2)
    b = apply_teich_stretch(s, K1 * K2)
    assert a.polygons == b.polygons and a.area == s.area


@given(st.floats(0.01, 100))
def test_stretch_preserves_area(K):
    s = square_torus(3, 2)
    assert abs(apply_teich_stretch(s, K).area - 6) < 1e-12 * 6


@given(st.floats(-10, 10), st.floats(-10, 10))
def test_rotation_composition(t1, t2):
    s = square_torus(2, 1)
    a = rotate_structure(rotate_structure(s, t1), t2)
    b = rotate_structure(s, t1 + t2)
    for (x1, y1), (x2, y2) in zip(a.polygons[0], b.polygons[0]):
        assert abs(x1 - x2) < 1e-12 and abs(y1 - y2) < 1e-12


@given(st.floats(0.1, 10), st.floats(-7, 7), st.fractions(0, 5, max_denominator=7), st.fractions(-3, 3, max_denominator=7))
def test_genus_invariant_under_deformations(K, theta, dh, tw):
    from flatteich.fixtures import load_fixture
    s = load_fixture("genus2_slit").surface
    for t in (apply_teich_stretch(s, K), rotate_structure(s, theta), plumb(s, "C2", dh, tw)):
        d = validate(t)
        assert d.genus == 2 and d.cone_angles == (4, 4)
