import dataclasses
import math
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from oracles import shear_dilatation
from flatteich.bounds import ext_interval
from flatteich.curves import develop_curve, holonomy_stats, transport_curve
from flatteich.errors import BadK, BadModulus, BadN, FixtureIncomplete
from flatteich.surface import MarkedPoint, Stretch, rotate_structure
from flatteich.twist import (
    leg_point,
    midpoint_y_star,
    twist_direction,
    twist_parameters,
    twist_parameters_for_modulus,
)

R1 = math.exp(2 * math.pi)  # M = 1


def test_parameters_n0():
    p = twist_parameters(R1, 0)
    assert p.k == 0 and p.K == 1 and p.distance == 0


def test_parameters_n2():
    p = twist_parameters(R1, 2)
    assert abs(p.M - 1) < 1e-15
    assert abs(p.sigma - math.pi / 4) < 1e-15
    assert abs(p.k - 1 / math.sqrt(2)) < 1e-15
    assert abs(p.K - (3 + 2 * math.sqrt(2))) < 1e-12


def test_parameters_n100_closed_form():
    # exact value 1 + 2x^2 + 2x sqrt(1+x^2) with x = 50
    x = 50
    assert abs(twist_parameters(R1, 100).K - (1 + 2 * x * x + 2 * x * math.sqrt(1 + x * x))) < 1e-9


@pytest.mark.parametrize("n", [1, 2, 3, 10, 100, 512])
@pytest.mark.parametrize("M", [0.25, 1.0, 3.0])
def test_K_is_the_shear_dilatation(n, M):
    """n twists in a cylinder of modulus M shear it by n/M; K is that shear's dilatation."""
    p = twist_parameters_for_modulus(M, n)
    assert math.isclose(p.K, shear_dilatation(n / M), rel_tol=1e-9)
    assert math.isclose(p.K, (1 + p.k) / (1 - p.k), rel_tol=1e-9)


def test_asymptotics():
    p = twist_parameters(R1, 256)
    assert abs(p.K / 256 ** 2 - 4 * math.pi ** 2 / math.log(R1) ** 2) < 0.01
    assert abs(p.sigma * 256 - 2 * p.M) / (2 * p.M) < 0.01


def test_bad_modulus():
    with pytest.raises(BadModulus):
        twist_parameters(1.0, 3)
    with pytest.raises(BadModulus):
        twist_parameters_for_modulus(0, 3)


@given(st.floats(1.01, 1e6), st.integers(-10 ** 6, 10 ** 6))
def test_parameter_invariants(R, n):
    p = twist_parameters(R, n)
    assert 0 <= p.k < 1 and p.K >= 1
    assert twist_parameters(R, -n).k == p.k
    if n >= 1:
        assert 0 < p.sigma <= math.pi / 2
        assert twist_parameters(R, n + 1).K >= p.K


@given(st.floats(1.01, 1e3), st.integers(1, 10 ** 4))
def test_distance_monotone(R, n):
    assert twist_parameters(R, n + 1).distance >= twist_parameters(R, n).distance


# -- leg points -------------------------------------------------------------

START = (F(1, 2) + F(1, 1000), F(1, 2) + F(1, 997))


def test_leg_point_k0_and_bad_k(torus_fx):
    x0 = MarkedPoint(torus_fx.surface)
    assert leg_point(x0, 1.3, 0) is x0
    for k in (-0.1, 1, 1.5):
        with pytest.raises(BadK):
            leg_point(x0, 0.0, k)


@pytest.mark.parametrize("n", [1, 2, 5, -3])
def test_leg_endpoint_is_the_twisted_torus(torus_fx, n):
    """The stretch in direction -(sigma_n + pi) lands on tau^n x0: every class has the same ext."""
    s = torus_fx.surface
    x0 = MarkedPoint(s)
    p = twist_parameters_for_modulus(s.cylinder("C").modulus, n)
    end = leg_point(x0, twist_direction(n, p.M), p.k)
    y = x0.twist("C", n)
    assert abs(end.surface.area - y.surface.area) < 1e-12
    for a, b in [(1, 0), (0, 1), (1, 1), (2, -3), (5, 7), (-4, 9)]:
        g = develop_curve(s, "g", 0, START, [(F(a), F(b))])
        assert math.isclose(float(ext_interval(g, end).lo), float(ext_interval(g, y).lo), rel_tol=1e-12)


def test_leg_distances_monotone(torus_fx):
    x0 = MarkedPoint(torus_fx.surface)
    ds = []
    for k in (0.1, 0.5, 0.9):
        pt = leg_point(x0, -2.0, k)
        K = next(m.K for m in pt.marking_log if isinstance(m, Stretch))
        ds.append(0.5 * math.log(K))
    assert ds == sorted(ds) and ds[0] > 0


# -- triangles --------------------------------------------------------------

def test_triangle_n0(slit):
    from flatteich.twist import triangle_vertices
    t = triangle_vertices(slit, 0)
    assert t.x0 == t.y1 == t.y2 == t.y_star


def test_triangle_n1_transports(slit):
    from flatteich.twist import triangle_vertices
    t = triangle_vertices(slit, 1)
    s = slit.surface
    g1, g2 = slit.curves["gamma1"], slit.curves["gamma2"]
    moved = holonomy_stats(transport_curve(g2, t.y2), s)
    assert moved.h == 1 and moved.v == 1
    assert transport_curve(g1, t.y2) is g1
    assert transport_curve(g2, t.y1) is g2


def test_triangle_swap_symmetry(slit):
    from flatteich.twist import triangle_vertices
    swap = {"beta1": "beta2", "beta2": "beta1", "gamma1": "gamma2", "gamma2": "gamma1", "A1": "A2", "A2": "A1"}
    fx2 = dataclasses.replace(slit, roles={swap[r]: v for r, v in slit.roles.items()})
    for n in (1, 3, 7):
        a = triangle_vertices(slit, n)
        b = triangle_vertices(fx2, -n)
        assert b.y1.marking_log == a.y2.marking_log and b.y2.marking_log == a.y1.marking_log


def test_triangle_needs_roles(slit):
    from flatteich.twist import triangle_vertices
    fx = dataclasses.replace(slit, roles={k: v for k, v in slit.roles.items() if k != "A2"})
    with pytest.raises(FixtureIncomplete, match="A2"):
        triangle_vertices(fx, 3)


def test_y_star(slit):
    from flatteich.twist import triangle_vertices
    assert triangle_vertices(slit, 1).y_star == triangle_vertices(slit, 1).y1
    t = triangle_vertices(slit, 16)
    g2 = slit.curves["gamma2"]

    def h(pt):
        return holonomy_stats(transport_curve(g2, pt), rotate_structure(pt.surface, t.theta_12)).h

    assert abs(h(t.y_star) / h(t.y1) - 4) < 1e-12
    K = [m.K for m in t.y_star.marking_log if isinstance(m, Stretch)]
    assert K == [16] and abs(0.5 * math.log(K[0]) - 0.5 * math.log(16)) < 1e-15
    with pytest.raises(BadN):
        midpoint_y_star(triangle_vertices(slit, 0))
