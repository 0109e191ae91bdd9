from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bvrgame.attack import select_strategy
from bvrgame.errors import CoincidentAgents, DegenerateOval, InvalidSpeedRatio, OutsideOval, VerticalBisector
from bvrgame.geometry import (
    CartesianOval,
    Point2,
    RelativeFrame,
    apollonius,
    attack_relative_frame,
    bisector,
    oval_inner_radius,
    oval_radius_bounds,
    wrap_angle,
)

coord = st.floats(-50, 50, allow_nan=False)


@given(st.floats(-100, 100))
def test_wrap_angle_range(a):
    w = wrap_angle(a)
    assert -math.pi <= w < math.pi
    assert math.isclose(math.cos(w), math.cos(a), abs_tol=1e-9)
    assert math.isclose(math.sin(w), math.sin(a), abs_tol=1e-9)


@given(coord, coord, st.floats(-4, 4), coord, coord)
def test_frame_round_trip(ox, oy, rot, px, py):
    f = RelativeFrame(Point2(ox, oy), rot)
    back = f.to_fixed(f.to_relative((px, py)))
    assert back.x == pytest.approx(px, abs=1e-9)
    assert back.y == pytest.approx(py, abs=1e-9)


def test_relative_frame_puts_r1_on_axis(section_v):
    sc = section_v
    frame, x1, _, _ = attack_relative_frame(sc.B, sc.R1, sc.R2, sc.Rs)
    p = frame.to_relative(sc.R1)
    assert p.x == pytest.approx(x1) and p.y == pytest.approx(0.0, abs=1e-12)


@settings(max_examples=300)
@given(st.floats(1.5, 20), st.floats(1.01, 3), st.floats(0.1, 1.0), st.floats(-math.pi, math.pi))
def test_inner_oval_simultaneous_arrival(x1, beta, frac, theta):
    rho = frac * x1 * 0.9
    oval = CartesianOval(x1, beta, rho)
    try:
        P = oval.point(theta)
    except OutsideOval:
        return
    # interceptor needs |P-R| - rho; attacker needs |P| / 1 at speed ratio beta
    assert math.hypot(P.x - x1, P.y) - rho == pytest.approx(beta * math.hypot(P.x, P.y), rel=1e-9, abs=1e-9)


def test_radius_bounds_are_axis_points():
    oval = CartesianOval(10.0, 1.25, 5.0)
    lo, hi = oval_radius_bounds(oval)
    assert oval_inner_radius(oval, 0.0) == pytest.approx(lo)
    assert oval_inner_radius(oval, math.pi) == pytest.approx(abs(hi))


def test_degenerate_oval():
    with pytest.raises(DegenerateOval):
        oval_radius_bounds(CartesianOval(4.0, 1.25, 5.0))


@settings(max_examples=300)
@given(coord, coord, coord, coord, st.floats(0.05, 0.95), st.floats(0, 2 * math.pi))
def test_apollonius_locus(ax, ay, bx, by, alpha, t):
    if math.hypot(ax - bx, ay - by) < 1e-3:
        return
    c = apollonius((ax, ay), (bx, by), alpha)
    P = (c.center.x + c.radius * math.cos(t), c.center.y + c.radius * math.sin(t))
    dB = math.hypot(P[0] - bx, P[1] - by)
    dA = math.hypot(P[0] - ax, P[1] - ay)
    assert dB == pytest.approx(alpha * dA, rel=1e-9, abs=1e-9)


def test_apollonius_errors():
    with pytest.raises(InvalidSpeedRatio):
        apollonius((0, 0), (1, 0), 1.0)
    with pytest.raises(CoincidentAgents):
        apollonius((1, 1), (1, 1), 0.5)


@given(st.floats(0.5, 30), coord, coord.filter(lambda v: abs(v) > 1e-3), st.floats(-40, 40))
def test_bisector_equidistant(x1, x2, y2, x):
    line = bisector((x1, 0.0), (x2, y2))
    P = (x, line.y(x))
    assert math.hypot(P[0] - x1, P[1]) == pytest.approx(math.hypot(P[0] - x2, P[1] - y2), rel=1e-9, abs=1e-7)


def test_vertical_bisector():
    with pytest.raises(VerticalBisector) as e:
        bisector((4.0, 0.0), (-2.0, 0.0))
    assert e.value.x == pytest.approx(1.0)


def test_section_v_aimpoint_on_both_ovals_and_bisector(section_v):
    sc = section_v
    sol = select_strategy(sc)
    frame, x1, R2p, _ = attack_relative_frame(sc.B, sc.R1, sc.R2, sc.Rs)
    P = frame.to_relative(sol.aimpoint)
    line = bisector((x1, 0.0), R2p)
    assert P.y == pytest.approx(line.y(P.x), abs=1e-9)
    for R in (sc.R1, sc.R2):
        assert R.dist(sol.aimpoint) - sc.rho == pytest.approx(sc.beta * sc.B.dist(sol.aimpoint), abs=1e-9)
