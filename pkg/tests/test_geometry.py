import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from smt_ellipse.geometry import (CartesianPoint, EllipticPoint, distance, ellipse_axes, is_inside,
                                  jacobian, to_cartesian, to_elliptic, wrap_angle)

xis = st.floats(0.0, 3.0)
etas = st.floats(-math.pi, math.pi, exclude_max=True)
coords = st.floats(-4.0, 4.0)


@given(xis.filter(lambda v: v > 1e-6), etas)
def test_round_trip_from_elliptic(xi, eta):
    # at xi = 0 the whole segment folds, so the eta branch is checked separately
    p = to_elliptic(to_cartesian(EllipticPoint(xi, eta)))
    c0 = to_cartesian(EllipticPoint(xi, eta))
    c1 = to_cartesian(p)
    assert math.hypot(c0.x1 - c1.x1, c0.x2 - c1.x2) < 1e-12 * (1 + math.cosh(xi))
    assert abs(p.xi - xi) < 1e-9


@given(coords, coords)
def test_round_trip_from_cartesian(x1, x2):
    c = to_cartesian(to_elliptic(CartesianPoint(x1, x2)))
    assert abs(c.x1 - x1) < 1e-12 * (1 + abs(x1)) + 1e-12
    assert abs(c.x2 - x2) < 1e-12 * (1 + abs(x2)) + 1e-12


@given(coords, coords)
def test_ranges(x1, x2):
    p = to_elliptic(CartesianPoint(x1, x2))
    assert p.xi >= 0
    assert -math.pi <= p.eta < math.pi


def test_wrap_sends_pi_to_minus_pi():
    assert wrap_angle(math.pi) == -math.pi
    assert wrap_angle(-math.pi) == -math.pi
    np.testing.assert_allclose(wrap_angle([3 * math.pi, 0.5 + 2 * math.pi]), [-math.pi, 0.5])


def test_negative_x1_axis_maps_to_minus_pi():
    p = to_elliptic(CartesianPoint(-2.0, 0.0))
    assert p.eta == -math.pi
    q = to_elliptic(CartesianPoint(-2.0, -0.0))
    assert q.eta == -math.pi


def test_focal_segment_eta_nonnegative():
    x1 = np.linspace(-0.99, 0.99, 11)
    p = to_elliptic(CartesianPoint(x1, np.zeros_like(x1)))
    assert np.all(p.xi < 1e-7)
    assert np.all(p.eta >= 0)
    np.testing.assert_allclose(np.cos(p.eta), x1, atol=1e-12)


def test_known_points():
    p = to_elliptic(CartesianPoint(0.0, math.sinh(1.0)))
    assert p.xi == pytest.approx(1.0)
    assert p.eta == pytest.approx(math.pi / 2)
    assert to_elliptic(CartesianPoint(1.0, 0.0)) == (0.0, 0.0)


def test_negative_xi_rejected():
    with pytest.raises(ValueError):
        to_cartesian(EllipticPoint(-0.1, 0.0))


@given(xis.filter(lambda v: v > 1e-3), etas)
def test_jacobian_matches_determinant(xi, eta):
    h = 1e-6
    c = [to_cartesian(EllipticPoint(xi + dx, eta + de)) for dx, de in ((h, 0), (-h, 0), (0, h), (0, -h))]
    dx1_dxi = (c[0].x1 - c[1].x1) / (2 * h)
    dx2_dxi = (c[0].x2 - c[1].x2) / (2 * h)
    dx1_de = (c[2].x1 - c[3].x1) / (2 * h)
    dx2_de = (c[2].x2 - c[3].x2) / (2 * h)
    det = abs(dx1_dxi * dx2_de - dx2_dxi * dx1_de)
    J = jacobian(EllipticPoint(xi, eta))
    assert J == pytest.approx(math.cosh(xi) ** 2 - math.cos(eta) ** 2, abs=1e-12)
    assert det == pytest.approx(J, rel=1e-6, abs=1e-8)


@given(xis, etas, xis, etas, xis, etas)
def test_distance_is_a_metric(a, b, c, d, e, f):
    p, q, r = EllipticPoint(a, b), EllipticPoint(c, d), EllipticPoint(e, f)
    assert distance(p, q) >= 0
    assert abs(distance(p, q) - distance(q, p)) < 1e-12
    assert distance(p, p) < 1e-12
    assert distance(p, r) <= distance(p, q) + distance(q, r) + 1e-12


def test_ellipse_membership():
    a, b = ellipse_axes(1.0)
    assert (a, b) == pytest.approx((math.cosh(1.0), math.sinh(1.0)))
    inside = is_inside(CartesianPoint(np.array([0.0, 0.99 * a, 1.01 * a]), np.zeros(3)), 1.0)
    assert inside.tolist() == [True, True, False]
