"""Elliptic coordinates with foci at (+1, 0) and (-1, 0).

A point is written x = (cosh(xi) cos(eta), sinh(xi) sin(eta)) with
xi >= 0 and eta in [-pi, pi).  The level curve xi = xi0 is an ellipse
with semi-axes cosh(xi0) and sinh(xi0).
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np


class EllipticPoint(NamedTuple):
    xi: np.ndarray | float
    eta: np.ndarray | float


class CartesianPoint(NamedTuple):
    x1: np.ndarray | float
    x2: np.ndarray | float


def wrap_angle(eta):
    """Map angles into [-pi, pi)."""
    eta = np.asarray(eta, dtype=float)
    return np.mod(eta + np.pi, 2.0 * np.pi) - np.pi


def to_cartesian(p: EllipticPoint) -> CartesianPoint:
    xi = np.asarray(p.xi, dtype=float)
    if np.any(xi < 0):
        raise ValueError("xi must be nonnegative")
    eta = np.asarray(p.eta, dtype=float)
    return CartesianPoint(np.cosh(xi) * np.cos(eta), np.sinh(xi) * np.sin(eta))


def to_elliptic(c: CartesianPoint) -> EllipticPoint:
    """Inverse map, using x1 + i x2 = cosh(xi + i eta).

    On the focal segment (x2 = 0, |x1| <= 1) the returned eta is
    nonnegative, except at x1 = -1 where eta = -pi.
    """
    x1 = np.asarray(c.x1, dtype=float)
    x2 = np.asarray(c.x2, dtype=float)
    # +0.0 turns a signed zero into +0 so the branch cut is approached from above
    w = np.arccosh(x1 + 1j * (x2 + 0.0))
    xi = np.abs(w.real)
    eta = np.where(w.real < 0, -w.imag, w.imag)
    eta = np.where(eta >= np.pi, eta - 2.0 * np.pi, eta)
    return EllipticPoint(xi[()], eta[()])


def jacobian(p: EllipticPoint):
    """Area element cosh^2(xi) - cos^2(eta) of the map (xi, eta) -> x."""
    xi = np.asarray(p.xi, dtype=float)
    eta = np.asarray(p.eta, dtype=float)
    return np.sinh(xi) ** 2 + np.sin(eta) ** 2


def distance(p: EllipticPoint, s: EllipticPoint):
    """Euclidean distance between two points in elliptic coordinates."""
    a = to_cartesian(p)
    b = to_cartesian(s)
    return np.hypot(a.x1 - b.x1, a.x2 - b.x2)


def is_inside(c: CartesianPoint, xi0: float):
    """True where the point lies strictly inside the ellipse xi = xi0."""
    return to_elliptic(c).xi < xi0


def ellipse_axes(xi0: float) -> tuple[float, float]:
    return float(np.cosh(xi0)), float(np.sinh(xi0))
