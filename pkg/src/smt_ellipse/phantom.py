"""Compactly supported test images and the closed-form circular mean of a Gaussian."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bessel import bessel_i0e
from .geometry import CartesianPoint, EllipticPoint, jacobian, to_cartesian, to_elliptic

KINDS = ("gaussian-truncated", "cosine-bump")


@dataclass(frozen=True)
class Bump:
    """One phantom component.

    ``gaussian-truncated`` is A exp(-|x - c|^2 / (2 sigma^2)) cut off at
    ``support_radius`` (default 6 sigma; ``math.inf`` leaves it untruncated).
    ``cosine-bump`` is A cos^2(pi |x - c| / (2 R)) for |x - c| < R with
    R = ``support_radius`` (default 3 sigma).
    """

    kind: str
    center: tuple[float, float]
    sigma: float
    amplitude: float = 1.0
    support_radius: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown phantom kind {self.kind!r}")
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))
        if self.support_radius is None:
            r = 6.0 * self.sigma if self.kind == "gaussian-truncated" else 3.0 * self.sigma
            object.__setattr__(self, "support_radius", r)
        if not self.support_radius > 0:
            raise ValueError("support_radius must be positive")

    @property
    def reach(self) -> float:
        """Radius beyond which the component is negligible (< 1e-20 A)."""
        if math.isinf(self.support_radius):
            return math.sqrt(2.0 * math.log(1e20)) * self.sigma
        return self.support_radius

    @property
    def underflow_radius(self) -> float:
        """Radius beyond which the component is exactly zero in double precision."""
        if math.isinf(self.support_radius):
            return math.sqrt(2.0 * 745.0) * self.sigma
        return self.support_radius

    def __call__(self, x1, x2):
        d2 = (np.asarray(x1) - self.center[0]) ** 2 + (np.asarray(x2) - self.center[1]) ** 2
        R = self.support_radius
        if self.kind == "gaussian-truncated":
            val = self.amplitude * np.exp(-d2 / (2.0 * self.sigma**2))
        else:
            val = self.amplitude * np.cos(0.5 * np.pi * np.sqrt(d2) / R) ** 2
        return np.where(d2 < R * R, val, 0.0)


@dataclass(frozen=True)
class PhantomSpec:
    components: tuple[Bump, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))

    def reach_bound(self) -> float:
        """Largest |x| at which the phantom can be nonnegligible."""
        return max((math.hypot(*b.center) + b.reach for b in self.components), default=0.0)


def gaussian(center=(0.3, 0.2), sigma=0.2, amplitude=1.0, support_radius=None) -> Bump:
    return Bump("gaussian-truncated", center, sigma, amplitude, support_radius)


def default_phantom() -> PhantomSpec:
    """Gaussian at (0.3, 0.2) with sigma 0.2, cut at 4.5 sigma so it lies inside xi < 1."""
    return PhantomSpec((gaussian(support_radius=0.9),))


def eval_phantom(spec: PhantomSpec, x1, x2):
    x1, x2 = np.broadcast_arrays(np.asarray(x1, dtype=float), np.asarray(x2, dtype=float))
    out = np.zeros(x1.shape)
    for b in spec.components:
        out = out + b(x1, x2)
    return out[()]


def eval_g(spec: PhantomSpec, xi, eta):
    """Phantom in elliptic coordinates times the area element.

    g(xi, eta) = (cosh^2 xi - cos^2 eta) f(x(xi, eta)), so that
    int int g dxi deta over [0, inf) x [-pi, pi) is the plane integral of f.
    """
    p = EllipticPoint(xi, eta)
    c = to_cartesian(p)
    return jacobian(p) * eval_phantom(spec, c.x1, c.x2)


def inside_violations(spec: PhantomSpec, xi0: float, n_boundary: int = 64) -> list[int]:
    """Indices of components whose support disk is not strictly inside xi < xi0."""
    t = 2.0 * np.pi * np.arange(n_boundary) / n_boundary
    bad = []
    for i, b in enumerate(spec.components):
        pts = CartesianPoint(b.center[0] + b.reach * np.cos(t), b.center[1] + b.reach * np.sin(t))
        # the disk is convex so checking its rim and center suffices up to sampling
        xi = np.append(to_elliptic(pts).xi, to_elliptic(CartesianPoint(*b.center)).xi)
        if np.any(xi >= xi0):
            bad.append(i)
    return bad


def inside_circle_violations(spec: PhantomSpec, radius: float) -> list[int]:
    return [i for i, b in enumerate(spec.components) if math.hypot(*b.center) + b.reach >= radius]


def analytic_smt_gaussian(center, sigma: float, amplitude: float, x1, x2, r):
    """Line integral of an untruncated Gaussian over the circle |y - x| = r.

    Equals 2 pi r A exp(-(d^2 + r^2) / (2 sigma^2)) I_0(d r / sigma^2) with
    d = |x - center|, written with the scaled I_0 so it never overflows.
    """
    d = np.hypot(np.asarray(x1, dtype=float) - center[0], np.asarray(x2, dtype=float) - center[1])
    r = np.asarray(r, dtype=float)
    s2 = sigma * sigma
    return (2.0 * np.pi * r * amplitude * np.exp(-((d - r) ** 2) / (2.0 * s2))
            * bessel_i0e(d * r / s2))
