"""Spherical mean transform data: circle integrals of a phantom around detector centers."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import EllipticPoint, to_cartesian
from .phantom import PhantomSpec, eval_phantom


@dataclass(frozen=True)
class EllipseAperture:
    """Detectors on the ellipse xi = xi0, indexed by eta."""

    xi0: float

    def __post_init__(self):
        if not self.xi0 > 0:
            raise ValueError("xi0 must be positive")

    def centers(self, eta):
        c = to_cartesian(EllipticPoint(np.full(np.shape(eta), self.xi0), eta))
        return c.x1, c.x2

    @property
    def extent(self) -> float:
        return math.cosh(self.xi0)

    def header(self) -> str:
        return f"# aperture=ellipse xi0={self.xi0!r}"


@dataclass(frozen=True)
class CircleAperture:
    """Detectors on the circle of radius R, indexed by the polar angle."""

    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("radius must be positive")

    def centers(self, phi):
        phi = np.asarray(phi, dtype=float)
        return self.radius * np.cos(phi), self.radius * np.sin(phi)

    @property
    def extent(self) -> float:
        return self.radius

    def header(self) -> str:
        return f"# aperture=circle R={self.radius!r}"


Aperture = EllipseAperture | CircleAperture


def angle_grid(n: int) -> np.ndarray:
    """Uniform angles -pi + 2 pi j / n, j = 0..n-1.

    Built so that angle j and angle n - j are exact negatives.
    """
    j = np.arange(n)
    half = -np.pi + 2.0 * np.pi * np.minimum(j, n - j) / n
    return np.where(j <= n - j, half, -half)


@dataclass(frozen=True, eq=False)
class Sinogram:
    """values[j, i] = Rf(center(eta_j), r_i) with r_i = i r_max / (N_r - 1)."""

    aperture: EllipseAperture | CircleAperture
    values: np.ndarray
    r_max: float

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or min(v.shape) < 2:
            raise ValueError("values must be a 2-d array with at least 2 rows and columns")
        if not self.r_max > 0:
            raise ValueError("r_max must be positive")
        object.__setattr__(self, "values", v)

    @property
    def n_eta(self) -> int:
        return self.values.shape[0]

    @property
    def n_r(self) -> int:
        return self.values.shape[1]

    @property
    def eta(self) -> np.ndarray:
        return angle_grid(self.n_eta)

    @property
    def r(self) -> np.ndarray:
        return np.linspace(0.0, self.r_max, self.n_r)


def forward_smt(spec: PhantomSpec, x1, x2, r, n_quad: int = 2048):
    """Circle integral int_{|y - x| = r} f(y) ds(y) by the periodic trapezoid rule.

    ``x1``, ``x2`` and ``r`` broadcast against each other.
    """
    x1, x2, r = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x1, x2, r)))
    t = angle_grid(n_quad)
    ct, st = np.cos(t), np.sin(t)
    y1 = x1[..., None] + r[..., None] * ct
    y2 = x2[..., None] + r[..., None] * st
    vals = eval_phantom(spec, y1, y2)
    return (2.0 * np.pi / n_quad) * r * vals.sum(axis=-1)


def build_sinogram(spec: PhantomSpec, aperture, n_eta: int = 256, n_r: int = 400,
                   r_max: float = 4.0, n_quad: int = 2048) -> Sinogram:
    """Sample Rf on the (angle, radius) grid of the aperture.

    Rejects ``r_max`` below the aperture extent plus the phantom's reach,
    since circles beyond it would still see the phantom.
    """
    bound = aperture.extent + spec.reach_bound()
    if r_max < bound:
        raise ValueError(f"r_max={r_max} is below the required bound {bound:.6g}")
    eta = angle_grid(n_eta)
    r = np.linspace(0.0, r_max, n_r)
    c1, c2 = aperture.centers(eta)
    out = np.zeros((n_eta, n_r))
    for j in range(n_eta):
        # only radii whose circle can meet some component are integrated
        hit = np.zeros(n_r, dtype=bool)
        for b in spec.components:
            d = math.hypot(c1[j] - b.center[0], c2[j] - b.center[1])
            hit |= np.abs(r - d) < b.underflow_radius
        hit[0] = False
        if hit.any():
            out[j, hit] = forward_smt(spec, c1[j], c2[j], r[hit], n_quad)
    return Sinogram(aperture, out, r_max)


def write_sinogram(s: Sinogram, path, extra_header=()) -> None:
    """Two header lines, then ``extra_header`` as comments, then the values."""
    with open(path, "w") as fh:
        fh.write(s.aperture.header() + "\n")
        fh.write(f"# N_eta={s.n_eta} N_r={s.n_r} r_max={s.r_max!r}\n")
        for line in extra_header:
            fh.write(f"# {line}\n")
        np.savetxt(fh, s.values, fmt="%.17g", delimiter=",")


def _parse_header(line: str) -> dict[str, str]:
    body = line.lstrip("#").split()
    out = {}
    for tok in body:
        if "=" not in tok:
            raise ValueError(f"malformed header token {tok!r}")
        k, v = tok.split("=", 1)
        out[k] = v
    return out


def read_sinogram(path) -> Sinogram:
    with open(path) as fh:
        first = fh.readline()
        second = fh.readline()
        if not (first.startswith("#") and second.startswith("#")):
            raise ValueError("sinogram file must start with two '#' header lines")
        h1 = _parse_header(first)
        h2 = _parse_header(second)
        try:
            kind = h1["aperture"]
            if kind == "ellipse":
                aperture = EllipseAperture(float(h1["xi0"]))
            elif kind == "circle":
                aperture = CircleAperture(float(h1["R"]))
            else:
                raise ValueError(f"unknown aperture {kind!r}")
            n_eta, n_r, r_max = int(h2["N_eta"]), int(h2["N_r"]), float(h2["r_max"])
        except KeyError as exc:
            raise ValueError(f"missing header field {exc}") from None
        values = np.loadtxt(fh, delimiter=",", ndmin=2)
    if values.shape != (n_eta, n_r):
        raise ValueError(f"expected {n_eta}x{n_r} values, found {values.shape[0]}x{values.shape[1]}")
    return Sinogram(aperture, values, r_max)
