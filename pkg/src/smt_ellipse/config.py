"""Run configuration: an INI-style file with [section] headers and key = value lines.

Example::

    [aperture]
    kind = ellipse
    xi0 = 1.0

    [sinogram]
    n_eta = 256
    n_r = 400
    r_max = 4.0
    n_quad = 2048

    [phantom]
    components = 1
    c0.kind = gaussian-truncated
    c0.center = 0.3, 0.2
    c0.sigma = 0.2
    c0.amplitude = 1.0
    c0.support_radius = 0.9

    [reconstruction]
    box = -1.4, -1.4, 1.4, 1.4
    nx = 41
    ny = 41
    k_max = 12
    n_k = 240
    n_terms = 40
"""

from __future__ import annotations

import configparser
import math
from dataclasses import asdict, dataclass, field

from .forward import CircleAperture, EllipseAperture
from .norton import NortonConfig
from .phantom import Bump, PhantomSpec, default_phantom
from .reconstruct import ReconConfig


class ConfigError(ValueError):
    """Invalid or inconsistent configuration."""


@dataclass(frozen=True)
class SinogramGrid:
    n_eta: int = 256
    n_r: int = 400
    r_max: float = 4.0
    n_quad: int = 2048

    def __post_init__(self):
        if self.n_eta < 2 or self.n_r < 2 or self.n_quad < 8:
            raise ConfigError("sinogram grid sizes are too small")
        if not self.r_max > 0:
            raise ConfigError("r_max must be positive")


@dataclass(frozen=True)
class RunConfig:
    aperture: EllipseAperture | CircleAperture = EllipseAperture(1.0)
    phantom: PhantomSpec = field(default_factory=default_phantom)
    sinogram: SinogramGrid = SinogramGrid()
    recon: ReconConfig = ReconConfig()
    norton: NortonConfig = NortonConfig()

    def echo(self) -> list[str]:
        """Header lines that record every parameter of the run."""
        lines = []
        if isinstance(self.aperture, EllipseAperture):
            lines.append(f"aperture.kind=ellipse aperture.xi0={self.aperture.xi0!r}")
        else:
            lines.append(f"aperture.kind=circle aperture.R={self.aperture.radius!r}")
        lines.append(" ".join(f"sinogram.{k}={v!r}" for k, v in asdict(self.sinogram).items()))
        for i, b in enumerate(self.phantom.components):
            lines.append(
                f"phantom.c{i}.kind={b.kind} phantom.c{i}.center={b.center[0]!r},{b.center[1]!r} "
                f"phantom.c{i}.sigma={b.sigma!r} phantom.c{i}.amplitude={b.amplitude!r} "
                f"phantom.c{i}.support_radius={b.support_radius!r}")
        rc = self.recon
        lines.append(
            f"reconstruction.box={','.join(repr(v) for v in rc.box)} reconstruction.nx={rc.nx} "
            f"reconstruction.ny={rc.ny} reconstruction.k_max={rc.k_max!r} reconstruction.n_k={rc.n_k} "
            f"reconstruction.n_terms={rc.n_terms} reconstruction.tol_tail={rc.tol_tail!r} "
            f"reconstruction.xi_max={rc.xi_max!r} reconstruction.n_max={self.norton.n_max} "
            f"reconstruction.floor={self.norton.floor!r}")
        return lines


def _floats(text: str, n: int, key: str) -> tuple[float, ...]:
    parts = [p for p in text.replace(" ", "").split(",") if p]
    if len(parts) != n:
        raise ConfigError(f"{key} needs {n} comma-separated numbers")
    return tuple(_num(p, key) for p in parts)


def _num(text: str, key: str) -> float:
    try:
        val = float(text)
    except ValueError:
        raise ConfigError(f"{key}: {text!r} is not a number") from None
    if math.isnan(val):
        raise ConfigError(f"{key} is NaN")
    return val


def _int(text: str, key: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"{key}: {text!r} is not an integer") from None


def parse_config(text: str) -> RunConfig:
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    known = {"aperture", "sinogram", "phantom", "reconstruction"}
    extra = set(cp.sections()) - known
    if extra:
        raise ConfigError(f"unknown section(s): {', '.join(sorted(extra))}")
    try:
        return _build(cp)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _build(cp: configparser.ConfigParser) -> RunConfig:
    ap = cp["aperture"] if cp.has_section("aperture") else {}
    kind = ap.get("kind", "ellipse")
    if kind == "ellipse":
        aperture = EllipseAperture(_num(ap.get("xi0", "1.0"), "aperture.xi0"))
    elif kind == "circle":
        aperture = CircleAperture(_num(ap.get("R", ap.get("r", "1.5")), "aperture.R"))
    else:
        raise ConfigError(f"aperture.kind must be 'ellipse' or 'circle', not {kind!r}")

    sg = cp["sinogram"] if cp.has_section("sinogram") else {}
    sino = SinogramGrid(
        _int(sg.get("n_eta", "256"), "sinogram.n_eta"),
        _int(sg.get("n_r", "400"), "sinogram.n_r"),
        _num(sg.get("r_max", "4.0"), "sinogram.r_max"),
        _int(sg.get("n_quad", "2048"), "sinogram.n_quad"),
    )

    if cp.has_section("phantom"):
        ph = cp["phantom"]
        count = _int(ph.get("components", "0"), "phantom.components")
        if count < 1:
            raise ConfigError("phantom.components must be at least 1")
        comps = []
        for i in range(count):
            p = f"c{i}."
            if p + "center" not in ph or p + "sigma" not in ph:
                raise ConfigError(f"phantom component c{i} needs center and sigma")
            sr = ph.get(p + "support_radius")
            comps.append(Bump(
                ph.get(p + "kind", "gaussian-truncated"),
                _floats(ph[p + "center"], 2, f"phantom.c{i}.center"),
                _num(ph[p + "sigma"], f"phantom.c{i}.sigma"),
                _num(ph.get(p + "amplitude", "1.0"), f"phantom.c{i}.amplitude"),
                None if sr is None else _num(sr, f"phantom.c{i}.support_radius"),
            ))
        phantom = PhantomSpec(tuple(comps))
    else:
        phantom = default_phantom()

    rs = cp["reconstruction"] if cp.has_section("reconstruction") else {}
    box = _floats(rs.get("box", "-1.4, -1.4, 1.4, 1.4"), 4, "reconstruction.box")
    if not (box[0] < box[2] and box[1] < box[3]):
        raise ConfigError("reconstruction.box must be x0, y0, x1, y1 with x0 < x1 and y0 < y1")
    nx = _int(rs.get("nx", "41"), "reconstruction.nx")
    ny = _int(rs.get("ny", "41"), "reconstruction.ny")
    k_max = _num(rs.get("k_max", "12"), "reconstruction.k_max")
    n_k = _int(rs.get("n_k", "240"), "reconstruction.n_k")
    xi_max = rs.get("xi_max")
    recon = ReconConfig(
        box=box, nx=nx, ny=ny, k_max=k_max, n_k=n_k,
        n_terms=_int(rs.get("n_terms", "40"), "reconstruction.n_terms"),
        tol_tail=_num(rs.get("tol_tail", "1e-10"), "reconstruction.tol_tail"),
        xi_max=None if xi_max is None else _num(xi_max, "reconstruction.xi_max"),
    )
    norton = NortonConfig(
        box=box, nx=nx, ny=ny, k_max=k_max, n_k=n_k,
        n_max=_int(rs.get("n_max", "32"), "reconstruction.n_max"),
        floor=_num(rs.get("floor", "1e-3"), "reconstruction.floor"),
    )
    return RunConfig(aperture, phantom, sino, recon, norton)


def load_config(path) -> RunConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text)
