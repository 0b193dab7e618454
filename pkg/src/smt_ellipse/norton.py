"""Reference inversion for centers on a circle of radius R.

With Lambda(phi, k) = int Rf(phi, r) J0(r k) dr and its angular Fourier
coefficients D_n(k) = (1/2pi) int Lambda e^{-i n phi} dphi, the Hankel-type
moments of the image are F_n(k) = D_n(k) / J_n(k R), and

    f(rho, theta) = (1/2pi) sum_n e^{i n theta} int F_n(k) J_n(k rho) k dk.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bessel import bessel_j_table
from .forward import CircleAperture, Sinogram
from .images import ImageGrid, grid_mesh
from .reconstruct import k_weights, radial_projection

NORTON_FLOOR = 1e-3


@dataclass(frozen=True)
class NortonConfig:
    box: tuple[float, float, float, float] = (-1.4, -1.4, 1.4, 1.4)
    nx: int = 41
    ny: int = 41
    k_max: float = 12.0
    n_k: int = 240
    n_max: int = 32
    floor: float = NORTON_FLOOR
    rho_max: float | None = None

    @property
    def k_grid(self) -> np.ndarray:
        return self.k_max * np.arange(1, self.n_k + 1) / self.n_k


@dataclass(frozen=True, eq=False)
class CircularModes:
    """F[j, n + n_max] = F_n(k_j) for n = -n_max..n_max; ``mask`` marks skipped cells."""

    k: np.ndarray
    n_max: int
    F: np.ndarray
    mask: np.ndarray

    @property
    def orders(self) -> np.ndarray:
        return np.arange(-self.n_max, self.n_max + 1)

    def masked_fraction(self, oscillatory_only: bool = False, radius: float | None = None) -> float:
        """Share of skipped cells, optionally only where |n| < k R."""
        if not oscillatory_only:
            return float(self.mask.mean())
        region = np.abs(self.orders)[None, :] < self.k[:, None] * radius
        return float(self.mask[region].mean()) if region.any() else 0.0


def _signed(table: np.ndarray, n_max: int) -> np.ndarray:
    """Rows J_{-n_max}..J_{n_max} from a table of J_0..J_{n_max}."""
    sign = np.where(np.arange(n_max, 0, -1) % 2 == 1, -1.0, 1.0)
    neg = table[n_max:0:-1] * sign.reshape((-1,) + (1,) * (table.ndim - 1))
    return np.concatenate([neg, table], axis=0)


def circular_modes(s: Sinogram, k_grid, n_max: int = 32, floor: float = NORTON_FLOOR) -> CircularModes:
    if not isinstance(s.aperture, CircleAperture):
        raise ValueError("this reconstruction needs a circular aperture")
    R = s.aperture.radius
    k = np.asarray(k_grid, dtype=float)
    lam = radial_projection(s, k)
    phi = s.eta
    orders = np.arange(-n_max, n_max + 1)
    # (1/2pi) int e^{-i n phi} Lambda dphi by the periodic trapezoid rule
    D = np.exp(-1j * np.outer(orders, phi)) @ lam / s.n_eta
    jn = _signed(bessel_j_table(n_max, k * R), n_max)
    mask = np.abs(jn) < floor
    with np.errstate(divide="ignore", invalid="ignore"):
        F = np.where(mask, 0.0, D / jn)
    return CircularModes(k, n_max, F.T, mask.T)


def reconstruct_circle_points(s: Sinogram, x1, x2, cfg: NortonConfig = NortonConfig(),
                              modes: CircularModes | None = None):
    x1 = np.atleast_1d(np.asarray(x1, dtype=float))
    x2 = np.atleast_1d(np.asarray(x2, dtype=float))
    R = s.aperture.radius
    rho = np.hypot(x1, x2)
    if np.any(rho >= R):
        raise ValueError("evaluation points must lie strictly inside the aperture")
    theta = np.arctan2(x2, x1)
    if modes is None:
        modes = circular_modes(s, cfg.k_grid, cfg.n_max, cfg.floor)
    k = modes.k
    n = modes.n_max
    w = k_weights(k) * k
    acc = np.zeros((2 * n + 1, rho.size), dtype=complex)
    for j in range(k.size):
        jn = _signed(bessel_j_table(n, k[j] * rho), n)
        acc += (w[j] * modes.F[j])[:, None] * jn
    phase = np.exp(1j * np.outer(modes.orders, theta))
    return np.real(np.sum(phase * acc, axis=0)) / (2.0 * np.pi)


def reconstruct_circle(s: Sinogram, cfg: NortonConfig = NortonConfig()) -> ImageGrid:
    if not isinstance(s.aperture, CircleAperture):
        raise ValueError("this reconstruction needs a circular aperture")
    R = s.aperture.radius
    X1, X2 = grid_mesh(cfg.box, cfg.nx, cfg.ny)
    limit = R if cfg.rho_max is None else min(cfg.rho_max, R)
    rho = np.hypot(X1, X2)
    mask = (rho < limit) if cfg.rho_max is None else (rho <= limit)
    mask &= rho < R
    modes = circular_modes(s, cfg.k_grid, cfg.n_max, cfg.floor)
    values = np.full(X1.shape, np.nan)
    if mask.any():
        values[mask] = reconstruct_circle_points(s, X1[mask], X2[mask], cfg, modes)
    params = {"R": R, "k_max": cfg.k_max, "N_k": cfg.n_k, "n_terms": cfg.n_max}
    diag = {"masked_fraction": modes.masked_fraction(),
            "masked_fraction_oscillatory": modes.masked_fraction(True, R)}
    return ImageGrid(values, mask, cfg.box, params, diag)
