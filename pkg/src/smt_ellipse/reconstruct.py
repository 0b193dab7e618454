"""Inversion of spherical means with centers on an ellipse.

For each wavenumber k on a uniform grid the data are reduced to

    D_n(k) = int int Rf(eta, r) ce_n(eta) J0(r k) deta dr,

which gives the mode coefficients K_n = D_n / (mu_n Ce_n(xi0)) (and L_n from
se_n).  At an interior point (xi', eta') they assemble

    Phi(k) = (1/pi) sum_n [mu_n Ce_n(xi') ce_n(eta') K_n + upsilon_n Se_n(xi') se_n(eta') L_n],

which equals int int g(lam, theta) J0(k |x' - y|) dtheta dlam.  The image
value is the order-zero Hankel inversion at the point itself,

    f(x') = (1/2pi) int_0^k_max Phi(k) J0(r' k) k dk   at r' = 0.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .bessel import bessel_j0
from .expansion import ExpansionCoefficients, compute_coefficients
from .forward import EllipseAperture, Sinogram
from .geometry import CartesianPoint, to_elliptic
from .images import ImageGrid, grid_mesh
from .mathieu import MathieuBasis, build_basis, q_from_k

log = logging.getLogger(__name__)

MODE_FLOOR = 1e-12


@dataclass(frozen=True)
class ReconConfig:
    """Reconstruction parameters.

    ``xi_max`` restricts evaluation to xi' <= xi_max (default: the whole
    interior xi' < xi0).  ``r_primes`` are the off-center radii used to
    check the r' -> 0 limit.
    """

    box: tuple[float, float, float, float] = (-1.4, -1.4, 1.4, 1.4)
    nx: int = 41
    ny: int = 41
    k_max: float = 12.0
    n_k: int = 240
    n_terms: int = 40
    tol_tail: float = 1e-10
    r_primes: tuple[float, ...] = (0.05, 0.025)
    xi_max: float | None = None
    mode_floor: float = MODE_FLOOR
    n_quad_coef: int = 1024
    coefficients: str = "integral"

    def __post_init__(self):
        if not self.k_max > 0 or self.n_k < 2:
            raise ValueError("need k_max > 0 and n_k >= 2")
        if self.n_terms < 0 or self.nx < 1 or self.ny < 1:
            raise ValueError("grid sizes must be positive")
        if self.coefficients not in ("integral", "closed"):
            raise ValueError("coefficients must be 'integral' or 'closed'")

    @property
    def k_grid(self) -> np.ndarray:
        return self.k_max * np.arange(1, self.n_k + 1) / self.n_k


class SpectralCache:
    """Bases and expansion coefficients keyed by q."""

    def __init__(self, n_terms: int, method: str = "integral", n_quad: int = 1024):
        self.n_terms = n_terms
        self.method = method
        self.n_quad = n_quad
        self._store: dict[float, tuple[MathieuBasis, ExpansionCoefficients]] = {}

    def get(self, k: float):
        q = float(q_from_k(k))
        hit = self._store.get(q)
        if hit is None:
            b = build_basis(q, self.n_terms)
            if self.method == "closed":
                from .expansion import closed_form_coefficients
                c = closed_form_coefficients(b)
            else:
                c = compute_coefficients(b, n_quad=self.n_quad)
            hit = self._store[q] = (b, c)
        return hit


@dataclass(frozen=True, eq=False)
class ModeCoefficients:
    k: float
    K: np.ndarray
    L: np.ndarray
    keep_ce: np.ndarray
    keep_se: np.ndarray


@dataclass(frozen=True, eq=False)
class ModeSpectrum:
    xi0: float
    k: np.ndarray
    modes: list[ModeCoefficients]
    bases: list[MathieuBasis] = field(repr=False)
    coefficients: list[ExpansionCoefficients] = field(repr=False)

    @property
    def K(self) -> np.ndarray:
        return np.array([m.K for m in self.modes])

    @property
    def L(self) -> np.ndarray:
        return np.array([m.L for m in self.modes])

    @property
    def dropped_fraction(self) -> float:
        kept = sum(m.keep_ce.sum() + m.keep_se[1:].sum() for m in self.modes)
        total = sum(m.keep_ce.size + m.keep_se.size - 1 for m in self.modes)
        return 1.0 - kept / total


def _mean_taylor(values: np.ndarray, h: float, n_fit: int = 8):
    """m(0), m''(0) and m''''(0) of the circle mean m = Rf / r, one row per angle."""
    n = min(n_fit, values.shape[1] - 1)
    r = h * np.arange(1, n + 1)
    u = (r / r[-1]) ** 2
    c = np.linalg.solve(np.vander(u, n, increasing=True), (values[:, 1:n + 1] / r).T)
    s2 = r[-1] ** 2
    zero = np.zeros(values.shape[0])
    m2 = 2.0 * c[1] / s2 if n > 1 else zero
    m4 = 24.0 * c[2] / s2**2 if n > 2 else zero
    return c[0], m2, m4


def radial_projection(s: Sinogram, k) -> np.ndarray:
    """Lambda(eta_j, k) = int Rf(eta_j, r) J0(r k) dr, shape (N_eta, len(k))."""
    k = np.atleast_1d(np.asarray(k, dtype=float))
    r = s.r
    h = r[1]
    w = np.full(r.size, h)
    w[0] *= 0.5
    w[-1] *= 0.5
    out = s.values @ (w[:, None] * bessel_j0(np.outer(r, k)))
    # Rf = r m(r) with m even, so the integrand r m(r) J0(kr) is odd and the
    # trapezoid rule needs the Euler-Maclaurin terms at r = 0 (the far end
    # is past the support)
    if s.n_r >= 4:
        m0, m2, m4 = (x[:, None] for x in _mean_taylor(s.values, h))
        k2 = (k * k)[None, :]
        g1 = m0
        g3 = 3.0 * m2 - 1.5 * k2 * m0
        g5 = 5.0 * m4 - 15.0 * k2 * m2 + 1.875 * k2 * k2 * m0
        out += h**2 / 12.0 * g1 - h**4 / 720.0 * g3 + h**6 / 30240.0 * g5
    return out


def _check_ellipse(s: Sinogram) -> float:
    if not isinstance(s.aperture, EllipseAperture):
        raise ValueError("this reconstruction needs an elliptic aperture")
    return s.aperture.xi0


def project_modes(s: Sinogram, b: MathieuBasis, lam: np.ndarray):
    """D_n and E_n from one column of radial projections."""
    eta = s.eta
    dq = 2.0 * np.pi / s.n_eta
    D = dq * (b.ce_table(eta) @ lam)
    E = dq * (b.se_table(eta) @ lam)
    return D, E


def mode_coefficients(s: Sinogram, b: MathieuBasis, c: ExpansionCoefficients, k: float,
                      floor: float = MODE_FLOOR, lam: np.ndarray | None = None) -> ModeCoefficients:
    """K_n and L_n at one wavenumber.

    A mode is dropped when its weight at the aperture, mu_n Ce_n(xi0)^2
    (= 2 pi Mc_n(xi0)^2), falls below ``floor`` times the largest weight.
    This removes both evanescent orders and orders whose radial function
    vanishes at the aperture for this k.
    """
    xi0 = _check_ellipse(s)
    if lam is None:
        lam = radial_projection(s, k)[:, 0]
    D, E = project_modes(s, b, lam)
    ce0 = b.ce_mod_table(xi0)
    se0 = b.se_mod_table(xi0)
    wc = np.abs(c.mu * ce0**2)
    ws = np.abs(c.upsilon * se0**2)
    ws[0] = 0.0
    top = max(np.nanmax(wc), np.nanmax(ws))
    keep_c = np.isfinite(wc) & (wc > floor * top)
    keep_s = np.isfinite(ws) & (ws > floor * top)
    keep_s[0] = False
    K = np.zeros_like(D)
    L = np.zeros_like(E)
    K[keep_c] = D[keep_c] / (c.mu[keep_c] * ce0[keep_c])
    L[keep_s] = E[keep_s] / (c.upsilon[keep_s] * se0[keep_s])
    return ModeCoefficients(float(k), K, L, keep_c, keep_s)


def mode_spectrum(s: Sinogram, k_grid, n_terms: int = 40, floor: float = MODE_FLOOR,
                  cache: SpectralCache | None = None) -> ModeSpectrum:
    xi0 = _check_ellipse(s)
    k_grid = np.asarray(k_grid, dtype=float)
    cache = cache or SpectralCache(n_terms)
    lam = radial_projection(s, k_grid)
    modes, bases, coefs = [], [], []
    for j, k in enumerate(k_grid):
        b, c = cache.get(k)
        modes.append(mode_coefficients(s, b, c, k, floor, lam[:, j]))
        bases.append(b)
        coefs.append(c)
    return ModeSpectrum(xi0, k_grid, modes, bases, coefs)


@dataclass(frozen=True, eq=False)
class PhiTable:
    """values[j, p] = Phi(k_j) at point p; ``n_used`` is the truncation order."""

    k: np.ndarray
    values: np.ndarray
    n_used: np.ndarray


def _truncate(terms: np.ndarray, tol: float):
    """Sum rows until three consecutive ones drop below tol times the running max."""
    mag = np.abs(terms)
    runmax = np.maximum.accumulate(mag, axis=0)
    small = mag < tol * runmax
    n = terms.shape[0]
    if n < 3:
        return terms.sum(axis=0), np.full(terms.shape[1], n - 1)
    triple = small[:-2] & small[1:-1] & small[2:]
    has = triple.any(axis=0)
    stop = np.where(has, np.argmax(triple, axis=0) + 2, n - 1)
    rows = np.arange(n)[:, None]
    return np.where(rows <= stop, terms, 0.0).sum(axis=0), stop


def assemble_phi(ms: ModeSpectrum, xi_p, eta_p, n_terms: int = 40,
                 tol_tail: float = 1e-10) -> PhiTable:
    """Phi(k) at interior points (xi', eta') for every k of the spectrum."""
    xi_p = np.atleast_1d(np.asarray(xi_p, dtype=float))
    eta_p = np.atleast_1d(np.asarray(eta_p, dtype=float))
    if np.any(xi_p >= ms.xi0):
        raise ValueError("evaluation points must lie strictly inside the aperture")
    out = np.empty((ms.k.size, xi_p.size))
    used = np.empty((ms.k.size, xi_p.size), dtype=int)
    for j, (m, b, c) in enumerate(zip(ms.modes, ms.bases, ms.coefficients)):
        n = min(n_terms, b.n_max) + 1
        kc = np.where(m.keep_ce, c.mu * m.K, 0.0)[:n]
        ks = np.where(m.keep_se, c.upsilon * m.L, 0.0)[:n]
        tc = kc[:, None] * b.ce_mod_table(xi_p)[:n] * b.ce_table(eta_p)[:n]
        ts = ks[:, None] * b.se_mod_table(xi_p)[:n] * b.se_table(eta_p)[:n]
        total, stop = _truncate(tc + ts, tol_tail)
        out[j] = total / np.pi
        used[j] = stop
    return PhiTable(ms.k, out, used)


def k_weights(k: np.ndarray) -> np.ndarray:
    """Trapezoid weights for int_0^k_max on k_j = j dk, with the k = 0 term zero."""
    dk = k[0]
    w = np.full(k.size, dk)
    w[-1] *= 0.5
    return w


def reconstruct_point(pt: PhiTable, r_primes=(0.05, 0.025)):
    """f at each point (r' = 0) and the spread against the r' -> 0 extrapolation.

    Returns ``(value, spread, off_center)`` where ``off_center[i]`` is the
    transform at ``r_primes[i]``.  The extrapolation assumes an even
    expansion in r' through the two smallest radii.
    """
    w = k_weights(pt.k) * pt.k
    rp = np.concatenate([[0.0], np.asarray(r_primes, dtype=float)])
    kern = bessel_j0(np.outer(rp, pt.k)) * w
    vals = kern @ pt.values / (2.0 * np.pi)
    value = vals[0]
    off = vals[1:]
    if len(r_primes) >= 2:
        r1, r2 = sorted(r_primes)[:2]
        v1 = off[list(r_primes).index(r1)]
        v2 = off[list(r_primes).index(r2)]
        extrap = (r2**2 * v1 - r1**2 * v2) / (r2**2 - r1**2)
        spread = np.abs(value - extrap)
    else:
        spread = np.zeros_like(value)
    return value, spread, off


def reconstruct_points(s: Sinogram, x1, x2, cfg: ReconConfig = ReconConfig(),
                       cache: SpectralCache | None = None, ms: ModeSpectrum | None = None):
    """Reconstructed values at Cartesian points strictly inside the ellipse."""
    x1 = np.atleast_1d(np.asarray(x1, dtype=float))
    x2 = np.atleast_1d(np.asarray(x2, dtype=float))
    e = to_elliptic(CartesianPoint(x1, x2))
    if ms is None:
        cache = cache or SpectralCache(cfg.n_terms, cfg.coefficients, cfg.n_quad_coef)
        ms = mode_spectrum(s, cfg.k_grid, cfg.n_terms, cfg.mode_floor, cache)
    pt = assemble_phi(ms, np.atleast_1d(e.xi), np.atleast_1d(e.eta), cfg.n_terms, cfg.tol_tail)
    return reconstruct_point(pt, cfg.r_primes)


def reconstruct_grid(s: Sinogram, cfg: ReconConfig = ReconConfig(),
                     cache: SpectralCache | None = None) -> ImageGrid:
    xi0 = _check_ellipse(s)
    X1, X2 = grid_mesh(cfg.box, cfg.nx, cfg.ny)
    e = to_elliptic(CartesianPoint(X1, X2))
    limit = xi0 if cfg.xi_max is None else min(cfg.xi_max, xi0)
    mask = e.xi < limit if cfg.xi_max is None else e.xi <= limit
    mask &= e.xi < xi0
    cache = cache or SpectralCache(cfg.n_terms, cfg.coefficients, cfg.n_quad_coef)
    ms = mode_spectrum(s, cfg.k_grid, cfg.n_terms, cfg.mode_floor, cache)
    values = np.full(X1.shape, np.nan)
    spread = np.full(X1.shape, np.nan)
    if mask.any():
        pt = assemble_phi(ms, e.xi[mask], e.eta[mask], cfg.n_terms, cfg.tol_tail)
        v, sp, _ = reconstruct_point(pt, cfg.r_primes)
        values[mask] = v
        spread[mask] = sp
        n_used = int(pt.n_used.max())
    else:
        n_used = 0
    diag = {
        "dropped_mode_fraction": ms.dropped_fraction,
        "max_spread": float(np.nanmax(spread)) if mask.any() else 0.0,
        "max_order_used": n_used,
        "r_primes": cfg.r_primes,
        "spread": spread,
    }
    if n_used >= cfg.n_terms:
        log.warning("series truncation reached the n_terms cap (%d)", cfg.n_terms)
    params = {"xi0": xi0, "k_max": cfg.k_max, "N_k": cfg.n_k, "n_terms": cfg.n_terms}
    return ImageGrid(values, mask, cfg.box, params, diag)
