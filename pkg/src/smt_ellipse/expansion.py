"""Expansion of J0(k |x - y|) in products of Mathieu functions.

    J0(k rho) = (1/pi) sum_n [ mu_n Ce_n(xi) ce_n(eta) Ce_n(lam) ce_n(theta)
                             + upsilon_n Se_n(xi) se_n(eta) Se_n(lam) se_n(theta) ]

with q = k^2 / 4.  The coefficients mu_n and upsilon_n (the sign-absorbed
upsilon of the real Se convention) are measured by projecting J0 onto
ce_n (se_n) at a reference triple (xi, lam, theta); the integral does not
depend on the triple.  The closed form mu_n = 2 pi (Mc_n / Ce_n)^2 is
available as an independent route.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bessel import bessel_j0
from .geometry import EllipticPoint, distance
from .mathieu import MathieuBasis

DEFAULT_REFS = (0.9, 0.4, 0.7)
REF_SCHEDULE = ((0.9, 0.4, 0.7), (1.1, 0.6, 1.3), (0.7, 0.95, 0.45))
SMALL_DENOMINATOR = 1e-8
_THETA_GRID = np.linspace(0.0, np.pi, 257)[1:-1]


class SmallDenominatorError(ValueError):
    """Raised when every reference triple puts a mode near a zero."""


@dataclass(frozen=True, eq=False)
class ExpansionCoefficients:
    """mu[n] for n = 0..n_max and upsilon[n] for n = 1..n_max (upsilon[0] = 0).

    ``refs_ce[n]`` and ``refs_se[n]`` hold the (xi, lam, theta) triples
    used for each mode, or NaN for the closed form.
    """

    q: float
    mu: np.ndarray
    upsilon: np.ndarray
    refs_ce: np.ndarray
    refs_se: np.ndarray
    method: str

    @property
    def n_max(self) -> int:
        return self.mu.size - 1


def _projection(b: MathieuBasis, xi_r, lam_r, theta_r, family: str, n_quad: int):
    """(2pi / N) sum_j J0(k rho(xi_r, eta_j; lam_r, theta_r)) ce_n(eta_j), per mode."""
    eta = -np.pi + 2.0 * np.pi * np.arange(n_quad) / n_quad
    rho = distance(EllipticPoint(xi_r[:, None], eta[None, :]),
                   EllipticPoint(lam_r[:, None], theta_r[:, None]))
    kern = bessel_j0(b.k * rho)
    ang = b.ce_table(eta) if family == "c" else b.se_table(eta)
    return 2.0 * np.pi / n_quad * np.sum(kern * ang, axis=1)


def _auto_refs(b: MathieuBasis, family: str, alternate: bool = False):
    """Per-mode triple at a large radial value and a large angular value.

    With ``alternate`` the radial and angular picks are the best ones at
    least 0.3 away from the primary picks, giving a disjoint triple.
    """
    k = b.k
    hi = np.arccosh(max(2.0, (b.n_max + 15.0) / max(k, 1e-12)))
    grid = np.linspace(0.2, min(hi, 5.0), 16)
    radial = b.ce_mod_table(grid) if family == "c" else b.se_mod_table(grid)
    ang = b.ce_table(_THETA_GRID) if family == "c" else b.se_table(_THETA_GRID)
    rows = np.arange(b.n_max + 1)
    score_r = np.abs(radial)
    score_a = np.abs(ang)
    bi = np.argmax(score_r, axis=1)
    ti = np.argmax(score_a, axis=1)
    if not alternate:
        triples = np.column_stack([grid[bi], grid[bi], _THETA_GRID[ti]])
        return triples, radial[rows, bi] ** 2 * ang[rows, ti]
    far_r = np.abs(grid[None, :] - grid[bi][:, None]) >= 0.3
    far_a = np.abs(_THETA_GRID[None, :] - _THETA_GRID[ti][:, None]) >= 0.3
    bj = np.argmax(np.where(far_r, score_r, -1.0), axis=1)
    tj = np.argmax(np.where(far_a, score_a, -1.0), axis=1)
    triples = np.column_stack([grid[bj], grid[bi], _THETA_GRID[tj]])
    return triples, radial[rows, bj] * radial[rows, bi] * ang[rows, tj]


def _radial_at(b: MathieuBasis, family: str, xi, radial: str) -> np.ndarray:
    """Row n of the result is the order-n radial function at xi[n]."""
    xi = np.asarray(xi, dtype=float)
    rows = np.arange(b.n_max + 1)
    uniq, inv = np.unique(xi, return_inverse=True)
    table = b.ce_mod_table(uniq, radial) if family == "c" else b.se_mod_table(uniq, radial)
    return table[rows, inv]


def _angular_at(b: MathieuBasis, family: str, theta) -> np.ndarray:
    rows = np.arange(b.n_max + 1)
    uniq, inv = np.unique(np.asarray(theta, dtype=float), return_inverse=True)
    table = b.ce_table(uniq) if family == "c" else b.se_table(uniq)
    return table[rows, inv]


def _family(b, family, refs, n_quad, radial):
    n_rows = b.n_max + 1
    if refs is None or isinstance(refs, str):
        if radial != "bessel":
            raise ValueError("automatic references use the Bessel radial representation")
        if refs not in (None, "auto", "auto-alternate"):
            raise ValueError(f"unknown reference policy {refs!r}")
        triples, denom = _auto_refs(b, family, alternate=refs == "auto-alternate")
    else:
        schedule = [tuple(map(float, refs))] if np.ndim(refs[0]) == 0 else [tuple(map(float, r)) for r in refs]
        triples = np.full((n_rows, 3), np.nan)
        denom = np.full(n_rows, np.nan)
        for t in schedule:
            xi_v = _radial_at(b, family, np.full(n_rows, t[0]), radial)
            lam_v = _radial_at(b, family, np.full(n_rows, t[1]), radial)
            ang_v = _angular_at(b, family, np.full(n_rows, t[2]))
            ok = (np.abs(xi_v) > SMALL_DENOMINATOR) & (np.abs(lam_v) > SMALL_DENOMINATOR) \
                & (np.abs(ang_v) > SMALL_DENOMINATOR)
            fresh = ok & np.isnan(denom)
            triples[fresh] = t
            denom[fresh] = (xi_v * lam_v * ang_v)[fresh]
        missing = np.isnan(denom)
        if family == "s":
            missing[0] = False
        if missing.any():
            n = int(np.flatnonzero(missing)[0])
            raise SmallDenominatorError(
                f"mode n={n} ({'ce' if family == 'c' else 'se'}) has a small denominator "
                f"at every reference triple for q={b.q}")
    safe = np.where(np.isnan(triples), 0.5, triples)
    proj = _projection(b, safe[:, 0], safe[:, 1], safe[:, 2], family, n_quad)
    with np.errstate(divide="ignore", invalid="ignore"):
        coef = proj / denom
    if family == "s":
        coef[0] = 0.0
        triples[0] = np.nan
    return coef, triples


def compute_coefficients(b: MathieuBasis, refs=None, n_quad: int = 1024,
                         radial: str = "bessel") -> ExpansionCoefficients:
    """Measure mu_n and upsilon_n from the projection integral.

    Parameters
    ----------
    b : MathieuBasis
        Basis at q = k^2 / 4, with q > 0.
    refs : None, "auto", "auto-alternate", triple, or sequence of triples
        ``None`` (or "auto") picks a well-conditioned triple per mode;
        "auto-alternate" picks a second, disjoint one.  A single triple
        is used for every mode; a sequence is tried in order per mode until
        no denominator falls below 1e-8 in magnitude.
    n_quad : int
        Periodic trapezoid points for the angular integral.
    radial : {"bessel", "series"}
        Representation of Ce_n and Se_n used in the denominators.
    """
    if b.q <= 0.0:
        raise ValueError("coefficients need q > 0")
    mu, rc = _family(b, "c", refs, n_quad, radial)
    ups, rs = _family(b, "s", refs, n_quad, radial)
    return ExpansionCoefficients(b.q, mu, ups, rc, rs, "integral")


def closed_form_coefficients(b: MathieuBasis) -> ExpansionCoefficients:
    """mu_n = 2 pi (Mc_n / Ce_n)^2 and upsilon_n = 2 pi (Ms_n / Se_n)^2."""
    if b.q <= 0.0:
        raise ValueError("coefficients need q > 0")
    mu = 2.0 * np.pi * b.ce_join**2
    ups = 2.0 * np.pi * b.se_join**2
    ups[0] = 0.0
    nan = np.full((b.n_max + 1, 3), np.nan)
    return ExpansionCoefficients(b.q, mu, ups, nan, nan.copy(), "closed")


def eval_j0_expansion(b: MathieuBasis, c: ExpansionCoefficients, p: EllipticPoint,
                      s: EllipticPoint, n_terms: int | None = None,
                      radial: str = "bessel"):
    """Truncated series for J0(k |x(p) - x(s)|), orders 0..n_terms."""
    n = b.n_max if n_terms is None else min(int(n_terms), b.n_max)
    xi, eta = np.broadcast_arrays(*map(np.asarray, (p.xi, p.eta)))
    lam, th = np.broadcast_arrays(*map(np.asarray, (s.xi, s.eta)))
    sl = slice(0, n + 1)
    tc = (c.mu[sl, None] * b.ce_mod_table(xi.ravel(), radial)[sl] * b.ce_table(eta.ravel())[sl]
          * b.ce_mod_table(lam.ravel(), radial)[sl] * b.ce_table(th.ravel())[sl])
    ts = (c.upsilon[1:n + 1, None] * b.se_mod_table(xi.ravel(), radial)[1:n + 1]
          * b.se_table(eta.ravel())[1:n + 1] * b.se_mod_table(lam.ravel(), radial)[1:n + 1]
          * b.se_table(th.ravel())[1:n + 1])
    out = (tc.sum(axis=0) + ts.sum(axis=0)) / np.pi
    return out.reshape(np.broadcast_shapes(xi.shape, lam.shape))[()]


def ref_invariance(b: MathieuBasis, refs_a: Sequence[float], refs_b: Sequence[float],
                   n_quad: int = 1024, radial: str = "bessel") -> np.ndarray:
    """Relative change of (mu_n, upsilon_n) between two reference triples."""
    ca = compute_coefficients(b, refs_a, n_quad, radial)
    cb = compute_coefficients(b, refs_b, n_quad, radial)
    with np.errstate(divide="ignore", invalid="ignore"):
        dmu = np.abs(ca.mu - cb.mu) / np.abs(cb.mu)
        dup = np.abs(ca.upsilon - cb.upsilon) / np.abs(cb.upsilon)
    dup[0] = 0.0
    return np.maximum(dmu, dup)
