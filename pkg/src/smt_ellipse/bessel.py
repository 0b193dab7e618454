"""Bessel functions of the first kind and the order-zero Hankel pair.

J_n uses the power series below x = 12 and Miller's backward recurrence
(normalized with 1 = J_0 + 2 sum J_2k) above.  For x >= 1000 (and orders
below x / 2) the recurrence would be long, so J_0 and J_1 come from the
Hankel asymptotic expansion and higher orders from forward recurrence,
which is stable while n < x.  I_0 uses its power series
up to x = 30 and the large-argument expansion beyond.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

SERIES_CUTOFF = 12.0
ASYMPTOTIC_CUTOFF = 1000.0
_SERIES_TERMS = 60
_RESCALE = 1e150


def _series_table(n_max: int, x: np.ndarray) -> np.ndarray:
    half = 0.5 * x
    n = np.arange(n_max + 1, dtype=float)[:, None]
    # (x/2)^n / n! built by cumulative products so it underflows gracefully
    steps = np.where(n[1:] > 0, half[None, :] / np.maximum(n[1:], 1.0), 1.0)
    pref = np.vstack([np.ones((1, x.size)), np.cumprod(steps, axis=0)])
    neg = -half * half
    term = np.ones((n_max + 1, x.size))
    total = term.copy()
    for m in range(1, _SERIES_TERMS):
        term = term * neg / (m * (m + n))
        total += term
        if m % 8 == 0 and np.max(np.abs(term[0])) < 1e-17:
            # order 0 has the slowest-decaying terms
            break
    return pref * total


def _miller_start(n_max: int, x: float) -> int:
    top = max(n_max, x)
    start = int(top + 20 + math.sqrt(60.0 * top))
    return start + (start % 2)


def _miller_table(n_max: int, x: np.ndarray) -> np.ndarray:
    """Backward recurrence for a 1-d array of arguments x >= SERIES_CUTOFF."""
    out = np.zeros((n_max + 1, x.size))
    start = _miller_start(n_max, float(x.max()))
    upper = np.zeros_like(x)
    cur = np.full_like(x, 1e-30)
    norm = np.zeros_like(x)
    inv_x = 2.0 / x
    for n in range(start, 0, -1):
        # cur holds J_n, upper holds J_{n+1}
        if n <= n_max:
            out[n] = cur
        if n % 2 == 0:
            norm += 2.0 * cur
        lower = n * inv_x * cur - upper
        upper, cur = cur, lower
        big = np.abs(cur) > _RESCALE
        if big.any():
            f = np.where(big, 1.0 / _RESCALE, 1.0)
            cur = cur * f
            upper = upper * f
            norm = norm * f
            lo = max(n, 0)
            if lo <= n_max:
                out[lo:] *= f
    out[0] = cur
    norm += cur
    return out / norm


def _hankel_asymptotic(nu: int, x: np.ndarray) -> np.ndarray:
    mu = 4.0 * nu * nu
    p = np.ones_like(x)
    q = np.zeros_like(x)
    term = np.ones_like(x)
    for k in range(1, 16):
        term = term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        if k % 2:
            q += (-1) ** (k // 2) * term
        else:
            p += (-1) ** (k // 2) * term
    w = x - (0.5 * nu + 0.25) * np.pi
    return np.sqrt(2.0 / (np.pi * x)) * (p * np.cos(w) - q * np.sin(w))


def _asymptotic_table(n_max: int, x: np.ndarray) -> np.ndarray:
    out = np.empty((n_max + 1, x.size))
    out[0] = _hankel_asymptotic(0, x)
    if n_max >= 1:
        out[1] = _hankel_asymptotic(1, x)
    for n in range(1, n_max):
        out[n + 1] = (2.0 * n / x) * out[n] - out[n - 1]
    return out


def bessel_j_table(n_max: int, x) -> np.ndarray:
    """J_0..J_{n_max} at x; returns shape (n_max + 1,) + x.shape."""
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    x = np.asarray(x, dtype=float)
    ax = np.abs(x).ravel()
    out = np.full((n_max + 1, ax.size), np.nan)
    finite = np.isfinite(ax)
    small = finite & (ax < SERIES_CUTOFF)
    if small.any():
        out[:, small] = _series_table(n_max, ax[small])
    huge = finite & (ax >= max(ASYMPTOTIC_CUTOFF, 2.0 * n_max))
    if huge.any():
        out[:, huge] = _asymptotic_table(n_max, ax[huge])
    large = finite & ~small & ~huge
    if large.any():
        xs = ax[large]
        idx = np.flatnonzero(large)
        # bin arguments so short ones do not pay for the longest recurrence
        bins = np.floor(np.log2(xs / SERIES_CUTOFF)).astype(int)
        for bnum in np.unique(bins):
            sel = bins == bnum
            out[:, idx[sel]] = _miller_table(n_max, xs[sel])
    neg = x.ravel() < 0
    if neg.any():
        odd = np.arange(n_max + 1) % 2 == 1
        out[np.ix_(odd, neg)] *= -1.0
    return out.reshape((n_max + 1,) + x.shape)


def bessel_j(n: int, x):
    """J_n(x) for integer n (negative orders via J_{-n} = (-1)^n J_n)."""
    n = int(n)
    table = bessel_j_table(abs(n), x)[abs(n)]
    if n < 0 and n % 2:
        table = -table
    return table[()]


def bessel_j0(x):
    return bessel_j_table(0, x)[0][()]


def _i0_series(x):
    t = 0.25 * x * x
    term = np.ones_like(x)
    total = np.ones_like(x)
    for m in range(1, 120):
        term = term * t / (m * m)
        total += term
    return total


def _i0e_asymptotic(x):
    # e^{-x} I_0(x) ~ (2 pi x)^{-1/2} sum [(2k-1)!!]^2 / (k! (8x)^k)
    term = np.ones_like(x)
    total = np.ones_like(x)
    for k in range(1, 30):
        term = term * (2 * k - 1) ** 2 / (8.0 * x * k)
        total += term
    return total / np.sqrt(2.0 * np.pi * x)


def bessel_i0e(x):
    """Exponentially scaled modified Bessel function exp(-|x|) I_0(x)."""
    x = np.abs(np.asarray(x, dtype=float))
    out = np.empty_like(x)
    small = x <= 30.0
    out[small] = _i0_series(x[small]) * np.exp(-x[small])
    out[~small] = _i0e_asymptotic(x[~small])
    return out[()]


def bessel_i0(x):
    x = np.abs(np.asarray(x, dtype=float))
    if np.any(x > 700.0):
        raise OverflowError("I_0 overflows for x > 700; use bessel_i0e")
    out = np.empty_like(x)
    small = x <= 30.0
    out[small] = _i0_series(x[small])
    out[~small] = _i0e_asymptotic(x[~small]) * np.exp(x[~small])
    return out[()]


@dataclass(frozen=True, eq=False)
class RadialGrid:
    """Samples on the uniform grid r_i = i * r_max / (n - 1), i = 0..n-1."""

    samples: np.ndarray
    r_max: float

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        if s.ndim != 1 or s.size < 2:
            raise ValueError("samples must be a 1-d array with at least 2 points")
        if not self.r_max > 0:
            raise ValueError("r_max must be positive")
        object.__setattr__(self, "samples", s)

    @property
    def n_points(self) -> int:
        return self.samples.size

    @property
    def step(self) -> float:
        return self.r_max / (self.n_points - 1)

    @property
    def r(self) -> np.ndarray:
        return np.linspace(0.0, self.r_max, self.n_points)


def _even_taylor(f: np.ndarray, h: float, n_fit: int = 8):
    """f(0), f''(0) and f''''(0) from an even polynomial through the first samples."""
    n = min(n_fit, f.size)
    u = (np.arange(n) / max(n - 1, 1)) ** 2
    c = np.linalg.solve(np.vander(u, n, increasing=True), f[:n])
    s2 = ((n - 1) * h) ** 2
    f2 = 2.0 * c[1] / s2 if n > 1 else 0.0
    f4 = 24.0 * c[2] / s2**2 if n > 2 else 0.0
    return c[0], f2, f4


def _hankel0(grid: RadialGrid, out_max: float, n_out: int) -> RadialGrid:
    f = grid.samples
    if abs(f[-1]) > 1e-6 * np.max(np.abs(f)):
        warnings.warn("input does not decay at the end of its grid; truncation error expected",
                      RuntimeWarning, stacklevel=3)
    r = grid.r
    h = grid.step
    w = np.full(r.size, h)
    w[-1] = 0.5 * h
    w[0] = 0.0  # the r = 0 sample carries zero weight because of the factor r
    k = np.linspace(0.0, out_max, n_out)
    kern = bessel_j0(np.outer(k, r))
    out = kern @ (w * r * f)
    # Euler-Maclaurin endpoint terms for g(r) = r f(r) J0(kr); g is odd and
    # smooth, so only its odd derivatives at r = 0 enter
    f0, f2, f4 = _even_taylor(f, h)
    k2 = k * k
    g1 = f0
    g3 = 3.0 * f2 - 1.5 * k2 * f0
    g5 = 5.0 * f4 - 15.0 * k2 * f2 + 1.875 * k2 * k2 * f0
    out += h**2 / 12.0 * g1 - h**4 / 720.0 * g3 + h**6 / 30240.0 * g5
    return RadialGrid(out, out_max)


def hankel0_forward(f: RadialGrid, k_max: float, n_k: int | None = None) -> RadialGrid:
    """F(k) = int_0^r_max f(r) J0(kr) r dr on the uniform grid [0, k_max]."""
    return _hankel0(f, k_max, n_k or f.n_points)


def hankel0_inverse(F: RadialGrid, r_max: float, n_r: int | None = None) -> RadialGrid:
    """f(r) = int_0^k_max F(k) J0(kr) k dk on the uniform grid [0, r_max]."""
    return _hankel0(F, r_max, n_r or F.n_points)


def delta_kernel_witness(tau, r, k_max: float, n_k: int = 4096):
    """Truncated kernel r * int_0^k_max J0(tau k) J0(r k) k dk.

    As k_max grows its action on smooth test functions of tau tends to
    evaluation at r.
    """
    tau = np.asarray(tau, dtype=float)
    r = np.asarray(r, dtype=float)
    k = np.linspace(0.0, k_max, n_k)
    w = np.full(n_k, k[1])
    w[0] = 0.0
    w[-1] *= 0.5
    jt = bessel_j0(np.outer(tau.ravel(), k))
    jr = bessel_j0(np.outer(r.ravel(), k))
    out = r.reshape(-1, 1) * ((jr * (w * k)) @ jt.T)
    return out.reshape(r.shape + tau.shape)
