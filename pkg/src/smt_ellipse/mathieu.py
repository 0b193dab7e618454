"""Angular and radial Mathieu functions of integer order.

The angular functions solve y'' + (a - 2q cos 2eta) y = 0 and are stored
as Fourier coefficients normalized so that int_0^{2pi} ce_n^2 = pi (the
coefficient vector has unit Euclidean norm, with the constant term of the
even-even class counted twice).  The sign is fixed by making the
largest-magnitude coefficient positive.

Two radial representations are provided:

* the hyperbolic series Ce_n(xi) = sum A cosh(m xi), Se_n(xi) = sum B sinh(m xi),
  which is exact in principle but loses digits when its terms cancel;
* the radial functions of the first kind Mc_n, Ms_n built from products of
  Bessel functions, which stay well conditioned.  They are proportional to
  Ce_n and Se_n; the constants (joining factors) are fixed once per basis
  at the best-conditioned radius.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .bessel import bessel_j_table

TRAILING_TOL = 1e-14
_MAX_DOUBLINGS = 6
_JOIN_GRID = np.linspace(0.05, 1.5, 30)


def q_from_k(k):
    """Mathieu parameter for wavenumber k with unit focal distance."""
    return 0.25 * np.asarray(k, dtype=float) ** 2


def k_from_q(q):
    return 2.0 * np.sqrt(np.asarray(q, dtype=float))


def _class_matrix(q: float, M: int, cls: str):
    m = np.arange(M, dtype=float)
    off = np.full(M - 1, q)
    if cls == "ce_even":
        d = (2.0 * m) ** 2
        # symmetrize with B_0 = sqrt(2) A_0
        off[0] = math.sqrt(2.0) * q
    elif cls == "ce_odd":
        d = (2.0 * m + 1.0) ** 2
        d[0] += q
    elif cls == "se_odd":
        d = (2.0 * m + 1.0) ** 2
        d[0] -= q
    elif cls == "se_even":
        d = (2.0 * m + 2.0) ** 2
    else:
        raise ValueError(cls)
    return d, off


def _solve_class(q: float, M: int, cls: str, count: int):
    d, off = _class_matrix(q, M, cls)
    w, v = eigh_tridiagonal(d, off, select="i", select_range=(0, count - 1))
    # Rayleigh quotients are accurate relative to the eigenvector's own
    # scale, not to the largest diagonal entry of the truncated matrix
    w = np.einsum("ij,i,ij->j", v, d, v) + 2.0 * np.einsum("ij,i,ij->j", v[:-1], off, v[1:])
    if cls == "ce_even":
        v = v.copy()
        v[0] /= math.sqrt(2.0)
    tail = float(np.max(np.abs(v[-1])))
    big = np.argmax(np.abs(v), axis=0)
    v = v * np.sign(v[big, np.arange(v.shape[1])])
    return w, _strip_plateau(v), tail


def _strip_plateau(v: np.ndarray, depth: float = 1e-20) -> np.ndarray:
    """Zero the roundoff plateau that follows the super-exponential decay.

    Past the peak, genuine coefficients shrink monotonically; once they sink
    below ``depth`` times the peak, the first index where they stop shrinking
    starts the eigensolver's noise floor.  Left in, cosh(m xi) amplifies it.
    """
    v = v.copy()
    a = np.abs(v)
    for j in range(v.shape[1]):
        col = a[:, j]
        p = int(np.argmax(col))
        lo = col[p] * depth
        for i in range(p + 1, col.size - 1):
            if col[i] < lo and col[i + 1] >= col[i]:
                v[i + 1:, j] = 0.0
                break
    return v


def _harmonic(cls: str, M: int) -> np.ndarray:
    m = np.arange(M)
    return {"ce_even": 2 * m, "ce_odd": 2 * m + 1, "se_odd": 2 * m + 1, "se_even": 2 * m + 2}[cls]


def _cond_weighted(terms: np.ndarray, total: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.abs(terms).sum(axis=-2) / np.abs(total)


@dataclass(frozen=True, eq=False)
class MathieuBasis:
    """Characteristic values and Fourier coefficients for orders 0..n_max.

    ``ce_coef[n, h]`` multiplies cos(h eta) in ce_n; ``se_coef[n, h]``
    multiplies sin(h eta) in se_n.  Row 0 of ``se_coef`` is zero and
    ``b[0]`` is NaN since se_0 does not exist.
    """

    q: float
    n_max: int
    M: int
    a: np.ndarray
    b: np.ndarray
    ce_coef: np.ndarray
    se_coef: np.ndarray
    ce_join: np.ndarray = field(repr=False)
    se_join: np.ndarray = field(repr=False)

    @property
    def k(self) -> float:
        return float(k_from_q(self.q))

    @property
    def harmonics(self) -> np.ndarray:
        return np.arange(self.ce_coef.shape[1])

    # angular functions -------------------------------------------------
    def ce_table(self, eta) -> np.ndarray:
        eta = np.asarray(eta, dtype=float)
        c = np.cos(np.multiply.outer(self.harmonics, eta))
        return np.tensordot(self.ce_coef, c, axes=1)

    def se_table(self, eta) -> np.ndarray:
        eta = np.asarray(eta, dtype=float)
        s = np.sin(np.multiply.outer(self.harmonics, eta))
        return np.tensordot(self.se_coef, s, axes=1)

    def ce_dd_table(self, eta) -> np.ndarray:
        eta = np.asarray(eta, dtype=float)
        h = self.harmonics
        c = np.cos(np.multiply.outer(h, eta))
        return -np.tensordot(self.ce_coef * h**2, c, axes=1)

    def se_dd_table(self, eta) -> np.ndarray:
        eta = np.asarray(eta, dtype=float)
        h = self.harmonics
        s = np.sin(np.multiply.outer(h, eta))
        return -np.tensordot(self.se_coef * h**2, s, axes=1)

    # hyperbolic series -------------------------------------------------
    def _series(self, coef, fn, xi, with_cond=False):
        xi = np.asarray(xi, dtype=float)
        h = self.harmonics
        arg = np.multiply.outer(h, xi)
        if np.any(arg > 700.0):
            raise OverflowError("hyperbolic series overflows; use the Bessel representation")
        basis = fn(arg)
        total = np.tensordot(coef, basis, axes=1)
        if not with_cond:
            return total
        terms = coef.reshape(coef.shape + (1,) * xi.ndim) * basis[None]
        return total, _cond_weighted(terms, total)

    def ce_mod_series_table(self, xi) -> np.ndarray:
        return self._series(self.ce_coef, np.cosh, xi)

    def se_mod_series_table(self, xi) -> np.ndarray:
        return self._series(self.se_coef, np.sinh, xi)

    # radial functions of the first kind --------------------------------
    def _bessel_products(self, xi, family: str, with_cond=False):
        xi = np.asarray(xi, dtype=float)
        shape = xi.shape
        xi = xi.ravel()
        n_rows = self.n_max + 1
        out = np.zeros((n_rows, xi.size))
        cond = np.ones((n_rows, xi.size))
        if self.q == 0.0:
            raise ValueError("radial functions of the first kind need q > 0")
        sq = math.sqrt(self.q)
        u1 = sq * np.exp(-xi)
        u2 = sq * np.exp(xi)
        M = self.M
        top = 2 * M + 3
        J1 = bessel_j_table(top, u1)
        J2 = bessel_j_table(top, u2)

        # rows hold orders -M..top so negative orders become plain slices
        odd_neg = np.arange(M, 0, -1) % 2 == 1
        sgn = np.where(odd_neg, -1.0, 1.0)[:, None]
        J1 = np.vstack([sgn * J1[M:0:-1], J1])
        J2 = np.vstack([sgn * J2[M:0:-1], J2])

        ell = np.arange(M)
        alt = np.where(ell % 2 == 0, 1.0, -1.0)
        coef_all = self.ce_coef if family == "c" else self.se_coef
        for n in range(n_rows):
            if family == "s" and n == 0:
                continue
            odd = n % 2
            if family == "c":
                cvec = coef_all[n, odd::2][:M]
                shift = odd
                m = n // 2
            else:
                start = 1 if odd else 2
                cvec = coef_all[n, start::2][:M]
                shift = 1 if odd else 2
                m = (n - 1) // 2 if odd else (n - 2) // 2
            s = int(np.argmax(np.abs(cvec)))
            a0 = M - s
            b0 = M + s + shift
            lo = J1[a0:a0 + M]
            hi = J2[b0:b0 + M]
            lo2 = J2[a0:a0 + M]
            hi2 = J1[b0:b0 + M]
            if family == "c":
                prod = lo * hi + hi2 * lo2
            else:
                prod = lo * hi - hi2 * lo2
            terms = (alt * cvec)[:, None] * prod
            eps = 2.0 if (family == "c" and not odd and s == 0) else 1.0
            pref = (-1.0) ** m / (eps * cvec[s])
            tot = terms.sum(axis=0)
            out[n] = pref * tot
            if with_cond:
                with np.errstate(divide="ignore", invalid="ignore"):
                    cond[n] = np.abs(terms).sum(axis=0) / np.abs(tot)
        out = out.reshape((n_rows,) + shape)
        if with_cond:
            return out, cond.reshape((n_rows,) + shape)
        return out

    def mc_table(self, xi) -> np.ndarray:
        """Mc_n(xi), first-kind radial functions, rows n = 0..n_max."""
        return self._bessel_products(xi, "c")

    def ms_table(self, xi) -> np.ndarray:
        """Ms_n(xi), first-kind radial functions; row 0 is zero."""
        return self._bessel_products(xi, "s")

    def ce_mod_table(self, xi, method: str = "bessel") -> np.ndarray:
        if method == "series" or self.q == 0.0:
            return self.ce_mod_series_table(xi)
        if method != "bessel":
            raise ValueError(f"unknown method {method!r}")
        return self._joined(self.mc_table(xi), self.ce_join, xi, self.ce_mod_series_table)

    def se_mod_table(self, xi, method: str = "bessel") -> np.ndarray:
        if method == "series" or self.q == 0.0:
            return self.se_mod_series_table(xi)
        if method != "bessel":
            raise ValueError(f"unknown method {method!r}")
        return self._joined(self.ms_table(xi), self.se_join, xi, self.se_mod_series_table)

    @staticmethod
    def _joined(first_kind, join, xi, series):
        # orders whose joining factor underflowed are far into the regime
        # where the series itself is well conditioned
        usable = np.isfinite(join) & (join != 0.0)
        out = np.zeros_like(first_kind)
        out[usable] = first_kind[usable] / join[usable].reshape((-1,) + (1,) * np.ndim(xi))
        fallback = ~usable
        fallback[0] &= np.isfinite(join[0])
        if fallback.any():
            out[fallback] = series(xi)[fallback]
        return out


def _joining_factors(b: MathieuBasis, family: str) -> np.ndarray:
    """Ratio Mc_n / Ce_n (or Ms_n / Se_n) where the series is most trustworthy.

    The series error is estimated as roundoff in its terms plus the whole
    contribution of coefficients below eps times the largest one, which
    carry no reliable digits but are amplified by cosh(m xi).
    """
    grid = _JOIN_GRID
    coef = b.ce_coef if family == "c" else b.se_coef
    fn = np.cosh if family == "c" else np.sinh
    series, cond_s = b._series(coef, fn, grid, with_cond=True)
    prods, cond_p = b._bessel_products(grid, family, with_cond=True)
    eps = np.finfo(float).eps
    peak = np.max(np.abs(coef), axis=1, keepdims=True)
    faint = np.where(np.abs(coef) < eps * peak, np.abs(coef), 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        tail = (faint @ np.abs(fn(np.multiply.outer(b.harmonics, grid)))) / np.abs(series)
    score = eps * (np.nan_to_num(cond_s, nan=np.inf) + np.nan_to_num(cond_p, nan=np.inf))
    score = score + np.nan_to_num(tail, nan=np.inf)
    best = np.argmin(score, axis=1)
    rows = np.arange(b.n_max + 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = prods[rows, best] / series[rows, best]
    if family == "s":
        out[0] = np.nan
    return out


def build_basis(q: float, n_max: int = 40, tol: float = TRAILING_TOL,
                M: int | None = None) -> MathieuBasis:
    """Solve the four Fourier classes and return orders 0..n_max.

    The truncation size starts at max(n_max/2 + 25, ceil(2 sqrt q) + 25)
    (or at ``M`` if given) and doubles until the trailing coefficient of
    every retained order is below ``tol``.
    """
    q = float(q)
    if not q >= 0.0 or not math.isfinite(q):
        raise ValueError("q must be a finite nonnegative number")
    n_max = int(n_max)
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    if M is None:
        M = max(n_max // 2 + 25, math.ceil(2.0 * math.sqrt(q)) + 25)
    elif M < n_max // 2 + 2:
        raise ValueError("M is too small for the requested orders")
    counts = {
        "ce_even": n_max // 2 + 1,
        "ce_odd": (n_max + 1) // 2,
        "se_odd": (n_max + 1) // 2,
        "se_even": n_max // 2,
    }
    for _ in range(_MAX_DOUBLINGS):
        sols = {}
        ok = True
        for cls, cnt in counts.items():
            if cnt == 0:
                continue
            w, v, tail = _solve_class(q, M, cls, cnt)
            if tail >= tol:
                ok = False
                break
            sols[cls] = (w, v)
        if ok:
            break
        M *= 2
    else:
        raise RuntimeError(f"Mathieu coefficients did not converge for q={q}")

    H = 2 * M + 2
    a = np.empty(n_max + 1)
    bvals = np.full(n_max + 1, np.nan)
    ce = np.zeros((n_max + 1, H))
    se = np.zeros((n_max + 1, H))
    for cls, (w, v) in sols.items():
        h = _harmonic(cls, M)
        for j in range(w.size):
            if cls == "ce_even":
                n, tgt, arr = 2 * j, a, ce
            elif cls == "ce_odd":
                n, tgt, arr = 2 * j + 1, a, ce
            elif cls == "se_odd":
                n, tgt, arr = 2 * j + 1, bvals, se
            else:
                n, tgt, arr = 2 * j + 2, bvals, se
            tgt[n] = w[j]
            arr[n, h] = v[:, j]
    _check_interlacing(q, a, bvals)
    basis = MathieuBasis(q, n_max, M, a, bvals, ce, se, np.full(n_max + 1, np.nan),
                         np.full(n_max + 1, np.nan))
    if q > 0.0:
        object.__setattr__(basis, "ce_join", _joining_factors(basis, "c"))
        object.__setattr__(basis, "se_join", _joining_factors(basis, "s"))
    return basis


def _check_interlacing(q: float, a: np.ndarray, b: np.ndarray) -> None:
    if q == 0.0:
        return
    seq = [a[0]]
    for n in range(1, a.size):
        seq += [b[n], a[n]]
    seq = np.asarray(seq)
    # for large q, a_n and b_{n+1} agree to within rounding
    slack = 1e-10 * (1.0 + np.abs(seq[:-1]))
    if np.any(np.diff(seq) < -slack):
        raise RuntimeError(f"characteristic values fail to interlace at q={q}")


def eval_ce(b: MathieuBasis, n: int, eta):
    _check_order(b, n, 0)
    return b.ce_table(eta)[n]


def eval_se(b: MathieuBasis, n: int, eta):
    _check_order(b, n, 1)
    return b.se_table(eta)[n]


def eval_ce_mod(b: MathieuBasis, n: int, xi, method: str = "series"):
    """Ce_n(xi); ``method='bessel'`` uses the joined first-kind function."""
    _check_order(b, n, 0)
    return b.ce_mod_table(xi, method)[n]


def eval_se_mod(b: MathieuBasis, n: int, xi, method: str = "series"):
    _check_order(b, n, 1)
    return b.se_mod_table(xi, method)[n]


def _check_order(b: MathieuBasis, n: int, lowest: int) -> None:
    if not lowest <= n <= b.n_max:
        raise ValueError(f"order {n} outside [{lowest}, {b.n_max}]")


def sign_report(b: MathieuBasis, xi) -> list[tuple[str, int, float]]:
    """Places on the sampled radii where Ce_n or Se_n is not positive.

    Positivity for xi > 0 is not guaranteed: the radial functions have
    zeros once k cosh(xi) passes their turning region.  The report lists
    (family, n, first nonpositive xi) for each offending order.
    """
    xi = np.asarray(xi, dtype=float)
    found = []
    for fam, table, lowest in (("Ce", b.ce_mod_table(xi), 0), ("Se", b.se_mod_table(xi), 1)):
        for n in range(lowest, b.n_max + 1):
            bad = np.flatnonzero(table[n] <= 0.0)
            if bad.size:
                found.append((fam, n, float(xi[bad[0]])))
    return found
