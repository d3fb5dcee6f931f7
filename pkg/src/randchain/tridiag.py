"""Deterministic spectral engine for real symmetric tridiagonal matrices.

Everything here is built on the three-term recurrence for the
characteristic polynomial of a tridiagonal matrix: Sturm sign counts
(exact eigenvalue counting), bisection eigenvalues, ratio sequences
whose product is det(I - yT), and a trace-log consistency check for
anti-symmetric matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SymTridiag",
    "GeneralTridiag",
    "AntisymTridiag",
    "Spectrum",
    "EigenvalueHit",
    "count_below",
    "count_below_many",
    "eigenvalues",
    "charpoly_ratios",
    "charpoly_det",
    "tracelog_check",
]

# Rescaling window for the Sturm recurrence.  Sign counts only need the
# signs, so both running values are renormalised whenever they threaten
# to leave the representable range.
_RESCALE_EVERY = 16
_TINY = 1e-300


class EigenvalueHit(ArithmeticError):
    """A ratio recurrence landed exactly on an eigenvalue."""


@dataclass(frozen=True)
class SymTridiag:
    """Real symmetric tridiagonal matrix, stored as diagonal + off-diagonal."""

    diag: np.ndarray
    off: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.diag, dtype=float)
        e = np.asarray(self.off, dtype=float)
        if d.ndim != 1 or e.ndim != 1 or e.size != max(d.size - 1, 0):
            raise ValueError("need diag of length n and off of length n-1")
        if not (np.all(np.isfinite(d)) and np.all(np.isfinite(e))):
            raise ValueError("matrix entries must be finite")
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "off", e)

    @property
    def n(self) -> int:
        return self.diag.size

    def gershgorin(self) -> tuple[float, float]:
        """Enclosing interval for all eigenvalues."""
        r = np.zeros(self.n)
        if self.n > 1:
            r[:-1] += np.abs(self.off)
            r[1:] += np.abs(self.off)
        return float(np.min(self.diag - r)), float(np.max(self.diag + r))

    def to_dense(self) -> np.ndarray:
        m = np.diag(self.diag)
        if self.n > 1:
            m += np.diag(self.off, 1) + np.diag(self.off, -1)
        return m


@dataclass(frozen=True)
class GeneralTridiag:
    """Unsymmetric tridiagonal matrix with sup*sub > 0 entrywise.

    Such a matrix is diagonally similar to a symmetric one, which is how
    its spectrum is computed.
    """

    diag: np.ndarray
    sup: np.ndarray
    sub: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.diag, dtype=float)
        u = np.asarray(self.sup, dtype=float)
        l = np.asarray(self.sub, dtype=float)
        if u.size != l.size or u.size != max(d.size - 1, 0):
            raise ValueError("inconsistent band lengths")
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "sup", u)
        object.__setattr__(self, "sub", l)

    @property
    def n(self) -> int:
        return self.diag.size

    def symmetrized(self) -> SymTridiag:
        prod = self.sup * self.sub
        if np.any(prod <= 0):
            raise ValueError("sup*sub must be positive to symmetrize")
        return SymTridiag(self.diag.copy(), np.sqrt(prod))

    def to_dense(self) -> np.ndarray:
        m = np.diag(self.diag)
        if self.n > 1:
            m += np.diag(self.sup, 1) + np.diag(self.sub, -1)
        return m


@dataclass(frozen=True)
class AntisymTridiag:
    """Anti-symmetric tridiagonal matrix: +sup above the diagonal, -sup below.

    The Hermitian partner i*Lambda is unitarily equivalent (conjugation by
    diag(i^j)) to the real symmetric tridiagonal with zero diagonal and
    off-diagonal equal to sup; all spectra are computed through that image.
    """

    sup: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.sup, dtype=float)
        if s.ndim != 1 or not np.all(np.isfinite(s)):
            raise ValueError("superdiagonal must be a finite 1-d array")
        object.__setattr__(self, "sup", s)

    @property
    def n(self) -> int:
        return self.sup.size + 1

    def hermitian_image(self) -> SymTridiag:
        return SymTridiag(np.zeros(self.n), self.sup.copy())

    def to_dense(self) -> np.ndarray:
        m = np.zeros((self.n, self.n))
        if self.n > 1:
            m += np.diag(self.sup, 1) - np.diag(self.sup, -1)
        return m


@dataclass(frozen=True)
class Spectrum:
    """Sorted eigenvalues with the tolerance they were computed to."""

    values: np.ndarray
    tol: float
    source: str = ""

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.size > 1 and np.any(np.diff(v) < -self.tol):
            raise ValueError("spectrum must be sorted to within tol")
        object.__setattr__(self, "values", v)


def _sturm_counts(diag: np.ndarray, off: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """Number of eigenvalues strictly below each probe in xs.

    Signed characteristic-polynomial recurrence p_k = (a_k - x) p_{k-1} -
    b_{k-1}^2 p_{k-2}; the count is the number of sign changes along the
    sequence.  An exact zero inherits the previous sign (replaced by a
    signed tiny), which fixes the strict-below convention and keeps the
    recurrence alive when zeros recur, e.g. probing a zero-diagonal
    matrix exactly at zero.  Periodic renormalisation keeps both running
    values in range without touching signs.
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    n = diag.size
    p_prev = np.ones_like(xs)
    p_cur = diag[0] - xs
    zero = p_cur == 0.0
    if zero.any():
        p_cur = np.where(zero, _TINY, p_cur)
    neg_cur = p_cur < 0.0
    count = neg_cur.astype(np.int64)
    if n == 1:
        return count
    off2 = off * off
    t = np.empty_like(xs)
    p_new = np.empty_like(xs)
    for k in range(1, n):
        np.multiply(xs, p_cur, out=t)
        np.multiply(p_cur, diag[k], out=p_new)
        p_new -= t
        np.multiply(p_prev, off2[k - 1], out=t)
        p_new -= t
        zero = p_new == 0.0
        if zero.any():
            p_new[zero] = np.copysign(_TINY, p_cur[zero])
        neg_new = p_new < 0.0
        count += neg_new != neg_cur
        p_prev, p_cur, p_new = p_cur, p_new, p_prev
        neg_cur = neg_new
        if k % _RESCALE_EVERY == 0:
            scale = 1.0 / np.maximum(np.maximum(np.abs(p_cur), np.abs(p_prev)), _TINY)
            p_prev *= scale
            p_cur *= scale
    return count


def count_below(t: SymTridiag, x: float) -> int:
    """Exact number of eigenvalues of t strictly below x."""
    return int(_sturm_counts(t.diag, t.off, np.array([float(x)]))[0])


def count_below_many(t: SymTridiag, xs) -> np.ndarray:
    """Vectorised count_below over an array of probe points."""
    return _sturm_counts(t.diag, t.off, np.asarray(xs, dtype=float))


def eigenvalues(
    t: SymTridiag,
    tol: float | None = None,
    source: str = "bisection",
    ranks: np.ndarray | None = None,
    bounds: tuple[float, float] | None = None,
) -> Spectrum:
    """Eigenvalues by Sturm bisection, each bracketed to width <= tol.

    By default all n are computed; `ranks` (1-based, ascending) restricts
    the computation to selected order statistics, and `bounds` overrides
    the Gershgorin bracket when sharper enclosures are known.
    """
    lo0, hi0 = t.gershgorin() if bounds is None else (float(bounds[0]), float(bounds[1]))
    diameter = max(hi0 - lo0, 1.0)
    if tol is None:
        tol = 1e-12 * diameter
    if tol <= 0:
        raise ValueError("tol must be positive")
    want = np.arange(1, t.n + 1) if ranks is None else np.asarray(ranks, dtype=np.int64)
    m = want.size
    lo = np.full(m, lo0 - 1e-12 * diameter - 1e-300)
    hi = np.full(m, hi0 + 1e-12 * diameter)
    # Bisection on the counting function: the k-th smallest eigenvalue is
    # below mid exactly when count_below(mid) >= k.
    n_iter = max(int(math.ceil(math.log2((hi[0] - lo[0]) / tol))) + 2, 8)
    for _ in range(n_iter):
        mid = 0.5 * (lo + hi)
        c = _sturm_counts(t.diag, t.off, mid)
        take = c >= want
        hi = np.where(take, mid, hi)
        lo = np.where(take, lo, mid)
        if np.max(hi - lo) <= tol:
            break
    return Spectrum(0.5 * (lo + hi), tol=tol, source=source)


def charpoly_ratios(t: SymTridiag, y: float) -> np.ndarray:
    """Ratio sequence r_k(y) = P_k(y)/P_{k-1}(y) for P_k(y) = det(I_k - y T_k).

    The product of the returned sequence equals det(I - yT).  Raises
    EigenvalueHit when some ratio vanishes exactly (y sits on a root of a
    leading principal minor); callers perturb y and retry.
    """
    n = t.n
    r = np.empty(n)
    r[0] = 1.0 - y * t.diag[0]
    if r[0] == 0.0:
        raise EigenvalueHit("ratio hit zero at index 0")
    y2 = y * y
    for k in range(1, n):
        val = (1.0 - y * t.diag[k]) - y2 * t.off[k - 1] ** 2 / r[k - 1]
        if val == 0.0:
            raise EigenvalueHit(f"ratio hit zero at index {k}")
        r[k] = val
    return r


def charpoly_det(t: SymTridiag, y: float, tol: float = 1e-12, retries: int = 3) -> float:
    """det(I - yT) as the product of charpoly_ratios, with perturb-and-retry.

    Exact ratio zeros are measure-zero events; on a hit the evaluation
    point is nudged by 10*tol, at most `retries` times.
    """
    shift = 0.0
    for _ in range(retries + 1):
        try:
            return float(np.prod(charpoly_ratios(t, y + shift)))
        except EigenvalueHit:
            shift = 10.0 * tol if shift == 0.0 else 10.0 * shift
    raise EigenvalueHit(f"persistent eigenvalue hit near y={y}")


def tracelog_check(lam: AntisymTridiag, x: float, m_terms: int) -> tuple[float, float]:
    """Two routes to sum_j log(1 + x w_j^2) for the anti-symmetric matrix.

    Series route: (1/2) Tr log(I - x Lambda^2) expanded in powers of x.
    Direct route: eigenvalues of the Hermitian image.  Both are returned;
    they agree to the truncation error inside the convergence radius.
    """
    h = lam.hermitian_image()
    spec = eigenvalues(h, source="tracelog")
    rho2 = float(np.max(np.abs(spec.values))) ** 2
    if abs(x) * rho2 >= 1.0:
        raise ValueError(
            f"|x|*rho(Lambda)^2 = {abs(x) * rho2:.3g} >= 1: series does not converge"
        )
    direct = 0.5 * float(np.sum(np.log1p(x * spec.values**2)))

    dense = h.to_dense()
    b = dense @ dense  # -Lambda^2 in the real image
    power = np.eye(lam.n)
    series = 0.0
    for m in range(1, m_terms + 1):
        power = power @ b
        # Tr Lambda^{2m} = (-1)^m Tr (H^2)^m
        series += -0.5 * (x**m) * ((-1.0) ** m) * np.trace(power) / m
    return float(series), direct
