"""Stationary laws of the random chain recursions and what they yield.

The continued-fraction variable of a type I chain, the displacement
ratios of a type II chain, and the characteristic-polynomial ratios of
the anti-symmetric form all satisfy random fixed-point equations of the
Dyson-Schmidt type.  This module iterates them (Monte Carlo and on
density grids), extracts the characteristic function and the integrated
density of states from the stationary laws, counts nodes exactly on
finite chains, and checks the Letac fixed-point identity for the Kummer
family.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.stats import ks_2samp

from .chain import Constant, DisorderLaw, Gamma, TwoPoint
from .specfun import rng_from_seed

__all__ = [
    "DensityGrid",
    "XiTypeI",
    "RatioTypeII",
    "AntisymRatio",
    "GridError",
    "KsResult",
    "mc_stationary",
    "omega_mc",
    "omega_type2_mc",
    "idos_node_fraction",
    "node_count",
    "density_iteration",
    "letac_check",
    "sample_kummer",
]

logger = logging.getLogger(__name__)

DEFAULT_BURN_IN = 1000


class GridError(ValueError):
    """Density grid cannot represent the mass it is asked to hold."""


@dataclass(frozen=True)
class DensityGrid:
    """Probability mass tabulated on an ascending grid of cell centres."""

    points: np.ndarray
    weights: np.ndarray
    total_mass: float = 1.0

    def __post_init__(self):
        p = np.asarray(self.points, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        if p.ndim != 1 or p.size != w.size:
            raise ValueError("points and weights must be 1-d arrays of equal length")
        if np.any(np.diff(p) <= 0):
            raise ValueError("points must be strictly increasing")
        # Roundoff-level negative masses from CDF differences are clipped.
        floor = -1e-9 * max(abs(self.total_mass), 1.0)
        if np.any(w < floor):
            raise ValueError("weights must be nonnegative")
        w = np.clip(w, 0.0, None)
        if abs(float(np.sum(w)) - self.total_mass) > 1e-9 * max(1.0, abs(self.total_mass)):
            raise ValueError("weights must sum to total_mass")
        object.__setattr__(self, "points", p)
        object.__setattr__(self, "weights", w)

    def edges(self) -> np.ndarray:
        """Cell edges: midpoints between centres, end cells extended symmetrically."""
        p = self.points
        inner = 0.5 * (p[1:] + p[:-1])
        first = p[0] - (inner[0] - p[0]) if p.size > 1 else p[0] - 0.5
        last = p[-1] + (p[-1] - inner[-1]) if p.size > 1 else p[-1] + 0.5
        return np.concatenate([[first], inner, [last]])

    def l1_distance(self, other: "DensityGrid") -> float:
        if other.points.shape != self.points.shape or not np.allclose(other.points, self.points):
            raise ValueError("grids must share the same points")
        return float(np.sum(np.abs(self.weights - other.weights)))

    @staticmethod
    def geometric(lo: float, hi: float, n: int) -> "DensityGrid":
        """Uniform-mass start on a geometric grid over (lo, hi)."""
        pts = np.geomspace(lo, hi, n)
        return DensityGrid(pts, np.full(n, 1.0 / n))

    @staticmethod
    def uniform(lo: float, hi: float, n: int) -> "DensityGrid":
        pts = np.linspace(lo, hi, n)
        return DensityGrid(pts, np.full(n, 1.0 / n))

    @staticmethod
    def from_cdf(cdf, edges: np.ndarray) -> "DensityGrid":
        """Grid whose cell masses are CDF increments over the given edges."""
        edges = np.asarray(edges, dtype=float)
        vals = np.asarray([cdf(e) for e in edges], dtype=float)
        w = np.diff(vals)
        pts = 0.5 * (edges[1:] + edges[:-1])
        return DensityGrid(pts, w, total_mass=float(vals[-1] - vals[0]))


@dataclass(frozen=True)
class XiTypeI:
    """Continued-fraction recursion xi' = x lambda / (1 + xi)."""

    x: float

    def __post_init__(self):
        if not self.x > 0:
            raise ValueError("x must be positive")


@dataclass(frozen=True)
class RatioTypeII:
    """Displacement-ratio recursion z' = (2 - omega^2 m / K) - 1/z."""

    omega_sq: float
    spring_k: float = 1.0


@dataclass(frozen=True)
class AntisymRatio:
    """Shifted ratio recursion s' = -(lambda / y^2) / (1 + s)."""

    y: float


class KsResult(NamedTuple):
    statistic: float
    pvalue: float


def mc_stationary(kind, law: DisorderLaw, n_samples: int, burn_in: int = DEFAULT_BURN_IN, seed=0) -> np.ndarray:
    """Samples of the stationary variable of the given recursion.

    The recursion is iterated from a fixed start (xi0 = x, z0 = 1, s0 = 0)
    with one fresh disorder draw per step; the first burn_in iterates are
    discarded.  Exact division-by-zero steps (measure zero under the
    continuous laws) propagate through infinity, which every map folds
    back to a finite value at the next step; occurrences are counted and
    logged.
    """
    if n_samples < 1 or burn_in < 0:
        raise ValueError("need n_samples >= 1 and burn_in >= 0")
    rng = rng_from_seed(seed)
    total = n_samples + burn_in
    draws = law.sample(rng, total)
    out = np.empty(total)
    redraws = 0

    if isinstance(kind, XiTypeI):
        # xi stays nonnegative for positive laws, so the singular point
        # -1 is unreachable in practice; an exact hit propagates through
        # infinity and folds back to 0 at the next step.
        x = kind.x
        xi = x
        for i in range(total):
            denom = 1.0 + xi
            if denom == 0.0:
                xi = math.inf
                redraws += 1
            else:
                xi = x * draws[i] / denom  # denom = inf maps xi to 0
            out[i] = xi
    elif isinstance(kind, RatioTypeII):
        w2 = kind.omega_sq
        k_spring = kind.spring_k
        z = 1.0
        for i in range(total):
            a = 2.0 - w2 * draws[i] / k_spring
            if z == 0.0:
                z = math.inf  # signed-infinity propagation of 1/0
                redraws += 1
            z = a - 1.0 / z if not math.isinf(z) else a
            out[i] = z
    elif isinstance(kind, AntisymRatio):
        y2 = kind.y * kind.y
        s = 0.0
        for i in range(total):
            denom = 1.0 + s
            if denom == 0.0:
                s = math.inf
                redraws += 1
                out[i] = s
                continue
            s = -(draws[i] / y2) / denom
            out[i] = s
    else:
        raise TypeError(f"unsupported recursion kind: {kind!r}")

    if redraws:
        logger.debug("mc_stationary handled %d singular steps", redraws)
    return out[burn_in:]


def omega_mc(kind: XiTypeI, law: DisorderLaw, n_samples: int, seed=0, burn_in: int = DEFAULT_BURN_IN) -> float:
    """Monte Carlo characteristic function: 2 <log(1 + xi)> at stationarity."""
    xi = mc_stationary(kind, law, n_samples, burn_in=burn_in, seed=seed)
    return 2.0 * float(np.mean(np.log1p(xi)))


def _eta_samples(law: DisorderLaw, spring_k: float, x: float, n: int, burn_in: int, rng) -> np.ndarray:
    """Stationary samples of the paired-ratio variable of a type II chain.

    Folding the two equal-lambda continued-fraction steps of one mass into
    a single update gives eta' = (eta (1 + x lam) + 1) / (x lam (1 + eta))
    with lam = K/m.
    """
    masses = law.sample(rng, n + burn_in)
    lam = spring_k / masses
    out = np.empty(n + burn_in)
    eta = 1.0
    for i in range(n + burn_in):
        xl = x * lam[i]
        denom = xl * (1.0 + eta)
        if denom == 0.0:
            eta = math.inf
            out[i] = eta
            continue
        eta = (eta * (1.0 + xl) + 1.0) / denom if not math.isinf(eta) else (1.0 + xl) / xl
        out[i] = eta
    return out[burn_in:]


def omega_type2_mc(law: DisorderLaw, spring_k: float, x: float, n: int, seed=0, burn_in: int = DEFAULT_BURN_IN) -> float:
    """Characteristic function of a type II chain by Monte Carlo.

    Averages log(1 + 1/eta + x K/m) over stationary eta and the mass law;
    for the two-point and constant laws the mass average is exact.
    """
    if x <= 0:
        raise ValueError("x must be positive")
    rng = rng_from_seed(seed)
    eta = _eta_samples(law, spring_k, x, n, burn_in, rng)
    base = 1.0 + 1.0 / eta
    if isinstance(law, TwoPoint):
        return float(
            np.mean(
                law.p * np.log(base + x * spring_k / law.m)
                + (1.0 - law.p) * np.log(base + x * spring_k / law.big_m)
            )
        )
    if isinstance(law, Constant):
        return float(np.mean(np.log(base + x * spring_k / law.v)))
    fresh = law.sample(rng, eta.size)
    return float(np.mean(np.log(base + x * spring_k / fresh)))


def node_count(masses: np.ndarray, spring_k: float, omega_sq: float) -> int:
    """Exact node count of the fixed-boundary chain with the given masses.

    Iterates the displacement ratios from U_0 = 0, U_1 = 1 and counts
    negative ratios; the total equals the number of squared frequencies
    of the fixed-boundary chain strictly below omega_sq (Sturm duality).
    """
    count = 0
    r = math.inf
    for m in np.asarray(masses, dtype=float):
        a = 2.0 - omega_sq * m / spring_k
        r = a - (0.0 if math.isinf(r) else 1.0 / r)
        if r == 0.0:
            r = 1e-300
        if r < 0.0:
            count += 1
    return count


def idos_node_fraction(law: DisorderLaw, spring_k: float, omega_sq: float, n_steps: int, seed=0) -> float:
    """Integrated density of states as the fraction of negative ratios.

    One realized chain of n_steps masses is swept; the negative-ratio
    count is an exact eigenvalue count for that finite chain, so the
    fraction is an unbiased finite-size estimate of M(omega^2).
    """
    if omega_sq < 0:
        raise ValueError("omega_sq must be nonnegative")
    if omega_sq == 0.0:
        return 0.0
    rng = rng_from_seed(seed)
    masses = law.sample(rng, n_steps)
    return node_count(masses, spring_k, omega_sq) / float(n_steps)


# ----------------------------------------------------------------------
# density-grid iteration of the fixed-point equations
# ----------------------------------------------------------------------


def _grid_cdf(grid: DensityGrid, q: np.ndarray) -> np.ndarray:
    """Mass of the grid below q, treating each cell as uniform."""
    edges = grid.edges()
    cum = np.concatenate([[0.0], np.cumsum(grid.weights)])
    q = np.asarray(q, dtype=float)
    idx = np.clip(np.searchsorted(edges, q, side="right") - 1, 0, grid.points.size - 1)
    frac = np.clip((q - edges[idx]) / (edges[idx + 1] - edges[idx]), 0.0, 1.0)
    out = cum[idx] + frac * grid.weights[idx]
    out = np.where(q <= edges[0], 0.0, out)
    out = np.where(q >= edges[-1], grid.total_mass, out)
    return out


def _step_xi(grid: DensityGrid, law: DisorderLaw, x: float) -> tuple[np.ndarray, float]:
    """One application of the type I map: xi' = x lambda/(1 + xi).

    The pushforward is binned exactly through the disorder law's CDF:
    the image lies in cell [e_i, e_{i+1}] iff lambda is in the matching
    window, for every source cell.
    """
    edges = grid.edges()
    scale = (1.0 + grid.points)[None, :] / x  # lambda = xi' (1+xi)/x
    cdf_at_edges = law.cdf(edges[:, None] * scale)
    new_w = (np.diff(cdf_at_edges, axis=0) * grid.weights[None, :]).sum(axis=1)
    return new_w, grid.total_mass - float(np.sum(new_w))


def _step_ratio2(grid: DensityGrid, law: DisorderLaw, omega_sq: float, spring_k: float) -> tuple[np.ndarray, float]:
    """One application of the type II ratio map z' = a - 1/z per mass branch.

    Each branch is monotone on z < 0 and z > 0 separately; new cell masses
    are grid-CDF differences of the preimages of the cell edges.
    """
    if isinstance(law, TwoPoint):
        branches = [(law.p, law.m), (1.0 - law.p, law.big_m)]
    elif isinstance(law, Constant):
        branches = [(1.0, law.v)]
    else:
        raise GridError("ratio-map iteration supports constant and two-point laws")
    edges = grid.edges()
    # Open-ended end cells: the line is compactified, so mass mapped past
    # the grid is folded into the outermost cells instead of being lost;
    # the amount so clamped is returned as the leak diagnostic.
    open_edges = edges.copy()
    open_edges[0] = -np.inf
    open_edges[-1] = np.inf
    new_w = np.zeros(grid.points.size)
    clamped = 0.0
    for prob, mass in branches:
        if prob == 0.0:
            continue
        a = 2.0 - omega_sq * mass / spring_k
        for eds, record in ((open_edges, False), (edges, True)):
            with np.errstate(divide="ignore"):
                # z' = a - 1/z; preimage of edge e is 1/(a - e) per half line.
                pre = 1.0 / (a - eds)
            q = np.where(eds < a, pre, np.inf)
            cdf_pos = _halfline_cdf(grid, q, positive=True)
            q = np.where(eds > a, pre, -np.inf)
            cdf_neg = _halfline_cdf(grid, q, positive=False)
            inside = float(cdf_pos[-1] - cdf_pos[0] + cdf_neg[-1] - cdf_neg[0])
            if record:
                clamped += prob * (grid.total_mass - inside)
            else:
                new_w += prob * (np.diff(cdf_pos) + np.diff(cdf_neg))
    return new_w, clamped


def _halfline_cdf(grid: DensityGrid, q: np.ndarray, positive: bool) -> np.ndarray:
    """Mass of the grid restricted to one sign half-line, below q."""
    zero_mass = _grid_cdf(grid, np.array([0.0]))[0]
    full = _grid_cdf(grid, q)
    if positive:
        out = np.clip(full - zero_mass, 0.0, None)
        out = np.where(np.isposinf(q), grid.total_mass - zero_mass, out)
        out = np.where(np.isneginf(q), 0.0, out)
    else:
        out = np.clip(full, 0.0, zero_mass)
        out = np.where(np.isposinf(q), zero_mass, out)
        out = np.where(np.isneginf(q), 0.0, out)
    return out


def density_iteration(kind, law: DisorderLaw, grid: DensityGrid, n_iter: int, leak_limit: float = 0.01) -> tuple[DensityGrid, list[float]]:
    """Iterate the stationary-density map n_iter times on the grid.

    Returns the final grid and the L1 residuals between successive
    iterates.  Raises GridError when more than leak_limit of the mass
    per step falls outside the grid.
    """
    residuals: list[float] = []
    current = grid
    leak_fraction = 0.0
    for _ in range(n_iter):
        if isinstance(kind, XiTypeI):
            new_w, leak = _step_xi(current, law, kind.x)
        elif isinstance(kind, RatioTypeII):
            new_w, leak = _step_ratio2(current, law, kind.omega_sq, kind.spring_k)
        else:
            raise GridError(f"density iteration not available for {type(kind).__name__}")
        leak_fraction = leak / max(current.total_mass, 1e-300)
        new = DensityGrid(current.points, new_w, total_mass=float(np.sum(new_w)))
        residuals.append(current.l1_distance(new) if current.total_mass > 0 else math.inf)
        current = new
    # Early iterates of a poor start may spill widely; what matters is the
    # leakage of the settled map.
    if leak_fraction > leak_limit:
        raise GridError(
            f"mass leak fraction {leak_fraction:.3g} at the final step exceeds {leak_limit:.3g}"
        )
    if current.total_mass < 0.5 * grid.total_mass:
        raise GridError(
            f"grid retained only {current.total_mass:.3g} of {grid.total_mass:.3g}; "
            "support not covered"
        )
    return current, residuals


# ----------------------------------------------------------------------
# Letac / Kummer fixed-point identity
# ----------------------------------------------------------------------


def sample_kummer(a: float, b: float, p: float, n: int, rng) -> np.ndarray:
    """Kummer type II samples, density ~ x^{a-1} e^{-p x} (1+x)^{-(a+b)}.

    Rejection against the Gamma[a, p] envelope with acceptance weight
    (1+x)^{-(a+b)}; requires a + b >= 0 so the weight stays bounded by 1.
    For a + b < 0 the reciprocal construction would be needed and is not
    supported here.
    """
    if a <= 0 or p <= 0:
        raise ValueError("need a > 0 and p > 0")
    if a + b < 0:
        raise ValueError("rejection sampler requires a + b >= 0")
    out = np.empty(n)
    filled = 0
    attempts = 0
    while filled < n:
        chunk = max(int(1.5 * (n - filled)) + 16, 32)
        x = rng.gamma(shape=a, scale=1.0 / p, size=chunk)
        accept = rng.random(chunk) < (1.0 + x) ** (-(a + b))
        got = x[accept]
        take = min(got.size, n - filled)
        out[filled : filled + take] = got[:take]
        filled += take
        attempts += chunk
        if attempts > 200 * n and filled < max(1, attempts // 100):
            raise ValueError("Kummer envelope acceptance rate below 1 percent")
    return out


def letac_check(alpha: float, beta: float, p: float, n: int, seed=0) -> KsResult:
    """Two-sample KS test of the fixed-point identity of the Kummer family.

    X/(1+Y) with X ~ Gamma[alpha, p] and Y ~ Kummer[alpha+beta, -beta, p]
    is compared against direct Kummer[alpha, beta, p] samples.
    """
    if alpha <= 0 or p <= 0 or alpha + beta <= 0:
        raise ValueError("require alpha > 0, p > 0 and alpha + beta > 0")
    rng = rng_from_seed(seed)
    x = rng.gamma(shape=alpha, scale=1.0 / p, size=n)
    y = sample_kummer(alpha + beta, -beta, p, n, rng)
    lhs = x / (1.0 + y)
    rhs = sample_kummer(alpha, beta, p, n, rng)
    res = ks_2samp(lhs, rhs)
    return KsResult(float(res.statistic), float(res.pvalue))
