"""Exactly solvable chain with gamma-distributed couplings.

For couplings with density ~ t^{alpha-1} e^{-kappa t}, the stationary
continued-fraction law is known in closed form, which reduces the
characteristic function Omega to the ratio of two one-dimensional
integrals K_alpha and L_alpha.  The integrated density of states then
follows by analytic continuation of those integrals to negative
argument, performed here as numerical contour integration on a path
that hugs the steepest-descent geometry through the saddle of

    phi(xi) = alpha (log xi - log(1 + xi)) + kappa x xi,

staying on the upper side of the negative real axis (the pole of order
alpha at xi = -1 is passed above).  Integer alpha keeps the integrand
single valued, which is what makes the continuation well defined.

The module also carries the closed forms of the chain without disorder,
the large-alpha corrections to its integrated density of states, and
the band-interior coefficient of the 1/alpha expansion of the Lyapunov
exponent.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .specfun import gamma_fn

__all__ = [
    "GammaChainParams",
    "ContourSpec",
    "ContourError",
    "PureChainValues",
    "k_alpha",
    "l_alpha",
    "omega_exact",
    "gamma_chain_density",
    "idos_exact",
    "dos_exact",
    "pure_chain",
    "weak_disorder_idos",
    "gamma1_coefficient",
    "saddle_point",
    "tabulate_idos",
    "tabulate_dos",
]

logger = logging.getLogger(__name__)


class ContourError(ArithmeticError):
    """Contour integration did not stabilise under path refinement."""


@dataclass(frozen=True)
class GammaChainParams:
    """Shape and rate of the gamma law of the couplings."""

    alpha: float
    rate: float

    def __post_init__(self):
        if self.alpha <= 0 or self.rate <= 0:
            raise ValueError("alpha and rate must be positive")

    def integer_alpha(self) -> int:
        n = round(self.alpha)
        if abs(self.alpha - n) > 1e-12 or n < 1:
            raise ValueError(
                "analytic continuation is restricted to positive integer alpha; "
                f"got alpha={self.alpha}"
            )
        return int(n)


@dataclass(frozen=True)
class ContourSpec:
    """Knobs of the continuation path.

    offset      minimum height above the negative real axis (used directly
                by the out-of-band path; the in-band path runs through the
                saddle, which lies higher),
    t_max       optional override of the tail truncation abscissa,
    n_points    minimum number of integrand evaluations per leg,
    check_stability  recompute on a perturbed path and compare.
    """

    offset: float = 1e-3
    t_max: float | None = None
    n_points: int = 100
    check_stability: bool = True

    def __post_init__(self):
        if self.offset <= 0:
            raise ValueError("offset must be positive")
        if self.n_points < 100:
            raise ValueError("n_points must be at least 100")


# ----------------------------------------------------------------------
# positive-argument integrals
# ----------------------------------------------------------------------


def _weighted_integral_scaled(p: GammaChainParams, x: float, weight) -> tuple[float, float]:
    """Scaled integral int weight(t) t^{a-1} (1+t)^{-a} e^{-kt/x} dt.

    Returns (value / e^{log_ref}, log_ref).  The substitution t = s u with
    s = x/kappa puts the exponential decay on unit scale for every x, and
    the u^{alpha-1} e^{-u} peak is divided out in log space so large alpha
    cannot overflow.  Ratios of scaled values at the same (p, x) are exact.
    """
    if x <= 0:
        raise ValueError("x must be positive")
    alpha, kappa = p.alpha, p.rate
    s = x / kappa

    def g_log(u: float) -> float:
        return (alpha - 1.0) * math.log(u) - alpha * math.log1p(s * u) - u

    if alpha > 1.0:
        # Stationary point of g_log: s u^2 + (1 + s) u - (alpha - 1) = 0.
        u_star = (-(1.0 + s) + math.sqrt((1.0 + s) ** 2 + 4.0 * s * (alpha - 1.0))) / (2.0 * s)
        peak = g_log(max(u_star, 1e-300))
    else:
        peak = 0.0
    log_ref = alpha * math.log(s) + peak

    def f(u: float) -> float:
        return weight(s * u) * math.exp(g_log(u) - peak)

    split = max(1.0, alpha)
    if alpha >= 1.0:
        head, _ = quad(f, 0.0, split, limit=400, epsabs=1e-14, epsrel=1e-12)
    else:
        # Endpoint singularity u^{alpha-1}: substitute u = v^{1/alpha},
        # which turns u^{alpha-1} du into dv/alpha.
        inv = 1.0 / alpha

        def g(v: float) -> float:
            u = v**inv
            return weight(s * u) * (1.0 + s * u) ** (-alpha) * math.exp(-u) * inv

        head, _ = quad(g, 0.0, split, limit=400, epsabs=1e-14, epsrel=1e-12)
    tail, _ = quad(f, split, math.inf, limit=400, epsabs=1e-14, epsrel=1e-12)
    return head + tail, log_ref


def k_alpha(p: GammaChainParams, x: float) -> float:
    """Normalisation integral of the stationary law at argument x > 0."""
    val, log_ref = _weighted_integral_scaled(p, x, lambda t: 1.0)
    return val * math.exp(log_ref)


def l_alpha(p: GammaChainParams, x: float) -> float:
    """Companion integral with the log(1 + t) weight."""
    val, log_ref = _weighted_integral_scaled(p, x, lambda t: math.log1p(t))
    return val * math.exp(log_ref)


def omega_exact(p: GammaChainParams, x: float) -> float:
    """Characteristic function Omega(x) = 2 L_alpha(x) / K_alpha(x)."""
    lval, _ = _weighted_integral_scaled(p, x, lambda t: math.log1p(t))
    kval, _ = _weighted_integral_scaled(p, x, lambda t: 1.0)
    return 2.0 * lval / kval


def gamma_chain_density(p: GammaChainParams, x: float, t) -> np.ndarray:
    """Stationary continued-fraction density t^{a-1} (1+t)^{-a} e^{-kt/x} / K."""
    t = np.asarray(t, dtype=float)
    norm = k_alpha(p, x)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = t ** (p.alpha - 1.0) * (1.0 + t) ** (-p.alpha) * np.exp(-p.rate * t / x)
    return np.where(t > 0, val, 0.0) / norm


# ----------------------------------------------------------------------
# analytic continuation by contour integration
# ----------------------------------------------------------------------


def saddle_point(omega_sq: float) -> complex:
    """Upper-half-plane saddle of log xi - log(1+xi) + xi omega^2, 0 < omega^2 < 4."""
    if not 0.0 < omega_sq < 4.0:
        raise ValueError("saddle exists for 0 < omega_sq < 4")
    return 0.5 * complex(-1.0, math.sqrt(4.0 / omega_sq - 1.0))


def _phi(alpha: float, kx: float, xi: complex) -> complex:
    return alpha * (cmath.log(xi) - cmath.log(1.0 + xi)) + kx * xi


def _contour_nodes(alpha: int, kx: float, spec: ContourSpec, stretch: float = 1.0) -> list[complex]:
    """Corner points of the integration path from 0 to the damped far tail."""
    disc = 4.0 * alpha / kx  # saddle discriminant: complex saddle iff disc > 1
    drop = 45.0 + 5.0 * math.log1p(alpha)
    if disc > 1.04:
        eta = 0.5 * complex(-1.0, math.sqrt(disc - 1.0))
        phi2 = abs(-alpha / eta**2 + alpha / (1.0 + eta) ** 2)
        leg = stretch * min(math.sqrt(2.0 * drop / max(phi2, 1e-12)), 60.0 / kx + 6.0)
        mid = eta + leg * cmath.exp(3j * math.pi / 4.0)
    elif disc > 0.96:
        eta = complex(-0.5, 0.0)
        phi3 = abs(2.0 * alpha / eta**3 - 2.0 * alpha / (1.0 + eta) ** 3)
        leg = stretch * (6.0 * drop / max(phi3, 1e-12)) ** (1.0 / 3.0)
        mid = eta + leg * cmath.exp(2j * math.pi / 3.0)
    else:
        h = max(spec.offset, 0.5) * stretch
        eta = complex(0.0, h)
        mid = complex(-1.5, h)
    # Far tail: horizontal until the exponent has dropped well below the
    # path maximum; the linear kappa*x*Re(xi) term guarantees decay.
    ref = max(_phi(alpha, kx, eta).real, _phi(alpha, kx, mid).real)
    end_re = mid.real - (drop + 2.0 * alpha / max(abs(mid), 1.0)) / kx
    end = complex(end_re, mid.imag)
    while _phi(alpha, kx, end).real > ref - drop and end.real > -1e12:
        end = complex(2.0 * end.real, end.imag)
    if spec.t_max is not None:
        end = complex(-abs(spec.t_max), mid.imag)
    return [0.0 + 0.0j, eta, mid, end]


_WEIGHTS = {
    "k": lambda xi: 1.0 / xi,
    "l": lambda xi: cmath.log(1.0 + xi) / xi,
    "xk": lambda xi: 1.0,
    "xl": lambda xi: cmath.log(1.0 + xi),
}


def _contour_integrals(
    alpha: int, kappa: float, x: float, spec: ContourSpec, names: tuple[str, ...], stretch: float = 1.0
) -> dict[str, complex]:
    """Scaled contour integrals int g(xi) e^{phi(xi) - phi_ref} d xi.

    All requested weights share one path and one reference exponent, so
    ratios of the returned values are exact ratios of the continued
    integrals.
    """
    kx = kappa * x
    nodes = _contour_nodes(alpha, kx, spec, stretch)
    samples = []
    for a, b in zip(nodes[:-1], nodes[1:]):
        ts = np.linspace(0.0, 1.0, 65)
        samples.extend(_phi(alpha, kx, a + t * (b - a)).real for t in ts if a + t * (b - a) != 0)
    phi_ref = max(samples)

    out = {name: 0.0 + 0.0j for name in names}
    for a, b in zip(nodes[:-1], nodes[1:]):
        seg = b - a
        for name in names:
            g = _WEIGHTS[name]

            def f(t: float) -> complex:
                xi = a + t * seg
                if xi == 0:
                    return 0.0
                return g(xi) * cmath.exp(_phi(alpha, kx, xi) - phi_ref) * seg

            re, _ = quad(lambda t: f(t).real, 0.0, 1.0, limit=max(spec.n_points, 800), epsabs=1e-13, epsrel=1e-10)
            im, _ = quad(lambda t: f(t).imag, 0.0, 1.0, limit=max(spec.n_points, 800), epsabs=1e-13, epsrel=1e-10)
            out[name] += complex(re, im)
    return out


def _continued_omega(p: GammaChainParams, x: float, spec: ContourSpec) -> complex:
    """Omega continued to argument -1/x, approached from the upper half plane."""
    n = p.integer_alpha()
    vals = _contour_integrals(n, p.rate, x, spec, ("k", "l"))
    omega = 2.0 * vals["l"] / vals["k"]
    if spec.check_stability:
        vals2 = _contour_integrals(n, p.rate, x, spec, ("k", "l"), stretch=1.35)
        omega2 = 2.0 * vals2["l"] / vals2["k"]
        if abs(omega - omega2) > 2e-6 * max(1.0, abs(omega)):
            raise ContourError(
                f"contour value unstable under path perturbation: {omega} vs {omega2}"
            )
    return omega


def idos_exact(p: GammaChainParams, x: float, contour: ContourSpec | None = None) -> float:
    """Integrated density of states M(x) of the solvable chain, integer alpha.

    Computed from the imaginary part of the continued characteristic
    function; the result is clamped to [0, 1] and the clamp magnitude
    logged, since discretised imaginary parts can stray by quadrature
    error.
    """
    if x <= 0:
        raise ValueError("x must be positive")
    spec = contour or ContourSpec()
    omega = _continued_omega(p, x, spec)
    m = 1.0 - omega.imag / math.pi
    clamped = min(max(m, 0.0), 1.0)
    if clamped != m:
        logger.debug("idos_exact clamp at x=%g: %.3e", x, abs(m - clamped))
    return clamped


def dos_exact(p: GammaChainParams, mu: float, contour: ContourSpec | None = None) -> float:
    """Density of states D(mu) from the derivative of the continued Omega."""
    if mu <= 0:
        raise ValueError("mu must be positive")
    spec = contour or ContourSpec()
    n = p.integer_alpha()
    vals = _contour_integrals(n, p.rate, mu, spec, ("k", "l", "xk", "xl"))
    expr = (vals["xl"] * vals["k"] - vals["l"] * vals["xk"]) / vals["k"] ** 2
    return -(2.0 * p.rate / math.pi) * expr.imag


def tabulate_idos(p: GammaChainParams, xs, contour: ContourSpec | None = None) -> np.ndarray:
    """(x, M(x)) table for CSV emission."""
    xs = np.asarray(xs, dtype=float)
    return np.column_stack([xs, [idos_exact(p, float(x), contour) for x in xs]])


def tabulate_dos(p: GammaChainParams, mus, contour: ContourSpec | None = None) -> np.ndarray:
    """(mu, D(mu)) table for CSV emission."""
    mus = np.asarray(mus, dtype=float)
    return np.column_stack([mus, [dos_exact(p, float(m), contour) for m in mus]])


# ----------------------------------------------------------------------
# chain without disorder and weak-disorder corrections
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class PureChainValues:
    """Closed forms for the chain with all couplings equal to one."""

    xi: float
    omega: float
    dos: float
    idos: float


def pure_chain(x: float) -> PureChainValues:
    """Continued fraction, characteristic function, DOS and IDOS at x.

    xi(x) and Omega(x) require x >= 0; the DOS value is for the squared
    frequency mu = x (zero outside the band 0 < mu < 4).
    """
    if x < 0:
        raise ValueError("x must be nonnegative")
    xi = 0.5 * (math.sqrt(1.0 + 4.0 * x) - 1.0)
    omega = 2.0 * math.log(0.5 * (math.sqrt(1.0 + 4.0 * x) + 1.0))
    dos = 1.0 / (math.pi * math.sqrt(x * (4.0 - x))) if 0.0 < x < 4.0 else 0.0
    idos = math.acos(1.0 - 0.5 * x) / math.pi if x < 4.0 else 1.0
    return PureChainValues(xi, omega, dos, idos)


def weak_disorder_idos(n: int, x: float) -> float:
    """Leading large-n integrated density of states for shape = rate = n.

    Three regimes: inside the band the pure-chain arccosine plus a 1/n
    correction; at the band edge an n^{-1/3} defect; outside the band an
    exponentially small defect controlled by arcosh(x/2 - 1).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if x <= 0:
        raise ValueError("x must be positive")
    if x < 4.0:
        return math.acos(1.0 - 0.5 * x) / math.pi + 1.0 / (2.0 * math.pi * n) / math.sqrt(4.0 / x - 1.0)
    if x == 4.0:
        return 1.0 - (1.0 / gamma_fn(1.0 / 3.0)) ** 2 * (12.0 / n) ** (1.0 / 3.0)
    g = math.acosh(0.5 * x - 1.0)
    return 1.0 - (g / math.pi) * math.exp(-g - 2.0 * n * (math.sinh(g) - g))


def gamma1_coefficient(omega_sq: float) -> float:
    """Coefficient of 1/alpha in the band-interior Lyapunov exponent.

    Equals 1/(8 (4/omega^2 - 1)); consistent with the saddle location and
    with the potential-disorder form as omega -> 2.
    """
    if not 0.0 < omega_sq < 4.0:
        raise ValueError("omega_sq must lie in (0, 4)")
    return 1.0 / (8.0 * (4.0 / omega_sq - 1.0))
