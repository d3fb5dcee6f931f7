"""Construction of disordered chain and lattice models.

A chain of N masses coupled by springs maps onto two tridiagonal
matrices: the (2N-1) x (2N-1) anti-symmetric matrix built from the
interleaved ratios lambda_j = K_j/m_j, K_j/m_{j+1}, and the N x N
dynamical matrix governing the squared frequencies.  Both disorder
conventions are supported: i.i.d. lambdas (type I) and i.i.d. masses
with a common spring constant (type II), which forces the lambdas to be
equal in pairs.  The same machinery covers the tight-binding lattice
with potential disorder used by the band-edge scaling checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammainc

from .specfun import digamma, rng_from_seed
from .tridiag import AntisymTridiag, GeneralTridiag, SymTridiag, count_below_many

__all__ = [
    "DisorderLaw",
    "Constant",
    "Gamma",
    "TwoPoint",
    "GaussianPotential",
    "ChainSpec",
    "ChainRealization",
    "TYPE_I",
    "TYPE_II",
    "ANDERSON",
    "realize",
    "lambda_matrix",
    "dynamical_matrix",
    "frequency_matrix",
    "anderson_hopping",
    "empirical_idos",
    "squared_frequencies",
]

TYPE_I = "typeI"
TYPE_II = "typeII"
ANDERSON = "anderson"
_KINDS = (TYPE_I, TYPE_II, ANDERSON)


class DisorderLaw:
    """Base class for the supported disorder laws."""

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        raise NotImplementedError

    def mean(self) -> float:
        raise NotImplementedError

    def mean_log(self) -> float:
        raise NotImplementedError

    def cdf(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True)
class Constant(DisorderLaw):
    v: float

    def __post_init__(self):
        if not self.v > 0:
            raise ValueError("constant value must be positive")

    def sample(self, rng, n):
        return np.full(int(n), float(self.v))

    def mean(self):
        return float(self.v)

    def mean_log(self):
        return math.log(self.v)

    def cdf(self, x):
        return (np.asarray(x, dtype=float) >= self.v).astype(float)


@dataclass(frozen=True)
class Gamma(DisorderLaw):
    """Gamma law with density ~ x^{alpha-1} e^{-rate x}."""

    alpha: float
    rate: float

    def __post_init__(self):
        if self.alpha <= 0 or self.rate <= 0:
            raise ValueError("gamma parameters must be positive")

    def sample(self, rng, n):
        return rng.gamma(shape=self.alpha, scale=1.0 / self.rate, size=int(n))

    def mean(self):
        return self.alpha / self.rate

    def mean_log(self):
        return digamma(self.alpha) - math.log(self.rate)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return gammainc(self.alpha, self.rate * np.clip(x, 0.0, None))


@dataclass(frozen=True)
class TwoPoint(DisorderLaw):
    """Two-point law: value m with probability p, value big_m with 1-p."""

    m: float
    big_m: float
    p: float

    def __post_init__(self):
        if self.m <= 0 or self.big_m <= 0:
            raise ValueError("two-point values must be positive")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")

    def sample(self, rng, n):
        pick = rng.random(int(n)) < self.p
        return np.where(pick, self.m, self.big_m)

    def mean(self):
        return self.p * self.m + (1.0 - self.p) * self.big_m

    def mean_log(self):
        return self.p * math.log(self.m) + (1.0 - self.p) * math.log(self.big_m)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        lo, hi = sorted((self.m, self.big_m))
        p_lo = self.p if self.m <= self.big_m else 1.0 - self.p
        return np.where(x >= hi, 1.0, np.where(x >= lo, p_lo, 0.0))


@dataclass(frozen=True)
class GaussianPotential(DisorderLaw):
    """Centred Gaussian site potential for the tight-binding lattice."""

    variance: float

    def __post_init__(self):
        if not self.variance > 0:
            raise ValueError("variance must be positive")

    def sample(self, rng, n):
        return rng.normal(0.0, math.sqrt(self.variance), int(n))

    def mean(self):
        return 0.0

    def mean_log(self):
        raise ValueError("mean_log undefined for a signed potential")

    def cdf(self, x):
        from scipy.special import ndtr

        return ndtr(np.asarray(x, dtype=float) / math.sqrt(self.variance))


@dataclass(frozen=True)
class ChainSpec:
    """Full description of a chain or lattice model."""

    kind: str
    n_masses: int
    law: DisorderLaw
    spring_k: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"kind must be one of {_KINDS}")
        if self.n_masses < 1:
            raise ValueError("n_masses must be >= 1")
        if self.spring_k <= 0:
            raise ValueError("spring_k must be positive")


@dataclass(frozen=True)
class ChainRealization:
    """Drawn disorder for one chain: interleaved lambdas, masses for type II."""

    lambdas: np.ndarray
    masses: np.ndarray | None
    spec: ChainSpec

    @property
    def n_masses(self) -> int:
        return self.spec.n_masses


def realize(spec: ChainSpec) -> ChainRealization:
    """Draw one realization; deterministic given spec.seed.

    Type I draws 2N-1 i.i.d. lambdas.  Type II draws N masses and sets
    lambda_{2j} = lambda_{2j+1} = K/m_{j+1} (paired), with lambda_1 =
    K/m_1 standing alone.  For the lattice kind the array holds N site
    potentials instead.
    """
    rng = rng_from_seed(spec.seed)
    n = spec.n_masses
    if spec.kind == TYPE_I:
        lam = spec.law.sample(rng, 2 * n - 1)
        return ChainRealization(lam, None, spec)
    if spec.kind == TYPE_II:
        masses = spec.law.sample(rng, n)
        lam = np.empty(2 * n - 1)
        lam[0] = spec.spring_k / masses[0]
        for j in range(1, n):
            lam[2 * j - 1] = lam[2 * j] = spec.spring_k / masses[j]
        return ChainRealization(lam, masses, spec)
    return ChainRealization(spec.law.sample(rng, n), None, spec)


def lambda_matrix(r: ChainRealization) -> AntisymTridiag:
    """The (2N-1) x (2N-1) anti-symmetric matrix with sqrt(lambda) couplings."""
    n = r.n_masses
    if np.any(r.lambdas <= 0):
        raise ValueError("lambdas must be positive")
    return AntisymTridiag(np.sqrt(r.lambdas[: 2 * n - 2]))


def _lambda_padded(r: ChainRealization, boundary: str) -> np.ndarray:
    """1-based lambda lookup array with the boundary springs filled in."""
    n = r.n_masses
    pad = np.zeros(2 * n)
    pad[1 : 2 * n - 1] = r.lambdas[: 2 * n - 2]
    if boundary == "fixed":
        if r.masses is None:
            raise ValueError("fixed boundaries need explicit masses (type II)")
        pad[0] = r.spec.spring_k / r.masses[0]
        pad[2 * n - 1] = r.spec.spring_k / r.masses[-1]
    elif boundary != "free":
        raise ValueError("boundary must be 'free' or 'fixed'")
    return pad


def dynamical_matrix(r: ChainRealization, boundary: str = "free") -> GeneralTridiag:
    """The N x N matrix A with u'' = A u; eigenvalues are -omega^2.

    Free boundaries (no springs beyond the end masses) give the zero mode;
    'fixed' attaches the end masses to walls with the common spring, which
    is the convention matched exactly by the node-counting recursion.
    """
    n = r.n_masses
    pad = _lambda_padded(r, boundary)
    diag = -(pad[1 : 2 * n : 2] + pad[0 : 2 * n - 1 : 2])
    sup = pad[1 : 2 * n - 2 : 2] if n > 1 else np.empty(0)
    sub = pad[2 : 2 * n - 1 : 2] if n > 1 else np.empty(0)
    return GeneralTridiag(diag, sup, sub)


def frequency_matrix(r: ChainRealization, boundary: str = "free") -> SymTridiag:
    """Symmetrized -A: positive semidefinite, eigenvalues omega^2."""
    a = dynamical_matrix(r, boundary)
    sym = a.symmetrized() if a.n > 1 else SymTridiag(a.diag, a.sup)
    return SymTridiag(-sym.diag, sym.off)


def anderson_hopping(spec: ChainSpec) -> SymTridiag:
    """Hopping matrix of the off-diagonal tight-binding model.

    Zero diagonal, off-diagonal sqrt(lambda_j); the spectrum coincides
    with that of i Lambda and is symmetric about zero.
    """
    if spec.kind != TYPE_I:
        raise ValueError("anderson_hopping requires a type I spec")
    r = realize(spec)
    n = spec.n_masses
    return SymTridiag(np.zeros(2 * n - 1), np.sqrt(r.lambdas[: 2 * n - 2]))


def squared_frequencies(t: SymTridiag, tol: float | None = None) -> np.ndarray:
    """Positive squared frequencies from a zero-diagonal hopping matrix.

    Only the positive half of the symmetric spectrum is bisected.
    """
    from .tridiag import eigenvalues

    n_pairs = (t.n - 1) // 2
    _, hi = t.gershgorin()
    ranks = np.arange(t.n - n_pairs + 1, t.n + 1)
    spec = eigenvalues(t, tol, ranks=ranks, bounds=(0.0, hi))
    return spec.values**2


def empirical_idos(t: SymTridiag, xs) -> np.ndarray:
    """Fraction of squared frequencies <= x for a zero-diagonal matrix.

    Sturm counts at +-sqrt(x) bracket the symmetric spectrum; the zero
    mode is excluded, so the result is normalised by the pair count.
    """
    xs = np.asarray(xs, dtype=float)
    if np.any(xs < 0):
        raise ValueError("probe points must be nonnegative")
    roots = np.sqrt(xs)
    n_pairs = (t.n - 1) // 2
    upper = count_below_many(t, roots)
    lower = count_below_many(t, -roots)
    return np.maximum((upper - lower - 1) / (2.0 * n_pairs), 0.0)
