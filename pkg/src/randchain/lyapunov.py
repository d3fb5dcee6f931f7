"""Transfer-matrix products, Lyapunov exponents and their spectral duals.

The growth rate gamma is always quoted per transfer step: one step per
mass for a sprung chain, one step per lattice site for the hopping and
potential-disorder tight-binding forms.  Block-mean error bars, the
Thouless-formula cross-check against an integrated density of states,
and the band-edge rescaling onto the Airy scaling function live here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chain import ANDERSON, TYPE_I, TYPE_II, ChainSpec, DisorderLaw
from .schmidt import DensityGrid
from .specfun import rng_from_seed, scaling_f

__all__ = [
    "TransferStep",
    "LyapunovEstimate",
    "CollapseReport",
    "transfer_lyapunov",
    "thouless_gamma",
    "band_edge_collapse",
]


@dataclass(frozen=True)
class TransferStep:
    """One 2x2 chain transfer matrix; the lower row is fixed to (1, 0)."""

    a11: float
    a12: float
    a21: float = 1.0
    a22: float = 0.0

    def __post_init__(self):
        if self.a21 != 1.0 or self.a22 != 0.0:
            raise ValueError("chain transfer steps have lower row (1, 0)")

    def apply(self, u: float, v: float) -> tuple[float, float]:
        return self.a11 * u + self.a12 * v, u


@dataclass(frozen=True)
class LyapunovEstimate:
    """Per-step log growth rate with block-mean error bar."""

    gamma: float
    stderr: float
    steps: int
    resets: int

    def __post_init__(self):
        if self.stderr < 0 or self.steps < 1:
            raise ValueError("invalid estimate")


def _block_gammas_chain2(law, spring_k, omega_sq, n_blocks, block_len, burn_in, rng, renorm_every=1):
    """Type II / lattice style step u' = a u - v with random a."""
    u = np.ones(n_blocks)
    v = np.full(n_blocks, 0.5)
    acc = np.zeros(n_blocks)
    for i in range(block_len + burn_in):
        a = 2.0 - omega_sq * law.sample(rng, n_blocks) / spring_k
        u, v = a * u - v, u
        if (i + 1) % renorm_every == 0:
            norm = np.sqrt(u * u + v * v)
            u /= norm
            v /= norm
            if i >= burn_in:
                acc += np.log(norm)
    return acc / block_len


def _block_gammas_anderson(law, energy, n_blocks, block_len, burn_in, rng, renorm_every=1):
    """Lattice with site potential: u' = (E - V) u - v, band [-2, 2]."""
    u = np.ones(n_blocks)
    v = np.full(n_blocks, 0.5)
    acc = np.zeros(n_blocks)
    for i in range(block_len + burn_in):
        a = energy - law.sample(rng, n_blocks)
        u, v = a * u - v, u
        if (i + 1) % renorm_every == 0:
            norm = np.sqrt(u * u + v * v)
            u /= norm
            v /= norm
            if i >= burn_in:
                acc += np.log(norm)
    return acc / block_len


def _block_gammas_hopping(law, omega, n_blocks, block_len, burn_in, rng, renorm_every=1):
    """Off-diagonal disorder: t_n u' = omega u - t_{n-1} v, one step per site."""
    u = np.ones(n_blocks)
    v = np.full(n_blocks, 0.5)
    t_prev = np.sqrt(law.sample(rng, n_blocks))
    acc = np.zeros(n_blocks)
    for i in range(block_len + burn_in):
        t_cur = np.sqrt(law.sample(rng, n_blocks))
        u, v = (omega * u - t_prev * v) / t_cur, u
        t_prev = t_cur
        if (i + 1) % renorm_every == 0:
            norm = np.sqrt(u * u + v * v)
            u /= norm
            v /= norm
            if i >= burn_in:
                acc += np.log(norm)
    return acc / block_len


def transfer_lyapunov(
    spec: ChainSpec,
    omega_sq_or_e: float,
    n_steps: int,
    seed=0,
    n_blocks: int = 50,
    burn_in: int = 1000,
    renorm_every: int = 1,
) -> LyapunovEstimate:
    """Lyapunov exponent of the chain or lattice at the given frequency/energy.

    The argument is the squared frequency for the sprung chains and the
    energy for the lattice kind.  n_steps counted steps are split over
    n_blocks independent trajectories (each with its own discarded
    burn-in); the estimate is the mean of the block means and the error
    bar their standard error.  By default the vector is renormalised
    every step, so no overflow is possible; stretching the interval only
    moves rounding around since the log accumulates exactly.
    """
    if n_steps < 1000:
        raise ValueError("need n_steps >= 1000")
    if n_blocks < 2 or n_steps // n_blocks < 1:
        raise ValueError("invalid block structure")
    if renorm_every < 1 or burn_in % renorm_every or (n_steps // n_blocks) % renorm_every:
        raise ValueError("burn_in and block length must be multiples of renorm_every")
    rng = rng_from_seed(seed)
    block_len = n_steps // n_blocks
    if spec.kind == TYPE_II:
        blocks = _block_gammas_chain2(
            spec.law, spec.spring_k, omega_sq_or_e, n_blocks, block_len, burn_in, rng, renorm_every
        )
    elif spec.kind == ANDERSON:
        blocks = _block_gammas_anderson(
            spec.law, omega_sq_or_e, n_blocks, block_len, burn_in, rng, renorm_every
        )
    elif spec.kind == TYPE_I:
        if omega_sq_or_e < 0:
            raise ValueError("type I chains take omega_sq >= 0")
        blocks = _block_gammas_hopping(
            spec.law, math.sqrt(omega_sq_or_e), n_blocks, block_len, burn_in, rng, renorm_every
        )
    else:
        raise ValueError(f"unsupported kind {spec.kind}")
    total = n_blocks * block_len
    gamma = float(np.mean(blocks))
    stderr = float(np.std(blocks, ddof=1) / math.sqrt(n_blocks))
    return LyapunovEstimate(gamma=gamma, stderr=stderr, steps=total, resets=total // renorm_every)


def _log_abs_average(a: float, b: float, s: float) -> float:
    """Average of log|s - mu| over mu in [a, b] (exact antiderivative).

    Finite for s inside the panel as well, which is how the logarithmic
    singularity of the Thouless integrand is handled: the panel pair
    around s contributes its exact principal-value mass.
    """
    if b <= a:
        raise ValueError("need a < b")

    def part(u: float) -> float:
        if u == 0.0:
            return 0.0
        return u * math.log(abs(u))

    return (part(s - a) - part(s - b)) / (b - a) - 1.0


def thouless_gamma(
    idos_curve: DensityGrid, omega_sq: float, law: DisorderLaw, spring_k: float
) -> float:
    """Lyapunov exponent from the spectral measure: Thouless route.

    gamma = int log|omega^2 - mu| dM(mu) + <log m> - log K, with the
    integral taken against the tabulated spectral mass, each cell
    integrated under its exact log kernel average.
    """
    edges = idos_curve.edges()
    total = idos_curve.total_mass
    if total <= 0:
        raise ValueError("empty spectral measure")
    acc = 0.0
    for w, a, b in zip(idos_curve.weights, edges[:-1], edges[1:]):
        if w == 0.0:
            continue
        acc += w * _log_abs_average(a, b, omega_sq)
    acc /= total
    return acc + law.mean_log() - math.log(spring_k)


@dataclass(frozen=True)
class CollapseReport:
    """Band-edge rescaling of Lyapunov data onto the Airy scaling function."""

    energies: np.ndarray
    scaled_coord: np.ndarray
    scaled_gamma: np.ndarray
    scaled_stderr: np.ndarray
    reference: np.ndarray
    rel_dev: np.ndarray
    max_rel_dev: float


def band_edge_collapse(
    alpha: float, energy_grid, n_steps: int, seed=0, n_blocks: int = 50
) -> CollapseReport:
    """Rescaled Lyapunov exponents of the weakly disordered lattice.

    The site potential has variance 1/alpha; for each energy E the
    exponent is rescaled as gamma (2 alpha)^{1/3} and plotted against
    (2 alpha)^{2/3} (|E| - 2), where it should follow the Airy scaling
    function.
    """
    from .chain import GaussianPotential

    if alpha < 8:
        raise ValueError("weak-disorder collapse needs alpha >= 8")
    energies = np.asarray(energy_grid, dtype=float)
    cube = (2.0 * alpha) ** (1.0 / 3.0)
    scaled_x = (2.0 * alpha) ** (2.0 / 3.0) * (np.abs(energies) - 2.0)
    gammas = np.empty(energies.size)
    errs = np.empty(energies.size)
    law = GaussianPotential(1.0 / alpha)
    for i, e in enumerate(energies):
        spec = ChainSpec(ANDERSON, 1, law, seed=0)
        est = transfer_lyapunov(spec, float(e), n_steps, seed=(seed, i), n_blocks=n_blocks)
        gammas[i] = est.gamma
        errs[i] = est.stderr
    scaled_gamma = gammas * cube
    scaled_err = errs * cube
    reference = np.array([scaling_f(float(s)) for s in scaled_x])
    rel = np.abs(scaled_gamma - reference) / np.abs(reference)
    return CollapseReport(
        energies=energies,
        scaled_coord=scaled_x,
        scaled_gamma=scaled_gamma,
        scaled_stderr=scaled_err,
        reference=reference,
        rel_dev=rel,
        max_rel_dev=float(np.max(rel)),
    )
