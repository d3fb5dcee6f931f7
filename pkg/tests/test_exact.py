import math

import numpy as np
import pytest
import scipy.special as sp
from scipy.integrate import quad
from scipy.optimize import brentq

from randchain import chain
from randchain.exact import (
    ContourSpec,
    GammaChainParams,
    dos_exact,
    gamma1_coefficient,
    gamma_chain_density,
    idos_exact,
    k_alpha,
    l_alpha,
    omega_exact,
    pure_chain,
    saddle_point,
    tabulate_dos,
    tabulate_idos,
    weak_disorder_idos,
)


# ----------------------------------------------------------------------
# positive-argument integrals
# ----------------------------------------------------------------------


def test_k_alpha_exponential_integral_value():
    # alpha = kappa = x = 1 reduces to e E_1(1) = 0.596347...
    oracle = math.e * sp.exp1(1.0)
    assert k_alpha(GammaChainParams(1.0, 1.0), 1.0) == pytest.approx(oracle, rel=1e-10)


def test_k1_large_x_asymptote():
    # K_1(x) = e^{1/x} E_1(1/x) -> log x - euler_gamma as x -> infinity.
    # (The expansion E_1(z) = -gamma - log z + O(z) fixes the sign of the
    # constant term.)
    x = 1e6
    got = k_alpha(GammaChainParams(1.0, 1.0), x)
    assert got == pytest.approx(math.log(x) - 0.5772156649015329, rel=1e-2)
    assert got == pytest.approx(math.e ** (1.0 / x) * sp.exp1(1.0 / x), rel=1e-9)


def test_k_alpha_monte_carlo_oracle():
    # alpha = kappa = 2, x = 1: the integral is E[(1+T)^{-2} e^{-2T}] times
    # Gamma(2)/2^2 under T ~ Gamma(2, rate 2)... sample the defining
    # integral directly as an expectation over Gamma(alpha, 1) draws:
    # K = Gamma(alpha) E[(1+T)^{-alpha} e^{-T (kappa/x - 1)}], T ~ Gamma(alpha,1).
    alpha, kappa, x = 2.0, 2.0, 1.0
    rng = np.random.default_rng(0)
    t = rng.gamma(alpha, 1.0, 10**7)
    w = (1.0 + t) ** (-alpha) * np.exp(-t * (kappa / x - 1.0))
    est = math.gamma(alpha) * w.mean()
    se = math.gamma(alpha) * w.std() / math.sqrt(w.size)
    assert abs(k_alpha(GammaChainParams(alpha, kappa), x) - est) < 3.0 * se


def test_k_alpha_small_shape_substitution():
    # alpha < 1 exercises the endpoint substitution; compare against a
    # quadrature of the integrand in the substituted variable.
    alpha, kappa, x = 0.5, 1.0, 1.0
    oracle = quad(
        lambda u: (1.0 + u**2) ** (-alpha) * math.exp(-kappa * u**2 / x) * 2.0 * u ** (2 * alpha - 1),
        0.0,
        30.0,
        limit=300,
    )[0]
    assert k_alpha(GammaChainParams(alpha, kappa), x) == pytest.approx(oracle, rel=1e-8)


def test_omega_exact_vanishes_at_zero():
    assert omega_exact(GammaChainParams(1.0, 1.0), 1e-12) == pytest.approx(0.0, abs=1e-10)


def test_omega_exact_large_alpha_hits_pure_value():
    got = omega_exact(GammaChainParams(200.0, 200.0), 2.0)
    assert abs(got - 2.0 * math.log(2.0)) < 0.01


def test_omega_exact_converges_to_pure_pointwise():
    gaps = []
    for n in (25, 50, 100, 200):
        p = GammaChainParams(float(n), float(n))
        gap = max(abs(omega_exact(p, x) - pure_chain(x).omega) for x in (0.5, 1.0, 2.0))
        gaps.append(gap * n)
    # gap <= C / alpha with a stable constant
    assert max(gaps) < 2.0 * min(gaps)


def test_stationary_density_normalised():
    p = GammaChainParams(1.5, 1.0)
    val = quad(lambda t: gamma_chain_density(p, 1.3, t), 0.0, np.inf, limit=300)[0]
    assert val == pytest.approx(1.0, abs=1e-8)


# ----------------------------------------------------------------------
# analytic continuation
# ----------------------------------------------------------------------


def test_idos_rejects_non_integer_alpha():
    with pytest.raises(ValueError):
        idos_exact(GammaChainParams(1.5, 1.0), 1.0)


def test_idos_large_alpha_half_at_band_centre():
    got = idos_exact(GammaChainParams(200.0, 200.0), 2.0)
    assert abs(got - 0.5) < 5e-3


def test_idos_dyson_singularity_scaling():
    p = GammaChainParams(1.0, 1.0)
    vals = {x: idos_exact(p, x) * math.log(x) ** 2 for x in (1e-4, 1e-5, 1e-6)}
    for a in vals.values():
        for b in vals.values():
            assert abs(a / b - 1.0) <= 0.25


def test_idos_monotone_and_bounded():
    p = GammaChainParams(1.0, 1.0)
    xs = np.geomspace(1e-3, 8.0, 25)
    vals = [idos_exact(p, float(x)) for x in xs]
    assert all(0.0 <= v <= 1.0 for v in vals)
    assert all(b >= a - 1e-9 for a, b in zip(vals, vals[1:]))


def test_idos_clamp_magnitude_is_tiny():
    # Where M is essentially saturated the raw imaginary part may stray
    # past 1 by quadrature error only.
    from randchain.exact import ContourSpec, _continued_omega

    p = GammaChainParams(1.0, 1.0)
    for x in (30.0, 60.0):
        raw = 1.0 - _continued_omega(p, float(x), ContourSpec()).imag / math.pi
        assert abs(raw - min(max(raw, 0.0), 1.0)) < 1e-6


def test_idos_matches_empirical_spot_check():
    p = GammaChainParams(1.0, 1.0)
    xs = np.array([0.5, 2.0, 5.0])
    acc = np.zeros(xs.size)
    n_real = 12
    for s in range(n_real):
        h = chain.anderson_hopping(chain.ChainSpec(chain.TYPE_I, 2001, chain.Gamma(1.0, 1.0), seed=500 + s))
        acc += chain.empirical_idos(h, xs)
    emp = acc / n_real
    ex = np.array([idos_exact(p, float(x)) for x in xs])
    assert np.max(np.abs(emp - ex)) < 0.01


def test_idos_matches_empirical_at_alpha_three():
    # The continuation handles every positive integer order of the pole;
    # spot-check a mid-range shape against diagonalization.
    p = GammaChainParams(3.0, 3.0)
    xs = np.array([0.3, 2.0, 4.5])
    acc = np.zeros(xs.size)
    n_real = 10
    for s in range(n_real):
        h = chain.anderson_hopping(chain.ChainSpec(chain.TYPE_I, 2001, chain.Gamma(3.0, 3.0), seed=(600, s)))
        acc += chain.empirical_idos(h, xs)
    emp = acc / n_real
    ex = np.array([idos_exact(p, float(x)) for x in xs])
    assert np.max(np.abs(emp - ex)) < 0.01


def test_dos_carries_unit_mass_up_to_singular_head():
    # The density integrates to one; below the cut the mass follows the
    # 1/(log x)^2 law of the integrated density, so the body accounts for
    # 1 - M(cut).
    p = GammaChainParams(2.0, 2.0)
    cut = 1e-3
    body = quad(lambda m: dos_exact(p, m), cut, 12.0, limit=80)[0]
    assert body + idos_exact(p, cut) == pytest.approx(1.0, abs=5e-3)


def test_contour_stability_control():
    # An unreasonable forced truncation of the tail must be caught by the
    # stability check rather than silently accepted.
    p = GammaChainParams(1.0, 1.0)
    bad = ContourSpec(t_max=1.5, check_stability=True)
    with pytest.raises(ArithmeticError):
        idos_exact(p, 0.05, bad)


def test_saddle_point_location():
    # The stationary point of log(xi) - log(1+xi) + xi w2 found numerically
    # agrees with the closed form.  Along Re(xi) = -1/2 the derivative is
    # purely real, so a one-dimensional root search locates the saddle.
    for w2 in (1.0, 2.0, 3.0):
        eta = saddle_point(w2)

        def dre(yim: float) -> float:
            xi = complex(-0.5, yim)
            return (1.0 / xi - 1.0 / (1.0 + xi) + w2).real

        yim = brentq(dre, 0.01, 20.0, xtol=1e-14)
        xi = complex(-0.5, yim)
        deriv = 1.0 / xi - 1.0 / (1.0 + xi) + w2
        assert abs(deriv) < 1e-10
        assert abs(xi - eta) < 1e-10


def test_dos_matches_idos_finite_difference():
    p = GammaChainParams(1.0, 1.0)
    h = 1e-4
    for mu in (0.8, 1.7, 2.9):
        fd = (idos_exact(p, mu + h) - idos_exact(p, mu - h)) / (2.0 * h)
        assert abs(dos_exact(p, mu) - fd) < 1e-3


def test_tabulations_shapes():
    p = GammaChainParams(1.0, 1.0)
    t1 = tabulate_idos(p, [0.5, 1.0])
    t2 = tabulate_dos(p, [0.5, 1.0])
    assert t1.shape == (2, 2) and t2.shape == (2, 2)
    assert t1[0, 1] == pytest.approx(idos_exact(p, 0.5), rel=1e-12)


# ----------------------------------------------------------------------
# closed forms of the chain without disorder
# ----------------------------------------------------------------------


def test_pure_chain_values_at_two():
    v = pure_chain(2.0)
    assert v.xi == pytest.approx(1.0, abs=1e-15)
    assert v.omega == pytest.approx(2.0 * math.log(2.0), abs=1e-15)
    assert v.dos == pytest.approx(1.0 / (2.0 * math.pi), abs=1e-16)
    assert v.idos == pytest.approx(0.5, abs=1e-15)


def test_pure_chain_band_edges():
    assert pure_chain(4.0).idos == 1.0
    assert pure_chain(0.0).idos == 0.0
    assert pure_chain(5.0).dos == 0.0


def test_weak_disorder_first_branch_value():
    got = weak_disorder_idos(10, 2.0)
    assert got == pytest.approx(0.5 + 1.0 / (20.0 * math.pi), abs=1e-12)
    assert got == pytest.approx(0.515915, abs=1e-6)


def test_weak_disorder_band_edge_value():
    got = weak_disorder_idos(12, 4.0)
    # 1 - Gamma(1/3)^{-2} with the module's own gamma
    assert got == pytest.approx(1.0 - (1.0 / sp.gamma(1.0 / 3.0)) ** 2, abs=1e-10)
    assert got == pytest.approx(0.86066, abs=2e-5)


def test_weak_disorder_outside_band_saturates():
    assert weak_disorder_idos(10**9, 6.0) == pytest.approx(1.0, abs=1e-12)


def test_gamma1_coefficient_values():
    assert gamma1_coefficient(2.0) == pytest.approx(0.125, abs=1e-15)
    assert gamma1_coefficient(1e-9) == pytest.approx(0.0, abs=1e-9)
    with pytest.raises(ValueError):
        gamma1_coefficient(4.0)


def test_gamma1_agrees_with_lattice_form_near_edge():
    # Near the band edge the coefficient merges with the potential-disorder
    # form 1/(8 (1 - (E/2)^2)) at E = omega.
    w = 1.99
    lattice = 1.0 / (8.0 * (1.0 - (w / 2.0) ** 2))
    assert abs(gamma1_coefficient(w * w) / lattice - 1.0) < 0.05
