"""Theory-evaluator tests: oracles, exact degenerate cases, cross-checks.

Frozen oracle values and their provenance:
  * kappa for A = 0.1 eta^2 + 0.89, eta standard normal: 1.9954946282347668
    by 200-point Gauss-Hermite quadrature of E A^kappa (bisection to 1e-13).
  * theta for psi=(1,1), alpha=4, p=1, Z standard normal: 0.924413657462314
    by Gauss-Legendre evaluation of 2 E[Z^4 (2 Phi(|Z|) - 1)] / (2 E Z^4),
    i.e. the exact two-term max/mean ratio.
  * theta_x_sre sequence for the multipliers above (alpha=2, p=2, Z normal),
    400k-replicate reference run: m=2: 0.8516, m=5: 0.6176, m=10: 0.4594,
    m=25: 0.3225, m=50: 0.2733.
"""

import math

import numpy as np
import pytest

from svextremes import (Garch11Pair, KestenProblem, RngSeed,
                        ThetaTheoryResult, constant, kesten_index, pareto,
                        std_normal, student_t, theta_sigma_sre,
                        theta_sigma_sre_quadrature, theta_x_ma, theta_x_sre)

KAPPA_ORACLE = 1.9954946282347668
MA_THETA_ORACLE = 0.924413657462314
SRE_SEQ_ORACLE = {2: 0.8516, 5: 0.6176, 10: 0.4594, 25: 0.3225, 50: 0.2733}


def garch_problem():
    return KestenProblem(Garch11Pair(alpha0=1e-7, alpha1=0.1, beta1=0.89,
                                     eta=std_normal()))


def zero_problem():
    return KestenProblem(constant(0.0))


# -- Kesten index ---------------------------------------------------------

def test_kesten_garch_multipliers_match_quadrature_oracle():
    r = kesten_index(garch_problem(), mc_reps=200_000, seed=RngSeed(0))
    assert abs(r.kappa - KAPPA_ORACLE) < 0.05
    assert abs(r.kappa - 2.0) < 0.05
    assert r.mc_reps == 200_000
    assert r.bracket == (1e-3, 64.0)
    assert r.f_stderr > 0


def test_kesten_lognormal_closed_form():
    # log A ~ Normal(-1/2, 1) has E A^kappa = exp(-kappa/2 + kappa^2/2),
    # equal to 1 at kappa = 1
    def sampler(g, size):
        return np.exp(g.normal(-0.5, 1.0, size))

    r = kesten_index(KestenProblem(sampler), mc_reps=200_000, seed=RngSeed(0))
    assert abs(r.kappa - 1.0) < 0.05


def test_kesten_bounded_multiplier_has_no_root():
    with pytest.raises(ValueError, match="no finite tail index"):
        kesten_index(KestenProblem(constant(0.5)), mc_reps=10_000)


def test_kesten_bracket_too_small():
    prob = KestenProblem(Garch11Pair(alpha0=1e-7, alpha1=0.1, beta1=0.89,
                                     eta=std_normal()), kappa_max=1.0)
    with pytest.raises(ValueError, match="no finite tail index"):
        kesten_index(prob, mc_reps=50_000)


def test_kesten_problem_validation():
    with pytest.raises(ValueError, match="no stationary solution"):
        KestenProblem(pareto(4.0))  # E log A > 0 on [1, inf)
    with pytest.raises(ValueError, match="non-negative"):
        KestenProblem(std_normal())
    with pytest.raises(ValueError, match="negative values"):
        KestenProblem(lambda g, size: g.normal(size=size))
    with pytest.raises(ValueError, match="kappa_min"):
        KestenProblem(constant(0.5), kappa_min=0.0)
    with pytest.raises(ValueError, match="mc_reps"):
        kesten_index(garch_problem(), mc_reps=1)


# -- theta_sigma ----------------------------------------------------------

def test_theta_sigma_zero_multiplier_is_one():
    # A == 0 kills every product immediately, so no extremal clustering
    r = theta_sigma_sre(zero_problem(), alpha=1.0, mc_reps=5000)
    assert r.value == 1.0
    assert r.truncation["risk_fraction"] == 0.0


def test_theta_sigma_two_routes_agree():
    prob = garch_problem()
    mc = theta_sigma_sre(prob, alpha=2.0, mc_reps=50_000, seed=RngSeed(1))
    quad = theta_sigma_sre_quadrature(prob, alpha=2.0, mc_reps=50_000,
                                      seed=RngSeed(2))
    assert abs(mc.value - quad.value) < 0.02
    assert 0 < mc.value < 0.2  # strong volatility clustering at these params
    assert mc.mc_stderr > 0


def test_theta_sigma_rejects_wrong_alpha():
    with pytest.raises(ValueError, match="alpha inconsistent"):
        theta_sigma_sre(garch_problem(), alpha=3.0, mc_reps=1000)


def test_theta_sigma_truncation_warning():
    # products of the GARCH multipliers decay at rate |E log A| ~ 0.015 per
    # step, so a horizon of 50 leaves most replicates unresolved
    with pytest.warns(UserWarning, match="truncation risk"):
        r = theta_sigma_sre(garch_problem(), alpha=2.0, mc_reps=2000,
                            trunc_T=50)
    assert r.truncation["risk_fraction"] > 0.01
    with pytest.raises(ValueError, match="trunc_T"):
        theta_sigma_sre(garch_problem(), alpha=2.0, mc_reps=100, trunc_T=0)


# -- theta_x for SRE volatility -------------------------------------------

def test_theta_x_sre_m_one_is_exactly_one():
    r = theta_x_sre(garch_problem(), std_normal(), alpha=2.0, p=2.0, m=1,
                    mc_reps=1000)
    assert r.value == 1.0
    assert np.array_equal(r.sequence, np.ones(1))


def test_theta_x_sre_zero_multiplier_sequence_is_flat():
    r = theta_x_sre(zero_problem(), std_normal(), alpha=1.0, p=1.0, m=5,
                    mc_reps=2000)
    assert np.array_equal(r.sequence, np.ones(5))


def test_theta_x_sre_sequence_matches_reference_run():
    r = theta_x_sre(garch_problem(), std_normal(), alpha=2.0, p=2.0, m=50,
                    mc_reps=100_000, seed=RngSeed(0))
    for m_ref, val in SRE_SEQ_ORACLE.items():
        assert abs(r.sequence[m_ref - 1] - val) < 0.02
    assert np.all(np.diff(r.sequence) <= 0)
    assert r.sequence[0] == 1.0
    assert r.value == r.sequence[-1]


def test_theta_x_sre_thread_invariant():
    args = dict(z=std_normal(), alpha=2.0, p=2.0, m=10, mc_reps=150_000,
                seed=RngSeed(4))
    r1 = theta_x_sre(garch_problem(), threads=1, **args)
    r3 = theta_x_sre(garch_problem(), threads=3, **args)
    assert r1.value == r3.value
    assert np.array_equal(r1.sequence, r3.sequence)
    assert r1.mc_stderr == r3.mc_stderr


def test_theta_x_sre_moment_guards():
    with pytest.raises(ValueError, match="moment diverges"):
        theta_x_sre(garch_problem(), student_t(3.0), alpha=2.0, p=2.0, m=5)
    with pytest.raises(ValueError, match="degenerate z"):
        theta_x_sre(garch_problem(), constant(0.0), alpha=2.0, p=2.0, m=5)
    with pytest.raises(ValueError, match="m must be"):
        theta_x_sre(garch_problem(), std_normal(), alpha=2.0, p=2.0, m=0)


# -- theta_x for MA volatility --------------------------------------------

def test_theta_x_ma_single_coefficient_is_one():
    assert theta_x_ma((2.5,), alpha=4.0, p=1.0, z=constant(1.0)).value == 1.0
    r = theta_x_ma((2.5,), alpha=4.0, p=1.0, z=std_normal(), mc_reps=5000)
    assert r.value == 1.0  # max and mean coincide with one term


def test_theta_x_ma_constant_z_closed_forms():
    assert theta_x_ma((1.0, 1.0), alpha=1.0, p=1.0,
                      z=constant(1.0)).value == 0.5
    r = theta_x_ma((1.0, 0.5), alpha=4.0, p=1.0, z=constant(2.0))
    assert r.value == 1.0 / 1.0625
    assert r.mc_stderr == 0.0
    # sign of psi never matters
    assert theta_x_ma((-1.0, 1.0), alpha=4.0, p=1.0,
                      z=constant(1.0)).value == 0.5


def test_theta_x_ma_scale_invariant_exactly():
    a = theta_x_ma((2.0, 1.0), alpha=4.0, p=1.0, z=std_normal(),
                   mc_reps=20_000, seed=RngSeed(9))
    b = theta_x_ma((1.0, 0.5), alpha=4.0, p=1.0, z=std_normal(),
                   mc_reps=20_000, seed=RngSeed(9))
    assert a.value == b.value


def test_theta_x_ma_normal_z_matches_oracle():
    r = theta_x_ma((1.0, 1.0), alpha=4.0, p=1.0, z=std_normal(),
                   seed=RngSeed(0))
    assert abs(r.value - MA_THETA_ORACLE) < 4 * r.mc_stderr
    assert r.mc_stderr < 1e-3


def test_theta_x_ma_thread_invariant():
    a = theta_x_ma((1.0, 1.0), alpha=4.0, p=1.0, z=std_normal(),
                   mc_reps=100_000, seed=RngSeed(2), threads=1)
    b = theta_x_ma((1.0, 1.0), alpha=4.0, p=1.0, z=std_normal(),
                   mc_reps=100_000, seed=RngSeed(2), threads=4)
    assert a.value == b.value


def test_theta_x_ma_validation():
    with pytest.raises(ValueError, match="nonzero"):
        theta_x_ma((0.0, 0.0), alpha=4.0, p=1.0, z=std_normal())
    with pytest.raises(ValueError, match="degenerate z"):
        theta_x_ma((1.0, 1.0), alpha=4.0, p=1.0, z=constant(0.0))
    with pytest.raises(ValueError, match="moment diverges"):
        theta_x_ma((1.0, 1.0), alpha=4.0, p=1.0, z=student_t(4.0))


# -- result record --------------------------------------------------------

def test_theta_result_range_enforced():
    with pytest.raises(ValueError, match="theta must lie"):
        ThetaTheoryResult(0.0, 0.0, {}, 10)
    with pytest.raises(ValueError, match="theta must lie"):
        ThetaTheoryResult(1.5, 0.0, {}, 10)


def test_result_records_serialize():
    r = theta_x_sre(zero_problem(), std_normal(), alpha=1.0, p=1.0, m=3,
                    mc_reps=500)
    d = r.to_json()
    assert d["sequence"] == [1.0, 1.0, 1.0]
    k = kesten_index(garch_problem(), mc_reps=10_000, seed=RngSeed(0))
    assert set(k.to_json()) == {"kappa", "f_stderr", "mc_reps", "bracket"}
