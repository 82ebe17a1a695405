"""Step chain closed forms and the vectorized walk simulator."""

import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from takagiwalk.elephant import (Localization, MemoryParameter, bridge_sums,
                                 correlation, correlation_by_quadrature,
                                 exact_second_moment, final_positions,
                                 iter_sign_blocks, localization_class,
                                 memory_param_of_base, running_max_statistic,
                                 simulate, spectral_density,
                                 transition_power, weighted_simulate)
from takagiwalk.sequences import (ConstantSequence, GeometricSequence,
                                  PowerSequence)

from oracles import matrix_power_brute, second_moment_double_sum, \
    spectral_integral

PROBS = st.floats(0.02, 0.98)


# --- parameters --------------------------------------------------------


def test_memory_parameter_constants():
    mp = MemoryParameter(2 / 3)
    assert math.isclose(mp.alpha, 1 / 3)
    assert math.isclose(mp.K, 2.0)
    assert math.isclose(mp.variance_factor, 2.0)
    fair = MemoryParameter(0.5)
    assert fair.alpha == 0.0
    assert fair.K == 1.0
    assert fair.variance_factor == 1.0


@pytest.mark.parametrize("bad", [0.0, 1.0, -0.2, 1.5])
def test_memory_parameter_rejects_endpoints(bad):
    with pytest.raises(ValueError):
        MemoryParameter(bad)


def test_memory_param_of_base():
    assert memory_param_of_base(2).p == 0.5
    assert memory_param_of_base(3).p == pytest.approx(2 / 3)
    assert memory_param_of_base(4).p == 0.5
    assert memory_param_of_base(5).p == pytest.approx(3 / 5)
    with pytest.raises(ValueError):
        memory_param_of_base(1)


@given(p=PROBS)
def test_K_symmetric_under_p_flip(p):
    assert MemoryParameter(p).K == pytest.approx(MemoryParameter(1 - p).K)
    assert MemoryParameter(p).K >= 1.0


# --- transition matrix --------------------------------------------------


def test_transition_power_small_m():
    ident = transition_power(0.7, 0)
    assert np.allclose(ident, np.eye(2))
    one = transition_power(0.7, 1)
    assert np.allclose(one, [[0.7, 0.3], [0.3, 0.7]])
    assert np.allclose(transition_power(0.5, 5), 0.25 * np.ones((2, 2)) * 2)


@given(p=PROBS, m=st.integers(0, 12))
def test_transition_power_matches_brute_force(p, m):
    assert np.allclose(transition_power(p, m), matrix_power_brute(p, m),
                       atol=1e-12)


@given(p=PROBS, m=st.integers(0, 40))
def test_transition_rows_are_distributions(p, m):
    q = transition_power(p, m)
    assert np.allclose(q.sum(axis=1), 1.0)
    assert (q >= 0).all()


def test_transition_power_rejects_negative():
    with pytest.raises(ValueError):
        transition_power(0.5, -1)


# --- correlation and spectral density -----------------------------------


def test_correlation_conventions():
    assert correlation(0.5, 0) == 1.0  # 0**0 taken as 1
    assert correlation(0.5, 1) == 0.0
    assert correlation(0.5, 7) == 0.0
    assert correlation(2 / 3, 2) == pytest.approx(1 / 9)
    with pytest.raises(ValueError):
        correlation(0.5, -1)


@given(p=PROBS, j=st.integers(0, 30))
def test_correlation_is_alpha_power(p, j):
    assert correlation(p, j) == pytest.approx((2 * p - 1) ** j)


def test_density_flat_at_fair_p():
    lam = np.linspace(-np.pi, np.pi, 50)
    assert np.allclose(spectral_density(0.5, lam), 1 / (2 * np.pi))


@given(p=PROBS, lam=st.floats(-math.pi, math.pi))
def test_density_sandwich(p, lam):
    K = MemoryParameter(p).K
    rho = spectral_density(p, lam)
    assert 1 / (2 * np.pi * K) - 1e-12 <= rho <= K / (2 * np.pi) + 1e-12


def test_density_integrates_to_one():
    for p in (0.1, 0.5, 0.9):
        assert correlation_by_quadrature(p, 0) == pytest.approx(1.0,
                                                                abs=1e-10)


@pytest.mark.parametrize("p", [0.25, 0.5, 2 / 3, 0.9])
@pytest.mark.parametrize("j", [0, 1, 2, 5])
def test_quadrature_matches_closed_form_and_scipy(p, j):
    q = correlation_by_quadrature(p, j)
    assert q == pytest.approx(correlation(p, j), abs=1e-10)
    assert q == pytest.approx(spectral_integral(p, j), abs=1e-8)


# --- exact second moment -------------------------------------------------


def test_second_moment_fair_constant_is_n():
    a = ConstantSequence(F(1))
    for n in (1, 10, 137):
        assert exact_second_moment(0.5, a, 0, n) == pytest.approx(float(n))


def test_second_moment_constant_closed_form():
    p, n = 0.7, 50
    alpha = 2 * p - 1
    expected = n + 2 * sum((n - j) * alpha**j for j in range(1, n))
    got = exact_second_moment(p, ConstantSequence(F(1)), 0, n)
    assert got == pytest.approx(expected, rel=1e-12)


def test_second_moment_slope_approaches_variance_factor():
    p = 0.7
    n = 10**5
    slope = exact_second_moment(p, ConstantSequence(F(1)), 0, n) / n
    assert slope == pytest.approx(MemoryParameter(p).variance_factor,
                                  rel=1e-3)


@pytest.mark.parametrize("weights", [ConstantSequence(F(1)),
                                     PowerSequence(0.6),
                                     GeometricSequence(F(1, 2))])
@pytest.mark.parametrize("p", [0.3, 0.5, 0.8])
def test_second_moment_matches_double_sum(weights, p):
    for m, n in ((0, 40), (10, 300), (7, 8)):
        got = exact_second_moment(p, weights, m, n)
        want = second_moment_double_sum(p, weights.term, m, n)
        assert got == pytest.approx(want, rel=1e-10, abs=1e-12)


@given(p=PROBS, m=st.integers(0, 30), span=st.integers(0, 60))
@settings(deadline=None)
def test_second_moment_sandwich(p, m, span):
    # 2 pi min(rho) and 2 pi max(rho) bracket the bridge moment
    n = m + span
    w = PowerSequence(0.6)
    got = exact_second_moment(p, w, m, n)
    ssq = sum(w.term(k) ** 2 for k in range(m + 1, n + 1))
    K = MemoryParameter(p).K
    assert ssq / K - 1e-9 <= got <= K * ssq + 1e-9


def test_second_moment_degenerate_and_invalid():
    a = ConstantSequence(F(1))
    assert exact_second_moment(0.6, a, 5, 5) == 0.0
    with pytest.raises(ValueError):
        exact_second_moment(0.6, a, 6, 5)
    with pytest.raises(ValueError):
        exact_second_moment(0.6, a, -1, 5)


# --- localization labels --------------------------------------------------


def test_localization_labels():
    assert localization_class(ConstantSequence(F(1))) is Localization.DIVERGES
    assert localization_class(PowerSequence(0.75)) is Localization.CONVERGES
    assert localization_class(PowerSequence(0.5)) is Localization.DIVERGES
    assert localization_class(
        GeometricSequence(F(1, 2))) is Localization.CONVERGES


# --- simulation ------------------------------------------------------------


def test_simulate_reproducible_and_stream_separated():
    a = simulate(0.7, 500, seed=11, stream=0)
    b = simulate(0.7, 500, seed=11, stream=0)
    c = simulate(0.7, 500, seed=11, stream=1)
    d = simulate(0.7, 500, seed=12, stream=0)
    assert np.array_equal(a.steps, b.steps)
    assert not np.array_equal(a.steps, c.steps)
    assert not np.array_equal(a.steps, d.steps)
    assert a.sums[0] == 0
    assert np.array_equal(np.diff(a.sums), a.steps)
    assert set(np.unique(a.steps)) <= {-1, 1}
    assert a.n == 500


def test_simulate_block_size_does_not_change_paths():
    ref = np.vstack([simulate(0.62, 1000, seed=5, stream=i).steps
                     for i in range(3)])
    got = np.empty_like(ref)
    for k_off, signs in iter_sign_blocks(0.62, 1000, 3, seed=5, block=7):
        got[:, k_off:k_off + signs.shape[1]] = signs
    assert np.array_equal(ref, got)


def test_first_step_is_fair_and_lag_correlation_decays():
    paths, n = 20000, 4
    signs = next(iter(iter_sign_blocks(0.75, n, paths, seed=3)))[1]
    x = signs.astype(float)
    sigma = 1 / math.sqrt(paths)
    assert abs(x[:, 0].mean()) <= 3 * sigma
    alpha = 0.5
    for j in (1, 2, 3):
        got = (x[:, 0] * x[:, j]).mean()
        assert abs(got - alpha**j) <= 3 * sigma


def test_sticky_walk_rarely_flips():
    path = simulate(0.999, 5000, seed=9)
    flips = int((path.steps[1:] != path.steps[:-1]).sum())
    assert flips <= 30  # ~5 expected at flip rate 1e-3


def test_weighted_simulate_constant_one_reproduces_walk():
    path = simulate(0.8, 300, seed=17, stream=2)
    sums = weighted_simulate(0.8, ConstantSequence(F(1)), 300, seed=17,
                             stream=2)
    assert np.array_equal(sums, path.sums.astype(float))


def test_weighted_simulate_summable_weights_cauchy_tail():
    # |S_n - S_m| <= sum_{k>m} 2**-k = 2**-m pathwise
    for stream in range(5):
        sums = weighted_simulate(0.9, GeometricSequence(F(1, 2)), 60,
                                 seed=23, stream=stream)
        tail = np.abs(sums[21:] - sums[20])
        assert tail.max() <= 2.0**-20


def test_weighted_second_moment_monte_carlo():
    p, n, paths = 0.8, 1000, 10**4
    w = PowerSequence(0.6)
    final = bridge_sums(p, w, 0, n, paths, seed=29)
    sq = final**2
    want = exact_second_moment(p, w, 0, n)
    err = 3 * sq.std() / math.sqrt(paths)
    assert abs(sq.mean() - want) <= err


def test_bridge_sums_match_weighted_simulate():
    p, m, n = 0.65, 13, 211
    w = PowerSequence(0.6)
    bridges = bridge_sums(p, w, m, n, paths=4, seed=31)
    for i in range(4):
        sums = weighted_simulate(p, w, n, seed=31, stream=i)
        assert bridges[i] == pytest.approx(sums[n] - sums[m], abs=1e-9)
    with pytest.raises(ValueError):
        bridge_sums(p, w, 5, 5, paths=2, seed=1)


def test_final_positions_match_simulate():
    finals = final_positions(0.7, 400, paths=6, seed=37)
    for i in range(6):
        assert finals[i] == simulate(0.7, 400, seed=37, stream=i).sums[-1]


def test_final_positions_have_walk_parity():
    finals = final_positions(0.6, 321, paths=50, seed=41)
    assert (np.abs(finals) <= 321).all()
    assert (finals % 2 == 321 % 2).all()


def test_running_max_monotone_in_horizon():
    short = running_max_statistic(0.6, 2000, paths=8, seed=43)
    long = running_max_statistic(0.6, 4000, paths=8, seed=43)
    assert (long >= short - 1e-12).all()
    with pytest.raises(ValueError):
        running_max_statistic(0.6, 50, paths=2, seed=1, n_min=60)
    with pytest.raises(ValueError):
        running_max_statistic(0.6, 50, paths=2, seed=1, n_min=2)


def test_fourth_moment_stays_gaussian_scale():
    # kurtosis of T_n should stay near 3 for p away from 1
    for p in (0.5, 0.7, 0.8):
        finals = final_positions(p, 3000, paths=4000, seed=47).astype(float)
        m2 = (finals**2).mean()
        m4 = (finals**4).mean()
        assert m4 <= 5.0 * m2**2


def test_divergent_weights_spread_out():
    # constant weights: spread at n=4000 well above spread at n=250
    small = final_positions(0.6, 250, paths=2000, seed=53).astype(float)
    big = final_positions(0.6, 4000, paths=2000, seed=53).astype(float)
    assert big.std() > 2.5 * small.std()
