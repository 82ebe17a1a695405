from fractions import Fraction as F

import pytest
from hypothesis import assume, given, settings, strategies as st

import oracles
from takagiwalk.radix import (DEFAULT_DEPTH, DepthExhaustedError, RadixPoint,
                              digit_depth_profile, digit_match_depth,
                              dist_to_int, hat_digit_match_depth, make_point,
                              sample_point, sample_points, scale_index)

bases = st.integers(2, 10)


def grid_points(base, depth):
    return st.integers(0, base**depth - 1).map(
        lambda m: RadixPoint(base, depth, m))


def test_make_point_positional_values():
    assert make_point(2, 4, [0, 1, 0, 0]).value == F(1, 4)
    assert make_point(3, 3, [1, 0, 0]).value == F(1, 3)
    assert make_point(2, 4, [1, 1]).value == F(3, 4)


def test_make_point_rejects_bad_digits():
    with pytest.raises(ValueError):
        make_point(2, 4, [0, 1, 0, 2])
    with pytest.raises(ValueError):
        make_point(2, 2, [0, 1, 1])  # more digits than depth


def test_digit_round_trip():
    pt = make_point(5, 6, [4, 0, 3, 2, 0, 1])
    assert pt.digits() == (0, 4, 0, 3, 2, 0, 1)  # index 0 is the integer part
    assert pt.digit_string().startswith("0.403201")


@given(bases, st.integers(1, 12), st.data())
def test_digit_round_trip_random(base, depth, data):
    digits = data.draw(st.lists(st.integers(0, base - 1), min_size=depth,
                                max_size=depth))
    pt = make_point(base, depth, digits)
    assert list(pt.digits()) == [0] + digits
    whole, oracle_digits = oracles.digit_expansion(pt.value, base, depth)
    assert whole == pt.integer_part == 0
    assert oracle_digits == digits


def test_dist_to_int_reference_points():
    assert dist_to_int(F(0)) == 0
    assert dist_to_int(F(1, 2)) == F(1, 2)
    assert dist_to_int(F(3, 4)) == F(1, 4)
    assert dist_to_int(make_point(2, 4, [1, 1])) == F(1, 4)


@given(st.fractions(min_value=0, max_value=1))
def test_dist_to_int_symmetry_and_period(y):
    d = dist_to_int(y)
    assert 0 <= d <= F(1, 2)
    assert d == oracles.dist_to_int_frac(y)
    assert dist_to_int(1 - y) == d
    assert dist_to_int(y + 1) == d


def test_scale_index_reference_values():
    assert scale_index(2, F(1, 8)) == 3
    assert scale_index(3, F(1, 10)) == 2
    assert scale_index(10, F(1, 10)) == 1


def test_scale_index_domain():
    with pytest.raises(ValueError):
        scale_index(2, F(2, 3))  # above 1/r
    with pytest.raises(ValueError):
        scale_index(2, F(0))


@given(bases, st.fractions(min_value=F(1, 10**12), max_value=F(1, 2)))
def test_scale_index_double_inequality(base, h):
    assume(h <= F(1, base))
    m = scale_index(base, h)
    assert F(1, base**(m + 1)) < h <= F(1, base**m)


def test_digit_match_reference_values():
    x = make_point(2, 48, [0, 1])
    h = RadixPoint(2, 48, 2**45)  # 1/8
    assert digit_match_depth(x, h) == 2
    assert digit_match_depth(make_point(2, 48, [1, 1, 1]), h) == -1
    for r in (2, 3, 5):
        zero = RadixPoint(r, 48, 0)
        assert digit_match_depth(zero, RadixPoint(r, 48, r**43)) == 4


def test_hat_digit_match_reference_values():
    zero3 = RadixPoint(3, 48, 0)
    h27 = RadixPoint(3, 48, 3**45)
    assert hat_digit_match_depth(zero3, h27) == 2
    # crossing 1 after the half shift flips the integer digit
    x = make_point(3, 48, [1, 1, 1])  # 13/27
    assert hat_digit_match_depth(x, h27) == -1


def test_hat_match_is_plain_match_of_shifted_point_for_even_base():
    x = make_point(2, 48, [0, 1])
    shifted = make_point(2, 48, [1, 1])
    h = RadixPoint(2, 48, 2**45)
    assert hat_digit_match_depth(x, h) == digit_match_depth(shifted, h)


def test_hat_depth_exhaustion_raises():
    # at depth 3 the shifted digits agree through index 2 = depth - 1,
    # so the match depth cannot be certified
    with pytest.raises(DepthExhaustedError):
        hat_digit_match_depth(RadixPoint(3, 3, 0), RadixPoint(3, 3, 1))


@given(bases, st.integers(2, 20), st.data())
@settings(max_examples=120)
def test_match_depths_against_digit_oracle(base, ell, data):
    depth = 2 * ell + 8
    x = data.draw(grid_points(base, depth))
    h = F(1, base**ell)
    k0 = digit_match_depth(x, h)
    assert k0 == oracles.agreement_depth(base, x.value, x.value + h, depth)
    assert -1 <= k0 <= scale_index(base, h)
    if base % 2 == 1:
        k0h = hat_digit_match_depth(x, h)
        # oracle compares one digit short of full depth: the truncated
        # expansion of the half shift certifies matches only to depth-1
        assert k0h == oracles.agreement_depth(
            base, x.value + F(1, 2), x.value + h + F(1, 2), depth - 1)


@given(bases, st.data())
@settings(max_examples=80)
def test_match_depth_nonincreasing_in_h(base, data):
    depth = 30
    x = data.draw(grid_points(base, depth))
    e1 = data.draw(st.integers(2, 12))
    e2 = data.draw(st.integers(e1, 13))
    small, big = F(1, base**e2), F(1, base**e1)
    assert digit_match_depth(x, small) >= digit_match_depth(x, big)


def test_digit_depth_profile_consistency():
    x = make_point(3, 40, [1, 1, 1])
    h = F(1, 27)
    prof = digit_depth_profile(x, h)
    assert prof.m == scale_index(3, h) == 3
    assert prof.k0 == digit_match_depth(x, h)
    assert prof.k0_hat == hat_digit_match_depth(x, h)
    assert prof.k0_min == min(prof.k0, prof.k0_hat)


def test_point_addition_is_exact():
    a = make_point(2, 8, [0, 1, 0, 1])
    b = make_point(2, 8, [0, 0, 1, 1])
    assert (a + b).value == a.value + b.value


def test_point_addition_rejects_unrepresentable():
    a = make_point(2, 8, [0, 1])
    with pytest.raises(ValueError):
        a + F(1, 3)


def test_from_fraction_round_trip():
    pt = RadixPoint.from_fraction(2, 10, F(5, 32))
    assert pt.value == F(5, 32)
    with pytest.raises(ValueError):
        RadixPoint.from_fraction(2, 10, F(1, 3))


def test_sample_point_is_deterministic():
    a = sample_point(2, 48, 1234)
    b = sample_point(2, 48, 1234)
    c = sample_point(2, 48, 1234, stream=1)
    assert a == b
    assert a != c
    assert 0 <= a.value < 1


def test_sample_points_match_streams():
    pts = sample_points(3, 40, 5, 99)
    assert pts == [sample_point(3, 40, 99, stream=i) for i in range(5)]


def test_sampled_points_have_uniform_mean():
    pts = sample_points(2, 48, 4000, 7)
    mean = sum(float(p.value) for p in pts) / len(pts)
    # std of the mean is 1/(sqrt(12) * sqrt(4000)) ~ 0.0046
    assert abs(mean - 0.5) < 0.025


def test_default_depth_value_used_by_samplers():
    assert DEFAULT_DEPTH == 48
