import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from glsolve.rational import (
    PSI_INF,
    bisection_max_feasible_value,
    format_ratio,
    max_feasible_value,
    parse_ratio,
    ratio_decimal,
    simplest_in_interval,
)


def test_format_and_parse():
    assert format_ratio(Fraction(3, 6)) == "1/2"
    assert format_ratio(PSI_INF) == "inf"
    assert parse_ratio("7/3") == Fraction(7, 3)
    assert parse_ratio("inf") == PSI_INF
    assert parse_ratio("4") == Fraction(4)


def test_decimal_rendering_round_half_even():
    assert ratio_decimal(Fraction(1, 3)) == "0.333333"
    assert ratio_decimal(Fraction(1, 2) + Fraction(5, 10**7)) == "0.500000"  # ties to even
    assert ratio_decimal(Fraction(3, 2) + Fraction(5, 10**7)) == "1.500000"
    assert ratio_decimal(PSI_INF) == "inf"
    assert ratio_decimal(Fraction(25, 1)) == "25.000000"


def test_simplest_in_interval_known_cases():
    assert simplest_in_interval(Fraction(1, 2), Fraction(3, 4)) == Fraction(1, 2)
    assert simplest_in_interval(Fraction(113, 355), Fraction(114, 355)) == Fraction(8, 25)
    assert simplest_in_interval(Fraction(5), Fraction(5)) == Fraction(5)
    assert simplest_in_interval(Fraction(7, 2), Fraction(9, 2)) == Fraction(4)


@given(
    num=st.integers(min_value=0, max_value=400),
    den=st.integers(min_value=1, max_value=40),
    fuzz=st.integers(min_value=1, max_value=1000),
)
@settings(max_examples=200, deadline=None)
def test_simplest_is_minimal_denominator(num, den, fuzz):
    lo = Fraction(num, den)
    hi = lo + Fraction(1, fuzz)
    got = simplest_in_interval(lo, hi)
    assert lo <= got <= hi
    # nothing simpler inside: check all smaller denominators exhaustively
    for q in range(1, got.denominator):
        low_p = (lo.numerator * q + lo.denominator - 1) // lo.denominator  # ceil(lo*q)
        assert Fraction(low_p, q) > hi or low_p > hi.numerator * q // hi.denominator


def _check_search(search, target: Fraction, max_den: int, upper: Fraction):
    assert target < upper
    got = search(lambda x: x <= target, max_den, upper)
    assert got == target


@pytest.mark.parametrize("search", [max_feasible_value, bisection_max_feasible_value])
def test_search_random_boundaries(search):
    rng = random.Random(31)
    for _ in range(300):
        max_den = rng.randint(1, 30)
        width = rng.randint(1, 50)
        den = rng.randint(1, max_den)
        num = rng.randint(0, width * den)
        _check_search(search, Fraction(num, den), max_den, Fraction(max_den * width + 1))


@pytest.mark.parametrize("search", [max_feasible_value, bisection_max_feasible_value])
def test_search_boundary_zero_and_extremes(search):
    _check_search(search, Fraction(0), 5, Fraction(100))
    _check_search(search, Fraction(99), 5, Fraction(100))
    _check_search(search, Fraction(1, 5), 5, Fraction(100))


def test_searches_agree():
    rng = random.Random(32)
    for _ in range(100):
        max_den = rng.randint(1, 25)
        den = rng.randint(1, max_den)
        num = rng.randint(0, 40 * den)
        target = Fraction(num, den)
        upper = Fraction(41 * max_den)
        pred = lambda x: x <= target  # noqa: E731
        assert max_feasible_value(pred, max_den, upper) == bisection_max_feasible_value(
            pred, max_den, upper
        )


def test_search_probe_count_stays_logarithmic():
    calls = [0]
    target = Fraction(99991, 100000)

    def pred(x):
        calls[0] += 1
        return x <= target

    got = max_feasible_value(pred, 100000, Fraction(10**9))
    assert got == target
    assert calls[0] < 200
