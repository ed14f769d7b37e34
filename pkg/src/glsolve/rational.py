"""Exact rational objective values and exact threshold search.

Objective values are fractions lam/f(S) where lam is an integer cut value
bounded by the total finite tree weight and f(S) is a positive integer at
most F (the total importance). Two distinct such values differ by at
least 1/F^2, which makes the maximum feasible threshold exactly
recoverable from a monotone feasibility predicate.

The production search walks the Stern-Brocot tree with doubling runs
(continued-fraction coefficient search). Unlike midpoint bisection it
never probes thresholds with denominators beyond O(F), which keeps the
scaled DP inside machine integers; midpoint bisection is also provided
as an independent reference implementation.
"""

from __future__ import annotations

import math
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction
from typing import Callable

Ratio = Fraction

#: Objective value when the minimization domain is empty (every leaf labeled,
#: or no unlabeled importance left). Compares correctly against Fractions.
PSI_INF = math.inf


def is_infinite(value) -> bool:
    return value == PSI_INF


def format_ratio(value) -> str:
    """Exact "num/den" rendering; "inf" for the empty-domain sentinel."""
    if is_infinite(value):
        return "inf"
    frac = Fraction(value)
    return f"{frac.numerator}/{frac.denominator}"


def parse_ratio(text: str):
    text = text.strip()
    if text == "inf":
        return PSI_INF
    if "/" in text:
        num, den = text.split("/", 1)
        return Fraction(int(num), int(den))
    return Fraction(int(text))


def ratio_decimal(value, places: int = 6) -> str:
    """Round-half-even decimal rendering for CSV and summaries."""
    if is_infinite(value):
        return "inf"
    frac = Fraction(value)
    with localcontext() as ctx:
        ctx.prec = 60
        d = Decimal(frac.numerator) / Decimal(frac.denominator)
        return str(d.quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_EVEN))


def simplest_in_interval(lo: Fraction, hi: Fraction) -> Fraction:
    """Smallest-denominator fraction in the closed interval [lo, hi].

    Ties on denominator cannot occur for den >= 2; among integers the
    smallest one in the interval is returned. Requires 0 <= lo <= hi.
    """
    if lo < 0:
        raise ValueError("interval must be nonnegative")
    if lo > hi:
        raise ValueError("empty interval")

    def rec(a: Fraction, b: Fraction) -> Fraction:
        fl = a.numerator // a.denominator
        if a.denominator == 1:
            return a
        if fl + 1 <= b:
            return Fraction(fl + 1)
        inner = rec(1 / (b - fl), 1 / (a - fl))
        return fl + 1 / inner

    return rec(lo, hi)


def max_feasible_value(
    pred: Callable[[Fraction], bool],
    max_den: int,
    upper: Fraction,
) -> Fraction:
    """Largest x with pred(x) true, for a monotone predicate with rational boundary.

    Assumes pred is nonincreasing (true up to some x*, false after), x*
    is a fraction with denominator <= max_den, pred(0) is true and
    pred(upper) is false. Returns x* exactly.

    Probes are Stern-Brocot mediants, so every threshold handed to pred
    has small numerator and denominator (within a constant factor of
    x*'s own continued-fraction convergents).
    """
    if max_den < 1:
        raise ValueError("max_den must be >= 1")
    cache: dict[Fraction, bool] = {}

    def probe(num: int, den: int) -> bool:
        x = Fraction(num, den)  # mediants of adjacent pairs are already reduced
        if x >= upper:
            return False
        if x not in cache:
            cache[x] = bool(pred(x))
        return cache[x]

    pl, ql = 0, 1  # feasible endpoint (pred true); starts at 0
    pr, qr = 1, 0  # infeasible endpoint; starts at +infinity

    while ql + qr <= max_den:
        if probe(pl + pr, ql + qr):
            # run to the right: find max t with pred true at mediant_t
            t = 1
            while probe(pl + 2 * t * pr, ql + 2 * t * qr):
                t *= 2
            lo_t, hi_t = t, 2 * t
            while lo_t + 1 < hi_t:
                mid = (lo_t + hi_t) // 2
                if probe(pl + mid * pr, ql + mid * qr):
                    lo_t = mid
                else:
                    hi_t = mid
            pl, ql, pr, qr = (
                pl + lo_t * pr,
                ql + lo_t * qr,
                pl + hi_t * pr,
                ql + hi_t * qr,
            )
        else:
            # run to the left: find max u with pred false at mediant toward lo
            u = 1
            while True:
                num, den = pr + 2 * u * pl, qr + 2 * u * ql
                if probe(num, den):
                    break
                # probe and the feasible endpoint are Stern-Brocot neighbors,
                # so the smallest denominator strictly between them is
                # ql + den; once that exceeds max_den the boundary must be
                # the feasible endpoint itself.
                if ql + den > max_den:
                    return Fraction(pl, ql)
                u *= 2
            lo_u, hi_u = u, 2 * u
            while lo_u + 1 < hi_u:
                mid = (lo_u + hi_u) // 2
                if not probe(pr + mid * pl, qr + mid * ql):
                    lo_u = mid
                else:
                    hi_u = mid
            pl, ql, pr, qr = (
                pr + hi_u * pl,
                qr + hi_u * ql,
                pr + lo_u * pl,
                qr + lo_u * ql,
            )

    # No fraction with den <= max_den lies strictly between the endpoints,
    # and the boundary is such a fraction in [left, right), hence = left.
    return Fraction(pl, ql)


def bisection_max_feasible_value(
    pred: Callable[[Fraction], bool],
    max_den: int,
    upper: Fraction,
) -> Fraction:
    """Reference implementation: midpoint bisection to a gap below 1/(2*max_den^2),
    then continued-fraction reconstruction of the unique boundary fraction.

    Exact but probes thresholds with enormous denominators; use
    max_feasible_value in production. Kept as an independent
    cross-check of the search logic.
    """
    gap = Fraction(1, 2 * max_den * max_den)
    lo, hi = Fraction(0), Fraction(upper)
    while hi - lo >= gap:
        mid = (lo + hi) / 2
        if pred(mid):
            lo = mid
        else:
            hi = mid
    result = simplest_in_interval(lo, hi)
    if result.denominator > max_den or not pred(result):
        raise AssertionError("rational reconstruction failed; exactness bug upstream")
    return result
