from __future__ import annotations

from fractions import Fraction

from hypothesis import given
from hypothesis import strategies as st

from monograph.constructions.series import (
    SeriesEvaluator,
    dist_to_int,
    nomp_eval,
    nomp_ratio_bound,
    nomp_witness,
    takagi_eval,
)
from monograph.monotonicity import certified_quotient

F = Fraction
ys = st.fractions(min_value=0, max_value=1, max_denominator=1000)


def direct_nomp(y: Fraction, K: int) -> Fraction:
    """Oracle: the partial sum with the huge multiplier formed explicitly."""
    return sum((dist_to_int(2 ** (k * k) * y) / 2**k for k in range(K + 1)), F(0))


def test_nomp_examples():
    assert nomp_eval(F(0), 10) == (0, F(1, 2**11))
    assert nomp_eval(F(1, 2), 5) == (F(1, 2), F(1, 2**6))


@given(ys, st.integers(0, 12))
def test_nomp_matches_direct_oracle(y, K):
    assert nomp_eval(y, K)[0] == direct_nomp(y, K)


@given(ys, st.integers(0, 20), st.integers(0, 20))
def test_two_truncations_are_consistent(y, K1, K2):
    (v1, e1), (v2, e2) = nomp_eval(y, K1), nomp_eval(y, K2)
    assert abs(v1 - v2) <= max(e1, e2)
    (t1, d1), (t2, d2) = takagi_eval(y, K1), takagi_eval(y, K2)
    assert abs(t1 - t2) <= max(d1, d2)


def test_ratio_bound_value_and_growth():
    b5 = nomp_ratio_bound(5)
    assert b5 == F(241664, 20481)
    assert 11.79 < float(b5) < 11.81 and b5 > 10
    assert all(nomp_ratio_bound(n) < nomp_ratio_bound(n + 1) for n in range(5, 20))


def test_witness_at_zero_exceeds_bound():
    w = nomp_witness(F(0), 5)
    assert w.z - w.x == F(1, 2**25) and w.x < 0 < w.z
    K = 60
    q = certified_quotient(nomp_eval(w.x, K), nomp_eval(F(0), K), nomp_eval(w.z, K), w.x, w.z)
    assert q > w.ratio_lb


@given(ys)
def test_witness_shift_condition(y):
    w = nomp_witness(y, 4)
    u = (2**16 * y) % 1
    assert abs(dist_to_int(u) - dist_to_int(u - F(w.i, 4))) >= F(1, 4)


def test_takagi_examples():
    assert takagi_eval(F(0), 0) == (0, 0)
    assert takagi_eval(F(1, 2), 1) == (F(1, 2), 0)
    assert takagi_eval(F(1, 4), 2) == (F(1, 2), 0)
    assert takagi_eval(F(1, 3), 10)[1] == F(1, 2**10)
    assert abs(takagi_eval(F(1, 3), 40)[0] - F(2, 3)) <= F(1, 2**40)


def test_evaluator_tail_bounds():
    assert SeriesEvaluator("nomp", 7).tail_bound == F(1, 2**8)
    assert SeriesEvaluator("takagi", 7).tail_bound == F(1, 2**7)
    assert SeriesEvaluator("takagi", 7)(F(1, 4)) == (F(1, 2), 0)
