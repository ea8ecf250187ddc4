"""Lacunary series evaluated exactly on rationals with certified tails.

``nomp`` is  f(y) = sum_k 2^-k ||2^(k^2) y||, a continuous function without
points of local graph monotonicity; ``takagi`` is the blancmange curve
T(x) = sum_n 2^-n ||2^n x||.  Here ||t|| is the distance from t to the
nearest integer.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Literal, NamedTuple

from ..exact_core import rat

_HALF = Fraction(1, 2)


def dist_to_int(t: Fraction) -> Fraction:
    frac = t - (t.numerator // t.denominator)
    return min(frac, 1 - frac)


def _dist_scaled(y: Fraction, e: int) -> Fraction:
    """||2^e * y|| without ever forming the huge numerator 2^e * p."""
    p, q = y.numerator, y.denominator
    r = (p % q) * pow(2, e, q) % q
    return dist_to_int(Fraction(r, q))


def nomp_eval(y: Fraction, K: int) -> tuple[Fraction, Fraction]:
    """Partial sum over k <= K and the tail bound 2^(-K-1)."""
    y = rat(y)
    total = Fraction(0)
    for k in range(K + 1):
        term = _dist_scaled(y, k * k)
        if term:
            total += term / (1 << k)
    return total, Fraction(1, 1 << (K + 1))


def nomp_ratio_bound(n: int) -> Fraction:
    """Closed-form lower bound on the local non-monotonicity quotient at depth n."""
    num = Fraction(1, 2 ** (n + 2)) - n * Fraction(4, 2 ** (3 * n))
    den = n * Fraction(4, 2 ** (3 * n)) + Fraction(1, 2 ** (n * n))
    return num / den


class NompWitness(NamedTuple):
    x: Fraction
    z: Fraction
    ratio_lb: Fraction
    i: int


def nomp_witness(y: Fraction, n: int) -> NompWitness:
    """Points x < y < z refuting local monotonicity of the series at y.

    With u = 2^(n^2) y one of i in {1, 3} satisfies | ||u|| - ||u - i/4|| | >= 1/4;
    then x = y - (i/4) 2^(-n^2) and z = x + 2^(-n^2).
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    y = rat(y)
    e = n * n
    p, q = y.numerator, y.denominator
    u = Fraction((p % q) * pow(2, e, q) % q, q)
    for i in (1, 3):
        if abs(dist_to_int(u) - dist_to_int(u - Fraction(i, 4))) >= Fraction(1, 4):
            break
    else:  # pragma: no cover - excluded by a case analysis on u in [0, 1)
        raise AssertionError(f"no admissible shift for u = {u}")
    step = Fraction(1, 2**e)
    x = y - Fraction(i, 4) * step
    return NompWitness(x, x + step, nomp_ratio_bound(n), i)


def takagi_eval(x: Fraction, K: int) -> tuple[Fraction, Fraction]:
    """Partial sum over n <= K with tail bound 2^-K (0 when the tail vanishes).

    For a dyadic x = p/2^m every term with n >= m is zero, so once K + 1 >= m
    the partial sum is the exact value.
    """
    x = rat(x)
    total = Fraction(0)
    for n in range(K + 1):
        term = _dist_scaled(x, n)
        if term:
            total += term / (1 << n)
    q = x.denominator
    if q & (q - 1) == 0 and K + 1 >= q.bit_length() - 1:
        return total, Fraction(0)
    return total, Fraction(1, 1 << K)


@dataclass(frozen=True)
class SeriesEvaluator:
    """Truncated series as a certified evaluator: ``ev(y) -> (value, err)``."""

    kind: Literal["nomp", "takagi"]
    K: int

    @property
    def tail_bound(self) -> Fraction:
        if self.kind == "nomp":
            return Fraction(1, 1 << (self.K + 1))
        return Fraction(1, 1 << self.K)

    def __call__(self, y: Fraction) -> tuple[Fraction, Fraction]:
        if self.kind == "nomp":
            return nomp_eval(y, self.K)
        return takagi_eval(y, self.K)
