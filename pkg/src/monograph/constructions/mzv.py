"""The five-point refinement scheme and its piecewise-linear approximants.

Level 0 is the zero function on {0, 1}.  Every block [a, b] of level n is
refined with the points x_l = a + l(b - a)/5:

* flat block (f(a) == f(b) == v): all of x_1..x_5 are kept; the two middle
  points are lifted to v + (b - a)/6, giving a plateau on [x_2, x_3];
* sloped block: only x_1, x_4, x_5 are kept and x_1, x_4 both get the mean
  of the endpoint values, so the block becomes steep / flat / steep.

The approximants converge uniformly to a continuous limit whose value at
every breakpoint of every level is known exactly.
"""

from __future__ import annotations

import json
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, NamedTuple

from ..exact_core import DomainError, PLFunction, rat

MZV_LEVEL_CAP = 8

_FIFTH = Fraction(1, 5)
_SIXTH = Fraction(1, 6)
# sup of the limit over a flat block of length L is v + FLAT_RISE * L
FLAT_RISE = Fraction(5, 24)


class ResourceLimitError(RuntimeError):
    """Requested construction exceeds the configured resource limit."""


class Block(NamedTuple):
    a: Fraction
    b: Fraction
    fa: Fraction
    fb: Fraction

    @property
    def flat(self) -> bool:
        return self.fa == self.fb

    @property
    def length(self) -> Fraction:
        return self.b - self.a


@dataclass(frozen=True)
class MzvLevel:
    level: int
    fn: PLFunction

    @property
    def breakpoints(self) -> tuple[Fraction, ...]:
        return self.fn.breakpoints

    @property
    def values(self) -> tuple[Fraction, ...]:
        return self.fn.values

    @property
    def r(self) -> int:
        return self.fn.n_segments

    def blocks(self) -> Iterator[Block]:
        xs, ys = self.fn.breakpoints, self.fn.values
        for k in range(len(xs) - 1):
            yield Block(xs[k], xs[k + 1], ys[k], ys[k + 1])

    def to_dict(self) -> dict:
        return {"kind": "mzv", "level": self.level, **self.fn.to_dict()}

    @classmethod
    def from_dict(cls, data: dict) -> "MzvLevel":
        return cls(int(data["level"]), PLFunction.from_dict(data))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def child_blocks(blk: Block) -> list[Block]:
    """The level n+1 blocks inside a level n block."""
    a, b, fa, fb = blk
    d = (b - a) * _FIFTH
    if fa == fb:
        top = fa + (b - a) * _SIXTH
        xs = [a, a + d, a + 2 * d, a + 3 * d, a + 4 * d, b]
        ys = [fa, fa, top, top, fa, fa]
    else:
        mid = (fa + fb) / 2
        xs = [a, a + d, a + 4 * d, b]
        ys = [fa, mid, mid, fb]
    return [Block(xs[i], xs[i + 1], ys[i], ys[i + 1]) for i in range(len(xs) - 1)]


def mzv_refine(level: MzvLevel) -> MzvLevel:
    xs, ys = level.fn.breakpoints, level.fn.values
    nx, ny = [xs[0]], [ys[0]]
    for k in range(len(xs) - 1):
        a, b, fa, fb = xs[k], xs[k + 1], ys[k], ys[k + 1]
        d = (b - a) * _FIFTH
        if fa == fb:
            top = fa + (b - a) * _SIXTH
            nx += [a + d, a + 2 * d, a + 3 * d, a + 4 * d, b]
            ny += [fa, top, top, fa, fa]
        else:
            mid = (fa + fb) / 2
            nx += [a + d, a + 4 * d, b]
            ny += [mid, mid, fb]
    return MzvLevel(level.level + 1, PLFunction._trusted(nx, ny))


def mzv_level0() -> MzvLevel:
    return MzvLevel(0, PLFunction((Fraction(0), Fraction(1)), (Fraction(0), Fraction(0))))


@lru_cache(maxsize=None)
def _approximant(n: int) -> MzvLevel:
    if n == 0:
        return mzv_level0()
    return mzv_refine(_approximant(n - 1))


def mzv_approximant(n: int, max_level: int = MZV_LEVEL_CAP) -> MzvLevel:
    """f_n as an exact PLFunction; results are cached."""
    if n < 0:
        raise ValueError("level must be nonnegative")
    if n > max_level:
        raise ResourceLimitError(f"level {n} exceeds the cap {max_level}")
    return _approximant(n)


def mzv_block(x: Fraction, n: int) -> Block:
    """The level-n block containing x, found by descending from [0, 1].

    Half-open convention: a point equal to a block endpoint belongs to the
    block on its right (x = 1 belongs to the last block).  Works for any n,
    no materialisation of the level is needed.
    """
    x = rat(x)
    if x < 0 or x > 1:
        raise DomainError(f"x = {x} outside [0, 1]")
    blk = Block(Fraction(0), Fraction(1), Fraction(0), Fraction(0))
    for _ in range(n):
        blk = _child_containing(blk, x)
    return blk


def _child_containing(blk: Block, x: Fraction) -> Block:
    kids = child_blocks(blk)
    for kid in kids[:-1]:
        if x < kid.b:
            return kid
    return kids[-1]


def mzv_block_path(x: Fraction, depth: int) -> list[Block]:
    """Blocks containing x at levels 0..depth (half-open convention)."""
    x = rat(x)
    if x < 0 or x > 1:
        raise DomainError(f"x = {x} outside [0, 1]")
    blk = Block(Fraction(0), Fraction(1), Fraction(0), Fraction(0))
    path = [blk]
    for _ in range(depth):
        blk = _child_containing(blk, x)
        path.append(blk)
    return path


def _interp(blk: Block, x: Fraction) -> Fraction:
    return blk.fa + (blk.fb - blk.fa) * (x - blk.a) / (blk.b - blk.a)


def mzv_value_n(x: Fraction, n: int) -> Fraction:
    """Exact f_n(x) via the block containing x."""
    return _interp(mzv_block(x, n), rat(x))


def mzv_eval(x: Fraction, n: int) -> tuple[Fraction, Fraction]:
    """f_n(x) with the uniform bound |f(x) - f_n(x)| <= 2^(1-n)."""
    return mzv_value_n(x, n), Fraction(2) ** (1 - n)


def mzv_enclosure(x: Fraction, depth: int) -> tuple[Fraction, Fraction]:
    """Certified interval for the limit f(x).

    Inside a flat block of length L at value v the limit stays in
    [v, v + 5L/24]: the plateau adds L/6 and the bound c L must satisfy
    c >= 1/6 + c/5.  Inside a sloped block it stays between the endpoint
    values, since the flat middle child rises by at most (5/24)(3L/5) = L/8
    while its level sits |fb - fa|/2 >= (5/12) L below the larger endpoint.
    At a breakpoint the value is exact.
    """
    x = rat(x)
    blk = mzv_block(x, depth)
    if x == blk.a:
        return blk.fa, blk.fa
    if x == blk.b:
        return blk.fb, blk.fb
    if blk.flat:
        return blk.fa, blk.fa + blk.length * FLAT_RISE
    return min(blk.fa, blk.fb), max(blk.fa, blk.fb)


def mzv_limit_evaluator(depth: int = 60):
    """Certified evaluator of the limit: returns (midpoint, radius)."""

    def evaluate(x: Fraction) -> tuple[Fraction, Fraction]:
        lo, hi = mzv_enclosure(x, depth)
        return (lo + hi) / 2, (hi - lo) / 2

    evaluate.depth = depth  # type: ignore[attr-defined]
    return evaluate


def level_index(level: MzvLevel, x: Fraction) -> int:
    """Index k of the half-open block [a^k, a^(k+1)) containing x."""
    xs = level.fn.breakpoints
    k = bisect_right(xs, x) - 1
    return min(k, len(xs) - 2)


# --- executable invariants of the construction -----------------------------


def _lengths(level: MzvLevel) -> list[Fraction]:
    xs = level.fn.breakpoints
    return [xs[k + 1] - xs[k] for k in range(len(xs) - 1)]


def check_adjacent_ratio(level: MzvLevel) -> bool:
    L = _lengths(level)
    return all(L[k - 1] <= 3 * L[k] <= 9 * L[k - 1] for k in range(1, len(L)))


def check_max_length(level: MzvLevel) -> bool:
    n = level.level
    bound = Fraction(3, 25) ** (n // 2) * (1 if n % 2 == 0 else _FIFTH)
    return max(_lengths(level)) <= bound


def check_min_length(level: MzvLevel) -> bool:
    return min(_lengths(level)) >= _FIFTH ** level.level


def check_values_preserved(coarse: MzvLevel, fine: MzvLevel) -> bool:
    """A_n is contained in A_m and f_m agrees with f_n there (m >= n)."""
    fx, fy = fine.fn.breakpoints, fine.fn.values
    pos = {x: i for i, x in enumerate(fx)}
    for x, y in zip(coarse.fn.breakpoints, coarse.fn.values):
        i = pos.get(x)
        if i is None or fy[i] != y:
            return False
    return True


def check_increment_bound(level: MzvLevel, sharp: bool = False) -> bool:
    """|f_n(a^(k+1)) - f_n(a^k)| <= (1/6) 2^-n, or (1/6) 2^(1-n) with ``sharp``.

    The unshifted bound already fails at n = 1, where f_1 rises by 1/6 on
    one segment; the shifted bound holds with equality at every n >= 1.
    """
    bound = _SIXTH * Fraction(1, 2) ** (level.level - (1 if sharp and level.level > 0 else 0))
    ys = level.fn.values
    return all(abs(ys[k + 1] - ys[k]) <= bound for k in range(len(ys) - 1))


def check_slope_gap(level: MzvLevel) -> bool:
    five_sixths = Fraction(5, 6)
    return all(s == 0 or abs(s) >= five_sixths for s in level.fn.slopes())


def check_range(level: MzvLevel) -> bool:
    ys = level.fn.values
    return min(ys) >= 0 and max(ys) <= 1


def sandwich_excess(i: int, sharp: bool = False) -> Fraction:
    """Coefficient of the block length in the upper sandwich bound.

    Stated form: sum_{j=1..i} 6^-j.  Sharp form: sum_{j=1..i} (1/6) 5^(1-j),
    since each plateau is a fifth of its parent block; the stated form is
    exceeded from i = 2 on (f_2(1/2) = 1/5 > 7/36).
    """
    if sharp:
        return sum((_SIXTH * _FIFTH ** (j - 1) for j in range(1, i + 1)), Fraction(0))
    return sum((_SIXTH**j for j in range(1, i + 1)), Fraction(0))


def check_sandwich(coarse: MzvLevel, fine: MzvLevel, sharp: bool = False) -> tuple[bool, bool]:
    """Sandwich bounds for f_n vs f_(n+i).

    Both f_n and f_(n+i) are piecewise linear and A_n is inside A_(n+i), so
    checking the breakpoints of f_(n+i) inside each level-n block suffices.
    """
    i = fine.level - coarse.level
    if i <= 0:
        raise ValueError("fine level must be deeper than coarse level")
    geo = sandwich_excess(i, sharp)
    cx, cy = coarse.fn.breakpoints, coarse.fn.values
    fx, fy = fine.fn.breakpoints, fine.fn.values
    ok_sandwich = ok_strict = True
    j = 0
    for k in range(len(cx) - 1):
        a, b, fa, fb = cx[k], cx[k + 1], cy[k], cy[k + 1]
        lo, hi = min(fa, fb), max(fa, fb)
        upper = hi + (b - a) * geo
        while fx[j] < a:
            j += 1
        m = j
        while m < len(fx) and fx[m] <= b:
            v = fy[m]
            if v < lo or v > upper:
                ok_sandwich = False
            if fa != fb and a < fx[m] < b and not v < hi:
                ok_strict = False
            m += 1
    return ok_sandwich, ok_strict


def check_uniform_cauchy(coarse: MzvLevel, fine: MzvLevel) -> bool:
    from ..exact_core import pl_sup_diff

    return pl_sup_diff(fine.fn, coarse.fn) <= Fraction(1, 2) ** coarse.level


def refinement_checks(n_max: int = 8, sandwich_n_max: int = 5, sandwich_i_max: int = 3) -> dict[str, bool]:
    """Run every structural check of the refinement over the requested levels.

    ``increment_bound`` and ``sandwich`` are the bounds as usually stated
    (both fail); the ``_sharp`` variants are the exact bounds, which hold.
    """
    levels = [mzv_approximant(n, max(n_max, sandwich_n_max + sandwich_i_max)) for n in range(n_max + 1)]
    report = {
        "adjacent_ratio": all(check_adjacent_ratio(L) for L in levels[1:]),
        "max_length": all(check_max_length(L) for L in levels),
        "min_length": all(check_min_length(L) for L in levels),
        "values_preserved": all(check_values_preserved(levels[n], levels[n + 1]) for n in range(n_max)),
        "increment_bound": all(check_increment_bound(L) for L in levels),
        "increment_bound_sharp": all(check_increment_bound(L, sharp=True) for L in levels),
        "slope_gap": all(check_slope_gap(L) for L in levels),
        "range_in_unit": all(check_range(L) for L in levels),
    }
    deep = max(n_max, sandwich_n_max + sandwich_i_max)
    all_levels = {n: mzv_approximant(n, deep) for n in range(deep + 1)}
    sandwich = sandwich_sharp = strict = True
    for n in range(sandwich_n_max + 1):
        for i in range(1, sandwich_i_max + 1):
            a, b = check_sandwich(all_levels[n], all_levels[n + i])
            sandwich &= a
            strict &= b
            sandwich_sharp &= check_sandwich(all_levels[n], all_levels[n + i], sharp=True)[0]
    report["sandwich"] = sandwich
    report["sandwich_sharp"] = sandwich_sharp
    report["strict_below_max"] = strict
    return report


def mzv_level_to_json(level: MzvLevel) -> str:
    return level.to_json()


def mzv_level_from_json(text: str) -> MzvLevel:
    return MzvLevel.from_dict(json.loads(text))


__all__ = [
    "Block",
    "MZV_LEVEL_CAP",
    "MzvLevel",
    "ResourceLimitError",
    "child_blocks",
    "refinement_checks",
    "level_index",
    "mzv_approximant",
    "mzv_block",
    "mzv_block_path",
    "mzv_enclosure",
    "mzv_eval",
    "mzv_level0",
    "mzv_limit_evaluator",
    "mzv_refine",
    "mzv_value_n",
]
