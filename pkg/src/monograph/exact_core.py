"""Exact rational arithmetic and piecewise-linear functions.

Rationals are :class:`fractions.Fraction` (always reduced, positive
denominator).  A :class:`PLFunction` is a continuous function that is affine
between consecutive breakpoints; everything here is exact, no floats.
"""

from __future__ import annotations

import json
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

Rational = Fraction
Number = Union[int, Fraction]


class DomainError(ValueError):
    """Raised when a point lies outside the domain of a function."""


def rat(value: Number | str) -> Fraction:
    """Coerce an int, Fraction or "p/q" string to a Fraction (never a float)."""
    if isinstance(value, float):
        raise TypeError("floats are not accepted by the exact core")
    return Fraction(value)


def rat_to_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def str_to_rat(s: str) -> Fraction:
    if not isinstance(s, str):
        raise TypeError(f"expected a 'p/q' string, got {type(s).__name__}")
    return Fraction(s)


@dataclass(frozen=True)
class GraphPoint:
    x: Fraction
    y: Fraction


@dataclass(frozen=True, eq=False)
class PLFunction:
    """Continuous piecewise-linear function given by its breakpoints.

    ``breakpoints`` must be strictly increasing and of length >= 2; the
    function is affine between consecutive breakpoints and its domain is
    ``[breakpoints[0], breakpoints[-1]]``.
    """

    breakpoints: tuple[Fraction, ...]
    values: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        xs = tuple(rat(x) for x in self.breakpoints)
        ys = tuple(rat(y) for y in self.values)
        if len(xs) != len(ys):
            raise ValueError("breakpoints and values differ in length")
        if len(xs) < 2:
            raise ValueError("a PLFunction needs at least two breakpoints")
        for a, b in zip(xs, xs[1:]):
            if not a < b:
                raise ValueError("breakpoints must be strictly increasing")
        object.__setattr__(self, "breakpoints", xs)
        object.__setattr__(self, "values", ys)

    @classmethod
    def from_points(cls, points: Iterable[tuple[Number, Number]]) -> "PLFunction":
        pts = list(points)
        return cls(tuple(rat(p[0]) for p in pts), tuple(rat(p[1]) for p in pts))

    @classmethod
    def _trusted(cls, xs: Sequence[Fraction], ys: Sequence[Fraction]) -> "PLFunction":
        # Skips validation; callers guarantee Fractions and strict increase.
        obj = object.__new__(cls)
        object.__setattr__(obj, "breakpoints", tuple(xs))
        object.__setattr__(obj, "values", tuple(ys))
        return obj

    @property
    def domain(self) -> tuple[Fraction, Fraction]:
        return self.breakpoints[0], self.breakpoints[-1]

    @property
    def n_segments(self) -> int:
        return len(self.breakpoints) - 1

    def __len__(self) -> int:
        return len(self.breakpoints)

    def __call__(self, x: Number) -> Fraction:
        return pl_eval(self, rat(x))

    def points(self) -> list[GraphPoint]:
        return [GraphPoint(x, y) for x, y in zip(self.breakpoints, self.values)]

    def slopes(self) -> list[Fraction]:
        xs, ys = self.breakpoints, self.values
        return [(ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]) for i in range(len(xs) - 1)]

    def normalized(self) -> "PLFunction":
        """Drop interior breakpoints at which the slope does not change."""
        xs, ys = self.breakpoints, self.values
        keep_x, keep_y = [xs[0]], [ys[0]]
        for i in range(1, len(xs) - 1):
            # collinear iff (y_i - y_prev)(x_next - x_i) == (y_next - y_i)(x_i - x_prev)
            px, py = keep_x[-1], keep_y[-1]
            if (ys[i] - py) * (xs[i + 1] - xs[i]) != (ys[i + 1] - ys[i]) * (xs[i] - px):
                keep_x.append(xs[i])
                keep_y.append(ys[i])
        keep_x.append(xs[-1])
        keep_y.append(ys[-1])
        return PLFunction._trusted(keep_x, keep_y)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PLFunction):
            return NotImplemented
        a, b = self.normalized(), other.normalized()
        return a.breakpoints == b.breakpoints and a.values == b.values

    def __hash__(self) -> int:
        n = self.normalized()
        return hash((n.breakpoints, n.values))

    def __neg__(self) -> "PLFunction":
        return PLFunction._trusted(self.breakpoints, [-y for y in self.values])

    def __add__(self, other: "PLFunction") -> "PLFunction":
        return pl_combine(self, other, 1, 1)

    def __sub__(self, other: "PLFunction") -> "PLFunction":
        return pl_combine(self, other, 1, -1)

    def scaled(self, c: Number) -> "PLFunction":
        c = rat(c)
        return PLFunction._trusted(self.breakpoints, [c * y for y in self.values])

    def restricted(self, lo: Number, hi: Number) -> "PLFunction":
        """Restriction to ``[lo, hi]`` (which must lie inside the domain)."""
        lo, hi = rat(lo), rat(hi)
        a, b = self.domain
        if not (a <= lo < hi <= b):
            raise DomainError(f"[{lo}, {hi}] is not a subinterval of [{a}, {b}]")
        xs = [lo] + [x for x in self.breakpoints if lo < x < hi] + [hi]
        return PLFunction._trusted(xs, [pl_eval(self, x) for x in xs])

    # -- persistence -------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "breakpoints": [rat_to_str(x) for x in self.breakpoints],
            "values": [rat_to_str(y) for y in self.values],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PLFunction":
        return cls(
            tuple(str_to_rat(s) for s in data["breakpoints"]),
            tuple(str_to_rat(s) for s in data["values"]),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "PLFunction":
        return cls.from_dict(json.loads(text))


def pl_eval(f: PLFunction, x: Fraction) -> Fraction:
    xs, ys = f.breakpoints, f.values
    if x < xs[0] or x > xs[-1]:
        raise DomainError(f"x = {x} outside domain [{xs[0]}, {xs[-1]}]")
    i = bisect_right(xs, x) - 1
    if xs[i] == x:
        return ys[i]
    x0, x1, y0, y1 = xs[i], xs[i + 1], ys[i], ys[i + 1]
    return y0 + (y1 - y0) * (x - x0) / (x1 - x0)


def merged_mesh(f: PLFunction, g: PLFunction) -> tuple[list[Fraction], list[Fraction], list[Fraction]]:
    """Union of both breakpoint sets with the values of f and g on it.

    Both functions must share a domain.  Linear-time two-pointer walk.
    """
    if f.domain != g.domain:
        raise DomainError(f"domains differ: {f.domain} vs {g.domain}")
    fx, fy, gx, gy = f.breakpoints, f.values, g.breakpoints, g.values
    xs: list[Fraction] = []
    fv: list[Fraction] = []
    gv: list[Fraction] = []
    i = j = 0
    nf, ng = len(fx), len(gx)
    while i < nf and j < ng:
        a, b = fx[i], gx[j]
        if a == b:
            xs.append(a)
            fv.append(fy[i])
            gv.append(gy[j])
            i += 1
            j += 1
        elif a < b:
            # a lies strictly inside g's segment [gx[j-1], gx[j]]
            xs.append(a)
            fv.append(fy[i])
            gv.append(gy[j - 1] + (gy[j] - gy[j - 1]) * (a - gx[j - 1]) / (b - gx[j - 1]))
            i += 1
        else:
            xs.append(b)
            gv.append(gy[j])
            fv.append(fy[i - 1] + (fy[i] - fy[i - 1]) * (b - fx[i - 1]) / (a - fx[i - 1]))
            j += 1
    return xs, fv, gv


def pl_combine(f: PLFunction, g: PLFunction, alpha: Number, beta: Number) -> PLFunction:
    """alpha*f + beta*g on the merged mesh."""
    alpha, beta = rat(alpha), rat(beta)
    xs, fv, gv = merged_mesh(f, g)
    return PLFunction._trusted(xs, [alpha * u + beta * v for u, v in zip(fv, gv)])


def pl_sup_diff(f: PLFunction, g: PLFunction) -> Fraction:
    """Exact sup-norm of f - g (attained on the merged mesh)."""
    _, fv, gv = merged_mesh(f, g)
    return max(abs(u - v) for u, v in zip(fv, gv))


def pl_total_variation(f: PLFunction) -> Fraction:
    ys = f.values
    return sum((abs(b - a) for a, b in zip(ys, ys[1:])), Fraction(0))


def pl_level_crossings(f: PLFunction, v: Number) -> list[Fraction | tuple[Fraction, Fraction]]:
    """Sorted solutions of f(x) = v.

    Isolated solutions are Fractions; maximal intervals on which f == v are
    reported once as ``(lo, hi)`` tuples.
    """
    v = rat(v)
    xs, ys = f.breakpoints, f.values
    out: list[Fraction | tuple[Fraction, Fraction]] = []
    i, n = 0, len(xs)
    while i < n - 1:
        y0, y1 = ys[i], ys[i + 1]
        if y0 == v and y1 == v:
            lo = xs[i]
            while i < n - 1 and ys[i + 1] == v:
                i += 1
            if out and out[-1] == lo:
                out.pop()
            out.append((lo, xs[i]))
            continue
        if y0 == v:
            if not out or (out[-1] != xs[i] and not (isinstance(out[-1], tuple) and out[-1][1] == xs[i])):
                out.append(xs[i])
        elif (y0 - v) * (y1 - v) < 0:
            out.append(xs[i] + (v - y0) * (xs[i + 1] - xs[i]) / (y1 - y0))
        i += 1
    if ys[-1] == v:
        last = out[-1] if out else None
        if last != xs[-1] and not (isinstance(last, tuple) and last[1] == xs[-1]):
            out.append(xs[-1])
    return out


def jordan_decompose(f: PLFunction) -> tuple[PLFunction, PLFunction]:
    """Minimal Jordan pair (g, h), both nondecreasing, with f = g - h.

    g starts at f(first) and accumulates the rises, h starts at 0 and
    accumulates the falls.
    """
    ys = f.values
    g = [ys[0]]
    h = [Fraction(0)]
    for a, b in zip(ys, ys[1:]):
        d = b - a
        g.append(g[-1] + (d if d > 0 else 0))
        h.append(h[-1] + (-d if d < 0 else 0))
    return PLFunction._trusted(f.breakpoints, g), PLFunction._trusted(f.breakpoints, h)


def pl_min_max(f: PLFunction) -> tuple[Fraction, Fraction]:
    return min(f.values), max(f.values)
