"""Planar geometry of graphs: 5:3 rectangles and their squares, porosity,
box counting and polyline length."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from sklearn.neighbors import KDTree

from .exact_core import PLFunction, pl_eval, rat

# --- rectangles and squares ------------------------------------------------------


@dataclass(frozen=True)
class Square:
    left: Fraction
    bottom: Fraction
    side: Fraction

    @property
    def right(self) -> Fraction:
        return self.left + self.side

    @property
    def top(self) -> Fraction:
        return self.bottom + self.side


@dataclass(frozen=True)
class Rect53:
    """Closed rectangle with base ``base`` and height 3/5 base."""

    left: Fraction
    bottom: Fraction
    base: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "left", rat(self.left))
        object.__setattr__(self, "bottom", rat(self.bottom))
        object.__setattr__(self, "base", rat(self.base))
        if self.base <= 0:
            raise ValueError("base must be positive")

    @property
    def height(self) -> Fraction:
        return self.base * Fraction(3, 5)

    @classmethod
    def centered(cls, cx: Fraction, cy: Fraction, base: Fraction) -> "Rect53":
        base = rat(base)
        return cls(rat(cx) - base / 2, rat(cy) - base * Fraction(3, 10), base)


def squares_of_rect(R: Rect53) -> list[Square]:
    """Five columns by three rows of squares of side base/5; index = 5*row + column."""
    s = R.base / 5
    return [Square(R.left + i * s, R.bottom + j * s, s) for j in range(3) for i in range(5)]


def graph_meets_open_square(g: PLFunction, sq: Square) -> bool:
    """Exact test of int(sq) intersecting the graph of g."""
    xs, ys = g.breakpoints, g.values
    lo, hi = max(sq.left, xs[0]), min(sq.right, xs[-1])
    if lo >= hi:
        # at most one boundary x of the square is shared with the domain
        return False
    y0, y1 = sq.bottom, sq.top
    cuts = [lo] + [x for x in xs if lo < x < hi] + [hi]
    vals = [pl_eval(g, x) for x in cuts]
    for gu, gv in zip(vals, vals[1:]):
        # g maps the open piece between two cuts onto the open interval between gu and gv
        if gu == gv:
            if y0 < gu < y1:
                return True
        elif max(gu, gv) > y0 and min(gu, gv) < y1:
            return True
    return False


def square_avoidance(g: PLFunction, R: Rect53) -> Optional[int]:
    """Index of the first square of R whose interior misses the graph, or None."""
    for k, sq in enumerate(squares_of_rect(R)):
        if not graph_meets_open_square(g, sq):
            return k
    return None


def rect_grid(g: PLFunction, nx: int, ny: int, bases: Sequence[Fraction]) -> list[Rect53]:
    """nx * ny * len(bases) rectangles centred on a grid over the graph's bounding box."""
    (x0, x1), (y0, y1) = g.domain, (min(g.values), max(g.values))
    out = []
    for l in bases:
        for i in range(nx):
            for j in range(ny):
                cx = x0 + (x1 - x0) * Fraction(i, max(nx - 1, 1))
                cy = y0 + (y1 - y0) * Fraction(j, max(ny - 1, 1))
                out.append(Rect53.centered(cx, cy, l))
    return out


# --- sampling ------------------------------------------------------------------------


def sample_graph(f: PLFunction, n: int) -> np.ndarray:
    """At least n points on the graph, spread by arc length, breakpoints included."""
    xs = np.array([float(v) for v in f.breakpoints])
    ys = np.array([float(v) for v in f.values])
    seg = np.hypot(np.diff(xs), np.diff(ys))
    total = seg.sum()
    # the ceilings add up to at least n - 1, plus the first point
    per = np.maximum(1, np.ceil(seg / total * max(n - 1, 0)).astype(int))
    # t = j / per[i] for j = 1..per[i] on segment i, built without a Python loop
    seg_id = np.repeat(np.arange(len(per)), per)
    j = np.arange(len(seg_id)) - np.repeat(np.cumsum(per) - per, per) + 1
    t = j / per[seg_id]
    px = xs[seg_id] + t * (xs[seg_id + 1] - xs[seg_id])
    py = ys[seg_id] + t * (ys[seg_id + 1] - ys[seg_id])
    return np.concatenate([[[xs[0], ys[0]]], np.stack([px, py], axis=1)])


def polyline_resolution(samples: np.ndarray) -> float:
    """Half the largest gap between consecutive samples: every point of the
    polyline through the samples lies this close to some sample."""
    return float(np.hypot(*np.diff(samples, axis=0).T).max() / 2)


# --- porosity -----------------------------------------------------------------------


@dataclass(frozen=True)
class EmptyBall:
    center: tuple[float, float]
    radius: float
    x: tuple[float, float]
    r: float

    @property
    def q(self) -> float:
        return self.radius / self.r


@dataclass
class PorosityReport:
    scales: list[float]
    q_by_scale: list[float]
    p: float
    resolution: float
    balls: list[EmptyBall] = field(default_factory=list, repr=False)

    def rows(self) -> list[tuple[float, float, float, float]]:
        return [(b.x[0], b.x[1], b.r, b.q) for b in self.balls]

    def verify(self, samples: np.ndarray) -> bool:
        """Every reported ball lies in its probe ball and clears every sample by the resolution."""
        tree = KDTree(samples)
        for b in self.balls:
            d = tree.query(np.array([b.center]))[0][0, 0]
            inside = math.dist(b.center, b.x) + b.radius <= b.r * (1 + 1e-12)
            if d < b.radius + self.resolution or not inside:
                return False
        return True


def porosity_estimate(
    samples: np.ndarray,
    centers: np.ndarray,
    radii: Sequence[float],
    search: int = 16,
    resolution: Optional[float] = None,
) -> PorosityReport:
    """Largest empty sub-ball ratio q for each probe ball B(x, r).

    Candidate centres y lie on a (2 search + 1)^2 grid over B(x, r); the empty
    radius at y is min(dist(y, samples) - resolution, r - |y - x|), capped at
    r/2.  The report keeps the worst centre per scale and p = min over scales.
    """
    samples = np.asarray(samples, dtype=float)
    centers = np.asarray(centers, dtype=float)
    if resolution is None:
        resolution = polyline_resolution(samples)
    tree = KDTree(samples)
    offs = np.arange(-search, search + 1) / search
    gx, gy = np.meshgrid(offs, offs)
    grid = np.stack([gx.ravel(), gy.ravel()], axis=1)
    grid = grid[np.hypot(grid[:, 0], grid[:, 1]) <= 1]
    q_by_scale, balls = [], []
    for r in radii:
        ys = (centers[:, None, :] + r * grid[None, :, :]).reshape(-1, 2)
        d = tree.query(ys)[0][:, 0]
        room = r - np.hypot(*(ys - np.repeat(centers, len(grid), axis=0)).T)
        rad = np.minimum(np.minimum(d - resolution, room), r / 2).reshape(len(centers), len(grid))
        best = rad.argmax(axis=1)
        c = int(rad[np.arange(len(centers)), best].argmin())
        y = ys[c * len(grid) + best[c]]
        x = centers[c]
        worst = EmptyBall((float(y[0]), float(y[1])), max(float(rad[c, best[c]]), 0.0), (float(x[0]), float(x[1])), float(r))
        balls.append(worst)
        q_by_scale.append(worst.q)
    return PorosityReport(list(map(float, radii)), q_by_scale, min(min(q_by_scale), 0.5), resolution, balls)


# --- box counting -------------------------------------------------------------------


def box_counts(samples: np.ndarray, sides: Sequence[float]) -> list[int]:
    samples = np.asarray(samples, dtype=float)
    out = []
    for s in sides:
        cells = np.floor(samples / s).astype(np.int64)
        # pack the two cell indices into one integer key; 1-D unique is much faster
        cx = cells[:, 0] - cells[:, 0].min()
        cy = cells[:, 1] - cells[:, 1].min()
        out.append(len(np.unique(cx * (int(cy.max()) + 1) + cy)))
    return out


def box_dimension(samples: np.ndarray, side_min: float, side_max: float) -> tuple[float, list[tuple[float, int]]]:
    """Least-squares slope of log N(s) against log(1/s) over dyadic sides s."""
    if not 0 < side_min < side_max:
        raise ValueError("need 0 < side_min < side_max")
    k0 = math.ceil(-math.log2(side_max))
    k1 = math.floor(-math.log2(side_min))
    if k1 - k0 < 1:
        raise ValueError("the scale range contains fewer than two dyadic sides")
    sides = [2.0**-k for k in range(k0, k1 + 1)]
    counts = box_counts(samples, sides)
    slope = float(np.polyfit(np.log(1 / np.array(sides)), np.log(counts), 1)[0])
    return slope, list(zip(sides, counts))


# --- length ----------------------------------------------------------------------------


def _sqrt_bounds(q: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    p, d = q.numerator, q.denominator
    scale = 1 << bits
    n = p * d * scale * scale
    r = math.isqrt(n)
    lo = Fraction(r, d * scale)
    return (lo, lo) if r * r == n else (lo, Fraction(r + 1, d * scale))


def graph_length(f: PLFunction, bits: int = 40) -> tuple[Fraction, Fraction]:
    """Rational bounds on the polyline length, each segment bracketed to 2^-bits / denominator."""
    xs, ys = f.breakpoints, f.values
    lo = hi = Fraction(0)
    for i in range(len(xs) - 1):
        a, b = _sqrt_bounds((xs[i + 1] - xs[i]) ** 2 + (ys[i + 1] - ys[i]) ** 2, bits)
        lo += a
        hi += b
    return lo, hi
