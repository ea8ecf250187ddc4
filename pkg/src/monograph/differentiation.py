"""Dini derivatives, knot-point evidence and the B/D structure of the
recursive construction.

An *evaluator* maps a rational x to ``(value, err)`` with
|f(x) - value| <= err.  Difference quotients inherit the error interval
(err_x + err_y) / h, so every reported extreme carries its own error.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Literal, Optional, Sequence, Union

from .constructions.mzv import (
    MZV_LEVEL_CAP,
    Block,
    child_blocks,
    mzv_approximant,
    mzv_block_path,
    mzv_enclosure,
    level_index,
)
from .exact_core import DomainError, PLFunction, rat, rat_to_str

Evaluator = Callable[[Fraction], tuple[Fraction, Fraction]]
Real = Union[Fraction, int, float]

DEFAULT_MULTIPLIERS = (Fraction(1), Fraction(3, 4), Fraction(5, 8), Fraction(1, 2), Fraction(3, 8), Fraction(1, 4))


def pl_evaluator(f: PLFunction) -> Evaluator:
    return lambda x: (f(x), Fraction(0))


# --- Dini estimates ----------------------------------------------------------------


@dataclass(frozen=True)
class Quotient:
    h: Fraction
    value: Fraction
    err: Fraction

    @property
    def lo(self) -> Fraction:
        return self.value - self.err

    @property
    def hi(self) -> Fraction:
        return self.value + self.err


SIDES = ("upper_right", "lower_right", "upper_left", "lower_left")


@dataclass
class DiniEstimate:
    """Extremes of the probed difference quotients on each side.

    A side whose probes all fall outside the domain is ``None``.
    ``certified[side]`` holds when the quotient realising the extreme has an
    error radius below ``tol * max(1, |extreme|)``.
    """

    x: Fraction
    upper_right: Optional[Fraction]
    lower_right: Optional[Fraction]
    upper_left: Optional[Fraction]
    lower_left: Optional[Fraction]
    scale_range: tuple[Fraction, Fraction]
    certified: dict[str, bool]
    right: list[Quotient] = field(default_factory=list, repr=False)
    left: list[Quotient] = field(default_factory=list, repr=False)

    def extreme_quotient(self, side: str) -> Optional[Quotient]:
        qs = self.right if side.endswith("right") else self.left
        if not qs:
            return None
        pick = max if side.startswith("upper") else min
        return pick(qs, key=lambda q: q.value)

    def to_row(self) -> dict:
        row = {"x": rat_to_str(self.x)}
        for s in SIDES:
            v = getattr(self, s)
            row[s] = "" if v is None else repr(float(v))
            row[s + "_certified"] = int(self.certified.get(s, False))
        return row


def probe_scales(h_min: Fraction, levels: int, multipliers: Sequence[Fraction] = (Fraction(1),)) -> list[Fraction]:
    out = {rat(h_min) * 2**i * rat(t) for i in range(levels) for t in multipliers}
    return sorted(out)


def one_sided_quotients(f: Evaluator, x: Fraction, scales: Iterable[Fraction], side: str) -> list[Quotient]:
    fx, ex = f(x)
    out = []
    for h in scales:
        try:
            fy, ey = f(x + h) if side == "right" else f(x - h)
        except DomainError:
            continue
        diff = fy - fx if side == "right" else fx - fy
        out.append(Quotient(h, diff / h, (ex + ey) / h))
    return out


def dini_estimate(
    f: Evaluator,
    x: Real,
    h_min: Fraction,
    levels: int,
    multipliers: Sequence[Fraction] = (Fraction(1),),
    tol: Fraction = Fraction(1, 10**6),
) -> DiniEstimate:
    """Probe h in {h_min * 2^i * t : i < levels, t in multipliers} on both sides."""
    x, h_min = rat(x), rat(h_min)
    if h_min <= 0:
        raise ValueError("h_min must be positive")
    scales = probe_scales(h_min, levels, multipliers)
    right = one_sided_quotients(f, x, scales, "right")
    left = one_sided_quotients(f, x, scales, "left")
    est = DiniEstimate(
        x,
        max((q.value for q in right), default=None),
        min((q.value for q in right), default=None),
        max((q.value for q in left), default=None),
        min((q.value for q in left), default=None),
        (scales[0], scales[-1]),
        {},
        right,
        left,
    )
    for s in SIDES:
        q = est.extreme_quotient(s)
        est.certified[s] = q is not None and q.err <= tol * max(Fraction(1), abs(q.value))
    return est


def approx_dini_estimate(f: Evaluator, x: Real, t: Real, delta: Fraction, mesh: int) -> Fraction:
    """Fraction of the mesh points y = x + k delta / mesh, 0 < k < mesh, whose
    right quotient (f(y) - f(x)) / (y - x) is <= t (midpoint values)."""
    x, delta = rat(x), rat(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    if mesh < 2:
        raise ValueError("mesh must be at least 2")
    t = Fraction(t)
    fx = f(x)[0]
    hits = total = 0
    for k in range(1, mesh):
        y = x + delta * k / mesh
        try:
            fy = f(y)[0]
        except DomainError:
            continue
        total += 1
        if (fy - fx) / (y - x) <= t:
            hits += 1
    if total == 0:
        raise DomainError("no mesh point inside the domain")
    return Fraction(hits, total)


def approx_upper_right(f: Evaluator, x: Real, delta: Fraction, mesh: int, density: Fraction = Fraction(1)) -> Fraction:
    """Smallest quotient t with approx_dini_estimate(f, x, t) >= density."""
    x, delta = rat(x), rat(delta)
    fx = f(x)[0]
    qs = []
    for k in range(1, mesh):
        y = x + delta * k / mesh
        try:
            qs.append((f(y)[0] - fx) / (y - x))
        except DomainError:
            continue
    qs.sort()
    need = max(1, -(-rat(density) * len(qs) // 1))
    return qs[int(need) - 1]


# --- point classes of the recursive construction ---------------------------------------


@dataclass(frozen=True)
class PointClass:
    """``status`` is "NotInB" (x is interior to a flat level-n block) or
    "InB_upTo" (no flat block contains x in its interior at levels start..depth)."""

    x: Fraction
    depth: int
    status: Literal["InB_upTo", "NotInB"]
    level: Optional[int] = None
    block_index: Optional[int] = None
    block: Optional[Block] = None

    def to_dict(self) -> dict:
        d = {"x": rat_to_str(self.x), "depth": self.depth, "status": self.status}
        if self.status == "NotInB":
            d["level"] = self.level
            d["block_index"] = self.block_index
            d["block"] = [rat_to_str(v) for v in self.block]
        return d


def mzv_point_class(x: Real, depth: int, start: int = 1, index: bool = True) -> PointClass:
    """Walk the refinement tree of x (half-open blocks) from level ``start``.

    Level 0 is the flat block [0, 1] itself, so the walk starts at 1 by
    default.  The block index is reported when the level is materialisable.
    """
    x = rat(x)
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    path = mzv_block_path(x, depth)
    for n in range(max(start, 0), depth + 1):
        blk = path[n]
        if blk.flat and blk.a < x < blk.b:
            k = None
            if index and n <= MZV_LEVEL_CAP:
                k = level_index(mzv_approximant(n), x)
            return PointClass(x, depth, "NotInB", n, k, blk)
    return PointClass(x, depth, "InB_upTo")


def in_digit_set(x: Real, max_steps: int = 100_000) -> Optional[bool]:
    """Exact test of x * 5^n mod 1 not in (1/5, 4/5) for all n >= 0.

    The residues p 5^n mod q are eventually periodic, so the test is a
    decision once a residue repeats; ``None`` if max_steps runs out first.
    """
    x = rat(x)
    p, q = x.numerator, x.denominator
    r = p % q
    seen = set()
    for _ in range(max_steps):
        if r in seen:
            return True
        seen.add(r)
        if q < 5 * r < 4 * q:
            return False
        r = 5 * r % q
    return None


def sloped_block_point(n: int, k: int, u: Fraction) -> Fraction:
    """a^k + u (a^(k+1) - a^k) for a level-n block."""
    xs = mzv_approximant(n).breakpoints
    return xs[k] + rat(u) * (xs[k + 1] - xs[k])


# --- slope law and oscillation ----------------------------------------------------------


def slope_chain(flat: Block, steps: int, tail: Literal["first", "last"] = "first") -> list[tuple[Block, Fraction]]:
    """Sloped blocks below a flat block: the rising child, then repeatedly the
    first (or last) child.  Returns (block, |slope|) per level."""
    if not flat.flat:
        raise ValueError("start block must be flat")
    blk = child_blocks(flat)[1]
    out = []
    for _ in range(steps):
        out.append((blk, abs(blk.fb - blk.fa) / blk.length))
        kids = child_blocks(blk)
        blk = kids[0] if tail == "first" else kids[-1]
    return out


def slope_law_value(i: int) -> Fraction:
    return Fraction(5, 6) * Fraction(5, 2) ** (i - 1)


def limit_breakpoint_quotient(blk: Block, depth: int = 40) -> Fraction:
    """(f(b) - f(a)) / (b - a) for the limit f at the (exact) block endpoints."""
    fa, fa2 = mzv_enclosure(blk.a, depth)
    fb, fb2 = mzv_enclosure(blk.b, depth)
    assert fa == fa2 and fb == fb2
    return (fb - fa) / (blk.b - blk.a)


@dataclass(frozen=True)
class Oscillation:
    """Two right quotients of the limit at x whose certified gap is >= gap_lb."""

    x: Fraction
    p1: Fraction
    p2: Fraction
    q1: tuple[Fraction, Fraction]
    q2: tuple[Fraction, Fraction]
    gap_lb: Fraction
    flat_level: int

    def to_dict(self) -> dict:
        return {
            "x": rat_to_str(self.x),
            "points": [rat_to_str(self.p1), rat_to_str(self.p2)],
            "q1": [rat_to_str(v) for v in self.q1],
            "q2": [rat_to_str(v) for v in self.q2],
            "gap_lb": rat_to_str(self.gap_lb),
            "flat_level": self.flat_level,
        }


def _levels_below(blk: Block, extra: int) -> list[Fraction]:
    pts = {blk.a, blk.b}
    frontier = [blk]
    for _ in range(extra):
        frontier = [c for b in frontier for c in child_blocks(b)]
        pts.update(c.b for c in frontier)
    return sorted(pts)


def mzv_oscillation(x: Real, depth: int = 60, max_level: int = 40, side: Literal["right", "left"] = "right") -> Optional[Oscillation]:
    """Certified oscillation of one-sided quotients at a point interior to a flat block.

    Follows the chain of flat blocks sharing the right (left) endpoint of the
    first flat block containing x until x leaves that chain, then compares
    quotients to breakpoints up to two levels further down.  f(x) enters through
    its certified enclosure, f at breakpoints is exact.
    """
    x = rat(x)
    pc = mzv_point_class(x, min(depth, max_level), index=False)
    if pc.status != "NotInB":
        return None
    flat = pc.block
    level = pc.level
    # descend the chain of flat end-children on the probed side; once x has
    # left it, the end child's breakpoints lie strictly beyond x
    while True:
        kids = child_blocks(flat)
        inner = kids[-1] if side == "right" else kids[0]
        if inner.a < x < inner.b:
            flat, level = inner, level + 1
            continue
        break
    lo, hi = mzv_enclosure(x, depth)
    pts = _levels_below(flat, 2)
    pts = [p for p in pts if (p > x if side == "right" else p < x)]
    quotients = []
    for p in pts:
        fp = mzv_enclosure(p, depth)[0]
        h = p - x
        a, b = (fp - hi) / h, (fp - lo) / h
        quotients.append((p, (min(a, b), max(a, b))))
    best = None
    for i in range(len(quotients)):
        for j in range(i + 1, len(quotients)):
            (p1, (l1, h1)), (p2, (l2, h2)) = quotients[i], quotients[j]
            gap = max(l1 - h2, l2 - h1)
            if best is None or gap > best.gap_lb:
                best = Oscillation(x, p1, p2, (l1, h1), (l2, h2), gap, level)
    return best


# --- knot evidence ---------------------------------------------------------------------


@dataclass
class KnotEvidence:
    x: Fraction
    threshold: Fraction
    extremes: dict[str, Quotient]
    oscillation: Optional[Oscillation] = None

    found = True

    def verify(self, f: Evaluator) -> bool:
        """Recompute every reported quotient from the evaluator."""
        for side, q in self.extremes.items():
            again = one_sided_quotients(f, self.x, [q.h], "right" if side.endswith("right") else "left")
            if not again or abs(again[0].value - q.value) > again[0].err + q.err:
                return False
        return True

    def to_dict(self) -> dict:
        d = {
            "found": True,
            "x": rat_to_str(self.x),
            "threshold": rat_to_str(self.threshold),
            "extremes": {
                s: {"h": rat_to_str(q.h), "value": rat_to_str(q.value), "err": rat_to_str(q.err)}
                for s, q in self.extremes.items()
            },
        }
        if self.oscillation is not None:
            d["oscillation"] = self.oscillation.to_dict()
        return d


@dataclass
class NoEvidence:
    x: Fraction
    threshold: Fraction
    failing_side: str
    best: Optional[Quotient]
    oscillation: Optional[Oscillation] = None

    found = False

    def to_dict(self) -> dict:
        d = {"found": False, "x": rat_to_str(self.x), "threshold": rat_to_str(self.threshold), "failing_side": self.failing_side}
        if self.best is not None:
            d["best"] = {"h": rat_to_str(self.best.h), "value": rat_to_str(self.best.value)}
        if self.oscillation is not None:
            d["oscillation"] = self.oscillation.to_dict()
        return d


def knot_report(
    f: Evaluator,
    x: Real,
    threshold: Real,
    levels: int,
    h_min: Optional[Fraction] = None,
    multipliers: Sequence[Fraction] = DEFAULT_MULTIPLIERS,
    mzv_point: bool = False,
) -> Union[KnotEvidence, NoEvidence]:
    """Look for quotients beyond +threshold (upper) and -threshold (lower) on
    both sides, certified against the error intervals.

    Probing uses h = 2^-m t for t in ``multipliers``; dyadic offsets alone
    can miss a sign at points whose expansions align with the grid.  With
    ``mzv_point`` the oscillation of right quotients is attached for points
    interior to a flat block of the recursive construction.
    """
    x, T = rat(x), Fraction(threshold)
    h_min = Fraction(1, 2**levels) if h_min is None else rat(h_min)
    est = dini_estimate(f, x, h_min, levels, multipliers)
    osc = mzv_oscillation(x) if mzv_point else None
    extremes: dict[str, Quotient] = {}
    for side in SIDES:
        qs = est.right if side.endswith("right") else est.left
        if side.startswith("upper"):
            ok = [q for q in qs if q.lo > T]
            pick = max(qs, key=lambda q: q.value, default=None)
        else:
            ok = [q for q in qs if q.hi < -T]
            pick = min(qs, key=lambda q: q.value, default=None)
        if not ok:
            return NoEvidence(x, T, side, pick, osc)
        # the largest certified scale is the least demanding on the evaluator
        extremes[side] = max(ok, key=lambda q: q.h)
    return KnotEvidence(x, T, extremes, osc)


def report_to_json(report) -> str:
    return json.dumps(report.to_dict(), sort_keys=True)
