"""Monotonicity of graphs of piecewise-linear functions.

* ``check_pc`` / ``least_pc`` decide condition P_c exactly: for all x < y
  with f(x) = f(y), max_{t in [x, y]} |f(x) - f(t)| <= c (y - x).
* ``refute_monotone`` searches for triples x < y < z violating
  |psi(x) - psi(y)| <= c |psi(x) - psi(z)|  (side from_left) or
  |psi(z) - psi(y)| <= c |psi(x) - psi(z)|  (side from_right), psi(x) = (x, f(x)).
* ``monotonicity_bracket`` combines both: the graph is symmetrically
  (least_pc + 1)-monotone, and every witness gives a lower bound.
* ``mpoint_refute`` certifies failure of local graph monotonicity at a
  point for functions known only through an evaluator with error bounds.
* ``cover_2r`` is a greedy Vitali-type selection of disjoint balls.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Literal, Optional, Sequence

import numpy as np

from .exact_core import PLFunction, pl_eval, rat, rat_to_str, str_to_rat

Evaluator = Callable[[Fraction], tuple[Fraction, Fraction]]


# --- condition P_c ------------------------------------------------------------


@dataclass(frozen=True)
class PcCertificate:
    outcome: Literal["Pass", "Fail"]
    c: Fraction
    least: Fraction
    witness: Optional[tuple[Fraction, Fraction, Fraction]] = None

    @property
    def passed(self) -> bool:
        return self.outcome == "Pass"

    def to_dict(self) -> dict:
        return {
            "kind": "pc",
            "outcome": self.outcome,
            "c": rat_to_str(self.c),
            "least": rat_to_str(self.least),
            "witness": None if self.witness is None else [rat_to_str(v) for v in self.witness],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PcCertificate":
        w = data.get("witness")
        return cls(
            data["outcome"],
            str_to_rat(data["c"]),
            str_to_rat(data["least"]),
            None if w is None else tuple(str_to_rat(v) for v in w),
        )

    def verify(self, f: PLFunction) -> bool:
        """Re-check a Fail witness by direct evaluation (Pass needs the decision procedure)."""
        if self.outcome == "Pass":
            return self.witness is None and self.least <= self.c
        x, t, y = self.witness
        fx, ft, fy = pl_eval(f, x), pl_eval(f, t), pl_eval(f, y)
        return x < t < y and fx == fy and abs(fx - ft) > self.c * (y - x)


def _prev_smaller(ys: Sequence[Fraction]) -> list[int]:
    out, stack = [-1] * len(ys), []
    for i, y in enumerate(ys):
        while stack and ys[stack[-1]] >= y:
            stack.pop()
        out[i] = stack[-1] if stack else -1
        stack.append(i)
    return out


def _next_smaller(ys: Sequence[Fraction]) -> list[int]:
    n = len(ys)
    out, stack = [n] * n, []
    for i in range(n - 1, -1, -1):
        while stack and ys[stack[-1]] >= ys[i]:
            stack.pop()
        out[i] = stack[-1] if stack else n
        stack.append(i)
    return out


def _chain(start: int, nxt: list[int], stop: int) -> list[int]:
    out = []
    j = nxt[start]
    while j != stop:
        out.append(j)
        j = nxt[j]
    return out


def _worst_above(xs: Sequence[Fraction], ys: Sequence[Fraction]):
    """Largest (w - v) / (y(v) - x(v)) over local maxima t* and levels v < w.

    x(v) and y(v) are the level-v crossings nearest to t*.  Between
    consecutive record lows on either side both crossings are affine in v,
    the quotient is linear-fractional, and its supremum is attained at a
    record level, so only those levels are enumerated.
    """
    n = len(ys)
    ps, ns = _prev_smaller(ys), _next_smaller(ys)
    best: Optional[tuple[Fraction, Fraction, Fraction, Fraction]] = None
    for t in range(1, n - 1):
        w = ys[t]
        if ys[t - 1] > w or ys[t + 1] > w:
            continue
        left = _chain(t, ps, -1)
        right = _chain(t, ns, n)
        if not left or not right:
            continue
        floor = max(ys[left[-1]], ys[right[-1]])
        levels = sorted({ys[j] for j in left + right if ys[j] >= floor}, reverse=True)
        li = ri = 0
        for v in levels:
            while ys[left[li]] > v:
                li += 1
            while ys[right[ri]] > v:
                ri += 1
            p = left[li]
            if ys[p] == v:
                x = xs[p]
            else:
                q = p + 1
                x = xs[p] + (v - ys[p]) * (xs[q] - xs[p]) / (ys[q] - ys[p])
            p = right[ri]
            if ys[p] == v:
                y = xs[p]
            else:
                q = p - 1
                y = xs[q] + (v - ys[q]) * (xs[p] - xs[q]) / (ys[p] - ys[q])
            ratio = (w - v) / (y - x)
            if best is None or ratio > best[0]:
                best = (ratio, x, xs[t], y)
    return best


def _pc_worst(f: PLFunction):
    xs = f.breakpoints
    cands = [_worst_above(xs, f.values), _worst_above(xs, [-y for y in f.values])]
    cands = [c for c in cands if c is not None]
    return max(cands, key=lambda c: c[0]) if cands else None


def least_pc(f: PLFunction) -> Fraction:
    """Exact least c for which f satisfies P_c (0 for monotone f)."""
    worst = _pc_worst(f)
    return Fraction(0) if worst is None else worst[0]


def check_pc(f: PLFunction, c: Fraction) -> PcCertificate:
    c = rat(c)
    if c <= 0:
        raise ValueError("c must be positive")
    worst = _pc_worst(f)
    if worst is None or worst[0] <= c:
        return PcCertificate("Pass", c, Fraction(0) if worst is None else worst[0])
    return PcCertificate("Fail", c, worst[0], worst[1:])


# --- graph monotonicity witnesses -------------------------------------------------


def _isqrt_floor(q: Fraction, bits: int = 64) -> Fraction:
    """Rational lower bound of sqrt(q) with denominator 2^bits."""
    scale = 1 << bits
    return Fraction(math.isqrt(q.numerator * scale * scale // q.denominator), scale)


@dataclass(frozen=True)
class WitnessTriple:
    """x < y < z with |psi(x)-psi(y)|^2 / |psi(x)-psi(z)|^2 = ratio_sq (from_left),
    or |psi(z)-psi(y)|^2 / |psi(x)-psi(z)|^2 = ratio_sq (from_right)."""

    x: Fraction
    y: Fraction
    z: Fraction
    side: Literal["from_left", "from_right"]
    ratio_sq: Fraction
    companion: Optional["WitnessTriple"] = field(default=None, compare=False)

    @property
    def achieved_ratio(self) -> Fraction:
        """Rational lower bound of the (irrational) distance ratio."""
        return _isqrt_floor(self.ratio_sq)

    def refutes(self, c: Fraction) -> bool:
        return self.ratio_sq > rat(c) ** 2

    def recompute(self, f: PLFunction) -> Fraction:
        return side_ratio_sq(f, self.x, self.y, self.z, self.side)

    def to_dict(self) -> dict:
        d = {
            "x": rat_to_str(self.x),
            "y": rat_to_str(self.y),
            "z": rat_to_str(self.z),
            "side": self.side,
            "ratio_sq": rat_to_str(self.ratio_sq),
            "achieved_ratio": rat_to_str(self.achieved_ratio),
        }
        if self.companion is not None:
            d["companion"] = self.companion.to_dict()
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "WitnessTriple":
        comp = data.get("companion")
        return cls(
            str_to_rat(data["x"]),
            str_to_rat(data["y"]),
            str_to_rat(data["z"]),
            data["side"],
            str_to_rat(data["ratio_sq"]),
            None if comp is None else cls.from_dict(comp),
        )


def _d2(f: PLFunction, a: Fraction, b: Fraction) -> Fraction:
    return (b - a) ** 2 + (pl_eval(f, b) - pl_eval(f, a)) ** 2


def side_ratio_sq(f: PLFunction, x: Fraction, y: Fraction, z: Fraction, side: str) -> Fraction:
    num = _d2(f, x, y) if side == "from_left" else _d2(f, y, z)
    return num / _d2(f, x, z)


def _screen(px: np.ndarray, py: np.ndarray, window: Optional[int], top: int):
    """Float screening of breakpoint triples for side from_left.

    For each left index i the middle point may be any j in (i, k), so the
    best ratio^2 for (i, k) is max_{i<j<k} d(i,j)^2 / d(i,k)^2.
    Returns the ``top`` best (ratio_sq, i, j, k) by float value.
    """
    n = len(px)
    best: list[tuple[float, int, int, int]] = []
    for i in range(n - 2):
        hi = n if window is None else min(n, i + window + 1)
        d = (px[i + 1 : hi] - px[i]) ** 2 + (py[i + 1 : hi] - py[i]) ** 2
        if len(d) < 2:
            continue
        run = np.maximum.accumulate(d)
        arg = np.arange(len(d))
        # index of the running max (first occurrence)
        is_new = np.concatenate([[True], d[1:] > run[:-1]])
        argmax = np.maximum.accumulate(np.where(is_new, arg, 0))
        ratio = run[:-1] / d[1:]
        m = min(top, len(ratio))
        idx = np.argpartition(-ratio, m - 1)[:m]
        for k in idx:
            best.append((float(ratio[k]), i, i + 1 + int(argmax[k]), i + 2 + int(k)))
        if len(best) > 8 * top:
            best.sort(reverse=True)
            del best[top:]
    best.sort(reverse=True)
    return best[:top]


def _refine(f: PLFunction, x: Fraction, y: Fraction, z: Fraction, side: str, budget: int):
    """Greedy local moves of the outer points along their segments."""
    lo, hi = f.domain
    cur = side_ratio_sq(f, x, y, z, side)
    steps = [Fraction(1, 2**k) for k in range(1, 12)]
    used = 0
    improved = True
    while improved and used < budget:
        improved = False
        for step in steps:
            for dx, dz in ((step, 0), (-step, 0), (0, step), (0, -step)):
                used += 1
                scale = z - x
                nx, nz = x + dx * scale, z + dz * scale
                if not (lo <= nx < y < nz <= hi):
                    continue
                r = side_ratio_sq(f, nx, y, nz, side)
                if r > cur:
                    x, z, cur, improved = nx, nz, r, True
            if used >= budget:
                break
    return x, y, z, cur


def _best_side(f: PLFunction, side: str, budget: int, window: Optional[int], top: int = 8) -> Optional[WitnessTriple]:
    xs, ys = f.breakpoints, f.values
    px = np.array([float(v) for v in xs])
    py = np.array([float(v) for v in ys])
    if side == "from_right":
        px, py = -px[::-1], py[::-1]
    cands = _screen(px, py, window, top)
    n = len(xs)
    best = None
    for _, i, j, k in cands:
        if side == "from_right":
            i, j, k = n - 1 - k, n - 1 - j, n - 1 - i
        x, y, z = xs[i], xs[j], xs[k]
        r = side_ratio_sq(f, x, y, z, side)
        if best is None or r > best[3]:
            best = (x, y, z, r)
    if best is None:
        return None
    x, y, z, r = _refine(f, *best[:3], side, budget)
    return WitnessTriple(x, y, z, side, r)


def refute_monotone(
    f: PLFunction,
    c: Fraction,
    budget: int = 200,
    symmetric: bool = False,
    window: Optional[int] = None,
) -> Optional[WitnessTriple]:
    """Search for a triple refuting c-monotonicity of the graph of f.

    With ``symmetric=False`` the graph must fail in both orders ("from_left" for the
    left-to-right order and "from_right", i.e. "from_left" for the reversed order); the weaker
    side is returned with the other attached as ``companion``.  With
    ``symmetric=True`` either side suffices.  A ``None`` result is not a
    proof of monotonicity.
    """
    c = rat(c)
    if c <= 0:
        raise ValueError("c must be positive")
    if len(f.breakpoints) < 3:
        return None
    a = _best_side(f, "from_left", budget, window)
    b = _best_side(f, "from_right", budget, window)
    ok = [w for w in (a, b) if w is not None and w.refutes(c)]
    if symmetric:
        if not ok:
            return None
        return max(ok, key=lambda w: w.ratio_sq)
    if len(ok) < 2:
        return None
    weak, strong = sorted(ok, key=lambda w: w.ratio_sq)
    return WitnessTriple(weak.x, weak.y, weak.z, weak.side, weak.ratio_sq, strong)


def best_witness(f: PLFunction, budget: int = 200, window: Optional[int] = None) -> Optional[WitnessTriple]:
    """Best triple found for the weaker side (what bounds the constant from below)."""
    if len(f.breakpoints) < 3:
        return None
    a = _best_side(f, "from_left", budget, window)
    b = _best_side(f, "from_right", budget, window)
    weak, strong = sorted((a, b), key=lambda w: w.ratio_sq)
    return WitnessTriple(weak.x, weak.y, weak.z, weak.side, weak.ratio_sq, strong)


@dataclass(frozen=True)
class MonotonicityBracket:
    c_lo: Fraction
    c_hi: Fraction
    least_pc: Fraction
    witness: Optional[WitnessTriple] = None

    def to_dict(self) -> dict:
        return {
            "kind": "bracket",
            "c_lo": rat_to_str(self.c_lo),
            "c_hi": rat_to_str(self.c_hi),
            "least_pc": rat_to_str(self.least_pc),
            "witness": None if self.witness is None else self.witness.to_dict(),
        }


def monotonicity_bracket(f: PLFunction, budget: int = 200, window: Optional[int] = None) -> MonotonicityBracket:
    """c_hi = least_pc + 1 (symmetric monotonicity); c_lo from the best witness."""
    lp = least_pc(f)
    w = best_witness(f, budget, window)
    c_lo = Fraction(0) if w is None else w.achieved_ratio
    return MonotonicityBracket(min(c_lo, lp + 1), lp + 1, lp, w)


# --- points of local monotonicity --------------------------------------------------


class Inconclusive(RuntimeError):
    """Violations were seen but the evaluator error is too large to certify them."""


@dataclass(frozen=True)
class MpointRefutation:
    y: Fraction
    x: Fraction
    z: Fraction
    quotient_lb: Fraction

    def to_dict(self) -> dict:
        return {k: rat_to_str(getattr(self, k)) for k in ("y", "x", "z", "quotient_lb")}


def certified_quotient(fx, fy, fz, x: Fraction, z: Fraction) -> Fraction:
    """Lower bound of |f(x)-f(y)| / (|f(x)-f(z)| + |z-x|) from (value, err) pairs."""
    (vx, ex), (vy, ey), (vz, ez) = fx, fy, fz
    num = abs(vx - vy) - ex - ey
    den = abs(vx - vz) + ex + ez + (z - x)
    return num / den


def mpoint_refute(
    f: Evaluator,
    y: Fraction,
    c: Fraction,
    eps: Fraction,
    mesh: int,
    span: int = 4,
    hints: Iterable[tuple[Fraction, Fraction]] = (),
) -> Optional[MpointRefutation]:
    """Search x in (y-eps, y), z in (y, y+eps) on the grid y + k 2^-mesh.

    Returns a certified refutation of |f(x)-f(y)| <= c(|f(x)-f(z)| + |z-x|),
    ``None`` if no violation is seen, and raises :class:`Inconclusive` if
    violations are seen but none survives the error bounds.
    """
    y, c, eps = rat(y), rat(c), rat(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    h = Fraction(1, 2**mesh)
    xs = [y - j * h for j in range(1, span + 1) if j * h < eps]
    zs = [y + j * h for j in range(1, span + 1) if j * h < eps]
    pairs = [(x, z) for x in xs for z in zs]
    pairs += [(rat(a), rat(b)) for a, b in hints if y - eps < a < y < b < y + eps]
    cache: dict[Fraction, tuple[Fraction, Fraction]] = {}

    def ev(t: Fraction):
        if t not in cache:
            cache[t] = f(t)
        return cache[t]

    fy = ev(y)
    best: Optional[MpointRefutation] = None
    seen_violation = False
    for x, z in pairs:
        fx, fz = ev(x), ev(z)
        if abs(fx[0] - fy[0]) > c * (abs(fx[0] - fz[0]) + z - x):
            seen_violation = True
        q = certified_quotient(fx, fy, fz, x, z)
        if q > c and (best is None or q > best.quotient_lb):
            best = MpointRefutation(y, x, z, q)
    if best is None and seen_violation:
        raise Inconclusive(f"violation at y = {y} not certified at mesh 2^-{mesh}")
    return best


def reflect_evaluator(f: Evaluator, vertical: bool = False) -> Evaluator:
    """f -> -f (vertical=True) or x -> f(-x)."""
    if vertical:
        return lambda t: (lambda v: (-v[0], v[1]))(f(t))
    return lambda t: f(-t)


# --- Vitali-type covering -------------------------------------------------------------------


def _band(r: float, rmax: float, delta: float) -> int:
    # band n holds radii in ((delta-1)^-(n+1) rmax, (delta-1)^-n rmax]
    n = 0
    bound = rmax
    shrink = 1.0 / (delta - 1.0)
    while r <= bound * shrink:
        bound *= shrink
        n += 1
    return n


def cover_2r(balls: Sequence[tuple[Sequence[float], float]], delta: float) -> list[int]:
    """Greedy maximal disjoint subfamily, largest radius band first.

    Balls are open; two balls are disjoint iff the centre distance is at
    least the sum of the radii.  Every input centre lies at distance
    < delta * r from some selected ball of radius r.
    """
    if delta <= 2:
        raise ValueError("delta must exceed 2")
    if not balls:
        return []
    if any(r <= 0 for _, r in balls):
        raise ValueError("radii must be positive")
    rmax = max(r for _, r in balls)
    bands = [_band(r, rmax, delta) for _, r in balls]
    order = sorted(range(len(balls)), key=lambda i: (bands[i], i))
    chosen: list[int] = []
    for i in order:
        ci, ri = np.asarray(balls[i][0], dtype=float), balls[i][1]
        if all(np.linalg.norm(ci - np.asarray(balls[j][0], dtype=float)) >= ri + balls[j][1] for j in chosen):
            chosen.append(i)
    return sorted(chosen)


def check_cover(balls: Sequence[tuple[Sequence[float], float]], chosen: Sequence[int], delta: float) -> tuple[bool, bool]:
    """Brute-force (pairwise disjoint, centres covered by delta-inflations)."""
    cs = np.array([np.asarray(b[0], dtype=float) for b in balls]).reshape(len(balls), -1)
    rs = np.array([b[1] for b in balls], dtype=float)
    idx = np.asarray(chosen, dtype=int)
    if len(balls) == 0:
        return True, True
    if len(idx) == 0:
        return True, False
    d = np.linalg.norm(cs[:, None, :] - cs[None, idx, :], axis=2)  # all centres x chosen
    sub = d[idx]
    gap = sub - (rs[idx][:, None] + rs[idx][None, :])
    disjoint = bool(np.all(gap[~np.eye(len(idx), dtype=bool)] >= 0))
    covered = bool(np.all((d < delta * rs[idx][None, :]).any(axis=1)))
    return disjoint, covered


def certificate_to_json(cert) -> str:
    return json.dumps(cert.to_dict(), sort_keys=True)
