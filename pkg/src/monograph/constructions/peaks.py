"""Sums of narrow peaks over an enumeration of the rationals in [0, 1].

    f(x) = sum_n a_n || (x - q_n) / b_n ||,   ||t|| = dist(t, R \\ [-1, 1]),

i.e. tents of height a_n, half-width b_n and slope s_n = a_n / b_n.  The
heights are kept below a certified margin delta_n so that every 5:3
rectangle of base >= eps_n keeps one of its fifteen squares clear of the
graph.
"""

from __future__ import annotations

import json
import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional, Sequence

import numpy as np

from ..exact_core import PLFunction, rat, rat_to_str, str_to_rat

A0 = Fraction(1, 4)
B0 = Fraction(1, 16)


class MarginNotCertified(RuntimeError):
    """The branch-and-bound search could not certify a positive margin."""


def peak_norm(t: Fraction) -> Fraction:
    return max(Fraction(0), 1 - abs(t))


def calkin_wilf_unit() -> Iterator[Fraction]:
    """0, 1, then the Calkin-Wilf sequence restricted to (0, 1)."""
    yield Fraction(0)
    yield Fraction(1)
    x = Fraction(1)
    while True:
        x = 1 / (2 * (x.numerator // x.denominator) - x + 1)
        if x < 1:
            yield x


def min_pairwise_gap(qs: Sequence[Fraction]) -> Fraction:
    s = sorted(qs)
    return min(b - a for a, b in zip(s, s[1:]))


def peak_partial_sum(q: Sequence[Fraction], a: Sequence[Fraction], b: Sequence[Fraction], upto: int) -> PLFunction:
    """g_upto = sum of the first upto+1 peaks, as a PLFunction on [0, 1]."""
    pts = {Fraction(0), Fraction(1)}
    for i in range(upto + 1):
        for t in (q[i] - b[i], q[i], q[i] + b[i]):
            if 0 < t < 1:
                pts.add(t)
    xs = sorted(pts)
    ys = [sum((a[i] * peak_norm((x - q[i]) / b[i]) for i in range(upto + 1)), Fraction(0)) for x in xs]
    return PLFunction._trusted(xs, ys)


@dataclass(frozen=True)
class PeakSumModel:
    """Parameters of a truncated peak sum (peaks 0..N).

    ``delta[n]`` and ``epsilon[n]`` are ``None`` for n = 0.
    """

    N: int
    q: tuple[Fraction, ...]
    a: tuple[Fraction, ...]
    b: tuple[Fraction, ...]
    s: tuple[Fraction, ...]
    delta: tuple[Optional[Fraction], ...]
    epsilon: tuple[Optional[Fraction], ...]
    grid: int = 0
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    def partial_sum(self, upto: Optional[int] = None) -> PLFunction:
        return peak_partial_sum(self.q, self.a, self.b, self.N if upto is None else upto)

    def tail_bound(self) -> Fraction:
        """Bound on sum_{n > N} a_n given a_n <= 2^-n / n."""
        return Fraction(1, 2**self.N * (self.N + 1))

    def to_dict(self) -> dict:
        enc = lambda seq: [None if v is None else rat_to_str(v) for v in seq]  # noqa: E731
        return {
            "kind": "peaks",
            "N": self.N,
            "grid": self.grid,
            "q": enc(self.q),
            "a": enc(self.a),
            "b": enc(self.b),
            "s": enc(self.s),
            "delta": enc(self.delta),
            "epsilon": enc(self.epsilon),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PeakSumModel":
        dec = lambda seq: tuple(None if v is None else str_to_rat(v) for v in seq)  # noqa: E731
        return cls(
            N=int(data["N"]),
            q=dec(data["q"]),
            a=dec(data["a"]),
            b=dec(data["b"]),
            s=dec(data["s"]),
            delta=dec(data["delta"]),
            epsilon=dec(data["epsilon"]),
            grid=int(data.get("grid", 0)),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def check_peak_model(model: PeakSumModel) -> dict[str, bool]:
    """Re-verify every model invariant from the stored numbers alone."""
    N, q, a, b, s = model.N, model.q, model.a, model.b, model.s
    idx = range(1, N + 1)
    out = {
        "lengths": all(len(v) == N + 1 for v in (q, a, b, s, model.delta, model.epsilon)),
        "q_distinct_in_unit": len(set(q)) == N + 1 and all(0 <= t <= 1 for t in q),
        "positive": all(v > 0 for v in a) and all(v > 0 for v in b),
        "slope_is_ratio": all(s[n] == a[n] / b[n] for n in range(N + 1)),
        "s0_gt_3": s[0] > 3,
        "height_bound": all(a[n] <= Fraction(1, 2**n * n) for n in idx),
        "slope_growth": all(s[n] > 2**n * sum(s[:n]) for n in idx),
        "height_below_margin": all(model.delta[n] is not None and a[n] < model.delta[n] for n in idx),
        "epsilon_is_min_gap": all(model.epsilon[n] == min_pairwise_gap(q[: n + 1]) for n in idx),
    }
    return out


def peak_eval(model: PeakSumModel, x: Fraction, upto: Optional[int] = None) -> tuple[Fraction, Fraction]:
    """Exact g_upto(x) and the bound on the omitted peaks (in-model and beyond N)."""
    x = rat(x)
    upto = model.N if upto is None else upto
    if not 0 <= upto <= model.N:
        raise ValueError(f"upto must lie in [0, {model.N}]")
    value = sum((model.a[i] * peak_norm((x - model.q[i]) / model.b[i]) for i in range(upto + 1)), Fraction(0))
    err = sum(model.a[upto + 1 :], Fraction(0)) + model.tail_bound()
    return value, err


def peak_evaluator(model: PeakSumModel, upto: Optional[int] = None):
    def evaluate(x: Fraction) -> tuple[Fraction, Fraction]:
        return peak_eval(model, x, upto)

    return evaluate


# --- certified margin search ------------------------------------------------

# Square (i, j) of a 5:3 rectangle with centre (cx, cy) and base l occupies
#   x in [cx + l*(i/5 - 1/2), cx + l*((i+1)/5 - 1/2)]
#   y in [cy + l*(j/5 - 3/10), cy + l*((j+1)/5 - 3/10)].
_SQ = [(i, j) for j in range(3) for i in range(5)]
_AX = [(Fraction(i, 5) - Fraction(1, 2), Fraction(i + 1, 5) - Fraction(1, 2)) for i, _ in _SQ]
_AY = [(Fraction(j, 5) - Fraction(3, 10), Fraction(j + 1, 5) - Fraction(3, 10)) for _, j in _SQ]
_AXf = np.array([[float(u), float(v)] for u, v in _AX])
_AYf = np.array([[float(u), float(v)] for u, v in _AY])


class _RangeTable:
    """Sparse table for min/max of PL values over x-windows (float screening)."""

    def __init__(self, g: PLFunction):
        self.xs = np.array([float(x) for x in g.breakpoints])
        ys = np.array([float(y) for y in g.values])
        self.ys = ys
        n = len(ys)
        self.mins = [ys]
        self.maxs = [ys]
        k = 1
        while (1 << k) <= n:
            pm, pM = self.mins[-1], self.maxs[-1]
            h = 1 << (k - 1)
            self.mins.append(np.minimum(pm[:-h], pm[h:]))
            self.maxs.append(np.maximum(pM[:-h], pM[h:]))
            k += 1

    def window_range(self, lo: np.ndarray, hi: np.ndarray):
        """(min, max, empty) of g over [lo, hi] clipped to the domain."""
        x0, x1 = self.xs[0], self.xs[-1]
        lo_c = np.maximum(lo, x0)
        hi_c = np.minimum(hi, x1)
        empty = lo_c > hi_c
        lo_c = np.where(empty, x0, lo_c)
        hi_c = np.where(empty, x0, hi_c)
        vlo = np.interp(lo_c, self.xs, self.ys)
        vhi = np.interp(hi_c, self.xs, self.ys)
        mn = np.minimum(vlo, vhi)
        mx = np.maximum(vlo, vhi)
        i0 = np.searchsorted(self.xs, lo_c, side="left")
        i1 = np.searchsorted(self.xs, hi_c, side="right")  # exclusive
        has = i1 > i0
        cnt = np.where(has, i1 - i0, 1)
        k = np.floor(np.log2(cnt)).astype(int)
        for kk in np.unique(k[has]):
            sel = has & (k == kk)
            a = i0[sel]
            b = i1[sel] - (1 << kk)
            tmin = self.mins[kk]
            tmax = self.maxs[kk]
            mn[sel] = np.minimum(mn[sel], np.minimum(tmin[a], tmin[b]))
            mx[sel] = np.maximum(mx[sel], np.maximum(tmax[a], tmax[b]))
        return mn, mx, empty


def _exact_window_range(g: PLFunction, lo: Fraction, hi: Fraction):
    xs, ys = g.breakpoints, g.values
    lo = max(lo, xs[0])
    hi = min(hi, xs[-1])
    if lo > hi:
        return None
    from ..exact_core import pl_eval

    vals = [pl_eval(g, lo), pl_eval(g, hi)]
    vals.extend(ys[bisect_left(xs, lo) : bisect_right(xs, hi)])
    return min(vals), max(vals)


def _exact_square_clear(g: PLFunction, box: Sequence[Fraction], k: int, r: Fraction) -> bool:
    """Exact check that square k of every rectangle in the box is >= r from the graph (sup-norm)."""
    cx0, cx1, cy0, cy1, l0, l1 = box
    ax0, ax1 = _AX[k]
    ay0, ay1 = _AY[k]
    xlo = cx0 + min(l0 * ax0, l1 * ax0)
    xhi = cx1 + max(l0 * ax1, l1 * ax1)
    ylo = cy0 + min(l0 * ay0, l1 * ay0)
    yhi = cy1 + max(l0 * ay1, l1 * ay1)
    rng = _exact_window_range(g, xlo - r, xhi + r)
    if rng is None:
        return True
    mn, mx = rng
    return mx <= ylo - r or mn >= yhi + r


@dataclass
class MarginCertificate:
    delta: Fraction
    eps: Fraction
    leaves: list  # (box as 6 Fractions, square index)
    boxes_examined: int
    root: tuple = ()

    def covers_root(self) -> bool:
        """Leaves come from bisection, so they tile the root iff the volumes add up."""
        vol = lambda b: (b[1] - b[0]) * (b[3] - b[2]) * (b[5] - b[4])  # noqa: E731
        return sum((vol(b) for b, _ in self.leaves), Fraction(0)) == vol(self.root)

    def verify(self, g: PLFunction) -> bool:
        return self.covers_root() and all(_exact_square_clear(g, box, k, self.delta) for box, k in self.leaves)


def _float_down(q: Fraction) -> float:
    f = float(q)
    if Fraction(f) > q:
        f = math.nextafter(f, -math.inf)
    return f


def _float_up(q: Fraction) -> float:
    f = float(q)
    if Fraction(f) < q:
        f = math.nextafter(f, math.inf)
    return f


def _search(g: PLFunction, table: _RangeTable, root: np.ndarray, r: float, max_depth: int, max_boxes: int):
    """Breadth-first subdivision; returns accepted (boxes, square idx) or None."""
    slack = 1e-12
    boxes = root.copy()
    depth = 0
    accepted_boxes = []
    accepted_k = []
    examined = 0
    while len(boxes):
        examined += len(boxes)
        if examined > max_boxes or depth > max_depth:
            return None, examined
        cx0, cx1, cy0, cy1, l0, l1 = boxes.T
        clear_any = np.zeros(len(boxes), dtype=bool)
        which = np.full(len(boxes), -1)
        for k in range(15):
            ax0, ax1 = _AXf[k]
            ay0, ay1 = _AYf[k]
            xlo = cx0 + np.minimum(l0 * ax0, l1 * ax0)
            xhi = cx1 + np.maximum(l0 * ax1, l1 * ax1)
            ylo = cy0 + np.minimum(l0 * ay0, l1 * ay0)
            yhi = cy1 + np.maximum(l0 * ay1, l1 * ay1)
            mn, mx, empty = table.window_range(xlo - r - slack, xhi + r + slack)
            ok = empty | (mx <= ylo - r - slack) | (mn >= yhi + r + slack)
            new = ok & ~clear_any
            which[new] = k
            clear_any |= ok
        accepted_boxes.append(boxes[clear_any])
        accepted_k.append(which[clear_any])
        rest = boxes[~clear_any]
        if not len(rest):
            break
        w = np.stack([rest[:, 1] - rest[:, 0], rest[:, 3] - rest[:, 2], (rest[:, 5] - rest[:, 4]) / 2], axis=1)
        dim = np.argmax(w, axis=1)
        lo_idx = 2 * dim
        mid = (rest[np.arange(len(rest)), lo_idx] + rest[np.arange(len(rest)), lo_idx + 1]) / 2
        left = rest.copy()
        right = rest.copy()
        left[np.arange(len(rest)), lo_idx + 1] = mid
        right[np.arange(len(rest)), lo_idx] = mid
        boxes = np.concatenate([left, right])
        depth += 1
    return (np.concatenate(accepted_boxes), np.concatenate(accepted_k)), examined


def peak_margin_certificate(g: PLFunction, eps: Fraction, grid: int = 40, max_boxes: int = 4_000_000) -> MarginCertificate:
    """Certify delta > 0: every 5:3 rectangle with base in [eps, 5] near the
    graph has a square at sup-norm distance >= delta from the graph of g.

    Rectangles whose centre lies outside the graph's bounding box inflated
    by 5 are at distance >= 2 from the graph and need no search.  Targets
    run down the dyadic ladder 2^-j from the largest 2^-j <= min(eps, 1)/20; ``grid`` bounds the subdivision depth.
    The float screening is followed by an exact re-check of every leaf.
    """
    eps = rat(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if eps > 5:
        raise ValueError("eps must not exceed 5")
    table = _RangeTable(g)
    gmin, gmax = min(g.values), max(g.values)
    x0, x1 = g.domain
    root = np.array(
        [
            [
                _float_down(x0 - 5),
                _float_up(x1 + 5),
                _float_down(gmin - 5),
                _float_up(gmax + 5),
                _float_down(eps),
                5.0,
            ]
        ]
    )
    root_exact = tuple(Fraction(float(v)) for v in root[0])
    # a coarse initial grid keeps the breadth-first frontier small
    root = _split_all(root, 3)
    top = min(eps, Fraction(1)) / 20
    j0 = 0
    while Fraction(1, 2**j0) > top:
        j0 += 1
    for j in range(j0, j0 + 15):
        r = Fraction(1, 2**j)
        res, examined = _search(g, table, root, float(r), grid, max_boxes)
        if res is None:
            continue
        boxes, ks = res
        leaves = [(tuple(Fraction(float(v)) for v in box), int(k)) for box, k in zip(boxes, ks)]
        cert = MarginCertificate(r, eps, leaves, examined, root_exact)
        if cert.verify(g):
            return cert
    raise MarginNotCertified(f"no positive margin certified for eps = {eps} at grid depth {grid}")


def _split_all(boxes: np.ndarray, times: int) -> np.ndarray:
    for _ in range(times):
        for d in range(3):
            mid = (boxes[:, 2 * d] + boxes[:, 2 * d + 1]) / 2
            a = boxes.copy()
            b = boxes.copy()
            a[:, 2 * d + 1] = mid
            b[:, 2 * d] = mid
            boxes = np.concatenate([a, b])
    return boxes


def peak_margin(g: PLFunction, eps: Fraction, grid: int = 40) -> Fraction:
    return peak_margin_certificate(g, eps, grid).delta


def peak_build(N: int, grid: int = 40) -> PeakSumModel:
    """Choose q, a, b recursively so that all model invariants hold.

    a_n = min(2^-n / n, delta_n / 2) and s_n = 2^(n+1) * sum_{i<n} s_i, i.e.
    the slope condition holds with a factor-2 margin.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    gen = calkin_wilf_unit()
    q = [next(gen) for _ in range(N + 1)]
    a, b, s = [A0], [B0], [A0 / B0]
    delta: list[Optional[Fraction]] = [None]
    epsilon: list[Optional[Fraction]] = [None]
    for n in range(1, N + 1):
        eps_n = min_pairwise_gap(q[: n + 1])
        g_prev = peak_partial_sum(q, a, b, n - 1)
        d_n = peak_margin(g_prev, eps_n, grid)
        a_n = min(Fraction(1, 2**n * n), d_n / 2)
        s_n = 2 ** (n + 1) * sum(s)
        a.append(a_n)
        s.append(s_n)
        b.append(a_n / s_n)
        delta.append(d_n)
        epsilon.append(eps_n)
    return PeakSumModel(N, tuple(q), tuple(a), tuple(b), tuple(s), tuple(delta), tuple(epsilon), grid)


def peak_interference(model: PeakSumModel, m: int, include_tail: bool = False) -> Fraction:
    """(sum_{n>m} a_n + b_m sum_{n<m} s_n) / a_m for the truncated model."""
    tail = sum(model.a[m + 1 :], Fraction(0))
    if include_tail:
        tail += model.tail_bound()
    return (tail + model.b[m] * sum(model.s[:m], Fraction(0))) / model.a[m]


def peak_refutation_bound(model: PeakSumModel, m: int, include_tail: bool = False) -> Fraction:
    """(1 - e_m) / (2 (1/s_m + e_m)): every c below it is refuted at peak m."""
    e = peak_interference(model, m, include_tail)
    return (1 - e) / (2 * (1 / model.s[m] + e))


def peak_triple(model: PeakSumModel, m: int) -> tuple[Fraction, Fraction, Fraction]:
    return model.q[m] - model.b[m], model.q[m], model.q[m] + model.b[m]


# --- absolute-continuity modulus -----------------------------------------------------


def ac_level(model: PeakSumModel, eps: Fraction) -> int:
    """Least m with sum_{n>m} a_n (tail beyond N included) <= eps."""
    eps = rat(eps)
    for m in range(model.N + 1):
        if sum(model.a[m + 1 :], Fraction(0)) + model.tail_bound() <= eps:
            return m
    raise ValueError(f"the model tail alone exceeds eps = {eps}")


def ac_delta(model: PeakSumModel, eps: Fraction) -> tuple[int, Fraction]:
    """(m, delta) with delta = eps / sum_{n<=m} s_n.

    On a family of disjoint intervals of total length < delta the first m+1
    peaks vary by < eps, and peak n > m by at most 2 a_n, so the whole sum
    varies by < eps + 2 sum_{n>m} a_n <= 3 eps.
    """
    m = ac_level(model, eps)
    return m, rat(eps) / sum(model.s[: m + 1], Fraction(0))


def family_variation(g: PLFunction, family: Sequence[tuple[Fraction, Fraction]]) -> Fraction:
    return sum((abs(g(v) - g(u)) for u, v in family), Fraction(0))


def random_interval_family(rng, model: PeakSumModel, delta: Fraction, k: int) -> list[tuple[Fraction, Fraction]]:
    """k disjoint intervals in [0, 1] of total length < delta.

    Half of the intervals are placed on the flanks of random peaks, where
    the sum is steepest.  Endpoints are dyadic rationals.
    """
    lengths = rng.dirichlet(np.ones(k)) * float(delta) * 0.999
    out: list[tuple[Fraction, Fraction]] = []
    for i, L in enumerate(lengths):
        L = Fraction(float(L))
        for _ in range(100):
            if i % 2 == 0:
                n = int(rng.integers(0, model.N + 1))
                start = model.q[n] + model.b[n] * Fraction(float(rng.uniform(-1.2, 1.2)))
                start = Fraction(float(start))
            else:
                start = Fraction(float(rng.uniform(0, 1)))
            u, v = start, start + L
            if 0 <= u and v <= 1 and all(v <= a or u >= b for a, b in out):
                out.append((u, v))
                break
    return sorted(out)
