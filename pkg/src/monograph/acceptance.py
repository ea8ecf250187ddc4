"""Acceptance checks, one function per criterion.

Every check returns a JSON-ready record ``{"id", "name", "passed", "values"}``.
Random draws come from ``numpy.random.default_rng(seed + id)``, so a record
depends only on the seed.  Floats are rounded before they are stored so that
reports are byte-stable.
"""

from __future__ import annotations

import time
from fractions import Fraction
from functools import lru_cache
from typing import Callable

import numpy as np

from .constructions.mzv import mzv_approximant, mzv_block, refinement_checks
from .constructions.peaks import (
    PeakSumModel,
    ac_delta,
    check_peak_model,
    family_variation,
    peak_build,
    peak_refutation_bound,
    peak_triple,
    random_interval_family,
)
from .constructions.series import SeriesEvaluator, nomp_ratio_bound, nomp_witness, takagi_eval
from .differentiation import (
    dini_estimate,
    limit_breakpoint_quotient,
    mzv_oscillation,
    mzv_point_class,
    slope_chain,
    slope_law_value,
)
from .exact_core import pl_sup_diff, pl_total_variation, rat_to_str
from .geometry import box_dimension, porosity_estimate, rect_grid, sample_graph, square_avoidance
from .monotonicity import (
    Inconclusive,
    check_cover,
    check_pc,
    cover_2r,
    monotonicity_bracket,
    mpoint_refute,
    refute_monotone,
    side_ratio_sq,
)

DEFAULT_SEED = 20240607
PEAKS_N = 6


def _r(v: float, digits: int = 6) -> float:
    return round(float(v), digits)


def _record(cid: int, name: str, passed: bool, values: dict) -> dict:
    return {"id": cid, "name": name, "passed": bool(passed), "values": values}


@lru_cache(maxsize=2)
def peak_model(N: int = PEAKS_N) -> PeakSumModel:
    return peak_build(N)


# --- recursive construction --------------------------------------------------


def c1_refinement(seed: int) -> dict:
    """Structural checks of the refinement, as stated: every item must hold."""
    report = refinement_checks(n_max=8, sandwich_n_max=5, sandwich_i_max=3)
    literal = {k: v for k, v in report.items() if not k.endswith("_sharp")}
    return _record(1, "refinement structure", all(literal.values()), report)


def c2_pc(seed: int) -> dict:
    rows = []
    for n in range(6):
        cert = check_pc(mzv_approximant(n).fn, Fraction(1))
        rows.append({"n": n, "outcome": cert.outcome, "least": rat_to_str(cert.least)})
    return _record(2, "P_1 on f_n, n <= 5", all(r["outcome"] == "Pass" for r in rows), {"levels": rows})


def c3_cauchy(seed: int) -> dict:
    rows, ok = [], True
    for n in range(8):
        d = pl_sup_diff(mzv_approximant(n + 1).fn, mzv_approximant(n).fn)
        ok &= d <= Fraction(1, 2**n)
        rows.append({"n": n, "sup_diff": rat_to_str(d), "bound": rat_to_str(Fraction(1, 2**n))})
    return _record(3, "uniform Cauchy", ok, {"levels": rows})


def c4_monotone(seed: int) -> dict:
    f5 = mzv_approximant(5).fn
    br = monotonicity_bracket(f5)
    w = refute_monotone(f5, Fraction(2))
    ok = br.least_pc <= 1 and br.c_hi <= 2 and w is None
    return _record(
        4,
        "graph of f_5 is 2-monotone",
        ok,
        {"bracket": br.to_dict(), "refutation_at_2": None if w is None else w.to_dict()},
    )


def c5_variation(seed: int) -> dict:
    var = {n: pl_total_variation(mzv_approximant(n).fn) for n in range(2, 9)}
    increasing = all(var[n] < var[n + 1] for n in range(2, 8))
    tripled = var[8] > 3 * var[4]
    return _record(
        5,
        "variation growth",
        increasing and tripled,
        {
            "variation": {str(n): rat_to_str(v) for n, v in var.items()},
            "strictly_increasing": increasing,
            "ratio_8_to_4": rat_to_str(var[8] / var[4]),
            "exceeds_three": tripled,
        },
    )


# --- series without points of local monotonicity --------------------------------


def c6_mpoint(seed: int) -> dict:
    c, n = Fraction(10), 5
    bound = nomp_ratio_bound(n)
    ev = SeriesEvaluator("nomp", 40)
    eps = Fraction(1, 2**20)
    worst, certified, beats_bound = None, 0, 0
    for k in range(1, 101):
        y = Fraction(k, 100)
        w = nomp_witness(y, n)
        try:
            ref = mpoint_refute(ev, y, c, eps, mesh=27, span=4, hints=[(w.x, w.z)])
        except Inconclusive:
            ref = None
        if ref is None:
            continue
        certified += 1
        beats_bound += ref.quotient_lb > bound
        if worst is None or ref.quotient_lb < worst:
            worst = ref.quotient_lb
    ok = bound > c and certified == 100 and beats_bound == 100
    return _record(
        6,
        "no M-points (100 grid points, c = 10)",
        ok,
        {
            "ratio_bound_n5": rat_to_str(bound),
            "ratio_bound_n5_float": _r(bound),
            "certified": certified,
            "above_bound": beats_bound,
            "min_certified_quotient": None if worst is None else _r(worst),
        },
    )


# --- differentiation of the limit ---------------------------------------------


def c7_slopes(seed: int) -> dict:
    flat = mzv_block(Fraction(1, 2), 1)
    rows, ok = [], True
    for i, (blk, slope) in enumerate(slope_chain(flat, 6), start=1):
        want = slope_law_value(i)
        q = abs(limit_breakpoint_quotient(blk))
        ok &= slope == want and q == want
        rows.append({"i": i, "slope": rat_to_str(slope), "limit_quotient": rat_to_str(q), "expected": rat_to_str(want)})
    rng = np.random.default_rng(seed + 7)
    gaps, tried = [], 0
    while len(gaps) < 50:
        tried += 1
        x = Fraction(int(rng.integers(1, 10**9)), 10**9)
        if mzv_point_class(x, 8, index=False).status != "NotInB":
            continue
        osc = mzv_oscillation(x)
        gaps.append(None if osc is None else osc.gap_lb)
    osc_ok = all(g is not None and g >= Fraction(1, 30) for g in gaps)
    return _record(
        7,
        "slope law and oscillation",
        ok and osc_ok,
        {
            "slope_chain": rows,
            "points": len(gaps),
            "drawn": tried,
            "min_gap": None if None in gaps else _r(min(gaps)),
            "all_gaps_certified": osc_ok,
        },
    )


def c8_point_classes(seed: int) -> dict:
    rng = np.random.default_rng(seed + 8)
    draws = rng.integers(0, 2**40, size=10_000)
    first_flat = []
    for p in draws:
        pc = mzv_point_class(Fraction(int(p), 2**40), 8, index=False)
        first_flat.append(pc.level if pc.status == "NotInB" else None)
    fractions = {}
    for d in range(2, 9):
        fractions[d] = sum(1 for lv in first_flat if lv is None or lv > d) / len(first_flat)
    nonincreasing = all(fractions[d + 1] <= fractions[d] for d in range(2, 8))
    return _record(
        8,
        "InB fractions",
        nonincreasing and fractions[8] < 0.35,
        {"fraction_in_b": {str(d): _r(v) for d, v in fractions.items()}, "nonincreasing": nonincreasing},
    )


# --- peak sum model ------------------------------------------------------------


def c9_peaks(seed: int) -> dict:
    model = peak_model()
    g = model.partial_sum()
    inv = check_peak_model(model)

    eps6 = model.epsilon[PEAKS_N]
    bases = [eps6 * 2**k for k in range(5)]
    rects = rect_grid(g, 20, 20, bases)
    avoided = sum(square_avoidance(g, R) is not None for R in rects)

    w = refute_monotone(g, Fraction(5))
    x, y, z = peak_triple(model, PEAKS_N)
    at_triple = {s: side_ratio_sq(g, x, y, z, s) for s in ("from_left", "from_right")}
    triple_ok = w is not None and (w.x, w.y, w.z) == (x, y, z) and w.achieved_ratio >= 5
    triple_ok &= all(v >= 25 for v in at_triple.values())

    rng = np.random.default_rng(seed + 9)
    samples = sample_graph(g, 100_000)
    centers = samples[rng.choice(len(samples), size=200, replace=False)]
    radii = [1 / 4, 1 / 8, 1 / 16, 1 / 32]
    por = porosity_estimate(samples, centers, radii)
    por_ok = por.p >= 1 / 6 - 0.02 and por.verify(samples)

    values = {
        "invariants": inv,
        "delta": [None if v is None else rat_to_str(v) for v in model.delta],
        "epsilon": [None if v is None else rat_to_str(v) for v in model.epsilon],
        "rectangles": len(rects),
        "rectangles_with_avoided_square": avoided,
        "predicted_triple": [rat_to_str(v) for v in (x, y, z)],
        "witness": None if w is None else w.to_dict(),
        "refutation_bound": _r(peak_refutation_bound(model, PEAKS_N)),
        "porosity_q_by_scale": [_r(q) for q in por.q_by_scale],
        "porosity_p": _r(por.p),
        "samples": int(len(samples)),
    }
    parts = {
        "a_invariants": all(inv.values()),
        "b_avoidance": avoided == len(rects),
        "c_witness": triple_ok,
        "d_porosity": por_ok,
    }
    values["parts"] = parts
    return _record(9, "peak sum model (N = 6)", all(parts.values()), values)


def c10_absolute_continuity(seed: int) -> dict:
    model = peak_model()
    g = model.partial_sum()
    eps = Fraction(1, 100)
    m, delta = ac_delta(model, eps)
    tail = sum(model.a[PEAKS_N + 1 :], Fraction(0)) + model.tail_bound()
    rng = np.random.default_rng(seed + 10)
    worst, worst_len = Fraction(0), Fraction(0)
    for _ in range(1000):
        fam = random_interval_family(rng, model, delta, int(rng.integers(1, 21)))
        total = sum((v - u for u, v in fam), Fraction(0))
        assert total < delta
        worst = max(worst, family_variation(g, fam) + 2 * tail)
        worst_len = max(worst_len, total)
    return _record(
        10,
        "absolute-continuity modulus",
        worst <= 3 * eps,
        {
            "eps": rat_to_str(eps),
            "level": m,
            "delta": _r(delta, 12),
            "max_family_length": _r(worst_len, 12),
            "max_variation_with_tail": _r(worst, 8),
            "bound": rat_to_str(3 * eps),
        },
    )


def c11_takagi(seed: int) -> dict:
    half, err_h = takagi_eval(Fraction(1, 2), 60)
    quarter, err_q = takagi_eval(Fraction(1, 4), 60)
    exact = (half, err_h, quarter, err_q) == (Fraction(1, 2), 0, Fraction(1, 2), 0)
    est = dini_estimate(SeriesEvaluator("takagi", 64), Fraction(1, 4), Fraction(1, 2**60), 61)
    best = max(est.right, key=lambda q: q.lo)
    return _record(
        11,
        "Takagi values and quotients",
        exact and best.lo > 10,
        {
            "T_half": rat_to_str(half),
            "T_quarter": rat_to_str(quarter),
            "best_right_quotient": rat_to_str(best.value),
            "at_h": rat_to_str(best.h),
            "err": rat_to_str(best.err),
        },
    )


def c12_dimension(seed: int) -> dict:
    f8 = mzv_approximant(8).fn
    slope_f8, _ = box_dimension(sample_graph(f8, 300_000), 2.0**-10, 2.0**-3)
    t = np.linspace(0, 1, 200_001)
    slope_seg, _ = box_dimension(np.stack([t, t / 2], axis=1), 2.0**-10, 2.0**-3)
    g = (np.arange(1024) + 0.5) / 1024
    gx, gy = np.meshgrid(g, g)
    slope_sq, _ = box_dimension(np.stack([gx.ravel(), gy.ravel()], axis=1), 2.0**-8, 2.0**-3)
    ok = 0.9 <= slope_f8 <= 1.15 and 0.95 <= slope_seg <= 1.05 and 1.9 <= slope_sq <= 2.1
    return _record(12, "box dimension", ok, {"f8": _r(slope_f8), "segment": _r(slope_seg), "square": _r(slope_sq)})


def c13_cover(seed: int) -> dict:
    rng = np.random.default_rng(seed + 13)
    delta = 2.5
    bad, sizes = 0, []
    for _ in range(1000):
        k = int(rng.integers(1, 51))
        centers = rng.uniform(0, 1, size=(k, 2))
        radii = rng.uniform(0.005, 0.2, size=k)
        balls = [(tuple(c), float(r)) for c, r in zip(centers, radii)]
        chosen = cover_2r(balls, delta)
        disjoint, covered = check_cover(balls, chosen, delta)
        bad += not (disjoint and covered)
        sizes.append(len(chosen))
    return _record(13, "disjoint covering selection", bad == 0, {"families": 1000, "failures": bad, "mean_selected": _r(np.mean(sizes), 4)})


CHECKS: dict[int, Callable[[int], dict]] = {
    1: c1_refinement,
    2: c2_pc,
    3: c3_cauchy,
    4: c4_monotone,
    5: c5_variation,
    6: c6_mpoint,
    7: c7_slopes,
    8: c8_point_classes,
    9: c9_peaks,
    10: c10_absolute_continuity,
    11: c11_takagi,
    12: c12_dimension,
    13: c13_cover,
}


def run_check(cid: int, seed: int = DEFAULT_SEED) -> dict:
    return CHECKS[cid](seed)


def timed(cid: int, seed: int = DEFAULT_SEED) -> tuple[dict, float]:
    t = time.perf_counter()
    rec = run_check(cid, seed)
    return rec, time.perf_counter() - t
