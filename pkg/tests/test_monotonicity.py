from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import pl_functions, tent
from monograph.constructions.mzv import mzv_approximant
from monograph.constructions.series import SeriesEvaluator, nomp_witness
from monograph.exact_core import PLFunction, pl_level_crossings
from monograph.monotonicity import (
    Inconclusive,
    PcCertificate,
    WitnessTriple,
    best_witness,
    check_cover,
    check_pc,
    cover_2r,
    least_pc,
    monotonicity_bracket,
    mpoint_refute,
    reflect_evaluator,
    refute_monotone,
    side_ratio_sq,
)

F = Fraction
SIDES = ("from_left", "from_right")


def crossing_points(f, v):
    out = []
    for item in pl_level_crossings(f, v):
        out.extend(item if isinstance(item, tuple) else (item,))
    return out


def brute_least_pc(f: PLFunction) -> Fraction:
    """Oracle: every pair of level-v crossings at every breakpoint level v."""
    best = F(0)
    for v in set(f.values):
        pts = crossing_points(f, v)
        for x, y in itertools.combinations(pts, 2):
            inner = [x, y] + [t for t in f.breakpoints if x < t < y]
            osc = max(abs(f(t) - v) for t in inner)
            best = max(best, osc / (y - x))
    return best


def brute_best_ratio(f: PLFunction, side: str) -> Fraction:
    xs = f.breakpoints
    return max(side_ratio_sq(f, x, y, z, side) for x, y, z in itertools.combinations(xs, 3))


# --- condition P_c ------------------------------------------------------------------


def test_tent_examples():
    t = PLFunction([0, F(1, 2), 1], [0, F(1, 2), 0])
    cert = check_pc(t, F(1, 3))
    assert cert.outcome == "Fail" and cert.witness == (0, F(1, 2), 1)
    assert cert.verify(t)
    assert check_pc(t, F(1, 2)).passed
    assert least_pc(t) == F(1, 2)


def test_nondecreasing_passes():
    f = PLFunction([0, F(1, 3), F(1, 2), 1], [0, 1, 1, 3])
    assert least_pc(f) == 0 and check_pc(f, F(1, 100)).passed


def test_constant_has_zero_constant():
    assert least_pc(PLFunction([0, 1], [1, 1])) == 0


def test_refinement_levels_satisfy_p1():
    expected = [0, F(5, 18), F(5, 12), F(37, 84), F(187, 420), F(937, 2100)]
    for n, want in enumerate(expected):
        f = mzv_approximant(n).fn
        assert least_pc(f) == want
        assert check_pc(f, 1).passed


@given(pl_functions(max_points=8, values=st.fractions(min_value=-2, max_value=2, max_denominator=4)))
def test_least_pc_matches_brute_force(f):
    assert least_pc(f) == brute_least_pc(f)


@given(pl_functions(max_points=8, values=st.fractions(min_value=-2, max_value=2, max_denominator=4)), st.fractions(min_value=F(1, 20), max_value=3, max_denominator=20))
def test_decision_is_consistent(f, c):
    cert = check_pc(f, c)
    assert cert.passed == (least_pc(f) <= c)
    assert cert.verify(f)
    if not cert.passed:
        x, t, y = cert.witness
        assert f(x) == f(y) and abs(f(x) - f(t)) > c * (y - x)


@given(pl_functions(max_points=7, values=st.fractions(min_value=-2, max_value=2, max_denominator=4)), st.data())
def test_no_violation_on_sampled_levels(f, data):
    """Randomised completeness check at levels between breakpoint values."""
    lp = least_pc(f)
    lo, hi = min(f.values), max(f.values)
    for _ in range(5):
        v = data.draw(st.fractions(min_value=lo, max_value=hi, max_denominator=97))
        pts = crossing_points(f, v)
        for x, y in itertools.combinations(pts, 2):
            inner = [t for t in f.breakpoints if x < t < y]
            osc = max([abs(f(t) - v) for t in inner], default=F(0))
            assert osc <= lp * (y - x)


def test_certificate_json_round_trip():
    cert = check_pc(tent(), F(1, 3))
    assert PcCertificate.from_dict(cert.to_dict()) == cert


@given(pl_functions(max_points=7, values=st.fractions(min_value=-2, max_value=2, max_denominator=4)))
def test_equal_level_triples_bound_the_pc_constant(f):
    """A triple with f(x) = f(z) and distance ratio r > 1 forces least_pc > r - 1."""
    for v in set(f.values):
        pts = crossing_points(f, v)
        for x, z in itertools.combinations(pts, 2):
            for y in [t for t in f.breakpoints if x < t < z]:
                r2 = side_ratio_sq(f, x, y, z, "from_left")
                r = F(math.isqrt(r2.numerator * 10**12 // r2.denominator), 10**6)
                if r > 1:
                    assert least_pc(f) > r - 1


# --- refutation witnesses -------------------------------------------------------------


def test_increasing_function_has_no_witness():
    f = PLFunction([0, F(1, 4), F(1, 2), 1], [0, F(1, 3), F(1, 2), 2])
    assert refute_monotone(f, 1) is None


def test_tent_refutation():
    t = tent()
    w = refute_monotone(t, F(7, 10))
    assert w is not None and w.refutes(F(7, 10))
    assert w.companion is not None and w.companion.refutes(F(7, 10))
    assert w.recompute(t) == w.ratio_sq
    assert side_ratio_sq(t, F(0), F(1, 2), F(1), "from_left") == F(1, 2) > F(7, 10) ** 2


def test_tent_bracket():
    br = monotonicity_bracket(tent())
    assert br.c_hi == F(3, 2) and br.least_pc == F(1, 2)
    assert br.c_lo ** 2 >= F(1, 2) - F(1, 10**6)
    assert br.c_lo <= br.c_hi


def test_nondecreasing_bracket():
    br = monotonicity_bracket(PLFunction([0, F(1, 2), 1], [0, F(1, 4), 1]))
    assert br.c_hi == 1 and br.c_lo <= 1


def test_level_five_bracket_and_no_refutation_at_two():
    f5 = mzv_approximant(5).fn
    br = monotonicity_bracket(f5)
    assert br.c_hi == F(3037, 2100) <= 2
    assert 1 < br.c_lo <= br.c_hi
    assert refute_monotone(f5, 2) is None


@given(pl_functions(min_points=3, max_points=9))
def test_search_finds_the_best_breakpoint_triple(f):
    w = best_witness(f)
    assert w.recompute(f) == w.ratio_sq
    best = {s: brute_best_ratio(f, s) for s in SIDES}
    got = {w.side: w.ratio_sq, w.companion.side: w.companion.ratio_sq}
    assert set(got) == set(SIDES)
    assert all(got[s] >= best[s] for s in SIDES)


@given(pl_functions(min_points=3, max_points=9), st.fractions(min_value=F(1, 2), max_value=3, max_denominator=10))
def test_refutation_semantics(f, c):
    w = refute_monotone(f, c)
    sym = refute_monotone(f, c, symmetric=True)
    if w is not None:
        assert w.refutes(c) and w.companion.refutes(c) and w.side != w.companion.side
        assert sym is not None
    if sym is not None:
        assert sym.refutes(c) and sym.recompute(f) == sym.ratio_sq


def test_witness_json_round_trip():
    w = refute_monotone(tent(), F(7, 10))
    assert WitnessTriple.from_dict(w.to_dict()) == w


def test_peak_sum_witness_at_predicted_triple(peak_model6):
    from monograph.constructions.peaks import peak_refutation_bound, peak_triple

    m = peak_model6
    g = m.partial_sum()
    x, y, z = peak_triple(m, 6)
    bound = peak_refutation_bound(m, 6)
    assert bound > 5
    for s in SIDES:
        assert side_ratio_sq(g, x, y, z, s) > bound**2
    w = refute_monotone(g, 5)
    assert (w.x, w.y, w.z) == (x, y, z)


# --- local monotonicity at a point --------------------------------------------------------


def test_linear_function_has_no_refutation():
    lin = lambda t: (3 * t + 1, F(0))  # noqa: E731
    for y in (F(1, 3), F(1, 2)):
        assert mpoint_refute(lin, y, 1, F(1, 8), mesh=6) is None


def test_series_refutation_and_reflection():
    ev = SeriesEvaluator("nomp", 40)
    for y in (F(0), F(1, 7), F(3, 10)):
        w = nomp_witness(y, 5)
        ref = mpoint_refute(ev, y, 10, F(1, 2**20), 27, hints=[(w.x, w.z)])
        assert ref is not None and ref.quotient_lb > w.ratio_lb > 10
        neg = mpoint_refute(reflect_evaluator(ev, vertical=True), y, 10, F(1, 2**20), 27, hints=[(w.x, w.z)])
        assert neg is not None and neg.quotient_lb == ref.quotient_lb
        # x -> -x swaps the roles of the two sides
        back = mpoint_refute(reflect_evaluator(ev), -y, 10, F(1, 2**20), 27, hints=[(-w.z, -w.x)])
        assert back is not None


def test_uncertifiable_violation_is_inconclusive():
    zig = lambda t: (F(1) if t == 0 else F(0), F(1))  # noqa: E731
    with pytest.raises(Inconclusive):
        mpoint_refute(zig, F(0), 1, F(1, 4), mesh=4)


# --- covering -------------------------------------------------------------------------------


def brute_cover_check(balls, chosen, delta):
    """Pure-Python oracle for disjointness and coverage."""
    dist = lambda p, q: math.hypot(p[0] - q[0], p[1] - q[1])  # noqa: E731
    disjoint = all(dist(balls[i][0], balls[j][0]) >= balls[i][1] + balls[j][1] for i, j in itertools.combinations(chosen, 2))
    covered = all(any(dist(c, balls[i][0]) < delta * balls[i][1] for i in chosen) for c, _ in balls)
    return disjoint, covered


def test_cover_examples():
    assert cover_2r([((0.0, 0.0), 1.0)], 2.5) == [0]
    assert cover_2r([((0.0, 0.0), 1.0), ((10.0, 0.0), 1.0)], 2.5) == [0, 1]
    with pytest.raises(ValueError):
        cover_2r([((0.0, 0.0), 1.0)], 2.0)


@given(st.integers(0, 10**6), st.integers(1, 50))
def test_cover_properties(seed, k):
    rng = np.random.default_rng(seed)
    balls = [(tuple(c), float(r)) for c, r in zip(rng.uniform(0, 1, (k, 2)), rng.uniform(0.01, 0.3, k))]
    chosen = cover_2r(balls, 2.5)
    assert check_cover(balls, chosen, 2.5) == (True, True)
    assert brute_cover_check(balls, chosen, 2.5) == (True, True)


def test_cover_check_detects_overlap_and_gaps():
    balls = [((0.0, 0.0), 1.0), ((1.0, 0.0), 1.0), ((9.0, 0.0), 0.1)]
    assert check_cover(balls, [0, 1], 2.5) == brute_cover_check(balls, [0, 1], 2.5) == (False, False)
    assert cover_2r(balls, 2.5) == [0, 2]
