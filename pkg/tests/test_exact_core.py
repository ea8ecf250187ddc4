from __future__ import annotations

import json
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import pl_functions, tent
from monograph.constructions.mzv import mzv_approximant
from monograph.exact_core import (
    DomainError,
    PLFunction,
    jordan_decompose,
    merged_mesh,
    pl_eval,
    pl_level_crossings,
    pl_min_max,
    pl_sup_diff,
    pl_total_variation,
    rat,
    rat_to_str,
    str_to_rat,
)

F = Fraction


def test_rationals_round_trip_as_strings():
    assert rat_to_str(F(6, -4)) == "-3/2"
    assert rat_to_str(F(2)) == "2/1"
    assert str_to_rat("-3/2") == F(-3, 2)
    with pytest.raises(TypeError):
        rat(0.5)


def test_pl_rejects_bad_meshes():
    with pytest.raises(ValueError):
        PLFunction([0], [0])
    with pytest.raises(ValueError):
        PLFunction([0, 0], [0, 1])
    with pytest.raises(ValueError):
        PLFunction([1, 0], [0, 1])


def test_eval_examples():
    f1 = mzv_approximant(1).fn
    assert pl_eval(f1, F(2, 5)) == F(1, 6)
    assert pl_eval(PLFunction([0, 1], [0, 1]), F(1, 3)) == F(1, 3)
    with pytest.raises(DomainError):
        pl_eval(f1, F(11, 10))


@given(pl_functions())
def test_eval_at_breakpoints_returns_stored_values(f):
    assert all(pl_eval(f, x) == y for x, y in zip(f.breakpoints, f.values))


@given(pl_functions(), st.fractions(min_value=0, max_value=1, max_denominator=50))
def test_eval_is_affine_between_breakpoints(f, x):
    xs, ys = f.breakpoints, f.values
    k = max(i for i in range(len(xs) - 1) if xs[i] <= x) if x < 1 else len(xs) - 2
    expect = ys[k] + (ys[k + 1] - ys[k]) * (x - xs[k]) / (xs[k + 1] - xs[k])
    assert pl_eval(f, x) == expect


def test_sup_diff_examples():
    f0, f1 = mzv_approximant(0).fn, mzv_approximant(1).fn
    assert pl_sup_diff(f1, f0) == F(1, 6)
    assert pl_sup_diff(f1, f1) == 0
    with pytest.raises(ValueError):
        pl_sup_diff(f1, PLFunction([0, 2], [0, 0]))


@given(pl_functions(), pl_functions())
def test_sup_diff_symmetric_and_matches_mesh_oracle(f, g):
    d = pl_sup_diff(f, g)
    assert d == pl_sup_diff(g, f) >= 0
    mesh = sorted(set(f.breakpoints) | set(g.breakpoints))
    assert d == max(abs(f(x) - g(x)) for x in mesh)
    assert (d == 0) == all(f(x) == g(x) for x in mesh)


def test_total_variation_examples():
    assert pl_total_variation(mzv_approximant(1).fn) == F(1, 3)
    assert pl_total_variation(PLFunction([0, 1], [2, 2])) == 0
    assert pl_total_variation(PLFunction([0, F(1, 3), 1], [0, F(1, 5), 1])) == 1


@given(pl_functions(), pl_functions())
def test_total_variation_triangle_inequality(f, g):
    assert pl_total_variation(f + g) <= pl_total_variation(f) + pl_total_variation(g)


def test_level_crossing_examples():
    assert pl_level_crossings(tent(), F(1, 4)) == [F(1, 4), F(3, 4)]
    assert pl_level_crossings(tent(), 1) == []
    # f_1 rises from 0 to 1/6 on [1/5, 2/5], so 1/12 is met at 3/10 and 7/10
    assert pl_level_crossings(mzv_approximant(1).fn, F(1, 12)) == [F(3, 10), F(7, 10)]
    assert pl_level_crossings(mzv_approximant(1).fn, F(1, 6)) == [(F(2, 5), F(3, 5))]


@given(pl_functions(values=st.sampled_from([F(0), F(1, 2), F(1), F(-1, 3)])), st.sampled_from([F(0), F(1, 2), F(1, 4), F(1)]))
def test_level_crossings_solve_the_equation(f, v):
    out = pl_level_crossings(f, v)
    flat = [p for item in out for p in (item if isinstance(item, tuple) else (item,))]
    assert flat == sorted(flat)
    assert all(f(x) == v for x in flat)
    # every breakpoint at level v and every sign change is accounted for
    for x, y in zip(f.breakpoints, f.values):
        if y == v:
            assert any(x == p or (isinstance(p, tuple) and p[0] <= x <= p[1]) for p in out)
    for i in range(len(f.breakpoints) - 1):
        a, b = f.values[i] - v, f.values[i + 1] - v
        if a * b < 0:
            assert any(f.breakpoints[i] < p < f.breakpoints[i + 1] for p in flat)


def test_jordan_examples():
    g, h = jordan_decompose(PLFunction([0, 1], [0, 1]))
    assert g == PLFunction([0, 1], [0, 1]) and h == PLFunction([0, 1], [0, 0])
    g, h = jordan_decompose(tent())
    assert g.values == (0, F(1, 2), F(1, 2)) and h.values == (0, 0, F(1, 2))
    assert all(tent()(F(k, 64)) == g(F(k, 64)) - h(F(k, 64)) for k in range(65))


@given(pl_functions())
def test_jordan_pair_is_minimal_and_reconstructs(f):
    g, h = jordan_decompose(f)
    for p in (g, h):
        assert all(b >= a for a, b in zip(p.values, p.values[1:]))
    assert all(f(x) == g(x) - h(x) for x in f.breakpoints)
    assert (g.values[-1] - g.values[0]) + (h.values[-1] - h.values[0]) == pl_total_variation(f)


@given(pl_functions())
def test_json_round_trip_is_bit_exact(f):
    text = f.to_json()
    back = PLFunction.from_json(text)
    assert back.breakpoints == f.breakpoints and back.values == f.values
    assert all(isinstance(s, str) and "/" in s for s in json.loads(text)["values"])


@given(pl_functions())
def test_normalization_keeps_the_function(f):
    n = f.normalized()
    assert n == f
    assert all(n(x) == f(x) for x in f.breakpoints)
    slopes = n.slopes()
    assert all(a != b for a, b in zip(slopes, slopes[1:]))


@given(pl_functions(), pl_functions())
def test_merged_mesh_and_min_max(f, g):
    xs, fv, gv = merged_mesh(f, g)
    assert xs == sorted(set(f.breakpoints) | set(g.breakpoints))
    assert all(f(x) == a and g(x) == b for x, a, b in zip(xs, fv, gv))
    lo, hi = pl_min_max(f)
    assert lo == min(f.values) and hi == max(f.values)
