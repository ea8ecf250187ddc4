from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from monograph.constructions.peaks import (
    A0,
    B0,
    PeakSumModel,
    ac_delta,
    calkin_wilf_unit,
    check_peak_model,
    family_variation,
    min_pairwise_gap,
    peak_build,
    peak_eval,
    peak_margin,
    peak_margin_certificate,
    peak_norm,
    peak_partial_sum,
    peak_refutation_bound,
    random_interval_family,
)
from monograph.exact_core import PLFunction
from monograph.geometry import Rect53, square_avoidance, squares_of_rect, graph_meets_open_square

F = Fraction


def test_enumeration_starts_with_zero_one_half():
    gen = calkin_wilf_unit()
    head = [next(gen) for _ in range(8)]
    assert head[:5] == [0, 1, F(1, 2), F(1, 3), F(2, 3)]
    assert len(set(head)) == 8 and all(0 <= q <= 1 for q in head)


def test_peak_norm_shape():
    assert peak_norm(F(0)) == 1
    assert peak_norm(F(1, 2)) == peak_norm(F(-1, 2)) == F(1, 2)
    assert peak_norm(F(3, 2)) == 0


def test_base_peak_values():
    assert A0 / B0 == 4
    g0 = peak_partial_sum([F(1, 2)], [A0], [B0], 0)
    assert g0(F(1, 2)) == A0
    assert g0(F(1, 2) + B0 / 2) == A0 / 2
    assert g0(F(0)) == 0


def test_margin_on_flat_line():
    # the optimum is 1/10 for base-1 rectangles straddling the line
    line = PLFunction([-1, 2], [0, 0])
    cert = peak_margin_certificate(line, F(1))
    assert 0 < cert.delta <= F(1, 10)
    assert cert.verify(line)


def test_margin_on_single_peak_and_monotone_in_eps():
    g = peak_partial_sum([F(1, 2)], [A0], [B0], 0)
    d1 = peak_margin(g, F(1))
    d2 = peak_margin(g, F(1, 2))
    assert d1 > 0 and d2 > 0 and d2 <= d1


def test_margin_certificate_rejects_tampering():
    g = peak_partial_sum([F(1, 2)], [A0], [B0], 0)
    cert = peak_margin_certificate(g, F(1))
    assert cert.verify(g)
    cert.leaves.pop()
    assert not cert.verify(g)


def test_margin_claim_by_sampling(peak_model6):
    """Oracle: random rectangles of base >= eps_n always have a square at distance >= delta_n."""
    m = peak_model6
    rng = np.random.default_rng(3)
    for n in (1, 3, 5):
        g = m.partial_sum(n - 1)
        d = m.delta[n]
        for _ in range(150):
            base = F(float(rng.uniform(float(m.epsilon[n]), 3)))
            cx = F(float(rng.uniform(-0.5, 1.5)))
            cy = F(float(rng.uniform(-0.5, 1.0)))
            R = Rect53.centered(cx, cy, base)
            ok = False
            for sq in squares_of_rect(R):
                grown = type(sq)(sq.left - d, sq.bottom - d, sq.side + 2 * d)
                if not graph_meets_open_square(g, grown):
                    ok = True
                    break
            assert ok


def test_build_small_model_invariants():
    m = peak_build(2)
    assert all(check_peak_model(m).values())
    assert m.a[1] < m.delta[1]
    assert m.tail_bound() <= F(1, 2**m.N)


def test_n6_model(peak_model6):
    m = peak_model6
    assert all(check_peak_model(m).values())
    assert m.delta[1:] == (F(1, 32), F(1, 64), F(1, 128), F(1, 128), F(1, 256), F(1, 512))
    assert m.epsilon[1:] == (1, F(1, 2), F(1, 6), F(1, 6), F(1, 12), F(1, 15))
    assert peak_refutation_bound(m, 6) > 5


def test_tampered_model_fails_checks(peak_model6):
    d = peak_model6.to_dict()
    d["a"][3] = "1/2"
    bad = PeakSumModel.from_dict(d)
    report = check_peak_model(bad)
    assert not report["height_bound"] and not report["slope_is_ratio"]


def test_model_json_round_trip(peak_model6):
    back = PeakSumModel.from_dict(peak_model6.to_dict())
    assert back == peak_model6


def test_eval_examples(peak_model6):
    m = peak_model6
    v, err = peak_eval(m, m.q[0], upto=0)
    assert v == A0 and err == sum(m.a[1:], F(0)) + m.tail_bound()
    x = F(9, 10)  # outside every support for this model
    assert all(abs(x - m.q[n]) >= m.b[n] for n in range(m.N + 1))
    assert peak_eval(m, x)[0] == 0


@given(st.fractions(min_value=0, max_value=1, max_denominator=500))
def test_partial_sum_matches_peak_eval(x):
    m = peak_build(2)
    assert m.partial_sum()(x) == peak_eval(m, x)[0]


def test_min_pairwise_gap():
    assert min_pairwise_gap([F(0), F(1), F(1, 2), F(1, 3)]) == F(1, 6)


def test_ac_modulus_on_families(peak_model6):
    m = peak_model6
    eps = F(1, 100)
    level, delta = ac_delta(m, eps)
    g = m.partial_sum()
    tail = m.tail_bound()
    rng = np.random.default_rng(1)
    for _ in range(50):
        fam = random_interval_family(rng, m, delta, 6)
        assert sum(v - u for u, v in fam) < delta
        assert all(b1 <= a2 for (_, b1), (a2, _) in zip(fam, fam[1:]))
        assert family_variation(g, fam) + 2 * tail <= 3 * eps
