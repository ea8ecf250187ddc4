from __future__ import annotations

import os
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from monograph.exact_core import PLFunction

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=400, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

small_rat = st.fractions(min_value=-4, max_value=4, max_denominator=12)


@st.composite
def pl_functions(draw, min_points: int = 2, max_points: int = 9, lo: int = 0, hi: int = 1, values=small_rat):
    """PL functions on [lo, hi] with rational breakpoints of small height."""
    n = draw(st.integers(min_points, max_points))
    interior = st.fractions(min_value=lo, max_value=hi, max_denominator=24).filter(lambda t: lo < t < hi)
    inner = draw(st.lists(interior, min_size=n - 2, max_size=n - 2, unique=True))
    xs = sorted(set([Fraction(lo), Fraction(hi)] + inner))
    ys = [draw(values) for _ in xs]
    return PLFunction(xs, ys)


def tent(apex_x=Fraction(1, 2), height=Fraction(1, 2)) -> PLFunction:
    return PLFunction([0, apex_x, 1], [0, height, 0])


@pytest.fixture(scope="session")
def peak_model6():
    from monograph.acceptance import peak_model

    return peak_model(6)


# one PASS/FAIL line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: dict[str, str] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    label = item.get_closest_marker("criterion")
    if label is None or rep.when != "call" and not (rep.when == "setup" and rep.failed):
        return
    key = str(label.args[0])
    ACCEPTANCE_LINES[key] = f"criterion {key:>2}: {'PASS' if rep.passed else 'FAIL'}  {label.args[1]}"


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(id, name): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    order = sorted(ACCEPTANCE_LINES, key=lambda k: (int(k.rstrip("abcd")), k))
    for key in order:
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
