import os
from fractions import Fraction
from pathlib import Path

import pytest

import quotver

SCENARIOS = Path(os.environ.get("QUOTVER_SCENARIO_DIR", Path(__file__).resolve().parents[2] / "scenarios"))


def scenario(name):
    return str(SCENARIOS / f"{name}.json")


def test_z2_verifies_terminal():
    r = quotver.verify(scenario("z2"))
    assert r.passed
    assert r.exit_code == 0
    assert r.verdict == "terminal"
    mups = [s for s in r.steps if s.kind == "mup"]
    assert len(mups) == 7
    assert all(s.detail == "toric 1/2(1,1,1)" for s in mups)


def test_f2intro_through_the_same_pipeline():
    r = quotver.verify(scenario("f2intro"))
    assert r.passed
    assert r.verdict == "terminal"


def test_mutated_twin_fails_at_expansion():
    r = quotver.verify(scenario("f3.mut"))
    assert not r.passed
    assert r.exit_code == 1
    first = next(s for s in r.steps if s.status == "fail")
    assert first.id == "expansion:W0.I(w1)"


def test_report_json_is_deterministic():
    a = quotver.verify(scenario("f3")).json()
    b = quotver.verify(scenario("f3")).json()
    assert a == b
    assert '"schema": "quotver.report/1"' in a


def test_chart_filter_skips_other_charts():
    r = quotver.verify(scenario("z2"), chart="U0")
    statuses = {s.status for s in r.steps}
    assert "skipped" in statuses
    assert "fail" not in statuses


def test_reid_tai():
    assert quotver.reid_tai(5, [2, 3, 4]) == ("terminal", [9, 8, 7, 6])
    assert quotver.reid_tai(3, [1, 1, 1])[0] == "canonical"
    with pytest.raises(ValueError):
        quotver.reid_tai(4, [1, 2, 0])


def test_reid_tai_pair():
    ok, reason, sums = quotver.reid_tai_pair(3, [1, 1, 1], [0, 0, 0])
    assert not ok
    ok, reason, sums = quotver.reid_tai_pair(5, [1, 2], [Fraction(-3), "-2"])
    assert ok, reason
    assert sums == ["10", "20", "15", "25"]
    ok, reason, _ = quotver.reid_tai_pair(3, [1, 1, 1], ["1/2", "1/2", 0])
    assert not ok and "c_1 + c_2" in reason


def test_equivalent_types():
    assert quotver.equivalent_types(5, [-2, 2, -2], [1, 4, 1])
    assert not quotver.equivalent_types(3, [1, 1, 1], [1, 1, 2])


def test_chart_action():
    charts = {c.name: c for c in quotver.charts(scenario("z2"))}
    root = charts["Y"]
    assert root.coords == ["x", "y", "e2"]
    assert root.equal(root.I("x"), "(1-x^2)/x")
    assert root.equal(root.trace("e2 - 1"), "0")
    assert root.check_order()
    u0 = charts["U0"]
    assert u0.stage == 1
    assert "E0" in u0.divisors


def test_input_errors():
    with pytest.raises(quotver.InputError):
        quotver.verify(str(SCENARIOS / "missing.json"))
    root = quotver.charts(scenario("z2"))[0]
    with pytest.raises(quotver.ParseError):
        root.I("x +* y")


def test_explain_and_summary():
    text = quotver.explain(scenario("z2"), "ramification:E0")
    assert text is not None and "ramification" in text
    assert quotver.explain(scenario("z2"), "no:such") is None
    s = quotver.summary(scenario("z5.mut"))
    assert s["base"] == "z5.json"
