import json
import math

import pytest

import invsub


def test_catalog_lists_the_examples():
    ids = [i for i, _ in invsub.examples()]
    assert len(ids) == 15
    for expected in ("EX2", "EX6", "EX3-IVP1", "EX11"):
        assert expected in ids


def test_run_produces_a_passing_report():
    rep = invsub.run_report("EX2")
    assert rep["schema"] == "invsub-report/1"
    assert rep["route"] == "ReducedSymbolic"
    assert rep["pass"] is True
    assert rep["max_abs"] <= 1e-12
    assert "t^" in rep["solution"]


def test_run_accepts_overrides():
    rep = invsub.run_report("EX3c", alpha=0.4, beta=1.9, oracle=False)
    assert rep["params"]["alpha"] == 0.4
    assert rep["params"]["beta"] == 1.9
    assert rep["pass"] is True


def test_solution_renders_text():
    s = invsub.solution("EX6")
    assert s.startswith("f(x,t) = ")
    assert "ML[" in s


def test_check_problem_flags_the_square():
    problem = {
        "schema": "invsub-problem/1",
        "time_op": {"mode": "A", "alpha": 0.5, "lambdas": [1]},
        "operator": {"node": "IntPow", "child": {"node": "F"}, "exponent": 2},
        "basis": [{"power": 0}, {"power": 1}],
    }
    out = invsub.check_problem(json.dumps(problem))
    assert out["invariant"] is False
    assert out["offending_keys"] == ["x^2"]


def test_special_functions():
    assert invsub.gamma(5.0) == pytest.approx(24.0)
    assert invsub.mittag_leffler(1.0, 1.0, 1.0) == pytest.approx(math.e)
    assert invsub.mittag_leffler(0.5, 1.0, 0.0) == pytest.approx(1.0)


def test_errors_surface_as_exceptions():
    with pytest.raises(invsub.InvsubError):
        invsub.run("EX999")
    with pytest.raises(invsub.InvsubError):
        invsub.run("EX2", alpha=0.5)  # order that lands on a Gamma pole
