import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from manetcap.lp import LinearProgram, LPFormatError, dumps, loads, read_lp, write_lp
from manetcap.solver import (
    INFEASIBLE,
    OPTIMAL,
    UNBOUNDED,
    CertificationError,
    Solution,
    solve,
    verify,
)

from oracles import random_lp, vertex_enumeration_max


def tiny():
    lp = LinearProgram(["x", "y"])
    lp.add("c1", {"x": 1, "y": 2}, "<=", 4)
    lp.add("c2", {"x": 3, "y": 1}, "<=", 6)
    lp.objective = {"x": 1, "y": 1}
    return lp


def oracle(lp):
    c, a_ub, b_ub, a_eq, b_eq = lp.matrices()
    return vertex_enumeration_max(c, a_ub.toarray(), b_ub, a_eq.toarray(), b_eq)


def test_tiny_optimum():
    sol = solve(tiny(), method="simplex")
    assert sol.status == OPTIMAL
    assert sol.objective == pytest.approx(2.8)
    assert sol.values["x"] == pytest.approx(1.6) and sol.values["y"] == pytest.approx(1.2)
    assert verify(tiny(), sol).ok


@pytest.mark.parametrize("method", ["simplex", "highs"])
def test_infeasible_and_unbounded(method):
    lp = LinearProgram(["x"])
    lp.add("lo", {"x": 1}, ">=", 2)
    lp.add("hi", {"x": 1}, "<=", 1)
    lp.objective = {"x": 1}
    assert solve(lp, method=method).status == INFEASIBLE
    free = LinearProgram(["x", "y"])
    free.add("c", {"x": 1, "y": -1}, "<=", 1)
    free.objective = {"x": 1}
    assert solve(free, method=method).status == UNBOUNDED


def test_redundant_equalities():
    lp = LinearProgram(["x", "y"])
    lp.add("e1", {"x": 1, "y": 1}, "=", 1)
    lp.add("e2", {"x": 2, "y": 2}, "=", 2)
    lp.objective = {"x": 2, "y": 1}
    sol = solve(lp, method="simplex")
    assert sol.status == OPTIMAL and sol.objective == pytest.approx(2)


def test_degenerate_cycling_example():
    # Beale's example cycles under naive Dantzig pricing with lowest-index leaving rule
    lp = LinearProgram(["x4", "x5", "x6", "x7"])
    lp.add("a", {"x4": 0.25, "x5": -60, "x6": -0.04, "x7": 9}, "<=", 0)
    lp.add("b", {"x4": 0.5, "x5": -90, "x6": -0.02, "x7": 3}, "<=", 0)
    lp.add("c", {"x6": 1}, "<=", 1)
    lp.objective = {"x4": 0.75, "x5": -150, "x6": 0.02, "x7": -6}
    sol = solve(lp, method="simplex")
    assert sol.status == OPTIMAL
    assert sol.objective == pytest.approx(0.05)


def test_iteration_limit():
    lp = tiny()
    assert solve(lp, method="simplex", max_iter=0).status == "iteration-limit"


def test_unknown_method():
    with pytest.raises(ValueError):
        solve(tiny(), method="interior")


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 8))
def test_simplex_matches_vertex_enumeration(seed, n):
    lp = random_lp(np.random.default_rng(seed), n)
    ref = oracle(lp)
    sol = solve(lp, method="simplex")
    assert sol.status == OPTIMAL
    assert sol.objective == pytest.approx(ref, abs=1e-7)
    assert verify(lp, sol).max_violation <= 1e-9


def test_engines_agree():
    rng = np.random.default_rng(0)
    for _ in range(20):
        lp = random_lp(rng, 6)
        a, b = solve(lp, method="simplex"), solve(lp, method="highs")
        assert a.objective == pytest.approx(b.objective, abs=1e-8)


def test_scaling_objective_scales_optimum():
    lp = random_lp(np.random.default_rng(3), 5)
    base = solve(lp).objective
    for k in (0.5, 3.0, 1e3):
        assert solve(lp.scaled_objective(k)).objective == pytest.approx(k * base, rel=1e-9, abs=1e-12)


def test_verify_names_violated_rows():
    lp = tiny()
    bad = Solution(OPTIMAL, {"x": 3.0, "y": 2.0}, 5.0)
    with pytest.raises(CertificationError, match="c1") as info:
        verify(lp, bad)
    assert {name for name, _ in info.value.certificate.violated} == {"c1", "c2"}
    cert = verify(lp, Solution(OPTIMAL, {"x": -1.0, "y": 0.0}, -1.0), strict=False)
    assert cert.worst == "nonneg:x"
    with pytest.raises(ValueError):
        verify(lp, Solution(INFEASIBLE))


def test_undeclared_variable_rejected():
    lp = LinearProgram(["x"])
    with pytest.raises(KeyError):
        lp.add("r", {"y": 1}, "<=", 1)


def test_lp_text_roundtrip(tmp_path):
    lp = random_lp(np.random.default_rng(8), 7)
    lp.add("tiny_coeffs", {"x0": 1e-12, "x1": -3.5e7}, ">=", -1e-9)
    path = tmp_path / "m.lp"
    write_lp(lp, path)
    back = read_lp(path)
    assert back.variables == lp.variables
    assert [c.name for c in back.constraints] == [c.name for c in lp.constraints]
    for a, b in zip(back.constraints, lp.constraints):
        assert a.coeffs == b.coeffs and a.rhs == b.rhs and a.sense == b.sense
    assert back.objective == {v: a for v, a in lp.objective.items() if a}
    assert solve(back).objective == pytest.approx(solve(lp).objective, abs=1e-9)


def test_lp_text_shape():
    text = dumps(tiny())
    assert text.splitlines()[1:4] == ["Maximize", " obj: + 1.0 x + 1.0 y", "Subject To"]
    assert " c1: + 1.0 x + 2.0 y <= 4.0" in text
    assert text.rstrip().endswith("End")


def test_long_rows_wrap_and_parse():
    lp = LinearProgram([f"v{i}" for i in range(200)])
    lp.add("wide", {v: 1.0 for v in lp.variables}, "<=", 1)
    lp.objective = {"v0": 1.0}
    text = dumps(lp)
    assert max(len(line) for line in text.splitlines()) <= 220
    assert loads(text).constraint("wide").coeffs == lp.constraint("wide").coeffs


def test_lp_reader_accepts_hand_written_input():
    text = """\\ hand written
Maximize
 obj: 2 x + y
Subject To
 c1: x + y <= 4
 c2: - x + 2.5e-1 y >= -3
Bounds
 x >= 0
 y >= 0
End
"""
    lp = loads(text)
    assert lp.constraint("c2").coeffs == {"x": -1.0, "y": 0.25}
    assert solve(lp).objective == pytest.approx(7.2)


@pytest.mark.parametrize(
    "text",
    [
        "Minimize\n obj: x\nEnd\n",
        "Maximize\n obj: x\nSubject To\n x <= 1\nEnd\n",
        "obj: x\n",
        "Maximize\n obj: x\nSubject To\n c: x <= 1\nBounds\n x <= 3\nEnd\n",
    ],
)
def test_lp_reader_errors(text):
    with pytest.raises(LPFormatError):
        loads(text)
