import itertools
import random

import pytest
from hypothesis import given, settings

from loopchart.chart import Transition, chart_of, erase_markings, labeled_onechart_of, make_chart, restrict_reachable
from loopchart.lee import (
    EliminationRun, EliminationStep, LoopPreconditionError, SearchBudgetExceeded, check_loop_chart, eliminate, enumerate_runs,
    apply_run, has_infinite_path, is_loop_chart, lee, llee_elimination_strategy, llee_loop_subchart, loop_subchart,
    loop_subcharts, run_to_labeling, validate_run, verify_llee, verify_llee_alt,
)
from loopchart.bisim import verify_theorem_5_14
from loopchart.corpus import mutate
from oracles import is_loop_subchart, lee_by_exhaustion
from strategies import star_exprs

E, E1, E2 = "(a*.b*)*", "1.a*.b*.(a*.b*)*", "1.b*.(a*.b*)*"
SE1, SE2, SE1p = "a*.b* * (a*.b*)*", "b* * (a*.b*)*", "((1 * a*).b*) * (a*.b*)*"


def t(src, label, dst, marking=0):
    return Transition(src, label, marking, dst)


def triples(G):
    return {(x.src, x.label, x.dst) for x in G.transitions}


def self_loop(marking=0):
    return make_chart("v", [("v", "a", marking, "v")], kind="labeled" if marking else "chart")


def test_loop_chart_examples(g0):
    assert check_loop_chart(self_loop()) == []
    two = make_chart("v", [("v", "a", "w"), ("w", "a", "v")], terminating=["v", "w"])
    assert [p.condition for p in check_loop_chart(two)] == ["L3"]
    assert "L2" in [p.condition for p in check_loop_chart(chart_of(g0))]
    line = make_chart("v", [("v", "a", "w")])
    assert [p.condition for p in check_loop_chart(line)] == ["L1"]


def test_loop_subchart_examples(e):
    C = chart_of(e)
    inner = loop_subchart(C, E1, {t(E1, "a", E1)})
    assert inner.vertices == (E1,) and is_loop_chart(inner)
    assert inner.terminating == {E1}
    with pytest.raises(LoopPreconditionError):
        loop_subchart(C, E1, set())
    with pytest.raises(LoopPreconditionError):
        loop_subchart(C, E1, {t(E, "a", E1)})


def test_elimination_run_on_e(e):
    C = chart_of(e)
    C2 = eliminate(eliminate(C, E1, {t(E1, "a", E1)}), E2, {t(E2, "b", E2)})
    assert triples(C2) == {(E, "a", E1), (E, "b", E2), (E1, "b", E2), (E2, "a", E1)}
    assert has_infinite_path(C2)
    # the remaining cycle through e1 and e2 reaches the terminating e2: no loop subchart left
    sub = loop_subchart(C2, E1, {t(E1, "b", E2)})
    assert "L3" in [p.condition for p in check_loop_chart(sub)]
    assert list(loop_subcharts(C2)) == []
    with pytest.raises(LoopPreconditionError):
        eliminate(C2, E1, {t(E1, "b", E2)})


def test_eliminate_simple():
    G = eliminate(self_loop(), "v", {t("v", "a", "v")})
    assert G.vertices == ("v",) and not G.transitions


def test_lee_verdicts(e, f, g0):
    assert not lee(chart_of(e)).holds
    assert not lee(chart_of(f)).holds
    res = lee(chart_of(g0))
    assert res.holds
    assert validate_run(chart_of(g0), res.run) is None
    assert not has_infinite_path(res.run.residual)


def test_lee_budget(e):
    with pytest.raises(SearchBudgetExceeded):
        lee(chart_of(e), budget=1)


def test_lee_out_degree_guard():
    many = make_chart("v", [("v", f"a{i}", "v") for i in range(17)])
    with pytest.raises(ValueError):
        lee(many)


def test_runs_on_g0(g0):
    C = chart_of(g0)
    runs = enumerate_runs(C)
    assert len(runs) >= 3
    witnesses = 0
    for run in runs:
        assert validate_run(C, run) is None
        H = run_to_labeling(C, run)
        ok = verify_llee(H)
        assert bool(ok) == bool(verify_llee_alt(H))
        witnesses += bool(ok)
        if ok:
            again = llee_elimination_strategy(H)
            assert validate_run(C, again) is None
    assert witnesses >= 1


def test_partial_run_labeling_is_rejected(e):
    C = chart_of(e)
    steps = (EliminationStep(E1, frozenset({t(E1, "a", E1)})), EliminationStep(E2, frozenset({t(E2, "b", E2)})))
    run = EliminationRun(steps, apply_run(C, steps))
    H = run_to_labeling(C, run)
    verdict = verify_llee(H)
    assert not verdict and verdict.condition == "W1"
    assert not verify_llee_alt(H)
    assert validate_run(C, run) is not None


def test_run_json_round_trip(g0):
    run = lee(chart_of(g0)).run
    d = run.to_dict()
    assert list(d) == ["steps", "residual"]
    assert EliminationRun.from_dict(d) == run


def test_empty_run_on_acyclic_chart():
    G = make_chart("p", [("p", "a", "q")])
    run = lee(G).run
    assert run.steps == ()
    assert all(x.marking == 0 for x in run_to_labeling(G, run).transitions)


def test_llee_loop_subcharts_of_e(e):
    L = labeled_onechart_of(e)
    outer = llee_loop_subchart(L, E, 2)
    assert set(outer.vertices) == set(L.vertices)
    assert is_loop_chart(outer)
    inner = llee_loop_subchart(L, SE1, 1)
    assert is_loop_chart(inner)
    assert E not in inner.vertices
    with pytest.raises(LoopPreconditionError):
        llee_loop_subchart(L, SE1p, 1)


def test_llee_witnesses(e, f, g0):
    for x in (e, f, g0):
        L = labeled_onechart_of(x)
        assert verify_llee(L)
        assert verify_llee_alt(L)
    acyclic = make_chart("p", [("p", "a", "q"), ("q", "b", "r")], kind="labeled")
    assert verify_llee(acyclic) and verify_llee_alt(acyclic)


def test_mutation_to_level_nine_fails(e):
    L = labeled_onechart_of(e)
    body = next(x for x in sorted(L.transitions) if x.marking == 0 and x.label != "1")
    M = L.replace(transitions=(L.transitions - {body}) | {body._replace(marking=9)})
    assert not verify_llee(M)
    assert not verify_llee_alt(M)


def test_strategy(e):
    L = labeled_onechart_of(e)
    run = llee_elimination_strategy(L)
    assert [s.vertex for s in run.steps] == [SE1, SE2, E]
    assert validate_run(L, run) is None
    one = llee_elimination_strategy(self_loop(1))
    assert len(one.steps) == 1
    with pytest.raises(LoopPreconditionError):
        llee_elimination_strategy(self_loop(0))


def test_negative_control(e):
    assert not lee(chart_of(e)).holds
    assert verify_theorem_5_14(e)


@given(star_exprs)
@settings(max_examples=60, deadline=None)
def test_lee_against_exhaustive_oracle(x):
    C = chart_of(x)
    assert lee(C).holds == lee_by_exhaustion(restrict_reachable(C))


@given(star_exprs)
@settings(max_examples=60, deadline=None)
def test_loop_subcharts_against_oracle(x):
    C = chart_of(x)
    found = set(loop_subcharts(C))
    for v in C.vertices:
        out = C.out(v)
        if len(out) > 6:
            continue
        for k in range(1, len(out) + 1):
            for U in itertools.combinations(out, k):
                assert ((v, frozenset(U)) in found) == is_loop_subchart(C, v, U)


@given(star_exprs)
@settings(max_examples=60, deadline=None)
def test_elimination_steps_shrink(x):
    C = restrict_reachable(chart_of(x))
    for v, U in list(loop_subcharts(C))[:5]:
        D = eliminate(C, v, U)
        assert D.start == C.start
        assert D.transitions < C.transitions


@given(star_exprs)
@settings(max_examples=60, deadline=None)
def test_recorded_runs_and_mutations_agree(x):
    C = chart_of(x)
    for run in enumerate_runs(C, limit=5):
        H = run_to_labeling(C, run)
        assert bool(verify_llee(H)) == bool(verify_llee_alt(H))
    L = labeled_onechart_of(x)
    if L.transitions:
        rng = random.Random(0)
        for _ in range(10):
            M = mutate(L, rng)
            assert bool(verify_llee(M)) == bool(verify_llee_alt(M))
            if verify_llee(M):
                assert lee(erase_markings(M)).holds
