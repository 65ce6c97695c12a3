from hypothesis import given, settings

from loopchart.chart import onechart_of
from loopchart.semantics import (
    BODY, EMPTY, normed, normed_plus, normed_plus_by_paths, step_T, step_That, step_Tstar,
    terminates_T, terminates_Tstar,
)
from loopchart.syntax import Act, Dot, DotC, Lift, One, Plus, Star, StarC, Zero, parse_star_expr, size, star_height
from oracles import normed_by_search
from strategies import star_exprs

a, b = Act("a"), Act("b")
E = parse_star_expr("(a*.b*)*")
# the four stacked derivatives of E
E1p = StarC(DotC(StarC(Lift(One()), Star(a)), Star(b)), E)
E1 = StarC(Lift(Dot(Star(a), Star(b))), E)
E2 = StarC(Lift(Star(b)), E)
E2p = StarC(StarC(Lift(One()), Star(b)), E)


def test_termination_plain():
    assert terminates_T(One())
    assert terminates_T(E)
    assert not terminates_T(parse_star_expr("a.b*"))
    assert not terminates_T(Zero())
    assert terminates_T(parse_star_expr("0+1"))


def test_steps_plain():
    assert step_T(a) == {("a", One())}
    assert step_T(Zero()) == frozenset()
    assert step_T(E) == {
        ("a", Dot(Dot(Dot(One(), Star(a)), Star(b)), E)),
        ("b", Dot(Dot(One(), Star(b)), E)),
    }


def test_steps_stacked():
    assert terminates_Tstar(Lift(E))
    assert not terminates_Tstar(E2p)
    assert not terminates_Tstar(Lift(Zero()))
    assert step_Tstar(Lift(E)) == {("a", E1p), ("b", E2p)}
    assert step_Tstar(E2p) == {(EMPTY, E2)}
    assert step_Tstar(E1p) == {(EMPTY, E1)}
    assert step_Tstar(E1) == {(EMPTY, Lift(E)), ("a", E1p), ("b", E2p)}
    assert step_Tstar(Lift(One())) == frozenset()


def test_marked_steps():
    assert step_That(Lift(E)) == {("a", 2, E1p), ("b", 2, E2p)}
    assert step_That(E2p) == {(EMPTY, BODY, E2)}
    # the inner iterations a* and b* enter at level 1 from E1 and E2
    assert step_That(E1) == {(EMPTY, BODY, Lift(E)), ("a", 1, E1p), ("b", BODY, E2p)}
    assert step_That(E2) == {(EMPTY, BODY, Lift(E)), ("b", 1, E2p)}
    assert step_That(Lift(Star(Zero()))) == frozenset()


def test_star_of_non_normed_body_is_body_step():
    # a.0 never terminates, so a* -style entries are not produced for (a.0)*
    assert {m for _, m, _ in step_That(Lift(parse_star_expr("(a.0)*")))} == {BODY}
    # + and the right product rule force body markings
    assert {m for _, m, _ in step_That(Lift(parse_star_expr("a*+b")))} == {BODY}
    assert {m for _, m, _ in step_That(Lift(parse_star_expr("1.a*")))} == {BODY}
    assert {(l, m) for l, m, _ in step_That(Lift(parse_star_expr("a*.b")))} == {("a", 1), ("b", BODY)}


def test_normed():
    assert normed(Lift(One()))
    assert not normed(Lift(Zero()))
    assert normed(Lift(parse_star_expr("a.b*")))
    assert not normed(Lift(parse_star_expr("a.0")))
    assert not normed_plus(Lift(One()))
    assert normed_plus(Lift(a))
    assert normed_plus(Lift(Dot(Star(a), Star(b))))


@given(star_exprs)
@settings(max_examples=150, deadline=None)
def test_marking_erasure(e):
    for v in onechart_of(e).payload.values():
        assert {(l, F) for l, _, F in step_That(v)} == step_Tstar(v)


@given(star_exprs)
@settings(max_examples=150, deadline=None)
def test_empty_steps_shrink_and_are_body(e):
    assert all(l != EMPTY for l, _ in step_Tstar(Lift(e)))
    for v in onechart_of(e).payload.values():
        for l, m, F in step_That(v):
            if l == EMPTY:
                assert m == BODY
                assert size(F) < size(v)


@given(star_exprs)
@settings(max_examples=150, deadline=None)
def test_normed_against_search(e):
    for v in onechart_of(e).payload.values():
        assert normed(v) == normed_by_search(v)
        if terminates_Tstar(v):
            assert normed(v)
        if normed_plus(v):
            assert normed(v)
        assert normed_plus(v) == normed_plus_by_paths(v)


@given(star_exprs)
@settings(max_examples=100, deadline=None)
def test_star_height_never_grows(e):
    for v in onechart_of(e).payload.values():
        for _, F in step_Tstar(v):
            assert star_height(F) <= star_height(v)


def test_plus_of_same_derivative_collapses():
    assert step_T(Plus(a, a)) == {("a", One())}
