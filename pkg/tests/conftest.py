import pytest

from loopchart.syntax import parse_star_expr

E_TEXT = "(a*.b*)*"
G0_TEXT = "((1.a).(c.a+a.(b+b.a))*).0"
F_TEXT = "(a1.(1+b1.0)+a2.(1+b2.0)+a3.(1+b3.0))*.0"

# acceptance criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE = {}


@pytest.fixture
def e():
    return parse_star_expr(E_TEXT)


@pytest.fixture
def g0():
    return parse_star_expr(G0_TEXT)


@pytest.fixture
def f():
    return parse_star_expr(F_TEXT)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
