"""Derivation engines for plain, stacked, and marking-labeled star expressions.

Each engine is structural recursion over the expression; rule systems are
syntax directed, so no generic inference machinery is needed. Transition
sets are returned as frozensets (duplicate derivations collapse).

Step labels are strings: an action symbol, or ``EMPTY`` (``"1"``) for an empty
step. Markings are ints: ``BODY`` (0) or a loop level ``n >= 1``.
"""

from __future__ import annotations

from collections import deque
from typing import Dict, FrozenSet, Tuple

from .syntax import (
    Act, Dot, DotC, Lift, One, Plus, Star, StarC,
    StackedExpr, StarExpr, dotc, starc, star_height,
)

EMPTY = "1"
BODY = 0

Step = Tuple[str, StackedExpr]
MarkedStep = Tuple[str, int, StackedExpr]


# Plain process semantics.

def terminates_T(e: StarExpr) -> bool:
    t = type(e)
    if t is One or t is Star:
        return True
    if t is Plus:
        return terminates_T(e.left) or terminates_T(e.right)
    if t is Dot:
        return terminates_T(e.left) and terminates_T(e.right)
    return False


def step_T(e: StarExpr) -> FrozenSet[Tuple[str, StarExpr]]:
    t = type(e)
    if t is Act:
        return frozenset({(e.symbol, One())})
    if t is Plus:
        return step_T(e.left) | step_T(e.right)
    if t is Dot:
        out = {(a, Dot(e1, e.right)) for a, e1 in step_T(e.left)}
        if terminates_T(e.left):
            out |= step_T(e.right)
        return frozenset(out)
    if t is Star:
        return frozenset((a, Dot(e1, e)) for a, e1 in step_T(e.body))
    return frozenset()


# Stacked semantics with empty steps.

def terminates_Tstar(E: StackedExpr) -> bool:
    """Only plain expressions terminate; `` * `` and stacked ``.`` never do."""
    return isinstance(E, Lift) and terminates_T(E.expr)


def _step_plain_star(e: StarExpr) -> FrozenSet[Step]:
    # steps of a plain expression under the stacked rules; never empty steps
    t = type(e)
    if t is Act:
        return frozenset({(e.symbol, Lift(One()))})
    if t is Plus:
        return _step_plain_star(e.left) | _step_plain_star(e.right)
    if t is Dot:
        out = {(a, dotc(E1, e.right)) for a, E1 in _step_plain_star(e.left)}
        if terminates_T(e.left):
            out |= _step_plain_star(e.right)
        return frozenset(out)
    if t is Star:
        return frozenset((a, starc(E1, e)) for a, E1 in _step_plain_star(e.body))
    return frozenset()


def step_Tstar(E: StackedExpr) -> FrozenSet[Step]:
    t = type(E)
    if t is Lift:
        return _step_plain_star(E.expr)
    if t is DotC:
        return frozenset((a, dotc(E1, E.right)) for a, E1 in step_Tstar(E.left))
    if t is StarC:
        out = {(a, starc(E1, E.right)) for a, E1 in step_Tstar(E.left)}
        if isinstance(E.left, Lift) and terminates_T(E.left.expr):
            out.add((EMPTY, Lift(E.right)))
        return frozenset(out)
    raise TypeError(f"not a stacked expression: {E!r}")


# Normedness.

_normed_cache: Dict[StackedExpr, bool] = {}


def _successors(E: StackedExpr):
    return [E1 for _, E1 in step_Tstar(E)]


def normed(E: StackedExpr) -> bool:
    """Some terminating expression is reachable (zero or more steps, any labels)."""
    hit = _normed_cache.get(E)
    if hit is not None:
        return hit
    # explore the whole closure once and settle every member in one pass
    seen = {E}
    order = [E]
    edges = {}
    queue = deque([E])
    while queue:
        F = queue.popleft()
        succ = [] if F in _normed_cache else _successors(F)
        edges[F] = succ
        for G in succ:
            if G not in seen:
                seen.add(G)
                order.append(G)
                queue.append(G)
    reverse: Dict[StackedExpr, list] = {F: [] for F in order}
    for F, succ in edges.items():
        for G in succ:
            reverse[G].append(F)
    good = {F for F in order if _normed_cache.get(F, False) or terminates_Tstar(F)}
    queue = deque(good)
    while queue:
        G = queue.popleft()
        for F in reverse[G]:
            if F not in good:
                good.add(F)
                queue.append(F)
    for F in order:
        if F not in _normed_cache:
            _normed_cache[F] = F in good
    return _normed_cache[E]


def normed_plus(E: StackedExpr) -> bool:
    """Some single step leads to a normed expression."""
    return any(normed(E1) for _, E1 in step_Tstar(E))


def normed_plus_by_paths(E: StackedExpr) -> bool:
    """Positive-length induced-transition path to an induced-terminating expression.

    Independent of `normed_plus`: builds induced steps (empty-step prefix, then
    one proper step) and searches them directly.
    """
    def empty_closure(F):
        seen = {F}
        stack = [F]
        while stack:
            G = stack.pop()
            for lab, H in step_Tstar(G):
                if lab == EMPTY and H not in seen:
                    seen.add(H)
                    stack.append(H)
        return seen

    def induced_steps(F):
        return {H for G in empty_closure(F) for lab, H in step_Tstar(G) if lab != EMPTY}

    def induced_term(F):
        return any(terminates_Tstar(G) for G in empty_closure(F))

    frontier = list(induced_steps(E))
    seen = set(frontier)
    while frontier:
        F = frontier.pop()
        if induced_term(F):
            return True
        for H in induced_steps(F):
            if H not in seen:
                seen.add(H)
                frontier.append(H)
    return False


def _plain_normed_plus(e: StarExpr) -> bool:
    return normed_plus(Lift(e))


# Marking-labeled stacked semantics.

def _step_plain_hat(e: StarExpr) -> FrozenSet[MarkedStep]:
    t = type(e)
    if t is Act:
        return frozenset({(e.symbol, BODY, Lift(One()))})
    if t is Plus:
        return frozenset((a, BODY, E1) for a, _, E1 in _step_plain_hat(e.left) | _step_plain_hat(e.right))
    if t is Dot:
        out = {(a, m, dotc(E1, e.right)) for a, m, E1 in _step_plain_hat(e.left)}
        if terminates_T(e.left):
            out |= {(a, BODY, E2) for a, _, E2 in _step_plain_hat(e.right)}
        return frozenset(out)
    if t is Star:
        level = star_height(e) if _plain_normed_plus(e.body) else BODY
        return frozenset((a, level, starc(E1, e)) for a, _, E1 in _step_plain_hat(e.body))
    return frozenset()


def step_That(E: StackedExpr) -> FrozenSet[MarkedStep]:
    t = type(E)
    if t is Lift:
        return _step_plain_hat(E.expr)
    if t is DotC:
        return frozenset((a, m, dotc(E1, E.right)) for a, m, E1 in step_That(E.left))
    if t is StarC:
        out = {(a, m, starc(E1, E.right)) for a, m, E1 in step_That(E.left)}
        if isinstance(E.left, Lift) and terminates_T(E.left.expr):
            out.add((EMPTY, BODY, Lift(E.right)))
        return frozenset(out)
    raise TypeError(f"not a stacked expression: {E!r}")
