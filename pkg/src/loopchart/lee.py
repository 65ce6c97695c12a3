"""Loop charts, loop elimination (LEE), recorded runs, and LLEE-witness checks.

Empty-step labels get no special treatment here: every check works on any
chart kind, which is what the 1-chart results need.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

from .semantics import EMPTY
from .chart import Chart, Transition, canonical_key, erase_markings, from_dict, reachable, restrict_reachable, to_dict

MAX_OUT_DEGREE = 16


class LoopPreconditionError(ValueError):
    pass


class SearchBudgetExceeded(RuntimeError):
    def __init__(self, explored: int):
        super().__init__(f"search budget exhausted after {explored} states")
        self.explored = explored


@dataclass(frozen=True)
class LoopViolation:
    condition: str  # "L1", "L2" or "L3"
    witness: object  # a vertex (L1, L3) or a cycle as a vertex list (L2)


@dataclass(frozen=True)
class EliminationStep:
    vertex: str
    entry: FrozenSet[Transition]


@dataclass(frozen=True)
class EliminationRun:
    steps: Tuple[EliminationStep, ...]
    residual: Chart

    def to_dict(self) -> dict:
        return {
            "steps": [
                {"vertex": s.vertex,
                 "entry": [{"src": t.src, "label": t.label, "dst": t.dst} for t in sorted(s.entry)]}
                for s in self.steps
            ],
            "residual": to_dict(self.residual),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EliminationRun":
        steps = tuple(
            EliminationStep(s["vertex"], frozenset(Transition(t["src"], t["label"], 0, t["dst"]) for t in s["entry"]))
            for s in d["steps"]
        )
        return cls(steps, from_dict(d["residual"]))


@dataclass(frozen=True)
class LeeResult:
    """Outcome of the LEE search: a witnessing run, or a definite no."""
    run: Optional[EliminationRun]
    explored: int

    @property
    def holds(self) -> bool:
        return self.run is not None


@dataclass(frozen=True)
class LLEEVerdict:
    ok: bool
    condition: Optional[str] = None
    witness: object = None

    def __bool__(self):
        return self.ok

    def to_dict(self) -> dict:
        return {"ok": self.ok, "condition": self.condition, "witness": _jsonable(self.witness)}


def _jsonable(x):
    if isinstance(x, Transition):
        return {"src": x.src, "label": x.label, "marking": x.marking, "dst": x.dst}
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


# Graph helpers.

def _adjacency(vertices, transitions) -> Dict[str, List[str]]:
    succ: Dict[str, List[str]] = {v: [] for v in vertices}
    for t in sorted(transitions):
        succ[t.src].append(t.dst)
    return succ


def find_cycle(vertices: Sequence[str], transitions) -> Optional[List[str]]:
    """A cycle ``[v0, v1, ..., v0]`` in the given edge set, or None if acyclic."""
    succ = _adjacency(vertices, transitions)
    color = {v: 0 for v in vertices}
    for root in vertices:
        if color[root]:
            continue
        path = [root]
        color[root] = 1
        stack = [iter(succ[root])]
        while stack:
            for w in stack[-1]:
                if color[w] == 1:
                    return path[path.index(w):] + [w]
                if color[w] == 0:
                    color[w] = 1
                    path.append(w)
                    stack.append(iter(succ[w]))
                    break
            else:
                color[path.pop()] = 2
                stack.pop()
    return None


def has_infinite_path(G: Chart) -> bool:
    keep = set(reachable(G))
    return find_cycle([v for v in G.vertices if v in keep],
                      [t for t in G.transitions if t.src in keep]) is not None


# Loop charts.

def check_loop_chart(G: Chart) -> List[LoopViolation]:
    keep = reachable(G)
    keep_set = set(keep)
    ts = [t for t in G.transitions if t.src in keep_set]
    violations = []
    cycle = find_cycle(keep, ts)
    if cycle is None:
        violations.append(LoopViolation("L1", G.start))
    off_start = [v for v in keep if v != G.start]
    cycle2 = find_cycle(off_start, [t for t in ts if t.src != G.start and t.dst != G.start])
    if cycle2 is not None:
        violations.append(LoopViolation("L2", cycle2))
    bad = sorted(v for v in G.terminating if v != G.start)
    if bad:
        violations.append(LoopViolation("L3", bad[0]))
    return violations


def is_loop_chart(G: Chart) -> bool:
    return not check_loop_chart(G)


def loop_subchart(G: Chart, v: str, U) -> Chart:
    """Subchart from `v` spanned by paths that enter via `U` and stop on returning to `v`."""
    U = frozenset(U)
    if not U:
        raise LoopPreconditionError("entry set must be nonempty")
    for t in U:
        if t not in G.transitions or t.src != v:
            raise LoopPreconditionError(f"{t} is not a transition of the chart from {v!r}")
    succ = G.successors()
    seen = {v}
    order = [v]
    transitions = set(U)
    queue = deque()
    for t in sorted(U):
        if t.dst not in seen:
            seen.add(t.dst)
            order.append(t.dst)
            queue.append(t.dst)
    while queue:
        u = queue.popleft()
        for t in succ[u]:
            transitions.add(t)
            if t.dst not in seen:
                seen.add(t.dst)
                order.append(t.dst)
                queue.append(t.dst)
    return G.replace(
        start=v,
        vertices=tuple(order),
        transitions=frozenset(transitions),
        terminating=G.terminating & seen,
        payload={u: G.payload[u] for u in order if u in G.payload},
    )


def eliminate(G: Chart, v: str, U) -> Chart:
    U = frozenset(U)
    sub = loop_subchart(G, v, U)
    problems = check_loop_chart(sub)
    if problems:
        raise LoopPreconditionError(f"not a loop subchart at {v!r}: {problems[0].condition}")
    return restrict_reachable(G.replace(transitions=G.transitions - U))


def _entry_candidates(G: Chart) -> Iterator[Tuple[str, FrozenSet[Transition]]]:
    succ = G.successors()
    for v in sorted(reachable(G)):
        out = succ[v]
        if len(out) > MAX_OUT_DEGREE:
            raise ValueError(f"out-degree {len(out)} of {v!r} exceeds {MAX_OUT_DEGREE}")
        for k in range(len(out), 0, -1):
            for U in itertools.combinations(out, k):
                yield v, frozenset(U)


def loop_subcharts(G: Chart) -> Iterator[Tuple[str, FrozenSet[Transition]]]:
    """Every (vertex, entry set) in the reachable part that generates a loop subchart."""
    for v, U in _entry_candidates(G):
        if is_loop_chart(loop_subchart(G, v, U)):
            yield v, U


def lee(G: Chart, budget: int = 100_000) -> LeeResult:
    """Search for an elimination run that ends without infinite paths.

    Depth-first over (vertex, entry set) choices with memoized failures; a
    ``None`` run is a definite no, reported only after the search space is
    exhausted. Raises `SearchBudgetExceeded` past `budget` explored states.
    """
    G = restrict_reachable(erase_markings(G) if G.kind == "labeled" else G)
    failed = set()
    explored = 0

    def search(H: Chart) -> Optional[List[EliminationStep]]:
        nonlocal explored
        key = canonical_key(H)
        if key in failed:
            return None
        explored += 1
        if explored > budget:
            raise SearchBudgetExceeded(explored)
        if not has_infinite_path(H):
            return []
        for v, U in loop_subcharts(H):
            rest = search(restrict_reachable(H.replace(transitions=H.transitions - U)))
            if rest is not None:
                return [EliminationStep(v, U)] + rest
        failed.add(key)
        return None

    steps = search(G)
    if steps is None:
        return LeeResult(None, explored)
    return LeeResult(EliminationRun(tuple(steps), apply_run(G, steps)), explored)


def enumerate_runs(G: Chart, limit: int = 10_000) -> List[EliminationRun]:
    """All successful elimination runs (up to `limit`), without memoization."""
    G = restrict_reachable(G)
    runs: List[EliminationRun] = []

    def walk(H: Chart, steps: List[EliminationStep]):
        if len(runs) >= limit:
            return
        if not has_infinite_path(H):
            runs.append(EliminationRun(tuple(steps), H))
            return
        for v, U in loop_subcharts(H):
            walk(restrict_reachable(H.replace(transitions=H.transitions - U)), steps + [EliminationStep(v, U)])

    walk(G, [])
    return runs


def apply_run(G: Chart, steps) -> Chart:
    """Replay steps (validating each) and return the residual chart."""
    H = restrict_reachable(G)
    for s in steps:
        H = eliminate(H, s.vertex, s.entry)
    return H


def validate_run(G: Chart, run: EliminationRun) -> Optional[str]:
    """None if `run` is a valid successful run on `G`, else a reason."""
    erased = G if G.kind != "labeled" else erase_markings(G)
    try:
        H = apply_run(erased, run.steps)
    except LoopPreconditionError as exc:
        return str(exc)
    if has_infinite_path(H):
        return "residual chart still has an infinite path"
    return None


def run_to_labeling(G: Chart, run: EliminationRun) -> Chart:
    """Record a run in `G`: step-k entry transitions get marking k, all others 0."""
    H = restrict_reachable(G)
    marking: Dict[Transition, int] = {}
    for k, s in enumerate(run.steps, start=1):
        try:
            H = eliminate(H, s.vertex, s.entry)
        except LoopPreconditionError as exc:
            raise LoopPreconditionError(f"invalid run at step {k}: {exc}") from exc
        for t in s.entry:
            marking[t._replace(marking=0)] = k
    return G.replace(kind="labeled",
                     transitions=frozenset(t._replace(marking=marking.get(t._replace(marking=0), 0))
                                           for t in G.transitions))


# LLEE-witnesses.

def entry_identifiers(H: Chart) -> List[Tuple[str, int]]:
    return sorted({(t.src, t.marking) for t in H.transitions if t.marking > 0},
                  key=lambda p: (p[1], H.vertices.index(p[0]), p[0]))


def llee_loop_subchart(H: Chart, v: str, n: int) -> Chart:
    """Subchart spanned by paths that enter by a level-`n` transition from `v`,
    continue on body transitions only, and stop on returning to `v`."""
    if n < 1:
        raise LoopPreconditionError("loop levels start at 1")
    entries = [t for t in H.out(v) if t.marking == n]
    if not entries:
        raise LoopPreconditionError(f"({v!r}, {n}) is not an entry identifier")
    body: Dict[str, List[Transition]] = {u: [] for u in H.vertices}
    for t in sorted(H.transitions):
        if t.marking == 0:
            body[t.src].append(t)
    seen = {v}
    order = [v]
    transitions = set(entries)
    queue = deque()
    for t in entries:
        if t.dst not in seen:
            seen.add(t.dst)
            order.append(t.dst)
            queue.append(t.dst)
    while queue:
        u = queue.popleft()
        for t in body[u]:
            transitions.add(t)
            if t.dst not in seen:
                seen.add(t.dst)
                order.append(t.dst)
                queue.append(t.dst)
    kind = "onechart" if any(t.label == EMPTY for t in transitions) else "chart"
    return Chart(kind=kind, start=v, vertices=tuple(order),
                 transitions=frozenset(t._replace(marking=0) for t in transitions),
                 terminating=H.terminating & seen,
                 payload={u: H.payload[u] for u in order if u in H.payload})


def verify_llee(H: Chart) -> LLEEVerdict:
    """Check the three LLEE-witness conditions directly on loop subcharts."""
    body = [t for t in H.transitions if t.marking == 0]
    cycle = find_cycle(list(H.vertices), body)
    if cycle is not None:
        return LLEEVerdict(False, "W1", {"cycle": cycle})
    for v, n in entry_identifiers(H):
        sub = llee_loop_subchart(H, v, n)
        problems = check_loop_chart(sub)
        if problems:
            p = problems[0]
            return LLEEVerdict(False, "W2", {"entry": [v, n], "loop_condition": p.condition, "at": p.witness})
        for t in sorted(H.transitions):
            if t.marking > 0 and t.src != v and t.src in sub.vertices and t.marking >= n:
                return LLEEVerdict(False, "W3", {"entry": [v, n], "inner": t})
    return LLEEVerdict(True)


def verify_llee_alt(H: Chart) -> LLEEVerdict:
    """Same verdict as `verify_llee`, through the four path conditions.

    For each entry transition ``v -[n]-> w`` the region is every vertex reached
    from ``w`` by body steps whose targets avoid ``v``.
    """
    succ: Dict[str, List[Transition]] = {u: [] for u in H.vertices}
    for t in sorted(H.transitions):
        succ[t.src].append(t)

    # LLEE-2: body steps terminate (Kahn's algorithm on the body subgraph)
    indeg = {u: 0 for u in H.vertices}
    for t in H.transitions:
        if t.marking == 0:
            indeg[t.dst] += 1
    ready = deque(u for u in H.vertices if indeg[u] == 0)
    removed = 0
    while ready:
        u = ready.popleft()
        removed += 1
        for t in succ[u]:
            if t.marking == 0:
                indeg[t.dst] -= 1
                if indeg[t.dst] == 0:
                    ready.append(t.dst)
    if removed != len(H.vertices):
        stuck = sorted(u for u in H.vertices if indeg[u] > 0)
        return LLEEVerdict(False, "LLEE-2", {"on_body_cycle": stuck[0]})

    def body_region(v, w):
        # vertices reachable from w via body steps with targets != v (w itself included)
        if w == v:
            return set()
        region = {w}
        stack = [w]
        while stack:
            u = stack.pop()
            for t in succ[u]:
                if t.marking == 0 and t.dst != v and t.dst not in region:
                    region.add(t.dst)
                    stack.append(t.dst)
        return region

    def body_returns(v, w):
        if w == v:
            return True
        seen = {w}
        stack = [w]
        while stack:
            u = stack.pop()
            for t in succ[u]:
                if t.marking != 0:
                    continue
                if t.dst == v:
                    return True
                if t.dst not in seen:
                    seen.add(t.dst)
                    stack.append(t.dst)
        return False

    levels = sorted({(t.src, t.marking) for t in H.transitions if t.marking > 0})
    for v, n in levels:
        entries = [t for t in succ[v] if t.marking == n]
        if not any(body_returns(v, t.dst) for t in entries):
            return LLEEVerdict(False, "LLEE-1", {"entry": [v, n]})
        for t in entries:
            for F in sorted(body_region(v, t.dst)):
                if F in H.terminating:
                    return LLEEVerdict(False, "LLEE-3", {"entry": [v, n], "terminating": F})
                for s in succ[F]:
                    if s.marking > 0 and s.marking >= n:
                        return LLEEVerdict(False, "LLEE-4", {"entry": [v, n], "inner": s})
    return LLEEVerdict(True)


def llee_elimination_strategy(H: Chart) -> EliminationRun:
    """Turn an LLEE-witness into an elimination run, lowest loop level first."""
    verdict = verify_llee(H)
    if not verdict:
        raise LoopPreconditionError(f"not an LLEE-witness ({verdict.condition})")
    order = {v: i for i, v in enumerate(H.vertices)}
    current = restrict_reachable(H)
    steps = []
    while True:
        ids = sorted({(t.marking, order[t.src], t.src) for t in current.transitions if t.marking > 0})
        if not ids:
            break
        n, _, v = ids[0]
        U = frozenset(t._replace(marking=0) for t in current.out(v) if t.marking == n)
        erased = erase_markings(current) if current.kind == "labeled" else current
        sub = loop_subchart(erased, v, U)
        if not is_loop_chart(sub):
            raise LoopPreconditionError(f"entry ({v!r}, {n}) does not generate a loop subchart")
        steps.append(EliminationStep(v, U))
        current = restrict_reachable(current.replace(
            transitions=frozenset(t for t in current.transitions if not (t.src == v and t.marking == n))))
    residual = erase_markings(current) if current.kind == "labeled" else current
    return EliminationRun(tuple(steps), residual)
