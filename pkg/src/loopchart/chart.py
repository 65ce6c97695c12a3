"""Finite rooted transition systems and their generation from expressions.

One `Chart` class covers all three kinds:

* ``"chart"``    -- labels are actions;
* ``"onechart"`` -- labels may also be the empty-step label ``"1"``;
* ``"labeled"``  -- like ``"onechart"``, and every transition carries a marking.

Transitions are `Transition(src, label, marking, dst)`; for the unlabeled kinds
the marking is always 0 and is left out of the JSON form.
"""

from __future__ import annotations

import json
import os
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Iterable, Mapping, NamedTuple, Optional, Tuple

from .semantics import EMPTY, step_T, step_That, step_Tstar, terminates_T, terminates_Tstar
from .syntax import Lift, ParseError, StarExpr, parse_star_expr, render, sort_key

KINDS = ("chart", "onechart", "labeled")
DEFAULT_CAP = 10_000


class CapExceeded(RuntimeError):
    pass


class ChartFormatError(ValueError):
    pass


class Transition(NamedTuple):
    src: str
    label: str
    marking: int
    dst: str


@dataclass(frozen=True, eq=False)
class Chart:
    kind: str
    start: str
    vertices: Tuple[str, ...]
    transitions: FrozenSet[Transition]
    terminating: FrozenSet[str]
    # vertex -> expression object (generated charts) or raw text (loaded charts)
    payload: Mapping[str, object] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ChartFormatError(f"unknown chart kind {self.kind!r}")
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise ChartFormatError("duplicate vertex ids")
        if self.start not in vs:
            raise ChartFormatError(f"start vertex {self.start!r} is not a vertex")
        for t in self.transitions:
            if t.src not in vs or t.dst not in vs:
                raise ChartFormatError(f"transition {t} has an endpoint outside the chart")
            if self.kind != "labeled" and t.marking != 0:
                raise ChartFormatError("markings are only allowed on labeled charts")
            if t.marking < 0:
                raise ChartFormatError("markings are nonnegative")
            if self.kind == "chart" and t.label == EMPTY:
                raise ChartFormatError("empty-step transitions need kind 'onechart' or 'labeled'")
        if not self.terminating <= vs:
            raise ChartFormatError("terminating vertices must be vertices")

    def _identity(self):
        # vertex order is discovery bookkeeping, not part of the chart
        return (self.kind, self.start, frozenset(self.vertices), self.transitions, self.terminating)

    def __eq__(self, other):
        if not isinstance(other, Chart):
            return NotImplemented
        return self._identity() == other._identity()

    def __hash__(self):
        return hash(self._identity())

    def out(self, v: str) -> list:
        return sorted(t for t in self.transitions if t.src == v)

    def successors(self) -> Dict[str, list]:
        succ: Dict[str, list] = {v: [] for v in self.vertices}
        for t in sorted(self.transitions):
            succ[t.src].append(t)
        return succ

    def expr(self, v: str):
        return self.payload.get(v)

    def replace(self, **changes) -> "Chart":
        fields = dict(kind=self.kind, start=self.start, vertices=self.vertices,
                      transitions=self.transitions, terminating=self.terminating,
                      payload=self.payload)
        fields.update(changes)
        return Chart(**fields)


def erase_markings(G: Chart) -> Chart:
    """Drop markings of a labeled chart, giving the underlying 1-chart."""
    return G.replace(kind="onechart",
                     transitions=frozenset(t._replace(marking=0) for t in G.transitions))


# Generation by closure.

def default_cap() -> int:
    return int(os.environ.get("LOOPCHART_CAP", DEFAULT_CAP))


def _generate(root, kind: str, steps: Callable, terminates: Callable, cap: Optional[int]) -> Chart:
    cap = default_cap() if cap is None else cap
    if cap < 1:
        raise ValueError("cap must be at least 1")
    ids = {root: render(root)}
    order = [root]
    transitions = set()
    queue = deque([root])
    while queue:
        x = queue.popleft()
        # canonical successor order makes discovery numbering reproducible
        succ = sorted(steps(x), key=lambda s: (s[0], sort_key(s[2]), s[1]))
        for label, marking, y in succ:
            if y not in ids:
                if len(order) >= cap:
                    raise CapExceeded(f"more than {cap} vertices generated from {render(root)}")
                ids[y] = render(y)
                order.append(y)
                queue.append(y)
            transitions.add(Transition(ids[x], label, marking, ids[y]))
    return Chart(
        kind=kind,
        start=ids[root],
        vertices=tuple(ids[x] for x in order),
        transitions=frozenset(transitions),
        terminating=frozenset(ids[x] for x in order if terminates(x)),
        payload={ids[x]: x for x in order},
    )


def chart_of(e: StarExpr, cap: Optional[int] = None) -> Chart:
    return _generate(e, "chart",
                     lambda x: [(a, 0, y) for a, y in step_T(x)],
                     terminates_T, cap)


def onechart_of(e: StarExpr, cap: Optional[int] = None) -> Chart:
    return _generate(Lift(e), "onechart",
                     lambda x: [(a, 0, y) for a, y in step_Tstar(x)],
                     terminates_Tstar, cap)


def labeled_onechart_of(e: StarExpr, cap: Optional[int] = None) -> Chart:
    return _generate(Lift(e), "labeled", step_That, terminates_Tstar, cap)


# Induced chart and garbage collection.

def _empty_closure(G: Chart) -> Dict[str, set]:
    empty_succ: Dict[str, list] = {v: [] for v in G.vertices}
    for t in G.transitions:
        if t.label == EMPTY:
            empty_succ[t.src].append(t.dst)
    closure = {}
    for v in G.vertices:
        seen = {v}
        stack = [v]
        while stack:
            u = stack.pop()
            for w in empty_succ[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        closure[v] = seen
    return closure


def induce(G: Chart) -> Chart:
    """Close proper steps and termination under preceding empty-step paths.

    Keeps every vertex, reachable or not.
    """
    closure = _empty_closure(G)
    proper: Dict[str, list] = {v: [] for v in G.vertices}
    for t in G.transitions:
        if t.label != EMPTY:
            proper[t.src].append(t)
    transitions = set()
    for v in G.vertices:
        for u in closure[v]:
            for t in proper[u]:
                transitions.add(Transition(v, t.label, 0, t.dst))
    terminating = frozenset(v for v in G.vertices if closure[v] & G.terminating)
    return G.replace(kind="chart", transitions=frozenset(transitions), terminating=terminating)


def reachable(G: Chart, start: Optional[str] = None) -> list:
    start = G.start if start is None else start
    succ = G.successors()
    seen = {start}
    order = [start]
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for t in succ[v]:
            if t.dst not in seen:
                seen.add(t.dst)
                order.append(t.dst)
                queue.append(t.dst)
    return order


def restrict_reachable(G: Chart) -> Chart:
    keep = set(reachable(G))
    return G.replace(
        vertices=tuple(v for v in G.vertices if v in keep),
        transitions=frozenset(t for t in G.transitions if t.src in keep),
        terminating=G.terminating & keep,
        payload={v: x for v, x in G.payload.items() if v in keep},
    )


# Serialization.

def _payload_text(x) -> Optional[str]:
    if x is None or isinstance(x, str):
        return x
    return render(x)


def to_dict(G: Chart) -> dict:
    vertices = [
        {"id": v, "expr": _payload_text(G.payload.get(v)), "terminating": v in G.terminating}
        for v in sorted(G.vertices)
    ]
    transitions = []
    for t in sorted(G.transitions, key=lambda t: (t.src, t.label, t.marking, t.dst)):
        item = {"src": t.src, "label": t.label}
        if G.kind == "labeled":
            item["marking"] = t.marking
        item["dst"] = t.dst
        transitions.append(item)
    return {"kind": G.kind, "start": G.start, "vertices": vertices, "transitions": transitions}


def to_json(G: Chart) -> str:
    return json.dumps(to_dict(G), indent=2) + "\n"


def canonical_key(G: Chart) -> str:
    """Compact sorted serialization; equal keys mean equal charts (payload aside)."""
    d = to_dict(G)
    for v in d["vertices"]:
        v.pop("expr")
    return json.dumps(d, separators=(",", ":"))


def from_dict(d: Mapping) -> Chart:
    try:
        kind = d["kind"]
        payload = {}
        vertices = []
        terminating = set()
        for item in d["vertices"]:
            v = item["id"]
            if not isinstance(v, str):
                raise ChartFormatError("vertex ids must be strings")
            vertices.append(v)
            if item.get("terminating", False):
                terminating.add(v)
            text = item.get("expr")
            if text is not None:
                payload[v] = _load_payload(kind, text)
        transitions = set()
        for item in d["transitions"]:
            marking = item.get("marking", 0)
            if kind != "labeled" and "marking" in item:
                raise ChartFormatError("marking present on an unlabeled chart")
            if kind == "labeled" and "marking" not in item:
                raise ChartFormatError("labeled chart transition without marking")
            if not isinstance(marking, int) or isinstance(marking, bool):
                raise ChartFormatError("markings must be integers")
            transitions.add(Transition(item["src"], item["label"], marking, item["dst"]))
        return Chart(kind=kind, start=d["start"], vertices=tuple(vertices),
                     transitions=frozenset(transitions), terminating=frozenset(terminating),
                     payload=payload)
    except (KeyError, TypeError) as exc:
        raise ChartFormatError(f"malformed chart JSON: {exc}") from exc


def _load_payload(kind: str, text: str):
    # plain expressions round-trip through the parser; stacked ones stay text
    if kind == "chart":
        try:
            return parse_star_expr(text)
        except (ParseError, ValueError):
            return text
    return text


def from_json(text: str) -> Chart:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ChartFormatError(f"invalid JSON: {exc}") from exc
    return from_dict(data)


# DOT export.

def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(G: Chart, name: str = "chart") -> str:
    lines = [f"digraph {name} {{", "  rankdir=LR;", '  __start [shape=point, label=""];']
    for v in sorted(G.vertices):
        attrs = ["shape=circle" if v not in G.terminating else "shape=circle, peripheries=2"]
        lines.append(f"  {_q(v)} [{attrs[0]}];")
    lines.append(f"  __start -> {_q(G.start)};")
    for t in sorted(G.transitions, key=lambda t: (t.src, t.label, t.marking, t.dst)):
        label = t.label if t.marking == 0 else f"{t.label} [{t.marking}]"
        style = ", style=dotted" if t.label == EMPTY else ""
        lines.append(f"  {_q(t.src)} -> {_q(t.dst)} [label={_q(label)}{style}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def make_chart(start: str, transitions: Iterable, terminating: Iterable[str] = (),
               vertices: Iterable[str] = (), kind: Optional[str] = None) -> Chart:
    """Build a hand-coded chart from ``(src, label, dst)`` or ``(src, label, marking, dst)`` tuples."""
    ts = set()
    for t in transitions:
        if len(t) == 3:
            ts.add(Transition(t[0], t[1], 0, t[2]))
        else:
            ts.add(Transition(*t))
    order = [start]
    for v in list(vertices) + [x for t in sorted(ts) for x in (t.src, t.dst)] + list(terminating):
        if v not in order:
            order.append(v)
    if kind is None:
        if any(t.marking for t in ts):
            kind = "labeled"
        elif any(t.label == EMPTY for t in ts):
            kind = "onechart"
        else:
            kind = "chart"
    return Chart(kind=kind, start=start, vertices=tuple(order), transitions=frozenset(ts),
                 terminating=frozenset(terminating))
