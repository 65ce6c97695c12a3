"""Bisimulation between charts, functional bisimulations, and collapse.

Also hosts the two end-to-end checks, since both boil down to a
comparison between generated charts.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Mapping, Optional, Set, Tuple

from .chart import Chart, canonical_key, Transition, chart_of, erase_markings, induce, labeled_onechart_of, onechart_of, reachable, restrict_reachable
from .lee import llee_elimination_strategy, validate_run, verify_llee, verify_llee_alt, LoopPreconditionError
from .semantics import EMPTY
from .syntax import StarExpr, project, render


@dataclass(frozen=True)
class Verdict:
    ok: bool
    reason: Optional[str] = None
    witness: object = None

    def __bool__(self):
        return self.ok

    def to_dict(self) -> dict:
        return {"ok": self.ok, "reason": self.reason, "witness": self.witness}


def check_functional_bisim(src: Chart, dst: Chart, m: Mapping[str, str]) -> Verdict:
    """Check that the graph of `m` is a bisimulation relating the start vertices.

    Every transition out of a mapped vertex must land inside the domain of `m`.
    """
    if src.start not in m:
        return Verdict(False, "start", {"vertex": src.start})
    if m[src.start] != dst.start:
        return Verdict(False, "start", {"vertex": src.start, "image": m[src.start], "expected": dst.start})
    src_out: Dict[str, List[Transition]] = {v: [] for v in src.vertices}
    for t in sorted(src.transitions):
        src_out[t.src].append(t)
    dst_out: Dict[str, Set[Tuple[str, str]]] = {v: set() for v in dst.vertices}
    for t in dst.transitions:
        dst_out[t.src].add((t.label, t.dst))
    for v in sorted(m):
        w = m[v]
        if v not in src_out or w not in dst_out:
            return Verdict(False, "domain", {"pair": [v, w]})
        for t in src_out[v]:
            if t.dst not in m:
                return Verdict(False, "forth", {"pair": [v, w], "move": [t.label, t.dst], "unmapped": True})
            if (t.label, m[t.dst]) not in dst_out[w]:
                return Verdict(False, "forth", {"pair": [v, w], "move": [t.label, t.dst]})
        images = {(t.label, m[t.dst]) for t in src_out[v]}
        for label, w2 in sorted(dst_out[w]):
            if (label, w2) not in images:
                return Verdict(False, "back", {"pair": [v, w], "move": [label, w2]})
        if (v in src.terminating) != (w in dst.terminating):
            return Verdict(False, "termination", {"pair": [v, w]})
    return Verdict(True)


def coarsest_partition(G: Chart, vertices: Optional[List[str]] = None) -> Dict[str, int]:
    """Block index per vertex of the coarsest bisimulation on `vertices`.

    Signature refinement: blocks split by (termination, {(label, target block)})
    until stable. Block numbers are assigned in order of first vertex.
    """
    vertices = list(G.vertices) if vertices is None else vertices
    keep = set(vertices)
    out: Dict[str, List[Tuple[str, str]]] = {v: [] for v in vertices}
    for t in G.transitions:
        if t.src in keep:
            out[t.src].append((t.label, t.dst))
    block = {v: int(v in G.terminating) for v in vertices}
    count = len(set(block.values()))
    while True:
        sigs: Dict[tuple, int] = {}
        new = {}
        for v in vertices:
            sig = (block[v], frozenset((a, block[w]) for a, w in out[v]))
            new[v] = sigs.setdefault(sig, len(sigs))
        if len(sigs) == count:
            return new
        block, count = new, len(sigs)


def _union(G1: Chart, G2: Chart) -> Chart:
    ts = {Transition("L:" + t.src, t.label, 0, "L:" + t.dst) for t in G1.transitions}
    ts |= {Transition("R:" + t.src, t.label, 0, "R:" + t.dst) for t in G2.transitions}
    kind = "onechart" if any(t.label == EMPTY for t in ts) else "chart"
    return Chart(kind=kind, start="L:" + G1.start,
                 vertices=tuple("L:" + v for v in G1.vertices) + tuple("R:" + v for v in G2.vertices),
                 transitions=frozenset(ts),
                 terminating=frozenset("L:" + v for v in G1.terminating) | frozenset("R:" + v for v in G2.terminating))


def bisimilar(G1: Chart, G2: Chart) -> Optional[FrozenSet[Tuple[str, str]]]:
    """Largest bisimulation between the reachable parts, or None if the starts differ."""
    U = _union(G1, G2)
    live = ["L:" + v for v in reachable(G1)] + ["R:" + v for v in reachable(G2)]
    block = coarsest_partition(U, live)
    if block["L:" + G1.start] != block["R:" + G2.start]:
        return None
    left = [v for v in live if v.startswith("L:")]
    right = [v for v in live if v.startswith("R:")]
    return frozenset((a[2:], b[2:]) for a in left for b in right if block[a] == block[b])


def is_collapse(G: Chart) -> bool:
    live = reachable(G)
    block = coarsest_partition(G, live)
    return len(set(block.values())) == len(live)


def collapse(G: Chart) -> Tuple[Chart, Dict[str, str]]:
    """Quotient of the reachable part by its coarsest autobisimulation.

    Each block is named by its smallest vertex id.
    """
    live = reachable(G)
    block = coarsest_partition(G, live)
    members: Dict[int, List[str]] = {}
    for v in live:
        members.setdefault(block[v], []).append(v)
    rep = {b: min(vs) for b, vs in members.items()}
    m = {v: rep[block[v]] for v in live}
    names = sorted(set(m.values()))
    ts = frozenset(Transition(m[t.src], t.label, 0, m[t.dst]) for t in G.transitions if t.src in m)
    Q = Chart(kind="onechart" if any(t.label == EMPTY for t in ts) else "chart",
              start=m[G.start], vertices=tuple(names), transitions=ts,
              terminating=frozenset(m[v] for v in live if v in G.terminating),
              payload={n: G.payload[n] for n in names if n in G.payload})
    return Q, m


# End-to-end checks.

def verify_theorem_5_9(e: StarExpr, cap: Optional[int] = None) -> Verdict:
    """Projection is a functional bisimulation from the induced 1-chart to the chart."""
    H = restrict_reachable(induce(onechart_of(e, cap)))
    C = chart_of(e, cap)
    m = {}
    for v in H.vertices:
        target = render(project(H.payload[v]))
        if target not in C.vertices:
            return Verdict(False, "projection", {"vertex": v, "image": target})
        m[v] = target
    return check_functional_bisim(H, C, m)


def verify_theorem_5_14(e: StarExpr, cap: Optional[int] = None) -> Verdict:
    """The labeled 1-chart is an LLEE-witness of the 1-chart, and its strategy run succeeds."""
    L = labeled_onechart_of(e, cap)
    O = onechart_of(e, cap)
    if canonical_key(erase_markings(L)) != canonical_key(O):
        return Verdict(False, "erasure", None)
    v1 = verify_llee(L)
    if not v1:
        return Verdict(False, "llee", v1.to_dict())
    v2 = verify_llee_alt(L)
    if not v2:
        return Verdict(False, "llee-alt", v2.to_dict())
    try:
        run = llee_elimination_strategy(L)
    except LoopPreconditionError as exc:
        return Verdict(False, "strategy", str(exc))
    problem = validate_run(O, run)
    if problem is not None:
        return Verdict(False, "lee", problem)
    return Verdict(True)
