"""Seeded random star expressions and the property checks run over them."""

from __future__ import annotations

import random
import string
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

from .bisim import verify_theorem_5_9, verify_theorem_5_14
from .chart import Chart, canonical_key, erase_markings, labeled_onechart_of, onechart_of
from .lee import find_cycle, has_infinite_path, llee_elimination_strategy, validate_run, verify_llee, verify_llee_alt
from .semantics import EMPTY, normed_plus, normed_plus_by_paths, step_T
from .syntax import Act, Dot, One, Plus, Star, StarExpr, Zero, project, render, star_height

MUTATIONS_PER_CHART = 50


@dataclass(frozen=True)
class CorpusConfig:
    seed: int = 42
    count: int = 200
    max_depth: int = 5
    alphabet_size: int = 3
    vertex_cap: int = 10_000

    def __post_init__(self):
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.count < 1 or self.max_depth < 1:
            raise ValueError("count and max_depth must be at least 1")
        if not 1 <= self.alphabet_size <= 26:
            raise ValueError("alphabet size must be between 1 and 26")
        if self.vertex_cap < 1:
            raise ValueError("vertex cap must be at least 1")

    @property
    def alphabet(self) -> str:
        return string.ascii_lowercase[:self.alphabet_size]


def random_expr(config: CorpusConfig, index: int) -> StarExpr:
    """Expression number `index` of the corpus; depends only on (config, index).

    Trees have at most `max_depth` levels, so ``max_depth=1`` always gives a
    leaf. Above the last level each of the six grammar cases is equally
    likely; on the last level a leaf is drawn with weights action 2, one 1,
    zero 1.
    """
    if not 0 <= index < config.count:
        raise IndexError(f"index {index} outside corpus of size {config.count}")
    rng = random.Random(f"{config.seed}/{index}")
    letters = config.alphabet

    def leaf(case: str) -> StarExpr:
        if case == "act":
            return Act(rng.choice(letters))
        return One() if case == "one" else Zero()

    def gen(depth: int) -> StarExpr:
        if depth == 0:
            return leaf(rng.choices(("act", "one", "zero"), weights=(2, 1, 1))[0])
        case = rng.choice(("zero", "one", "act", "plus", "dot", "star"))
        if case == "plus":
            return Plus(gen(depth - 1), gen(depth - 1))
        if case == "dot":
            return Dot(gen(depth - 1), gen(depth - 1))
        if case == "star":
            return Star(gen(depth - 1))
        return leaf(case)

    return gen(config.max_depth - 1)


def corpus(config: CorpusConfig) -> List[StarExpr]:
    return [random_expr(config, i) for i in range(config.count)]


# Individual property checks. Each returns None on success or a JSON-able counterexample.

def check_erasure(e: StarExpr, cap: int) -> Optional[dict]:
    if canonical_key(erase_markings(labeled_onechart_of(e, cap))) != canonical_key(onechart_of(e, cap)):
        return {"expr": render(e)}
    return None


def check_body_acyclic(e: StarExpr, cap: int) -> Optional[dict]:
    L = labeled_onechart_of(e, cap)
    cycle = find_cycle(list(L.vertices), [t for t in L.transitions if t.marking == 0])
    return None if cycle is None else {"cycle": cycle}


def check_star_height(e: StarExpr, cap: int) -> Optional[dict]:
    L = labeled_onechart_of(e, cap)
    for t in sorted(L.transitions):
        if star_height(L.payload[t.dst]) > star_height(L.payload[t.src]):
            return {"transition": list(t)}
    return None


def check_projection_soundness(e: StarExpr, cap: int) -> Optional[dict]:
    """Every proper step E -a-> E' of the 1-chart projects to a plain step.

    Checked against the plain step relation, not against chart_of(e): the
    projection of a vertex reached by empty steps need not be a derivative of e.
    """
    O = onechart_of(e, cap)
    for t in sorted(O.transitions):
        if t.label == EMPTY:
            continue
        src, dst = project(O.payload[t.src]), project(O.payload[t.dst])
        if (t.label, dst) not in step_T(src):
            return {"transition": list(t), "projected": [render(src), t.label, render(dst)]}
    return None


def check_normed_plus(e: StarExpr, cap: int) -> Optional[dict]:
    O = onechart_of(e, cap)
    for v in O.vertices:
        E = O.payload[v]
        if normed_plus(E) != normed_plus_by_paths(E):
            return {"vertex": v, "one_step": normed_plus(E)}
    return None


def mutate(L: Chart, rng: random.Random) -> Chart:
    """Change the marking of one random transition to a different value.

    The new value is drawn from 0..max+1, where max is the largest marking in
    the chart, excluding the current one.
    """
    ts = sorted(L.transitions)
    t = rng.choice(ts)
    top = max(s.marking for s in ts) + 1
    choices = [m for m in range(top + 1) if m != t.marking]
    new = t._replace(marking=rng.choice(choices))
    rest = L.transitions - {t}
    if new in rest:
        # the mutation coincides with an existing transition; keep it distinct by bumping
        new = new._replace(marking=top + 1)
    return L.replace(transitions=rest | {new})


@dataclass
class LleeAgreement:
    mutations: int = 0
    failing: int = 0
    disagreement: Optional[dict] = None


def check_llee_agreement(e: StarExpr, cap: int, rng: random.Random,
                         mutations: int = MUTATIONS_PER_CHART) -> LleeAgreement:
    L = labeled_onechart_of(e, cap)
    out = LleeAgreement()
    if bool(verify_llee(L)) != bool(verify_llee_alt(L)):
        out.disagreement = {"chart": "unmutated"}
        return out
    if not L.transitions:
        return out
    for k in range(mutations):
        M = mutate(L, rng)
        a, b = verify_llee(M), verify_llee_alt(M)
        out.mutations += 1
        if not a:
            out.failing += 1
        if bool(a) != bool(b):
            out.disagreement = {"mutation": k, "verify_llee": a.to_dict(), "verify_llee_alt": b.to_dict()}
            return out
    return out


def check_strategy(e: StarExpr, cap: int) -> Optional[dict]:
    L = labeled_onechart_of(e, cap)
    run = llee_elimination_strategy(L)
    problem = validate_run(erase_markings(L), run)
    if problem is not None:
        return {"reason": problem}
    if has_infinite_path(run.residual):
        return {"reason": "residual has an infinite path"}
    return None


PROPERTY_CHECKS: Dict[str, Callable[[StarExpr, int], Optional[dict]]] = {
    "erasure": check_erasure,
    "body_acyclic": check_body_acyclic,
    "star_height": check_star_height,
    "projection": check_projection_soundness,
    "normed_plus": check_normed_plus,
    "strategy": check_strategy,
}

CHECK_GROUPS = ("thm59", "thm514", "props")


@dataclass
class CorpusReport:
    config: CorpusConfig
    checks: tuple
    passed: Dict[str, int] = field(default_factory=dict)
    failures: List[dict] = field(default_factory=list)
    mutations: int = 0
    failing_mutations: int = 0

    @property
    def ok(self) -> bool:
        return not self.failures

    @property
    def mutation_fail_rate(self) -> Optional[float]:
        return self.failing_mutations / self.mutations if self.mutations else None

    def to_dict(self) -> dict:
        return {
            "seed": self.config.seed,
            "count": self.config.count,
            "max_depth": self.config.max_depth,
            "alphabet": self.config.alphabet_size,
            "checks": list(self.checks),
            "passed": dict(sorted(self.passed.items())),
            "mutations": self.mutations,
            "failing_mutations": self.failing_mutations,
            "failures": self.failures,
        }


def run_corpus(config: CorpusConfig, checks=CHECK_GROUPS) -> CorpusReport:
    """Run the selected check groups over every corpus expression, in index order."""
    unknown = set(checks) - set(CHECK_GROUPS)
    if unknown:
        raise ValueError(f"unknown checks: {', '.join(sorted(unknown))}")
    report = CorpusReport(config, tuple(checks))
    cap = config.vertex_cap

    def record(name, index, e, problem):
        if problem is None:
            report.passed[name] = report.passed.get(name, 0) + 1
        else:
            report.failures.append({"index": index, "expr": render(e), "check": name, "counterexample": problem})

    for i in range(config.count):
        e = random_expr(config, i)
        if "thm59" in checks:
            v = verify_theorem_5_9(e, cap)
            record("thm59", i, e, None if v else v.to_dict())
        if "thm514" in checks:
            v = verify_theorem_5_14(e, cap)
            record("thm514", i, e, None if v else v.to_dict())
        if "props" in checks:
            for name, fn in PROPERTY_CHECKS.items():
                record(name, i, e, fn(e, cap))
            agreement = check_llee_agreement(e, cap, random.Random(f"{config.seed}/{i}/mutations"))
            report.mutations += agreement.mutations
            report.failing_mutations += agreement.failing
            record("llee_agreement", i, e, agreement.disagreement)
    return report
