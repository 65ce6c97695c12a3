"""Process semantics of star expressions, loop elimination, and bisimulation."""

from .syntax import (
    Act, Dot, DotC, Lift, One, ParseError, Plus, ReservedLiteralError, Star, StarC, Zero,
    parse_star_expr, project, render, star_height,
)
from .semantics import EMPTY, normed, normed_plus, step_T, step_That, step_Tstar, terminates_T, terminates_Tstar
from .chart import (
    CapExceeded, Chart, ChartFormatError, Transition, chart_of, erase_markings, from_json, induce,
    labeled_onechart_of, make_chart, onechart_of, restrict_reachable, to_dot, to_json,
)
from .lee import (
    EliminationRun, EliminationStep, LoopPreconditionError, SearchBudgetExceeded, eliminate, enumerate_runs,
    is_loop_chart, lee, llee_elimination_strategy, loop_subchart, run_to_labeling, validate_run, verify_llee,
    verify_llee_alt,
)
from .bisim import bisimilar, check_functional_bisim, collapse, verify_theorem_5_9, verify_theorem_5_14
from .corpus import CorpusConfig, random_expr, run_corpus

__version__ = "0.1.0"
