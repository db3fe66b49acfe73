"""Abstract state machines with exact exploration.

Interpret machine programs over finite partial structures, check behavioral
specifications against the exact-exploration conditions, and synthesize an
equivalent machine program from any specification that passes them.
"""

from .structures import (
    DYNAMIC,
    STATIC,
    HANG,
    ExactAsmError,
    PartialStructure,
    SpecificationError,
    Symbol,
    Term,
    Vocabulary,
    agree,
    apply_updates,
    eval_term,
    isomorphic,
    isomorphisms,
    load_state,
    save_state,
    state_from_json,
    state_to_json,
    subterm_closure,
    value_table,
)
from .lang import (
    Assign,
    Case,
    CaseRow,
    If,
    Par,
    ParseError,
    Program,
    SKIP,
    UnsupportedFormError,
    check_program,
    critical_terms,
    flatten,
    iter_assignments,
    parse,
    parse_term,
    print_program,
    print_term,
    term_sort_key,
)
from .semantics import (
    BLACK_HOLE,
    HALT_CLASH,
    HALT_SUCCESS,
    ExploreSet,
    StepResult,
    Trace,
    TraceStep,
    UpdateOutcome,
    explore_set,
    normalize_explore_terms,
    outcome_from_json,
    outcome_to_json,
    proposed_updates,
    run,
    step,
    update_set,
    updates_outcome,
)

__all__ = [
    "DYNAMIC",
    "STATIC",
    "HANG",
    "ExactAsmError",
    "PartialStructure",
    "SpecificationError",
    "Symbol",
    "Term",
    "Vocabulary",
    "agree",
    "apply_updates",
    "eval_term",
    "isomorphic",
    "isomorphisms",
    "load_state",
    "save_state",
    "state_from_json",
    "state_to_json",
    "subterm_closure",
    "value_table",
    "Assign",
    "Case",
    "CaseRow",
    "If",
    "Par",
    "ParseError",
    "Program",
    "SKIP",
    "UnsupportedFormError",
    "check_program",
    "critical_terms",
    "flatten",
    "iter_assignments",
    "parse",
    "parse_term",
    "print_program",
    "print_term",
    "term_sort_key",
    "BLACK_HOLE",
    "HALT_CLASH",
    "HALT_SUCCESS",
    "ExploreSet",
    "StepResult",
    "Trace",
    "TraceStep",
    "UpdateOutcome",
    "explore_set",
    "normalize_explore_terms",
    "outcome_from_json",
    "outcome_to_json",
    "proposed_updates",
    "run",
    "step",
    "update_set",
    "updates_outcome",
]

__version__ = "0.1.0"
