"""One-step semantics: update sets, halting, and exact exploration.

A single interpreter walk drives everything here.  Walking a program over a
state yields, simultaneously:

  * the proposed updates (the pre-strip update set, with trivial writes
    still present), and
  * the explore set: every term whose value the walk requested from the
    state, tagged with the purpose it served.

Roles are single letters.  "D" marks a term tested to decide control flow
(a conditional's condition, a case query), "C" marks a term read for the
value it supplies to an update, and "A" marks a term read to locate an
update (an assignment's left-hand arguments) or appearing as a subterm of
another explored term.  One term can carry several roles.

Partiality is strict.  The moment any requested value hangs, the walk
stops: no later branch is entered, no later update is collected, and the
outcome of the step is a black hole.  The explore set is truncated at that
point, but the whole batch the hang belongs to is kept (all arguments and
the right-hand side of an assignment; every query of a case), since the
walk requests those values together before judging any of them.

A completed walk is classified in this order: an inconsistent update set
(two writes to one location with different values, trivial or not) halts
with a clash; an empty update set halts successfully; otherwise updates
that merely rewrite a location's current value are stripped and the rest
are applied.  An update set that strips to nothing is a genuine step that
changes nothing, i.e. a self-loop, not a halt.
"""

from dataclasses import dataclass
from typing import Iterable

from .lang import (Assign, Case, If, Par, Program, print_term, term_sort_key)
from .structures import (BOOLEAN_CONNECTIVES, HANG, PartialStructure,
                         SpecificationError, Term, apply_updates, eval_term,
                         subterm_closure)

ROLE_TEST = "D"
ROLE_VALUE = "C"
ROLE_ARG = "A"

OUTCOME_KINDS = ("updates", "halt-success", "halt-clash", "black-hole")

# ((symbol name, argument element ids), value element id)
Location = tuple[str, tuple[int, ...]]
Update = tuple[Location, int]


@dataclass(frozen=True)
class UpdateOutcome:
    """What one step of a program does to a state.

    kind is one of "updates" (apply .updates, possibly empty), "halt-success"
    (nothing proposed), "halt-clash" (contradictory proposals), or
    "black-hole" (the walk hung on an undefined value).
    """

    kind: str
    updates: frozenset = frozenset()

    def __post_init__(self):
        if self.kind not in OUTCOME_KINDS:
            raise SpecificationError(f"unknown outcome kind {self.kind!r}")
        if self.kind != "updates" and self.updates:
            raise SpecificationError(f"a {self.kind} outcome carries no updates")

    @property
    def is_updates(self) -> bool:
        return self.kind == "updates"

    @property
    def is_halt(self) -> bool:
        return self.kind in ("halt-success", "halt-clash")

    @property
    def is_black_hole(self) -> bool:
        return self.kind == "black-hole"


HALT_SUCCESS = UpdateOutcome("halt-success")
HALT_CLASH = UpdateOutcome("halt-clash")
BLACK_HOLE = UpdateOutcome("black-hole")


def updates_outcome(pairs: Iterable[Update]) -> UpdateOutcome:
    return UpdateOutcome("updates", frozenset(pairs))


@dataclass(frozen=True)
class ExploreSet:
    """The terms a walk asked the state about, in canonical order.

    entries pairs each term with its roles.  Subterms of every explored term
    are included (role "A"); the distinguished constants themselves are not
    recorded.  hang is set when the walk was cut short by an undefined
    value.  clash_terms, when requested, holds the two groups of equality
    tests a location-clash analysis would perform: argument comparisons for
    same-symbol assignments with distinct right-hand sides, and right-hand
    side comparisons for pairs whose locations coincided in this state.
    """

    entries: tuple[tuple[Term, frozenset], ...]
    hang: bool = False
    clash_terms: "tuple[frozenset, frozenset] | None" = None

    @property
    def terms(self) -> frozenset:
        return frozenset(t for t, _ in self.entries)

    def roles(self, term: Term) -> frozenset:
        for t, r in self.entries:
            if t is term:
                return r
        raise KeyError(f"{print_term(term)} was not explored")

    def __contains__(self, term: Term) -> bool:
        return any(t is term for t, _ in self.entries)

    def __iter__(self):
        return iter(self.entries)


# -- the walk -----------------------------------------------------------------


class _Walk:
    """Mutable state of one interpreter pass over one structure."""

    __slots__ = ("state", "memo", "roles", "updates", "fired", "kvalues")

    def __init__(self, state: PartialStructure):
        self.state = state
        self.memo: dict = {}
        self.roles: dict[Term, set] = {}
        self.updates: list[Update] = []
        # (assignment, argument values, rhs value) per executed assignment
        self.fired: list[tuple[Assign, tuple[int, ...], int]] = []
        self.kvalues = frozenset(state.distinguished_values().values())

    def note(self, term: Term, role: str) -> None:
        self.roles.setdefault(term, set()).add(role)

    def value(self, term: Term):
        return eval_term(self.state, term, self.memo)

    def walk(self, p: Program) -> bool:
        """Execute p, collecting updates and explored terms.

        Returns True when the walk hung; the caller must then stop.
        """
        match p:
            case Assign(lhs=lhs, rhs=rhs):
                for a in lhs.args:
                    self.note(a, ROLE_ARG)
                self.note(rhs, ROLE_VALUE)
                argvals = []
                for a in lhs.args:
                    v = self.value(a)
                    if v is HANG:
                        return True
                    argvals.append(v)
                rv = self.value(rhs)
                if rv is HANG:
                    return True
                self.updates.append(((lhs.head, tuple(argvals)), rv))
                self.fired.append((p, tuple(argvals), rv))
                return False
            case Par(children=children):
                return any(self.walk(c) for c in children)
            case If(condition=condition, body=body):
                self.note(condition, ROLE_TEST)
                v = self.value(condition)
                if v is HANG:
                    return True
                if v == self.state.true_value:
                    return self.walk(body)
                return False
            case Case(queries=queries, rows=rows):
                for q in queries:
                    self.note(q, ROLE_TEST)
                vals = []
                for q in queries:
                    vals.append(self.value(q))
                if any(v is HANG for v in vals):
                    return True
                # A query answered by anything but a distinguished value is
                # unanswerable: the walk hangs exactly as on an undefined point.
                if any(v not in self.kvalues for v in vals):
                    return True
                vals = tuple(vals)
                for row in rows:
                    pattern = tuple(self.state.distinguished_value(name)
                                    for name in row.literals)
                    if pattern == vals:
                        if self.walk(row.body):
                            return True
                return False
        raise SpecificationError(f"not a program: {p!r}")


def proposed_updates(p: Program, state: PartialStructure):
    """The pre-strip update set of p over state, or HANG."""
    w = _Walk(state)
    if w.walk(p):
        return HANG
    return frozenset(w.updates)


def _classify(state: PartialStructure, hung: bool,
              updates: list[Update]) -> UpdateOutcome:
    if hung:
        return BLACK_HOLE
    if not updates:
        return HALT_SUCCESS
    seen: dict[Location, int] = {}
    for loc, v in updates:
        if seen.setdefault(loc, v) != v:
            return HALT_CLASH
    kept = []
    for (name, args), v in seen.items():
        current = state.interp[name].get(args)
        if current is None or current != v:
            kept.append(((name, args), v))
    return updates_outcome(kept)


def update_set(p: Program, state: PartialStructure) -> UpdateOutcome:
    """One step's verdict: updates to apply, a halt, or a black hole."""
    w = _Walk(state)
    return _classify(state, w.walk(p), w.updates)


def _clash_tests(fired: list) -> tuple[frozenset, frozenset]:
    arg_tests: set[Term] = set()
    value_tests: set[Term] = set()
    for k in range(len(fired)):
        a, aargs, _ = fired[k]
        for m in range(k + 1, len(fired)):
            b, bargs, _ = fired[m]
            if a.lhs.head != b.lhs.head or a.rhs is b.rhs:
                continue
            for u, v in zip(a.lhs_args, b.lhs_args):
                if u is not v:
                    arg_tests.add(Term("=", (u, v)))
            if aargs == bargs:
                value_tests.add(Term("=", (a.rhs, b.rhs)))
    return frozenset(arg_tests), frozenset(value_tests)


def explore_set(p: Program, state: PartialStructure,
                with_clash_terms: bool = False) -> ExploreSet:
    """Every term the walk evaluates in state, with roles, plus subterms.

    with_clash_terms also derives the equality tests that would detect
    write-write conflicts between the executed assignments; this needs "="
    in the vocabulary, and yields empty groups when the walk hung.
    """
    if with_clash_terms and "=" not in state.vocabulary:
        raise SpecificationError('clash terms need "=" in the vocabulary')
    w = _Walk(state)
    hung = w.walk(p)
    roles = {t: set(r) for t, r in w.roles.items()}
    for t in list(roles):
        for s in t.proper_subterms():
            roles.setdefault(s, set()).add(ROLE_ARG)
    for name in state.vocabulary.distinguished:
        roles.pop(Term(name), None)
    entries = tuple(sorted(((t, frozenset(r)) for t, r in roles.items()),
                           key=lambda e: term_sort_key(e[0])))
    clash = None
    if with_clash_terms:
        clash = (frozenset(), frozenset()) if hung else _clash_tests(w.fired)
    return ExploreSet(entries, hang=hung, clash_terms=clash)


def normalize_explore_terms(terms: Iterable[Term],
                            vocabulary) -> frozenset:
    """Collapse an explore set to its connective-free core.

    Closes under subterms, then drops terms headed by and/or/not (their
    operands remain) and the distinguished constants.  Two programs that
    phrase the same tests differently (one compound condition against a
    nest of conditionals) explore the same core.
    """
    closed = subterm_closure(terms)
    dropped = {t for t in closed if t.head in BOOLEAN_CONNECTIVES}
    dropped |= {Term(name) for name in vocabulary.distinguished}
    return frozenset(closed - dropped)


# -- stepping and running ------------------------------------------------------


@dataclass(frozen=True)
class StepResult:
    outcome: UpdateOutcome
    next: "PartialStructure | None"


def step(p: Program, state: PartialStructure) -> StepResult:
    """Apply one step.  next is None unless the outcome carries updates."""
    out = update_set(p, state)
    if not out.is_updates:
        return StepResult(out, None)
    return StepResult(out, apply_updates(state, out.updates))


@dataclass(frozen=True)
class TraceStep:
    state: PartialStructure
    outcome: UpdateOutcome
    explore: ExploreSet


@dataclass(frozen=True)
class Trace:
    """A run's history: one entry per examined state, and how it ended.

    status: "halt-success" | "halt-clash" | "black-hole" | "self-loop" |
    "budget-exhausted".  final_state is the last state reached; for an
    exhausted budget that is the successor the loop never examined.
    """

    steps: tuple
    status: str
    final_state: PartialStructure

    def __len__(self) -> int:
        return len(self.steps)


def run(p: Program, state: PartialStructure, max_steps: int = 1000) -> Trace:
    if max_steps < 1:
        raise SpecificationError("max_steps must be positive")
    steps = []
    current = state
    for _ in range(max_steps):
        out = update_set(p, current)
        steps.append(TraceStep(current, out, explore_set(p, current)))
        if not out.is_updates:
            return Trace(tuple(steps), out.kind, current)
        if not out.updates:
            return Trace(tuple(steps), "self-loop", current)
        current = apply_updates(current, out.updates)
    return Trace(tuple(steps), "budget-exhausted", current)


# -- serialization -------------------------------------------------------------


def outcome_to_json(outcome: UpdateOutcome, state: PartialStructure) -> dict:
    data: dict = {"kind": outcome.kind}
    if outcome.is_updates:
        names = state.base_names
        data["updates"] = sorted(
            [name, [names[a] for a in args], names[v]]
            for (name, args), v in outcome.updates)
    return data


def outcome_from_json(data: dict, state: PartialStructure) -> UpdateOutcome:
    kind = data["kind"]
    if kind != "updates":
        return UpdateOutcome(kind)
    pairs = []
    for name, argnames, valname in data.get("updates", ()):
        loc = (name, tuple(state.element(a) for a in argnames))
        pairs.append((loc, state.element(valname)))
    return updates_outcome(pairs)
