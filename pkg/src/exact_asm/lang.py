"""Program syntax: AST, parser, canonical printer, and the flattening rewrite.

Programs take four forms: assignment, bracketed parallel block, conditional,
and case dispatch over distinguished constants.  Concrete syntax:

    [ if j != n then
        [ if F(i) > F(j) then [F(i) := F(j) || F(j) := F(i)]
        || j := j+1 ]
    || if j = n and i+1 != n then [i := i+1 || j := i+2] ]

    case s, t of when true, undef then x := y when false, undef then [ ]

Boolean connectives and comparison operators are ordinary vocabulary symbols;
``s != t`` is sugar for ``not (s = t)``.  Comments run from ``//`` to end of
line.  A case statement nested directly as a row body of an enclosing case is
grabbed greedily by the inner case; bracket it to keep the rows separate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union

from .structures import (
    ExactAsmError,
    SpecificationError,
    Term,
    Vocabulary,
    check_term,
    subterm_closure,
)


class ParseError(ExactAsmError):
    pass


class UnsupportedFormError(ExactAsmError):
    pass


@dataclass(frozen=True)
class Assign:
    lhs: Term
    rhs: Term

    @property
    def lhs_head(self) -> str:
        return self.lhs.head

    @property
    def lhs_args(self) -> tuple[Term, ...]:
        return self.lhs.args


@dataclass(frozen=True)
class Par:
    children: tuple["Program", ...]


@dataclass(frozen=True)
class If:
    condition: Term
    body: "Program"


@dataclass(frozen=True)
class CaseRow:
    literals: tuple[str, ...]
    body: "Program"


@dataclass(frozen=True)
class Case:
    queries: tuple[Term, ...]
    rows: tuple[CaseRow, ...]


Program = Union[Assign, Par, If, Case]

SKIP = Par(())

KEYWORDS = frozenset({"if", "then", "case", "of", "when", "and", "or", "not"})
COMPARISON_OPS = ("=", "!=", "<", ">", "<=", ">=")
ADDITIVE_OPS = ("+", "-")
MULTIPLICATIVE_OPS = ("*",)


# -- lexer -------------------------------------------------------------------

_TWO_CHAR = (":=", "||", "!=", "<=", ">=")
_ONE_CHAR = "()[],=<>+-*"


@dataclass(frozen=True)
class _Token:
    kind: str  # "ident", "op", "eof"
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if ch in " \t\r":
            i, col = i + 1, col + 1
            continue
        if text.startswith("//", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        pair = text[i:i + 2]
        if pair in _TWO_CHAR:
            tokens.append(_Token("op", pair, line, col))
            i, col = i + 2, col + 2
            continue
        if ch in _ONE_CHAR:
            tokens.append(_Token("op", ch, line, col))
            i, col = i + 1, col + 1
            continue
        if ch.isalnum() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("ident", text[i:j], line, col))
            col += j - i
            i = j
            continue
        raise ParseError(f"line {line}, column {col}: unexpected character {ch!r}")
    tokens.append(_Token("eof", "", line, col))
    return tokens


# -- parser ------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str, vocabulary: Vocabulary | None):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.vocabulary = vocabulary

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, message: str) -> ParseError:
        tok = self.peek()
        where = f"line {tok.line}, column {tok.col}"
        got = "end of input" if tok.kind == "eof" else repr(tok.text)
        return ParseError(f"{where}: {message} (got {got})")

    def expect(self, text: str) -> _Token:
        tok = self.peek()
        if tok.text != text or tok.kind == "eof":
            raise self.fail(f"expected {text!r}")
        return self.next()

    def at_keyword(self, word: str) -> bool:
        tok = self.peek()
        return tok.kind == "ident" and tok.text == word

    # terms, lowest precedence first

    def term(self) -> Term:
        return self.or_term()

    def or_term(self) -> Term:
        left = self.and_term()
        while self.at_keyword("or"):
            self.next()
            left = self.checked(Term("or", (left, self.and_term())))
        return left

    def and_term(self) -> Term:
        left = self.not_term()
        while self.at_keyword("and"):
            self.next()
            left = self.checked(Term("and", (left, self.not_term())))
        return left

    def not_term(self) -> Term:
        if self.at_keyword("not"):
            self.next()
            return self.checked(Term("not", (self.not_term(),)))
        return self.comparison()

    def comparison(self) -> Term:
        left = self.additive()
        tok = self.peek()
        if tok.kind == "op" and tok.text in COMPARISON_OPS:
            self.next()
            right = self.additive()
            if tok.text == "!=":
                return self.checked(Term("not", (self.checked(Term("=", (left, right))),)))
            return self.checked(Term(tok.text, (left, right)))
        return left

    def additive(self) -> Term:
        left = self.multiplicative()
        while self.peek().kind == "op" and self.peek().text in ADDITIVE_OPS:
            op = self.next().text
            left = self.checked(Term(op, (left, self.multiplicative())))
        return left

    def multiplicative(self) -> Term:
        left = self.atom()
        while self.peek().kind == "op" and self.peek().text in MULTIPLICATIVE_OPS:
            op = self.next().text
            left = self.checked(Term(op, (left, self.atom())))
        return left

    def atom(self) -> Term:
        tok = self.peek()
        if tok.kind == "op" and tok.text == "(":
            self.next()
            inner = self.term()
            self.expect(")")
            return inner
        if tok.kind != "ident" or tok.text in KEYWORDS:
            raise self.fail("expected a term")
        self.next()
        args: list[Term] = []
        if self.peek().text == "(" and self.peek().kind == "op":
            self.next()
            if self.peek().text != ")":
                args.append(self.term())
                while self.peek().text == ",":
                    self.next()
                    args.append(self.term())
            self.expect(")")
        return self.checked(Term(tok.text, tuple(args)))

    def checked(self, term: Term) -> Term:
        if self.vocabulary is not None:
            try:
                sym = self.vocabulary.require(term.head)
                if sym.arity != len(term.args):
                    raise SpecificationError(
                        f"{term.head} has arity {sym.arity}, applied to {len(term.args)} args")
            except SpecificationError as exc:
                raise self.fail(str(exc)) from None
        return term

    # programs

    def program(self) -> Program:
        tok = self.peek()
        if tok.kind == "op" and tok.text == "[":
            return self.block()
        if self.at_keyword("if"):
            return self.conditional()
        if self.at_keyword("case"):
            return self.case()
        return self.assignment()

    def block(self) -> Par:
        self.expect("[")
        children: list[Program] = []
        if self.peek().text != "]":
            children.append(self.program())
            while self.peek().text == "||":
                self.next()
                children.append(self.program())
        self.expect("]")
        return Par(tuple(children))

    def conditional(self) -> If:
        self.expect("if")
        condition = self.term()
        self.expect("then")
        return If(condition, self.program())

    def case(self) -> Case:
        self.expect("case")
        queries = [self.term()]
        while self.peek().text == ",":
            self.next()
            queries.append(self.term())
        self.expect("of")
        rows: list[CaseRow] = []
        while self.at_keyword("when"):
            self.next()
            literals = [self.literal()]
            while self.peek().text == ",":
                self.next()
                literals.append(self.literal())
            if len(literals) != len(queries):
                raise self.fail(f"case row has {len(literals)} literals "
                                f"for {len(queries)} queries")
            self.expect("then")
            rows.append(CaseRow(tuple(literals), self.program()))
        if not rows:
            raise self.fail("case needs at least one when-row")
        return Case(tuple(queries), tuple(rows))

    def literal(self) -> str:
        tok = self.peek()
        if tok.kind != "ident" or tok.text in KEYWORDS:
            raise self.fail("expected a distinguished constant")
        if self.vocabulary is not None and not self.vocabulary.is_distinguished(tok.text):
            raise self.fail(f"{tok.text} is not a distinguished constant")
        self.next()
        return tok.text

    def assignment(self) -> Assign:
        lhs = self.term()
        self.expect(":=")
        return Assign(lhs, self.term())


def parse(text: str, vocabulary: Vocabulary | None = None) -> Program:
    parser = _Parser(text, vocabulary)
    program = parser.program()
    if parser.peek().kind != "eof":
        raise parser.fail("expected end of input")
    return program


def parse_term(text: str, vocabulary: Vocabulary | None = None) -> Term:
    parser = _Parser(text, vocabulary)
    term = parser.term()
    if parser.peek().kind != "eof":
        raise parser.fail("expected end of input")
    return term


# -- printer -------------------------------------------------------------------

# precedence levels: or=0 < and=1 < not=2 < comparison=3 < additive=4
# < multiplicative=5 < atom=6


def _level(term: Term) -> int:
    head, n = term.head, len(term.args)
    if head == "or" and n == 2:
        return 0
    if head == "and" and n == 2:
        return 1
    if head == "not" and n == 1:
        inner = term.args[0]
        return 3 if inner.head == "=" and len(inner.args) == 2 else 2
    if head in COMPARISON_OPS and n == 2:
        return 3
    if head in ADDITIVE_OPS and n == 2:
        return 4
    if head in MULTIPLICATIVE_OPS and n == 2:
        return 5
    return 6


def _print_term(term: Term, minimum: int) -> str:
    level = _level(term)
    head, args = term.head, term.args
    if level == 0:
        out = f"{_print_term(args[0], 0)} or {_print_term(args[1], 1)}"
    elif level == 1:
        out = f"{_print_term(args[0], 1)} and {_print_term(args[1], 2)}"
    elif level == 2:
        out = f"not {_print_term(args[0], 2)}"
    elif level == 3 and head == "not":
        eq = args[0]
        out = f"{_print_term(eq.args[0], 4)}!={_print_term(eq.args[1], 4)}"
    elif level == 3:
        out = f"{_print_term(args[0], 4)}{head}{_print_term(args[1], 4)}"
    elif level == 4:
        out = f"{_print_term(args[0], 4)}{head}{_print_term(args[1], 5)}"
    elif level == 5:
        out = f"{_print_term(args[0], 5)}{head}{_print_term(args[1], 6)}"
    elif not args:
        out = head
    else:
        out = f"{head}({', '.join(_print_term(a, 0) for a in args)})"
    if level < minimum:
        return f"({out})"
    return out


def print_term(term: Term) -> str:
    return _print_term(term, 0)


def print_program(p: Program) -> str:
    match p:
        case Assign(lhs, rhs):
            return f"{print_term(lhs)} := {print_term(rhs)}"
        case Par(()):
            return "[ ]"
        case Par(children):
            return f"[{' || '.join(print_program(c) for c in children)}]"
        case If(condition, body):
            return f"if {print_term(condition)} then {print_program(body)}"
        case Case(queries, rows):
            parts = [f"case {', '.join(print_term(q) for q in queries)} of"]
            for row in rows:
                parts.append(f"when {', '.join(row.literals)} then {print_program(row.body)}")
            return " ".join(parts)
    raise SpecificationError(f"not a program: {p!r}")


def _size(term: Term) -> int:
    return 1 + sum(_size(a) for a in term.args)


def term_sort_key(term: Term) -> tuple[int, str]:
    """Canonical term order: structurally smaller first, then by printed form."""
    return (_size(term), print_term(term))


# -- structure walks ------------------------------------------------------------


def iter_assignments(p: Program) -> Iterator[Assign]:
    match p:
        case Assign():
            yield p
        case Par(children):
            for c in children:
                yield from iter_assignments(c)
        case If(_, body):
            yield from iter_assignments(body)
        case Case(_, rows):
            for row in rows:
                yield from iter_assignments(row.body)


def _collect_terms(p: Program, out: set[Term]) -> None:
    match p:
        case Assign(lhs, rhs):
            # lhs names a location, not a value demand: only its argument
            # subterms are ever evaluated
            out.update(lhs.args)
            out.add(rhs)
        case Par(children):
            for c in children:
                _collect_terms(c, out)
        case If(condition, body):
            out.add(condition)
            _collect_terms(body, out)
        case Case(queries, rows):
            out.update(queries)
            for row in rows:
                out.update(Term(lit) for lit in row.literals)
                _collect_terms(row.body, out)


def critical_terms(p: Program) -> frozenset[Term]:
    """Every term the program could ever demand, closed under subterms.

    Assignment left-hand sides contribute their proper subterms rather than
    themselves.  The explore set of any state is a subset of this set.
    """
    seeds: set[Term] = set()
    _collect_terms(p, seeds)
    return subterm_closure(seeds)


def check_program(p: Program, vocabulary: Vocabulary) -> None:
    """Validate every symbol occurrence against the vocabulary."""
    match p:
        case Assign(lhs, rhs):
            check_term(lhs, vocabulary)
            check_term(rhs, vocabulary)
        case Par(children):
            for c in children:
                check_program(c, vocabulary)
        case If(condition, body):
            check_term(condition, vocabulary)
            check_program(body, vocabulary)
        case Case(queries, rows):
            for q in queries:
                check_term(q, vocabulary)
            for row in rows:
                if len(row.literals) != len(queries):
                    raise SpecificationError("case row length mismatch")
                for lit in row.literals:
                    if not vocabulary.is_distinguished(lit):
                        raise SpecificationError(
                            f"case literal {lit} is not a distinguished constant")
                check_program(row.body, vocabulary)
        case _:
            raise SpecificationError(f"not a program: {p!r}")


# -- flattening -------------------------------------------------------------------


def _flatten_leaves(p: Program) -> list[Program]:
    match p:
        case Assign():
            return [p]
        case Par(children):
            out: list[Program] = []
            for c in children:
                out.extend(_flatten_leaves(c))
            return out
        case If(condition, body):
            leaves = _flatten_leaves(body)
            if not leaves:
                # distributing over an empty block would drop the condition
                # from every explore set, so keep this as a guarded skip
                return [If(condition, SKIP)]
            return [If(condition, leaf) for leaf in leaves]
        case Case():
            raise UnsupportedFormError("flatten is defined for the if-language only")
    raise SpecificationError(f"not a program: {p!r}")


def flatten(p: Program) -> Par:
    """Rewrite to a single parallel block of nested conditional assignments.

    ``if C then [P1 || ... || Pn]`` becomes ``[if C then P1 || ... || if C
    then Pn]``; the proposed updates and the explore set are unchanged on
    every state.
    """
    return Par(tuple(_flatten_leaves(p)))
