"""Tests for the program language: parsing, printing, flattening."""

import pytest
from hypothesis import given, strategies as st

from exact_asm.lang import (
    SKIP,
    Assign,
    Case,
    CaseRow,
    If,
    Par,
    ParseError,
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
from exact_asm.structures import DYNAMIC, STATIC, Symbol, Term, Vocabulary

SORTING_TEXT = """
[ if j != n then
    [ if F(i) > F(j) then [F(i) := F(j) || F(j) := F(i)]
    || j := j+1 ]
|| if j = n and i+1 != n then [i := i+1 || j := i+2] ]
"""


def t(text):
    return parse_term(text)


# -- parsing ------------------------------------------------------------------


def test_empty_block_is_skip():
    assert parse("[ ]") == Par(())
    assert parse("[]") == Par(())


def test_nested_conditional_assignment():
    p = parse("if d then if b then x := d")
    assert p == If(Term("d"), If(Term("b"), Assign(Term("x"), Term("d"))))


def test_sorting_program_shape():
    p = parse(SORTING_TEXT)
    assert isinstance(p, Par) and len(p.children) == 2
    first, second = p.children
    assert isinstance(first, If)
    assert first.condition == Term("not", (Term("=", (Term("j"), Term("n"))),))
    assert isinstance(first.body, Par) and len(first.body.children) == 2
    swap = first.body.children[0]
    assert isinstance(swap, If)
    assert swap.condition == Term(">", (Term("F", (Term("i"),)),
                                        Term("F", (Term("j"),))))
    assert isinstance(second, If)
    assert second.condition.head == "and"
    assert second.body.children[1] == Assign(
        Term("j"), Term("+", (Term("i"), Term("2"))))


def test_case_parsing():
    p = parse("case s, t of when true, undef then x := y when false, false then [ ]")
    assert isinstance(p, Case)
    assert p.queries == (Term("s"), Term("t"))
    assert p.rows == (CaseRow(("true", "undef"), Assign(Term("x"), Term("y"))),
                      CaseRow(("false", "false"), Par(())))


def test_comments_and_whitespace():
    p = parse("// leading note\nx := y // trailing\n")
    assert p == Assign(Term("x"), Term("y"))


def test_precedence():
    assert t("a or b and c") == Term("or", (Term("a"), Term("and", (Term("b"), Term("c")))))
    assert t("not a and b") == Term("and", (Term("not", (Term("a"),)), Term("b")))
    assert t("a+b*c") == Term("+", (Term("a"), Term("*", (Term("b"), Term("c")))))
    assert t("a-b-c") == Term("-", (Term("-", (Term("a"), Term("b"))), Term("c")))
    assert t("a = b or c = d") == Term("or", (Term("=", (Term("a"), Term("b"))),
                                              Term("=", (Term("c"), Term("d")))))


def test_not_equal_is_sugar():
    assert t("j != n") == Term("not", (Term("=", (Term("j"), Term("n"))),))
    assert t("j != n") == t("not (j = n)")
    assert t("not j = n") == t("not (j = n)")  # not binds looser than =


def test_parenthesized_comparison_chain():
    assert t("(a=b)=c") == Term("=", (Term("=", (Term("a"), Term("b"))), Term("c")))


def test_application_terms():
    assert t("F(i, j+1)") == Term("F", (Term("i"), Term("+", (Term("j"), Term("1")))))
    assert t("c()") == Term("c")


def test_parse_errors_carry_position():
    with pytest.raises(ParseError, match="line 2"):
        parse("x := y\n:= z")
    with pytest.raises(ParseError, match="column"):
        parse_term("a $ b")
    with pytest.raises(ParseError):
        parse("[ x := y")  # unbalanced
    with pytest.raises(ParseError):
        parse("case q of")  # no rows
    with pytest.raises(ParseError):
        parse("case q, r of when true then x := y")  # row length mismatch
    with pytest.raises(ParseError):
        parse("x := y z := w")  # trailing junk


def sorting_vocab():
    return Vocabulary([
        Symbol("true", 0, STATIC), Symbol("false", 0, STATIC),
        Symbol("undef", 0, STATIC), Symbol("n", 0, STATIC),
        Symbol("i", 0, DYNAMIC), Symbol("j", 0, DYNAMIC),
        Symbol("F", 1, DYNAMIC),
        Symbol("=", 2, STATIC), Symbol(">", 2, STATIC),
        Symbol("+", 2, STATIC), Symbol("and", 2, STATIC),
        Symbol("or", 2, STATIC), Symbol("not", 1, STATIC),
        Symbol("0", 0, STATIC), Symbol("1", 0, STATIC), Symbol("2", 0, STATIC),
    ])


def test_vocabulary_checked_parse():
    vocab = sorting_vocab()
    parse(SORTING_TEXT, vocab)
    with pytest.raises(ParseError, match="unknown symbol"):
        parse("mystery := j", vocab)
    with pytest.raises(ParseError, match="arity"):
        parse("j := F(i, j)", vocab)
    with pytest.raises(ParseError, match="distinguished"):
        parse("case j of when n then j := i", vocab)


def test_check_program_matches_parse_checks():
    vocab = sorting_vocab()
    check_program(parse(SORTING_TEXT), vocab)
    from exact_asm.structures import SpecificationError
    with pytest.raises(SpecificationError):
        check_program(Assign(Term("mystery"), Term("j")), vocab)


# -- printing -----------------------------------------------------------------


def test_print_examples():
    assert print_program(Par(())) == "[ ]"
    assert print_program(Assign(Term("j"), t("i+2"))) == "j := i+2"
    assert print_term(t("j != n")) == "j!=n"
    assert print_term(t("j = n and i+1 != n")) == "j=n and i+1!=n"
    assert print_term(t("F(i) > F(j)")) == "F(i)>F(j)"
    assert print_term(t("not not d")) == "not not d"
    assert print_term(t("not (a and b)")) == "not (a and b)"
    assert print_term(t("a or b or c")) == "a or b or c"
    assert print_term(Term("or", (Term("a"), Term("or", (Term("b"), Term("c")))))) \
        == "a or (b or c)"
    assert print_term(t("(a-b)-c")) == "a-b-c"
    assert print_term(Term("-", (Term("a"), Term("-", (Term("b"), Term("c")))))) \
        == "a-(b-c)"
    assert print_term(t("(a=b)=c")) == "(a=b)=c"


def test_print_nested_program():
    p = parse("if d then [x := y || if b then [ ]]")
    assert print_program(p) == "if d then [x := y || if b then [ ]]"


def test_print_case():
    p = parse("case s of when true then x := y when undef then [ ]")
    assert print_program(p) == "case s of when true then x := y when undef then [ ]"


def test_sorting_round_trip():
    p = parse(SORTING_TEXT)
    assert parse(print_program(p)) == p
    # printing is idempotent
    assert print_program(parse(print_program(p))) == print_program(p)


# -- property: round trip over random ASTs --------------------------------------

nullary = st.sampled_from(["a", "b", "x", "y", "j", "n", "0", "1"]).map(Term)


@st.composite
def terms(draw, depth=3):
    if depth == 0:
        return draw(nullary)
    kind = draw(st.sampled_from(["leaf", "app", "binop", "not", "cmp"]))
    if kind == "leaf":
        return draw(nullary)
    if kind == "app":
        n = draw(st.integers(1, 2))
        args = tuple(draw(terms(depth=depth - 1)) for _ in range(n))
        return Term(draw(st.sampled_from(["F", "G"])), args)
    if kind == "not":
        return Term("not", (draw(terms(depth=depth - 1)),))
    left = draw(terms(depth=depth - 1))
    right = draw(terms(depth=depth - 1))
    if kind == "cmp":
        op = draw(st.sampled_from(["=", "<", ">", "<=", ">="]))
        return Term(op, (left, right))
    op = draw(st.sampled_from(["and", "or", "+", "-", "*"]))
    return Term(op, (left, right))


@st.composite
def programs(draw, depth=3, in_case_row=False):
    if depth == 0:
        return Assign(draw(terms(depth=1)), draw(terms(depth=1)))
    kind = draw(st.sampled_from(["assign", "par", "if", "case"]))
    match kind:
        case "assign":
            return Assign(draw(terms(depth=2)), draw(terms(depth=2)))
        case "par":
            n = draw(st.integers(0, 3))
            return Par(tuple(draw(programs(depth=depth - 1)) for _ in range(n)))
        case "if":
            body = draw(programs(depth=depth - 1, in_case_row=in_case_row))
            return If(draw(terms(depth=2)), body)
        case "case":
            if in_case_row:
                # an unbracketed case inside a case row is grabbed by the
                # inner statement on reparse; the generator brackets it
                return Par((draw(programs(depth=depth - 1)),))
            nq = draw(st.integers(1, 2))
            queries = tuple(draw(terms(depth=1)) for _ in range(nq))
            rows = []
            for _ in range(draw(st.integers(1, 3))):
                lits = tuple(draw(st.sampled_from(["true", "false", "undef"]))
                             for _ in range(nq))
                rows.append(CaseRow(lits, draw(programs(depth=depth - 1,
                                                        in_case_row=True))))
            return Case(queries, tuple(rows))


@given(terms())
def test_term_round_trip(term):
    assert parse_term(print_term(term)) == term


@given(programs())
def test_program_round_trip(program):
    assert parse(print_program(program)) == program


@given(terms())
def test_sort_key_consistent_with_print(term):
    size, text = term_sort_key(term)
    assert text == print_term(term)
    assert size >= 1


# -- critical terms ---------------------------------------------------------------


def test_sorting_critical_terms():
    # all terms in the program, with assignment targets replaced by their
    # proper subterms, plus subterm closure
    p = parse(SORTING_TEXT)
    expected_heads = {t("j != n"), t("j = n and i+1 != n"), t("F(i) > F(j)"),
                      t("i+2"), t("j+1")}
    closure = set()
    for term in expected_heads:
        closure |= term.subterms()
    # F(i) and F(j) also occur as assignment right-hand sides
    assert critical_terms(p) == closure | {t("F(i)"), t("F(j)")}


def test_critical_terms_excludes_pure_lhs():
    p = parse("G(i) := j")
    ct = critical_terms(p)
    assert Term("G", (Term("i"),)) not in ct
    assert Term("i") in ct and Term("j") in ct


def test_iter_assignments():
    p = parse(SORTING_TEXT)
    targets = sorted(print_term(a.lhs) for a in iter_assignments(p))
    assert targets == ["F(i)", "F(j)", "i", "j", "j"]


# -- flatten ----------------------------------------------------------------------


def test_flatten_distributes_over_par():
    p = parse("if c then [x := y || z := w]")
    assert flatten(p) == Par((
        If(Term("c"), Assign(Term("x"), Term("y"))),
        If(Term("c"), Assign(Term("z"), Term("w"))),
    ))


def test_flatten_wraps_assignment():
    p = parse("x := y")
    assert flatten(p) == Par((p,))


def test_flatten_keeps_guarded_skip():
    p = parse("if c then [ ]")
    assert flatten(p) == Par((If(Term("c"), SKIP),))


def test_flatten_rejects_case():
    with pytest.raises(UnsupportedFormError):
        flatten(parse("case q of when true then x := y"))


def test_flatten_sorting_structure():
    flat = flatten(parse(SORTING_TEXT))
    texts = [print_program(c) for c in flat.children]
    assert texts == [
        "if j!=n then if F(i)>F(j) then F(i) := F(j)",
        "if j!=n then if F(i)>F(j) then F(j) := F(i)",
        "if j!=n then j := j+1",
        "if j=n and i+1!=n then i := i+1",
        "if j=n and i+1!=n then j := i+2",
    ]


@given(programs())
def test_flatten_idempotent_on_if_programs(program):
    try:
        once = flatten(program)
    except UnsupportedFormError:
        return
    assert flatten(once) == once
