"""Ground terms, vocabularies, and finite partial first-order structures.

A state is a finite partial structure: a base set of elements together with a
partial interpretation table per vocabulary symbol.  Looking up an undefined
point does not produce an error value inside the structure; it makes the whole
evaluation come out as the distinguished non-value ``HANG`` (the black hole).
``undef`` is different: it is an ordinary element of the base set that happens
to be the default answer of honest-but-partial functions, and computation can
inspect it (``undef = undef`` is true).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence


class ExactAsmError(Exception):
    """Base class for every error this package raises on purpose."""


class SpecificationError(ExactAsmError):
    """A vocabulary, term, state, or update set violates a structural contract."""


BOOLEAN_CONNECTIVES = ("and", "or", "not")
REQUIRED_DISTINGUISHED = ("true", "false", "undef")

STATIC = "static"
DYNAMIC = "dynamic"


@dataclass(frozen=True)
class Symbol:
    name: str
    arity: int
    kind: str  # STATIC or DYNAMIC

    def __post_init__(self) -> None:
        if self.kind not in (STATIC, DYNAMIC):
            raise SpecificationError(f"symbol {self.name}: bad kind {self.kind!r}")
        if self.arity < 0:
            raise SpecificationError(f"symbol {self.name}: negative arity")


class Vocabulary:
    """A finite set of function symbols plus the distinguished nullary constants.

    The distinguished constants (at least true, false, undef) are static
    nullaries with pairwise distinct values in every state; they are the value
    alphabet K used by case statements.
    """

    def __init__(self, symbols: Iterable[Symbol],
                 distinguished: Sequence[str] = REQUIRED_DISTINGUISHED):
        table: dict[str, Symbol] = {}
        for sym in symbols:
            if sym.name in table:
                raise SpecificationError(f"duplicate symbol {sym.name}")
            table[sym.name] = sym
        for name in REQUIRED_DISTINGUISHED:
            if name not in distinguished:
                raise SpecificationError(f"distinguished constants must include {name}")
        seen = set()
        for name in distinguished:
            if name in seen:
                raise SpecificationError(f"duplicate distinguished constant {name}")
            seen.add(name)
            sym = table.get(name)
            if sym is None:
                raise SpecificationError(f"distinguished constant {name} not in vocabulary")
            if sym.arity != 0 or sym.kind != STATIC:
                raise SpecificationError(
                    f"distinguished constant {name} must be a static nullary")
        self._symbols = table
        self.distinguished = tuple(distinguished)
        self._key = (tuple(sorted((s.name, s.arity, s.kind) for s in table.values())),
                     self.distinguished)

    def __contains__(self, name: str) -> bool:
        return name in self._symbols

    def __iter__(self) -> Iterator[Symbol]:
        return iter(self._symbols.values())

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Vocabulary) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        return f"Vocabulary({len(self._symbols)} symbols, K={list(self.distinguished)})"

    def require(self, name: str) -> Symbol:
        sym = self._symbols.get(name)
        if sym is None:
            raise SpecificationError(f"unknown symbol {name}")
        return sym

    def symbols(self) -> tuple[Symbol, ...]:
        return tuple(self._symbols.values())

    def dynamic_symbols(self) -> tuple[Symbol, ...]:
        return tuple(s for s in self._symbols.values() if s.kind == DYNAMIC)

    def is_distinguished(self, name: str) -> bool:
        return name in self.distinguished


class Term:
    """A ground first-order term.

    Terms are interned: building the same head/args twice yields the same
    object, so equality is identity and terms hash in O(1).
    """

    __slots__ = ("head", "args")
    _pool: dict = {}

    def __new__(cls, head: str, args: Sequence["Term"] = ()):
        args = tuple(args)
        key = (head, args)
        cached = cls._pool.get(key)
        if cached is not None:
            return cached
        term = super().__new__(cls)
        term.head = head
        term.args = args
        cls._pool[key] = term
        return term

    def __repr__(self) -> str:
        if not self.args:
            return self.head
        return f"{self.head}({', '.join(map(repr, self.args))})"

    def subterms(self) -> frozenset["Term"]:
        """Every subterm, this term included."""
        out = {self}
        for a in self.args:
            out |= a.subterms()
        return frozenset(out)

    def proper_subterms(self) -> frozenset["Term"]:
        out: set[Term] = set()
        for a in self.args:
            out |= a.subterms()
        return frozenset(out)


def subterm_closure(terms: Iterable[Term]) -> frozenset[Term]:
    out: set[Term] = set()
    for t in terms:
        out |= t.subterms()
    return frozenset(out)


def check_term(term: Term, vocabulary: Vocabulary) -> None:
    """Raise SpecificationError unless every symbol exists with the right arity."""
    sym = vocabulary.require(term.head)
    if sym.arity != len(term.args):
        raise SpecificationError(
            f"symbol {term.head} has arity {sym.arity}, applied to {len(term.args)} args")
    for a in term.args:
        check_term(a, vocabulary)


class _Hang:
    """The black hole: the non-value an evaluation collapses to when it
    touches an undefined point.  Not an element of any base set."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "HANG"

    def __bool__(self) -> bool:
        return False


HANG = _Hang()

# An evaluation result: an element id (int) or HANG.
EvalResult = "int | _Hang"


class PartialStructure:
    """An immutable finite partial structure over a vocabulary.

    Element ids are 0..len(base_names)-1; base_names gives each element its
    stable printable name.  One element must be named "undef" and be the value
    of the undef constant.  interp maps each symbol name to a finite table
    {arg-id-tuple: value-id}; absent points evaluate to HANG.
    """

    __slots__ = ("vocabulary", "base_names", "interp", "is_initial",
                 "is_terminal", "_key", "_hash")

    def __init__(self, vocabulary: Vocabulary, base_names: Sequence[str],
                 interp: Mapping[str, Mapping[tuple[int, ...], int]],
                 is_initial: bool = False, is_terminal: bool = False):
        base_names = tuple(base_names)
        if len(set(base_names)) != len(base_names):
            raise SpecificationError("base element names must be unique")
        if "undef" not in base_names:
            raise SpecificationError('the base set must name an element "undef"')
        n = len(base_names)
        tables: dict[str, dict[tuple[int, ...], int]] = {}
        for sym in vocabulary:
            table = dict(interp.get(sym.name, {}))
            for args, value in table.items():
                if len(args) != sym.arity:
                    raise SpecificationError(
                        f"{sym.name}: point {args} does not match arity {sym.arity}")
                if not all(0 <= a < n for a in args) or not 0 <= value < n:
                    raise SpecificationError(
                        f"{sym.name}: point {args} -> {value} leaves the base set")
            tables[sym.name] = table
        for name in interp:
            if name not in vocabulary:
                raise SpecificationError(f"interpretation given for unknown symbol {name}")

        self.vocabulary = vocabulary
        self.base_names = base_names
        self.interp = tables
        self.is_initial = bool(is_initial)
        self.is_terminal = bool(is_terminal)

        # Distinguished constants: total, pairwise distinct, undef self-naming.
        values = {}
        for name in vocabulary.distinguished:
            if () not in tables[name]:
                raise SpecificationError(f"distinguished constant {name} is undefined")
            values[name] = tables[name][()]
        if len(set(values.values())) != len(values):
            raise SpecificationError("distinguished constants must denote distinct elements")
        if base_names[values["undef"]] != "undef":
            raise SpecificationError('the undef constant must denote the element named "undef"')

        # Where defined, "=" agrees with true identity.
        if "=" in vocabulary:
            eq = vocabulary.require("=")
            if eq.arity != 2:
                raise SpecificationError('"=" must be binary')
            t, f = values["true"], values["false"]
            for (a, b), v in tables["="].items():
                if v != (t if a == b else f):
                    raise SpecificationError(
                        f'"=" disagrees with identity at ({base_names[a]}, {base_names[b]})')

        self._key = (vocabulary, base_names,
                     tuple(sorted((name, tuple(sorted(table.items())))
                                  for name, table in tables.items())),
                     self.is_initial, self.is_terminal)
        self._hash = hash(self._key)

    # -- identity ---------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PartialStructure) and self._key == other._key

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"PartialStructure({len(self.base_names)} elements)"

    # -- conveniences ------------------------------------------------------

    @property
    def base(self) -> range:
        return range(len(self.base_names))

    def element(self, name: str) -> int:
        try:
            return self.base_names.index(name)
        except ValueError:
            raise SpecificationError(f"no base element named {name}") from None

    def distinguished_value(self, name: str) -> int:
        if name not in self.vocabulary.distinguished:
            raise SpecificationError(f"{name} is not a distinguished constant")
        return self.interp[name][()]

    @property
    def true_value(self) -> int:
        return self.interp["true"][()]

    @property
    def false_value(self) -> int:
        return self.interp["false"][()]

    def distinguished_values(self) -> dict[str, int]:
        return {name: self.interp[name][()] for name in self.vocabulary.distinguished}

    def with_flags(self, is_initial: bool | None = None,
                   is_terminal: bool | None = None) -> "PartialStructure":
        return PartialStructure(
            self.vocabulary, self.base_names, self.interp,
            self.is_initial if is_initial is None else is_initial,
            self.is_terminal if is_terminal is None else is_terminal)


def eval_term(state: PartialStructure, term: Term,
              memo: dict | None = None):
    """Evaluate a ground term.  Strict in HANG: any undefined point anywhere
    inside the term makes the whole result HANG."""
    if memo is None:
        memo = {}
    hit = memo.get(term)
    if hit is not None:
        return hit
    sym = state.vocabulary.require(term.head)
    if sym.arity != len(term.args):
        raise SpecificationError(
            f"symbol {term.head} has arity {sym.arity}, applied to {len(term.args)} args")
    vals = []
    result = None
    for a in term.args:
        v = eval_term(state, a, memo)
        if v is HANG:
            result = HANG
            break
        vals.append(v)
    if result is None:
        result = state.interp[term.head].get(tuple(vals), HANG)
    memo[term] = result
    return result


def value_table(state: PartialStructure, terms: Iterable[Term]) -> dict[Term, object]:
    """Evaluate many terms over one state, sharing the memo."""
    memo: dict = {}
    return {t: eval_term(state, t, memo) for t in terms}


def agree(x: PartialStructure, y: PartialStructure, terms: Iterable[Term]) -> bool:
    """True iff every term evaluates identically in both states.

    HANG only matches HANG: a hanging evaluation never agrees with a value,
    undef included.
    """
    mx: dict = {}
    my: dict = {}
    return all(eval_term(x, t, mx) == eval_term(y, t, my) for t in terms)


Location = "tuple[str, tuple[int, ...]]"


def apply_updates(state: PartialStructure,
                  updates: Iterable[tuple[tuple[str, tuple[int, ...]], int]]
                  ) -> PartialStructure:
    """Install a consistent set of ((symbol, args), value) updates.

    Only dynamic symbols may move, and both the arguments and the value must
    already live in the base set (computation never invents elements).
    """
    updates = set(updates)
    seen: dict[tuple[str, tuple[int, ...]], int] = {}
    n = len(state.base_names)
    for (name, args), value in updates:
        sym = state.vocabulary.require(name)
        if sym.kind != DYNAMIC:
            raise SpecificationError(f"cannot update static symbol {name}")
        if len(args) != sym.arity:
            raise SpecificationError(f"update at {name}{args}: arity mismatch")
        if not all(0 <= a < n for a in args) or not 0 <= value < n:
            raise SpecificationError(f"update at {name}{args}: outside the base set")
        loc = (name, tuple(args))
        if loc in seen and seen[loc] != value:
            raise SpecificationError(f"inconsistent updates at location {name}{args}")
        seen[loc] = value
    interp = {name: dict(table) for name, table in state.interp.items()}
    for (name, args), value in seen.items():
        interp[name][args] = value
    return PartialStructure(state.vocabulary, state.base_names, interp,
                            state.is_initial, state.is_terminal)


def rename_elements(state: PartialStructure, mapping: Sequence[int],
                    new_names: Sequence[str] | None = None) -> PartialStructure:
    """Push the structure through a base-set bijection (id i -> mapping[i])."""
    n = len(state.base_names)
    if sorted(mapping) != list(range(n)):
        raise SpecificationError("rename mapping must be a bijection of the base set")
    names = list(new_names) if new_names is not None else [""] * n
    if new_names is None:
        for i, name in enumerate(state.base_names):
            names[mapping[i]] = name
    interp = {
        name: {tuple(mapping[a] for a in args): mapping[v] for args, v in table.items()}
        for name, table in state.interp.items()
    }
    return PartialStructure(state.vocabulary, names, interp,
                            state.is_initial, state.is_terminal)


def isomorphisms(x: PartialStructure, y: PartialStructure) -> Iterator[tuple[int, ...]]:
    """Yield every base-set bijection mapping x's tables exactly onto y's.

    The bijection must carry each table point-for-point (domains included), so
    partiality is respected.  Nullary symbols pin their values first; the
    remaining elements are searched exhaustively (states here are desk-scale).
    """
    if x.vocabulary != y.vocabulary:
        return
    n = len(x.base_names)
    if n != len(y.base_names):
        return
    pin: dict[int, int] = {}
    for sym in x.vocabulary:
        if sym.arity != 0:
            continue
        vx = x.interp[sym.name].get(())
        vy = y.interp[sym.name].get(())
        if (vx is None) != (vy is None):
            return
        if vx is None:
            continue
        if vx in pin and pin[vx] != vy:
            return
        pin[vx] = vy
    if len(set(pin.values())) != len(pin):
        return
    free_src = [i for i in range(n) if i not in pin]
    used = set(pin.values())
    free_dst = [i for i in range(n) if i not in used]

    def consistent(mapping: list[int]) -> bool:
        for sym in x.vocabulary:
            tx, ty = x.interp[sym.name], y.interp[sym.name]
            if len(tx) != len(ty):
                return False
            for args, value in tx.items():
                point = tuple(mapping[a] for a in args)
                if ty.get(point) != mapping[value]:
                    return False
        return True

    for perm in itertools.permutations(free_dst):
        mapping = [0] * n
        for src, dst in pin.items():
            mapping[src] = dst
        for src, dst in zip(free_src, perm):
            mapping[src] = dst
        if consistent(mapping):
            yield tuple(mapping)


def isomorphic(x: PartialStructure, y: PartialStructure) -> bool:
    return next(isomorphisms(x, y), None) is not None


# -- state files -----------------------------------------------------------

def vocabulary_to_json(vocabulary: Vocabulary) -> dict:
    return {
        "symbols": [{"name": s.name, "arity": s.arity, "kind": s.kind}
                    for s in sorted(vocabulary.symbols(), key=lambda s: s.name)],
        "distinguished": list(vocabulary.distinguished),
    }


def vocabulary_from_json(data: dict) -> Vocabulary:
    try:
        symbols = [Symbol(d["name"], int(d["arity"]), d["kind"]) for d in data["symbols"]]
        distinguished = list(data["distinguished"])
    except (KeyError, TypeError) as exc:
        raise SpecificationError(f"malformed vocabulary block: {exc}") from None
    return Vocabulary(symbols, distinguished)


def state_to_json(state: PartialStructure, name: str | None = None) -> dict:
    names = state.base_names
    interp = {
        sym: sorted([[list(names[a] for a in args), names[value]]
                     for args, value in table.items()])
        for sym, table in state.interp.items() if table
    }
    out: dict = {
        "vocabulary": vocabulary_to_json(state.vocabulary),
        "base": list(names),
        "interp": interp,
        "flags": {"initial": state.is_initial, "terminal": state.is_terminal},
    }
    if name is not None:
        out["name"] = name
    return out


def state_from_json(data: dict, vocabulary: Vocabulary | None = None) -> PartialStructure:
    try:
        vocab = vocabulary if vocabulary is not None else vocabulary_from_json(data["vocabulary"])
        base = list(data["base"])
        index = {name: i for i, name in enumerate(base)}
        interp: dict[str, dict[tuple[int, ...], int]] = {}
        for sym, rows in data.get("interp", {}).items():
            table = {}
            for args, value in rows:
                table[tuple(index[a] for a in args)] = index[value]
            interp[sym] = table
        flags = data.get("flags", {})
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecificationError(f"malformed state file: {exc}") from None
    return PartialStructure(vocab, base, interp,
                            bool(flags.get("initial", False)),
                            bool(flags.get("terminal", False)))


def load_state(path: str) -> PartialStructure:
    with open(path, "r", encoding="utf-8") as fh:
        return state_from_json(json.load(fh))


def save_state(state: PartialStructure, path: str, name: str | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(state_to_json(state, name), fh, indent=2, sort_keys=True)
        fh.write("\n")
