"""Predicates, metarules, clauses and programs, plus the textual listing format.

Clause variables are positional: index 0 renders as ``A``, 1 as ``B`` and so
on, numbered by first occurrence (head first).  Dyadic heads are always
``P(A,B)``.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence


class LogicError(ValueError):
    """Raised for ill-formed logical objects."""


class ArityError(LogicError):
    pass


class ParseError(LogicError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class Kind(enum.Enum):
    PRIMITIVE = "primitive"
    TARGET = "learned-target"
    INVENTED = "invented"


@dataclass(frozen=True)
class PredicateSymbol:
    name: str
    arity: int
    kind: Kind = field(default=Kind.PRIMITIVE, compare=False)

    def __post_init__(self):
        if self.arity not in (1, 2):
            raise ArityError(f"{self.name}: arity must be 1 or 2, got {self.arity}")
        if not _NAME.fullmatch(self.name):
            raise LogicError(f"invalid predicate name {self.name!r}")

    def __str__(self):
        return f"{self.name}/{self.arity}"


_NAME = re.compile(r"[a-z][A-Za-z0-9_]*")


def invented_name(parent: str, k: int) -> str:
    if k < 1:
        raise ValueError("invention counter starts at 1")
    return f"{parent}_{k}"


def is_invented_name(name: str, parent: str) -> bool:
    prefix = parent + "_"
    return name.startswith(prefix) and name[len(prefix):].isdigit() and int(name[len(prefix):]) > 0


@dataclass(frozen=True)
class Literal:
    """A predicate applied to clause-local variable indices."""

    pred: PredicateSymbol
    args: tuple[int, ...]

    def __post_init__(self):
        if len(self.args) != self.pred.arity:
            raise ArityError(
                f"{self.pred.name} has arity {self.pred.arity} but got {len(self.args)} arguments")

    def render(self) -> str:
        return f"{self.pred.name}({','.join(var_name(a) for a in self.args)})"


def var_name(index: int) -> str:
    letters = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
    if index < 26:
        return letters[index]
    return letters[index % 26] + str(index // 26)


# -- metarules --------------------------------------------------------------

@dataclass(frozen=True)
class TemplateLiteral:
    pvar: str
    args: tuple[int, ...]


@dataclass(frozen=True)
class MetaRule:
    name: str
    head: TemplateLiteral
    body: tuple[TemplateLiteral, ...]

    def __post_init__(self):
        if tuple(self.head.args) != (0, 1):
            raise LogicError(f"metarule {self.name}: head must be P(A,B)")
        if not self.body:
            raise LogicError(f"metarule {self.name}: empty body")
        for lit in self.body:
            if len(lit.args) not in (1, 2):
                raise ArityError(f"metarule {self.name}: literal arity {len(lit.args)}")
        seen = {0, 1}
        for lit in self.body:
            seen.update(lit.args)
        if set(range(len(seen))) != seen:
            raise LogicError(f"metarule {self.name}: variables must be numbered contiguously")

    @property
    def pvars(self) -> tuple[str, ...]:
        """Second-order variables, head first, in order of first occurrence."""
        out = [self.head.pvar]
        for lit in self.body:
            if lit.pvar not in out:
                out.append(lit.pvar)
        return tuple(out)

    @property
    def body_pvars(self) -> tuple[str, ...]:
        """Second-order variables other than the head's (the ones search must fill)."""
        return self.pvars[1:]

    @property
    def bound_class(self) -> tuple[int, int]:
        """The (i, j) class: max literal arity and body length."""
        return max(len(l.args) for l in (self.head, *self.body)), len(self.body)

    def slot_arity(self, pvar: str) -> int:
        for lit in (self.head, *self.body):
            if lit.pvar == pvar:
                return len(lit.args)
        raise KeyError(pvar)

    def render(self) -> str:
        def lit(t):
            return f"{t.pvar}({','.join(var_name(a) for a in t.args)})"
        return f"{lit(self.head)} <- {', '.join(lit(b) for b in self.body)}"


def _rule(name, spec):
    head, body = spec.split("<-")

    def lit(text):
        m = re.fullmatch(r"\s*([A-Z])\(([A-Z,]+)\)\s*", text)
        return TemplateLiteral(m.group(1), tuple(ord(v) - ord("A") for v in m.group(2).split(",")))

    return MetaRule(name, lit(head), tuple(lit(b) for b in re.split(r"(?<=\)),", body)))


METARULES: dict[str, MetaRule] = {
    r.name: r
    for r in (
        _rule("ident", "P(A,B) <- Q(A,B)"),
        _rule("precon", "P(A,B) <- Q(A),R(A,B)"),
        _rule("postcon", "P(A,B) <- Q(A,B),R(B)"),
        _rule("chain", "P(A,B) <- Q(A,C),R(C,B)"),
        _rule("tailrec", "P(A,B) <- Q(A,C),P(C,B)"),
    )
}


def get_metarules(names: Iterable[str]) -> list[MetaRule]:
    out = []
    for name in names:
        try:
            out.append(METARULES[name])
        except KeyError:
            raise LogicError(f"unknown metarule {name!r}; known: {sorted(METARULES)}") from None
    return out


@dataclass(frozen=True)
class MetaSub:
    metarule: MetaRule
    bindings: tuple[tuple[str, PredicateSymbol], ...]

    @classmethod
    def of(cls, metarule: MetaRule, bindings: Mapping[str, PredicateSymbol]) -> "MetaSub":
        missing = [v for v in metarule.pvars if v not in bindings]
        if missing:
            raise LogicError(f"metasub for {metarule.name} leaves {missing} unbound")
        return cls(metarule, tuple((v, bindings[v]) for v in metarule.pvars))

    def binding(self, pvar: str) -> PredicateSymbol:
        return dict(self.bindings)[pvar]


@dataclass(frozen=True)
class Clause:
    head: Literal
    body: tuple[Literal, ...]
    provenance: MetaSub | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.head.pred.kind is Kind.PRIMITIVE:
            object.__setattr__(self, "head", Literal(
                PredicateSymbol(self.head.pred.name, self.head.pred.arity, Kind.TARGET),
                self.head.args))
        if not self.body:
            raise LogicError("clauses must have a non-empty body")

    def render(self) -> str:
        return f"{self.head.render()}:-{','.join(l.render() for l in self.body)}."

    def __str__(self):
        return self.render()


def instantiate(metasub: MetaSub) -> Clause:
    """Replace the second-order variables of a metarule with bound symbols."""
    rule = metasub.metarule
    b = dict(metasub.bindings)
    for v in rule.pvars:
        if v not in b:
            raise LogicError(f"metasub for {rule.name} leaves {v} unbound")

    def lit(t: TemplateLiteral) -> Literal:
        sym = b[t.pvar]
        if sym.arity != len(t.args):
            raise ArityError(
                f"{rule.name}: {sym.name} has arity {sym.arity}, slot {t.pvar} needs {len(t.args)}")
        return Literal(sym, t.args)

    return Clause(lit(rule.head), tuple(lit(t) for t in rule.body), metasub)


def match_metarule(clause: Clause, rules: Iterable[MetaRule] = METARULES.values()) -> MetaSub | None:
    """Recover the metasub that instantiates to ``clause``, if any.

    Rules with fewer predicate variables are tried first, so a chain clause
    that calls its own head is reported as tail recursion.
    """
    for rule in sorted(rules, key=lambda r: len(r.pvars)):
        if len(rule.body) != len(clause.body):
            continue
        bindings: dict[str, PredicateSymbol] = {}
        ok = True
        for t, l in zip((rule.head, *rule.body), (clause.head, *clause.body)):
            if t.args != l.args or bindings.setdefault(t.pvar, l.pred) != l.pred:
                ok = False
                break
        if ok:
            return MetaSub.of(rule, bindings)
    return None


# -- programs ---------------------------------------------------------------

@dataclass(frozen=True)
class Program:
    target: PredicateSymbol
    clauses: tuple[Clause, ...]

    def __post_init__(self):
        if not self.clauses:
            raise LogicError("programs must be non-empty")
        object.__setattr__(self, "clauses", tuple(self.clauses))

    @property
    def defined(self) -> tuple[str, ...]:
        """Head symbols in order of first definition."""
        return tuple(dict.fromkeys(c.head.pred.name for c in self.clauses))

    @property
    def invented(self) -> frozenset[PredicateSymbol]:
        return frozenset(c.head.pred for c in self.clauses if c.head.pred.kind is Kind.INVENTED)

    def body_symbols(self) -> dict[str, PredicateSymbol]:
        out: dict[str, PredicateSymbol] = {}
        for c in self.clauses:
            for l in c.body:
                out.setdefault(l.pred.name, l.pred)
        return out

    def external_symbols(self) -> dict[str, PredicateSymbol]:
        """Body symbols not defined by this program (must come from BK)."""
        defined = set(self.defined)
        return {k: v for k, v in self.body_symbols().items() if k not in defined}

    def clauses_for(self, name: str) -> list[Clause]:
        return [c for c in self.clauses if c.head.pred.name == name]

    def __len__(self):
        return len(self.clauses)

    def __str__(self):
        return render_program(self)


def check_program(program: Program, max_clauses: int | None = None) -> None:
    """Check well-formedness: invented symbols defined, arities consistent, bound respected."""
    arity: dict[str, int] = {}
    for c in program.clauses:
        for l in (c.head, *c.body):
            if arity.setdefault(l.pred.name, l.pred.arity) != l.pred.arity:
                raise ArityError(f"{l.pred.name} used with arities {arity[l.pred.name]} and {l.pred.arity}")
    defined = set(program.defined)
    for name, sym in program.body_symbols().items():
        if sym.kind is Kind.INVENTED and name not in defined:
            raise LogicError(f"invented predicate {name} is used but never defined")
    if max_clauses is not None and len(program) > max_clauses:
        raise LogicError(f"program has {len(program)} clauses, bound is {max_clauses}")


def render_program(program: Program) -> str:
    """One clause per line, in program order."""
    if not program.clauses:
        raise LogicError("programs must be non-empty")
    return "".join(c.render() + "\n" for c in program.clauses)


# -- parsing ----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<name>[a-z][A-Za-z0-9_]*)|(?P<var>[A-Z][A-Za-z0-9_]*)|(?P<neck>:-)|(?P<punct>[(),.]))")


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.toks: list[tuple[str, str, int]] = []
        n = len(text)
        # strip comments but keep offsets
        clean = re.sub(r"%[^\n]*", lambda m: " " * len(m.group()), text)
        while True:
            while self.pos < n and clean[self.pos].isspace():
                self.pos += 1
            if self.pos >= n:
                break
            m = _TOKEN.match(clean, self.pos)
            if not m or m.end() == self.pos:
                self.error("unexpected character " + repr(clean[self.pos]), self.pos)
            kind = m.lastgroup
            start = m.start(kind)
            self.toks.append((kind, m.group(kind), start))
            self.pos = m.end()
        self.i = 0

    def position(self, offset: int) -> tuple[int, int]:
        line = self.text.count("\n", 0, offset) + 1
        col = offset - (self.text.rfind("\n", 0, offset) + 1) + 1
        return line, col

    def error(self, msg: str, offset: int | None = None):
        if offset is None:
            offset = self.toks[self.i][2] if self.i < len(self.toks) else len(self.text)
        raise ParseError(msg, *self.position(offset))

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, kind: str, value: str | None = None) -> str:
        tok = self.peek()
        if tok is None or tok[0] != kind or (value is not None and tok[1] != value):
            want = value or kind
            self.error(f"expected {want!r}" + (f", found {tok[1]!r}" if tok else ", found end of input"))
        self.i += 1
        return tok[1]


def _parse_literal(lex: _Lexer, varmap: dict[str, int]):
    start = lex.peek()
    name = lex.take("name")
    lex.take("punct", "(")
    args = []
    while True:
        v = lex.take("var")
        args.append(varmap.setdefault(v, len(varmap)))
        tok = lex.peek()
        if tok and tok[1] == ",":
            lex.i += 1
            continue
        lex.take("punct", ")")
        break
    return name, tuple(args), start[2]


def parse_clauses(text: str) -> tuple[list[tuple[tuple, list[tuple]]], _Lexer]:
    """Raw clauses ``[((name, args, offset), [body literals]), ...]`` and the lexer used."""
    lex = _Lexer(text)
    out = []
    while lex.peek() is not None:
        varmap: dict[str, int] = {}
        head = _parse_literal(lex, varmap)
        lex.take("neck")
        body = [_parse_literal(lex, varmap)]
        while True:
            tok = lex.peek()
            if tok and tok[1] == ",":
                lex.i += 1
                body.append(_parse_literal(lex, varmap))
                continue
            lex.take("punct", ".")
            break
        out.append((head, body))
    return out, lex


def parse_program(text: str, kinds: Mapping[str, Kind] | None = None) -> Program:
    """Inverse of :func:`render_program`.

    The first head is the target.  Heads named ``<target>_<k>`` are invented;
    other heads are learned targets and undefined body symbols are declared
    with the arity they are used at.
    """
    raw, lex = parse_clauses(text)
    if not raw:
        raise ParseError("empty program", 1, 1)
    return _build_program(raw, lex, kinds or {})


def _build_program(raw, lex, kinds):
    target_name = raw[0][0][0]
    heads = {h[0] for h, _ in raw}
    arity: dict[str, int] = {}
    for head, body in raw:
        for name, args, off in (head, *body):
            if arity.setdefault(name, len(args)) != len(args):
                raise ParseError(f"{name} used with arities {arity[name]} and {len(args)}",
                                 *lex.position(off))
            if len(args) not in (1, 2):
                raise ParseError(f"{name}: arity {len(args)} not supported", *lex.position(off))

    def sym(name):
        if name in kinds:
            kind = kinds[name]
        elif name in heads:
            kind = Kind.INVENTED if is_invented_name(name, target_name) else Kind.TARGET
        else:
            kind = Kind.PRIMITIVE
        return PredicateSymbol(name, arity[name], kind)

    clauses = []
    for (hname, hargs, hoff), body in raw:
        if hargs != (0, 1):
            raise ParseError("clause head must be of the form p(A,B)", *lex.position(hoff))
        c = Clause(Literal(sym(hname), hargs), tuple(Literal(sym(n), a) for n, a, _ in body))
        clauses.append(Clause(c.head, c.body, match_metarule(c)))
    return Program(sym(target_name), tuple(clauses))


def program_from_metasubs(target: PredicateSymbol, metasubs: Sequence[MetaSub]) -> Program:
    return Program(target, tuple(instantiate(m) for m in metasubs))
