"""Background knowledge: primitive relations plus learned programs."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Iterable

from .fixpoint import Fixpoint, StepLimit
from .logic import Clause, Kind, LogicError, PredicateSymbol, Program


class Pattern:
    """An output constraint that is not a single ground value.

    ``viable`` must be admissible: returning False promises that no state
    reachable from ``value`` by any predicate in the domain can match.
    """

    def matches(self, value: Any) -> bool:
        raise NotImplementedError

    def viable(self, value: Any) -> bool:
        return True


def matches(target, value) -> bool:
    if target is None:
        return True
    if isinstance(target, Pattern):
        return target.matches(value)
    return target == value


@dataclass(frozen=True)
class Primitive:
    """A domain relation.

    Dyadic ``fn(state)`` returns a tuple of successor states (empty on
    failure); monadic ``fn(state)`` returns a bool.
    """

    name: str
    arity: int
    fn: Callable

    @property
    def symbol(self) -> PredicateSymbol:
        return PredicateSymbol(self.name, self.arity, Kind.PRIMITIVE)


class ClosureError(LogicError):
    """A program refers to a predicate that is not defined anywhere."""


@dataclass
class _Entry:
    program: Program
    reusable: tuple[str, ...]
    task: str
    depth: int | None = None
    elapsed_ms: float | None = None


class BKRegistry:
    """Primitives and learned programs, with the reusable body-predicate list.

    Reusable symbols keep insertion order: primitives first, then learned
    symbols in acquisition order.
    """

    # cached answers (summed over entries) kept before the cache is dropped
    memo_limit = 2_000_000
    eval_step_limit = 100_000

    def __init__(self, primitives: Iterable[Primitive] = ()):
        self.primitives: dict[str, Primitive] = {}
        self.definitions: dict[str, tuple[Clause, ...]] = {}
        self.entries: list[_Entry] = []
        self._reusable: dict[str, PredicateSymbol] = {}
        self._memo: dict = {}
        self._memo_size = 0
        self._frozen = False
        # executor steps spent on learned definitions, for callers that budget work
        self.eval_steps = 0
        for p in primitives:
            self.add_primitive(p)

    # -- construction -------------------------------------------------------

    def add_primitive(self, prim: Primitive) -> None:
        self._check_mutable()
        if prim.name in self.primitives or prim.name in self.definitions:
            raise LogicError(f"duplicate predicate name {prim.name!r}")
        if prim.arity not in (1, 2):
            raise LogicError(f"{prim.name}: arity must be 1 or 2")
        self.primitives[prim.name] = prim
        self._reusable[prim.name] = prim.symbol

    def add_program(self, program: Program, reusable: Iterable[str] | None = None, *,
                    task: str | None = None, depth: int | None = None,
                    elapsed_ms: float | None = None) -> None:
        """Register every definition of ``program``; mark ``reusable`` (default all) callable."""
        self._check_mutable()
        defined = program.defined
        for name in defined:
            if name in self.primitives or name in self.definitions:
                raise LogicError(f"duplicate predicate name {name!r}")
        for name, sym in program.external_symbols().items():
            if name not in self.primitives and name not in self.definitions:
                raise ClosureError(f"{program.target.name}: body symbol {name} is not in BK")
            if self.arity(name) != sym.arity:
                raise LogicError(f"{name}: arity mismatch with BK")
        reusable = tuple(defined if reusable is None else reusable)
        for name in reusable:
            if name not in defined:
                raise LogicError(f"{name} is not defined by the program")
        for name in defined:
            self.definitions[name] = tuple(program.clauses_for(name))
        for name in reusable:
            head = program.clauses_for(name)[0].head.pred
            self._reusable[name] = head
        self.entries.append(_Entry(program, reusable, task or program.target.name, depth, elapsed_ms))

    def copy(self) -> "BKRegistry":
        new = BKRegistry.__new__(BKRegistry)
        new.primitives = dict(self.primitives)
        new.definitions = dict(self.definitions)
        new.entries = list(self.entries)
        new._reusable = dict(self._reusable)
        # learned semantics never change once registered, so cached outputs stay valid
        new._memo = dict(self._memo)
        new._memo_size = self._memo_size
        new._frozen = False
        new.eval_steps = 0
        return new

    def freeze(self) -> "BKRegistry":
        self._frozen = True
        return self

    def _check_mutable(self):
        if self._frozen:
            raise LogicError("registry is frozen")

    # -- queries ------------------------------------------------------------

    def __contains__(self, name: str) -> bool:
        return name in self.primitives or name in self.definitions

    def arity(self, name: str) -> int:
        if name in self.primitives:
            return self.primitives[name].arity
        if name in self.definitions:
            return self.definitions[name][0].head.pred.arity
        raise ClosureError(f"unknown predicate {name}")

    @property
    def learned(self) -> dict[str, Program]:
        return {e.program.target.name: e.program for e in self.entries}

    @property
    def reusable(self) -> tuple[PredicateSymbol, ...]:
        return tuple(self._reusable.values())

    def reusable_names(self, arity: int | None = None) -> list[str]:
        return [s.name for s in self._reusable.values() if arity is None or s.arity == arity]

    def is_reusable(self, name: str) -> bool:
        return name in self._reusable

    def check_closed(self, program: Program) -> None:
        for name, sym in program.external_symbols().items():
            if name not in self:
                raise ClosureError(f"{program.target.name}: body symbol {name} is not defined")
            if self.arity(name) != sym.arity:
                raise LogicError(f"{name}: arity mismatch with BK")

    # -- execution of learned definitions -------------------------------------

    def outputs(self, name: str, value) -> tuple:
        """All outputs of a dyadic BK predicate on ``value`` (memoized for learned ones)."""
        prim = self.primitives.get(name)
        if prim is not None:
            return prim.fn(value)
        hit = self._memo.get((name, value))
        if hit is not None:
            return hit
        fp = Fixpoint(self.definitions.get, self._primitive_fn, self.test, self._cached,
                      self.eval_step_limit)
        try:
            out = fp.answers(name, value)
        except StepLimit:
            # a truncated answer set is not the fixpoint; return it uncached
            self.eval_steps += fp.steps
            return tuple(fp.table[(name, value)])
        self.eval_steps += fp.steps
        done = fp.complete()
        size = sum(len(v) + 1 for v in done.values())
        if self._memo_size + size > self.memo_limit:
            self._memo.clear()
            self._memo_size = 0
        self._memo.update(done)
        self._memo_size += size
        return out

    def _cached(self, name, value):
        return self._memo.get((name, value))

    def _primitive_fn(self, name):
        prim = self.primitives.get(name)
        return prim.fn if prim is not None and prim.arity == 2 else None

    def test(self, name: str, value) -> bool:
        return bool(self.primitives[name].fn(value))


