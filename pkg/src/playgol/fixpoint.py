"""Least-fixpoint evaluation of dyadic definite clauses, one call pattern at a time.

A call ``p(v, Y)`` gets a table entry holding the outputs found so far. New
entries are evaluated as soon as they are first called; a call that reads an
entry still being filled marks the run as cyclic, and cyclic runs repeat
passes over every entry until nothing changes. On a finite state space this
yields exactly the least-fixpoint answers, left recursion included.
"""
from __future__ import annotations

from typing import Callable

# nesting depth past which new entries wait for the pass loop instead
_INLINE_LIMIT = 150


class StepLimit(Exception):
    pass


class Fixpoint:
    def __init__(self, clauses_of: Callable, primitive: Callable, test: Callable,
                 external: Callable | None = None, step_limit: int | None = None):
        self.clauses_of = clauses_of      # name -> clauses, or None if not defined here
        self.primitive = primitive        # name -> callable or None
        self.test = test                  # (name, value) -> bool for monadic predicates
        self.external = external          # (name, value) -> complete answers or None
        self.step_limit = step_limit
        self.steps = 0
        self.table: dict[tuple, dict] = {}
        self.keys: list[tuple] = []
        self.done: set = set()
        self.active: set = set()
        self.depth = 0
        self.cyclic = False
        self.changed = False
        self.root: tuple | None = None
        self.stop: Callable | None = None
        self.stopped = False

    def answers(self, name, value, stop: Callable | None = None) -> tuple:
        """Outputs of ``name(value, Y)`` in discovery order.

        ``stop(out)`` may end the evaluation early once a root answer makes
        further work pointless. Raises StepLimit if the budget runs out.
        """
        fn = self.primitive(name)
        if fn is not None:
            return tuple(fn(value))
        self.root = (name, value)
        self.stop = stop
        try:
            self._call(name, value)
            if self.cyclic or len(self.done) < len(self.keys):
                # an entry may have been read before it was complete: iterate to a fixpoint
                while True:
                    self.changed = False
                    i = 0
                    while i < len(self.keys):
                        self._eval(self.keys[i])
                        i += 1
                    if not self.changed:
                        break
        except _Stop:
            self.stopped = True
        return tuple(self.table[self.root])

    def _tick(self):
        self.steps += 1
        if self.step_limit is not None and self.steps > self.step_limit:
            raise StepLimit

    def _call(self, name, value):
        fn = self.primitive(name)
        if fn is not None:
            return fn(value)
        if self.external is not None:
            hit = self.external(name, value)
            if hit is not None:
                return hit
        key = (name, value)
        entry = self.table.get(key)
        if entry is None:
            if self.clauses_of(name) is None:
                raise KeyError(name)
            entry = self.table[key] = {}
            self.keys.append(key)
            if self.depth < _INLINE_LIMIT:
                self._eval(key)
            else:
                self.cyclic = True
        elif key in self.active or key not in self.done:
            self.cyclic = True
        return tuple(entry)

    def _eval(self, key):
        name, value = key
        entry = self.table[key]
        self.active.add(key)
        self.depth += 1
        try:
            for clause in self.clauses_of(name):
                self._tick()
                for out in self._body(clause.body, 0, {0: value}):
                    if out not in entry:
                        entry[out] = None
                        self.changed = True
                        if key == self.root and self.stop is not None and self.stop(out):
                            raise _Stop
        finally:
            self.depth -= 1
            self.active.discard(key)
        self.done.add(key)

    def _body(self, body, i, env):
        if i == len(body):
            if 1 in env:
                yield env[1]
            return
        lit = body[i]
        if lit.pred.arity == 1:
            v = env.get(lit.args[0])
            if v is not None and self.test(lit.pred.name, v):
                yield from self._body(body, i + 1, env)
            return
        src, dst = lit.args
        v = env.get(src)
        if v is None:
            return
        self._tick()
        bound = env.get(dst)
        for out in self._call(lit.pred.name, v):
            if bound is None:
                env2 = dict(env)
                env2[dst] = out
                yield from self._body(body, i + 1, env2)
            elif bound == out:
                yield from self._body(body, i + 1, env)

    def complete(self) -> dict[tuple, tuple]:
        """Every entry; exact only after a run that ended without StepLimit or ``stop``."""
        return {k: tuple(v) for k, v in self.table.items()}


class _Stop(Exception):
    pass
