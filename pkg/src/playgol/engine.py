"""Metarule-guided meta-interpretive learner.

The search proves the positive examples one after the other while building a
program, in continuation-passing style: every proof routine takes a success
continuation ``k(output, prog)`` and returns whatever the final continuation
returns, or ``None`` to backtrack.  A program under construction is
``(clauses, invented)`` where each clause is ``(rule_index, head, slots)`` and
``slots`` holds the body symbols chosen so far (``None`` = not yet chosen).
A recursive call may reuse a clause whose later slots are still open; the
binding it makes is threaded back through ``prog``, like a shared Prolog
variable.

With ``SolveConfig.ordered`` the target and the invented symbols are ranked
in order of creation, and a body slot may only take a symbol ranked after
the clause's head. Recursion is then only possible through a metarule that
names its own head variable in the body (tailrec). This is the usual
Metagol ordering and shrinks the search a great deal.
"""
from __future__ import annotations

import enum
import sys
import time
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

from .bk import BKRegistry, Pattern, matches
from .interpreter import DEFAULT_STEP_BUDGET, derivable
from .logic import (Kind, LogicError, MetaRule, MetaSub, PredicateSymbol, Program, get_metarules,
                    instantiate, invented_name)


@dataclass(frozen=True)
class Atom:
    """A ground example ``pred(input, output)``; ``output`` may be a :class:`Pattern`."""

    pred: str
    input: Any
    output: Any

    @property
    def args(self) -> tuple:
        return (self.input, self.output)


@dataclass(frozen=True)
class Task:
    name: str
    positives: tuple[Atom, ...]
    negatives: tuple[Atom, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "positives", tuple(self.positives))
        object.__setattr__(self, "negatives", tuple(self.negatives))
        if not self.positives:
            raise LogicError(f"task {self.name}: no positive examples")
        for a in (*self.positives, *self.negatives):
            if a.pred != self.name:
                raise LogicError(f"task {self.name}: example for predicate {a.pred}")
        if set(self.positives) & set(self.negatives):
            raise LogicError(f"task {self.name}: an example is both positive and negative")
        PredicateSymbol(self.name, 2)

    @classmethod
    def from_pairs(cls, name: str, positives: Iterable[tuple], negatives: Iterable[tuple] = ()) -> "Task":
        return cls(name, tuple(Atom(name, x, y) for x, y in positives),
                   tuple(Atom(name, x, y) for x, y in negatives))


@dataclass(frozen=True)
class SolveConfig:
    metarules: tuple[str, ...] = ("ident", "chain")
    max_clauses: int = 5
    deadline: float = 60.0
    allow_invention: bool = True
    # proof steps plus BK evaluation steps; a deterministic stand-in for the deadline
    max_steps: int | None = None
    max_depth: int = 64
    step_budget: int = DEFAULT_STEP_BUDGET
    # a body slot may take the target or an invented symbol only if it ranks after the head
    ordered: bool = False

    def __post_init__(self):
        object.__setattr__(self, "metarules", tuple(self.metarules))
        if self.max_clauses < 1:
            raise ValueError("max_clauses must be >= 1")
        if not self.deadline > 0:
            raise ValueError("deadline must be positive")
        if self.max_steps is not None and self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")
        get_metarules(self.metarules)


class Result(enum.Enum):
    SOLUTION = "solved"
    EXHAUSTED = "exhausted"
    TIMED_OUT = "timed_out"


@dataclass
class SolveStats:
    clauses_tried: int = 0
    proofs_attempted: int = 0
    # executor steps inside learned BK definitions; they count against max_steps too
    eval_steps: int = 0
    elapsed: float = 0.0
    depth: int = 0


@dataclass
class SolveOutcome:
    result: Result
    program: Program | None = None
    stats: SolveStats = field(default_factory=SolveStats)

    @property
    def solved(self) -> bool:
        return self.result is Result.SOLUTION


class _Timeout(Exception):
    pass


@dataclass(frozen=True)
class _Lit:
    slot: int        # index into the clause's slots, -1 for the head symbol
    monadic: bool
    src: int
    dst: int


class _Rule:
    def __init__(self, rule: MetaRule):
        self.rule = rule
        pvars = rule.body_pvars
        self.nslots = len(pvars)
        self.slot_monadic = tuple(rule.slot_arity(v) == 1 for v in pvars)
        lits = []
        bound = {0}
        for t in rule.body:
            slot = -1 if t.pvar == rule.head.pvar else pvars.index(t.pvar)
            if len(t.args) == 1:
                if t.args[0] not in bound:
                    raise LogicError(f"{rule.name}: monadic literal on an unbound variable")
                lits.append(_Lit(slot, True, t.args[0], t.args[0]))
            else:
                if t.args[0] not in bound:
                    raise LogicError(f"{rule.name}: literal input variable is not bound left to right")
                bound.add(t.args[1])
                lits.append(_Lit(slot, False, t.args[0], t.args[1]))
        if 1 not in bound:
            raise LogicError(f"{rule.name}: body never binds the head output")
        self.lits = tuple(lits)


class _Search:
    def __init__(self, task: Task, bk: BKRegistry, rules: Sequence[_Rule], max_clauses: int,
                 cfg: SolveConfig, stats: SolveStats, deadline_at: float, step_limit: int | None):
        self.task = task
        self.target = task.name
        self.bk = bk
        self.rules = rules
        self.max_clauses = max_clauses
        self.cfg = cfg
        self.stats = stats
        self.deadline_at = deadline_at
        self.step_limit = step_limit
        self.prims = {n: p.fn for n, p in bk.primitives.items() if p.arity == 2}
        self.learned = {n for n in bk.definitions}
        self.dyadic = bk.reusable_names(2)
        self.monadic = bk.reusable_names(1)
        self.stack: set = set()
        self.clock = time.monotonic
        self.patterned = any(isinstance(e.output, Pattern) for e in (*task.positives, *task.negatives))

    # -- goals -----------------------------------------------------------

    def prove(self, pred, a, tgt, prog, depth, k):
        stats = self.stats
        stats.proofs_attempted += 1
        n = stats.proofs_attempted
        if n & 63 == 0:
            if (self.step_limit is not None and n + stats.eval_steps > self.step_limit) \
                    or self.clock() > self.deadline_at:
                raise _Timeout
        if self.patterned and tgt is not None and isinstance(tgt, Pattern) and not tgt.viable(a):
            return None
        fn = self.prims.get(pred)
        if fn is not None:
            if tgt is None:
                for b in fn(a):
                    r = k(b, prog)
                    if r is not None:
                        return r
            else:
                for b in fn(a):
                    if b == tgt or (self.patterned and matches(tgt, b)):
                        r = k(b, prog)
                        if r is not None:
                            return r
            return None
        if pred in self.learned:
            before = self.bk.eval_steps
            outs = self.bk.outputs(pred, a)
            if self.bk.eval_steps != before:
                stats.eval_steps += self.bk.eval_steps - before
                if self.step_limit is not None and n + stats.eval_steps > self.step_limit:
                    raise _Timeout
            for b in outs:
                if tgt is None or b == tgt or (self.patterned and matches(tgt, b)):
                    r = k(b, prog)
                    if r is not None:
                        return r
            return None
        return self.prove_head(pred, a, tgt, prog, depth, k)

    def prove_head(self, pred, a, tgt, prog, depth, k):
        key = (pred, a, tgt)
        stack = self.stack
        if key in stack or depth >= self.cfg.max_depth:
            return None
        stack.add(key)

        def done(b, prog2):
            stack.discard(key)
            try:
                return k(b, prog2)
            finally:
                stack.add(key)

        try:
            clauses = prog[0]
            for ci, cl in enumerate(clauses):
                if cl[1] == pred:
                    r = self.prove_body(ci, 0, (a, None, None), tgt, prog, depth, done)
                    if r is not None:
                        return r
            if len(clauses) < self.max_clauses:
                ci = len(clauses)
                for ri, rule in enumerate(self.rules):
                    self.stats.clauses_tried += 1
                    prog2 = (clauses + ((ri, pred, (None,) * rule.nslots),), prog[1])
                    r = self.prove_body(ci, 0, (a, None, None), tgt, prog2, depth, done)
                    if r is not None:
                        return r
            return None
        finally:
            stack.discard(key)

    # -- clause bodies -----------------------------------------------------

    def prove_body(self, ci, li, env, tgt, prog, depth, k):
        clause = prog[0][ci]
        rule = self.rules[clause[0]]
        if li == len(rule.lits):
            return k(env[1], prog)
        lit = rule.lits[li]
        name = clause[1] if lit.slot < 0 else clause[2][lit.slot]
        if lit.monadic:
            v = env[lit.src]
            if name is not None:
                if self.bk.test(name, v):
                    return self.prove_body(ci, li + 1, env, tgt, prog, depth, k)
                return None
            for q in self.monadic:
                if self.bk.test(q, v):
                    r = self.prove_body(ci, li + 1, env, tgt, _bind(prog, ci, lit.slot, q), depth, k)
                    if r is not None:
                        return r
            return None

        v = env[lit.src]
        out = lit.dst
        t = env[out]
        if t is None and out == 1:
            t = tgt

        def next_lit(b, prog2):
            if env[out] is None:
                env2 = list(env)
                env2[out] = b
                env2 = tuple(env2)
            else:
                env2 = env
            return self.prove_body(ci, li + 1, env2, tgt, prog2, depth, k)

        if name is not None:
            return self.prove(name, v, t, prog, depth + 1, next_lit)
        for q in self.dyadic:
            r = self.prove(q, v, t, _bind(prog, ci, lit.slot, q), depth + 1, next_lit)
            if r is not None:
                return r
        clauses, invented = prog
        if self.cfg.ordered:
            head = clause[1]
            cands = invented[invented.index(head) + 1:] if head != self.target else invented
        else:
            cands = (self.target, *invented)
        for q in cands:
            r = self.prove(q, v, t, _bind(prog, ci, lit.slot, q), depth + 1, next_lit)
            if r is not None:
                return r
        if self.cfg.allow_invention and len(clauses) < self.max_clauses:
            q = self.fresh_name(invented)
            prog2 = _bind(prog, ci, lit.slot, q)
            prog2 = (prog2[0], invented + (q,))
            return self.prove(q, v, t, prog2, depth + 1, next_lit)
        return None

    def fresh_name(self, invented):
        k = len(invented) + 1
        while True:
            name = invented_name(self.target, k)
            if name not in self.bk and name not in invented:
                return name
            k += 1

    # -- examples ----------------------------------------------------------

    def run(self):
        positives = self.task.positives

        def prove_from(i, prog):
            if i == len(positives):
                return self.check_negatives(prog)
            ex = positives[i]
            return self.prove_head(self.target, ex.input, ex.output, prog, 0,
                                   lambda b, prog2: prove_from(i + 1, prog2))

        return prove_from(0, ((), ()))

    def check_negatives(self, prog):
        if not self.task.negatives:
            return prog
        program = self.extract(prog)
        for ex in self.task.negatives:
            if derivable(program, self.bk, ex.input, ex.output, self.cfg.step_budget) is not False:
                return None
        return prog

    def extract(self, prog) -> Program:
        clauses, invented = prog
        inv = set(invented)

        def sym(name, arity=2):
            if name == self.target:
                return PredicateSymbol(name, 2, Kind.TARGET)
            if name in inv:
                return PredicateSymbol(name, 2, Kind.INVENTED)
            if name in self.bk.primitives:
                return PredicateSymbol(name, arity, Kind.PRIMITIVE)
            return PredicateSymbol(name, arity, Kind.TARGET)

        out = []
        for ri, head, slots in clauses:
            rule = self.rules[ri].rule
            b = {rule.head.pvar: sym(head)}
            for pv, name in zip(rule.body_pvars, slots):
                b[pv] = sym(name, rule.slot_arity(pv))
            out.append(instantiate(MetaSub.of(rule, b)))
        return Program(sym(self.target), tuple(out))


def _bind(prog, ci, slot, name):
    clauses = prog[0]
    ri, head, slots = clauses[ci]
    slots = slots[:slot] + (name,) + slots[slot + 1:]
    return (clauses[:ci] + ((ri, head, slots),) + clauses[ci + 1:], prog[1])


def solve(task: Task, bk: BKRegistry, cfg: SolveConfig = SolveConfig()) -> SolveOutcome:
    """Find a minimal-clause program for ``task``, by iterative deepening on clause count."""
    rules = [_Rule(r) for r in get_metarules(cfg.metarules)]
    if task.name in bk:
        raise LogicError(f"task name {task.name} clashes with a BK predicate")
    stats = SolveStats()
    start = time.monotonic()
    deadline_at = start + cfg.deadline
    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, 20_000))
    try:
        for n in range(1, cfg.max_clauses + 1):
            stats.depth = n
            search = _Search(task, bk, rules, n, cfg, stats, deadline_at, cfg.max_steps)
            try:
                prog = search.run()
            except _Timeout:
                stats.elapsed = time.monotonic() - start
                return SolveOutcome(Result.TIMED_OUT, None, stats)
            if prog is not None:
                stats.elapsed = time.monotonic() - start
                return SolveOutcome(Result.SOLUTION, search.extract(prog), stats)
        stats.elapsed = time.monotonic() - start
        return SolveOutcome(Result.EXHAUSTED, None, stats)
    finally:
        sys.setrecursionlimit(old_limit)
