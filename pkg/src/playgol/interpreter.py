"""An evaluator for checking finished programs against examples.

It shares nothing with the learner's proof search: it reads the clauses of a
program and of the BK definitions and computes their least-fixpoint answers
for the call at hand, counting one step per clause tried and per body call.
It consults no cached BK results.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .bk import BKRegistry, ClosureError, Pattern, matches
from .fixpoint import Fixpoint, StepLimit
from .logic import Program

DEFAULT_STEP_BUDGET = 200_000


@dataclass(frozen=True)
class EvalResult:
    outputs: frozenset
    truncated: bool = False
    steps: int = 0
    order: tuple = field(default=(), compare=False)


class Interpreter:
    def __init__(self, program: Program | None, bk: BKRegistry, step_budget: int = DEFAULT_STEP_BUDGET):
        self.bk = bk
        self.step_budget = step_budget
        self.local: dict[str, list] = {}
        if program is not None:
            bk.check_closed(program)
            for c in program.clauses:
                self.local.setdefault(c.head.pred.name, []).append(c)

    def clauses(self, name):
        if name in self.local:
            return self.local[name]
        return self.bk.definitions.get(name)

    def _primitive(self, name):
        prim = self.bk.primitives.get(name)
        return prim.fn if prim is not None and prim.arity == 2 else None

    def run(self, name, value, target=None, first=False) -> EvalResult:
        """Outputs of ``name(value, B)`` with ``B`` satisfying ``target``.

        With ``first`` the run ends at the first matching output.
        """
        if self._primitive(name) is None and self.clauses(name) is None:
            raise ClosureError(f"undefined predicate {name}")
        fp = Fixpoint(self.clauses, self._primitive, self.bk.test, None, self.step_budget)
        stop = (lambda out: matches(target, out)) if first else None
        truncated = False
        try:
            outs = fp.answers(name, value, stop)
        except StepLimit:
            truncated = True
            outs = tuple(fp.table.get((name, value), ()))
        except KeyError as e:
            raise ClosureError(f"undefined predicate {e.args[0]}") from None
        outs = tuple(o for o in outs if matches(target, o))
        return EvalResult(frozenset(outs), truncated, fp.steps, outs)


def evaluate(program: Program, bk: BKRegistry, value, step_budget: int = DEFAULT_STEP_BUDGET,
             target=None) -> EvalResult:
    """All outputs ``y`` with ``target(value, y)`` derivable; ``truncated`` if the budget ran out."""
    return Interpreter(program, bk, step_budget).run(program.target.name, value, target)


def derivable(program: Program, bk: BKRegistry, value, target, step_budget: int = DEFAULT_STEP_BUDGET):
    """True, False, or None when the budget ran out before a decision."""
    res = Interpreter(program, bk, step_budget).run(program.target.name, value, target, first=True)
    if res.outputs:
        return True
    return None if res.truncated else False


def verify(program: Program, task, bk: BKRegistry, step_budget: int = DEFAULT_STEP_BUDGET) -> bool:
    """Every positive derivable and every negative refuted, each within ``step_budget``."""
    bk.check_closed(program)
    for atom in task.positives:
        if derivable(program, bk, atom.input, atom.output, step_budget) is not True:
            return False
    for atom in task.negatives:
        if derivable(program, bk, atom.input, atom.output, step_budget) is not False:
            return False
    return True


__all__ = ["EvalResult", "Interpreter", "Pattern", "derivable", "evaluate", "verify"]
