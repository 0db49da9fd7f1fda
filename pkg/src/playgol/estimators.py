"""Estimator-style wrappers for string programming by example.

``fit(X, y)`` learns a program from input/output strings; ``predict(X)``
runs it. Parameters follow the scikit-learn conventions, so the wrappers
work with ``clone``, ``get_params`` and ``set_params``.
"""
from __future__ import annotations

import random
from typing import Sequence

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .domains import strings
from .engine import SolveConfig, solve
from .interpreter import evaluate
from .loop import PlaygolConfig, play


def check_pairs(X, y=None) -> tuple[list[str], list[str] | None]:
    """Validate string inputs and, if given, equally many string outputs."""
    if isinstance(X, str):
        raise TypeError("X must be a sequence of strings, not a single string")
    xs = list(X)
    if not xs:
        raise ValueError("X is empty")
    for x in xs:
        if not isinstance(x, str):
            raise TypeError(f"inputs must be strings, got {type(x).__name__}")
    if y is None:
        return xs, None
    if isinstance(y, str):
        raise TypeError("y must be a sequence of strings, not a single string")
    ys = list(y)
    if len(ys) != len(xs):
        raise ValueError(f"X has {len(xs)} items but y has {len(ys)}")
    for v in ys:
        if not isinstance(v, str):
            raise TypeError(f"outputs must be strings, got {type(v).__name__}")
    return xs, ys


class MetagolSynthesizer(BaseEstimator):
    """Learn one string program from examples against the primitive BK."""

    def __init__(self, metarules: Sequence[str] = strings.METARULES, max_clauses: int = 5,
                 deadline: float = 60.0, max_steps: int | None = None, name: str = "f",
                 ordered: bool = True):
        self.metarules = metarules
        self.max_clauses = max_clauses
        self.deadline = deadline
        self.max_steps = max_steps
        self.name = name
        self.ordered = ordered

    def _solve_config(self) -> SolveConfig:
        return SolveConfig(tuple(self.metarules), self.max_clauses, self.deadline, max_steps=self.max_steps,
                           ordered=self.ordered)

    def _background(self):
        return strings.make_bk()

    def fit(self, X, y):
        xs, ys = check_pairs(X, y)
        self.bk_ = self._background()
        task = strings.make_task(self.name, zip(xs, ys))
        self.outcome_ = solve(task, self.bk_, self._solve_config())
        self.program_ = self.outcome_.program
        return self

    def predict(self, X) -> list[str | None]:
        """First derived output per input; ``None`` when unsolved or nothing is derivable."""
        check_is_fitted(self, "outcome_")
        xs, _ = check_pairs(X)
        if self.program_ is None:
            return [None] * len(xs)
        out = []
        for x in xs:
            order = evaluate(self.program_, self.bk_, strings.initial(x)).order
            out.append(order[0].emitted if order else None)
        return out

    def score(self, X, y) -> float:
        """Fraction of pairs where running the program on ``x`` can yield ``y``."""
        check_is_fitted(self, "outcome_")
        xs, ys = check_pairs(X, y)
        if self.program_ is None:
            return 0.0
        return sum(strings.transforms_correctly(self.program_, self.bk_, a, b) for a, b in zip(xs, ys)) / len(xs)


class PlaygolSynthesizer(MetagolSynthesizer):
    """Play on ``play_tasks`` self-generated tasks first, then learn against the grown BK."""

    def __init__(self, metarules: Sequence[str] = strings.METARULES, max_clauses: int = 5,
                 deadline: float = 60.0, max_steps: int | None = None, name: str = "f",
                 ordered: bool = True, play_tasks: int = 100, mode: str = "full", random_state: int = 0):
        super().__init__(metarules, max_clauses, deadline, max_steps, name, ordered)
        self.play_tasks = play_tasks
        self.mode = mode
        self.random_state = random_state

    def _background(self):
        base = strings.make_bk()
        cfg = PlaygolConfig(self.max_clauses, self.deadline, self.mode, self.random_state,
                            tuple(self.metarules), self.max_steps, ordered=self.ordered)
        tasks = strings.gen_tasks(base, self.play_tasks, random.Random(self.random_state), "play")
        bk, self.play_report_ = play(base, tasks, cfg)
        return bk
