"""Robot-and-ball gridworld on an n-by-n grid."""
from __future__ import annotations

import random
from functools import partial
from typing import NamedTuple

from ..bk import BKRegistry, Primitive
from ..engine import Atom, Task
from ..interpreter import DEFAULT_STEP_BUDGET, evaluate
from ..logic import Program

ACTIONS = ("up", "down", "left", "right", "grab", "drop")
METARULES = ("ident", "chain")
_MOVES = {"up": (0, 1), "down": (0, -1), "left": (-1, 0), "right": (1, 0)}


class RobotState(NamedTuple):
    robot: tuple[int, int]
    ball: tuple[int, int]
    holding: bool
    n: int

    def is_valid(self) -> bool:
        n = self.n
        return (all(1 <= c <= n for c in (*self.robot, *self.ball))
                and (not self.holding or self.robot == self.ball))

    def to_list(self) -> list[int]:
        return [*self.robot, *self.ball, int(self.holding)]

    @classmethod
    def from_list(cls, values, n: int) -> "RobotState":
        rx, ry, bx, by, h = values
        s = cls((int(rx), int(ry)), (int(bx), int(by)), bool(h), n)
        if not s.is_valid():
            raise ValueError(f"invalid robot state {values} for n={n}")
        return s


def _move(s: RobotState, dx: int, dy: int):
    x, y = s.robot
    x += dx
    y += dy
    if not (1 <= x <= s.n and 1 <= y <= s.n):
        return ()
    ball = (x, y) if s.holding else s.ball
    return (RobotState((x, y), ball, s.holding, s.n),)


def _grab(s: RobotState):
    if s.holding or s.robot != s.ball:
        return ()
    return (RobotState(s.robot, s.ball, True, s.n),)


def _drop(s: RobotState):
    if not s.holding:
        return ()
    return (RobotState(s.robot, s.ball, False, s.n),)


_FNS = {name: partial(_move, dx=d[0], dy=d[1]) for name, d in _MOVES.items()}
_FNS["grab"] = _grab
_FNS["drop"] = _drop


def apply_action(action: str, s: RobotState) -> RobotState | None:
    """The successor state, or None when the action is inapplicable."""
    try:
        fn = _FNS[action]
    except KeyError:
        raise ValueError(f"unknown action {action!r}") from None
    out = fn(s)
    return out[0] if out else None


def primitives() -> list[Primitive]:
    return [Primitive(a, 2, _FNS[a]) for a in ACTIONS]


def make_bk() -> BKRegistry:
    return BKRegistry(primitives())


def all_states(n: int) -> list[RobotState]:
    cells = [(x, y) for x in range(1, n + 1) for y in range(1, n + 1)]
    out = [RobotState(r, b, False, n) for r in cells for b in cells]
    out += [RobotState(c, c, True, n) for c in cells]
    return out


def num_states(n: int) -> int:
    return n ** 4 + n ** 2


def sample_state(n: int, rng: random.Random) -> RobotState:
    """Uniform over the n^4 + n^2 valid states."""
    i = rng.randrange(num_states(n))
    cells = n * n
    if i < cells * cells:
        r, b = divmod(i, cells)
        return RobotState(_cell(r, n), _cell(b, n), False, n)
    c = _cell(i - cells * cells, n)
    return RobotState(c, c, True, n)


def _cell(i: int, n: int) -> tuple[int, int]:
    return (i % n + 1, i // n + 1)


def sample_instance(n: int, rng: random.Random, name: str = "f") -> Atom:
    if n < 2:
        raise ValueError("grid side must be at least 2")
    return Atom(name, sample_state(n, rng), sample_state(n, rng))


def make_task(name: str, s1: RobotState, s2: RobotState) -> Task:
    return Task(name, (Atom(name, s1, s2),))


def sample_tasks(n: int, count: int, rng: random.Random, prefix: str) -> list[Task]:
    return [Task(f"{prefix}_{i}", (sample_instance(n, rng, f"{prefix}_{i}"),)) for i in range(1, count + 1)]


def check_solution(program: Program, atom: Atom, bk: BKRegistry,
                   step_budget: int = DEFAULT_STEP_BUDGET) -> bool:
    result = evaluate(program, bk, atom.input, step_budget)
    return atom.output in result.outputs


def task_to_record(task: Task) -> dict:
    atom = task.positives[0]
    return {"name": task.name, "n": atom.input.n, "s1": atom.input.to_list(), "s2": atom.output.to_list()}


def task_from_record(rec: dict) -> Task:
    try:
        n = int(rec["n"])
        return make_task(rec["name"], RobotState.from_list(rec["s1"], n), RobotState.from_list(rec["s2"], n))
    except (KeyError, TypeError) as e:
        raise ValueError(f"malformed robot task record: {rec!r}") from e
