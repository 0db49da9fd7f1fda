import random
from collections import Counter, deque

import pytest
from scipy.stats import chisquare

from playgol.domains import robot
from playgol.domains.robot import ACTIONS, RobotState, all_states, apply_action
from playgol.interpreter import evaluate
from playgol.logic import parse_program

INVERSE = {"up": "down", "down": "up", "left": "right", "right": "left", "grab": "drop", "drop": "grab"}


@pytest.mark.parametrize("n", [1, 2, 3])
def test_state_space(n):
    states = all_states(n)
    assert len(states) == len(set(states)) == robot.num_states(n) == n ** 4 + n ** 2
    assert all(s.is_valid() for s in states)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_inverse_actions_exhaustive(n):
    for s in all_states(n):
        for a in ACTIONS:
            t = apply_action(a, s)
            if t is None:
                continue
            assert t.is_valid()
            assert apply_action(INVERSE[a], t) == s


@pytest.mark.parametrize("n", [1, 2, 3])
def test_action_semantics_exhaustive(n):
    for s in all_states(n):
        for a in ACTIONS:
            t = apply_action(a, s)
            if a in ("grab", "drop"):
                ok = (not s.holding and s.robot == s.ball) if a == "grab" else s.holding
                assert (t is not None) == ok
                if t is not None:
                    assert t.robot == s.robot and t.ball == s.ball and t.holding != s.holding
                continue
            dx, dy = robot._MOVES[a]
            x, y = s.robot[0] + dx, s.robot[1] + dy
            if not (1 <= x <= n and 1 <= y <= n):
                assert t is None
                continue
            assert t.robot == (x, y) and t.holding == s.holding
            # the ball moves with the robot exactly when held
            assert t.ball == ((x, y) if s.holding else s.ball)


@pytest.mark.parametrize("n", [2, 3])
def test_identity_round_trips(n):
    for s in all_states(n):
        for a, b in (("up", "down"), ("right", "left")):
            t = apply_action(a, s)
            if t is not None:
                assert apply_action(b, t) == s
        if s.robot == s.ball and not s.holding:
            assert apply_action("drop", apply_action("grab", s)) == s


def test_every_state_reachable_n2():
    """Breadth-first search from one state reaches all n^4 + n^2 states."""
    n = 2
    start = RobotState((1, 1), (2, 2), False, n)
    seen, frontier = {start}, deque([start])
    while frontier:
        s = frontier.popleft()
        for a in ACTIONS:
            t = apply_action(a, s)
            if t is not None and t not in seen:
                seen.add(t)
                frontier.append(t)
    assert seen == set(all_states(n))


def test_sample_state_uniform():
    n, draws = 2, 40_000
    rng = random.Random(3)
    counts = Counter(robot.sample_state(n, rng) for _ in range(draws))
    assert set(counts) == set(all_states(n))
    p = chisquare([counts[s] for s in all_states(n)]).pvalue
    assert p > 0.001


def test_sample_tasks_named_and_valid():
    tasks = robot.sample_tasks(5, 30, random.Random(1), "build")
    assert [t.name for t in tasks] == [f"build_{i}" for i in range(1, 31)]
    for t in tasks:
        (atom,) = t.positives
        assert atom.pred == t.name and atom.input.is_valid() and atom.output.is_valid()
    again = robot.sample_tasks(5, 30, random.Random(1), "build")
    assert tasks == again
    with pytest.raises(ValueError):
        robot.sample_instance(1, random.Random(0))


def test_check_solution():
    bk = robot.make_bk()
    s1 = RobotState((1, 1), (1, 1), False, 3)
    task = robot.make_task("f", s1, RobotState((2, 1), (2, 1), False, 3))
    good = parse_program("f(A,B):-f_1(A,C),drop(C,B).\nf_1(A,B):-grab(A,C),right(C,B).\n")
    bad = parse_program("f(A,B):-right(A,B).")
    assert robot.check_solution(good, task.positives[0], bk)
    assert not robot.check_solution(bad, task.positives[0], bk)


CARRY_PROGRAM = "f(A,B):-grab(A,C),f_1(C,D),f_1(D,E),drop(E,B).\nf_1(A,B):-up(A,C),right(C,B).\n"


def test_carry_plan_program():
    bk = robot.make_bk()
    prog = parse_program(CARRY_PROGRAM)
    assert [s.name for s in prog.invented] == ["f_1"]
    s1 = RobotState((2, 1), (2, 1), False, 5)
    end = s1
    for a in ("grab", "up", "right", "up", "right", "drop"):
        end = apply_action(a, end)
    assert end == RobotState((4, 3), (4, 3), False, 5)
    assert evaluate(prog, bk, s1).outputs == {end}
    assert robot.check_solution(prog, robot.make_task("f", s1, end).positives[0], bk)


def test_record_round_trip():
    t = robot.sample_tasks(4, 1, random.Random(9), "x")[0]
    assert robot.task_from_record(robot.task_to_record(t)) == t
    with pytest.raises(ValueError):
        robot.task_from_record({"name": "x", "n": 2, "s1": [3, 1, 1, 1, 0], "s2": [1, 1, 1, 1, 0]})
    with pytest.raises(ValueError):
        robot.task_from_record({"name": "x", "n": 2, "s1": [1, 1, 2, 2, 1], "s2": [1, 1, 1, 1, 0]})
    with pytest.raises(ValueError):
        robot.task_from_record({"name": "x"})


def test_unknown_action():
    with pytest.raises(ValueError):
        apply_action("jump", RobotState((1, 1), (1, 1), False, 2))
