import itertools

import pytest

from playgol.bk import BKRegistry
from playgol.domains import robot, strings
from playgol.domains.robot import RobotState
from playgol.engine import Atom, Result, SolveConfig, Task, solve
from playgol.interpreter import verify
from playgol.logic import LogicError, check_program

from oracles import minimal_clauses

MICRO_TASKS = {
    "first": ([("ab", "a"), ("cd", "c")], []),
    "first_upper": ([("ab", "A"), ("xy", "X")], []),
    "two": ([("abc", "ab"), ("xyz", "xy")], []),
    "three": ([("abcd", "abc"), ("wxyz", "wxy")], []),
    "to_upper_letter": ([("aB", "B"), ("abC", "C")], []),
    "whole": ([("ab", "ab"), ("abc", "abc")], []),
    "lower_only": ([("ab", "a")], [("Ab", "A")]),
    "swap": ([("ab", "ba")], []),
    "lower_two": ([("AB", "ab"), ("Cd", "cd")], []),
    "three_exact": ([("abcd", "abc"), ("wxyz", "wxy")], [("abcd", "ab")]),
}
PRIM_SETS = [
    ("copy1",),
    ("copy1", "skip1"),
    ("skip1", "mk_uppercase"),
    ("copy1", "mk_lowercase", "lowercase"),
    ("copy1", "skip1", "mk_uppercase", "mk_lowercase"),
    ("skip1", "copy1", "uppercase"),
    ("copy1", "skip1", "uppercase", "empty"),
]
RULE_SETS = [
    ("ident",), ("chain",), ("tailrec",), ("ident", "chain"), ("ident", "tailrec"),
    ("chain", "tailrec"), ("precon", "tailrec"), ("postcon", "chain"), ("precon", "ident"),
]


def micro_bk(prims):
    return BKRegistry([p for p in strings.primitives() if p.name in prims])


def micro_task(pos, neg):
    t = strings.make_task("f", pos)
    return Task("f", t.positives, strings.make_task("f", neg).positives if neg else ())


@pytest.mark.parametrize("ordered", [False, True])
def test_oracle_agreement_grid(ordered):
    """solve() and exhaustive enumeration agree on solvability and minimal size."""
    disagreements = []
    checked = 0
    for prims, rules, (tname, (pos, neg)) in itertools.product(PRIM_SETS, RULE_SETS, MICRO_TASKS.items()):
        expected = minimal_clauses(pos, neg, prims, rules, 2, ordered=ordered)
        out = solve(micro_task(pos, neg), micro_bk(prims), SolveConfig(rules, 2, deadline=60, ordered=ordered))
        assert out.result is not Result.TIMED_OUT
        got = len(out.program) if out.solved else None
        checked += 1
        if got != expected:
            disagreements.append((prims, rules, tname, expected, got))
    assert checked == len(PRIM_SETS) * len(RULE_SETS) * len(MICRO_TASKS)
    assert disagreements == []


def test_ordering_changes_some_grid_answers():
    changed = [t for prims, rules, (t, (pos, neg)) in itertools.product(PRIM_SETS, RULE_SETS, MICRO_TASKS.items())
               if minimal_clauses(pos, neg, prims, rules, 2)
               != minimal_clauses(pos, neg, prims, rules, 2, ordered=True)]
    assert len(changed) >= 10


def test_grid_covers_both_outcomes():
    results = {minimal_clauses(*MICRO_TASKS[t], ("copy1", "skip1", "mk_uppercase", "mk_lowercase"),
                               ("ident", "chain"), 2) for t in MICRO_TASKS}
    assert {None, 1, 2} <= results


def test_solution_verifies_and_is_well_formed():
    bk = micro_bk(("copy1", "skip1", "uppercase"))
    task = micro_task(*MICRO_TASKS["to_upper_letter"])
    out = solve(task, bk, SolveConfig(("precon", "tailrec"), 3))
    assert out.solved
    check_program(out.program, 3)
    assert verify(out.program, task, bk)
    assert out.stats.depth == len(out.program) == 2


def test_negatives_rejected():
    bk = micro_bk(("copy1", "mk_lowercase"))
    out = solve(micro_task(*MICRO_TASKS["lower_only"]), bk, SolveConfig(("ident",), 1))
    assert out.solved
    assert str(out.program).strip() == "f(A,B):-mk_lowercase(A,B)."


def test_exhausted_when_no_program():
    bk = micro_bk(("copy1", "skip1"))
    out = solve(micro_task(*MICRO_TASKS["swap"]), bk, SolveConfig(("ident", "chain"), 2))
    assert out.result is Result.EXHAUSTED and out.program is None


def test_step_limit_times_out():
    bk = robot.make_bk()
    task = robot.make_task("f", RobotState((1, 1), (5, 5), False, 5), RobotState((5, 1), (1, 5), False, 5))
    out = solve(task, bk, SolveConfig(("ident", "chain"), 5, max_steps=5000))
    assert out.result is Result.TIMED_OUT
    assert out.stats.proofs_attempted <= 5000 + 64


def test_wall_deadline_times_out():
    bk = robot.make_bk()
    task = robot.make_task("f", RobotState((1, 1), (5, 5), False, 5), RobotState((5, 1), (1, 5), False, 5))
    out = solve(task, bk, SolveConfig(("ident", "chain"), 5, deadline=0.2))
    assert out.result is Result.TIMED_OUT
    assert out.stats.elapsed < 1.0


def test_step_clock_is_deterministic():
    bk = robot.make_bk()
    task = robot.make_task("f", RobotState((1, 1), (2, 2), False, 5), RobotState((4, 4), (4, 4), False, 5))
    cfg = SolveConfig(("ident", "chain"), 4, deadline=600, max_steps=200_000)
    a, b = solve(task, bk, cfg), solve(task, bk, cfg)
    assert a.result == b.result and a.program == b.program
    assert a.stats.proofs_attempted == b.stats.proofs_attempted


def test_robot_carry_task():
    """Carry the ball from (1,1) to (3,3): learned with recursion and invention-free reuse."""
    bk = robot.make_bk()
    s1 = RobotState((1, 1), (1, 1), False, 5)
    s2 = RobotState((3, 3), (3, 3), False, 5)
    task = robot.make_task("f", s1, s2)
    out = solve(task, bk, SolveConfig(robot.METARULES, 5, deadline=120))
    assert out.solved
    assert robot.check_solution(out.program, task.positives[0], bk)
    # no program with fewer clauses exists
    smaller = solve(task, bk, SolveConfig(robot.METARULES, len(out.program) - 1, deadline=120))
    assert smaller.result is Result.EXHAUSTED


def test_reuses_learned_predicates():
    bk = micro_bk(("copy1", "skip1"))
    two = solve(micro_task(*MICRO_TASKS["two"]), bk, SolveConfig(("chain",), 2)).program
    bk.add_program(two, task="two")
    bk = bk.copy()
    t = Task("g", strings.make_task("g", [("abcde", "abcd"), ("vwxyz", "vwxy")]).positives)
    out = solve(t, bk, SolveConfig(("chain",), 1))
    assert out.solved
    assert str(out.program).strip() == "g(A,B):-f(A,C),f(C,B)."


def test_invention_can_be_disabled():
    bk = micro_bk(("copy1", "skip1"))
    # the negative rules out the recursive two-clause alternative
    task = micro_task(MICRO_TASKS["three"][0], [("abcd", "ab")])
    with_inv = solve(task, bk, SolveConfig(("chain",), 2))
    assert with_inv.solved and with_inv.program.invented
    without = solve(task, bk, SolveConfig(("chain",), 2, allow_invention=False))
    assert without.result is Result.EXHAUSTED


def test_task_validation():
    with pytest.raises(LogicError):
        Task("f", ())
    with pytest.raises(LogicError):
        Task("f", (Atom("g", 1, 2),))
    with pytest.raises(LogicError):
        Task.from_pairs("f", [(1, 2)], [(1, 2)])
    with pytest.raises(LogicError):
        solve(Task.from_pairs("copy1", [("a", "a")]), micro_bk(("copy1",)))


def test_config_validation():
    with pytest.raises(ValueError):
        SolveConfig(max_clauses=0)
    with pytest.raises(ValueError):
        SolveConfig(deadline=0)
    with pytest.raises(LogicError):
        SolveConfig(metarules=("nonesuch",))
