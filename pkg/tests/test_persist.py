import random

import pytest

from playgol.bk import BKRegistry
from playgol.domains import robot, strings
from playgol.logic import LogicError, ParseError, parse_program
from playgol.loop import PlaygolConfig, play
from playgol.persist import atomic_write, load_bk, parse_bk, render_bk, save_bk


def played_bk():
    bk = robot.make_bk()
    tasks = robot.sample_tasks(3, 20, random.Random(12), "play")
    return play(bk, tasks, PlaygolConfig(max_d=3, per_task_deadline=30, ordered=True))[0]


def test_round_trip_preserves_entries_and_semantics(tmp_path):
    bk = played_bk()
    assert bk.entries
    path = tmp_path / "bk.pl"
    save_bk(bk, path)
    again = load_bk(path, robot.make_bk())
    assert [e.program for e in again.entries] == [e.program for e in bk.entries]
    assert [e.reusable for e in again.entries] == [e.reusable for e in bk.entries]
    assert again.reusable_names() == bk.reusable_names()
    assert render_bk(again) == path.read_text()
    for state in robot.all_states(3)[:40]:
        for name in bk.learned:
            assert set(again.outputs(name, state)) == set(bk.outputs(name, state))


def test_listing_is_byte_identical_across_runs():
    assert render_bk(played_bk()) == render_bk(played_bk())


def test_timings_only_on_request():
    bk = strings.make_bk()
    bk.add_program(parse_program("t(A,B):-copy1(A,C),copy1(C,B)."), task="t", depth=1, elapsed_ms=3.5)
    assert "ms" not in render_bk(bk)
    timed = render_bk(bk, timings=True)
    assert "elapsed_ms=3.5" in timed
    assert parse_bk(timed, strings.make_bk()).entries[0].elapsed_ms == 3.5


def test_nonreusable_invented_survive_round_trip():
    bk = strings.make_bk()
    prog = parse_program("t(A,B):-t_1(A,C),t_1(C,B).\nt_1(A,B):-copy1(A,C),skip1(C,B).\n")
    bk.add_program(prog, ["t"], task="t")
    again = parse_bk(render_bk(bk), strings.make_bk())
    assert again.reusable_names()[-1] == "t" and "t_1" in again and not again.is_reusable("t_1")


@pytest.mark.parametrize("text,exc,msg", [
    ("f(A,B):-copy1(A,B).\n", ParseError, "before the first"),
    ("% program g task=g reusable=g\nf(A,B):-copy1(A,B).\n", LogicError, "directive names g"),
    ("% program f task=f reusable=f\nf(A,B):-copy1(A,B)).\n", ParseError, "line 2, column 19"),
    ("% program f task=f reusable=f\nf(A,B):-nothere(A,B).\n", LogicError, "not in BK"),
])
def test_malformed_listings(text, exc, msg):
    with pytest.raises(exc, match=msg):
        parse_bk(text, strings.make_bk())


def test_atomic_write_replaces_and_leaves_no_temp(tmp_path):
    path = tmp_path / "sub" / "out.txt"
    atomic_write(path, "one")
    atomic_write(path, "two")
    assert path.read_text() == "two"
    assert [p.name for p in path.parent.iterdir()] == ["out.txt"]


def test_parse_does_not_touch_base():
    base = BKRegistry(strings.primitives())
    parse_bk("% program t task=t reusable=t\nt(A,B):-copy1(A,B).\n", base)
    assert "t" not in base
