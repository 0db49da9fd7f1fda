"""String transformations: a cursor over the input plus the output emitted so far."""
from __future__ import annotations

import json
import random
import string
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

from ..bk import BKRegistry, Pattern, Primitive
from ..engine import Atom, Task
from ..interpreter import DEFAULT_STEP_BUDGET, evaluate
from ..logic import Kind, Literal, Clause, PredicateSymbol, Program, invented_name

METARULES = ("precon", "postcon", "chain", "tailrec")
DYADIC = ("copy1", "skip1", "mk_uppercase", "mk_lowercase")
CLASSES = ("empty", "space", "letter", "number", "uppercase", "lowercase")
MONADIC = CLASSES + tuple("not_" + c for c in CLASSES)

# space counts as one of the 18 non-alphanumeric symbols
PUNCTUATION = " .,;:!?-_+<>()@\\\"/"
ALPHABET = string.ascii_lowercase + string.ascii_uppercase + string.digits + PUNCTUATION
assert len(ALPHABET) == 80 and len(set(ALPHABET)) == 80

MIN_INPUT_LEN, MAX_INPUT_LEN = 3, 20
MIN_PROGRAM_LEN, MAX_PROGRAM_LEN = 3, 20


class StringState(NamedTuple):
    remaining: str
    emitted: str = ""

    def __repr__(self):
        return f"StringState({self.remaining!r}, {self.emitted!r})"


@dataclass(frozen=True)
class Emitted(Pattern):
    """Final-state constraint: the output equals ``text``; unread input is unconstrained."""

    text: str

    def matches(self, value) -> bool:
        return value.emitted == self.text

    def viable(self, value) -> bool:
        # output is append-only
        return self.text.startswith(value.emitted)


def initial(x: str) -> StringState:
    return StringState(x, "")


# -- character classes --------------------------------------------------------

def is_upper(c: str) -> bool:
    return "A" <= c <= "Z"


def is_lower(c: str) -> bool:
    return "a" <= c <= "z"


def is_letter(c: str) -> bool:
    return is_upper(c) or is_lower(c)


def is_number(c: str) -> bool:
    return "0" <= c <= "9"


def is_space(c: str) -> bool:
    return c == " "


_CLASS_TESTS = {"space": is_space, "letter": is_letter, "number": is_number,
                "uppercase": is_upper, "lowercase": is_lower}


# -- primitives ---------------------------------------------------------------

def copy1(s: StringState):
    if not s.remaining:
        return ()
    return (StringState(s.remaining[1:], s.emitted + s.remaining[0]),)


def skip1(s: StringState):
    if not s.remaining:
        return ()
    return (StringState(s.remaining[1:], s.emitted),)


def mk_uppercase(s: StringState):
    if not s.remaining or not is_letter(s.remaining[0]):
        return ()
    return (StringState(s.remaining[1:], s.emitted + s.remaining[0].upper()),)


def mk_lowercase(s: StringState):
    if not s.remaining or not is_letter(s.remaining[0]):
        return ()
    return (StringState(s.remaining[1:], s.emitted + s.remaining[0].lower()),)


_STEPS = {"copy1": copy1, "skip1": skip1, "mk_uppercase": mk_uppercase, "mk_lowercase": mk_lowercase}


def _empty(s: StringState) -> bool:
    return not s.remaining


def _not_empty(s: StringState) -> bool:
    return bool(s.remaining)


class _HeadTest:
    """Picklable head-of-input test, optionally negated."""

    def __init__(self, cls: str, negate: bool):
        self.cls = cls
        self.negate = negate

    def __call__(self, s: StringState) -> bool:
        if not s.remaining:
            return False
        return _CLASS_TESTS[self.cls](s.remaining[0]) != self.negate

    def __reduce__(self):
        return (_HeadTest, (self.cls, self.negate))


def _monadic_fn(name: str):
    if name == "empty":
        return _empty
    if name == "not_empty":
        return _not_empty
    if name.startswith("not_"):
        return _HeadTest(name[4:], True)
    return _HeadTest(name, False)


def primitive_step(name: str, s: StringState) -> StringState | None:
    try:
        out = _STEPS[name](s)
    except KeyError:
        raise ValueError(f"unknown string primitive {name!r}") from None
    return out[0] if out else None


def monadic_test(name: str, s: StringState) -> bool:
    if name not in MONADIC:
        raise ValueError(f"unknown monadic test {name!r}")
    return bool(_monadic_fn(name)(s))


def primitives() -> list[Primitive]:
    return ([Primitive(n, 2, _STEPS[n]) for n in DYADIC]
            + [Primitive(n, 1, _monadic_fn(n)) for n in MONADIC])


def make_bk() -> BKRegistry:
    return BKRegistry(primitives())


# -- tasks --------------------------------------------------------------------

def make_task(name: str, pairs: Iterable[tuple[str, str]]) -> Task:
    return Task(name, tuple(Atom(name, initial(x), Emitted(y)) for x, y in pairs))


def task_pairs(task: Task) -> list[tuple[str, str]]:
    return [(a.input.remaining, a.output.text) for a in task.positives]


def run_sequence(steps: Sequence[str], x: str) -> str | None:
    s = initial(x)
    for name in steps:
        s = primitive_step(name, s)
        if s is None:
            return None
    return s.emitted


class GenerationError(RuntimeError):
    pass


@dataclass(frozen=True)
class GeneratedTask:
    task: Task
    input: str
    output: str
    witness: tuple[str, ...]


def generate_play_task(bk: BKRegistry, rng: random.Random, name: str,
                       max_program_len: int = MAX_PROGRAM_LEN, max_tries: int = 1000) -> GeneratedTask:
    """Random input string, random consistent straight-line program, its output.

    Step choices are uniform among the applicable primitives, which is uniform
    over consistent programs because each step's options depend only on the
    symbol it reads.
    """
    steps = [n for n in DYADIC if n in bk.primitives]
    if not steps:
        raise GenerationError("BK has no string primitives")
    for _ in range(max_tries):
        length = rng.randint(MIN_INPUT_LEN, MAX_INPUT_LEN)
        x = "".join(rng.choice(ALPHABET) for _ in range(length))
        p = rng.randint(MIN_PROGRAM_LEN, max_program_len)
        if p > length:
            continue
        s = initial(x)
        witness = []
        for _ in range(p):
            options = [n for n in steps if bk.primitives[n].fn(s)]
            choice = rng.choice(options)
            witness.append(choice)
            s = bk.primitives[choice].fn(s)[0]
        if not s.emitted:
            continue
        return GeneratedTask(make_task(name, [(x, s.emitted)]), x, s.emitted, tuple(witness))
    raise GenerationError(f"no play task generated after {max_tries} attempts")


def gen_tasks(bk: BKRegistry, count: int, rng: random.Random, prefix: str = "play") -> list[Task]:
    return [generate_play_task(bk, rng, f"{prefix}_{i}").task for i in range(1, count + 1)]


def witness_program(name: str, witness: Sequence[str]) -> Program:
    """A chain of clauses that runs ``witness`` step by step."""
    if not witness:
        raise ValueError("empty witness")

    def sym(n, kind):
        return PredicateSymbol(n, 2, kind)

    if len(witness) == 1:
        # no ident metarule in this domain: pad with an always-true postcondition
        return Program(sym(name, Kind.TARGET), (Clause(
            Literal(sym(name, Kind.TARGET), (0, 1)),
            (Literal(sym(witness[0], Kind.PRIMITIVE), (0, 1)),)),))
    heads = [name] + [invented_name(name, i) for i in range(1, len(witness) - 1)]
    clauses = []
    for i, head in enumerate(heads):
        kind = Kind.TARGET if i == 0 else Kind.INVENTED
        first = Literal(sym(witness[i], Kind.PRIMITIVE), (0, 2))
        if i == len(heads) - 1:
            rest = Literal(sym(witness[i + 1], Kind.PRIMITIVE), (2, 1))
        else:
            rest = Literal(sym(heads[i + 1], Kind.INVENTED), (2, 1))
        clauses.append(Clause(Literal(sym(head, kind), (0, 1)), (first, rest)))
    return Program(sym(name, Kind.TARGET), tuple(clauses))


def program_output(program: Program, bk: BKRegistry, x: str,
                   step_budget: int = DEFAULT_STEP_BUDGET) -> set[str]:
    return {s.emitted for s in evaluate(program, bk, initial(x), step_budget).outputs}


def transforms_correctly(program: Program, bk: BKRegistry, x: str, y: str,
                         step_budget: int = DEFAULT_STEP_BUDGET) -> bool:
    """Whether evaluating the program on ``x`` yields ``y``."""
    return y in program_output(program, bk, x, step_budget)


# -- files --------------------------------------------------------------------

class TaskFileError(ValueError):
    pass


def _check_text(s, where):
    if not isinstance(s, str):
        raise TaskFileError(f"{where}: expected a string, got {type(s).__name__}")
    if any(ord(c) > 0xFFFF for c in s):
        raise TaskFileError(f"{where}: symbols outside the basic multilingual plane")
    return s


def parse_task_records(lines: Iterable[str], source: str = "<input>", min_examples: int = 2) -> list[Task]:
    tasks: list[Task] = []
    seen: set[str] = set()
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        where = f"{source}:{lineno}"
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as e:
            raise TaskFileError(f"{where}: {e}") from None
        if not isinstance(rec, dict) or "name" not in rec or "examples" not in rec:
            raise TaskFileError(f"{where}: record needs 'name' and 'examples'")
        name = rec["name"]
        if not isinstance(name, str):
            raise TaskFileError(f"{where}: task name must be a string")
        if name in seen:
            raise TaskFileError(f"{where}: duplicate task name {name!r}")
        examples = rec["examples"]
        if not isinstance(examples, list) or len(examples) < min_examples:
            raise TaskFileError(f"{where}: task {name!r} needs at least {min_examples} examples")
        pairs = []
        for ex in examples:
            if not isinstance(ex, (list, tuple)) or len(ex) != 2:
                raise TaskFileError(f"{where}: example must be an [input, output] pair")
            pairs.append((_check_text(ex[0], where), _check_text(ex[1], where)))
        try:
            tasks.append(make_task(name, pairs))
        except ValueError as e:
            raise TaskFileError(f"{where}: {e}") from None
        seen.add(name)
    return tasks


def ingest_build_tasks(source, min_examples: int = 2) -> list[Task]:
    """Read a JSON Lines file of ``{"name": ..., "examples": [[input, output], ...]}``.

    Build tasks need two examples so they can be split into train and test;
    pass ``min_examples=1`` for files of single-example tasks.
    """
    path = Path(source)
    with path.open(encoding="utf-8") as fh:
        return parse_task_records(fh, str(path), min_examples)


def task_record(task: Task) -> dict:
    return {"name": task.name, "examples": [list(p) for p in task_pairs(task)]}


def dumps_tasks(tasks: Iterable[Task]) -> str:
    return "".join(json.dumps(task_record(t), ensure_ascii=False) + "\n" for t in tasks)
