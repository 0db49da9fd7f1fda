"""Tabled evaluation against a naive bottom-up least fixpoint on a finite number domain."""
import random

import pytest

from playgol.bk import BKRegistry, Primitive
from playgol.interpreter import evaluate
from playgol.logic import parse_program

DOMAIN = range(0, 13)
PRIMS = {
    "inc": lambda x: (x + 1,) if x < 12 else (),
    "dec": lambda x: (x - 1,) if x > 0 else (),
    "half": lambda x: (x // 2,) if x % 2 == 0 else (),
    "dbl": lambda x: (2 * x,) if 2 * x <= 12 else (),
}
TESTS = {"even": lambda x: x % 2 == 0, "small": lambda x: x < 4}
NAMES = ["p", "q", "r"]


def make_bk():
    return BKRegistry([Primitive(n, 2, f) for n, f in PRIMS.items()]
                      + [Primitive(n, 1, f) for n, f in TESTS.items()])


def random_program(rng):
    clauses = []
    for head in NAMES:
        for _ in range(rng.randint(1, 3)):
            callable_ = list(PRIMS) + NAMES
            shape = rng.choice(["ident", "chain", "chain", "precon", "postcon"])
            q, r = rng.choice(callable_), rng.choice(callable_)
            t = rng.choice(list(TESTS))
            clauses.append({
                "ident": f"{head}(A,B):-{q}(A,B).",
                "chain": f"{head}(A,B):-{q}(A,C),{r}(C,B).",
                "precon": f"{head}(A,B):-{t}(A),{q}(A,B).",
                "postcon": f"{head}(A,B):-{q}(A,B),{t}(B).",
            }[shape])
    return "\n".join(clauses) + "\n"


def bottom_up(text):
    """Iterate the immediate-consequence operator over all of DOMAIN x DOMAIN."""
    prog = parse_program(text)
    rel = {n: set() for n in NAMES}
    for n, f in PRIMS.items():
        rel[n] = {(x, y) for x in DOMAIN for y in f(x)}
    changed = True
    while changed:
        changed = False
        for c in prog.clauses:
            for x in DOMAIN:
                envs = [{0: x}]
                for lit in c.body:
                    name = lit.pred.name
                    nxt = []
                    for env in envs:
                        if lit.pred.arity == 1:
                            if TESTS[name](env[lit.args[0]]):
                                nxt.append(env)
                            continue
                        src, dst = lit.args
                        for (a, b) in rel[name]:
                            if a == env[src] and (dst not in env or env[dst] == b):
                                nxt.append({**env, dst: b})
                    envs = nxt
                for env in envs:
                    fact = (x, env[1])
                    if fact not in rel[c.head.pred.name]:
                        rel[c.head.pred.name].add(fact)
                        changed = True
    return rel


def reachable_names(text):
    prog = parse_program(text)
    return {c.head.pred.name for c in prog.clauses}


@pytest.mark.parametrize("seed", range(60))
def test_matches_bottom_up(seed):
    rng = random.Random(seed)
    text = random_program(rng)
    expected = bottom_up(text)
    prog = parse_program(text)
    # interpreter over the program itself
    for x in DOMAIN:
        res = evaluate(prog, make_bk(), x)
        assert not res.truncated
        assert res.outputs == {y for a, y in expected["p"] if a == x}
    # the BK executor, with memo shared across calls
    bk = make_bk()
    bk.add_program(prog)
    for name in reachable_names(text):
        for x in rng.sample(list(DOMAIN), len(DOMAIN)):
            assert set(bk.outputs(name, x)) == {y for a, y in expected[name] if a == x}, (text, name, x)
