"""Command-line entry point: ``playgol <subcommand> ...``."""
from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from dataclasses import replace
from pathlib import Path

from . import theory
from .bk import BKRegistry
from .domains import robot, strings
from .engine import SolveConfig, Task, solve
from .harness import ConfigError, ExperimentConfig, run_experiment, write_outputs
from .logic import LogicError
from .loop import PlaygolConfig, build, play
from .persist import atomic_write, load_bk, render_bk

log = logging.getLogger("playgol")

EXIT_OK, EXIT_UNSOLVED, EXIT_ERROR = 0, 1, 2

TASK_FORMAT = """\
task files are JSON Lines, one task per line:
  strings: {"name": "t1", "examples": [["input", "output"], ...]}
  robot:   {"name": "t1", "n": 5, "s1": [rx, ry, bx, by, h], "s2": [rx, ry, bx, by, h]}
coordinates run 1..n and h is 0 or 1 (holding the ball)."""

BK_FORMAT = """\
BK listings are plain text. Comment lines start with '%':
  % program <target> task=<task> depth=<d> reusable=<p1>,<p2>
followed by that program's clauses, one per line, e.g.
  f(A,B):-right(A,C),f_1(C,B)."""

CONFIG_FORMAT = """\
experiment configs are JSON objects; keys:
  domain (robot|strings), play_budgets [ints, ascending], repetitions,
  per_task_deadline (s), max_d, modes (subset of full, nopi, baseline), seed,
  n and build_count (robot), build_source (strings: path or "synthetic"),
  train_size, clock (wall|steps), steps_per_second, jobs,
  ordered (true|false, default true).
outputs in --out: records.jsonl, summary.csv, manifest.json, bk/*.pl"""


class CliError(Exception):
    pass


def _domain_bk(domain: str) -> BKRegistry:
    return robot.make_bk() if domain == "robot" else strings.make_bk()


def _metarules(domain: str):
    return robot.METARULES if domain == "robot" else strings.METARULES


def read_tasks(path, domain: str) -> list[Task]:
    p = Path(path)
    if not p.is_file():
        raise CliError(f"no such task file: {path}")
    if domain == "strings":
        return strings.ingest_build_tasks(p, min_examples=1)
    tasks, seen = [], set()
    for lineno, line in enumerate(p.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            task = robot.task_from_record(json.loads(line))
        except (ValueError, json.JSONDecodeError) as e:
            raise CliError(f"{path}:{lineno}: {e}") from None
        if task.name in seen:
            raise CliError(f"{path}:{lineno}: duplicate task name {task.name!r}")
        seen.add(task.name)
        tasks.append(task)
    return tasks


def dump_tasks(tasks, domain: str) -> str:
    if domain == "strings":
        return strings.dumps_tasks(tasks)
    return "".join(json.dumps(robot.task_to_record(t)) + "\n" for t in tasks)


def _emit(text: str, out) -> None:
    if out:
        atomic_write(out, text)
    else:
        sys.stdout.write(text)


def _outcome_record(task: Task, out) -> dict:
    return {
        "task": task.name,
        "outcome": out.result.value,
        "depth": out.stats.depth,
        "elapsed": round(out.stats.elapsed, 4),
        "proofs": out.stats.proofs_attempted,
        "program": str(out.program).strip() if out.program is not None else None,
    }


def _playgol_config(args) -> PlaygolConfig:
    return PlaygolConfig(args.max_d, args.deadline, args.mode, args.seed or 0, _metarules(args.domain),
                         jobs=args.jobs, ordered=args.ordered)


# -- subcommands ----------------------------------------------------------------

def cmd_solve(args) -> int:
    tasks = read_tasks(args.tasks, args.domain)
    bk = load_bk(args.bk, _domain_bk(args.domain)) if args.bk else _domain_bk(args.domain)
    cfg = SolveConfig(_metarules(args.domain), args.max_d, args.deadline, ordered=args.ordered)
    lines, all_solved = [], True
    for t in tasks:
        out = solve(t, bk, cfg)
        all_solved &= out.solved
        lines.append(json.dumps(_outcome_record(t, out)) + "\n")
    _emit("".join(lines), args.out)
    return EXIT_OK if all_solved else EXIT_UNSOLVED


def cmd_play(args) -> int:
    base = _domain_bk(args.domain)
    bk = load_bk(args.bk, base) if args.bk else base
    if args.tasks:
        tasks = read_tasks(args.tasks, args.domain)
    else:
        if args.seed is None:
            raise CliError("play without --tasks generates tasks and needs --seed")
        tasks = _generate(args.domain, bk, args.count, args.seed, args.n, "play")
    bk, report = play(bk, tasks, _playgol_config(args))
    listing = render_bk(bk)
    _emit(listing, args.out)
    log.info("play: %d/%d tasks solved, %d predicates added", report.programs_saved, len(tasks),
             report.predicates_added)
    return EXIT_OK


def cmd_build(args) -> int:
    tasks = read_tasks(args.tasks, args.domain)
    bk = load_bk(args.bk, _domain_bk(args.domain)) if args.bk else _domain_bk(args.domain)
    outcomes = build(bk, tasks, _playgol_config(args))
    _emit("".join(json.dumps(_outcome_record(t, outcomes[t.name])) + "\n" for t in tasks), args.out)
    return EXIT_OK if all(o.solved for o in outcomes.values()) else EXIT_UNSOLVED


def _generate(domain, bk, count, seed, n, prefix) -> list[Task]:
    rng = random.Random(seed)
    if domain == "robot":
        return robot.sample_tasks(n, count, rng, prefix)
    return strings.gen_tasks(bk, count, rng, prefix)


def cmd_gen_tasks(args) -> int:
    tasks = _generate(args.domain, _domain_bk(args.domain), args.count, args.seed, args.n, args.prefix)
    _emit(dump_tasks(tasks, args.domain), args.out)
    return EXIT_OK


def cmd_experiment(args) -> int:
    cfg = ExperimentConfig.from_file(args.config)
    overrides = {"seed": args.seed}
    if args.deadline is not None:
        overrides["per_task_deadline"] = args.deadline
    if args.max_d is not None:
        overrides["max_d"] = args.max_d
    if args.jobs is not None:
        overrides["jobs"] = args.jobs
    cfg = replace(cfg, **overrides)
    listings: dict[str, str] = {}
    records = run_experiment(cfg, listings=listings)
    rows = write_outputs(args.out, cfg, records, listings)
    for r in rows:
        log.info("%s %s budget=%d mean=%.2f sem=%.2f", r.domain, r.mode, r.budget, r.mean, r.sem)
    return EXIT_OK


def cmd_theory(args) -> int:
    params = theory.MilParams(args.p, args.m, args.j, args.n, args.eps, args.delta)
    result = {
        "hypothesis_space_size": theory.hypothesis_space_size(args.m, args.p, args.j, args.n),
        "sample_bound": theory.sample_bound(params),
    }
    k = min(args.k if args.k is not None else 1, args.n)
    c = args.c if args.c is not None else 1
    result["playgol_improves"] = theory.playgol_improves(args.n, k, args.p, c)
    result["improvement_params"] = {"k": k, "c": c}
    sys.stdout.write(json.dumps(result, indent=2) + "\n")
    return EXIT_OK


def cmd_show_bk(args) -> int:
    path = Path(args.listing)
    if not path.is_file():
        raise CliError(f"no such BK listing: {path}")
    bk = load_bk(path, _domain_bk(args.domain))
    out = []
    for e in bk.entries:
        out.append(f"{e.program.target.name}  (task {e.task}, depth {e.depth}, "
                   f"reusable: {', '.join(e.reusable) or '-'})\n")
        out.extend(f"    {c}\n" for c in e.program.clauses)
    out.append(f"{len(bk.entries)} programs, {len(bk.reusable_names()) - len(bk.primitives)} "
               f"reusable learned predicates\n")
    sys.stdout.write("".join(out))
    return EXIT_OK


# -- parser ---------------------------------------------------------------------

def _positive_float(s):
    v = float(s)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _positive_int(s):
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.RawDescriptionHelpFormatter
    parser = argparse.ArgumentParser(prog="playgol", description=__doc__, formatter_class=fmt)
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, domain=True, seed_required=False):
        if domain:
            p.add_argument("--domain", choices=("robot", "strings"), required=True)
        p.add_argument("--seed", type=int, required=seed_required)
        p.add_argument("--out", help="output path (default: stdout)")

    def search(p):
        p.add_argument("--deadline", type=_positive_float, default=60.0, help="seconds per task (default 60)")
        p.add_argument("--max-d", type=_positive_int, default=5, help="max clauses (default 5)")
        p.add_argument("--mode", choices=("full", "nopi"), default="full")
        p.add_argument("--jobs", type=_positive_int, default=1, help="concurrent build solvers")
        p.add_argument("--ordered", action=argparse.BooleanOptionalAction, default=True,
                       help="body slots may only take symbols ranked after the clause head")

    p = sub.add_parser("solve", help="solve each task in a task file", epilog=TASK_FORMAT, formatter_class=fmt)
    common(p)
    search(p)
    p.add_argument("tasks")
    p.add_argument("--bk", help="BK listing to load on top of the primitives")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("play", help="run the play stage and write the BK listing",
                       epilog=TASK_FORMAT + "\n\n" + BK_FORMAT, formatter_class=fmt)
    common(p)
    search(p)
    p.add_argument("--tasks", help="play task file; generated from --seed when absent")
    p.add_argument("--count", type=int, default=100, help="number of generated play tasks")
    p.add_argument("--n", type=int, default=5, help="robot grid size")
    p.add_argument("--bk", help="BK listing to start from")
    p.set_defaults(func=cmd_play)

    p = sub.add_parser("build", help="solve build tasks against a BK listing",
                       epilog=TASK_FORMAT + "\n\n" + BK_FORMAT, formatter_class=fmt)
    common(p)
    search(p)
    p.add_argument("tasks")
    p.add_argument("--bk", help="BK listing produced by play")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("experiment", help="run an experiment config", epilog=CONFIG_FORMAT, formatter_class=fmt)
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--deadline", type=_positive_float)
    p.add_argument("--max-d", type=_positive_int)
    p.add_argument("--jobs", type=_positive_int)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("gen-tasks", help="sample domain tasks", epilog=TASK_FORMAT, formatter_class=fmt)
    common(p, seed_required=True)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--n", type=int, default=5, help="robot grid size")
    p.add_argument("--prefix", default="task")
    p.set_defaults(func=cmd_gen_tasks)

    p = sub.add_parser("theory", help="hypothesis-space size, sample bound, play improvement test")
    p.add_argument("--m", type=int, required=True, help="number of metarules")
    p.add_argument("--p", type=int, required=True, help="number of predicate symbols")
    p.add_argument("--j", type=int, required=True, help="body literals per metarule")
    p.add_argument("--n", type=int, required=True, help="clauses in the target program")
    p.add_argument("--eps", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--k", type=int, help="clauses saved by play (default 1)")
    p.add_argument("--c", type=int, help="symbols added by play (default 1)")
    p.set_defaults(func=cmd_theory)

    p = sub.add_parser("show-bk", help="pretty-print a BK listing", epilog=BK_FORMAT, formatter_class=fmt)
    p.add_argument("listing")
    p.add_argument("--domain", choices=("robot", "strings"), required=True)
    p.set_defaults(func=cmd_show_bk)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (CliError, ConfigError, LogicError, ValueError, OSError) as e:
        print(f"playgol: error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
