"""Unsupervised play stage, supervised build stage, and their composition."""
from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .bk import BKRegistry
from .engine import SolveConfig, SolveOutcome, Task, solve
from .interpreter import verify
from .logic import LogicError

log = logging.getLogger(__name__)

MODES = ("full", "nopi")


@dataclass(frozen=True)
class PlaygolConfig:
    max_d: int = 5
    per_task_deadline: float = 60.0
    mode: str = "full"
    seed: int = 0
    metarules: tuple[str, ...] = ("ident", "chain")
    max_steps: int | None = None
    jobs: int = 1
    parallel_within_depth: bool = False
    ordered: bool = False

    def __post_init__(self):
        object.__setattr__(self, "metarules", tuple(self.metarules))
        if self.max_d < 1:
            raise ValueError("max_d must be >= 1")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if not self.per_task_deadline > 0:
            raise ValueError("per_task_deadline must be positive")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")

    def solve_config(self, max_clauses: int) -> SolveConfig:
        return SolveConfig(self.metarules, max_clauses, self.per_task_deadline, max_steps=self.max_steps,
                           ordered=self.ordered)


@dataclass
class PlayReport:
    attempted: dict[int, int] = field(default_factory=dict)
    solved: dict[int, int] = field(default_factory=dict)
    programs_saved: int = 0
    targets_added: int = 0
    invented_added: int = 0
    elapsed: float = 0.0
    solved_tasks: list[str] = field(default_factory=list)
    registry: BKRegistry | None = field(default=None, repr=False)

    @property
    def predicates_added(self) -> int:
        return self.targets_added + self.invented_added


def _check_tasks(bk: BKRegistry, tasks: Sequence[Task]) -> None:
    names = [t.name for t in tasks]
    if len(set(names)) != len(names):
        raise LogicError("duplicate task names")
    for name in names:
        if name in bk:
            raise LogicError(f"task name {name} clashes with a BK predicate")


def play(bk: BKRegistry, tasks: Sequence[Task], cfg: PlaygolConfig,
         snapshots: dict[int, frozenset] | None = None) -> tuple[BKRegistry, PlayReport]:
    """Dependent learning over ``tasks``: depth 1..max_d, saving each solution at once.

    ``snapshots``, if given, receives the reusable symbol set after each depth.
    """
    _check_tasks(bk, tasks)
    start = time.monotonic()
    bk = bk.copy()
    report = PlayReport()
    pending = list(tasks)
    for d in range(1, cfg.max_d + 1):
        report.attempted[d] = len(pending)
        report.solved[d] = 0
        remaining = []
        if cfg.parallel_within_depth:
            # deviation from strict dependent learning: solve against the depth-start BK
            outcomes = build(bk, pending, PlaygolConfig(**{**cfg.__dict__, "max_d": d}))
        else:
            outcomes = None
        for task in pending:
            out = outcomes[task.name] if outcomes is not None else solve(task, bk, cfg.solve_config(d))
            if not out.solved:
                remaining.append(task)
                continue
            prog = out.program
            reusable = prog.defined if cfg.mode == "full" else (prog.target.name,)
            bk.add_program(prog, reusable, task=task.name, depth=d,
                           elapsed_ms=round(out.stats.elapsed * 1000, 1))
            report.solved[d] += 1
            report.programs_saved += 1
            report.targets_added += 1
            if cfg.mode == "full":
                report.invented_added += len(prog.defined) - 1
            report.solved_tasks.append(task.name)
        pending = remaining
        if snapshots is not None:
            snapshots[d] = frozenset(bk.reusable_names())
        log.info("play depth %d: solved %d/%d", d, report.solved[d], report.attempted[d])
    report.elapsed = time.monotonic() - start
    report.registry = bk
    return bk, report


def _solve_one(args):
    task, bk, scfg = args
    return task.name, solve(task, bk, scfg)


def build(bk: BKRegistry, tasks: Sequence[Task], cfg: PlaygolConfig) -> dict[str, SolveOutcome]:
    """Solve each task independently against the same registry.

    Results do not depend on task order or on ``jobs``.
    """
    _check_tasks(bk, tasks)
    scfg = cfg.solve_config(cfg.max_d)
    if cfg.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(cfg.jobs) as pool:
            results = dict(pool.map(_solve_one, [(t, bk, scfg) for t in tasks]))
        return {t.name: results[t.name] for t in tasks}
    # each task starts from the same memo state, as it would in a worker process
    return {t.name: solve(t, bk.copy(), scfg) for t in tasks}


def playgol(build_tasks: Sequence[Task], bk: BKRegistry, cfg: PlaygolConfig,
            task_generator: Callable[[BKRegistry], Iterable[Task]] | None = None,
            bk_out=None) -> tuple[dict[str, SolveOutcome], PlayReport]:
    """Generate play tasks from the BK, play, then build; optionally persist the BK listing.

    The augmented registry is available as ``report.registry``.
    """
    play_tasks = list(task_generator(bk)) if task_generator is not None else []
    augmented, report = play(bk, play_tasks, cfg)
    if bk_out is not None:
        from .persist import save_bk
        save_bk(augmented, bk_out)
    return build(augmented, build_tasks, cfg), report


def replay_check(bk: BKRegistry, tasks: Iterable[Task]) -> list[str]:
    """Names of saved play programs that no longer verify against their task."""
    by_name = {t.name: t for t in tasks}
    bad = []
    for entry in bk.entries:
        task = by_name.get(entry.task)
        if task is not None and not verify(entry.program, task, bk):
            bad.append(entry.task)
    return bad
