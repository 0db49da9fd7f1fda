"""Play-budget sweeps over repetitions, with per-task records and summary statistics."""
from __future__ import annotations

import ast
import csv
import hashlib
import io
import json
import logging
import math
import platform
import random
import statistics
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Iterable, Sequence

from . import __version__
from .bk import BKRegistry
from .domains import robot, strings
from .domains.corpus import corpus_path
from .engine import SolveOutcome, Task
from .loop import PlaygolConfig, PlayReport, build, play
from .persist import atomic_write, render_bk

log = logging.getLogger(__name__)

EXPERIMENT_MODES = ("full", "nopi", "baseline")
SUMMARY_COLUMNS = ("domain", "mode", "budget", "mean", "sem", "n_reps")
# proof steps per second of wall clock, measured on the robot domain
DEFAULT_STEPS_PER_SECOND = 1_000_000


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    domain: str
    play_budgets: tuple[int, ...] = (0,)
    repetitions: int = 1
    per_task_deadline: float = 60.0
    max_d: int = 5
    modes: tuple[str, ...] = ("full",)
    seed: int = 0
    n: int = 5
    build_count: int = 100
    build_source: str | None = None
    train_size: int = 5
    clock: str = "wall"
    steps_per_second: int = DEFAULT_STEPS_PER_SECOND
    jobs: int = 1
    # body slots take only symbols ranked after the clause head (see SolveConfig.ordered)
    ordered: bool = True

    def __post_init__(self):
        object.__setattr__(self, "play_budgets", tuple(int(b) for b in self.play_budgets))
        object.__setattr__(self, "modes", tuple(self.modes))
        if self.domain not in ("robot", "strings"):
            raise ConfigError(f"unknown domain {self.domain!r}")
        if not self.play_budgets or list(self.play_budgets) != sorted(self.play_budgets):
            raise ConfigError("play_budgets must be non-empty and sorted ascending")
        if any(b < 0 for b in self.play_budgets):
            raise ConfigError("play budgets must be >= 0")
        if self.repetitions < 1:
            raise ConfigError("repetitions must be >= 1")
        if not self.modes or any(m not in EXPERIMENT_MODES for m in self.modes):
            raise ConfigError(f"modes must be a non-empty subset of {EXPERIMENT_MODES}")
        if len(set(self.modes)) != len(self.modes):
            raise ConfigError("duplicate modes")
        if not self.per_task_deadline > 0:
            raise ConfigError("per_task_deadline must be positive")
        if self.max_d < 1:
            raise ConfigError("max_d must be >= 1")
        if not isinstance(self.ordered, bool):
            raise ConfigError("ordered must be true or false")
        if self.clock not in ("wall", "steps"):
            raise ConfigError("clock must be 'wall' or 'steps'")
        if self.domain == "robot" and (self.n < 2 or self.build_count < 1):
            raise ConfigError("robot domain needs n >= 2 and build_count >= 1")
        if self.domain == "strings" and not 1 <= self.train_size:
            raise ConfigError("train_size must be >= 1")

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "domain" not in data:
            raise ConfigError("config needs a 'domain'")
        try:
            return cls(**data)
        except TypeError as e:
            raise ConfigError(str(e)) from None

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: {e}") from None
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: expected a JSON object")
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["play_budgets"] = list(self.play_budgets)
        d["modes"] = list(self.modes)
        return d

    def playgol_config(self, mode: str) -> PlaygolConfig:
        metarules = robot.METARULES if self.domain == "robot" else strings.METARULES
        max_steps, deadline = None, self.per_task_deadline
        if self.clock == "steps":
            max_steps = max(1, int(self.per_task_deadline * self.steps_per_second))
            # the wall clock is only a backstop here; it must not fire before the step limit
            deadline = self.per_task_deadline * 20
        return PlaygolConfig(self.max_d, deadline, "nopi" if mode == "nopi" else "full",
                             self.seed, metarules, max_steps, self.jobs, ordered=self.ordered)


@dataclass
class ExperimentRecord:
    domain: str
    mode: str
    play_budget: int
    repetition: int
    task: str
    outcome: str
    solved: bool
    correct: bool
    accuracy: float
    elapsed: float
    program_size: int
    learned_refs: int
    invented_refs: int
    play_solved: int = 0
    play_elapsed: float = 0.0
    program: str | None = None

    def __post_init__(self):
        if self.mode not in EXPERIMENT_MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if not 0.0 <= self.accuracy <= 1.0:
            raise ValueError("accuracy must lie in [0, 1]")
        if self.learned_refs < 0 or self.invented_refs < 0:
            raise ValueError("reuse counts must be >= 0")

    def key(self):
        return (self.repetition, self.play_budget, EXPERIMENT_MODES.index(self.mode), self.task)


def _rng(cfg_seed: int, *parts) -> random.Random:
    return random.Random(":".join(str(p) for p in (cfg_seed, *parts)))


def reuse_counts(program, bk: BKRegistry) -> tuple[int, int]:
    """Body references to learned play targets and to learned invented predicates."""
    if program is None:
        return 0, 0
    targets = {e.program.target.name for e in bk.entries}
    learned, invented = 0, 0
    for c in program.clauses:
        for lit in c.body:
            name = lit.pred.name
            if name in targets:
                learned += 1
            elif name in bk.definitions:
                invented += 1
    return learned, invented


@dataclass
class _Run:
    outcomes: dict[str, SolveOutcome]
    bk: BKRegistry
    report: PlayReport | None = None


class _Experiment:
    def __init__(self, cfg: ExperimentConfig, bk_dir: Path | None = None):
        self.cfg = cfg
        self.bk_dir = bk_dir
        self.listings: dict[str, str] = {}

    def base_bk(self) -> BKRegistry:
        return robot.make_bk() if self.cfg.domain == "robot" else strings.make_bk()

    def play_tasks(self, bk, rep, budget) -> list[Task]:
        rng = _rng(self.cfg.seed, "play", rep, budget)
        if self.cfg.domain == "robot":
            return robot.sample_tasks(self.cfg.n, budget, rng, "play")
        return strings.gen_tasks(bk, budget, rng, "play")

    def run_mode(self, build_tasks, rep, budget, mode, cache) -> _Run:
        bk0 = self.base_bk()
        if mode == "baseline" or budget == 0:
            # no play tasks: identical to independent learning on the initial BK
            if rep not in cache:
                cache[rep] = _Run(build(bk0, build_tasks, self.cfg.playgol_config("full")), bk0)
            return cache[rep]
        pcfg = self.cfg.playgol_config(mode)
        bk, report = play(bk0, self.play_tasks(bk0, rep, budget), pcfg)
        listing = render_bk(bk)
        name = f"{self.cfg.domain}_rep{rep}_budget{budget}_{mode}.pl"
        self.listings[name] = listing
        if self.bk_dir is not None:
            atomic_write(self.bk_dir / name, listing)
        return _Run(build(bk, build_tasks, pcfg), bk, report)

    def record(self, run: _Run, task: Task, rep, budget, mode, correct, accuracy) -> ExperimentRecord:
        out = run.outcomes[task.name]
        learned, invented = reuse_counts(out.program, run.bk)
        return ExperimentRecord(
            self.cfg.domain, mode, budget, rep, task.name, out.result.value, out.solved,
            bool(correct), float(accuracy), round(out.stats.elapsed, 4),
            len(out.program) if out.program is not None else 0, learned, invented,
            run.report.programs_saved if run.report else 0,
            round(run.report.elapsed, 4) if run.report else 0.0,
            str(out.program).strip() if out.program is not None else None)


def run_robot_experiment(cfg: ExperimentConfig, bk_dir=None, listings: dict | None = None) -> list[ExperimentRecord]:
    if cfg.domain != "robot":
        raise ConfigError("run_robot_experiment needs domain = robot")
    exp = _Experiment(cfg, Path(bk_dir) if bk_dir else None)
    records = []
    for rep in range(cfg.repetitions):
        build_tasks = robot.sample_tasks(cfg.n, cfg.build_count, _rng(cfg.seed, "build", rep), "build")
        cache: dict = {}
        for budget in cfg.play_budgets:
            for mode in cfg.modes:
                run = exp.run_mode(build_tasks, rep, budget, mode, cache)
                for task in build_tasks:
                    out = run.outcomes[task.name]
                    correct = out.solved and robot.check_solution(out.program, task.positives[0], run.bk)
                    if out.solved and not correct:
                        log.error("%s: solution fails check_solution", task.name)
                    records.append(exp.record(run, task, rep, budget, mode, correct, float(correct)))
                log.info("robot rep %d budget %d %s: %d/%d solved", rep, budget, mode,
                         sum(r.correct for r in records[-len(build_tasks):]), len(build_tasks))
    if listings is not None:
        listings.update(exp.listings)
    return sorted(records, key=ExperimentRecord.key)


def load_string_tasks(cfg: ExperimentConfig) -> list[Task]:
    source = cfg.build_source
    if source is None or source == "synthetic":
        with corpus_path().open(encoding="utf-8") as fh:
            return strings.parse_task_records(fh, "synthetic corpus")
    return strings.ingest_build_tasks(source)


def split_task(task: Task, rng: random.Random, train_size: int) -> tuple[Task, list[tuple[str, str]]]:
    pairs = strings.task_pairs(task)
    idx = sorted(rng.sample(range(len(pairs)), train_size))
    train = [pairs[i] for i in idx]
    test = [p for i, p in enumerate(pairs) if i not in idx]
    return strings.make_task(task.name, train), test


def run_string_experiment(cfg: ExperimentConfig, bk_dir=None, listings: dict | None = None,
                          tasks: Sequence[Task] | None = None) -> list[ExperimentRecord]:
    if cfg.domain != "strings":
        raise ConfigError("run_string_experiment needs domain = strings")
    tasks = list(tasks) if tasks is not None else load_string_tasks(cfg)
    usable = []
    for t in tasks:
        if len(t.positives) != 2 * cfg.train_size:
            log.warning("skipping %s: %d examples, expected %d", t.name, len(t.positives), 2 * cfg.train_size)
            continue
        usable.append(t)
    exp = _Experiment(cfg, Path(bk_dir) if bk_dir else None)
    records = []
    for rep in range(cfg.repetitions):
        rng = _rng(cfg.seed, "split", rep)
        splits = [split_task(t, rng, cfg.train_size) for t in usable]
        train_tasks = [s[0] for s in splits]
        cache: dict = {}
        for budget in cfg.play_budgets:
            for mode in cfg.modes:
                run = exp.run_mode(train_tasks, rep, budget, mode, cache)
                for train, test in splits:
                    out = run.outcomes[train.name]
                    if out.solved:
                        hits = sum(strings.transforms_correctly(out.program, run.bk, x, y) for x, y in test)
                        acc = hits / len(test)
                    else:
                        acc = 0.0
                    records.append(exp.record(run, train, rep, budget, mode, out.solved and acc == 1.0, acc))
    if listings is not None:
        listings.update(exp.listings)
    return sorted(records, key=ExperimentRecord.key)


def run_experiment(cfg: ExperimentConfig, bk_dir=None, listings: dict | None = None) -> list[ExperimentRecord]:
    if cfg.domain == "robot":
        return run_robot_experiment(cfg, bk_dir, listings)
    return run_string_experiment(cfg, bk_dir, listings)


# -- statistics -----------------------------------------------------------------

def sem(values: Sequence[float]) -> float:
    """Standard error of the mean, with the sample standard deviation; 0 for one value."""
    if len(values) < 2:
        return 0.0
    return statistics.stdev(values) / math.sqrt(len(values))


@dataclass(frozen=True)
class SummaryRow:
    domain: str
    mode: str
    budget: int
    mean: float
    sem: float
    n_reps: int
    sem_defined: bool = True


def summarize(records: Iterable[ExperimentRecord]) -> list[SummaryRow]:
    """Per (mode, budget): mean over repetitions of the per-repetition percentage, and its SEM.

    Robot rows score the percentage of build tasks solved correctly; string
    rows the mean predictive accuracy, both in percent.
    """
    records = list(records)
    if not records:
        raise ValueError("no records to summarize")
    groups: dict[tuple, dict[int, list[float]]] = {}
    for r in records:
        value = (1.0 if r.correct else 0.0) if r.domain == "robot" else r.accuracy
        groups.setdefault((r.domain, r.mode, r.play_budget), {}).setdefault(r.repetition, []).append(value)
    rows = []
    for (domain, mode, budget), reps in groups.items():
        per_rep = [100.0 * sum(v) / len(v) for _, v in sorted(reps.items())]
        rows.append(SummaryRow(domain, mode, budget, statistics.fmean(per_rep), sem(per_rep),
                               len(per_rep), len(per_rep) > 1))
    rows.sort(key=lambda r: (r.domain, EXPERIMENT_MODES.index(r.mode), r.budget))
    return rows


def summary_csv(rows: Iterable[SummaryRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SUMMARY_COLUMNS)
    for r in rows:
        w.writerow([r.domain, r.mode, r.budget, f"{r.mean:.6f}", f"{r.sem:.6f}", r.n_reps])
    return buf.getvalue()


@dataclass(frozen=True)
class McNemarResult:
    statistic: float
    p_value: float
    b: int
    c: int
    exact: bool
    significant_at: tuple[float, ...] = field(default=())
    no_discordant: bool = False


MCNEMAR_THRESHOLDS = (0.05, 0.01, 0.001)


def mcnemar(pairs: Iterable[tuple[bool, bool]], exact_below: int = 25) -> McNemarResult:
    """Paired test on discordant counts ``b`` (a only) and ``c`` (b only).

    The statistic is always the continuity-corrected chi-square; the p-value
    is the exact two-sided binomial when ``b + c < exact_below``.
    """
    b = c = 0
    for x, y in pairs:
        if x and not y:
            b += 1
        elif y and not x:
            c += 1
    n = b + c
    if n == 0:
        return McNemarResult(0.0, 1.0, 0, 0, True, (), True)
    stat = (abs(b - c) - 1) ** 2 / n
    if n < exact_below:
        tail = sum(math.comb(n, i) for i in range(max(b, c), n + 1)) / 2 ** n
        p = min(1.0, 2 * tail)
        exact = True
    else:
        # chi-square with one degree of freedom
        p = math.erfc(math.sqrt(stat / 2))
        exact = False
    return McNemarResult(stat, p, b, c, exact, tuple(t for t in MCNEMAR_THRESHOLDS if p < t))


def paired_outcomes(records: Iterable[ExperimentRecord], mode_a: str, mode_b: str,
                    budget: int) -> list[tuple[bool, bool]]:
    by_key: dict[tuple, dict[str, bool]] = {}
    for r in records:
        if r.play_budget == budget and r.mode in (mode_a, mode_b):
            by_key.setdefault((r.repetition, r.task), {})[r.mode] = r.correct
    return [(v[mode_a], v[mode_b]) for _, v in sorted(by_key.items()) if len(v) == 2]


# -- persistence ----------------------------------------------------------------

def records_jsonl(records: Iterable[ExperimentRecord]) -> str:
    return "".join(json.dumps(asdict(r), sort_keys=True) + "\n" for r in records)


def read_records(path) -> list[ExperimentRecord]:
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            out.append(ExperimentRecord(**json.loads(line)))
    return out


# modules whose code decides experiment results
_RESULT_MODULES = ("bk", "engine", "fixpoint", "harness", "interpreter", "logic", "loop", "persist",
                   "domains/robot", "domains/strings", "domains/corpus")


def source_digest() -> str:
    """Hash of the result-relevant modules' syntax trees, ignoring comments and docstrings."""
    root = Path(__file__).resolve().parent
    h = hashlib.sha256()
    for name in _RESULT_MODULES:
        tree = ast.parse((root / f"{name}.py").read_text(encoding="utf-8"))
        for node in ast.walk(tree):
            body = getattr(node, "body", None)
            if (isinstance(body, list) and body and isinstance(body[0], ast.Expr)
                    and isinstance(body[0].value, ast.Constant) and isinstance(body[0].value.value, str)):
                node.body = body[1:] or [ast.Pass()]
        h.update(name.encode() + b"\0" + ast.dump(tree).encode() + b"\0")
    return h.hexdigest()


def manifest(cfg: ExperimentConfig) -> dict:
    return {
        "config": cfg.to_dict(),
        "source_digest": source_digest(),
        "seed": cfg.seed,
        "playgol_version": __version__,
        "python": platform.python_version(),
        "outputs": ["records.jsonl", "summary.csv", "bk/"],
    }


def write_outputs(out_dir, cfg: ExperimentConfig, records: list[ExperimentRecord],
                  listings: dict[str, str]) -> list[SummaryRow]:
    out = Path(out_dir)
    rows = summarize(records)
    atomic_write(out / "records.jsonl", records_jsonl(records))
    atomic_write(out / "summary.csv", summary_csv(rows))
    atomic_write(out / "manifest.json", json.dumps(manifest(cfg), indent=2, sort_keys=True) + "\n")
    for name, text in sorted(listings.items()):
        atomic_write(out / "bk" / name, text)
    return rows
