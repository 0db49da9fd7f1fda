"""Metarule-driven program synthesis with an unsupervised play stage."""

__version__ = "0.1.0"

from .engine import Atom, Result, SolveConfig, SolveOutcome, Task, solve  # noqa: E402
from .bk import BKRegistry, Primitive  # noqa: E402
from .loop import PlaygolConfig, PlayReport, build, play, playgol  # noqa: E402

__all__ = ["Atom", "Result", "SolveConfig", "SolveOutcome", "Task", "solve", "BKRegistry",
           "Primitive", "PlaygolConfig", "PlayReport", "build", "play", "playgol", "__version__"]
