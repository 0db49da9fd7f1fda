"""BK listings on disk and atomic file writes."""
from __future__ import annotations

import os
import re
import tempfile
from pathlib import Path

from .bk import BKRegistry
from .logic import LogicError, ParseError, parse_program, render_program

HEADER = "% playgol BK listing\n"
_DIRECTIVE = re.compile(r"^% program (\S+)((?: \w+=\S*)*)\s*$")


def atomic_write(path, text: str) -> None:
    """Write via a temporary file in the same directory, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def render_bk(bk: BKRegistry, timings: bool = False) -> str:
    """Learned programs in acquisition order, each preceded by a provenance directive."""
    parts = [HEADER]
    for e in bk.entries:
        fields = [f"task={e.task}"]
        if e.depth is not None:
            fields.append(f"depth={e.depth}")
        fields.append("reusable=" + ",".join(e.reusable))
        if timings and e.elapsed_ms is not None:
            fields.append(f"elapsed_ms={e.elapsed_ms}")
        parts.append(f"% program {e.program.target.name} {' '.join(fields)}\n")
        if e.depth is not None:
            parts.append(f"% solved at depth {e.depth}"
                         + (f", {e.elapsed_ms} ms" if timings and e.elapsed_ms is not None else "") + "\n")
        parts.append(render_program(e.program))
    return "".join(parts)


def save_bk(bk: BKRegistry, path, timings: bool = False) -> None:
    atomic_write(path, render_bk(bk, timings))


def parse_bk(text: str, base: BKRegistry) -> BKRegistry:
    """Add every program of a listing to a copy of ``base`` (which supplies the primitives)."""
    bk = base.copy()
    blocks: list[tuple[str, dict, list[str], int]] = []
    for lineno, line in enumerate(text.splitlines(keepends=True), 1):
        m = _DIRECTIVE.match(line)
        if m:
            fields = dict(f.split("=", 1) for f in m.group(2).split())
            blocks.append((m.group(1), fields, [], lineno))
        elif blocks:
            blocks[-1][2].append(line)
        elif line.strip() and not line.lstrip().startswith("%"):
            raise ParseError("clause before the first '% program' directive", lineno, 1)
    for name, fields, lines, lineno in blocks:
        try:
            program = parse_program("".join(lines))
        except ParseError as e:
            raise ParseError(str(e).split(": ", 1)[-1], e.line + lineno, e.column) from None
        if program.target.name != name:
            raise LogicError(f"line {lineno}: directive names {name} but program defines {program.target.name}")
        reusable = [r for r in fields.get("reusable", name).split(",") if r]
        depth = int(fields["depth"]) if "depth" in fields else None
        elapsed = float(fields["elapsed_ms"]) if "elapsed_ms" in fields else None
        bk.add_program(program, reusable, task=fields.get("task", name), depth=depth, elapsed_ms=elapsed)
    return bk


def load_bk(path, base: BKRegistry) -> BKRegistry:
    return parse_bk(Path(path).read_text(encoding="utf-8"), base)
