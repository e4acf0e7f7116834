"""SZZ: trace bug-fixing changes back to the commits that introduced them.

The variant is plain SZZ on first-parent diffs, with two refinements: blank and
comment-only removed lines are not blamed, and line history follows renames.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .history import FileState, replay_states
from .repo import Commit, CommitGraph, Release, has_source_extension
from .style.tokenizer import code_line_numbers

log = logging.getLogger(__name__)

LABELS = ("buggy", "clean")


@dataclass(frozen=True, order=True)
class BugSpan:
    introducing_id: str
    fixing_id: str
    path: str


@dataclass(frozen=True, order=True)
class FileLabel:
    release_label: str
    path: str
    label: str

    def __post_init__(self):
        if self.label not in LABELS:
            raise ValueError(f"label must be buggy or clean, got {self.label!r}")


@dataclass
class TraceStats:
    fixes: int = 0
    blamed_lines: int = 0
    skipped_noncode_lines: int = 0
    untraceable_lines: int = 0
    warnings: list[str] = field(default_factory=list)


def _meaningful_lines(lines) -> set[int]:
    text = "\n".join(line.text for line in lines)
    return code_line_numbers(text)


def trace_with_state(graph: CommitGraph, fix: Commit, parent_state: FileState,
                     stats: TraceStats | None = None) -> list[BugSpan]:
    stats = stats if stats is not None else TraceStats()
    stats.fixes += 1
    spans = set()
    for delta in fix.deltas:
        if not delta.removed or not has_source_extension(delta.path, graph.extensions):
            continue
        old = parent_state.get(delta.source_path)
        if old is None:
            stats.untraceable_lines += len(delta.removed)
            stats.warnings.append(f"{fix.id}: {delta.source_path} absent in parent")
            continue
        code_lines = _meaningful_lines(old)
        for number, _text in delta.removed:
            if number > len(old):
                stats.untraceable_lines += 1
                stats.warnings.append(f"{fix.id}: {delta.source_path}:{number} beyond parent file")
                continue
            if number not in code_lines:
                stats.skipped_noncode_lines += 1
                continue
            stats.blamed_lines += 1
            spans.add(BugSpan(old[number - 1].origin, fix.id, delta.path))
    return sorted(spans)


def trace_introducers(graph: CommitGraph, fix: Commit, stats: TraceStats | None = None) -> list[BugSpan]:
    """Bug spans for one fixing commit, blaming its first parent."""
    if not fix.parent_ids:
        return []
    parent = fix.parent_ids[0]
    state = replay_states(graph, [parent])[parent]
    return trace_with_state(graph, fix, state, stats)


def trace_all(graph: CommitGraph, fixes: Iterable[Commit], stats: TraceStats | None = None) -> list[BugSpan]:
    """Spans for many fixes with one replay over the graph."""
    fixes = [f for f in fixes if f.parent_ids]
    states = replay_states(graph, {f.parent_ids[0] for f in fixes})
    spans = set()
    for f in fixes:
        spans.update(trace_with_state(graph, f, states[f.parent_ids[0]], stats))
    return sorted(spans)


def path_at(graph: CommitGraph, span: BugSpan, commit_id: str) -> str:
    """Name of ``span.path`` in ``commit_id``, undoing renames made after it on the way to the fix."""
    later = graph.ancestors(span.fixing_id) - graph.ancestors(commit_id)
    name = span.path
    for cid in reversed(graph.order):
        if cid not in later:
            continue
        for d in graph[cid].deltas:
            if d.kind == "renamed" and d.path == name:
                name = d.old_path
    return name


def label_release(graph: CommitGraph, release: Release, spans: Sequence[BugSpan],
                  files: Iterable[str]) -> list[FileLabel]:
    """Buggy iff some span was introduced at/before the release and fixed after it."""
    here = graph.ancestors(release.commit_id)
    files = sorted(set(files))
    wanted = set(files)
    buggy = set()
    for span in spans:
        if span.introducing_id not in here or span.fixing_id in here:
            continue
        name = path_at(graph, span, release.commit_id)
        if name in wanted:
            buggy.add(name)
    return [FileLabel(release.label, p, "buggy" if p in buggy else "clean") for p in files]


def write_labels(labels: Iterable[FileLabel], path: str | Path):
    rows = sorted(labels)
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["release", "path", "label"])
        for lab in rows:
            w.writerow([lab.release_label, lab.path, lab.label])


def read_labels(path: str | Path) -> list[FileLabel]:
    from .errors import SchemaError
    out = []
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["release", "path", "label"]:
            raise SchemaError(f"{path}: expected header release,path,label")
        for lineno, row in enumerate(reader, 2):
            if len(row) != 3:
                raise SchemaError(f"{path}:{lineno}: expected 3 columns", line=lineno)
            label = row[2].strip().lower()
            if label not in LABELS:
                raise SchemaError(f"{path}:{lineno}: bad label {row[2]!r}", line=lineno)
            out.append(FileLabel(row[0], row[1], label))
    return out


def write_spans(spans: Iterable[BugSpan], path: str | Path):
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["introducing", "fixing", "path"])
        for s in sorted(spans):
            w.writerow([s.introducing_id, s.fixing_id, s.path])
