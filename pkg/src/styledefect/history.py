"""Line-level history replay.

Every commit's file contents are rebuilt from its first parent plus its deltas,
and each line remembers the commit that last wrote it (its *origin*).  This is
the annotate/blame information SZZ needs, computed in a single topological pass
over the graph.

Merge commits are diffed against their first parent, so the lines a merge
brings in from a side branch show up as additions.  Those lines are matched
against the other parents' copies of the file and keep their original origin.
"""

from __future__ import annotations

import difflib
import logging
from typing import Iterable, NamedTuple

from .repo import Commit, CommitGraph, FileDelta

log = logging.getLogger(__name__)


class Line(NamedTuple):
    text: str
    origin: str


# path -> lines, or None when a modification arrived for a file whose base is unknown
FileState = dict[str, "tuple[Line, ...] | None"]


def apply_line_changes(old: tuple[Line, ...], delta: FileDelta, origin: str,
                       donors: list[tuple[Line, ...]] = ()) -> tuple[Line, ...]:
    removed = {n for n, _ in delta.removed}
    kept = [line for i, line in enumerate(old, 1) if i not in removed]
    added = sorted(delta.added)
    origins = [origin] * len(added)
    if donors:
        _inherit_origins(added, origins, donors)
    added_at = {n: (text, o) for (n, text), o in zip(added, origins)}
    total = len(kept) + len(added)
    out = []
    it = iter(kept)
    for pos in range(1, total + 1):
        if pos in added_at:
            text, o = added_at[pos]
            out.append(Line(text, o))
        else:
            nxt = next(it, None)
            if nxt is None:
                break
            out.append(nxt)
    # added line numbers beyond the rebuilt length (malformed hunk): append in order
    placed = {pos for pos in added_at if pos <= len(out)}
    for pos in sorted(set(added_at) - placed):
        text, o = added_at[pos]
        out.append(Line(text, o))
    out.extend(it)
    return tuple(out)


def _inherit_origins(added, origins, donors):
    texts = [t for _, t in added]
    settled = set()
    for donor in donors:
        open_idx = [i for i in range(len(texts)) if i not in settled]
        if not open_idx or not donor:
            continue
        sm = difflib.SequenceMatcher(None, [texts[i] for i in open_idx],
                                     [line.text for line in donor], autojunk=False)
        for a, b, size in sm.get_matching_blocks():
            for k in range(size):
                i = open_idx[a + k]
                origins[i] = donor[b + k].origin
                settled.add(i)


def apply_commit(state: FileState, commit: Commit, donors: list[FileState] = ()) -> tuple[FileState, int]:
    """Apply ``commit``'s deltas to ``state`` in place; return it and the count of orphan deltas."""
    orphans = 0
    for delta in commit.deltas:
        if delta.kind == "added":
            state[delta.path] = tuple(Line(t, commit.id) for _, t in sorted(delta.added))
            continue
        if delta.kind == "deleted":
            if state.pop(delta.path, None) is None:
                orphans += 1
            continue
        base = state.pop(delta.source_path, None) if delta.kind == "renamed" else state.get(delta.path)
        if base is None:
            orphans += 1
            state[delta.path] = None
            continue
        donor_files = []
        for d in donors:
            f = d.get(delta.path) or d.get(delta.source_path)
            if f:
                donor_files.append(f)
        state[delta.path] = apply_line_changes(base, delta, commit.id, donor_files)
    return state, orphans


def replay_states(graph: CommitGraph, targets: Iterable[str]) -> dict[str, FileState]:
    """File states (with line origins) at each commit in ``targets``.

    States of intermediate commits are dropped as soon as no pending child needs
    them, and a parent's dict is reused in place when this is its last consumer.
    """
    targets = set(targets)
    for t in targets:
        if t not in graph:
            raise KeyError(t)
    if not targets:
        return {}
    needed = set()
    for t in targets:
        needed |= graph.ancestors(t)
    consumers = {cid: 0 for cid in needed}
    for cid in needed:
        for p in set(graph[cid].parent_ids):
            consumers[p] += 1
    states: dict[str, FileState] = {}
    result: dict[str, FileState] = {}
    orphan_total = 0
    for cid in graph.order:
        if cid not in needed:
            continue
        commit = graph[cid]
        parents = commit.parent_ids
        if parents:
            first = parents[0]
            consumers[first] -= 1
            if consumers[first] == 0 and first not in targets:
                state = states.pop(first)
            else:
                state = dict(states[first])
        else:
            state = {}
        donors = [states[p] for p in parents[1:] if p in states]
        state, orphans = apply_commit(state, commit, donors)
        orphan_total += orphans
        for p in set(parents[1:]):
            consumers[p] -= 1
            if consumers[p] == 0 and p not in targets:
                states.pop(p, None)
        if consumers[cid] > 0:
            states[cid] = state
        if cid in targets:
            result[cid] = state
    if orphan_total:
        log.debug("replay saw %d deltas without a known base file", orphan_total)
    return result
