"""Commit-history ingestion, bug-fix detection and release selection.

Two kinds of source are accepted by :func:`open_repository`:

* a git working copy (read by shelling out to ``git``), and
* an offline *commit archive*: line-delimited JSON with one commit per line::

    {"id": "c1", "parents": [], "timestamp": 1262304000, "message": "...",
     "deltas": [{"path": "a.cpp", "kind": "added", "removed": [],
                 "added": [[1, "int x;"]]}],
     "snapshot": {"a.cpp": "int x;\\n"}}

  ``kind`` is one of added/modified/deleted/renamed; renamed deltas carry the
  previous name in ``old_path``.  ``snapshot`` is optional and only useful on
  tagged commits.
"""

from __future__ import annotations

import heapq
import json
import logging
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Callable, Iterable, Mapping, Sequence

from .errors import ArchiveValidationError, IngestionError, SnapshotError

log = logging.getLogger(__name__)

SOURCE_EXTENSIONS = ("cc", "cxx", "cpp", "cu", "c")
DEFAULT_KEYWORDS = ("fix", "fixed", "fixes", "bug", "bugs", "bugfix", "patch",
                    "defect", "fault", "error")
CHANGE_KINDS = ("added", "modified", "deleted", "renamed")

YEAR_SECONDS = 365.25 * 86400
EXCLUSION_YEARS = 3
MAX_RELEASES = 3


def has_source_extension(path: str, extensions: Iterable[str] = SOURCE_EXTENSIONS) -> bool:
    suffix = path.rsplit("/", 1)[-1]
    if "." not in suffix:
        return False
    ext = suffix.rsplit(".", 1)[1].lower()
    return ext in {e.lower().lstrip(".") for e in extensions}


@dataclass(frozen=True)
class FileDelta:
    path: str
    kind: str
    removed: tuple[tuple[int, str], ...] = ()
    added: tuple[tuple[int, str], ...] = ()
    old_path: str | None = None

    def __post_init__(self):
        if self.kind not in CHANGE_KINDS:
            raise ValueError(f"unknown change kind {self.kind!r} for {self.path}")
        if self.kind == "deleted" and self.added:
            raise ValueError(f"deleted file {self.path} cannot have added lines")
        if self.kind == "added" and self.removed:
            raise ValueError(f"added file {self.path} cannot have removed lines")
        if self.kind == "renamed" and not self.old_path:
            raise ValueError(f"renamed file {self.path} needs old_path")

    @property
    def source_path(self) -> str:
        """Name of the file in the parent commit."""
        return self.old_path if self.kind == "renamed" else self.path


@dataclass(frozen=True)
class Commit:
    id: str
    parent_ids: tuple[str, ...]
    timestamp: int
    message: str
    deltas: tuple[FileDelta, ...] = ()

    @property
    def is_merge(self) -> bool:
        return len(self.parent_ids) > 1


@dataclass(frozen=True, order=True)
class Release:
    timestamp: float
    project: str
    label: str
    commit_id: str

    def to_json(self) -> dict:
        return {"project": self.project, "label": self.label,
                "commit_id": self.commit_id, "timestamp": self.timestamp}


class CommitGraph:
    """Immutable commit DAG with ancestor queries.

    ``order`` lists commit ids so that parents always precede children; ties are
    broken by ingestion order, which makes every traversal deterministic.
    """

    def __init__(self, commits: Iterable[Commit], snapshots: Mapping[str, Mapping[str, str]] | None = None,
                 snapshot_loader: Callable[[str], dict[str, str]] | None = None,
                 extensions: Sequence[str] = SOURCE_EXTENSIONS):
        commit_list = list(commits)
        by_id: dict[str, Commit] = {}
        for c in commit_list:
            if c.id in by_id:
                raise ArchiveValidationError(f"duplicate commit id {c.id}", c.id)
            by_id[c.id] = c
        for c in commit_list:
            for p in c.parent_ids:
                if p not in by_id:
                    raise ArchiveValidationError(
                        f"commit {c.id} lists unknown parent {p}", p)
        self._commits = MappingProxyType(by_id)
        self.order: tuple[str, ...] = _topological_order(commit_list, by_id)
        children: dict[str, list[str]] = {cid: [] for cid in by_id}
        for cid in self.order:
            for p in by_id[cid].parent_ids:
                children[p].append(cid)
        self._children = MappingProxyType({k: tuple(v) for k, v in children.items()})
        self._snapshots = MappingProxyType({k: MappingProxyType(dict(v)) for k, v in (snapshots or {}).items()})
        self._snapshot_loader = snapshot_loader
        self.extensions = tuple(extensions)
        self._ancestor_cache: dict[str, frozenset[str]] = {}

    @property
    def commits(self) -> Mapping[str, Commit]:
        return self._commits

    def __len__(self):
        return len(self._commits)

    def __contains__(self, commit_id):
        return commit_id in self._commits

    def __getitem__(self, commit_id) -> Commit:
        return self._commits[commit_id]

    @property
    def roots(self) -> tuple[str, ...]:
        return tuple(cid for cid in self.order if not self._commits[cid].parent_ids)

    def children(self, commit_id: str) -> tuple[str, ...]:
        return self._children[commit_id]

    def ancestors(self, commit_id: str) -> frozenset[str]:
        """All commits reachable from ``commit_id``, including itself."""
        cached = self._ancestor_cache.get(commit_id)
        if cached is not None:
            return cached
        seen = {commit_id}
        stack = [commit_id]
        while stack:
            for p in self._commits[stack.pop()].parent_ids:
                if p not in seen:
                    seen.add(p)
                    stack.append(p)
        result = frozenset(seen)
        self._ancestor_cache[commit_id] = result
        return result

    def is_ancestor(self, ancestor: str, descendant: str) -> bool:
        """True when ``ancestor`` is reachable from ``descendant`` (or equal)."""
        return ancestor in self.ancestors(descendant)

    def first_timestamp(self) -> int:
        return min(c.timestamp for c in self._commits.values())

    def last_timestamp(self) -> int:
        return max(c.timestamp for c in self._commits.values())

    def stored_snapshot(self, commit_id: str) -> Mapping[str, str] | None:
        if commit_id in self._snapshots:
            return self._snapshots[commit_id]
        if self._snapshot_loader is not None:
            return self._snapshot_loader(commit_id)
        return None

    def has_stored_snapshot(self, commit_id: str) -> bool:
        return commit_id in self._snapshots or self._snapshot_loader is not None

    def __eq__(self, other):
        if not isinstance(other, CommitGraph):
            return NotImplemented
        return (self.order == other.order and dict(self._commits) == dict(other._commits)
                and {k: dict(v) for k, v in self._snapshots.items()}
                == {k: dict(v) for k, v in other._snapshots.items()})

    __hash__ = None


def _topological_order(commits: list[Commit], by_id: dict[str, Commit]) -> tuple[str, ...]:
    position = {c.id: i for i, c in enumerate(commits)}
    pending = {c.id: len(set(c.parent_ids)) for c in commits}
    children: dict[str, list[str]] = {c.id: [] for c in commits}
    for c in commits:
        for p in set(c.parent_ids):
            children[p].append(c.id)
    ready = [(position[cid], cid) for cid, n in pending.items() if n == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        _, cid = heapq.heappop(ready)
        order.append(cid)
        for child in children[cid]:
            pending[child] -= 1
            if pending[child] == 0:
                heapq.heappush(ready, (position[child], child))
    if len(order) != len(commits):
        stuck = sorted((cid for cid, n in pending.items() if n > 0), key=position.get)
        raise ArchiveValidationError(f"commit graph has a cycle through commit {stuck[0]}", stuck[0])
    return tuple(order)


# -- archive ingestion -------------------------------------------------------

def _parse_lines(raw, where: str) -> tuple[tuple[int, str], ...]:
    out = []
    for item in raw or ():
        if not isinstance(item, (list, tuple)) or len(item) != 2:
            raise ArchiveValidationError(f"{where}: line entries must be [number, text]")
        number, text = item
        if not isinstance(number, int) or number < 1 or not isinstance(text, str):
            raise ArchiveValidationError(f"{where}: bad line entry {item!r}")
        out.append((number, text))
    return tuple(out)


def _parse_delta(raw: dict, commit_id: str) -> FileDelta:
    where = f"commit {commit_id}"
    try:
        path = raw["path"]
        kind = raw["kind"]
    except (KeyError, TypeError):
        raise ArchiveValidationError(f"{where}: delta needs 'path' and 'kind'", commit_id) from None
    try:
        return FileDelta(path=path, kind=kind,
                         removed=_parse_lines(raw.get("removed"), where),
                         added=_parse_lines(raw.get("added"), where),
                         old_path=raw.get("old_path"))
    except ValueError as exc:
        raise ArchiveValidationError(f"{where}: {exc}", commit_id) from None


def _keep_delta(delta: FileDelta, extensions) -> bool:
    if has_source_extension(delta.path, extensions):
        return True
    return delta.kind == "renamed" and has_source_extension(delta.old_path, extensions)


def read_archive(path: str | Path, extensions: Sequence[str] = SOURCE_EXTENSIONS) -> CommitGraph:
    path = Path(path)
    if not path.exists():
        raise IngestionError(f"commit archive not found: {path}")
    commits = []
    snapshots = {}
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise IngestionError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from None
            try:
                cid = str(obj["id"])
                parents = tuple(str(p) for p in obj.get("parents", ()))
                timestamp = int(obj["timestamp"])
            except (KeyError, TypeError, ValueError):
                raise ArchiveValidationError(f"{path}:{lineno}: commit needs id and timestamp") from None
            deltas = tuple(d for d in (_parse_delta(r, cid) for r in obj.get("deltas", ()))
                           if _keep_delta(d, extensions))
            commits.append(Commit(cid, parents, timestamp, obj.get("message", ""), deltas))
            if obj.get("snapshot") is not None:
                snapshots[cid] = dict(obj["snapshot"])
    return CommitGraph(commits, snapshots=snapshots, extensions=extensions)


def write_archive(graph: CommitGraph, path: str | Path, snapshots: Mapping[str, Mapping[str, str]] | None = None):
    """Serialize ``graph`` in commit-archive format, optionally adding snapshots."""
    snapshots = dict(snapshots or {})
    with Path(path).open("w", encoding="utf-8") as fh:
        for cid in graph.order:
            c = graph[cid]
            obj = {"id": c.id, "parents": list(c.parent_ids), "timestamp": c.timestamp,
                   "message": c.message, "deltas": []}
            for d in c.deltas:
                rd = {"path": d.path, "kind": d.kind,
                      "removed": [list(x) for x in d.removed], "added": [list(x) for x in d.added]}
                if d.old_path is not None:
                    rd["old_path"] = d.old_path
                obj["deltas"].append(rd)
            snap = snapshots.get(cid)
            if snap is None and cid in graph._snapshots:
                snap = graph._snapshots[cid]
            if snap is not None:
                obj["snapshot"] = {k: snap[k] for k in sorted(snap)}
            fh.write(json.dumps(obj, sort_keys=True) + "\n")


def open_repository(source: str | Path, branch: str = "master",
                    extensions: Sequence[str] = SOURCE_EXTENSIONS) -> CommitGraph:
    """Load a commit graph from a git working copy or a commit archive."""
    source = Path(source)
    if not source.exists():
        raise IngestionError(f"repository source not found: {source}")
    if source.is_dir():
        from .gitlog import read_git_repository
        return read_git_repository(source, branch=branch, extensions=extensions)
    return read_archive(source, extensions=extensions)


def load_releases(path: str | Path) -> list[Release]:
    path = Path(path)
    if not path.exists():
        raise IngestionError(f"releases file not found: {path}")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise IngestionError(f"{path}: invalid JSON ({exc.msg})") from None
    if not isinstance(raw, list):
        raise IngestionError(f"{path}: expected a JSON list of releases")
    releases = []
    for i, r in enumerate(raw):
        try:
            releases.append(Release(timestamp=r["timestamp"], project=str(r["project"]),
                                    label=str(r["label"]), commit_id=str(r["commit_id"])))
        except (KeyError, TypeError):
            raise IngestionError(f"{path}: release #{i} needs project, label, commit_id, timestamp") from None
    return sorted(releases)


def check_releases(graph: CommitGraph, releases: Sequence[Release]):
    for r in releases:
        if r.commit_id not in graph:
            raise IngestionError(f"release {r.label} points at unknown commit {r.commit_id}")
    stamps = [r.timestamp for r in releases]
    if any(b <= a for a, b in zip(stamps, stamps[1:])):
        raise IngestionError("releases of a project must have strictly increasing timestamps")


# -- bug-fix detection -------------------------------------------------------

_ISSUE_REF = r"#[0-9]+"


@dataclass(frozen=True)
class KeywordMatcher:
    keywords: tuple[str, ...] = DEFAULT_KEYWORDS
    pattern: re.Pattern = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        words = sorted({k.lower() for k in self.keywords}, key=lambda w: (-len(w), w))
        alternation = "|".join(re.escape(w) for w in words)
        # boundary: any non-alphanumeric character (underscore included) or string edge
        body = rf"(?<![^\W_])(?:{alternation})(?![^\W_])|(?<![^\W_]){_ISSUE_REF}(?![^\W_])" if words \
            else rf"(?<![^\W_]){_ISSUE_REF}(?![^\W_])"
        object.__setattr__(self, "pattern", re.compile(body))

    def __call__(self, message: str) -> tuple[bool, list[str]]:
        matches = []
        for m in self.pattern.finditer((message or "").lower()):
            if m.group(0) not in matches:
                matches.append(m.group(0))
        return bool(matches), matches


_default_matcher = KeywordMatcher()


def is_bug_fixing(message: str, keywords: Sequence[str] | None = None) -> tuple[bool, list[str]]:
    """Keyword test on a commit message; returns the flag and the distinct matches in order."""
    matcher = _default_matcher if keywords is None else KeywordMatcher(tuple(keywords))
    return matcher(message)


def find_bug_fixes(graph: CommitGraph, keywords: Sequence[str] | None = None) -> list[tuple[Commit, list[str]]]:
    """Bug-fixing commits in topological order.  Merge commits never qualify."""
    matcher = _default_matcher if keywords is None else KeywordMatcher(tuple(keywords))
    fixes = []
    for cid in graph.order:
        c = graph[cid]
        if c.is_merge or not c.parent_ids:
            continue
        ok, matched = matcher(c.message)
        if ok:
            fixes.append((c, matched))
    return fixes


# -- release selection -------------------------------------------------------

def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def select_releases(releases: Sequence[Release], project_first_commit_ts: float,
                    project_last_commit_ts: float, now: float | None = None) -> list[Release]:
    """Drop releases inside the first/last three years, then keep at most three.

    ``now`` is accepted for interface stability; the window is anchored on the
    project's first and last commit, not on the wall clock.
    """
    window = EXCLUSION_YEARS * YEAR_SECONDS
    lo = project_first_commit_ts + window
    hi = project_last_commit_ts - window
    survivors = [r for r in releases if lo <= r.timestamp <= hi]
    n = len(survivors)
    if n <= MAX_RELEASES:
        return survivors
    picks = sorted({_round_half_up(k * (n - 1) / (MAX_RELEASES - 1)) for k in range(MAX_RELEASES)})
    return [survivors[i] for i in picks]


# -- snapshots ---------------------------------------------------------------

def snapshot_files(graph: CommitGraph, release: Release) -> list[tuple[str, str]]:
    """Source files (path, text) in the tree of the release commit, sorted by path."""
    if release.commit_id not in graph:
        raise SnapshotError(f"release {release.label} points at unknown commit {release.commit_id}")
    tree = graph.stored_snapshot(release.commit_id)
    if tree is None:
        from .history import replay_states
        state = replay_states(graph, [release.commit_id])[release.commit_id]
        broken = sorted(p for p, lines in state.items() if lines is None)
        if broken:
            raise SnapshotError(
                f"cannot rebuild the tree of {release.label} ({release.commit_id}): history of "
                f"{broken[0]} starts with a modification; supply snapshot data for this commit "
                "(\"snapshot\" field in the commit archive)")
        tree = {p: "".join(line.text + "\n" for line in lines) for p, lines in state.items()}
    files = [(p, tree[p]) for p in tree if has_source_extension(p, graph.extensions)]
    return sorted(files)
