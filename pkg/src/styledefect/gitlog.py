"""Read a live git repository into a :class:`CommitGraph` by shelling out to git."""

from __future__ import annotations

import re
import subprocess
from pathlib import Path
from typing import Sequence

from .errors import IngestionError
from .repo import SOURCE_EXTENSIONS, Commit, CommitGraph, FileDelta, has_source_extension

RECORD = "\x1e"
FIELD = "\x1f"
END_HEADER = "\x1d"

_HUNK = re.compile(r"^@@ -(\d+)(?:,(\d+))? \+(\d+)(?:,(\d+))? @@")


def _git(repo: Path, *args: str, input: bytes | None = None) -> bytes:
    cmd = ["git", "-C", str(repo), "-c", "core.quotepath=off", *args]
    try:
        proc = subprocess.run(cmd, input=input, capture_output=True, check=False)
    except FileNotFoundError:
        raise IngestionError("git executable not found on PATH") from None
    if proc.returncode != 0:
        msg = proc.stderr.decode("utf-8", "replace").strip().splitlines()
        raise IngestionError(f"git {args[0]} failed in {repo}: {msg[-1] if msg else proc.returncode}")
    return proc.stdout


def resolve_branch(repo: Path, branch: str) -> str:
    """Configured branch if present, otherwise the repository's default branch head."""
    for ref in (f"refs/heads/{branch}", f"refs/remotes/origin/{branch}"):
        proc = subprocess.run(["git", "-C", str(repo), "rev-parse", "--verify", "--quiet", ref],
                              capture_output=True)
        if proc.returncode == 0:
            return ref
    proc = subprocess.run(["git", "-C", str(repo), "symbolic-ref", "--quiet", "refs/remotes/origin/HEAD"],
                          capture_output=True)
    if proc.returncode == 0 and proc.stdout.strip():
        return proc.stdout.decode().strip()
    return "HEAD"


def _unquote(path: str) -> str:
    if len(path) >= 2 and path[0] == '"' and path[-1] == '"':
        raw = path[1:-1].encode("latin-1", "backslashreplace").decode("unicode_escape")
        return raw.encode("latin-1", "replace").decode("utf-8", "replace")
    return path


def _strip_prefix(path: str) -> str:
    path = _unquote(path.strip())
    if path.startswith(("a/", "b/")):
        return path[2:]
    return path


class _DeltaBuilder:
    def __init__(self, header: str):
        m = re.match(r"diff --git (\"?a/.*?\"?) (\"?b/.*\"?)$", header)
        self.old = _strip_prefix(m.group(1)) if m else None
        self.new = _strip_prefix(m.group(2)) if m else None
        self.kind = "modified"
        self.removed: list[tuple[int, str]] = []
        self.added: list[tuple[int, str]] = []
        self.binary = False
        self.old_line = self.new_line = 0

    def header_line(self, line: str):
        if line.startswith("new file mode"):
            self.kind = "added"
        elif line.startswith("deleted file mode"):
            self.kind = "deleted"
        elif line.startswith("rename from "):
            self.kind = "renamed"
            self.old = _unquote(line[len("rename from "):])
        elif line.startswith("rename to "):
            self.kind = "renamed"
            self.new = _unquote(line[len("rename to "):])
        elif line.startswith("--- ") and not line.startswith("--- /dev/null"):
            self.old = _strip_prefix(line[4:])
        elif line.startswith("+++ ") and not line.startswith("+++ /dev/null"):
            self.new = _strip_prefix(line[4:])
        elif line.startswith("Binary files"):
            self.binary = True

    def build(self) -> FileDelta | None:
        if self.binary:
            return None
        if self.kind == "added":
            return FileDelta(self.new, "added", (), tuple(self.added))
        if self.kind == "deleted":
            return FileDelta(self.old, "deleted", tuple(self.removed), ())
        if self.kind == "renamed":
            return FileDelta(self.new, "renamed", tuple(self.removed), tuple(self.added), old_path=self.old)
        if not self.removed and not self.added:
            return None
        return FileDelta(self.new, "modified", tuple(self.removed), tuple(self.added))


def parse_patch(text: str) -> list[FileDelta]:
    """Parse ``git log -p --unified=0`` output for one commit."""
    deltas = []
    current: _DeltaBuilder | None = None
    in_hunk = False
    for line in text.split("\n"):
        if line.startswith("diff --git "):
            if current is not None:
                d = current.build()
                if d is not None:
                    deltas.append(d)
            current = _DeltaBuilder(line)
            in_hunk = False
            continue
        if current is None:
            continue
        m = _HUNK.match(line)
        if m:
            in_hunk = True
            current.old_line = int(m.group(1))
            current.new_line = int(m.group(3))
            continue
        if not in_hunk:
            current.header_line(line)
            continue
        if line.startswith("-"):
            current.removed.append((current.old_line, line[1:]))
            current.old_line += 1
        elif line.startswith("+"):
            current.added.append((current.new_line, line[1:]))
            current.new_line += 1
    if current is not None:
        d = current.build()
        if d is not None:
            deltas.append(d)
    return deltas


def parse_log(raw: str, extensions: Sequence[str] = SOURCE_EXTENSIONS) -> list[Commit]:
    commits = []
    for record in raw.split(RECORD):
        if not record.strip():
            continue
        header, _, patch = record.partition(END_HEADER)
        sha, parents, stamp, message = header.split(FIELD, 3)
        deltas = [d for d in parse_patch(patch)
                  if has_source_extension(d.path, extensions)
                  or (d.kind == "renamed" and has_source_extension(d.old_path, extensions))]
        commits.append(Commit(sha, tuple(parents.split()), int(stamp), message.strip("\n"), tuple(deltas)))
    return commits


def read_git_repository(repo: str | Path, branch: str = "master",
                        extensions: Sequence[str] = SOURCE_EXTENSIONS) -> CommitGraph:
    repo = Path(repo)
    if not (repo / ".git").exists():
        proc = subprocess.run(["git", "-C", str(repo), "rev-parse", "--git-dir"], capture_output=True)
        if proc.returncode != 0:
            raise IngestionError(f"{repo} is neither a git repository nor a commit archive")
    ref = resolve_branch(repo, branch)
    fmt = f"{RECORD}%H{FIELD}%P{FIELD}%at{FIELD}%B{END_HEADER}"
    out = _git(repo, "log", "--topo-order", "--reverse", "--no-color", "--no-ext-diff", "-M",
               "--diff-merges=first-parent", "-p", "--unified=0", f"--format={fmt}", ref, "--")
    commits = parse_log(out.decode("utf-8", "replace"), extensions)

    def load_snapshot(commit_id: str) -> dict[str, str]:
        listing = _git(repo, "ls-tree", "-r", "-z", "--name-only", commit_id).decode("utf-8", "replace")
        paths = [p for p in listing.split("\0") if p and has_source_extension(p, extensions)]
        return _cat_files(repo, commit_id, paths)

    graph = CommitGraph(commits, snapshot_loader=load_snapshot, extensions=extensions)
    graph.resolve_ref = lambda ref_name: _git(
        repo, "rev-parse", "--verify", f"{ref_name}^{{commit}}").decode().strip()
    return graph


def _cat_files(repo: Path, commit_id: str, paths: list[str]) -> dict[str, str]:
    if not paths:
        return {}
    request = "".join(f"{commit_id}:{p}\n" for p in paths).encode("utf-8")
    out = _git(repo, "cat-file", "--batch", input=request)
    files = {}
    pos = 0
    for path in paths:
        nl = out.index(b"\n", pos)
        header = out[pos:nl].decode("utf-8", "replace").split()
        pos = nl + 1
        if len(header) < 3 or header[1] != "blob":
            continue
        size = int(header[2])
        files[path] = out[pos:pos + size].decode("utf-8", "replace")
        pos += size + 1
    return files
