"""Brute-force line blame and release labels over full file trees.

Works only from an ArchiveBuilder's complete trees: every file of every commit
is blamed by diffing whole contents against the parents' contents, file
identity across renames is tracked as a lineage id, and fixes are found with a
plain word split.  None of the package's history, SZZ or archive code is used.
"""

from __future__ import annotations

import difflib
import re

from archive_builder import ArchiveBuilder, split_lines

SOURCE_SUFFIXES = (".c", ".cc", ".cpp", ".cxx", ".c++", ".h", ".hh", ".hpp", ".hxx", ".h++", ".inl", ".ipp", ".tpp")
FIX_WORDS = {"fix", "fixed", "fixes", "bug", "bugs", "bugfix", "patch", "defect", "fault", "error"}


def is_source(path: str) -> bool:
    return path.lower().endswith(SOURCE_SUFFIXES)


def is_fix(message: str, parents: list[str]) -> bool:
    if len(parents) > 1:
        return False
    words = set(re.split(r"[^a-z0-9]+", message.lower()))
    return bool(words & FIX_WORDS) or re.search(r"#\d+", message) is not None


def meaningful(lines: list[str]) -> list[bool]:
    """Per line: does anything other than comments and whitespace remain?"""
    out = []
    in_block = False
    for ln in lines:
        rest = []
        i = 0
        while i < len(ln):
            if in_block:
                end = ln.find("*/", i)
                if end < 0:
                    i = len(ln)
                else:
                    in_block = False
                    i = end + 2
            elif ln.startswith("//", i):
                break
            elif ln.startswith("/*", i):
                in_block = True
                i += 2
            else:
                rest.append(ln[i])
                i += 1
        out.append("".join(rest).strip() != "")
    return out


class Blame:
    def __init__(self, builder: ArchiveBuilder):
        self.b = builder
        self.memo: dict[str, dict[str, list[str]]] = {}
        self.lineage_memo: dict[str, dict[str, int]] = {}
        self.next_lineage = 0

    def ancestors(self, cid: str) -> set[str]:
        seen, todo = set(), [cid]
        while todo:
            c = todo.pop()
            if c not in seen:
                seen.add(c)
                todo.extend(self.b.by_id[c].parents)
        return seen

    def _previous_name(self, cid: str, path: str) -> str:
        return self.b.by_id[cid].renames.get(path, path)

    def origins(self, cid: str) -> dict[str, list[str]]:
        """path -> origin commit per line, for every file of ``cid``'s tree."""
        if cid in self.memo:
            return self.memo[cid]
        c = self.b.by_id[cid]
        result = {}
        for path, text in c.tree.items():
            lines = split_lines(text)
            origin: list[str | None] = [None] * len(lines)
            for k, parent in enumerate(c.parents):
                name = self._previous_name(cid, path) if k == 0 else path
                ptree = self.b.by_id[parent].tree
                if name not in ptree:
                    continue
                plines = split_lines(ptree[name])
                porig = self.origins(parent)[name]
                sm = difflib.SequenceMatcher(None, plines, lines, autojunk=False)
                for a, b2, size in sm.get_matching_blocks():
                    for j in range(size):
                        if origin[b2 + j] is None:
                            origin[b2 + j] = porig[a + j]
            result[path] = [o if o is not None else cid for o in origin]
        self.memo[cid] = result
        return result

    def lineages(self, cid: str) -> dict[str, int]:
        if cid in self.lineage_memo:
            return self.lineage_memo[cid]
        c = self.b.by_id[cid]
        parent = self.lineages(c.parents[0]) if c.parents else {}
        side = [self.lineages(p) for p in c.parents[1:]]
        out = {}
        for path in c.tree:
            prev = self._previous_name(cid, path)
            donor = next((s[path] for s in side if path in s), None)
            if prev in parent:
                out[path] = parent[prev]
            elif donor is not None:
                out[path] = donor
            else:
                out[path] = self.next_lineage
                self.next_lineage += 1
        self.lineage_memo[cid] = out
        return out


def brute_force_spans(builder: ArchiveBuilder, blame: Blame | None = None) -> set[tuple[str, str, str, int]]:
    """(introducer, fix, path at fix, lineage) for every blamed removed source line."""
    blame = blame or Blame(builder)
    spans = set()
    for c in builder.commits:
        if not c.parents or not is_fix(c.message, c.parents):
            continue
        parent = builder.by_id[c.parents[0]]
        porig = blame.origins(parent.id)
        plin = blame.lineages(parent.id)
        for path, text in c.tree.items():
            if not is_source(path):
                continue
            prev = c.renames.get(path, path)
            if prev not in parent.tree:
                continue
            old = split_lines(parent.tree[prev])
            keep = meaningful(old)
            sm = difflib.SequenceMatcher(None, old, split_lines(text), autojunk=False)
            for tag, i1, i2, _, _ in sm.get_opcodes():
                if tag in ("replace", "delete"):
                    for i in range(i1, i2):
                        if keep[i]:
                            spans.add((porig[prev][i], c.id, path, plin[prev]))
        # deleted files count as removing every line
        for prev in parent.tree:
            if is_source(prev) and prev not in c.tree and prev not in c.renames.values():
                keep = meaningful(split_lines(parent.tree[prev]))
                for i, ok in enumerate(keep):
                    if ok:
                        spans.add((porig[prev][i], c.id, prev, plin[prev]))
    return spans


def brute_force_labels(builder: ArchiveBuilder, release_commit: str) -> dict[str, str]:
    """path -> buggy/clean for the source files of one release commit."""
    blame = Blame(builder)
    spans = brute_force_spans(builder, blame)
    here = blame.ancestors(release_commit)
    lin = blame.lineages(release_commit)
    tree = builder.by_id[release_commit].tree
    out = {}
    for path in sorted(p for p in tree if is_source(p)):
        buggy = any(intro in here and fix not in here and lineage == lin[path]
                    for intro, fix, _, lineage in spans)
        out[path] = "buggy" if buggy else "clean"
    return out
