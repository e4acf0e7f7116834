import json

import pytest
from hypothesis import given, strategies as st

from archive_builder import ArchiveBuilder
from conftest import FIXTURES
from styledefect.errors import ArchiveValidationError, IngestionError, SnapshotError
from styledefect.repo import (YEAR_SECONDS, FileDelta, Release, check_releases, find_bug_fixes,
                              has_source_extension, is_bug_fixing, load_releases, open_repository,
                              read_archive, select_releases, snapshot_files, write_archive)


def _rel(t, label="r", cid="x"):
    return Release(t, "p", label, cid)


@pytest.mark.parametrize("path,ok", [
    ("a.cpp", True), ("dir/b.CC", True), ("c.c", True), ("k.cu", True), ("x.cxx", True),
    ("h.h", False), ("h.hpp", False), ("README", False), ("dir.cpp/file", False), ("a.cpp.orig", False),
])
def test_source_extensions(path, ok):
    assert has_source_extension(path) is ok


@pytest.mark.parametrize("message,hit,matches", [
    ("Fix crash on startup", True, ["fix"]),
    ("prefix the name", False, []),
    ("bugfix: null deref", True, ["bugfix"]),
    ("fixed_bug in parser", True, ["fixed", "bug"]),
    ("Resolve issue #42", True, ["#42"]),
    ("version 1#2", False, []),
    ("Debugging output", False, []),
    ("PATCH release notes", True, ["patch"]),
    ("", False, []),
])
def test_keyword_matching(message, hit, matches):
    assert is_bug_fixing(message) == (hit, matches)


def test_custom_keywords():
    assert is_bug_fixing("repair the widget", ["repair"]) == (True, ["repair"])
    assert is_bug_fixing("fix the widget", ["repair"])[0] is False


def test_merges_are_never_fixes(tmp_path):
    g = read_archive(FIXTURES / "minirepo.jsonl")
    assert [c.id for c, _ in find_bug_fixes(g)] == ["E"]
    b = ArchiveBuilder()
    b.commit("a", [], 0, "start", {"x.c": "int a;\n"})
    b.commit("b", ["a"], 1, "side", {"x.c": "int b;\n"})
    b.commit("m", ["a", "b"], 2, "Merge fix branch", {"x.c": "int b;\n"})
    b.write(tmp_path / "m.jsonl")
    assert find_bug_fixes(read_archive(tmp_path / "m.jsonl")) == []


def test_archive_graph_shape():
    g = read_archive(FIXTURES / "minirepo.jsonl")
    assert len(g) == 5
    assert g.roots == ("A",)
    assert g["D"].is_merge
    assert g.order.index("B") < g.order.index("D") and g.order.index("C") < g.order.index("D")
    assert g.is_ancestor("C", "E") and not g.is_ancestor("B", "C")
    assert g.ancestors("D") == {"A", "B", "C", "D"}
    assert set(g.children("A")) == {"B", "C"}
    # README is dropped because it is not a source file
    assert all(d.path.endswith(".cpp") for c in g.commits.values() for d in c.deltas)


def test_archive_round_trip(tmp_path):
    g = read_archive(FIXTURES / "szz_history.jsonl")
    out = tmp_path / "copy.jsonl"
    write_archive(g, out)
    assert read_archive(out) == g


def test_archive_rejects_unknown_parent(tmp_path):
    p = tmp_path / "bad.jsonl"
    p.write_text(json.dumps({"id": "a", "parents": ["zz"], "timestamp": 0, "message": "m", "deltas": []}) + "\n")
    with pytest.raises(ArchiveValidationError):
        read_archive(p)


def test_archive_rejects_duplicate_ids(tmp_path):
    rec = json.dumps({"id": "a", "parents": [], "timestamp": 0, "message": "m", "deltas": []})
    p = tmp_path / "dup.jsonl"
    p.write_text(rec + "\n" + rec + "\n")
    with pytest.raises(ArchiveValidationError):
        read_archive(p)


def test_file_delta_validation():
    with pytest.raises(ValueError):
        FileDelta("a.c", "deleted", added=((1, "x"),))
    with pytest.raises(ValueError):
        FileDelta("a.c", "renamed")
    with pytest.raises(ValueError):
        FileDelta("a.c", "copied")
    assert FileDelta("b.c", "renamed", old_path="a.c").source_path == "a.c"


def test_open_repository_missing(tmp_path):
    with pytest.raises(IngestionError):
        open_repository(tmp_path / "nowhere")


def test_load_releases_sorted_and_validated(tmp_path):
    p = tmp_path / "r.json"
    p.write_text(json.dumps([{"project": "p", "label": "b", "commit_id": "2", "timestamp": 20},
                             {"project": "p", "label": "a", "commit_id": "1", "timestamp": 10}]))
    assert [r.label for r in load_releases(p)] == ["a", "b"]
    p.write_text(json.dumps([{"project": "p"}]))
    with pytest.raises(IngestionError):
        load_releases(p)
    with pytest.raises(IngestionError, match="releases file not found"):
        load_releases(tmp_path / "missing.json")


def test_check_releases():
    g = read_archive(FIXTURES / "minirepo.jsonl")
    check_releases(g, [_rel(1, cid="A"), _rel(2, cid="D")])
    with pytest.raises(IngestionError):
        check_releases(g, [_rel(1, cid="nope")])
    with pytest.raises(IngestionError):
        check_releases(g, [_rel(2, cid="A"), _rel(2, cid="D")])


def test_release_window_bounds():
    y = YEAR_SECONDS
    rels = [_rel(t * y, str(t)) for t in (2.9, 3.0, 5.0, 7.0, 7.1)]
    got = select_releases(rels, 0, 10 * y)
    assert [r.label for r in got] == ["3.0", "5.0", "7.0"]


def test_release_spread_picks_ends_and_middle():
    y = YEAR_SECONDS
    rels = [_rel((3 + k * 0.5) * y, str(k)) for k in range(6)]
    got = select_releases(rels, 0, 100 * y)
    # indices round(0), round(2.5) -> 3, round(5)
    assert [r.label for r in got] == ["0", "3", "5"]


@given(st.lists(st.floats(0, 30), min_size=0, max_size=15, unique=True))
def test_release_selection_properties(years):
    y = YEAR_SECONDS
    rels = sorted(_rel(t * y, f"{t}") for t in years)
    got = select_releases(rels, 0, 30 * y)
    survivors = [r for r in rels if 3 * y <= r.timestamp <= 27 * y]
    assert len(got) == min(3, len(survivors))
    assert got == sorted(got)
    assert all(r in survivors for r in got)
    if survivors:
        assert got[0] == survivors[0] and got[-1] == survivors[-1]


def test_snapshot_by_replay_matches_tree():
    g = read_archive(FIXTURES / "minirepo.jsonl")
    files = snapshot_files(g, _rel(0, cid="D"))
    assert [p for p, _ in files] == ["f.cpp", "g.cpp"]
    assert "x * 3" in files[0][1] and "a + 2" in files[1][1]


def test_snapshot_unknown_commit():
    g = read_archive(FIXTURES / "minirepo.jsonl")
    with pytest.raises(SnapshotError):
        snapshot_files(g, _rel(0, cid="nope"))


def test_snapshot_needs_full_history(tmp_path):
    p = tmp_path / "cut.jsonl"
    p.write_text(json.dumps({"id": "a", "parents": [], "timestamp": 0, "message": "m",
                             "deltas": [{"path": "x.c", "kind": "modified", "removed": [[1, "a"]],
                                         "added": [[1, "b"]]}]}) + "\n")
    g = read_archive(p)
    with pytest.raises(SnapshotError, match="snapshot"):
        snapshot_files(g, _rel(0, cid="a"))


@given(st.text(max_size=60))
def test_fix_detection_ignores_case(message):
    assert is_bug_fixing(message)[0] == is_bug_fixing(message.lower())[0]


def test_snapshot_paths_sorted_unique_and_sources(tmp_path):
    b = ArchiveBuilder()
    b.commit("a", [], 0, "start", {"z.cc": "int z;\n", "a.c": "int a;\n", "h.h": "int h;\n", "doc.txt": "x\n",
                                   "k/b.cu": "int b;\n"}, snapshot=True)
    b.write(tmp_path / "s.jsonl")
    g = read_archive(tmp_path / "s.jsonl")
    paths = [p for p, _ in snapshot_files(g, _rel(0, cid="a"))]
    assert paths == sorted(set(paths)) == ["a.c", "k/b.cu", "z.cc"]


def test_ingestion_is_deterministic():
    a = open_repository(FIXTURES / "szz_history.jsonl")
    b = open_repository(FIXTURES / "szz_history.jsonl")
    assert a == b and a.order == b.order
