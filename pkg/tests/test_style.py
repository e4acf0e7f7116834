import json
import math

import pytest
from hypothesis import given, settings, strategies as st

from style_oracle import annotation_path, corpus_files, golden_path, load_annotation
from styledefect.style.metrics import METRIC_IDS, FeatureVector, catalog, compute_metrics, is_camel, is_snake, \
    is_upper_snake
from styledefect.style.structure import scan_structure
from styledefect.style.tokenizer import (BLOCK_COMMENT, IDENTIFIER, KEYWORD, LINE_COMMENT, NUMBER, PREPROCESSOR,
                                         STRING, code_line_numbers, read_source, tokenize)

CORPUS = corpus_files()
GROUP = {d.id: d.group for d in catalog()}


def _ids(files):
    return [p.name for p in files]


# -- tokenizer ---------------------------------------------------------------------------------

SNIPPETS = ["int", " ", "\n", "\t", "x", "_y2", "0x1F", "1.5e-3f", "'a'", "'\\''", '"s"', '"a\\"b"', "//c\n",
            "/* b */", "/*", "*/", "#include <a.h>\n", "#define M(x) \\\n x\n", "R\"(raw)\"", "u8\"u\"", "<<=",
            "->*", "::", "...", "\\", "@", "é", "\r\n", "?", "{", "}", ";", "L'x'", "0b101", "1'000"]


@given(st.lists(st.sampled_from(SNIPPETS)).map("".join))
def test_tokenizer_round_trip_on_fragments(source):
    assert "".join(t.text for t in tokenize(source)) == source


@given(st.text(max_size=200))
def test_tokenizer_round_trip_on_any_text(source):
    assert "".join(t.text for t in tokenize(source)) == source


@pytest.mark.parametrize("src", CORPUS, ids=_ids(CORPUS))
def test_tokenizer_round_trip_on_corpus(src):
    text, _ = read_source(src)
    assert "".join(t.text for t in tokenize(text)) == text


def test_token_kinds():
    toks = [(t.kind, t.text) for t in tokenize('#include <x>\nint a = 0x10; // hi\nchar *s = "q";\n') if t.is_code
            or t.kind == LINE_COMMENT]
    assert toks[0] == (PREPROCESSOR, "#include <x>")
    assert (KEYWORD, "int") in toks and (IDENTIFIER, "a") in toks and (NUMBER, "0x10") in toks
    assert (LINE_COMMENT, "// hi") in toks and (STRING, '"q"') in toks


def test_token_positions_and_code_lines():
    src = "int a;\n/* one\n two */\n\nb++;\n"
    toks = tokenize(src)
    block = next(t for t in toks if t.kind == BLOCK_COMMENT)
    assert (block.line, block.column, block.end_line) == (2, 1, 3)
    assert code_line_numbers(src) == {1, 5}


def test_read_source_replaces_bad_bytes(tmp_path):
    p = tmp_path / "bad.c"
    p.write_bytes(b"int a; \xff\n")
    text, replaced = read_source(p)
    assert replaced and "�" in text


# -- structural facts against the hand annotation ---------------------------------------------

@pytest.mark.parametrize("src", CORPUS, ids=_ids(CORPUS))
def test_structure_matches_annotation(src):
    text, _ = read_source(src)
    ann = load_annotation(src)
    facts = scan_structure(tokenize(text))
    counts = facts.counts()
    for key, want in ann["facts"].items():
        assert counts[key] == want, key
    got_funcs = [[f.name, f.start_line, f.end_line, f.parameter_count, f.return_count, f.returns_void,
                  f.has_preceding_comment] for f in facts.functions]
    assert got_funcs == ann["functions"]
    assert [[d.name, d.star] for d in facts.declarators] == ann["declarators"]
    assert [[d.name, d.star] for d in facts.parameters] == ann["parameters"]
    multi = sum(1 for n in facts.statement_semicolons_per_line.values() if n >= 2)
    assert multi == ann["multi_statement_lines"]


# -- metrics ------------------------------------------------------------------------------------

def test_catalog_shape():
    assert len(catalog()) == 60 == len(METRIC_IDS) == len(set(METRIC_IDS))
    assert {d.group for d in catalog()} == {"layout", "comments", "naming", "statements", "expressions",
                                            "declarations"}


@pytest.mark.parametrize("src", CORPUS, ids=_ids(CORPUS))
def test_metrics_match_goldens(src):
    text, _ = read_source(src)
    want = json.loads(golden_path(src).read_text())
    got = compute_metrics(text).as_dict()
    assert list(want) == list(METRIC_IDS)
    for mid in METRIC_IDS:
        assert got[mid] == pytest.approx(want[mid], rel=1e-12, abs=1e-12), mid


def test_every_corpus_file_is_annotated():
    assert len(CORPUS) == 10
    assert all(annotation_path(p).exists() and golden_path(p).exists() for p in CORPUS)


@pytest.mark.parametrize("name,camel,snake,upper", [
    ("fooBar", True, False, False), ("FooBar", True, False, False), ("foo_bar", False, True, False),
    ("MAX_ITEMS", False, False, True), ("i", False, False, False), ("X", False, False, False),
    ("foo_", False, False, False), ("_foo_bar", False, True, False), ("a1_b2", False, True, False),
])
def test_naming_classes(name, camel, snake, upper):
    assert (is_camel(name), is_snake(name), is_upper_snake(name)) == (camel, snake, upper)


def test_empty_file_is_all_zero():
    assert compute_metrics("") == FeatureVector.zeros()


def test_small_file_by_hand():
    v = compute_metrics("int main() {\n\tint a, b;\n\tif (a == 1) return 0;\n\treturn(b);\n}\n")
    assert v["pct_indented_lines_using_tabs"] == 100.0
    assert v["avg_indent_width_spaces"] == 4.0
    assert v["pct_multi_declarator_statements"] == 100.0
    assert v["pct_parenthesized_return"] == 50.0
    assert v["pct_multi_return_functions"] == 100.0
    assert v["pct_braceless_control_bodies"] == 100.0
    assert v["functions_per_kloc"] == pytest.approx(1000 / 5)


CODE_PIECES = ["int x = 1;\n", "for (int i=0;i<n;i++) x+=i;\n", "while(x) { x--; }\n", "// note\n", "\n",
               "  if (a == b) y = c ? d : e; else z = 2;\n", "/* block\n comment */\n", "void f(int *p) {\n",
               "}\n", "\treturn (x);\n", "do { k++; } while (k < 3);\n", "#define LIMIT 10\n",
               "#include <stdio.h>\n", "switch (v) { case 1: break; default: goto out; }\n", "char c = '}';\n",
               "auto s = \"{\";\n", "const int *const q = NULL;   \n", "}}\n", "{\n", "a, b, c;\n"]


@settings(max_examples=150, deadline=None)
@given(st.lists(st.sampled_from(CODE_PIECES), max_size=25).map("".join))
def test_metrics_are_finite_and_bounded(source):
    v = compute_metrics(source)
    assert len(v) == 60
    for mid, x in zip(METRIC_IDS, v):
        assert math.isfinite(x), mid
        if mid.startswith("pct_"):
            assert 0.0 <= x <= 100.0, mid
    assert compute_metrics(source) == v


def _rename_identifiers(text: str) -> str:
    """Map every distinct identifier to a fresh name of the same length."""
    digits = "0123456789abcdefghijklmnopqrstuvwxyz"
    fresh: dict[str, str] = {}
    used: dict[int, int] = {}
    out = []
    for t in tokenize(text):
        if t.kind == IDENTIFIER:
            if t.text not in fresh:
                size = len(t.text)
                k = used.get(size, 0)
                used[size] = k + 1
                if size == 1:
                    name = "ABCDEFGHIJKLMNOPRSTUVWXYZ"[k]
                else:
                    body = ""
                    for _ in range(size - 1):
                        k, r = divmod(k, len(digits))
                        body = digits[r] + body
                    assert k == 0
                    name = "Q" + body
                fresh[t.text] = name
            out.append(fresh[t.text])
        else:
            out.append(t.text)
    return "".join(out)


def _reindent(text: str) -> str:
    """Prepend one space to every non-blank line that does not start inside a block comment."""
    out = []
    in_block = False
    for line in text.split("\n"):
        starts_inside = in_block
        i = 0
        in_str = None
        while i < len(line):
            two = line[i:i + 2]
            if in_block:
                if two == "*/":
                    in_block = False
                    i += 1
            elif in_str:
                if line[i] == "\\":
                    i += 1
                elif line[i] == in_str:
                    in_str = None
            elif two == "//":
                break
            elif two == "/*":
                in_block = True
                i += 1
            elif line[i] in "\"'":
                in_str = line[i]
            i += 1
        out.append(line if starts_inside or not line.strip() else " " + line)
    return "\n".join(out)


def _changed(a: FeatureVector, b: FeatureVector) -> set[str]:
    return {mid for mid, x, y in zip(METRIC_IDS, a, b) if x != pytest.approx(y, rel=1e-12, abs=1e-12)}


@pytest.mark.parametrize("src", CORPUS, ids=_ids(CORPUS))
def test_renaming_identifiers_keeps_layout_and_statements(src):
    text, _ = read_source(src)
    renamed = _rename_identifiers(text)
    assert renamed != text and len(renamed) == len(text)
    changed = _changed(compute_metrics(text), compute_metrics(renamed))
    assert not {m for m in changed if GROUP[m] in ("layout", "statements")}


@pytest.mark.parametrize("src", CORPUS, ids=_ids(CORPUS))
def test_reindent_changes_only_layout(src):
    text, _ = read_source(src)
    changed = _changed(compute_metrics(text), compute_metrics(_reindent(text)))
    assert changed
    assert {GROUP[m] for m in changed} == {"layout"}


def test_trailing_comment_counts_as_preceding_comment():
    v = compute_metrics("int a; // set up\nint f() {\n    return a;\n}\n")
    assert v["pct_functions_with_preceding_comment"] == 100.0
