"""The 60 stylistic metrics (``catalog_v1``) and their evaluation.

Every metric is a ratio over counts taken from the token stream, the
structural scan or the physical lines.  A zero denominator yields 0.
Percentages are in [0, 100]; ``*_per_kloc`` metrics divide by thousands of
code lines (lines touched by a non-comment token).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from statistics import fmean, pstdev
from typing import Callable, NamedTuple

from .structure import StructuralFacts, scan_structure
from .tokenizer import (BLOCK_COMMENT, COMMENT_KINDS, IDENTIFIER, KEYWORD, LINE_COMMENT, NUMBER,
                        PREPROCESSOR, STRING, Token, lex)

CATALOG_VERSION = "catalog_v1"
GROUPS = ("layout", "comments", "naming", "statements", "expressions", "declarations")
TAB_WIDTH = 4
LONG_LINE = 80


class MetricDescriptor(NamedTuple):
    id: str
    group: str
    definition: str
    zero_denominator_value: float = 0.0


@dataclass
class SourceCounts:
    """Everything the metric formulas read, gathered once per file."""
    lines: list[str]
    code_lines: int
    blank_lines: int
    comment_lines: int
    tokens: list[Token]
    facts: StructuralFacts


def _ratio(num: float, den: float, scale: float = 1.0) -> float:
    return scale * num / den if den else 0.0


def _pct(num: float, den: float) -> float:
    return _ratio(num, den, 100.0)


def physical_lines(source: str) -> list[str]:
    if not source:
        return []
    lines = source.split("\n")
    if source.endswith("\n"):
        lines.pop()
    return [ln[:-1] if ln.endswith("\r") else ln for ln in lines]


def _indent(line: str) -> str:
    return line[:len(line) - len(line.lstrip(" \t"))]


def _blank_runs(lines: list[str]) -> list[int]:
    runs, cur = [], 0
    for ln in lines:
        if ln.strip():
            if cur:
                runs.append(cur)
            cur = 0
        else:
            cur += 1
    if cur:
        runs.append(cur)
    return runs


_CAMEL = re.compile(r"^(?=.*[a-z])(?=.*[A-Z])[A-Za-z0-9]+$")
_SNAKE = re.compile(r"^[a-z0-9]*[a-z][a-z0-9]*(?:_[a-z0-9]+)+$")


def is_camel(name: str) -> bool:
    return bool(_CAMEL.match(name.lstrip("_")))


def is_snake(name: str) -> bool:
    return bool(_SNAKE.match(name.strip("_")))


def is_upper_snake(name: str) -> bool:
    return len(name) >= 2 and not any(c.islower() for c in name) and any(c.isupper() for c in name)


def is_magic_number(text: str) -> bool:
    t = text.lower().replace("'", "")
    try:
        if t.startswith(("0x", "0b")) and "." not in t and "p" not in t:
            value = int(t.rstrip("ul"), 16 if t.startswith("0x") else 2)
        elif re.fullmatch(r"[0-9]+[ul]*", t):
            value = int(t.rstrip("ul"), 8 if len(t.rstrip("ul")) > 1 and t.startswith("0") else 10)
        else:
            value = float(t.rstrip("fl"))
    except ValueError:
        return True
    return value not in (0, 1)


def gather(source: str) -> SourceCounts:
    res = lex(source)
    tokens = res.tokens
    facts = scan_structure(tokens)
    facts.flags |= res.flags
    lines = physical_lines(source)
    code, comment = set(), set()
    for t in tokens:
        span = range(t.line, t.end_line + 1)
        if t.kind in COMMENT_KINDS:
            comment.update(span)
        elif t.is_code:
            code.update(span)
    n = len(lines)
    code &= set(range(1, n + 1))
    comment &= set(range(1, n + 1))
    blank = sum(1 for ln in lines if not ln.strip())
    return SourceCounts(lines, len(code), blank, len(comment), tokens, facts)


# -- metric formulas -------------------------------------------------------------

def _kloc(c: SourceCounts, count: float) -> float:
    return _ratio(count, c.code_lines, 1000.0)


def _code_tokens(c: SourceCounts, kind: str | None = None, text: str | None = None):
    for t in c.tokens:
        if not t.is_code or t.kind == PREPROCESSOR:
            continue
        if kind is not None and t.kind != kind:
            continue
        if text is not None and t.text != text:
            continue
        yield t


def _comments(c: SourceCounts) -> list[Token]:
    return [t for t in c.tokens if t.kind in COMMENT_KINDS]


def _trailing_comments(c: SourceCounts) -> int:
    count = 0
    last_code_end = 0
    for t in c.tokens:
        if t.kind in COMMENT_KINDS:
            if last_code_end == t.line:
                count += 1
        elif t.is_code:
            last_code_end = t.end_line
    return count


def _identifiers(c: SourceCounts) -> list[str]:
    return [t.text for t in _code_tokens(c, IDENTIFIER)]


def _distinct_identifiers(c: SourceCounts) -> list[str]:
    return sorted(set(_identifiers(c)))


def _variable_names(c: SourceCounts) -> list[str]:
    names = {d.name for d in c.facts.declarators + c.facts.parameters if d.name}
    return sorted(names)


def _function_names(c: SourceCounts) -> list[str]:
    return sorted({f.name for f in c.facts.functions})


def _indented(c: SourceCounts) -> list[str]:
    return [_indent(ln) for ln in c.lines if ln.strip() and ln[:1] in (" ", "\t")]


def _directives(c: SourceCounts, name: str) -> list[str]:
    pat = re.compile(r"#\s*" + name + r"\b(.*)", re.S)
    out = []
    for t in c.tokens:
        if t.kind == PREPROCESSOR:
            m = pat.match(t.text)
            if m:
                out.append(m.group(1).strip())
    return out


def _stars(c: SourceCounts, which: str) -> int:
    ds = [d for d in c.facts.declarators + c.facts.parameters if d.star is not None]
    return sum(1 for d in ds if d.star == which)


def _star_ratio(c: SourceCounts) -> float:
    t, n = _stars(c, "type"), _stars(c, "name")
    return _pct(t, t + n)


def _multi_statement_lines(c: SourceCounts) -> int:
    return sum(1 for count in c.facts.statement_semicolons_per_line.values() if count >= 2)


def _mean(xs) -> float:
    xs = list(xs)
    return fmean(xs) if xs else 0.0


_F = Callable[[SourceCounts], float]

_CATALOG: list[tuple[str, str, str, _F]] = [
    # layout
    ("avg_line_length", "layout", "mean characters per physical line",
     lambda c: _mean(len(ln) for ln in c.lines)),
    ("stddev_line_length", "layout", "population standard deviation of line lengths",
     lambda c: pstdev([len(ln) for ln in c.lines]) if c.lines else 0.0),
    ("pct_lines_over_80_chars", "layout", "100 * lines longer than 80 chars / lines",
     lambda c: _pct(sum(len(ln) > LONG_LINE for ln in c.lines), len(c.lines))),
    ("pct_blank_lines", "layout", "100 * blank lines / lines",
     lambda c: _pct(c.blank_lines, len(c.lines))),
    ("pct_indented_lines_using_tabs", "layout", "100 * indented lines starting with a tab / indented lines",
     lambda c: _pct(sum(i[0] == "\t" for i in _indented(c)), len(_indented(c)))),
    ("pct_indented_lines_using_spaces", "layout", "100 * indented lines starting with a space / indented lines",
     lambda c: _pct(sum(i[0] == " " for i in _indented(c)), len(_indented(c)))),
    ("avg_indent_width_spaces", "layout", "mean indent width of indented lines (tab = 4)",
     lambda c: _mean(i.count(" ") + TAB_WIDTH * i.count("\t") for i in _indented(c))),
    ("pct_open_brace_same_line", "layout", "100 * '{' preceded by code on its line / '{'",
     lambda c: _pct(c.facts.open_brace_same_line, c.facts.open_brace_same_line + c.facts.open_brace_own_line)),
    ("pct_close_brace_own_line", "layout", "100 * '}' first on its line / '}'",
     lambda c: _pct(c.facts.close_brace_own_line, c.facts.close_braces)),
    ("pct_lines_trailing_whitespace", "layout", "100 * lines ending in space or tab / lines",
     lambda c: _pct(sum(ln[-1:] in (" ", "\t") for ln in c.lines), len(c.lines))),
    ("avg_consecutive_blank_run", "layout", "mean length of maximal runs of blank lines",
     lambda c: _mean(_blank_runs(c.lines))),
    ("pct_lines_with_multiple_statements", "layout", "100 * lines with >= 2 top-level ';' / code lines",
     lambda c: _pct(_multi_statement_lines(c), c.code_lines)),
    # comments
    ("comment_line_density", "comments", "100 * lines touched by a comment / lines",
     lambda c: _pct(c.comment_lines, len(c.lines))),
    ("pct_line_comments", "comments", "100 * '//' comments / comments",
     lambda c: _pct(sum(t.kind == LINE_COMMENT for t in _comments(c)), len(_comments(c)))),
    ("pct_block_comments", "comments", "100 * '/* */' comments / comments",
     lambda c: _pct(sum(t.kind == BLOCK_COMMENT for t in _comments(c)), len(_comments(c)))),
    ("avg_comment_length_chars", "comments", "mean comment token length including delimiters",
     lambda c: _mean(len(t.text) for t in _comments(c))),
    ("pct_trailing_inline_comments", "comments", "100 * comments after code on the same line / comments",
     lambda c: _pct(_trailing_comments(c), len(_comments(c)))),
    ("pct_functions_with_preceding_comment", "comments",
     "100 * functions whose declaration directly follows a comment / functions",
     lambda c: _pct(sum(f.has_preceding_comment for f in c.facts.functions), len(c.facts.functions))),
    # naming (over distinct names)
    ("avg_variable_name_length", "naming", "mean length of distinct declared variable/parameter names",
     lambda c: _mean(len(n) for n in _variable_names(c))),
    ("avg_function_name_length", "naming", "mean length of distinct defined function names",
     lambda c: _mean(len(n) for n in _function_names(c))),
    ("pct_camel_case_identifiers", "naming", "100 * camelCase/PascalCase distinct identifiers / distinct identifiers",
     lambda c: _pct(sum(map(is_camel, _distinct_identifiers(c))), len(_distinct_identifiers(c)))),
    ("pct_snake_case_identifiers", "naming", "100 * lower_snake distinct identifiers / distinct identifiers",
     lambda c: _pct(sum(map(is_snake, _distinct_identifiers(c))), len(_distinct_identifiers(c)))),
    ("pct_upper_snake_identifiers", "naming", "100 * ALL_CAPS (len >= 2) distinct identifiers / distinct identifiers",
     lambda c: _pct(sum(map(is_upper_snake, _distinct_identifiers(c))), len(_distinct_identifiers(c)))),
    ("pct_single_char_identifiers", "naming", "100 * one-character distinct identifiers / distinct identifiers",
     lambda c: _pct(sum(len(n) == 1 for n in _distinct_identifiers(c)), len(_distinct_identifiers(c)))),
    ("pct_identifiers_containing_digits", "naming", "100 * distinct identifiers with a digit / distinct identifiers",
     lambda c: _pct(sum(any(ch.isdigit() for ch in n) for n in _distinct_identifiers(c)),
                    len(_distinct_identifiers(c)))),
    ("pct_underscore_prefixed_identifiers", "naming", "100 * distinct identifiers starting with '_' / distinct",
     lambda c: _pct(sum(n.startswith("_") for n in _distinct_identifiers(c)), len(_distinct_identifiers(c)))),
    ("avg_identifier_length", "naming", "mean length of distinct identifiers",
     lambda c: _mean(len(n) for n in _distinct_identifiers(c))),
    ("identifier_vocabulary_ratio", "naming", "distinct identifiers / identifier occurrences",
     lambda c: _ratio(len(_distinct_identifiers(c)), len(_identifiers(c)))),
    # statements
    ("pct_for_loops", "statements", "100 * classic for loops / loops",
     lambda c: _pct(c.facts.for_loops, c.facts.total_loops)),
    ("pct_while_loops", "statements", "100 * while loops / loops",
     lambda c: _pct(c.facts.while_loops, c.facts.total_loops)),
    ("pct_do_while_loops", "statements", "100 * do-while loops / loops",
     lambda c: _pct(c.facts.do_while_loops, c.facts.total_loops)),
    ("pct_range_for_loops", "statements", "100 * range-based for loops / loops",
     lambda c: _pct(c.facts.range_for_loops, c.facts.total_loops)),
    ("pct_if_with_else", "statements", "100 * if statements with an else branch / ifs",
     lambda c: _pct(c.facts.ifs_with_else, c.facts.ifs)),
    ("pct_else_if_chains", "statements", "100 * 'else if' / ifs",
     lambda c: _pct(c.facts.else_ifs, c.facts.ifs)),
    ("pct_switch_over_branching", "statements", "100 * switch / (switch + if)",
     lambda c: _pct(c.facts.switches, c.facts.switches + c.facts.ifs)),
    ("pct_ternary_over_branching", "statements", "100 * '?:' / ('?:' + if)",
     lambda c: _pct(c.facts.ternaries, c.facts.ternaries + c.facts.ifs)),
    ("pct_braceless_control_bodies", "statements", "100 * control bodies without '{' / control bodies",
     lambda c: _pct(c.facts.braceless_bodies, c.facts.control_bodies)),
    ("pct_multi_return_functions", "statements", "100 * functions with >= 2 returns / functions",
     lambda c: _pct(sum(f.return_count >= 2 for f in c.facts.functions), len(c.facts.functions))),
    ("goto_density_per_kloc", "statements", "goto per 1000 code lines",
     lambda c: _kloc(c, c.facts.gotos)),
    ("break_continue_density_per_kloc", "statements", "(break + continue) per 1000 code lines",
     lambda c: _kloc(c, c.facts.breaks + c.facts.continues)),
    # expressions
    ("pct_postfix_incdec", "expressions", "100 * postfix ++/-- / all ++/--",
     lambda c: _pct(c.facts.postfix_incdec, c.facts.postfix_incdec + c.facts.prefix_incdec)),
    ("pct_compound_assignment", "expressions", "100 * compound assignments / assignments",
     lambda c: _pct(c.facts.compound_assignments, c.facts.compound_assignments + c.facts.plain_assignments)),
    ("pct_spaced_binary_operators", "expressions", "100 * binary operators with whitespace on both sides / binary",
     lambda c: _pct(c.facts.spaced_binary_operators, c.facts.binary_operators)),
    ("pct_space_after_comma", "expressions", "100 * commas followed by whitespace / commas",
     lambda c: _pct(c.facts.commas_followed_by_space, c.facts.commas)),
    ("pct_space_after_control_keyword", "expressions", "100 * if/for/while/switch/catch followed by a space / those",
     lambda c: _pct(c.facts.control_keywords_spaced, c.facts.control_keywords)),
    ("pct_parenthesized_return", "expressions", "100 * 'return (...);' / returns with a value",
     lambda c: _pct(c.facts.parenthesized_returns, c.facts.value_returns)),
    ("pct_yoda_comparisons", "expressions", "100 * ==/!= with a literal on the left / ==,!=",
     lambda c: _pct(c.facts.yoda_comparisons, c.facts.equality_comparisons)),
    ("null_literal_density_per_kloc", "expressions", "(NULL + nullptr) per 1000 code lines",
     lambda c: _kloc(c, sum(1 for t in _code_tokens(c) if t.text in ("NULL", "nullptr")
                            and t.kind in (IDENTIFIER, KEYWORD)))),
    ("magic_number_density_per_kloc", "expressions", "numeric literals other than 0 and 1 per 1000 code lines",
     lambda c: _kloc(c, sum(1 for t in _code_tokens(c, NUMBER) if is_magic_number(t.text)))),
    ("string_literal_density_per_kloc", "expressions", "string literals per 1000 code lines",
     lambda c: _kloc(c, sum(1 for _ in _code_tokens(c, STRING)))),
    # declarations
    ("functions_per_kloc", "declarations", "function definitions per 1000 code lines",
     lambda c: _kloc(c, len(c.facts.functions))),
    ("avg_function_length_lines", "declarations", "mean lines from function name to closing brace",
     lambda c: _mean(f.end_line - f.start_line + 1 for f in c.facts.functions)),
    ("avg_parameters_per_function", "declarations", "mean parameter count of function definitions",
     lambda c: _mean(f.parameter_count for f in c.facts.functions)),
    ("pct_void_functions", "declarations", "100 * functions returning void / functions",
     lambda c: _pct(sum(f.returns_void for f in c.facts.functions), len(c.facts.functions))),
    ("pct_multi_declarator_statements", "declarations", "100 * declarations with >= 2 declarators / declarations",
     lambda c: _pct(c.facts.multi_declarator_statements, c.facts.declaration_statements)),
    ("pct_pointer_star_binds_type", "declarations", "100 * 'T* p' / ('T* p' + 'T *p')",
     _star_ratio),
    ("const_density_per_kloc", "declarations", "'const' per 1000 code lines",
     lambda c: _kloc(c, sum(1 for _ in _code_tokens(c, KEYWORD, "const")))),
    ("auto_density_per_kloc", "declarations", "'auto' per 1000 code lines",
     lambda c: _kloc(c, sum(1 for _ in _code_tokens(c, KEYWORD, "auto")))),
    ("macro_define_density_per_kloc", "declarations", "#define directives per 1000 code lines",
     lambda c: _kloc(c, len(_directives(c, "define")))),
    ("pct_angle_bracket_includes", "declarations", "100 * '#include <...>' / #include",
     lambda c: _pct(sum(d.startswith("<") for d in _directives(c, "include")), len(_directives(c, "include")))),
]

METRIC_IDS: tuple[str, ...] = tuple(m[0] for m in _CATALOG)
_FORMULAS: dict[str, _F] = {m[0]: m[3] for m in _CATALOG}


def catalog() -> list[MetricDescriptor]:
    """The fixed 60-entry metric catalog in stable order."""
    return [MetricDescriptor(mid, group, definition) for mid, group, definition, _ in _CATALOG]


@dataclass(frozen=True)
class FeatureVector:
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) != len(METRIC_IDS):
            raise ValueError(f"feature vector needs {len(METRIC_IDS)} values, got {len(self.values)}")

    def as_dict(self) -> dict[str, float]:
        return dict(zip(METRIC_IDS, self.values))

    def __getitem__(self, key):
        if isinstance(key, str):
            return self.values[METRIC_IDS.index(key)]
        return self.values[key]

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    @classmethod
    def from_dict(cls, d: dict[str, float]) -> "FeatureVector":
        return cls(tuple(float(d[m]) for m in METRIC_IDS))

    @classmethod
    def zeros(cls) -> "FeatureVector":
        return cls((0.0,) * len(METRIC_IDS))


def compute_from_counts(counts: SourceCounts) -> FeatureVector:
    values = []
    for mid in METRIC_IDS:
        v = float(_FORMULAS[mid](counts))
        values.append(v if math.isfinite(v) else 0.0)
    return FeatureVector(tuple(values))


def compute_metrics(source: str) -> FeatureVector:
    """The 60 stylistic metrics of one source file."""
    return compute_from_counts(gather(source))
