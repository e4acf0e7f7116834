"""Brace-structural scan of a token stream.

No C++ grammar is attempted.  Brackets are matched, top-level ``{`` blocks are
classified (function body, class/namespace body, other), and construct tallies
come from keyword look-ahead.  Declarations are recognised per statement with
the usual lexical reading: optional specifiers, a type (builtin keywords or a
qualified name with template arguments), then declarators made of pointer or
reference operators and a name.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .tokenizer import (CHAR, COMMENT_KINDS, IDENTIFIER, KEYWORD, NEWLINE, NUMBER, PREPROCESSOR,
                        PUNCTUATOR, STRING, WHITESPACE, Token)

OPENERS = {"(": ")", "[": "]", "{": "}"}
CLOSERS = {v: k for k, v in OPENERS.items()}

BUILTIN_TYPES = frozenset("""void bool char wchar_t char8_t char16_t char32_t short int long float
double signed unsigned auto _Bool _Complex""".split())
SPECIFIERS = frozenset("""static extern const volatile inline constexpr consteval constinit register
mutable thread_local typename virtual explicit friend restrict""".split())
CV = frozenset({"const", "volatile"})
PTR_OPS = frozenset({"*", "&", "&&"})
CLASS_KEYS = frozenset({"class", "struct", "union", "enum"})
ACCESS = frozenset({"public", "private", "protected"})
CONTROL_WITH_HEADER = frozenset({"if", "while", "switch", "catch"})
TRAILING_FUNC_WORDS = frozenset({"const", "volatile", "noexcept", "override", "final", "throw",
                                 "try", "requires", "mutable"})

ASSIGN_COMPOUND = frozenset({"+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>="})
ALWAYS_BINARY = frozenset({"=", "==", "!=", "<=", ">=", "<=>", "&&", "||", "/", "%"}) | ASSIGN_COMPOUND
OPERAND_END_KINDS = frozenset({IDENTIFIER, NUMBER, STRING, CHAR})


@dataclass
class Function:
    name: str
    start_line: int          # line of the name token
    end_line: int            # line of the closing brace
    decl_line: int           # line of the first token of the declaration
    parameter_count: int
    return_count: int
    returns_void: bool
    has_preceding_comment: bool


@dataclass
class Declarator:
    name: str
    star: str | None = None  # "type" (T* p), "name" (T *p), "other", or None without '*'


@dataclass
class StructuralFacts:
    functions: list[Function] = field(default_factory=list)
    for_loops: int = 0
    range_for_loops: int = 0
    while_loops: int = 0
    do_while_loops: int = 0
    ifs: int = 0
    ifs_with_else: int = 0
    else_ifs: int = 0
    switches: int = 0
    ternaries: int = 0
    gotos: int = 0
    breaks: int = 0
    continues: int = 0
    returns: int = 0
    control_bodies: int = 0
    braceless_bodies: int = 0
    open_brace_same_line: int = 0
    open_brace_own_line: int = 0
    close_braces: int = 0
    close_brace_own_line: int = 0
    plain_assignments: int = 0
    compound_assignments: int = 0
    prefix_incdec: int = 0
    postfix_incdec: int = 0
    binary_operators: int = 0
    spaced_binary_operators: int = 0
    commas: int = 0
    commas_followed_by_space: int = 0
    control_keywords: int = 0
    control_keywords_spaced: int = 0
    value_returns: int = 0
    parenthesized_returns: int = 0
    equality_comparisons: int = 0
    yoda_comparisons: int = 0
    declaration_statements: int = 0
    multi_declarator_statements: int = 0
    declarators: list[Declarator] = field(default_factory=list)
    parameters: list[Declarator] = field(default_factory=list)
    statement_semicolons_per_line: Counter = field(default_factory=Counter)
    flags: set[str] = field(default_factory=set)

    @property
    def total_loops(self) -> int:
        return self.for_loops + self.range_for_loops + self.while_loops + self.do_while_loops

    def counts(self) -> dict:
        """Plain tallies (everything except the per-item lists), for golden files."""
        skip = {"functions", "declarators", "parameters", "statement_semicolons_per_line", "flags"}
        return {k: v for k, v in self.__dict__.items() if k not in skip}


class _Scanner:
    def __init__(self, tokens: list[Token]):
        self.all = tokens
        # positions (into self.all) of code tokens other than preprocessor lines
        self.pos = [i for i, t in enumerate(tokens) if t.is_code and t.kind != PREPROCESSOR]
        self.code = [tokens[i] for i in self.pos]
        self.facts = StructuralFacts()
        self.match = self._match_brackets()

    # -- helpers -------------------------------------------------------------

    def text(self, k: int) -> str | None:
        return self.code[k].text if 0 <= k < len(self.code) else None

    def is_punct(self, k: int, text: str) -> bool:
        return 0 <= k < len(self.code) and self.code[k].kind == PUNCTUATOR and self.code[k].text == text

    def is_kw(self, k: int, text: str) -> bool:
        return 0 <= k < len(self.code) and self.code[k].kind == KEYWORD and self.code[k].text == text

    def _match_brackets(self) -> dict[int, int]:
        match = {}
        stack = []
        for k, t in enumerate(self.code):
            if t.kind != PUNCTUATOR:
                continue
            if t.text in OPENERS:
                stack.append(k)
            elif t.text in CLOSERS:
                # pop through mismatched openers (best effort on broken input)
                while stack and self.code[stack[-1]].text != CLOSERS[t.text]:
                    self.facts.flags.add("unbalanced_brackets")
                    if t.text != "}" and self.code[stack[-1]].text == "{":
                        break
                    stack.pop()
                if stack and self.code[stack[-1]].text == CLOSERS[t.text]:
                    o = stack.pop()
                    match[o] = k
                    match[k] = o
                else:
                    self.facts.flags.add("unbalanced_brackets")
        if stack:
            self.facts.flags.add("unbalanced_brackets")
            if any(self.code[o].text == "{" for o in stack):
                self.facts.flags.add("unbalanced_braces")
        return match

    def close_of(self, k: int) -> int:
        """Matching closer of the opener at ``k`` (end of input when unmatched)."""
        return self.match.get(k, len(self.code) - 1)

    def ws_before(self, k: int) -> bool:
        i = self.pos[k]
        return i > 0 and self.all[i - 1].kind in (WHITESPACE, NEWLINE)

    def ws_after(self, k: int) -> bool:
        i = self.pos[k]
        return i + 1 < len(self.all) and self.all[i + 1].kind in (WHITESPACE, NEWLINE)

    def first_on_line(self, k: int) -> bool:
        """No code token (preprocessor included) ends on this token's line before it."""
        i = self.pos[k]
        line = self.all[i].line
        for j in range(i - 1, -1, -1):
            t = self.all[j]
            if t.end_line < line:
                return True
            if t.is_code:
                return False
        return True

    # -- statement extent ----------------------------------------------------

    def statement_end(self, k: int) -> int:
        """Index of the last token of the statement starting at ``k``."""
        n = len(self.code)
        if k >= n:
            return n - 1
        t = self.code[k]
        if t.kind == PUNCTUATOR and t.text == "{":
            return self.close_of(k)
        if t.kind == KEYWORD:
            if t.text in ("if", "while", "switch", "for", "catch") and self.is_punct(k + 1, "("):
                body = self.close_of(k + 1) + 1
                end = self.statement_end(body)
                if t.text == "if" and self.is_kw(end + 1, "else"):
                    end = self.statement_end(end + 2)
                return end
            if t.text == "do":
                end = self.statement_end(k + 1)
                if self.is_kw(end + 1, "while") and self.is_punct(end + 2, "("):
                    end = self.close_of(end + 2)
                    if self.is_punct(end + 1, ";"):
                        end += 1
                return end
            if t.text == "else":
                return self.statement_end(k + 1)
            if t.text == "try":
                end = self.statement_end(k + 1)
                while self.is_kw(end + 1, "catch") and self.is_punct(end + 2, "("):
                    end = self.statement_end(self.close_of(end + 2) + 1)
                return end
        j = k
        while j < n:
            tj = self.code[j]
            if tj.kind == PUNCTUATOR:
                if tj.text in ("(", "["):
                    j = self.close_of(j) + 1
                    continue
                if tj.text == ";":
                    return j
                if tj.text == "{":
                    # brace initialiser or lambda body inside an expression statement
                    j = self.close_of(j) + 1
                    continue
                if tj.text == "}":
                    return j - 1
            j += 1
        return n - 1

    # -- passes ---------------------------------------------------------------

    def scan(self) -> StructuralFacts:
        self._tally_tokens()
        self._tally_control()
        self._find_functions()
        self._find_declarations()
        return self.facts

    def _tally_tokens(self):
        f = self.facts
        depth = 0
        for k, t in enumerate(self.code):
            if t.kind == PUNCTUATOR:
                x = t.text
                if x == "(":
                    depth += 1
                elif x == ")":
                    depth = max(0, depth - 1)
                elif x == ";" and depth == 0:
                    f.statement_semicolons_per_line[t.line] += 1
                elif x == "{":
                    if self.first_on_line(k):
                        f.open_brace_own_line += 1
                    else:
                        f.open_brace_same_line += 1
                elif x == "}":
                    f.close_braces += 1
                    if self.first_on_line(k):
                        f.close_brace_own_line += 1
                elif x == "?":
                    f.ternaries += 1
                elif x == ",":
                    f.commas += 1
                    if self.ws_after(k):
                        f.commas_followed_by_space += 1
                if x == "=":
                    f.plain_assignments += 1
                elif x in ASSIGN_COMPOUND:
                    f.compound_assignments += 1
                elif x in ("++", "--"):
                    prev = self.code[k - 1] if k > 0 else None
                    if prev is not None and (prev.kind == IDENTIFIER or prev.text in (")", "]")):
                        f.postfix_incdec += 1
                    else:
                        f.prefix_incdec += 1
                if x in ("==", "!="):
                    f.equality_comparisons += 1
                    prev = self.code[k - 1] if k > 0 else None
                    if prev is not None and (prev.kind in (NUMBER, STRING, CHAR)
                                             or prev.text in ("nullptr", "true", "false", "NULL")):
                        f.yoda_comparisons += 1
                binary = x in ALWAYS_BINARY
                if x in ("+", "-") and k > 0:
                    prev = self.code[k - 1]
                    binary = prev.kind in OPERAND_END_KINDS or prev.text in (")", "]")
                if binary:
                    f.binary_operators += 1
                    if self.ws_before(k) and self.ws_after(k):
                        f.spaced_binary_operators += 1
            elif t.kind == KEYWORD:
                x = t.text
                if x == "goto":
                    f.gotos += 1
                elif x == "break":
                    f.breaks += 1
                elif x == "continue":
                    f.continues += 1
                elif x == "switch":
                    f.switches += 1
                elif x == "return":
                    f.returns += 1
                    if not self.is_punct(k + 1, ";"):
                        f.value_returns += 1
                        if self.is_punct(k + 1, "(") and self.is_punct(self.close_of(k + 1) + 1, ";"):
                            f.parenthesized_returns += 1
                if x in ("if", "for", "while", "switch", "catch") and self.is_punct(k + 1, "("):
                    f.control_keywords += 1
                    if self.ws_after(k):
                        f.control_keywords_spaced += 1

    def _body(self, k: int):
        """Count the control body starting at token ``k``."""
        if k >= len(self.code):
            return
        self.facts.control_bodies += 1
        if not self.is_punct(k, "{"):
            self.facts.braceless_bodies += 1

    def _tally_control(self):
        f = self.facts
        do_whiles = set()
        for k, t in enumerate(self.code):
            if t.kind != KEYWORD:
                continue
            x = t.text
            if x == "do":
                f.do_while_loops += 1
                self._body(k + 1)
                end = self.statement_end(k + 1)
                if self.is_kw(end + 1, "while"):
                    do_whiles.add(end + 1)
            elif x == "while" and k not in do_whiles and self.is_punct(k + 1, "("):
                f.while_loops += 1
                self._body(self.close_of(k + 1) + 1)
            elif x == "for" and self.is_punct(k + 1, "("):
                close = self.close_of(k + 1)
                if self._is_range_for(k + 1, close):
                    f.range_for_loops += 1
                else:
                    f.for_loops += 1
                self._body(close + 1)
            elif x == "if" and self.is_punct(k + 1, "("):
                f.ifs += 1
                body = self.close_of(k + 1) + 1
                self._body(body)
                end = self.statement_end(body)
                if self.is_kw(end + 1, "else"):
                    f.ifs_with_else += 1
            elif x == "else":
                if self.is_kw(k + 1, "if"):
                    f.else_ifs += 1
                else:
                    self._body(k + 1)

    def _is_range_for(self, open_: int, close: int) -> bool:
        k = open_ + 1
        seen_colon = False
        while k < close:
            t = self.code[k]
            if t.kind == PUNCTUATOR:
                if t.text in ("(", "[", "{"):
                    k = self.close_of(k) + 1
                    continue
                if t.text == ";":
                    return False
                if t.text == ":":
                    seen_colon = True
            k += 1
        return seen_colon

    # -- functions -----------------------------------------------------------

    def _find_functions(self):
        """Walk brace blocks; detect function bodies at namespace/class/file scope."""
        self._walk_blocks(0, len(self.code), scope_ok=True)

    def _walk_blocks(self, start: int, stop: int, scope_ok: bool):
        k = start
        head_start = start
        while k < stop:
            t = self.code[k]
            if t.kind == PUNCTUATOR and t.text in ("(", "["):
                k = self.close_of(k) + 1
                continue
            if t.kind == PUNCTUATOR and t.text == ";":
                head_start = k + 1
            elif t.kind == PUNCTUATOR and t.text == ":" and k > head_start and \
                    self.code[k - 1].text in ACCESS and k - 1 == head_start:
                head_start = k + 1
            elif t.kind == PUNCTUATOR and t.text == "}":
                head_start = k + 1
            elif t.kind == PUNCTUATOR and t.text == "{":
                close = self.close_of(k)
                kind = self._block_kind(head_start, k) if scope_ok else "other"
                if kind == "function":
                    self._record_function(head_start, k, close)
                elif kind in ("class", "namespace", "extern"):
                    self._walk_blocks(k + 1, close, scope_ok=True)
                k = close + 1
                head_start = k
                continue
            k += 1

    def _function_paren(self, head: int, brace: int) -> int | None:
        """Index of the parameter-list '(' when tokens head..brace form a function header."""
        if head >= brace:
            return None
        first = self.code[head]
        if first.kind == KEYWORD and first.text in ("if", "for", "while", "switch", "return", "else", "do",
                                                    "case", "new", "throw", "sizeof", "namespace",
                                                    "typedef", "using", "catch"):
            return None
        k = head
        while k < brace:
            t = self.code[k]
            if t.kind == PUNCTUATOR and t.text == "=":
                return None
            if t.kind == PUNCTUATOR and t.text == "(":
                prev = self.code[k - 1] if k > head else None
                if prev is None:
                    return None
                name_ok = prev.kind == IDENTIFIER or (
                    prev.kind == PUNCTUATOR and any(self.is_kw(j, "operator") for j in range(max(head, k - 3), k)))
                if not name_ok:
                    k = self.close_of(k) + 1
                    continue
                close = self.close_of(k)
                if close >= brace:
                    return None
                if self._valid_function_tail(close + 1, brace):
                    return k
                # e.g. a macro invocation ahead of the real header
                k = close + 1
                continue
            if t.kind == PUNCTUATOR and t.text == "[":
                k = self.close_of(k) + 1
                continue
            k += 1
        return None

    def _valid_function_tail(self, k: int, brace: int) -> bool:
        """Tokens between ')' and '{': qualifiers, trailing return type or a ctor init list."""
        if k == brace:
            return True
        t = self.code[k]
        if t.text == ":" and t.kind == PUNCTUATOR:
            return True
        while k < brace:
            t = self.code[k]
            if t.kind == PUNCTUATOR and t.text in ("(", "["):
                k = self.close_of(k) + 1
                continue
            if t.kind == KEYWORD and t.text in TRAILING_FUNC_WORDS:
                k += 1
                continue
            if t.kind == IDENTIFIER and t.text in ("override", "final"):
                k += 1
                continue
            if t.kind == PUNCTUATOR and t.text in ("&", "&&"):
                k += 1
                continue
            if t.kind == PUNCTUATOR and t.text == "->":
                return True
            if t.kind == PUNCTUATOR and t.text == ":":
                return True
            return False
        return True

    def _block_kind(self, head: int, brace: int) -> str:
        if self._function_paren(head, brace) is not None:
            return "function"
        texts = [self.code[j] for j in range(head, brace)]
        if any(t.kind == KEYWORD and t.text == "namespace" for t in texts):
            return "namespace"
        if texts and texts[0].text == "extern" and len(texts) >= 2 and texts[1].kind == STRING:
            return "extern"
        if any(t.kind == KEYWORD and t.text in CLASS_KEYS for t in texts) and \
                not any(t.kind == PUNCTUATOR and t.text == "=" for t in texts):
            return "class"
        return "other"

    def _record_function(self, head: int, brace: int, close: int):
        paren = self._function_paren(head, brace)
        name_tok = self.code[paren - 1]
        if name_tok.kind == IDENTIFIER:
            name = name_tok.text
        else:
            j = paren - 1
            while not self.is_kw(j, "operator"):
                j -= 1
            name = "operator" + "".join(self.code[x].text for x in range(j + 1, paren))
        params = self._split_top_level(paren + 1, self.close_of(paren))
        if len(params) == 1 and len(params[0]) == 1 and self.is_kw(params[0][0], "void"):
            params = []
        for piece in params:
            decl = self._parse_declaration(piece, allow_unnamed=True)
            if decl and decl[0].name:
                self.facts.parameters.append(decl[0])
        before = paren - 2
        while before >= head and (self.is_punct(before, "::") or self.is_punct(before, "~")
                                  or (self.code[before].kind == IDENTIFIER and self.is_punct(before + 1, "::"))):
            before -= 1
        returns_void = before >= head and self.is_kw(before, "void")
        returns = sum(1 for j in range(brace + 1, close) if self.is_kw(j, "return"))
        i = self.pos[head] - 1
        while i >= 0 and self.all[i].kind in (WHITESPACE, NEWLINE):
            i -= 1
        commented = i >= 0 and self.all[i].kind in COMMENT_KINDS
        self.facts.functions.append(Function(
            name=name, start_line=self.code[paren - 1].line, end_line=self.code[close].end_line,
            decl_line=self.code[head].line, parameter_count=len(params), return_count=returns,
            returns_void=returns_void, has_preceding_comment=commented))

    def _split_top_level(self, start: int, stop: int) -> list[list[int]]:
        pieces, cur = [], []
        k = start
        while k < stop:
            t = self.code[k]
            if t.kind == PUNCTUATOR and t.text in ("(", "[", "{"):
                end = min(self.close_of(k), stop - 1)
                cur.extend(range(k, end + 1))
                k = end + 1
                continue
            if t.kind == PUNCTUATOR and t.text == ",":
                pieces.append(cur)
                cur = []
            else:
                cur.append(k)
            k += 1
        if cur or pieces:
            pieces.append(cur)
        return pieces

    # -- declarations ------------------------------------------------------------

    def _find_declarations(self):
        for seg in self._segments():
            decls = self._parse_declaration(seg)
            if decls:
                self.facts.declaration_statements += 1
                if len(decls) > 1:
                    self.facts.multi_declarator_statements += 1
                self.facts.declarators.extend(decls)

    def _segments(self) -> list[list[int]]:
        """Statement-like token runs: split at ; { } and around control headers."""
        segs = []
        seg: list[int] = []
        n = len(self.code)

        def flush():
            nonlocal seg
            if seg:
                segs.append(seg)
            seg = []

        k = 0
        while k < n:
            t = self.code[k]
            x = t.text
            if t.kind == PUNCTUATOR:
                if x in ("(", "["):
                    end = self.close_of(k)
                    seg.extend(range(k, end + 1))
                    k = end + 1
                    continue
                if x in ("{", "}", ";"):
                    flush()
                    k += 1
                    continue
            elif t.kind == KEYWORD:
                if x in CONTROL_WITH_HEADER and self.is_punct(k + 1, "("):
                    flush()
                    k = self.close_of(k + 1) + 1
                    continue
                if x == "for" and self.is_punct(k + 1, "("):
                    flush()
                    close = self.close_of(k + 1)
                    init = []
                    j = k + 2
                    while j < close:
                        tj = self.code[j]
                        if tj.kind == PUNCTUATOR and tj.text in ("(", "[", "{"):
                            end = self.close_of(j)
                            init.extend(range(j, end + 1))
                            j = end + 1
                            continue
                        if tj.kind == PUNCTUATOR and tj.text in (";", ":"):
                            break
                        init.append(j)
                        j += 1
                    if init:
                        segs.append(init)
                    k = close + 1
                    continue
                if x in ("else", "do", "try"):
                    flush()
                    k += 1
                    continue
                if x in ACCESS and self.is_punct(k + 1, ":"):
                    flush()
                    k += 2
                    continue
                if x == "case":
                    flush()
                    j = k + 1
                    while j < n and not (self.is_punct(j, ":") or self.is_punct(j, ";")):
                        j += 1
                    k = j + 1
                    continue
                if x == "default" and self.is_punct(k + 1, ":"):
                    flush()
                    k += 2
                    continue
            seg.append(k)
            k += 1
        flush()
        return segs

    def _skip_template_args(self, k: int, stop: int) -> int | None:
        """Index after the '>' closing the '<' at ``k``, or None."""
        depth = 0
        j = k
        while j < stop:
            t = self.code[j]
            if t.kind == PUNCTUATOR:
                if t.text == "<":
                    depth += 1
                elif t.text == ">":
                    depth -= 1
                elif t.text == ">>":
                    depth -= 2
                elif t.text in ("(", "["):
                    j = self.close_of(j) + 1
                    continue
                elif t.text in (";", "{", "}", "=", "&&", "||"):
                    return None
                if depth <= 0:
                    return j + 1 if depth == 0 else None
            j += 1
        return None

    def _parse_type(self, seg: list[int], p: int) -> int | None:
        """Position after a type in ``seg`` starting at ``p`` (specifiers already skipped)."""
        n = len(seg)
        if p >= n:
            return None
        t = self.code[seg[p]]
        if t.kind == KEYWORD and t.text in BUILTIN_TYPES:
            while p < n and self.code[seg[p]].kind == KEYWORD and \
                    (self.code[seg[p]].text in BUILTIN_TYPES or self.code[seg[p]].text in CV):
                p += 1
            return p
        if t.kind == KEYWORD and t.text == "decltype" and p + 1 < n and self.code[seg[p + 1]].text == "(":
            # the whole paren group is contiguous in seg
            close = self.close_of(seg[p + 1])
            while p < n and seg[p] <= close:
                p += 1
            return p
        if t.kind == KEYWORD and t.text in CLASS_KEYS:
            p += 1
            if p < n and self.code[seg[p]].text in ("class", "struct"):
                p += 1
        if p < n and self.code[seg[p]].text == "::":
            p += 1
        if p >= n or self.code[seg[p]].kind != IDENTIFIER:
            return None
        while True:
            p += 1
            if p < n and self.code[seg[p]].text == "<":
                # template arguments must be contiguous tokens of this segment
                end = self._skip_template_args(seg[p], seg[-1] + 1)
                if end is None:
                    return p
                while p < n and seg[p] < end:
                    p += 1
            if p + 1 < n and self.code[seg[p]].text == "::" and self.code[seg[p + 1]].kind == IDENTIFIER:
                p += 1
                continue
            return p

    def _parse_declaration(self, seg: list[int], allow_unnamed: bool = False) -> list[Declarator] | None:
        n = len(seg)
        p = 0
        while p < n:
            t = self.code[seg[p]]
            if t.kind == KEYWORD and t.text in SPECIFIERS:
                p += 1
            elif t.kind == KEYWORD and t.text == "extern":
                p += 1
            elif t.kind == STRING and p > 0 and self.code[seg[p - 1]].text == "extern":
                p += 1
            elif t.kind == PUNCTUATOR and t.text == "[" and p + 1 < n and self.code[seg[p + 1]].text == "[":
                close = self.close_of(seg[p])
                while p < n and seg[p] <= close:
                    p += 1
            else:
                break
        type_end = self._parse_type(seg, p)
        if type_end is None:
            return None
        while type_end < n and self.code[seg[type_end]].kind == KEYWORD and self.code[seg[type_end]].text in CV:
            type_end += 1
        # split declarators on top-level commas (groups in seg are already whole)
        pieces = [[]]
        q = type_end
        while q < n:
            t = self.code[seg[q]]
            if t.kind == PUNCTUATOR and t.text in ("(", "[", "{"):
                close = self.close_of(seg[q])
                while q < n and seg[q] <= close:
                    pieces[-1].append(seg[q])
                    q += 1
                continue
            if t.kind == PUNCTUATOR and t.text == ",":
                pieces.append([])
            else:
                pieces[-1].append(seg[q])
            q += 1
        out = []
        for idx, piece in enumerate(pieces):
            d = self._declarator(piece, seg[type_end - 1] if type_end > 0 else None,
                                 first=idx == 0, allow_unnamed=allow_unnamed)
            if d is None:
                if idx == 0:
                    return None
                break
            out.append(d)
        return out

    def _declarator(self, piece: list[int], type_last: int | None, first: bool,
                    allow_unnamed: bool) -> Declarator | None:
        m = 0
        while m < len(piece) and (self.code[piece[m]].text in PTR_OPS and self.code[piece[m]].kind == PUNCTUATOR
                                  or (self.code[piece[m]].kind == KEYWORD and self.code[piece[m]].text in CV)):
            m += 1
        ptr = piece[:m]
        if m >= len(piece) or self.code[piece[m]].kind != IDENTIFIER:
            unnamed = m >= len(piece) or self.code[piece[m]].text in ("=", "[")
            return Declarator(name="", star=None) if allow_unnamed and unnamed else None
        name_k = piece[m]
        nxt = self.code[piece[m + 1]] if m + 1 < len(piece) else None
        if nxt is not None:
            if nxt.kind != PUNCTUATOR or nxt.text not in ("=", "[", "(", "{", ":"):
                return None
            if nxt.text == "(" and first and not allow_unnamed and self._looks_like_params(piece[m + 1]):
                return None
        star = None
        if any(self.code[k].text == "*" for k in ptr):
            if not first:
                star = "other"
            else:
                before = self.ws_before(ptr[0])
                after = self.ws_after(ptr[-1])
                if not before and after:
                    star = "type"
                elif before and not after:
                    star = "name"
                else:
                    star = "other"
        return Declarator(name=self.code[name_k].text, star=star)

    def _looks_like_params(self, open_: int) -> bool:
        close = self.close_of(open_)
        if close == open_ + 1:
            return True
        first = self.code[open_ + 1]
        if first.kind == KEYWORD and (first.text in BUILTIN_TYPES or first.text in CV or first.text in CLASS_KEYS):
            return True
        for j in range(open_ + 1, close - 1):
            a, b = self.code[j], self.code[j + 1]
            if a.kind == IDENTIFIER and b.kind == IDENTIFIER:
                return True
            if a.kind == IDENTIFIER and b.text in PTR_OPS and j + 2 < close and self.code[j + 2].kind == IDENTIFIER \
                    and (j == open_ + 1 or self.code[j - 1].text in (",", "::")):
                return True
        return False


def scan_structure(tokens: list[Token]) -> StructuralFacts:
    """Structural facts for a token stream produced by ``tokenize``."""
    return _Scanner(tokens).scan()
