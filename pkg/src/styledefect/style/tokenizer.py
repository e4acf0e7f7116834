"""Lossless lexer for C-family source text.

Every character of the input ends up in exactly one token, so joining the token
texts reproduces the input.  Comments, string/char literals (including C++ raw
strings and encoding prefixes), preprocessor directives and line continuations
are recognised so that nothing inside them is mistaken for code.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

IDENTIFIER = "identifier"
KEYWORD = "keyword"
NUMBER = "number"
STRING = "string"
CHAR = "char"
LINE_COMMENT = "line_comment"
BLOCK_COMMENT = "block_comment"
PUNCTUATOR = "punctuator"
PREPROCESSOR = "preprocessor"
WHITESPACE = "whitespace"
NEWLINE = "newline"

TOKEN_KINDS = (IDENTIFIER, KEYWORD, NUMBER, STRING, CHAR, LINE_COMMENT, BLOCK_COMMENT,
               PUNCTUATOR, PREPROCESSOR, WHITESPACE, NEWLINE)
COMMENT_KINDS = frozenset({LINE_COMMENT, BLOCK_COMMENT})
TRIVIA_KINDS = frozenset({WHITESPACE, NEWLINE, LINE_COMMENT, BLOCK_COMMENT})
LITERAL_KINDS = frozenset({NUMBER, STRING, CHAR})

KEYWORDS = frozenset("""
alignas alignof and and_eq asm auto bitand bitor bool break case catch char char8_t
char16_t char32_t class compl concept const consteval constexpr constinit const_cast
continue co_await co_return co_yield decltype default delete do double dynamic_cast
else enum explicit export extern false float for friend goto if inline int long
mutable namespace new noexcept not not_eq nullptr operator or or_eq private protected
public register reinterpret_cast requires restrict return short signed sizeof static
static_assert static_cast struct switch template this thread_local throw true try
typedef typeid typename union unsigned using virtual void volatile wchar_t while xor
xor_eq _Alignas _Alignof _Atomic _Bool _Complex _Generic _Noreturn _Static_assert
_Thread_local
""".split())

# longest first within each leading character
PUNCTUATORS = sorted("""
>>= <<= <=> ->* ... :: -> ++ -- << >> <= >= == != && || += -= *= /= %= &= |= ^= .* ##
{ } [ ] ( ) ; : , . ? ~ ! + - * / % ^ & | = < > # @ $ \\ `
""".split(), key=len, reverse=True)

STRING_PREFIXES = frozenset({"L", "u", "U", "u8"})
RAW_PREFIXES = frozenset({"R", "LR", "uR", "UR", "u8R"})


class Token(NamedTuple):
    kind: str
    text: str
    line: int
    column: int

    @property
    def end_line(self) -> int:
        return self.line + self.text.count("\n")

    @property
    def is_code(self) -> bool:
        return self.kind not in TRIVIA_KINDS


@dataclass
class LexResult:
    tokens: list[Token]
    flags: set[str] = field(default_factory=set)


def _is_ident_start(c: str) -> bool:
    return c == "_" or c.isalpha()


def _is_ident_char(c: str) -> bool:
    return c == "_" or c.isalnum()


class _Lexer:
    def __init__(self, src: str):
        self.s = src
        self.n = len(src)
        self.tokens: list[Token] = []
        self.flags: set[str] = set()
        self.line = 1
        self.col = 1

    def emit(self, kind: str, start: int, end: int):
        text = self.s[start:end]
        self.tokens.append(Token(kind, text, self.line, self.col))
        nl = text.count("\n")
        if nl:
            self.line += nl
            self.col = len(text) - text.rfind("\n")
        else:
            self.col += len(text)

    def run(self) -> LexResult:
        s, n = self.s, self.n
        i = 0
        line_start = True
        while i < n:
            c = s[i]
            if c == "\n" or (c == "\r" and i + 1 < n and s[i + 1] == "\n"):
                j = i + (2 if c == "\r" else 1)
                self.emit(NEWLINE, i, j)
                i = j
                line_start = True
                continue
            if c in " \t\f\v\r" or (c == "\\" and self._continuation_len(i)):
                j = i
                while j < n:
                    if s[j] in " \t\f\v" or (s[j] == "\r" and not (j + 1 < n and s[j + 1] == "\n")):
                        j += 1
                    elif s[j] == "\\" and self._continuation_len(j):
                        j += self._continuation_len(j)
                    else:
                        break
                self.emit(WHITESPACE, i, j)
                i = j
                continue
            if c == "/" and i + 1 < n and s[i + 1] == "/":
                j = self._line_end(i + 2)
                self.emit(LINE_COMMENT, i, j)
                i = j
                continue
            if c == "/" and i + 1 < n and s[i + 1] == "*":
                k = s.find("*/", i + 2)
                if k < 0:
                    self.flags.add("unterminated_comment")
                    j = n
                else:
                    j = k + 2
                self.emit(BLOCK_COMMENT, i, j)
                i = j
                continue
            if c == "#" and line_start:
                j = self._directive_end(i + 1)
                self.emit(PREPROCESSOR, i, j)
                i = j
                line_start = False
                continue
            line_start = False
            if c.isdigit() or (c == "." and i + 1 < n and s[i + 1].isdigit()):
                j = self._number_end(i + 1)
                self.emit(NUMBER, i, j)
                i = j
                continue
            if _is_ident_start(c):
                j = i + 1
                while j < n and _is_ident_char(s[j]):
                    j += 1
                word = s[i:j]
                if j < n and s[j] == '"' and word in RAW_PREFIXES:
                    k = self._raw_string_end(j)
                    self.emit(STRING, i, k)
                    i = k
                    continue
                if j < n and s[j] in "\"'" and word in STRING_PREFIXES:
                    k = self._quoted_end(j, s[j])
                    self.emit(STRING if s[j] == '"' else CHAR, i, k)
                    i = k
                    continue
                self.emit(KEYWORD if word in KEYWORDS else IDENTIFIER, i, j)
                i = j
                continue
            if c == '"' or c == "'":
                j = self._quoted_end(i, c)
                self.emit(STRING if c == '"' else CHAR, i, j)
                i = j
                continue
            for p in PUNCTUATORS:
                if s.startswith(p, i):
                    self.emit(PUNCTUATOR, i, i + len(p))
                    i += len(p)
                    break
            else:
                self.emit(PUNCTUATOR, i, i + 1)
                i += 1
        return LexResult(self.tokens, self.flags)

    def _continuation_len(self, i: int) -> int:
        s = self.s
        if s.startswith("\\\n", i):
            return 2
        if s.startswith("\\\r\n", i):
            return 3
        return 0

    def _line_end(self, j: int) -> int:
        """End of a line comment: the next newline not escaped by a trailing backslash."""
        s, n = self.s, self.n
        while j < n:
            if s[j] == "\\" and self._continuation_len(j):
                j += self._continuation_len(j)
                continue
            if s[j] == "\n" or (s[j] == "\r" and j + 1 < n and s[j + 1] == "\n"):
                return j
            j += 1
        return n

    def _directive_end(self, j: int) -> int:
        s, n = self.s, self.n
        last_text = j
        while j < n:
            c = s[j]
            if c == "\\" and self._continuation_len(j):
                j += self._continuation_len(j)
                continue
            if c == "\n" or (c == "\r" and j + 1 < n and s[j + 1] == "\n"):
                break
            if c == "/" and j + 1 < n and s[j + 1] in "/*":
                break
            if c in "\"'":
                j = self._quoted_end(j, c, record=False)
                last_text = j
                continue
            j += 1
            if c not in " \t\f\v\r":
                last_text = j
        return last_text

    def _number_end(self, j: int) -> int:
        s, n = self.s, self.n
        while j < n:
            c = s[j]
            if c in "eEpP" and j + 1 < n and s[j + 1] in "+-":
                j += 2
            elif _is_ident_char(c) or c == ".":
                j += 1
            elif c == "'" and j + 1 < n and _is_ident_char(s[j + 1]):
                j += 1
            else:
                break
        return j

    def _quoted_end(self, i: int, quote: str, record: bool = True) -> int:
        s, n = self.s, self.n
        j = i + 1
        while j < n:
            c = s[j]
            if c == "\\" and j + 1 < n:
                j += 3 if s.startswith("\r\n", j + 1) else 2
                continue
            if c == quote:
                return j + 1
            if c == "\n" or (c == "\r" and j + 1 < n and s[j + 1] == "\n"):
                break
            j += 1
        if record:
            self.flags.add("unterminated_string" if quote == '"' else "unterminated_char")
        return j

    def _raw_string_end(self, q: int) -> int:
        s = self.s
        paren = s.find("(", q + 1)
        delim = s[q + 1:paren] if paren >= 0 else None
        if delim is None or len(delim) > 16 or any(ch in delim for ch in ' \\)\t\n'):
            # not a well-formed raw string opener: lex as an ordinary string
            return self._quoted_end(q, '"')
        close = s.find(")" + delim + '"', paren + 1)
        if close < 0:
            self.flags.add("unterminated_raw_string")
            return self.n
        return close + len(delim) + 2


def lex(source: str) -> LexResult:
    return _Lexer(source).run()


def tokenize(source: str) -> list[Token]:
    """Token list whose texts concatenate back to ``source``."""
    return lex(source).tokens


def code_line_numbers(source: str, tokens: list[Token] | None = None) -> set[int]:
    """1-based numbers of lines touched by at least one non-comment, non-blank token."""
    lines = set()
    for tok in tokens if tokens is not None else tokenize(source):
        if tok.is_code:
            lines.update(range(tok.line, tok.end_line + 1))
    return lines


def read_source(path: str | Path) -> tuple[str, bool]:
    """Decode a file as UTF-8, replacing invalid bytes; the flag reports replacements."""
    raw = Path(path).read_bytes()
    try:
        return raw.decode("utf-8"), False
    except UnicodeDecodeError:
        return raw.decode("utf-8", "replace"), True
