"""COGS-format dataset I/O: split files and logical-form parse/print.

Split files are 3-column tab-separated UTF-8 (source sentence, target
logical form, category tag), one row per LF-terminated line, no header.

Logical forms come in two textual renderings:

* spaced   -- every token separated by a single space, as in the official
              COGS distribution: ``* cake ( x _ 2 ) ; eat . agent ( x _ 1 , Emma )``
* compact  -- prose style: ``*cake(x_2); eat.agent(x_1, Emma)``

Both are accepted on input; parse/print round-trips are lossless in either
style, and re-serializing an unmodified split reproduces the file byte for
byte.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from functools import lru_cache

from .errors import FormatError, LFParseError

__all__ = [
    "Variable",
    "BoundName",
    "ProperName",
    "Atom",
    "LogicalForm",
    "Example",
    "SplitFile",
    "parse_lf",
    "print_lf",
    "detect_style",
    "parse_split_file",
    "serialize_split_file",
    "source_tokens",
    "strip_final_punct",
]


# ---------------------------------------------------------------------------
# AST types


@dataclass(frozen=True)
class Variable:
    """Indexed variable ``x_i``; the index tracks the token position."""

    index: int


@dataclass(frozen=True)
class BoundName:
    """Lambda-bound name in a primitive entry (``LAMBDA a . ...``)."""

    name: str


@dataclass(frozen=True)
class ProperName:
    """Entity constant: proper names and replacement tokens."""

    name: str


Term = Variable | BoundName | ProperName


@dataclass(frozen=True)
class Atom:
    lemma: str
    role_path: tuple[str, ...] = ()
    args: tuple[Term, ...] = ()

    def __post_init__(self):
        if not 1 <= len(self.args) <= 2:
            raise ValueError(f"atom {self.lemma!r} must have 1 or 2 args")


@dataclass(frozen=True)
class LogicalForm:
    """Parsed COGS target.

    ``bare_name`` covers proper-name primitive rows whose target is just the
    name itself; it is mutually exclusive with the other fields.
    """

    lambdas: tuple[str, ...] = ()
    definites: tuple[tuple[str, Term], ...] = ()
    atoms: tuple[Atom, ...] = ()
    bare_name: str | None = None

    def predicate_lemmas(self) -> set[str]:
        """All predicate lemmas (atoms and definite descriptions)."""
        lemmas = {a.lemma for a in self.atoms}
        lemmas.update(lemma for lemma, _ in self.definites)
        return lemmas

    def proper_names(self) -> set[str]:
        names = {a.name for atom in self.atoms for a in atom.args if isinstance(a, ProperName)}
        names.update(t.name for _, t in self.definites if isinstance(t, ProperName))
        if self.bare_name is not None:
            names.add(self.bare_name)
        return names

    def lexical_items(self) -> set[str]:
        """Predicate lemmas plus proper-name constants; used for occurrence counts."""
        return self.predicate_lemmas() | self.proper_names()


# ---------------------------------------------------------------------------
# Lexer

_PUNCT = {"(", ")", ",", ";", "*", "."}
_NAME_CHARS = re.compile(r"[A-Za-z0-9_]+")
_COMPACT_VAR = re.compile(r"^x_(\d+)$")
_BRACKETS = {"[": "]", "<": ">"}


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens: list[tuple[str, int]] = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c == " ":
            i += 1
            continue
        if c in _PUNCT:
            tokens.append((c, i))
            i += 1
            continue
        if c in _BRACKETS:
            close = _BRACKETS[c]
            j = text.find(close, i + 1)
            if j == -1:
                raise LFParseError(f"unterminated {c!r} token", i)
            chunk = text[i : j + 1]
            if any(ch.isspace() for ch in chunk):
                raise LFParseError(f"whitespace inside bracketed token {chunk!r}", i)
            tokens.append((chunk, i))
            i = j + 1
            continue
        m = _NAME_CHARS.match(text, i)
        if m:
            tokens.append((m.group(0), i))
            i = m.end()
            continue
        raise LFParseError(f"unknown token {c!r}", i)
    return tokens


# ---------------------------------------------------------------------------
# Parser


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0
        self.bound: list[str] = []

    def peek(self) -> str | None:
        if self.pos < len(self.tokens):
            return self.tokens[self.pos][0]
        return None

    def offset(self) -> int:
        if self.pos < len(self.tokens):
            return self.tokens[self.pos][1]
        return len(self.text)

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            raise LFParseError("unexpected end of input", self.offset())
        self.pos += 1
        return tok

    def expect(self, tok: str) -> None:
        got = self.peek()
        if got != tok:
            raise LFParseError(f"expected {tok!r}, got {got!r}", self.offset())
        self.pos += 1

    def parse(self) -> LogicalForm:
        if not self.tokens:
            raise LFParseError("empty logical form", 0)
        # Proper-name primitive: the whole target is one constant.
        if len(self.tokens) == 1:
            name = self.take()
            if name in _PUNCT or name in ("AND", "LAMBDA"):
                raise LFParseError(f"unexpected token {name!r}", 0)
            return LogicalForm(bare_name=name)
        if self.peek() == "LAMBDA":
            return self._lambda_form()
        return self._main_form()

    def _lambda_form(self) -> LogicalForm:
        lambdas: list[str] = []
        while self.peek() == "LAMBDA":
            self.take()
            name = self.take()
            if not name.islower():
                raise LFParseError(f"bad lambda binder {name!r}", self.offset())
            self.expect(".")
            lambdas.append(name)
            self.bound.append(name)
        atoms = self._conjunction()
        self._expect_end()
        return LogicalForm(lambdas=tuple(lambdas), atoms=atoms)

    def _main_form(self) -> LogicalForm:
        definites: list[tuple[str, Term]] = []
        while self.peek() == "*":
            self.take()
            lemma = self._name("definite lemma")
            self.expect("(")
            term = self._term()
            self.expect(")")
            self.expect(";")
            definites.append((lemma, term))
        atoms = self._conjunction()
        self._expect_end()
        return LogicalForm(definites=tuple(definites), atoms=atoms)

    def _expect_end(self) -> None:
        if self.pos != len(self.tokens):
            raise LFParseError(f"unexpected trailing token {self.peek()!r}", self.offset())

    def _conjunction(self) -> tuple[Atom, ...]:
        atoms = [self._atom()]
        while self.peek() == "AND":
            and_off = self.offset()
            self.take()
            if self.peek() is None:
                raise LFParseError("dangling AND", and_off)
            atoms.append(self._atom())
        return tuple(atoms)

    def _atom(self) -> Atom:
        lemma = self._name("predicate lemma")
        roles: list[str] = []
        while self.peek() == ".":
            self.take()
            roles.append(self._name("role segment"))
        self.expect("(")
        args = [self._term()]
        if self.peek() == ",":
            self.take()
            args.append(self._term())
        self.expect(")")
        return Atom(lemma=lemma, role_path=tuple(roles), args=tuple(args))

    def _name(self, what: str) -> str:
        tok = self.peek()
        if tok is None or tok in _PUNCT or tok in ("AND", "LAMBDA"):
            raise LFParseError(f"expected {what}, got {tok!r}", self.offset())
        return self.take()

    def _term(self) -> Term:
        tok = self.peek()
        if tok is None:
            raise LFParseError("expected term", self.offset())
        # Spaced variable: "x _ 3" arrives as three tokens.
        if (
            tok == "x"
            and self.pos + 2 < len(self.tokens)
            and self.tokens[self.pos + 1][0] == "_"
            and self.tokens[self.pos + 2][0].isdigit()
        ):
            self.pos += 3
            return Variable(int(self.tokens[self.pos - 1][0]))
        m = _COMPACT_VAR.match(tok)
        if m:
            self.take()
            return Variable(int(m.group(1)))
        if tok in _PUNCT or tok in ("AND", "LAMBDA"):
            raise LFParseError(f"expected term, got {tok!r}", self.offset())
        self.take()
        if tok in self.bound:
            return BoundName(tok)
        return ProperName(tok)


@lru_cache(maxsize=200_000)
def parse_lf(text: str) -> LogicalForm:
    """Parse a COGS target in either spaced or compact rendering."""
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# Printer


def _term_tokens(term: Term) -> list[str]:
    if isinstance(term, Variable):
        return ["x", "_", str(term.index)]
    return [term.name]


def _term_compact(term: Term) -> str:
    if isinstance(term, Variable):
        return f"x_{term.index}"
    return term.name


def _atom_tokens(atom: Atom) -> list[str]:
    toks = [atom.lemma]
    for seg in atom.role_path:
        toks += [".", seg]
    toks.append("(")
    toks += _term_tokens(atom.args[0])
    if len(atom.args) == 2:
        toks.append(",")
        toks += _term_tokens(atom.args[1])
    toks.append(")")
    return toks


def _atom_compact(atom: Atom) -> str:
    head = ".".join((atom.lemma,) + atom.role_path)
    args = ", ".join(_term_compact(a) for a in atom.args)
    return f"{head}({args})"


def print_lf(lf: LogicalForm, style: str = "spaced") -> str:
    """Serialize a LogicalForm; ``parse_lf(print_lf(lf, s)) == lf`` for both styles."""
    if style not in ("spaced", "compact"):
        raise ValueError(f"unknown style {style!r}")
    if lf.bare_name is not None:
        return lf.bare_name
    if style == "spaced":
        toks: list[str] = []
        for v in lf.lambdas:
            toks += ["LAMBDA", v, "."]
        for lemma, term in lf.definites:
            toks += ["*", lemma, "("] + _term_tokens(term) + [")", ";"]
        for i, atom in enumerate(lf.atoms):
            if i:
                toks.append("AND")
            toks += _atom_tokens(atom)
        return " ".join(toks)
    prefix = "".join(f"LAMBDA {v} . " for v in lf.lambdas)
    parts = [f"*{lemma}({_term_compact(term)})" for lemma, term in lf.definites]
    conj = " AND ".join(_atom_compact(a) for a in lf.atoms)
    if conj:
        parts.append(conj)
    return prefix + "; ".join(parts)


def detect_style(text: str) -> str | None:
    """Best-effort rendering detection; None when the row has no parentheses."""
    if "(" not in text:
        return None
    return "spaced" if " ( " in text else "compact"


# ---------------------------------------------------------------------------
# Split files


@dataclass
class Example:
    source: str
    target: str
    category: str

    def line(self) -> str:
        return f"{self.source}\t{self.target}\t{self.category}"


@dataclass
class SplitFile:
    rows: list[Example]
    split_name: str
    trailing_newline: bool = True
    lf_style: str = "spaced"

    def __len__(self) -> int:
        return len(self.rows)

    def with_rows(self, rows: list[Example]) -> "SplitFile":
        return replace(self, rows=rows)


def parse_split_file(data: bytes, split_name: str) -> SplitFile:
    """Parse a 3-column TSV split; malformed rows report 1-based line numbers."""
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise FormatError(f"not valid UTF-8: {exc}") from None
    lines = text.split("\n")
    trailing = False
    if lines and lines[-1] == "":
        trailing = True
        lines.pop()
    rows: list[Example] = []
    style: str | None = None
    for i, line in enumerate(lines, start=1):
        fields = line.split("\t")
        if len(fields) != 3:
            raise FormatError(f"expected 3 tab-separated fields, got {len(fields)}", line=i)
        source, target, category = fields
        if not source:
            raise FormatError("empty source sentence", line=i)
        if style is None:
            style = detect_style(target)
        rows.append(Example(source=source, target=target, category=category))
    return SplitFile(
        rows=rows,
        split_name=split_name,
        trailing_newline=trailing or not rows,
        lf_style=style or "spaced",
    )


def serialize_split_file(split: SplitFile) -> bytes:
    body = "\n".join(row.line() for row in split.rows)
    if split.rows and split.trailing_newline:
        body += "\n"
    return body.encode("utf-8")


def load_split(path, split_name: str | None = None) -> SplitFile:
    from pathlib import Path

    p = Path(path)
    name = split_name or p.stem
    return parse_split_file(p.read_bytes(), name)


def save_split(split: SplitFile, path) -> None:
    from pathlib import Path

    Path(path).write_bytes(serialize_split_file(split))


# ---------------------------------------------------------------------------
# Sentence token helpers

_FINAL_PUNCT = ".?!"


def source_tokens(source: str) -> list[str]:
    return source.split(" ")


def strip_final_punct(token: str) -> tuple[str, str]:
    """Split a word token into (word, trailing punctuation)."""
    i = len(token)
    while i > 0 and token[i - 1] in _FINAL_PUNCT:
        i -= 1
    return token[:i], token[i:]
