"""Context-free grammar loading and longest-valid-prefix recognition.

The recognizer is a token-level Earley chart parser. The grammar reward for
a candidate text is the fraction of its characters covered by the longest
viable prefix, i.e. the longest leading slice after which the chart can
still advance toward some sentence of the grammar.

Grammar file format (UTF-8):

    # comment
    lhs := sym sym ... | sym ...

One production per line; ``|`` separates alternatives; the same lhs may
appear on several lines. Terminals are double-quoted literals or the class
names ``STRING`` and ``INT``; any other bare name is a nonterminal. The
first production's left-hand side is the start symbol.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import NamedTuple, Union

from .lexing import IDENT, INT, PUNCT, PUNCT_CHARS, STRING, Token, tokenize_prefix


@dataclass(frozen=True)
class NonTerminal:
    name: str


@dataclass(frozen=True)
class Literal:
    text: str


@dataclass(frozen=True)
class TokenClass:
    name: str  # "INT" or "STRING"


Symbol = Union[NonTerminal, Literal, TokenClass]


@dataclass(frozen=True)
class Production:
    lhs: str
    rhs: tuple[Symbol, ...]


class GrammarError(Exception):
    """Problem in a grammar file: syntax, undefined or dead symbols."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", col {col}" if col is not None else "") + ")"
        super().__init__(message + loc)
        self.line = line
        self.col = col


class Grammar:
    """Immutable grammar: productions, start symbol, derived index tables."""

    def __init__(self, productions: list[Production], start_symbol: str):
        if not productions:
            raise GrammarError("empty grammar: no productions")
        self.productions: tuple[Production, ...] = tuple(productions)
        self.start_symbol = start_symbol
        self.by_lhs: dict[str, list[int]] = {}
        for idx, prod in enumerate(self.productions):
            self.by_lhs.setdefault(prod.lhs, []).append(idx)
        self._validate()
        self.nullable: frozenset[str] = self._compute_nullable()

    @property
    def terminals(self) -> frozenset[Symbol]:
        return frozenset(
            sym
            for prod in self.productions
            for sym in prod.rhs
            if not isinstance(sym, NonTerminal)
        )

    def _validate(self) -> None:
        if self.start_symbol not in self.by_lhs:
            raise GrammarError(f"start symbol {self.start_symbol!r} has no production")
        for prod in self.productions:
            for sym in prod.rhs:
                if isinstance(sym, NonTerminal) and sym.name not in self.by_lhs:
                    raise GrammarError(f"undefined nonterminal {sym.name!r}")
                if isinstance(sym, Literal) and not _valid_literal(sym.text):
                    raise GrammarError(
                        f"literal {sym.text!r} collides with a token class; "
                        "literals must be keywords or one of ( ) {{ }}"
                    )
        # Viable-prefix semantics needs every nonterminal to derive at least
        # one finite terminal string; reject dead symbols up front.
        productive: set[str] = set()
        changed = True
        while changed:
            changed = False
            for prod in self.productions:
                if prod.lhs in productive:
                    continue
                if all(
                    not isinstance(s, NonTerminal) or s.name in productive
                    for s in prod.rhs
                ):
                    productive.add(prod.lhs)
                    changed = True
        dead = sorted(set(self.by_lhs) - productive)
        if dead:
            raise GrammarError(f"unproductive nonterminal(s): {', '.join(dead)}")

    def _compute_nullable(self) -> frozenset[str]:
        nullable: set[str] = set()
        changed = True
        while changed:
            changed = False
            for prod in self.productions:
                if prod.lhs in nullable:
                    continue
                if all(isinstance(s, NonTerminal) and s.name in nullable for s in prod.rhs):
                    nullable.add(prod.lhs)
                    changed = True
        return frozenset(nullable)


def _valid_literal(text: str) -> bool:
    if text in PUNCT_CHARS and len(text) == 1:
        return True
    if not text:
        return False
    if not (text[0].isalpha() or text[0] == "_"):
        return False
    return all(ch.isalnum() or ch == "_" for ch in text)


def _parse_symbol(word: str, line_no: int, col: int) -> Symbol:
    if word.startswith('"'):
        if len(word) < 2 or not word.endswith('"'):
            raise GrammarError(f"malformed literal {word}", line_no, col)
        return Literal(word[1:-1])
    if word in ("INT", "STRING"):
        return TokenClass(word)
    if not (word[0].isalpha() or word[0] == "_") or not all(
        ch.isalnum() or ch == "_" for ch in word
    ):
        raise GrammarError(f"malformed symbol {word!r}", line_no, col)
    return NonTerminal(word)


def _split_rhs_words(rhs: str, line_no: int, col0: int) -> list[tuple[str, int]]:
    """Split a right-hand side into words, keeping quoted literals intact."""
    words: list[tuple[str, int]] = []
    i = 0
    n = len(rhs)
    while i < n:
        ch = rhs[i]
        if ch.isspace():
            i += 1
            continue
        start = i
        if ch == '"':
            i += 1
            while i < n and rhs[i] != '"':
                i += 1
            if i >= n:
                raise GrammarError("unterminated literal", line_no, col0 + start + 1)
            i += 1
        else:
            while i < n and not rhs[i].isspace():
                i += 1
        words.append((rhs[start:i], col0 + start + 1))
    return words


def _strip_comment(line: str) -> str:
    in_string = False
    for i, ch in enumerate(line):
        if ch == '"':
            in_string = not in_string
        elif ch == "#" and not in_string:
            return line[:i]
    return line


def load_grammar(source: str) -> Grammar:
    """Parse grammar-file text into a validated :class:`Grammar`."""
    productions: list[Production] = []
    start: str | None = None
    for line_no, raw in enumerate(source.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        if ":=" not in line:
            raise GrammarError("expected 'lhs := ...'", line_no, 1)
        lhs_part, rhs_part = line.split(":=", 1)
        lhs = lhs_part.strip()
        if not lhs or not (lhs[0].isalpha() or lhs[0] == "_") or not all(
            ch.isalnum() or ch == "_" for ch in lhs
        ):
            raise GrammarError(f"malformed left-hand side {lhs!r}", line_no, 1)
        if start is None:
            start = lhs
        col0 = raw.find(":=") + 2
        for alt in rhs_part.split("|"):
            words = _split_rhs_words(alt, line_no, col0)
            rhs = tuple(_parse_symbol(w, line_no, c) for w, c in words)
            productions.append(Production(lhs, rhs))
    if start is None:
        raise GrammarError("empty grammar: no productions")
    return Grammar(productions, start)


def load_grammar_path(path) -> Grammar:
    with open(path, "r", encoding="utf-8") as f:
        return load_grammar(f.read())


@lru_cache(maxsize=1)
def default_grammar() -> Grammar:
    """The LudiLite placement-game grammar shipped with the package."""
    text = (resources.files("ludilite") / "data" / "ludilite.grammar").read_text("utf-8")
    return load_grammar(text)


# --------------------------------------------------------------------------
# Earley recognition


class _Item(NamedTuple):
    prod: int
    dot: int
    origin: int


class _Chart:
    __slots__ = ("items", "_seen", "wanting")

    def __init__(self) -> None:
        self.items: list[_Item] = []
        self._seen: set[_Item] = set()
        # nonterminal name -> items in this chart whose next symbol is it
        self.wanting: dict[str, list[_Item]] = {}

    def add(self, item: _Item) -> bool:
        if item in self._seen:
            return False
        self._seen.add(item)
        self.items.append(item)
        return True


def _matches(sym: Symbol, tok: Token) -> bool:
    if isinstance(sym, Literal):
        return tok.kind in (IDENT, PUNCT) and tok.text == sym.text
    if isinstance(sym, TokenClass):
        return tok.kind == (INT if sym.name == "INT" else STRING)
    return False


class _EarleyState:
    """A recognizer mid-scan. Past charts are immutable, so forks share them."""

    def __init__(self, grammar: Grammar):
        self.grammar = grammar
        chart = _Chart()
        for idx in grammar.by_lhs[grammar.start_symbol]:
            chart.add(_Item(idx, 0, 0))
        self.charts: list[_Chart] = [chart]
        self._close(0)

    def _close(self, pos: int) -> None:
        g = self.grammar
        chart = self.charts[pos]
        i = 0
        while i < len(chart.items):
            item = chart.items[i]
            i += 1
            prod = g.productions[item.prod]
            if item.dot < len(prod.rhs):
                sym = prod.rhs[item.dot]
                if isinstance(sym, NonTerminal):
                    chart.wanting.setdefault(sym.name, []).append(item)
                    for pidx in g.by_lhs[sym.name]:
                        chart.add(_Item(pidx, 0, pos))
                    # nullable shortcut: the predicted symbol may vanish
                    if sym.name in g.nullable:
                        chart.add(_Item(item.prod, item.dot + 1, item.origin))
            else:
                for waiting in self.charts[item.origin].wanting.get(prod.lhs, ()):
                    chart.add(_Item(waiting.prod, waiting.dot + 1, waiting.origin))

    def expected_terminals(self) -> list[Symbol]:
        chart = self.charts[-1]
        out: list[Symbol] = []
        seen: set[Symbol] = set()
        for item in chart.items:
            prod = self.grammar.productions[item.prod]
            if item.dot < len(prod.rhs):
                sym = prod.rhs[item.dot]
                if not isinstance(sym, NonTerminal) and sym not in seen:
                    seen.add(sym)
                    out.append(sym)
        return out

    def scan(self, tok: Token) -> bool:
        src = self.charts[-1]
        nxt = _Chart()
        for item in src.items:
            prod = self.grammar.productions[item.prod]
            if item.dot < len(prod.rhs) and _matches(prod.rhs[item.dot], tok):
                nxt.add(_Item(item.prod, item.dot + 1, item.origin))
        if not nxt.items:
            return False
        self.charts.append(nxt)
        self._close(len(self.charts) - 1)
        return True

    def accepted(self) -> bool:
        g = self.grammar
        for item in self.charts[-1].items:
            prod = g.productions[item.prod]
            if prod.lhs == g.start_symbol and item.dot == len(prod.rhs) and item.origin == 0:
                return True
        return False

    def fork(self) -> "_EarleyState":
        clone = object.__new__(_EarleyState)
        clone.grammar = self.grammar
        clone.charts = list(self.charts)
        return clone


class FailurePoint(NamedTuple):
    text: str
    offset: int


@dataclass(frozen=True)
class ValidPrefixResult:
    consumed_chars: int
    total_chars: int
    accepted: bool
    failure_token: FailurePoint | None = None


# Partial matches of a single terminal during the character-level
# continuation at a scan failure. A match may be complete (the characters
# so far form the whole terminal) and/or extensible (more characters could
# still belong to it, e.g. further digits of an INT).


class _LitMatch(NamedTuple):
    sym: Literal
    count: int

    def step(self, ch: str):
        text = self.sym.text
        if self.count < len(text) and text[self.count] == ch:
            return _LitMatch(self.sym, self.count + 1)
        return None

    @property
    def complete(self) -> bool:
        return self.count == len(self.sym.text)

    @property
    def extensible(self) -> bool:
        return self.count < len(self.sym.text)

    def token(self, start: int) -> Token:
        kind = PUNCT if self.sym.text in PUNCT_CHARS else IDENT
        return Token(kind, self.sym.text, start, start + self.count)


class _IntMatch(NamedTuple):
    text: str

    def step(self, ch: str):
        if ch.isdigit():
            return _IntMatch(self.text + ch)
        return None

    @property
    def complete(self) -> bool:
        return any(c.isdigit() for c in self.text)

    @property
    def extensible(self) -> bool:
        return True

    def token(self, start: int) -> Token:
        return Token(INT, self.text, start, start + len(self.text))


class _StrMatch(NamedTuple):
    text: str
    closed: bool

    def step(self, ch: str):
        if self.closed:
            return None
        if ch == '"':
            return _StrMatch(self.text + ch, True)
        return _StrMatch(self.text + ch, False)

    @property
    def complete(self) -> bool:
        return self.closed

    @property
    def extensible(self) -> bool:
        return not self.closed

    def token(self, start: int) -> Token:
        return Token(STRING, self.text, start, start + len(self.text))


def _start_match(sym: Symbol, ch: str):
    if isinstance(sym, Literal):
        return _LitMatch(sym, 0).step(ch)
    if isinstance(sym, TokenClass):
        if sym.name == "INT":
            if ch.isdigit() or ch == "-":
                return _IntMatch(ch)
            return None
        if ch == '"':
            return _StrMatch(ch, False)
    return None


def _match_len(match) -> int:
    if isinstance(match, _LitMatch):
        return match.count
    return len(match.text)


def _char_continuation(
    state: _EarleyState, text: str, start: int, limit: int
) -> int:
    """Best consumable offset past ``start`` at a token-scan failure.

    The failing token may be a maximal-munch merge of several terminals
    (e.g. ``ab`` where the grammar expects ``a`` then ``b``), so terminals
    are rebuilt character by character, advancing a forked chart whenever
    one completes. Only completed-terminal boundaries count as consumed,
    except that a branch still alive at end of input having crossed only
    whitespace since its last terminal makes the whole input viable.
    """
    best = start
    branches: list[tuple[_EarleyState, object | None]] = [(state, None)]
    p = start
    while p < limit and branches:
        ch = text[p]
        nxt: list[tuple[_EarleyState, object | None]] = []
        for st, match in branches:
            candidates = []
            if match is None:
                if ch.isspace():
                    nxt.append((st, None))
                    continue
                for term in st.expected_terminals():
                    m = _start_match(term, ch)
                    if m is not None:
                        candidates.append(m)
            else:
                m = match.step(ch)  # type: ignore[union-attr]
                if m is not None:
                    candidates.append(m)
            for m in candidates:
                if m.complete:
                    forked = st.fork()
                    if forked.scan(m.token(p + 1 - _match_len(m))):
                        best = p + 1
                        nxt.append((forked, None))
                if m.extensible:
                    nxt.append((st, m))
        branches = nxt
        p += 1
    if branches and limit == len(text) and any(m is None for _, m in branches):
        return limit
    return best


def recognize(grammar: Grammar, text: str) -> ValidPrefixResult:
    """Longest viable prefix of ``text`` under ``grammar``.

    Never raises: malformed input simply yields a short consumed span.
    ``accepted`` is true only when the whole input is a complete sentence.
    """
    total = len(text)
    tokens, lex_err = tokenize_prefix(text)
    state = _EarleyState(grammar)
    scanned_end = 0
    for tok in tokens:
        if not state.scan(tok):
            # Whitespace ahead of the failed token is not consumed; the
            # continuation skips it while rebuilding terminals by character.
            limit = lex_err.offset if lex_err is not None else total
            consumed = _char_continuation(state, text, scanned_end, limit)
            return ValidPrefixResult(consumed, total, False, FailurePoint(tok.text, tok.start))
        scanned_end = tok.end
    if lex_err is not None:
        consumed = tokens[-1].end if tokens else 0
        snippet = text[lex_err.offset : lex_err.offset + 12]
        return ValidPrefixResult(consumed, total, False, FailurePoint(snippet, lex_err.offset))
    return ValidPrefixResult(total, total, state.accepted(), None)


def grammar_reward(grammar: Grammar, candidate: str) -> float:
    """Fraction of the candidate's characters forming a viable prefix."""
    if len(candidate) == 0:
        return 0.0
    result = recognize(grammar, candidate)
    return result.consumed_chars / result.total_chars
