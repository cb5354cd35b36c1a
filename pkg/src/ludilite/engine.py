"""LudiLite game engine: compile descriptions, generate moves, run playouts.

The language covers placement games: players take turns adding a piece to
an empty site of a rectangular grid, and ordered end rules award the game
on k-in-a-row lines or a full board. The compiler here is an independent
recursive-descent parser; whether a text is accepted by the configured
grammar and whether it compiles are deliberately separate questions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .lexing import IDENT, INT, LexError, PUNCT, STRING, Token
from .lexing import string_value, tokenize
from .rng import SplitMix64

EACH = "Each"
SHARED = "Shared"
MOVER = "Mover"
ALL = "All"
WIN = "Win"
LOSS = "Loss"
DRAW = "Draw"

DEFAULT_MAX_TURNS = 250
DEFAULT_PROBE_SEEDS = tuple(range(10))


class CompileError(Exception):
    """A description failed to compile (lexing, structure, or semantics)."""

    def __init__(self, message: str, offset: int | None = None):
        loc = f" (offset {offset})" if offset is not None else ""
        super().__init__(message + loc)
        self.message = message
        self.offset = offset


class StructuralError(CompileError):
    pass


class SemanticError(CompileError):
    pass


class IllegalMoveError(Exception):
    pass


@dataclass(frozen=True)
class Line:
    length: int


@dataclass(frozen=True)
class Full:
    pass


@dataclass(frozen=True)
class EndRule:
    condition: Line | Full
    role: str  # Mover | All
    outcome: str  # Win | Loss | Draw


@dataclass(frozen=True)
class Piece:
    name: str
    ownership: str  # Each | Shared; recorded but not behavioral in this subset


@dataclass(frozen=True)
class GameSpec:
    name: str
    num_players: int
    rows: int
    cols: int
    pieces: tuple[Piece, ...]
    end_rules: tuple[EndRule, ...]
    move_rule: str = "add-to-empty"

    @property
    def num_sites(self) -> int:
        return self.rows * self.cols


@dataclass(frozen=True)
class GameState:
    occupancy: tuple[int, ...]  # 0 = empty, else owning player index
    mover: int
    move_count: int
    touched_sites: frozenset[int]


class Move(NamedTuple):
    site: int
    player: int


@dataclass(frozen=True)
class Outcome:
    kind: str  # "win" | "draw" | "timeout"
    winner: int | None = None

    @staticmethod
    def win(player: int) -> "Outcome":
        return Outcome("win", player)

    @staticmethod
    def draw() -> "Outcome":
        return Outcome("draw")

    @staticmethod
    def timeout() -> "Outcome":
        return Outcome("timeout")


@dataclass(frozen=True)
class PlayoutTrace:
    moves: tuple[tuple[int, int], ...]  # (site, player)
    decision_points: tuple[int, ...]  # legal-move count before each move
    outcome: Outcome
    final_touched: int
    seed: int


class FunctionalityResult(NamedTuple):
    functional: bool
    reason: str | None  # no-initial-moves | stalemate-without-end | never-terminates


# --------------------------------------------------------------------------
# Compilation


class _Cursor:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self, what: str) -> Token:
        tok = self.peek()
        if tok is None:
            raise StructuralError(f"unexpected end of input, expected {what}")
        self.pos += 1
        return tok

    def expect_punct(self, text: str) -> Token:
        tok = self.next(f"'{text}'")
        if tok.kind != PUNCT or tok.text != text:
            raise StructuralError(f"expected '{text}', found {tok.text!r}", tok.start)
        return tok

    def expect_keyword(self, word: str) -> Token:
        tok = self.next(f"keyword '{word}'")
        if tok.kind != IDENT or tok.text != word:
            raise StructuralError(f"expected keyword '{word}', found {tok.text!r}", tok.start)
        return tok

    def expect_string(self, what: str) -> str:
        tok = self.next(f"{what} string")
        if tok.kind != STRING:
            raise StructuralError(f"expected quoted {what}, found {tok.text!r}", tok.start)
        return string_value(tok)

    def expect_int(self, what: str) -> tuple[int, Token]:
        tok = self.next(f"{what} integer")
        if tok.kind != INT:
            raise StructuralError(f"expected integer {what}, found {tok.text!r}", tok.start)
        return int(tok.text), tok

    def expect_one_of(self, words: Sequence[str], what: str) -> Token:
        tok = self.next(what)
        if tok.kind != IDENT or tok.text not in words:
            raise StructuralError(
                f"expected one of {'/'.join(words)} for {what}, found {tok.text!r}",
                tok.start,
            )
        return tok


def compile_game(text: str) -> GameSpec:
    """Compile a LudiLite description into a :class:`GameSpec`.

    Raises :class:`CompileError` (lexing failures are wrapped, structural
    and semantic problems use the matching subclass).
    """
    try:
        tokens = tokenize(text)
    except LexError as e:
        raise CompileError(f"lexing error: {e.message}", e.offset) from e
    cur = _Cursor(tokens)
    cur.expect_punct("(")
    cur.expect_keyword("game")
    name = cur.expect_string("game name")
    num_players = _parse_players(cur)
    rows, cols, pieces = _parse_equipment(cur)
    end_rules = _parse_rules(cur)
    cur.expect_punct(")")
    trailing = cur.peek()
    if trailing is not None:
        raise StructuralError(
            f"unexpected token {trailing.text!r} after game description", trailing.start
        )
    return GameSpec(
        name=name,
        num_players=num_players,
        rows=rows,
        cols=cols,
        pieces=pieces,
        end_rules=end_rules,
    )


def _parse_players(cur: _Cursor) -> int:
    cur.expect_punct("(")
    cur.expect_keyword("players")
    count, tok = cur.expect_int("player count")
    if count < 1:
        raise SemanticError("players must be >= 1", tok.start)
    cur.expect_punct(")")
    return count


def _parse_equipment(cur: _Cursor) -> tuple[int, int, tuple[Piece, ...]]:
    cur.expect_punct("(")
    cur.expect_keyword("equipment")
    cur.expect_punct("{")
    board: tuple[int, int] | None = None
    pieces: list[Piece] = []
    while True:
        tok = cur.peek()
        if tok is not None and tok.kind == PUNCT and tok.text == "}":
            cur.next("'}'")
            break
        open_tok = cur.expect_punct("(")
        head = cur.expect_one_of(("board", "piece"), "equipment item")
        if head.text == "board":
            if board is not None:
                raise SemanticError("duplicate board", open_tok.start)
            board = _parse_board_shape(cur)
            cur.expect_punct(")")
        else:
            name = cur.expect_string("piece name")
            ownership = cur.expect_one_of((EACH, SHARED), "piece ownership").text
            cur.expect_punct(")")
            pieces.append(Piece(name, ownership))
    cur.expect_punct(")")
    if board is None:
        raise SemanticError("equipment must declare a board")
    if not pieces:
        raise SemanticError("equipment must declare at least one piece")
    return board[0], board[1], tuple(pieces)


def _parse_board_shape(cur: _Cursor) -> tuple[int, int]:
    cur.expect_punct("(")
    head = cur.expect_one_of(("square", "rectangle"), "board shape")
    if head.text == "square":
        n, tok = cur.expect_int("board size")
        if n < 1:
            raise SemanticError("board dimensions must be >= 1", tok.start)
        shape = (n, n)
    else:
        m, tok_m = cur.expect_int("board rows")
        n, tok_n = cur.expect_int("board cols")
        if m < 1:
            raise SemanticError("board dimensions must be >= 1", tok_m.start)
        if n < 1:
            raise SemanticError("board dimensions must be >= 1", tok_n.start)
        shape = (m, n)
    cur.expect_punct(")")
    return shape


def _parse_rules(cur: _Cursor) -> tuple[EndRule, ...]:
    cur.expect_punct("(")
    cur.expect_keyword("rules")
    # (play (move Add (to (sites Empty))))
    cur.expect_punct("(")
    cur.expect_keyword("play")
    cur.expect_punct("(")
    cur.expect_keyword("move")
    cur.expect_keyword("Add")
    cur.expect_punct("(")
    cur.expect_keyword("to")
    cur.expect_punct("(")
    cur.expect_keyword("sites")
    cur.expect_keyword("Empty")
    cur.expect_punct(")")
    cur.expect_punct(")")
    cur.expect_punct(")")
    cur.expect_punct(")")
    # (end (if <condition> <result>)+)
    cur.expect_punct("(")
    cur.expect_keyword("end")
    rules: list[EndRule] = []
    while True:
        tok = cur.peek()
        if tok is not None and tok.kind == PUNCT and tok.text == ")":
            cur.next("')'")
            break
        rules.append(_parse_end_rule(cur))
    if not rules:
        raise SemanticError("end clause must declare at least one rule")
    cur.expect_punct(")")
    return tuple(rules)


def _parse_end_rule(cur: _Cursor) -> EndRule:
    cur.expect_punct("(")
    cur.expect_keyword("if")
    cur.expect_punct("(")
    cur.expect_keyword("is")
    head = cur.expect_one_of(("Line", "Full"), "end condition")
    condition: Line | Full
    if head.text == "Line":
        k, tok = cur.expect_int("line length")
        if k < 1:
            raise SemanticError("line length must be >= 1", tok.start)
        condition = Line(k)
    else:
        condition = Full()
    cur.expect_punct(")")
    cur.expect_punct("(")
    cur.expect_keyword("result")
    role = cur.expect_one_of((MOVER, ALL), "result role").text
    outcome = cur.expect_one_of((WIN, LOSS, DRAW), "result outcome").text
    cur.expect_punct(")")
    cur.expect_punct(")")
    return EndRule(condition, role, outcome)


# --------------------------------------------------------------------------
# Play


def initial_state(spec: GameSpec) -> GameState:
    return GameState(
        occupancy=(0,) * spec.num_sites,
        mover=1,
        move_count=0,
        touched_sites=frozenset(),
    )


def legal_moves(spec: GameSpec, state: GameState) -> list[Move]:
    """One Add move per empty site for the current mover, row-major order."""
    mover = state.mover
    return [Move(site, mover) for site, owner in enumerate(state.occupancy) if owner == 0]


def apply_move(spec: GameSpec, state: GameState, move: Move) -> GameState:
    if not 0 <= move.site < spec.num_sites:
        raise IllegalMoveError(f"site {move.site} out of range")
    if state.occupancy[move.site] != 0:
        raise IllegalMoveError(f"site {move.site} already occupied")
    if move.player != state.mover:
        raise IllegalMoveError(f"player {move.player} is not the mover")
    occ = list(state.occupancy)
    occ[move.site] = state.mover
    return GameState(
        occupancy=tuple(occ),
        mover=state.mover % spec.num_players + 1,
        move_count=state.move_count + 1,
        touched_sites=state.touched_sites | {move.site},
    )


def _previous_mover(spec: GameSpec, state: GameState) -> int:
    return (state.mover - 2) % spec.num_players + 1


_DIRECTIONS = ((0, 1), (1, 0), (1, 1), (1, -1))


def _run_through(spec: GameSpec, occ: tuple[int, ...], site: int, player: int) -> int:
    """Longest run of the player's pieces through ``site``, over 4 directions."""
    row, col = divmod(site, spec.cols)
    best = 0
    for dr, dc in _DIRECTIONS:
        run = 1
        for sign in (1, -1):
            r, c = row + sign * dr, col + sign * dc
            while 0 <= r < spec.rows and 0 <= c < spec.cols and occ[r * spec.cols + c] == player:
                run += 1
                r += sign * dr
                c += sign * dc
        best = max(best, run)
    return best


def _has_line(spec: GameSpec, state: GameState, player: int, k: int) -> bool:
    occ = state.occupancy
    for site, owner in enumerate(occ):
        if owner == player and _run_through(spec, occ, site, player) >= k:
            return True
    return False


def _rule_outcome(rule: EndRule, prev_mover: int, spec: GameSpec) -> Outcome:
    if rule.role == ALL:
        # A shared result names no single winner.
        return Outcome.draw()
    if rule.outcome == WIN:
        return Outcome.win(prev_mover)
    if rule.outcome == LOSS:
        # The mover losing crowns the opponent in two-player games; with
        # more players there is no single winner, so record a draw.
        if spec.num_players == 2:
            return Outcome.win(prev_mover % 2 + 1)
        return Outcome.draw()
    return Outcome.draw()


def _check_end_rules(
    spec: GameSpec, state: GameState, line_test
) -> Outcome | None:
    prev = _previous_mover(spec, state)
    board_full = all(owner != 0 for owner in state.occupancy)
    for rule in spec.end_rules:
        if isinstance(rule.condition, Line):
            satisfied = line_test(prev, rule.condition.length)
        else:
            satisfied = board_full
        if satisfied:
            return _rule_outcome(rule, prev, spec)
    return None


def terminal_result(spec: GameSpec, state: GameState) -> Outcome | None:
    """First satisfied end rule, in declaration order, else None.

    Line conditions refer to the player who just moved; a state with no
    moves yet is never terminal.
    """
    if state.move_count == 0:
        return None
    return _check_end_rules(
        spec, state, lambda player, k: _has_line(spec, state, player, k)
    )


def _terminal_after_move(spec: GameSpec, state: GameState, last_site: int) -> Outcome | None:
    """Same as terminal_result for states reached by applying last_site.

    Only the just-placed piece can complete a new line, so the line check
    scans the four directions through it.
    """
    occ = state.occupancy
    return _check_end_rules(
        spec,
        state,
        lambda player, k: occ[last_site] == player
        and _run_through(spec, occ, last_site, player) >= k,
    )


def random_playout(spec: GameSpec, seed: int, max_turns: int = DEFAULT_MAX_TURNS) -> PlayoutTrace:
    """Play uniformly random moves until an end rule fires, the mover has no
    moves (recorded as a timeout), or ``max_turns`` is reached."""
    if max_turns < 1:
        raise ValueError("max_turns must be >= 1")
    rng = SplitMix64(seed)
    state = initial_state(spec)
    moves: list[tuple[int, int]] = []
    decision_points: list[int] = []
    outcome = Outcome.timeout()
    for _ in range(max_turns):
        legal = legal_moves(spec, state)
        if not legal:
            break  # stalemate with no end rule fired
        decision_points.append(len(legal))
        move = legal[rng.randbelow(len(legal))]
        state = apply_move(spec, state, move)
        moves.append((move.site, move.player))
        result = _terminal_after_move(spec, state, move.site)
        if result is not None:
            outcome = result
            break
    return PlayoutTrace(
        moves=tuple(moves),
        decision_points=tuple(decision_points),
        outcome=outcome,
        final_touched=len(state.touched_sites),
        seed=seed,
    )


def check_functionality(
    spec: GameSpec,
    probe_seeds: Sequence[int] = DEFAULT_PROBE_SEEDS,
    max_turns: int = DEFAULT_MAX_TURNS,
) -> FunctionalityResult:
    """Whether a compiled game is playable.

    Functional means the initial state offers a move, no probe playout hits
    a dead non-terminal state, and at least one probe ends in a real result
    rather than running out the turn cap.
    """
    if not legal_moves(spec, initial_state(spec)):
        return FunctionalityResult(False, "no-initial-moves")
    traces = [random_playout(spec, seed, max_turns) for seed in probe_seeds]
    for trace in traces:
        if trace.outcome.kind == "timeout" and len(trace.moves) < max_turns:
            return FunctionalityResult(False, "stalemate-without-end")
    if all(trace.outcome.kind == "timeout" for trace in traces):
        return FunctionalityResult(False, "never-terminates")
    return FunctionalityResult(True, None)


__all__ = [
    "ALL",
    "CompileError",
    "DEFAULT_MAX_TURNS",
    "DRAW",
    "EACH",
    "EndRule",
    "Full",
    "FunctionalityResult",
    "GameSpec",
    "GameState",
    "IllegalMoveError",
    "Line",
    "LOSS",
    "MOVER",
    "Move",
    "Outcome",
    "Piece",
    "PlayoutTrace",
    "SemanticError",
    "SHARED",
    "StructuralError",
    "WIN",
    "apply_move",
    "check_functionality",
    "compile_game",
    "initial_state",
    "legal_moves",
    "random_playout",
    "terminal_result",
    "tokenize",
]
