"""Compiler, move generation, terminal rules, playouts, functionality."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ludilite import (
    CompileError,
    Move,
    SemanticError,
    StructuralError,
    apply_move,
    check_functionality,
    compile_game,
    initial_state,
    legal_moves,
    random_playout,
    terminal_result,
    tokenize,
)
from ludilite.engine import EndRule, Full, Line
from ludilite.lexing import LexError
from ludilite.rng import SplitMix64

from ttt_oracle import exact_values


def game_text(players=2, board="(square 3)", ends=None, pieces='(piece "Disc" Each)'):
    ends = ends or "(if (is Line 3) (result Mover Win)) (if (is Full) (result All Draw))"
    return (
        f'(game "T" (players {players}) (equipment {{ (board {board}) {pieces} }}) '
        f"(rules (play (move Add (to (sites Empty)))) (end {ends})))"
    )


# --------------------------------------------------------------------------
# tokenize


def test_tokenize_simple():
    tokens = tokenize("(players 2)")
    assert [t.text for t in tokens] == ["(", "players", "2", ")"]
    assert [t.kind for t in tokens] == ["punct", "ident", "int", "punct"]


def test_tokenize_unterminated_string_offset():
    with pytest.raises(LexError) as err:
        tokenize('(game "Tic)')
    assert err.value.offset == 6


def test_tokenize_empty():
    assert tokenize("") == []


def test_tokenize_negative_int():
    assert [t.kind for t in tokenize("-12")] == ["int"]


# --------------------------------------------------------------------------
# compile


def test_compile_tictactoe(ttt_text):
    spec = compile_game(ttt_text)
    assert spec.name == "Tic-Tac-Toe"
    assert spec.num_players == 2
    assert (spec.rows, spec.cols) == (3, 3)
    assert spec.move_rule == "add-to-empty"
    assert spec.end_rules == (
        EndRule(Line(3), "Mover", "Win"),
        EndRule(Full(), "All", "Draw"),
    )


def test_compile_zero_players():
    with pytest.raises(SemanticError, match="players must be >= 1"):
        compile_game(game_text(players=0))


def test_compile_keyword_typo_offset():
    text = '(gmae "T" (players 2))'
    with pytest.raises(StructuralError) as err:
        compile_game(text)
    assert err.value.offset == 1


def test_compile_zero_board():
    with pytest.raises(SemanticError, match="board dimensions"):
        compile_game(game_text(board="(square 0)"))


def test_compile_missing_piece():
    with pytest.raises(SemanticError, match="at least one piece"):
        compile_game(game_text(pieces=""))


def test_compile_trailing_garbage():
    with pytest.raises(StructuralError, match="after game description"):
        compile_game(game_text() + " (extra)")


def test_compile_lexing_error_wrapped():
    with pytest.raises(CompileError, match="lexing error"):
        compile_game('(game "T')


def test_compile_deterministic(ttt_text):
    assert compile_game(ttt_text) == compile_game(ttt_text)


# --------------------------------------------------------------------------
# state transitions


def test_initial_state(ttt_text):
    spec = compile_game(ttt_text)
    state = initial_state(spec)
    assert state.occupancy == (0,) * 9
    assert state.mover == 1
    assert state.move_count == 0
    assert state.touched_sites == frozenset()


def test_legal_moves_counts(ttt_text):
    spec = compile_game(ttt_text)
    state = initial_state(spec)
    assert len(legal_moves(spec, state)) == 9
    for site in range(8):
        state = apply_move(spec, state, Move(site, state.mover))
    assert legal_moves(spec, state) == [Move(8, state.mover)]


def test_apply_move_rotates_mover_cyclically():
    spec = compile_game(game_text(players=3, board="(square 4)"))
    state = initial_state(spec)
    state = apply_move(spec, state, Move(0, 1))
    state = apply_move(spec, state, Move(1, 2))
    assert state.mover == 3
    state = apply_move(spec, state, Move(2, 3))
    assert state.mover == 1


def test_apply_move_is_pure(ttt_text):
    spec = compile_game(ttt_text)
    state = initial_state(spec)
    before = (state.occupancy, state.mover, state.move_count, state.touched_sites)
    apply_move(spec, state, Move(4, 1))
    assert (state.occupancy, state.mover, state.move_count, state.touched_sites) == before


def test_apply_move_rejects_occupied_and_out_of_range(ttt_text):
    from ludilite import IllegalMoveError

    spec = compile_game(ttt_text)
    state = apply_move(spec, initial_state(spec), Move(4, 1))
    with pytest.raises(IllegalMoveError):
        apply_move(spec, state, Move(4, 2))
    with pytest.raises(IllegalMoveError):
        apply_move(spec, state, Move(9, 2))


def test_terminal_row_win(ttt_text):
    spec = compile_game(ttt_text)
    state = initial_state(spec)
    for site in (0, 3, 1, 4, 2):  # P1 fills the top row
        state = apply_move(spec, state, Move(site, state.mover))
    result = terminal_result(spec, state)
    assert result.kind == "win" and result.winner == 1


def test_terminal_full_draw():
    spec = compile_game(game_text(board="(square 2)"))  # line 3 unreachable
    state = initial_state(spec)
    for site in range(4):
        state = apply_move(spec, state, Move(site, state.mover))
    assert terminal_result(spec, state).kind == "draw"


def test_terminal_none_on_empty_board(ttt_text):
    spec = compile_game(ttt_text)
    assert terminal_result(spec, initial_state(spec)) is None


def test_mover_loss_crowns_opponent():
    spec = compile_game(game_text(ends="(if (is Line 3) (result Mover Loss))"))
    state = initial_state(spec)
    for site in (0, 3, 1, 4, 2):  # P1 completes a line and loses
        state = apply_move(spec, state, Move(site, state.mover))
    result = terminal_result(spec, state)
    assert result.kind == "win" and result.winner == 2


# --------------------------------------------------------------------------
# playouts


def test_playout_deterministic(ttt_text):
    spec = compile_game(ttt_text)
    assert random_playout(spec, 42, 250) == random_playout(spec, 42, 250)


def test_playout_lengths_match_oracle_bounds(ttt_text):
    spec = compile_game(ttt_text)
    exact = exact_values()
    for seed in range(200):
        trace = random_playout(spec, seed, 250)
        assert exact["min_length"] <= len(trace.moves) <= exact["max_length"]
        assert trace.outcome.kind != "timeout"
        assert len(trace.decision_points) == len(trace.moves)
        assert all(d >= 1 for d in trace.decision_points)


def test_playout_respects_turn_cap(ttt_text):
    spec = compile_game(ttt_text)
    trace = random_playout(spec, 7, max_turns=3)
    assert len(trace.moves) == 3
    assert trace.outcome.kind == "timeout"


def test_playout_conservation(ttt_text):
    # occupied sites == move count in every reachable state
    spec = compile_game(ttt_text)
    for seed in range(30):
        trace = random_playout(spec, seed, 250)
        state = initial_state(spec)
        for site, player in trace.moves:
            state = apply_move(spec, state, Move(site, player))
            occupied = sum(1 for o in state.occupancy if o)
            assert occupied == state.move_count
            assert state.touched_sites == frozenset(
                i for i, o in enumerate(state.occupancy) if o
            )


def test_playout_terminal_agrees_with_replay(ttt_text):
    # the trace ends exactly where the public terminal check first fires
    spec = compile_game(ttt_text)
    for seed in range(50):
        trace = random_playout(spec, seed, 250)
        state = initial_state(spec)
        for i, (site, player) in enumerate(trace.moves):
            state = apply_move(spec, state, Move(site, player))
            result = terminal_result(spec, state)
            if i < len(trace.moves) - 1:
                assert result is None
            else:
                assert result == trace.outcome


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**64 - 1))
def test_playout_outcomes_are_wins_or_draws_for_ttt(ttt_text, seed):
    spec = compile_game(ttt_text)
    trace = random_playout(spec, seed, 250)
    assert trace.outcome.kind in ("win", "draw")
    assert trace.final_touched == len(trace.moves)


# --------------------------------------------------------------------------
# functionality


def test_tictactoe_functional(ttt_text):
    spec = compile_game(ttt_text)
    assert check_functionality(spec) == (True, None)


def test_unsatisfiable_line_without_full_is_stalemate():
    spec = compile_game(game_text(ends="(if (is Line 5) (result Mover Win))"))
    functional, reason = check_functionality(spec)
    assert not functional
    assert reason == "stalemate-without-end"


def test_tiny_turn_cap_reports_never_terminates(ttt_text):
    spec = compile_game(ttt_text)
    functional, reason = check_functionality(spec, max_turns=3)
    assert not functional
    assert reason == "never-terminates"


def test_one_site_board_stalls_within_cap():
    # 1x1 board, unreachable line, no Full rule: one move then dead
    spec = compile_game(
        game_text(players=1, board="(square 1)",
                  ends="(if (is Line 2) (result Mover Win))")
    )
    trace = random_playout(spec, 0, max_turns=250)
    assert len(trace.moves) == 1
    assert trace.outcome.kind == "timeout"
    assert not check_functionality(spec).functional


# --------------------------------------------------------------------------
# rng


def test_splitmix64_reference_sequence():
    # Published first outputs for seed 0.
    rng = SplitMix64(0)
    assert rng.next_u64() == 0xE220A8397B1DCDAF
    assert rng.next_u64() == 0x6E789E6AA1B965F4
    assert rng.next_u64() == 0x06C45D188009454F


def test_randbelow_uniform_range():
    rng = SplitMix64(123)
    draws = [rng.randbelow(7) for _ in range(2000)]
    assert set(draws) == set(range(7))
