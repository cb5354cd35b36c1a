"""Playout batches and concept extraction."""

import pytest

from ludilite import compile_game, extract_concepts, run_playouts
from ludilite.concepts import EmptyStatsError, aligned_vectors

from ttt_oracle import exact_values

SOLO = (
    '(game "Fill" (players 1) (equipment { (board (square 2)) (piece "C" Each) }) '
    "(rules (play (move Add (to (sites Empty)))) (end (if (is Full) (result Mover Win)))))"
)


@pytest.fixture(scope="module")
def ttt_spec(corpus):
    text = next(i.description for i in corpus if i.id == "tic-tac-toe")
    return compile_game(text)


def test_accounting_identity(ttt_spec):
    stats = run_playouts(ttt_spec, 25, base_seed=3)
    assert stats.wins_per_player == (stats.wins_per_player[0], stats.wins_per_player[1])
    total = sum(stats.wins_per_player) + stats.draws + stats.timeouts
    assert total == stats.completed_playouts == 25
    assert stats.completed_playouts <= stats.requested
    assert not stats.budget_exceeded


def test_zero_budget_completes_nothing(ttt_spec):
    stats = run_playouts(ttt_spec, 10, base_seed=0, budget_secs=0)
    assert stats.completed_playouts == 0
    assert stats.budget_exceeded


def test_seeds_are_base_plus_index(ttt_spec):
    stats = run_playouts(ttt_spec, 5, base_seed=100)
    assert [t.seed for t in stats.traces] == [100, 101, 102, 103, 104]


def test_extract_requires_completed_playouts(ttt_spec):
    stats = run_playouts(ttt_spec, 10, base_seed=0, budget_secs=0)
    with pytest.raises(EmptyStatsError):
        extract_concepts(stats, ttt_spec)


def test_concepts_within_sampling_error_of_oracle(ttt_spec):
    exact = exact_values()
    stats = run_playouts(ttt_spec, 2000, base_seed=0)
    concepts = extract_concepts(stats, ttt_spec)
    assert concepts.timeout_rate == 0.0
    assert abs(concepts.decision_moves - float(exact["decision_moves"])) < 0.05
    assert abs(concepts.coverage - float(exact["coverage"])) < 0.05
    assert abs(concepts.balance - float(exact["balance"])) < 0.05
    assert abs(concepts.completion - float(exact["completion"])) < 0.05


def test_concepts_in_unit_range(corpus):
    for inst in corpus:
        spec = compile_game(inst.description)
        stats = run_playouts(spec, 10, base_seed=7)
        concepts = extract_concepts(stats, spec)
        for _, value in concepts.defined_items():
            assert 0.0 <= value <= 1.0
        assert all(0.0 <= v <= 1.0 for v in concepts.extended)


def test_seed_stability(ttt_spec):
    a = extract_concepts(run_playouts(ttt_spec, 50, base_seed=9), ttt_spec)
    b = extract_concepts(run_playouts(ttt_spec, 50, base_seed=9), ttt_spec)
    assert a == b


def test_single_player_has_no_balance_or_completion():
    spec = compile_game(SOLO)
    stats = run_playouts(spec, 10, base_seed=0)
    concepts = extract_concepts(stats, spec)
    assert concepts.balance is None
    assert concepts.completion is None
    assert len(concepts.defined_items()) == 3
    assert len(concepts.as_vector()) == 5


def test_aligned_vectors_mutual_items(ttt_spec):
    solo = compile_game(SOLO)
    a = extract_concepts(run_playouts(ttt_spec, 10, 0), ttt_spec)
    b = extract_concepts(run_playouts(solo, 10, 0), solo)
    va, vb = aligned_vectors(a, b)
    assert len(va) == len(vb) == 5  # 3 mutual concepts + 2 extended


def test_roundtrip_dict(ttt_spec):
    concepts = extract_concepts(run_playouts(ttt_spec, 10, 0), ttt_spec)
    from ludilite import ConceptVector

    assert ConceptVector.from_dict(concepts.to_dict()) == concepts
