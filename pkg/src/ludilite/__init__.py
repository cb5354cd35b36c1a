"""Grammar and gameplay rewards for game description generation.

The package scores candidate game descriptions against a reference: a
grammar reward measures the longest grammatically viable prefix, and a
concept reward compares gameplay features extracted from random playouts.
A metric suite (compilability, functionality, ROUGE-L, concept distance)
evaluates whole corpora, and an HTTP service exposes scoring to training
loops.
"""

__version__ = "0.1.0"

from .concepts import (
    ConceptVector,
    EmptyStatsError,
    PlayoutStats,
    aligned_vectors,
    extract_concepts,
    run_playouts,
)
from .dataset import (
    DatasetError,
    Instance,
    Prediction,
    default_corpus,
    filter_by_length,
    load_instances,
    load_predictions,
    save_instances,
    save_predictions,
)
from .engine import (
    CompileError,
    FunctionalityResult,
    GameSpec,
    GameState,
    IllegalMoveError,
    Move,
    Outcome,
    PlayoutTrace,
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
from .grammar import (
    Grammar,
    GrammarError,
    ValidPrefixResult,
    default_grammar,
    grammar_reward,
    load_grammar,
    load_grammar_path,
    recognize,
)
from .metrics import (
    EvalReport,
    category_concept_distance,
    evaluate_corpus,
    lcs_length,
    mean_stderr,
    ncd,
    rouge_l_f1,
    rouge_tokenize,
)
from .rewards import (
    CandidateFailure,
    GroundTruthError,
    RewardBreakdown,
    RewardConfig,
    ScoreResult,
    combined_reward,
    concept_reward,
    concept_reward_from_penalties,
    gaussian_penalty,
    group_advantages,
    reference_concepts,
    score_candidates,
    text_seed,
)

__all__ = [name for name in dir() if not name.startswith("_")]
