from .diagnostics import AlignmentReport, alignment_factors
from .exact import ScoreMatrix, exact_marginals, exact_semivalues, scores_from_marginals
from .games import (AdditiveGame, FunctionGame, Game, LearningGame, SaturatingGame, TableGame,
                    coalition_mask)
from .montecarlo import McConfig, McResult, mc_semivalues, truncation_index, walk_permutation
from .store import MarginalStore, gelman_rubin
from .weights import (SemivalueWeights, WeightKind, make_weights, parse_weight_spec,
                      weights_from_spec)

__all__ = [
    "AdditiveGame", "AlignmentReport", "FunctionGame", "Game", "LearningGame", "MarginalStore",
    "McConfig", "McResult", "SaturatingGame", "ScoreMatrix", "SemivalueWeights", "TableGame",
    "WeightKind", "alignment_factors", "coalition_mask", "exact_marginals", "exact_semivalues",
    "gelman_rubin", "make_weights", "mc_semivalues", "parse_weight_spec",
    "scores_from_marginals", "truncation_index", "walk_permutation", "weights_from_spec",
]
