"""Visitor-flow modelling for multi-activity events."""

from footfall.patterns import (
    CorpusConfig,
    GroundTruthGraph,
    PatternCorpus,
    generate_corpus,
    generate_ground_truth,
    generate_pattern,
    split_pattern,
)
from footfall.transition import (
    PriorVector,
    ProbMatrix,
    TransitionModel,
    WeightMatrix,
    build_priors,
    build_weight_matrix,
    normalize,
    train,
)
from footfall.recommender import (
    evaluate,
    evaluate_bounded,
    exact_match_rate,
    recommend,
    reconstruct,
    score,
)
from footfall.layout_ga import (
    GAParams,
    PositionPool,
    RunTrace,
    evolve,
    fitness,
    grid_pool,
    random_baseline,
)

__version__ = "0.1.0"

__all__ = [
    "CorpusConfig",
    "GAParams",
    "GroundTruthGraph",
    "PatternCorpus",
    "PositionPool",
    "PriorVector",
    "ProbMatrix",
    "RunTrace",
    "TransitionModel",
    "WeightMatrix",
    "build_priors",
    "build_weight_matrix",
    "evaluate",
    "evaluate_bounded",
    "evolve",
    "exact_match_rate",
    "fitness",
    "generate_corpus",
    "generate_ground_truth",
    "generate_pattern",
    "grid_pool",
    "normalize",
    "random_baseline",
    "recommend",
    "reconstruct",
    "score",
    "split_pattern",
    "train",
]
