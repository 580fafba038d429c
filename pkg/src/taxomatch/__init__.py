"""Taxonomy-based similarity factors and reviewer-to-paper assignment."""

from taxomatch.taxonomy import (
    ConceptNode,
    LcaResult,
    ProbabilityTable,
    Taxonomy,
    TaxonomyError,
    estimate_probabilities,
    lca,
    load_taxonomy,
)
from taxomatch.concept_sim import (
    ConceptSimilarity,
    lin,
    weighted_absolute,
    weighted_relative,
    wu_palmer,
)
from taxomatch.set_sim import (
    Keyword,
    KeywordSelection,
    asymmetric_sf,
    dice,
    jaccard,
    overlap,
    semantic_commonality,
    symmetric_sf,
)
from taxomatch.matching import (
    Assignment,
    Bid,
    BidOption,
    InfeasibleError,
    SimilarityMatrix,
    apply_bids,
    apply_conflicts,
    assign_greedy,
    assign_optimal,
    build_matrix,
)
from taxomatch.evaluation import (
    AccuracyReport,
    Level,
    SelfEvaluation,
    count_random,
    histogram,
    score_accuracy,
)
from taxomatch.augmentation import (
    AugmentationConfig,
    expand_generalized,
    propagate_from_bids,
    validate_selection_depth,
)

__version__ = "0.1.0"
