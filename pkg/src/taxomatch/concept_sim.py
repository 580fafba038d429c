"""Similarity between two taxonomy concepts, plus competence weighting."""

from __future__ import annotations

import math
from enum import Enum

from taxomatch.taxonomy import LcaResult, ProbabilityTable, Taxonomy, lca


class Measure(str, Enum):
    WU_PALMER = "wu_palmer"
    LIN = "lin"


class Weighting(str, Enum):
    NONE = "none"
    RELATIVE = "relative"
    ABSOLUTE = "absolute"


def wu_palmer(lca_result: LcaResult) -> float:
    """Structural similarity: twice the shared root path over all path edges."""
    n0, n1, n2 = lca_result.n0, lca_result.n1, lca_result.n2
    if n1 == 0 and n2 == 0:
        return 1.0
    return 2 * n0 / (2 * n0 + n1 + n2)


def lin(table: ProbabilityTable, a: str, b: str, lca_result: LcaResult) -> float:
    """Information-content similarity of ``a`` and ``b`` given their common ancestor."""
    pa, pb, p0 = table[a], table[b], table[lca_result.ancestor]
    if a == b:
        return 1.0
    for concept, prob in ((a, pa), (b, pb), (lca_result.ancestor, p0)):
        if not 0.0 < prob <= 1.0:
            raise ValueError(f"probability of {concept!r} must lie in (0, 1], got {prob}")
    denom = math.log(pa) + math.log(pb)
    if denom == 0.0:
        return 0.0
    sim = 2.0 * math.log(p0) / denom
    # log ratios can overshoot by an ulp
    return min(1.0, max(0.0, sim))


def weighted_relative(sim: float, w_paper: float, w_reviewer: float) -> float:
    """Lower ``sim`` by the amount the reviewer's competence falls short of the paper's level."""
    if w_reviewer >= w_paper:
        return sim
    return sim * (1.0 - (w_paper - w_reviewer))


def weighted_absolute(sim: float, w_reviewer: float) -> float:
    return sim * w_reviewer


class ConceptSimilarity:
    """Memoised concept-pair similarity over one taxonomy.

    ``ConceptSimilarity(tax, "lin", table)(a, b)`` returns the Lin score.
    Lin needs a probability table; Wu-Palmer ignores it.
    """

    def __init__(self, taxonomy: Taxonomy, measure: Measure | str = Measure.WU_PALMER,
                 table: ProbabilityTable | None = None):
        self.taxonomy = taxonomy
        self.measure = Measure(measure)
        if self.measure is Measure.LIN and table is None:
            raise ValueError("the lin measure requires a probability table")
        self.table = table
        self._cache: dict[tuple[str, str], float] = {}

    def __call__(self, a: str, b: str) -> float:
        key = (a, b) if a <= b else (b, a)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        res = lca(self.taxonomy, key[0], key[1])
        if self.measure is Measure.WU_PALMER:
            value = wu_palmer(res)
        else:
            value = lin(self.table, key[0], key[1], res)
        self._cache[key] = value
        return value
