"""Similarity factors between a paper's and a reviewer's keyword sets."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Iterable, Iterator

from taxomatch.concept_sim import Weighting, weighted_absolute, weighted_relative

ConceptSim = Callable[[str, str], float]

DECLARED = "declared"


@dataclass(frozen=True)
class Keyword:
    """One selected concept.

    ``weight`` is the applicability (papers) or competence (reviewers) level.
    ``origin`` records whether the owner chose the keyword or a rule added it.
    """

    concept: str
    weight: float = 1.0
    origin: str = DECLARED

    def __post_init__(self):
        if not 0.0 <= self.weight <= 1.0:
            raise ValueError(f"weight of {self.concept!r} must lie in [0, 1], got {self.weight}")


@dataclass(frozen=True)
class KeywordSelection:
    owner: str
    keywords: tuple[Keyword, ...]

    def __post_init__(self):
        if not self.keywords:
            raise ValueError(f"empty keyword selection for {self.owner!r}")
        seen = set()
        for kw in self.keywords:
            if kw.concept in seen:
                raise ValueError(f"duplicate keyword {kw.concept!r} in selection of {self.owner!r}")
            seen.add(kw.concept)
        object.__setattr__(self, "_by_concept", {kw.concept: kw for kw in self.keywords})

    @classmethod
    def of(cls, owner: str, items: Iterable[str | tuple[str, float]] | dict[str, float]) -> KeywordSelection:
        """Shorthand: ``KeywordSelection.of("p1", ["A1", ("B1", 0.5)])``."""
        if isinstance(items, dict):
            items = items.items()
        kws = []
        for item in items:
            if isinstance(item, str):
                kws.append(Keyword(item))
            else:
                kws.append(Keyword(item[0], float(item[1])))
        return cls(owner, tuple(kws))

    def __len__(self) -> int:
        return len(self.keywords)

    def __iter__(self) -> Iterator[str]:
        return (kw.concept for kw in self.keywords)

    def __contains__(self, concept: object) -> bool:
        return concept in self._by_concept

    @property
    def concepts(self) -> frozenset[str]:
        return frozenset(self._by_concept)

    def keyword(self, concept: str) -> Keyword:
        return self._by_concept[concept]

    def weight(self, concept: str) -> float:
        return self._by_concept[concept].weight

    def with_added(self, extra: Iterable[Keyword]) -> KeywordSelection:
        added = tuple(kw for kw in extra if kw.concept not in self._by_concept)
        if not added:
            return self
        return KeywordSelection(self.owner, self.keywords + added)

    def to_list(self) -> list[dict[str, Any]]:
        out = []
        for kw in self.keywords:
            rec: dict[str, Any] = {"id": kw.concept, "weight": kw.weight}
            if kw.origin != DECLARED:
                rec["origin"] = kw.origin
            out.append(rec)
        return out


def _check_nonempty(*selections: KeywordSelection) -> None:
    for sel in selections:
        if len(sel) == 0:
            raise ValueError(f"empty keyword selection for {sel.owner!r}")


def jaccard(paper_kws: KeywordSelection, reviewer_kws: KeywordSelection) -> float:
    _check_nonempty(paper_kws, reviewer_kws)
    a, b = paper_kws.concepts, reviewer_kws.concepts
    return len(a & b) / len(a | b)


def dice(paper_kws: KeywordSelection, reviewer_kws: KeywordSelection) -> float:
    _check_nonempty(paper_kws, reviewer_kws)
    a, b = paper_kws.concepts, reviewer_kws.concepts
    return 2 * len(a & b) / (len(a) + len(b))


def overlap(paper_kws: KeywordSelection, reviewer_kws: KeywordSelection) -> float:
    """Flat asymmetric factor: share of the paper's keywords the reviewer also chose."""
    _check_nonempty(paper_kws, reviewer_kws)
    return len(paper_kws.concepts & reviewer_kws.concepts) / len(paper_kws)


def semantic_commonality(from_kws: KeywordSelection, to_kws: KeywordSelection,
                         sim: ConceptSim) -> float:
    """Sum, over ``from_kws``, of each keyword's best similarity into ``to_kws``."""
    _check_nonempty(from_kws, to_kws)
    return sum(max(sim(km, kn) for kn in to_kws) for km in from_kws)


def _pair_scorer(sim: ConceptSim, weighting: Weighting | str) -> Callable[[Keyword, Keyword], float]:
    # arguments are always (paper keyword, reviewer keyword), whichever side is summed
    weighting = Weighting(weighting)
    if weighting is Weighting.NONE:
        return lambda kp, kr: sim(kp.concept, kr.concept)
    if weighting is Weighting.RELATIVE:
        return lambda kp, kr: weighted_relative(sim(kp.concept, kr.concept), kp.weight, kr.weight)
    return lambda kp, kr: weighted_absolute(sim(kp.concept, kr.concept), kr.weight)


def _forward(paper_kws, reviewer_kws, score) -> float:
    return sum(max(score(kp, kr) for kr in reviewer_kws.keywords) for kp in paper_kws.keywords)


def _reverse(paper_kws, reviewer_kws, score) -> float:
    return sum(max(score(kp, kr) for kp in paper_kws.keywords) for kr in reviewer_kws.keywords)


def symmetric_sf(paper_kws: KeywordSelection, reviewer_kws: KeywordSelection, sim: ConceptSim,
                 weighting: Weighting | str = Weighting.NONE) -> float:
    """Dice's coefficient with the intersection replaced by semantic commonality both ways."""
    _check_nonempty(paper_kws, reviewer_kws)
    score = _pair_scorer(sim, weighting)
    num = _forward(paper_kws, reviewer_kws, score) + _reverse(paper_kws, reviewer_kws, score)
    return num / (len(paper_kws) + len(reviewer_kws))


def asymmetric_sf(paper_kws: KeywordSelection, reviewer_kws: KeywordSelection, sim: ConceptSim,
                  weighting: Weighting | str = Weighting.NONE) -> float:
    """How well the reviewer's keywords cover the paper's, normalised by paper size."""
    _check_nonempty(paper_kws, reviewer_kws)
    score = _pair_scorer(sim, weighting)
    return _forward(paper_kws, reviewer_kws, score) / len(paper_kws)
