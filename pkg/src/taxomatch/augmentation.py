"""Rules that repair weak keyword descriptions before similarity is computed."""

from __future__ import annotations

from dataclasses import dataclass
from statistics import fmean
from typing import Any, Iterable, Mapping, Sequence

from taxomatch.matching import Bid, BidOption
from taxomatch.set_sim import DECLARED, Keyword, KeywordSelection
from taxomatch.taxonomy import Taxonomy

PROPAGATED = "propagated"
EXPANDED = "expanded"


@dataclass(frozen=True)
class AugmentationConfig:
    min_selectable_depth: int = 2
    # inclusive depth range; None means [1, height - 1]
    generalization_band: tuple[int, int] | None = None
    expert_bid_options: tuple[int, ...] = (BidOption.EXPERT_WANTS, BidOption.EXPERT)
    competence_threshold: float = 0.75

    def __post_init__(self):
        if self.min_selectable_depth < 1:
            raise ValueError("min_selectable_depth must be at least 1")
        if self.generalization_band is not None:
            lo, hi = self.generalization_band
            if lo < 0 or lo > hi:
                raise ValueError(f"bad generalization band {self.generalization_band!r}")
            object.__setattr__(self, "generalization_band", (int(lo), int(hi)))
        object.__setattr__(self, "expert_bid_options",
                           tuple(BidOption(int(o)) for o in self.expert_bid_options))

    def band(self, taxonomy: Taxonomy) -> tuple[int, int]:
        if self.generalization_band is None:
            return 1, max(1, taxonomy.height - 1)
        lo, hi = self.generalization_band
        if hi > taxonomy.height:
            raise ValueError(f"generalization band {self.generalization_band!r} exceeds "
                             f"taxonomy height {taxonomy.height}")
        return lo, hi


@dataclass(frozen=True)
class DepthViolation:
    owner: str
    concept: str
    depth: int
    min_depth: int


@dataclass(frozen=True)
class Addition:
    owner: str
    concept: str
    rule: str
    justification: tuple[str, ...]
    weight: float

    def to_dict(self) -> dict[str, Any]:
        return {"reviewer": self.owner, "concept": self.concept, "rule": self.rule,
                "justification": list(self.justification), "weight": self.weight}


def validate_selection_depth(selection: KeywordSelection, taxonomy: Taxonomy,
                             config: AugmentationConfig | None = None) -> list[DepthViolation]:
    """Keywords chosen too close to the root. An empty list means the selection is accepted."""
    config = config or AugmentationConfig()
    out = []
    for concept in selection:
        d = taxonomy.depth(concept)
        if d < config.min_selectable_depth:
            out.append(DepthViolation(selection.owner, concept, d, config.min_selectable_depth))
    return out


def _index(selections: Mapping[str, KeywordSelection] | Sequence[KeywordSelection]):
    if isinstance(selections, Mapping):
        return dict(selections)
    return {s.owner: s for s in selections}


def _declared(selection: KeywordSelection, concept: str) -> bool:
    # rule-added keywords never corroborate, so reapplying the rules adds nothing
    return concept in selection and selection.keyword(concept).origin == DECLARED


def propagation_additions(reviewer: KeywordSelection,
                          papers: Mapping[str, KeywordSelection] | Sequence[KeywordSelection],
                          bids: Iterable[Bid],
                          all_reviewers: Mapping[str, KeywordSelection] | Sequence[KeywordSelection],
                          config: AugmentationConfig | None = None) -> list[Addition]:
    config = config or AugmentationConfig()
    papers = _index(papers)
    reviewers = _index(all_reviewers)
    experts_of: dict[str, list[str]] = {}
    for bid in bids:
        if bid.paper not in papers:
            raise KeyError(f"bid references unknown paper {bid.paper!r}")
        if bid.reviewer not in reviewers and bid.reviewer != reviewer.owner:
            raise KeyError(f"bid references unknown reviewer {bid.reviewer!r}")
        if bid.option in config.expert_bid_options:
            experts_of.setdefault(bid.paper, []).append(bid.reviewer)

    mine = [p for p in papers if reviewer.owner in experts_of.get(p, ())]
    if not mine:
        return []
    weight = fmean(kw.weight for kw in reviewer.keywords)
    found: dict[str, list[str]] = {}
    for pid in mine:
        for concept in papers[pid]:
            if concept in reviewer:
                continue
            peers = [r for r in experts_of[pid]
                     if r != reviewer.owner and r in reviewers and _declared(reviewers[r], concept)]
            others = [q for q in mine if q != pid and concept in papers[q]]
            if peers or others:
                just = found.setdefault(concept, [])
                for ident in (pid, *peers, *others):
                    if ident not in just:
                        just.append(ident)
    return [Addition(reviewer.owner, c, "collaborative_propagation", tuple(j), weight)
            for c, j in found.items()]


def propagate_from_bids(reviewer: KeywordSelection,
                        papers: Mapping[str, KeywordSelection] | Sequence[KeywordSelection],
                        bids: Iterable[Bid],
                        all_reviewers: Mapping[str, KeywordSelection] | Sequence[KeywordSelection],
                        config: AugmentationConfig | None = None) -> KeywordSelection:
    """Add keywords of papers the reviewer bid on as an expert.

    A paper keyword is added when another expert bidder on the same paper
    also chose it, or when it also describes another paper this reviewer
    bid on as an expert.
    """
    adds = propagation_additions(reviewer, papers, bids, all_reviewers, config)
    return reviewer.with_added(Keyword(a.concept, a.weight, PROPAGATED) for a in adds)


def expansion_additions(reviewer: KeywordSelection, taxonomy: Taxonomy,
                        config: AugmentationConfig | None = None) -> list[Addition]:
    config = config or AugmentationConfig()
    lo, hi = config.band(taxonomy)
    out = []
    for kw in reviewer.keywords:
        # only keywords the reviewer chose can signal a generalised competence
        if kw.origin != DECLARED or kw.weight < config.competence_threshold:
            continue
        if not lo <= taxonomy.depth(kw.concept) <= hi:
            continue
        kids = taxonomy.children(kw.concept)
        if not kids or any(c in reviewer for c in kids):
            continue
        out.extend(Addition(reviewer.owner, c, "generalization_expansion", (kw.concept,), kw.weight)
                   for c in kids)
    return out


def expand_generalized(reviewer: KeywordSelection, taxonomy: Taxonomy,
                       config: AugmentationConfig | None = None) -> KeywordSelection:
    adds = expansion_additions(reviewer, taxonomy, config)
    return reviewer.with_added(Keyword(a.concept, a.weight, EXPANDED) for a in adds)


def augment_reviewers(reviewers: Sequence[KeywordSelection],
                      papers: Sequence[KeywordSelection], bids: Sequence[Bid], taxonomy: Taxonomy,
                      config: AugmentationConfig | None = None
                      ) -> tuple[list[KeywordSelection], list[Addition]]:
    """Bid propagation then generalization expansion for every reviewer.

    Peer corroboration always uses the selections passed in, so the result
    does not depend on reviewer order.
    """
    config = config or AugmentationConfig()
    out, diff = [], []
    for rev in reviewers:
        adds = propagation_additions(rev, papers, bids, reviewers, config)
        sel = rev.with_added(Keyword(a.concept, a.weight, PROPAGATED) for a in adds)
        more = expansion_additions(sel, taxonomy, config)
        sel = sel.with_added(Keyword(a.concept, a.weight, EXPANDED) for a in more)
        out.append(sel)
        diff.extend(adds)
        diff.extend(more)
    return out, diff
