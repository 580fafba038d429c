"""Seeded random taxonomies and conferences for tests and demos."""

from __future__ import annotations

import numpy as np

from taxomatch.dataset import ConferenceDataset
from taxomatch.evaluation import Level, SelfEvaluation
from taxomatch.matching import Bid, BidOption
from taxomatch.set_sim import Keyword, KeywordSelection
from taxomatch.taxonomy import Taxonomy


def random_taxonomy(n_nodes: int, rng: np.random.Generator, max_depth: int | None = None) -> Taxonomy:
    """Random recursive tree: each new node picks an existing parent uniformly."""
    if n_nodes < 1:
        raise ValueError("need at least one node")
    parents: dict[str, str | None] = {"n0": None}
    depth = {"n0": 0}
    names = ["n0"]
    for i in range(1, n_nodes):
        pool = names if max_depth is None else [n for n in names if depth[n] < max_depth]
        p = pool[int(rng.integers(len(pool)))]
        name = f"n{i}"
        parents[name] = p
        depth[name] = depth[p] + 1
        names.append(name)
    return Taxonomy.from_parents(parents)


def star_taxonomy(n_leaves: int) -> Taxonomy:
    parents: dict[str, str | None] = {"root": None}
    parents.update({f"k{i}": "root" for i in range(n_leaves)})
    return Taxonomy.from_parents(parents)


def random_selection(owner: str, concepts: list[str], rng: np.random.Generator, max_size: int = 5,
                     weighted: bool = False) -> KeywordSelection:
    size = int(rng.integers(1, min(max_size, len(concepts)) + 1))
    picked = rng.choice(len(concepts), size=size, replace=False)
    kws = []
    for idx in sorted(picked.tolist()):
        w = float(np.round(rng.uniform(0.0, 1.0), 2)) if weighted else 1.0
        kws.append(Keyword(concepts[idx], w))
    return KeywordSelection(owner, tuple(kws))


def random_conference(rng: np.random.Generator, n_nodes: int = 30, n_papers: int = 8,
                      n_reviewers: int = 6, bid_rate: float = 0.3, weighted: bool = False,
                      max_keywords: int = 4, taxonomy: Taxonomy | None = None) -> ConferenceDataset:
    """A complete dataset with random selections, bids and no evaluations."""
    tax = taxonomy or random_taxonomy(n_nodes, rng, max_depth=4)
    concepts = [c for c in tax if c != tax.root]
    if not concepts:
        concepts = [tax.root]
    papers = [random_selection(f"p{i + 1}", concepts, rng, max_keywords, weighted)
              for i in range(n_papers)]
    reviewers = [random_selection(f"r{j + 1}", concepts, rng, max_keywords, weighted)
                 for j in range(n_reviewers)]
    bids = []
    for r in reviewers:
        for p in papers:
            if rng.uniform() < bid_rate:
                bids.append(Bid(r.owner, p.owner, BidOption(int(rng.integers(1, 5)))))
    return ConferenceDataset(tax, papers, reviewers, bids,
                             titles={p.owner: f"Paper {p.owner}" for p in papers},
                             names={r.owner: f"Reviewer {r.owner}" for r in reviewers})


def random_self_evaluations(pairs, rng: np.random.Generator) -> list[SelfEvaluation]:
    levels = list(Level)
    return [SelfEvaluation(r, p, levels[int(rng.integers(3))]) for p, r in pairs]


def sibling_only_conference(n_groups: int, n_papers: int, n_reviewers: int,
                            rng: np.random.Generator) -> ConferenceDataset:
    """Papers and reviewers never share a keyword, yet every pair has sibling keywords.

    Each group node has a paper-side leaf pool and a reviewer-side leaf pool;
    every paper and every reviewer selects one leaf from its side of group 0
    plus random extra leaves from its side of other groups.
    """
    parents: dict[str, str | None] = {"root": None}
    for g in range(n_groups):
        parents[f"g{g}"] = "root"
        for i in range(3):
            parents[f"g{g}.a{i}"] = f"g{g}"
            parents[f"g{g}.b{i}"] = f"g{g}"
    tax = Taxonomy.from_parents(parents)

    def pick(owner: str, side: str) -> KeywordSelection:
        chosen = [f"g0.{side}{int(rng.integers(3))}"]
        for g in range(1, n_groups):
            if rng.uniform() < 0.5:
                chosen.append(f"g{g}.{side}{int(rng.integers(3))}")
        return KeywordSelection.of(owner, chosen)

    papers = [pick(f"p{i + 1}", "a") for i in range(n_papers)]
    reviewers = [pick(f"r{j + 1}", "b") for j in range(n_reviewers)]
    return ConferenceDataset(tax, papers, reviewers)
