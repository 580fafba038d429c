"""Paper x reviewer similarity matrix, bid overrides and capacity-constrained assignment."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import Iterable, Mapping, Sequence

import numpy as np

from taxomatch.concept_sim import ConceptSimilarity, Measure, Weighting
from taxomatch.set_sim import KeywordSelection, asymmetric_sf, dice, jaccard, symmetric_sf
from taxomatch.taxonomy import ProbabilityTable, Taxonomy, TaxonomyError, estimate_probabilities


class InfeasibleError(RuntimeError):
    """No assignment satisfies the demand / capacity / conflict constraints."""

    def __init__(self, message: str, constraint: str):
        super().__init__(message)
        self.constraint = constraint


class Provenance(str, Enum):
    COMPUTED = "computed"
    BID_OVERRIDE = "bid_override"
    CONFLICT = "conflict"


class SetMeasure(str, Enum):
    JACCARD = "jaccard"
    DICE = "dice"
    SYMMETRIC = "symmetric"
    ASYMMETRIC = "asymmetric"


class BidOption(IntEnum):
    EXPERT_WANTS = 1
    EXPERT = 2
    CAN_REVIEW = 3
    OUT_OF_EXPERTISE = 4
    CONFLICT = 5


# option 5 is not a value: it marks the cell as a conflict
DEFAULT_BID_VALUES: dict[BidOption, float] = {
    BidOption.EXPERT_WANTS: 1.0,
    BidOption.EXPERT: 0.85,
    BidOption.CAN_REVIEW: 0.5,
    BidOption.OUT_OF_EXPERTISE: 0.0,
}


@dataclass(frozen=True)
class Bid:
    reviewer: str
    paper: str
    option: BidOption

    def __post_init__(self):
        object.__setattr__(self, "option", BidOption(self.option))


@dataclass(frozen=True)
class SimilarityConfig:
    measure: Measure = Measure.WU_PALMER
    set_measure: SetMeasure = SetMeasure.SYMMETRIC
    weighting: Weighting = Weighting.NONE
    smoothing: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "measure", Measure(self.measure))
        object.__setattr__(self, "set_measure", SetMeasure(self.set_measure))
        object.__setattr__(self, "weighting", Weighting(self.weighting))


@dataclass(frozen=True, eq=False)
class SimilarityMatrix:
    papers: tuple[str, ...]
    reviewers: tuple[str, ...]
    values: np.ndarray
    provenance: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        prov = np.array(self.provenance, dtype=object)
        shape = (len(self.papers), len(self.reviewers))
        if values.shape != shape or prov.shape != shape:
            raise ValueError(f"matrix shape {values.shape} does not match {shape}")
        values.setflags(write=False)
        prov.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "provenance", prov)
        object.__setattr__(self, "_pi", {p: i for i, p in enumerate(self.papers)})
        object.__setattr__(self, "_ri", {r: j for j, r in enumerate(self.reviewers)})

    @classmethod
    def from_values(cls, values, papers=None, reviewers=None) -> SimilarityMatrix:
        values = np.asarray(values, dtype=float)
        if values.ndim != 2:
            values = values.reshape(len(papers or ()), len(reviewers or ()))
        papers = tuple(papers or (f"p{i + 1}" for i in range(values.shape[0])))
        reviewers = tuple(reviewers or (f"r{j + 1}" for j in range(values.shape[1])))
        prov = np.full(values.shape, Provenance.COMPUTED.value, dtype=object)
        return cls(papers, reviewers, values, prov)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def paper_index(self, paper: str) -> int:
        try:
            return self._pi[paper]
        except KeyError:
            raise KeyError(f"unknown paper {paper!r}") from None

    def reviewer_index(self, reviewer: str) -> int:
        try:
            return self._ri[reviewer]
        except KeyError:
            raise KeyError(f"unknown reviewer {reviewer!r}") from None

    def value(self, paper: str, reviewer: str) -> float:
        return float(self.values[self.paper_index(paper), self.reviewer_index(reviewer)])

    def cell_provenance(self, paper: str, reviewer: str) -> Provenance:
        return Provenance(self.provenance[self.paper_index(paper), self.reviewer_index(reviewer)])

    def conflict_mask(self) -> np.ndarray:
        return self.provenance == Provenance.CONFLICT.value

    def with_cells(self, updates: Mapping[tuple[int, int], tuple[float, Provenance]]) -> SimilarityMatrix:
        values = self.values.copy()
        prov = self.provenance.copy()
        for (i, j), (v, pv) in updates.items():
            values[i, j] = v
            prov[i, j] = Provenance(pv).value
        return SimilarityMatrix(self.papers, self.reviewers, values, prov)


def build_matrix(papers: Sequence[KeywordSelection], reviewers: Sequence[KeywordSelection],
                 taxonomy: Taxonomy, config: SimilarityConfig | None = None,
                 table: ProbabilityTable | None = None) -> SimilarityMatrix:
    """Similarity factor for every paper/reviewer pair.

    With the Lin measure and no ``table``, probabilities are estimated from
    the given papers and reviewers using ``config.smoothing``.
    """
    config = config or SimilarityConfig()
    if not papers:
        raise ValueError("no papers")
    if not reviewers:
        raise ValueError("no reviewers")
    for sel in (*papers, *reviewers):
        for concept in sel:
            if concept not in taxonomy:
                raise TaxonomyError(f"unknown concept id {concept!r} in selection of {sel.owner!r}",
                                    concept)

    if config.set_measure is SetMeasure.JACCARD:
        cell = jaccard
    elif config.set_measure is SetMeasure.DICE:
        cell = dice
    else:
        if config.measure is Measure.LIN and table is None:
            table = estimate_probabilities(taxonomy, [*papers, *reviewers], config.smoothing)
        sim = ConceptSimilarity(taxonomy, config.measure, table)
        set_fn = symmetric_sf if config.set_measure is SetMeasure.SYMMETRIC else asymmetric_sf

        def cell(p, r):
            return set_fn(p, r, sim, config.weighting)

    values = np.array([[cell(p, r) for r in reviewers] for p in papers], dtype=float)
    return SimilarityMatrix.from_values(values, [p.owner for p in papers],
                                        [r.owner for r in reviewers])


def apply_bids(matrix: SimilarityMatrix, bids: Iterable[Bid],
               mapping: Mapping[int, float] | None = None) -> SimilarityMatrix:
    """Let each explicit bid replace the computed factor for its pair.

    A conflict-of-interest bid zeroes the cell and makes it unassignable.
    """
    values = dict(DEFAULT_BID_VALUES)
    if mapping:
        values.update({BidOption(int(k)): float(v) for k, v in mapping.items()})
    values.pop(BidOption.CONFLICT, None)
    updates = {}
    seen = set()
    for bid in bids:
        key = (bid.paper, bid.reviewer)
        if key in seen:
            raise ValueError(f"duplicate bid by {bid.reviewer!r} on {bid.paper!r}")
        seen.add(key)
        ij = (matrix.paper_index(bid.paper), matrix.reviewer_index(bid.reviewer))
        if bid.option is BidOption.CONFLICT:
            updates[ij] = (0.0, Provenance.CONFLICT)
        else:
            v = values[bid.option]
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"bid value for option {int(bid.option)} outside [0, 1]: {v}")
            updates[ij] = (v, Provenance.BID_OVERRIDE)
    return matrix.with_cells(updates)


def apply_conflicts(matrix: SimilarityMatrix, conflicts: Iterable[tuple[str, str]]) -> SimilarityMatrix:
    """Mark (paper, reviewer) pairs as conflicts of interest."""
    updates = {(matrix.paper_index(p), matrix.reviewer_index(r)): (0.0, Provenance.CONFLICT)
               for p, r in conflicts}
    return matrix.with_cells(updates)


@dataclass(frozen=True)
class Assignment:
    edges: tuple[tuple[str, str], ...]
    k: int
    capacity: int

    def total(self, matrix: SimilarityMatrix) -> float:
        return math.fsum(matrix.value(p, r) for p, r in self.edges)

    def loads(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for _, r in self.edges:
            out[r] = out.get(r, 0) + 1
        return out

    def reviewers_of(self, paper: str) -> list[str]:
        return [r for p, r in self.edges if p == paper]

    def __contains__(self, pair: object) -> bool:
        return pair in set(self.edges)

    def __len__(self) -> int:
        return len(self.edges)


def default_capacity(k: int, n_papers: int, n_reviewers: int) -> int:
    if n_reviewers == 0:
        return 0
    return math.ceil(k * n_papers / n_reviewers)


def _check_feasible(matrix: SimilarityMatrix, k: int, capacity: int) -> None:
    n_p, n_r = matrix.shape
    if k < 0 or capacity < 0:
        raise ValueError("k and capacity must be non-negative")
    if k * n_p > capacity * n_r:
        raise InfeasibleError(
            f"demand k*papers = {k}*{n_p} = {k * n_p} exceeds supply "
            f"capacity*reviewers = {capacity}*{n_r} = {capacity * n_r}", "capacity")
    eligible = (~matrix.conflict_mask()).sum(axis=1)
    for i, n in enumerate(eligible):
        if n < k:
            raise InfeasibleError(
                f"paper {matrix.papers[i]!r} has {n} non-conflicted reviewers but needs k={k}",
                f"demand:{matrix.papers[i]}")


def _ordered(matrix: SimilarityMatrix, pairs: Iterable[tuple[int, int]], k, capacity) -> Assignment:
    edges = tuple((matrix.papers[i], matrix.reviewers[j]) for i, j in sorted(pairs))
    return Assignment(edges, k, capacity)


class _MinCostFlow:
    """Successive shortest paths with Johnson potentials (float costs)."""

    def __init__(self, n: int):
        self.n = n
        self.graph: list[list[int]] = [[] for _ in range(n)]
        self.to: list[int] = []
        self.cap: list[int] = []
        self.cost: list[float] = []

    def add_edge(self, u: int, v: int, cap: int, cost: float) -> int:
        eid = len(self.to)
        self.graph[u].append(eid)
        self.to.append(v)
        self.cap.append(cap)
        self.cost.append(cost)
        self.graph[v].append(eid + 1)
        self.to.append(u)
        self.cap.append(0)
        self.cost.append(-cost)
        return eid

    def run(self, s: int, t: int, want: int, potential: list[float]) -> int:
        flow = 0
        inf = math.inf
        to, cap, cost, graph = self.to, self.cap, self.cost, self.graph
        while flow < want:
            dist = [inf] * self.n
            prev_edge = [-1] * self.n
            dist[s] = 0.0
            heap = [(0.0, s)]
            while heap:
                d, u = heapq.heappop(heap)
                if d > dist[u]:
                    continue
                pu = potential[u]
                for e in graph[u]:
                    if cap[e] <= 0:
                        continue
                    v = to[e]
                    # reduced costs are >= 0 up to rounding
                    nd = d + max(0.0, cost[e] + pu - potential[v])
                    if nd < dist[v]:
                        dist[v] = nd
                        prev_edge[v] = e
                        heapq.heappush(heap, (nd, v))
            if dist[t] == inf:
                break
            for v in range(self.n):
                if dist[v] < inf:
                    potential[v] += dist[v]
            push = want - flow
            v = t
            while v != s:
                e = prev_edge[v]
                push = min(push, cap[e])
                v = to[e ^ 1]
            v = t
            while v != s:
                e = prev_edge[v]
                cap[e] -= push
                cap[e ^ 1] += push
                v = to[e ^ 1]
            flow += push
        return flow


def assign_optimal(matrix: SimilarityMatrix, k: int = 3, capacity: int | None = None) -> Assignment:
    """Maximum-total-similarity assignment: each paper gets exactly ``k`` distinct
    reviewers, no reviewer exceeds ``capacity``, conflict cells are never used.

    Solved exactly as a min-cost flow source -> paper -> reviewer -> sink.
    """
    n_p, n_r = matrix.shape
    if capacity is None:
        capacity = default_capacity(k, n_p, n_r)
    _check_feasible(matrix, k, capacity)
    if k == 0 or n_p == 0:
        return Assignment((), k, capacity)

    s, t = 0, 1 + n_p + n_r
    net = _MinCostFlow(n_p + n_r + 2)
    conflict = matrix.conflict_mask()
    pair_edges = {}
    for i in range(n_p):
        net.add_edge(s, 1 + i, k, 0.0)
    for i in range(n_p):
        for j in range(n_r):
            if not conflict[i, j]:
                pair_edges[(i, j)] = net.add_edge(1 + i, 1 + n_p + j, 1, -float(matrix.values[i, j]))
    for j in range(n_r):
        net.add_edge(1 + n_p + j, t, capacity, 0.0)

    # exact shortest distances on the initial DAG
    potential = [0.0] * net.n
    for j in range(n_r):
        col = [-float(matrix.values[i, j]) for i in range(n_p) if not conflict[i, j]]
        potential[1 + n_p + j] = min(col) if col else 0.0
    potential[t] = min(potential[1 + n_p:t])

    want = k * n_p
    got = net.run(s, t, want, potential)
    if got < want:
        raise InfeasibleError(
            f"conflicts and capacity={capacity} allow only {got} of {want} required reviews",
            "conflicts")
    chosen = [ij for ij, e in pair_edges.items() if net.cap[e] == 0]
    return _ordered(matrix, chosen, k, capacity)


def assign_greedy(matrix: SimilarityMatrix, k: int = 3, capacity: int | None = None) -> Assignment:
    """Papers in input order each take their ``k`` best reviewers with spare capacity.

    Ties go to the reviewer listed first.
    """
    n_p, n_r = matrix.shape
    if capacity is None:
        capacity = default_capacity(k, n_p, n_r)
    _check_feasible(matrix, k, capacity)
    load = [0] * n_r
    conflict = matrix.conflict_mask()
    chosen = []
    for i in range(n_p):
        ranked = sorted((j for j in range(n_r) if not conflict[i, j] and load[j] < capacity),
                        key=lambda j: (-matrix.values[i, j], j))
        if len(ranked) < k:
            raise InfeasibleError(
                f"greedy: paper {matrix.papers[i]!r} found {len(ranked)} available reviewers, needs {k}",
                f"demand:{matrix.papers[i]}")
        for j in ranked[:k]:
            load[j] += 1
            chosen.append((i, j))
    return _ordered(matrix, chosen, k, capacity)
