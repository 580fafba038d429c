"""Accuracy of similarity factors against reviewers' self-assessed expertise."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable, Sequence

from taxomatch.matching import Assignment, Provenance, SimilarityMatrix


class Level(str, Enum):
    LOW = "Low"
    MEDIUM = "Medium"
    HIGH = "High"

    @property
    def rank(self) -> int:
        return _RANK[self]


_RANK = {Level.LOW: 0, Level.MEDIUM: 1, Level.HIGH: 2}
LEVELS = (Level.LOW, Level.MEDIUM, Level.HIGH)


@dataclass(frozen=True)
class SelfEvaluation:
    reviewer: str
    paper: str
    level: Level

    def __post_init__(self):
        object.__setattr__(self, "level", Level(self.level))


def consistent_subset(items: Sequence[tuple[Level, float]]) -> list[int]:
    """Indices of the largest subset of ``items`` that is correctly ordered.

    Correct means every Low is below every Medium and High, every Medium
    below every High (strictly), and Medium/High factors are non-zero.
    Among equally large subsets the one with more High members wins, then
    more Medium members; remaining ties go to the lowest cut values.

    Any consistent subset sits inside the set cut out by two thresholds
    ``a <= b`` (Lows <= a < Mediums <= b < Highs), so trying every pair of
    observed values as thresholds is exhaustive.
    """
    values = sorted({v for _, v in items})
    cuts = [-math.inf] + values
    best: list[int] = []
    best_key = (-1, -1, -1)
    for ai, a in enumerate(cuts):
        for b in cuts[ai:]:
            picked = []
            n_high = n_med = 0
            for idx, (level, v) in enumerate(items):
                if level is Level.LOW:
                    ok = v <= a
                elif level is Level.MEDIUM:
                    ok = a < v <= b and v != 0
                else:
                    ok = v > b and v != 0
                if ok:
                    picked.append(idx)
                    n_high += level is Level.HIGH
                    n_med += level is Level.MEDIUM
            key = (len(picked), n_high, n_med)
            if key > best_key:
                best, best_key = picked, key
    return best


def _diagnose(level: Level, value: float) -> str:
    if level is not Level.LOW and value == 0:
        return f"zero factor with {level.value} expertise"
    if level is Level.HIGH:
        return "High expertise but factor not above lower levels"
    if level is Level.LOW:
        return "Low expertise but factor not below higher levels"
    return "Medium expertise but factor out of order"


@dataclass
class PaperAccuracy:
    paper: str
    correct: int
    total: int
    incorrect: list[dict[str, Any]] = field(default_factory=list)


@dataclass
class Histogram:
    bin_width: float
    counts: dict[Level, list[int]]

    @property
    def n_bins(self) -> int:
        return len(self.counts[Level.LOW])

    def edges(self) -> list[tuple[float, float]]:
        n = self.n_bins
        return [(round(i / n, 10), round((i + 1) / n, 10)) for i in range(n)]

    def total(self) -> int:
        return sum(sum(c) for c in self.counts.values())

    def to_rows(self) -> list[dict[str, Any]]:
        return [{"bin_low": lo, "bin_high": hi,
                 **{lvl.value: self.counts[lvl][i] for lvl in LEVELS}}
                for i, (lo, hi) in enumerate(self.edges())]


@dataclass
class AccuracyReport:
    papers: list[PaperAccuracy]
    histogram: Histogram

    @property
    def correct(self) -> int:
        return sum(p.correct for p in self.papers)

    @property
    def total(self) -> int:
        return sum(p.total for p in self.papers)

    @property
    def fraction(self) -> float | None:
        return self.correct / self.total if self.total else None

    def to_dict(self) -> dict[str, Any]:
        return {
            "correct": self.correct,
            "total": self.total,
            "fraction": self.fraction,
            "papers": [{"paper": p.paper, "correct": p.correct, "total": p.total,
                        "incorrect": p.incorrect} for p in self.papers],
            "histogram": self.histogram.to_rows(),
        }


def _bin_count(bin_width: float) -> int:
    n = round(1.0 / bin_width)
    if n < 1 or abs(n * bin_width - 1.0) > 1e-9:
        raise ValueError(f"bin width {bin_width} does not divide 1.0")
    return n


def histogram(matrix: SimilarityMatrix, evals: Iterable[SelfEvaluation],
              bin_width: float = 0.1) -> Histogram:
    """Per-level counts of evaluated factors over ``[i*w, (i+1)*w)``; 1.0 joins the last bin."""
    n = _bin_count(bin_width)
    counts = {lvl: [0] * n for lvl in LEVELS}
    for ev in evals:
        v = matrix.value(ev.paper, ev.reviewer)
        # round first so 0.3 lands in [0.3, 0.4) despite binary representation
        idx = min(n - 1, max(0, math.floor(round(v * n, 9))))
        counts[ev.level][idx] += 1
    return Histogram(bin_width, counts)


def score_accuracy(matrix: SimilarityMatrix, assignment: Assignment,
                   evals: Iterable[SelfEvaluation], bin_width: float = 0.1) -> AccuracyReport:
    evals = list(evals)
    assigned = set(assignment.edges)
    by_paper: dict[str, list[SelfEvaluation]] = {}
    seen = set()
    for ev in evals:
        pair = (ev.paper, ev.reviewer)
        if pair not in assigned:
            raise ValueError(f"self-evaluation for unassigned pair paper={ev.paper!r} "
                             f"reviewer={ev.reviewer!r}")
        if pair in seen:
            raise ValueError(f"duplicate self-evaluation for paper={ev.paper!r} reviewer={ev.reviewer!r}")
        seen.add(pair)
        by_paper.setdefault(ev.paper, []).append(ev)

    results = []
    for paper in sorted(by_paper, key=matrix.paper_index):
        group = sorted(by_paper[paper], key=lambda e: matrix.reviewer_index(e.reviewer))
        items = [(e.level, matrix.value(e.paper, e.reviewer)) for e in group]
        keep = set(consistent_subset(items))
        wrong = [{"reviewer": e.reviewer, "level": e.level.value, "similarity": v,
                  "tag": _diagnose(e.level, v)}
                 for idx, (e, (_, v)) in enumerate(zip(group, items)) if idx not in keep]
        results.append(PaperAccuracy(paper, len(keep), len(group), wrong))
    return AccuracyReport(results, histogram(matrix, evals, bin_width))


def count_random(matrix: SimilarityMatrix, assignment: Assignment) -> int:
    """Assigned pairs whose computed similarity is exactly zero."""
    n = 0
    for p, r in assignment.edges:
        if matrix.value(p, r) == 0.0 and matrix.cell_provenance(p, r) is Provenance.COMPUTED:
            n += 1
    return n
