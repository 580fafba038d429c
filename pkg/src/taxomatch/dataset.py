"""Conference data files: parsing, validation and serialization.

Each entity class lives in its own JSON document:

* taxonomy   ``{"id", "label", "children": [...]}``
* papers     ``[{"id", "title", "keywords": [{"id", "weight"} | "concept-id", ...]}]``
* reviewers  ``[{"id", "name", "keywords": [...]}]``
* bids       ``[{"reviewer", "paper", "option": 1..5}]``
* evals      ``[{"reviewer", "paper", "level": "Low" | "Medium" | "High"}]``
* conflicts  ``[{"reviewer", "paper"}]``
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any

from taxomatch.augmentation import AugmentationConfig
from taxomatch.concept_sim import Measure, Weighting
from taxomatch.evaluation import Level, SelfEvaluation
from taxomatch.matching import (
    Assignment,
    Bid,
    BidOption,
    SetMeasure,
    SimilarityConfig,
    SimilarityMatrix,
)
from taxomatch.set_sim import DECLARED, Keyword, KeywordSelection
from taxomatch.taxonomy import Taxonomy, TaxonomyError, load_taxonomy

DECIMALS = 6


class DatasetError(ValueError):
    """Validation failure carrying a machine-readable list of problems."""

    def __init__(self, errors: list[dict[str, Any]]):
        super().__init__("; ".join(e["message"] for e in errors))
        self.errors = errors


def _err(code: str, message: str, **ids) -> dict[str, Any]:
    return {"code": code, "message": message, **ids}


@dataclass
class ConferenceDataset:
    taxonomy: Taxonomy
    papers: list[KeywordSelection]
    reviewers: list[KeywordSelection]
    bids: list[Bid] = field(default_factory=list)
    evals: list[SelfEvaluation] = field(default_factory=list)
    conflicts: list[tuple[str, str]] = field(default_factory=list)
    titles: dict[str, str] = field(default_factory=dict)
    names: dict[str, str] = field(default_factory=dict)

    def paper_ids(self) -> list[str]:
        return [p.owner for p in self.papers]

    def reviewer_ids(self) -> list[str]:
        return [r.owner for r in self.reviewers]


def _parse_selection(owner: str, raw: Any, where: str, errors: list) -> KeywordSelection | None:
    if not isinstance(raw, list) or not raw:
        errors.append(_err("empty_selection", f"{where} {owner!r} has no keywords", id=owner))
        return None
    kws = []
    for item in raw:
        if isinstance(item, str):
            item = {"id": item}
        if not isinstance(item, dict) or not isinstance(item.get("id"), str):
            errors.append(_err("bad_keyword", f"{where} {owner!r}: malformed keyword {item!r}", id=owner))
            return None
        w = item.get("weight", 1.0)
        if not isinstance(w, (int, float)) or isinstance(w, bool) or not 0.0 <= w <= 1.0:
            errors.append(_err("bad_weight", f"{where} {owner!r}: weight {w!r} of {item['id']!r} "
                                             "outside [0, 1]", id=owner, concept=item["id"]))
            return None
        kws.append(Keyword(item["id"], float(w), item.get("origin", DECLARED)))
    try:
        return KeywordSelection(owner, tuple(kws))
    except ValueError as exc:
        errors.append(_err("bad_selection", str(exc), id=owner))
        return None


def parse_entities(raw: Any, kind: str, name_field: str, taxonomy: Taxonomy, errors: list,
                   ) -> tuple[list[KeywordSelection], dict[str, str]]:
    if not isinstance(raw, list) or not raw:
        errors.append(_err(f"no_{kind}s", f"no {kind}s"))
        return [], {}
    out, names = [], {}
    for rec in raw:
        ident = rec.get("id") if isinstance(rec, dict) else None
        if not isinstance(ident, str) or not ident:
            errors.append(_err(f"bad_{kind}", f"{kind} record without a string id: {rec!r}"))
            continue
        if ident in names:
            errors.append(_err(f"duplicate_{kind}", f"duplicate {kind} id {ident!r}", id=ident))
            continue
        names[ident] = rec.get(name_field, "")
        sel = _parse_selection(ident, rec.get("keywords"), kind, errors)
        if sel is None:
            continue
        for concept in sel:
            if concept not in taxonomy:
                errors.append(_err("unknown_concept", f"{kind} {ident!r} selects unknown concept "
                                                      f"{concept!r}", id=ident, concept=concept))
        out.append(sel)
    return out, names


def _pairs(raw: Any, kind: str, papers: set, reviewers: set, errors: list) -> list[dict]:
    if raw is None:
        return []
    if not isinstance(raw, list):
        errors.append(_err(f"bad_{kind}", f"{kind} document must be a list"))
        return []
    good = []
    for rec in raw:
        if not isinstance(rec, dict):
            errors.append(_err(f"bad_{kind}", f"malformed {kind} record {rec!r}"))
            continue
        p, r = rec.get("paper"), rec.get("reviewer")
        if p not in papers:
            errors.append(_err("unknown_paper", f"{kind} references unknown paper {p!r}", id=p))
        elif r not in reviewers:
            errors.append(_err("unknown_reviewer", f"{kind} references unknown reviewer {r!r}", id=r))
        else:
            good.append(rec)
    return good


def parse_dataset(taxonomy_doc: Any, papers_doc: Any, reviewers_doc: Any, bids_doc: Any = None,
                  evals_doc: Any = None, conflicts_doc: Any = None) -> ConferenceDataset:
    """Build a dataset from already-decoded JSON documents, collecting every problem."""
    try:
        taxonomy = taxonomy_doc if isinstance(taxonomy_doc, Taxonomy) else load_taxonomy(taxonomy_doc)
    except TaxonomyError as exc:
        raise DatasetError([_err("bad_taxonomy", str(exc), id=exc.concept)]) from exc
    errors: list[dict[str, Any]] = []
    papers, titles = parse_entities(papers_doc, "paper", "title", taxonomy, errors)
    reviewers, names = parse_entities(reviewers_doc, "reviewer", "name", taxonomy, errors)
    pids, rids = set(titles), set(names)

    bids, seen = [], set()
    for rec in _pairs(bids_doc, "bid", pids, rids, errors):
        key = (rec["paper"], rec["reviewer"])
        try:
            option = BidOption(rec.get("option"))
        except ValueError:
            errors.append(_err("bad_bid_option", f"bid option {rec.get('option')!r} not in 1..5",
                               paper=key[0], reviewer=key[1]))
            continue
        if key in seen:
            errors.append(_err("duplicate_bid", f"duplicate bid by {key[1]!r} on {key[0]!r}",
                               paper=key[0], reviewer=key[1]))
            continue
        seen.add(key)
        bids.append(Bid(key[1], key[0], option))

    evals, seen = [], set()
    for rec in _pairs(evals_doc, "eval", pids, rids, errors):
        key = (rec["paper"], rec["reviewer"])
        try:
            level = Level(rec.get("level"))
        except ValueError:
            errors.append(_err("bad_level", f"expertise level {rec.get('level')!r} not Low/Medium/High",
                               paper=key[0], reviewer=key[1]))
            continue
        if key in seen:
            errors.append(_err("duplicate_eval", f"duplicate self-evaluation by {key[1]!r} on {key[0]!r}",
                               paper=key[0], reviewer=key[1]))
            continue
        seen.add(key)
        evals.append(SelfEvaluation(key[1], key[0], level))

    conflicts = [(rec["paper"], rec["reviewer"])
                 for rec in _pairs(conflicts_doc, "conflict", pids, rids, errors)]
    if errors:
        raise DatasetError(errors)
    return ConferenceDataset(taxonomy, papers, reviewers, bids, evals, conflicts, titles, names)


def _read_json(path: str | Path | None) -> Any:
    if path is None:
        return None
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise DatasetError([_err("missing_file", f"file not found: {path}", path=str(path))]) from None
    except json.JSONDecodeError as exc:
        raise DatasetError([_err("bad_json", f"{path}: {exc}", path=str(path))]) from None


def load_dataset(taxonomy: str | Path, papers: str | Path, reviewers: str | Path,
                 bids: str | Path | None = None, evals: str | Path | None = None,
                 conflicts: str | Path | None = None) -> ConferenceDataset:
    return parse_dataset(_read_json(taxonomy), _read_json(papers), _read_json(reviewers),
                         _read_json(bids), _read_json(evals), _read_json(conflicts))


def selections_to_json(selections: list[KeywordSelection], name_field: str,
                       names: dict[str, str]) -> list[dict[str, Any]]:
    return [{"id": s.owner, name_field: names.get(s.owner, ""), "keywords": s.to_list()}
            for s in selections]


def dataset_to_json(ds: ConferenceDataset) -> dict[str, Any]:
    """The six documents of ``ds``, keyed by entity class."""
    return {
        "taxonomy": ds.taxonomy.to_dict(),
        "papers": selections_to_json(ds.papers, "title", ds.titles),
        "reviewers": selections_to_json(ds.reviewers, "name", ds.names),
        "bids": [{"reviewer": b.reviewer, "paper": b.paper, "option": int(b.option)} for b in ds.bids],
        "evals": [{"reviewer": e.reviewer, "paper": e.paper, "level": e.level.value} for e in ds.evals],
        "conflicts": [{"reviewer": r, "paper": p} for p, r in ds.conflicts],
    }


def write_dataset(ds: ConferenceDataset, directory: str | Path) -> dict[str, Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = {}
    for name, doc in dataset_to_json(ds).items():
        paths[name] = directory / f"{name}.json"
        write_json(paths[name], doc)
    return paths


def write_json(path: Path, doc: Any) -> None:
    Path(path).write_text(json.dumps(doc, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


def fmt(value: float) -> str:
    return f"{value:.{DECIMALS}f}"


def _csv_text(rows: list[list[str]]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def matrix_csv(matrix: SimilarityMatrix) -> str:
    rows = [["paper", *matrix.reviewers]]
    rows += [[p, *(fmt(v) for v in matrix.values[i])] for i, p in enumerate(matrix.papers)]
    return _csv_text(rows)


def provenance_csv(matrix: SimilarityMatrix) -> str:
    rows = [["paper", *matrix.reviewers]]
    rows += [[p, *matrix.provenance[i]] for i, p in enumerate(matrix.papers)]
    return _csv_text(rows)


def read_matrix_csv(values_text: str, provenance_text: str | None = None) -> SimilarityMatrix:
    vrows = list(csv.reader(io.StringIO(values_text)))
    reviewers = tuple(vrows[0][1:])
    papers = tuple(r[0] for r in vrows[1:])
    values = [[float(x) for x in r[1:]] for r in vrows[1:]]
    if provenance_text is None:
        return SimilarityMatrix.from_values(values, papers, reviewers)
    prows = list(csv.reader(io.StringIO(provenance_text)))
    return SimilarityMatrix(papers, reviewers, values, [r[1:] for r in prows[1:]])


def assignment_csv(matrix: SimilarityMatrix, assignment: Assignment) -> str:
    rows = [["paper", "reviewer", "similarity", "provenance"]]
    for p, r in assignment.edges:
        rows.append([p, r, fmt(matrix.value(p, r)), matrix.cell_provenance(p, r).value])
    return _csv_text(rows)


def read_assignment_csv(text: str, k: int = 0, capacity: int = 0) -> Assignment:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or not {"paper", "reviewer"} <= set(reader.fieldnames):
        raise DatasetError([_err("bad_assignment", "assignment CSV needs paper and reviewer columns")])
    return Assignment(tuple((row["paper"], row["reviewer"]) for row in reader), k, capacity)


@dataclass(frozen=True)
class RunConfig:
    measure: Measure = Measure.WU_PALMER
    set_measure: SetMeasure = SetMeasure.SYMMETRIC
    weighting: Weighting = Weighting.NONE
    k: int = 3
    capacity: int | None = None
    solver: str = "optimal"
    bid_mapping: dict[int, float] | None = None
    smoothing: float = 1.0
    bin_width: float = 0.1
    augmentation: AugmentationConfig = AugmentationConfig()
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "measure", Measure(self.measure))
        object.__setattr__(self, "set_measure", SetMeasure(self.set_measure))
        object.__setattr__(self, "weighting", Weighting(self.weighting))
        if self.solver not in ("optimal", "greedy"):
            raise ValueError(f"unknown solver {self.solver!r}")
        if self.k < 0:
            raise ValueError("k must be non-negative")
        if self.capacity is not None and self.capacity < 0:
            raise ValueError("capacity must be non-negative")
        if self.smoothing < 0:
            raise ValueError("smoothing must be non-negative")
        if self.bid_mapping is not None:
            object.__setattr__(self, "bid_mapping",
                               {int(BidOption(int(k))): float(v) for k, v in self.bid_mapping.items()})

    @property
    def similarity(self) -> SimilarityConfig:
        return SimilarityConfig(self.measure, self.set_measure, self.weighting, self.smoothing)

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> RunConfig:
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        doc = dict(doc)
        if "augmentation" in doc:
            aug = dict(doc["augmentation"])
            if aug.get("generalization_band") is not None:
                aug["generalization_band"] = tuple(aug["generalization_band"])
            if "expert_bid_options" in aug:
                aug["expert_bid_options"] = tuple(aug["expert_bid_options"])
            doc["augmentation"] = AugmentationConfig(**aug)
        return cls(**doc)

    def override(self, **changes) -> RunConfig:
        return replace(self, **{k: v for k, v in changes.items() if v is not None})
