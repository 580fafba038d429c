"""Command-line entry point: ``taxomatch {similarity,assign,evaluate,augment,generate}``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from taxomatch.augmentation import augment_reviewers, validate_selection_depth
from taxomatch.dataset import (
    ConferenceDataset,
    DatasetError,
    RunConfig,
    assignment_csv,
    load_dataset,
    matrix_csv,
    provenance_csv,
    read_assignment_csv,
    selections_to_json,
    write_dataset,
    write_json,
)
from taxomatch.evaluation import count_random, score_accuracy
from taxomatch.matching import (
    InfeasibleError,
    SimilarityMatrix,
    apply_bids,
    apply_conflicts,
    assign_greedy,
    assign_optimal,
    build_matrix,
    default_capacity,
)
from taxomatch.synthetic import random_conference, random_self_evaluations
from taxomatch.taxonomy import TaxonomyError

EXIT_OK, EXIT_INVALID, EXIT_INFEASIBLE = 0, 2, 3


def computed_matrix(ds: ConferenceDataset, cfg: RunConfig) -> SimilarityMatrix:
    return build_matrix(ds.papers, ds.reviewers, ds.taxonomy, cfg.similarity)


def assignment_matrix(ds: ConferenceDataset, cfg: RunConfig) -> SimilarityMatrix:
    """Computed factors with bid overrides and conflicts applied."""
    m = apply_bids(computed_matrix(ds, cfg), ds.bids, cfg.bid_mapping)
    return apply_conflicts(m, ds.conflicts)


def _capacity(ds: ConferenceDataset, cfg: RunConfig) -> int:
    if cfg.capacity is not None:
        return cfg.capacity
    return default_capacity(cfg.k, len(ds.papers), len(ds.reviewers))


def cmd_similarity(ds: ConferenceDataset, cfg: RunConfig, out: Path) -> dict:
    m = assignment_matrix(ds, cfg)
    (out / "matrix.csv").write_text(matrix_csv(m), encoding="utf-8")
    (out / "provenance.csv").write_text(provenance_csv(m), encoding="utf-8")
    return {"papers": len(m.papers), "reviewers": len(m.reviewers)}


def cmd_assign(ds: ConferenceDataset, cfg: RunConfig, out: Path) -> dict:
    m = assignment_matrix(ds, cfg)
    capacity = _capacity(ds, cfg)
    solve = assign_optimal if cfg.solver == "optimal" else assign_greedy
    a = solve(m, cfg.k, capacity)
    (out / "assignment.csv").write_text(assignment_csv(m, a), encoding="utf-8")
    loads = a.loads()
    summary = {
        "solver": cfg.solver,
        "k": cfg.k,
        "capacity": capacity,
        "assignments": len(a),
        "total_similarity": round(a.total(m), 6),
        "random_assignments": count_random(m, a),
        "reviewer_load": {r: loads.get(r, 0) for r in m.reviewers},
    }
    write_json(out / "summary.json", summary)
    return summary


def cmd_evaluate(ds: ConferenceDataset, cfg: RunConfig, out: Path, assignment_path: Path) -> dict:
    try:
        text = assignment_path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise DatasetError([{"code": "missing_file", "message": f"file not found: {assignment_path}",
                             "path": str(assignment_path)}]) from None
    a = read_assignment_csv(text, cfg.k, _capacity(ds, cfg))
    # accuracy is judged on the keyword-derived factors, before bid overrides
    m = computed_matrix(ds, cfg)
    blocked = assignment_matrix(ds, cfg).conflict_mask()
    errors = []
    pids, rids = set(m.papers), set(m.reviewers)
    for p, r in a.edges:
        if p not in pids or r not in rids:
            errors.append({"code": "mismatched_assignment",
                           "message": f"assignment pair ({p!r}, {r!r}) not in dataset", "paper": p,
                           "reviewer": r})
        elif blocked[m.paper_index(p), m.reviewer_index(r)]:
            errors.append({"code": "conflict_assigned",
                           "message": f"assignment uses conflicted pair ({p!r}, {r!r})", "paper": p,
                           "reviewer": r})
    if len(set(a.edges)) != len(a.edges):
        errors.append({"code": "duplicate_assignment", "message": "assignment lists a pair twice"})
    if errors:
        raise DatasetError(errors)
    try:
        report = score_accuracy(m, a, ds.evals, cfg.bin_width)
    except ValueError as exc:
        raise DatasetError([{"code": "unassigned_eval", "message": str(exc)}]) from None
    doc = report.to_dict()
    for paper in doc["papers"]:
        for cell in paper["incorrect"]:
            cell["similarity"] = round(cell["similarity"], 6)
    doc["random_assignments"] = count_random(m, a)
    write_json(out / "report.json", doc)
    rows = report.histogram.to_rows()
    lines = ["bin_low,bin_high,Low,Medium,High"]
    lines += [f"{r['bin_low']:.2f},{r['bin_high']:.2f},{r['Low']},{r['Medium']},{r['High']}"
              for r in rows]
    (out / "histogram.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    return {"correct": doc["correct"], "total": doc["total"], "fraction": doc["fraction"]}


def cmd_augment(ds: ConferenceDataset, cfg: RunConfig, out: Path) -> dict:
    reviewers, diff = augment_reviewers(ds.reviewers, ds.papers, ds.bids, ds.taxonomy, cfg.augmentation)
    violations = [
        {"owner": v.owner, "role": role, "concept": v.concept, "depth": v.depth,
         "min_depth": v.min_depth}
        for role, sels in (("paper", ds.papers), ("reviewer", ds.reviewers))
        for s in sels for v in validate_selection_depth(s, ds.taxonomy, cfg.augmentation)
    ]
    write_json(out / "reviewers_augmented.json", selections_to_json(reviewers, "name", ds.names))
    write_json(out / "augmentation_diff.json", [d.to_dict() for d in diff])
    write_json(out / "depth_violations.json", violations)
    return {"added": len(diff), "depth_violations": len(violations)}


def cmd_generate(cfg: RunConfig, out: Path, n_papers: int, n_reviewers: int, n_nodes: int) -> dict:
    rng = np.random.default_rng(cfg.seed)
    ds = random_conference(rng, n_nodes=n_nodes, n_papers=n_papers, n_reviewers=n_reviewers)
    m = assignment_matrix(ds, cfg)
    a = assign_optimal(m, cfg.k, _capacity(ds, cfg))
    ds.evals = random_self_evaluations(a.edges, rng)
    write_dataset(ds, out)
    return {"papers": n_papers, "reviewers": n_reviewers, "nodes": n_nodes}


def _add_data_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--taxonomy", required=True, type=Path)
    p.add_argument("--papers", required=True, type=Path)
    p.add_argument("--reviewers", required=True, type=Path)
    p.add_argument("--bids", type=Path)
    p.add_argument("--evals", type=Path)
    p.add_argument("--conflicts", type=Path)


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON run configuration; flags override it")
    p.add_argument("--measure", choices=["wu_palmer", "lin"])
    p.add_argument("--set-measure", choices=["jaccard", "dice", "symmetric", "asymmetric"])
    p.add_argument("--weighting", choices=["none", "relative", "absolute"])
    p.add_argument("--k", type=int)
    p.add_argument("--capacity", type=int)
    p.add_argument("--solver", choices=["optimal", "greedy"])
    p.add_argument("--out-dir", type=Path, default=Path("."))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="taxomatch", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (("similarity", "write the similarity matrix and provenance CSVs"),
                        ("assign", "assign reviewers to papers"),
                        ("evaluate", "score similarity factors against self-evaluations"),
                        ("augment", "apply keyword augmentation rules to reviewers")):
        p = sub.add_parser(name, help=help_)
        _add_data_flags(p)
        _add_config_flags(p)
        if name == "evaluate":
            p.add_argument("--assignment", required=True, type=Path)
    g = sub.add_parser("generate", help="write a seeded synthetic dataset")
    _add_config_flags(g)
    g.add_argument("--seed", type=int)
    g.add_argument("--n-papers", type=int, default=12)
    g.add_argument("--n-reviewers", type=int, default=8)
    g.add_argument("--n-nodes", type=int, default=30)
    return parser


def _config(args) -> RunConfig:
    cfg = RunConfig()
    if args.config is not None:
        cfg = RunConfig.from_dict(json.loads(args.config.read_text(encoding="utf-8")))
    return cfg.override(measure=args.measure, set_measure=args.set_measure, weighting=args.weighting,
                        k=args.k, capacity=args.capacity, solver=args.solver,
                        seed=getattr(args, "seed", None))


def _fail(code: int, errors: list[dict]) -> int:
    json.dump({"errors": errors}, sys.stderr, indent=2)
    sys.stderr.write("\n")
    return code


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config(args)
        out = args.out_dir
        out.mkdir(parents=True, exist_ok=True)
        if args.command == "generate":
            result = cmd_generate(cfg, out, args.n_papers, args.n_reviewers, args.n_nodes)
        else:
            ds = load_dataset(args.taxonomy, args.papers, args.reviewers, args.bids, args.evals,
                              args.conflicts)
            if args.command == "similarity":
                result = cmd_similarity(ds, cfg, out)
            elif args.command == "assign":
                result = cmd_assign(ds, cfg, out)
            elif args.command == "evaluate":
                result = cmd_evaluate(ds, cfg, out, args.assignment)
            else:
                result = cmd_augment(ds, cfg, out)
    except DatasetError as exc:
        return _fail(EXIT_INVALID, exc.errors)
    except TaxonomyError as exc:
        return _fail(EXIT_INVALID, [{"code": "taxonomy", "message": str(exc), "id": exc.concept}])
    except InfeasibleError as exc:
        return _fail(EXIT_INFEASIBLE, [{"code": "infeasible", "message": str(exc),
                                        "constraint": exc.constraint}])
    except (ValueError, KeyError) as exc:
        return _fail(EXIT_INVALID, [{"code": "invalid", "message": str(exc)}])
    print(json.dumps(result, sort_keys=True))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
