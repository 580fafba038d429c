"""Rooted keyword taxonomy: loading, structural queries and concept probabilities."""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Any, Iterable, Mapping


class TaxonomyError(ValueError):
    """Raised for malformed taxonomy documents or unknown concept ids."""

    def __init__(self, message: str, concept: str | None = None):
        super().__init__(message)
        self.concept = concept


@dataclass(frozen=True)
class ConceptNode:
    id: str
    label: str
    depth: int


@dataclass(frozen=True)
class LcaResult:
    """Closest common ancestor of two nodes plus the three edge counts around it."""

    ancestor: str
    n0: int
    n1: int
    n2: int


class Taxonomy:
    """Immutable rooted tree of keyword concepts.

    Build one with :func:`load_taxonomy` or :meth:`Taxonomy.from_parents`.
    """

    def __init__(self, root: str, parent: Mapping[str, str | None], labels: Mapping[str, str],
                 children: Mapping[str, tuple[str, ...]]):
        self._root = root
        self._parent = MappingProxyType(dict(parent))
        self._children = MappingProxyType(dict(children))
        depth = {root: 0}
        order = [root]
        for node in order:
            for child in self._children[node]:
                depth[child] = depth[node] + 1
                order.append(child)
        self._order = tuple(order)
        self._nodes = MappingProxyType(
            {n: ConceptNode(n, labels[n], depth[n]) for n in order})

    @classmethod
    def from_parents(cls, parents: Mapping[str, str | None],
                     labels: Mapping[str, str] | None = None) -> Taxonomy:
        """Build from a child -> parent map (the root maps to None)."""
        records = [{"id": n, "label": (labels or {}).get(n, n), "parent": p}
                   for n, p in parents.items()]
        return _from_records(records)

    @property
    def root(self) -> str:
        return self._root

    @property
    def nodes(self) -> Mapping[str, ConceptNode]:
        return self._nodes

    def __len__(self) -> int:
        return len(self._nodes)

    def __contains__(self, concept: object) -> bool:
        return concept in self._nodes

    def __iter__(self):
        """Iterate concept ids in breadth-first order from the root."""
        return iter(self._order)

    def _check(self, concept: str) -> None:
        if concept not in self._nodes:
            raise TaxonomyError(f"unknown concept id {concept!r}", concept)

    def parent(self, concept: str) -> str | None:
        self._check(concept)
        return self._parent[concept]

    def children(self, concept: str) -> tuple[str, ...]:
        self._check(concept)
        return self._children[concept]

    def depth(self, concept: str) -> int:
        self._check(concept)
        return self._nodes[concept].depth

    def label(self, concept: str) -> str:
        self._check(concept)
        return self._nodes[concept].label

    @property
    def height(self) -> int:
        return max(node.depth for node in self._nodes.values())

    def ancestors(self, concept: str) -> list[str]:
        """Path from ``concept`` up to the root, both ends included."""
        self._check(concept)
        path = [concept]
        while self._parent[path[-1]] is not None:
            path.append(self._parent[path[-1]])
        return path

    def descendants(self, concept: str) -> set[str]:
        """All nodes in the subtree rooted at ``concept``, itself included."""
        self._check(concept)
        out = {concept}
        stack = [concept]
        while stack:
            for child in self._children[stack.pop()]:
                out.add(child)
                stack.append(child)
        return out

    def is_leaf(self, concept: str) -> bool:
        return not self.children(concept)

    def to_dict(self) -> dict[str, Any]:
        """Nested ``{id, label, children}`` document for this tree."""

        def build(node: str) -> dict[str, Any]:
            return {"id": node, "label": self._nodes[node].label,
                    "children": [build(c) for c in self._children[node]]}

        return build(self._root)

    def __repr__(self) -> str:
        return f"Taxonomy(root={self._root!r}, nodes={len(self)})"


def _from_records(records: list[dict[str, Any]]) -> Taxonomy:
    labels: dict[str, str] = {}
    parent: dict[str, str | None] = {}
    for rec in records:
        if not isinstance(rec, dict) or "id" not in rec:
            raise TaxonomyError(f"node record without id: {rec!r}")
        node = rec["id"]
        if not isinstance(node, str) or not node:
            raise TaxonomyError(f"concept id must be a non-empty string, got {node!r}")
        if node in labels:
            raise TaxonomyError(f"not a tree: duplicate id {node!r}", node)
        label = rec.get("label", node)
        if not isinstance(label, str) or not label.strip():
            raise TaxonomyError(f"empty label for {node!r}", node)
        labels[node] = label
        if "parents" in rec:
            ps = rec["parents"] or []
            if len(ps) > 1:
                raise TaxonomyError(f"not a tree: {node!r} lists {len(ps)} parents", node)
            parent[node] = ps[0] if ps else None
        else:
            parent[node] = rec.get("parent")

    roots = [n for n, p in parent.items() if p is None]
    if not roots:
        raise TaxonomyError("not a tree: no root (every node has a parent)")
    if len(roots) > 1:
        raise TaxonomyError(f"not a tree: multiple roots {roots!r}", roots[1])
    children: dict[str, list[str]] = {n: [] for n in labels}
    for node, p in parent.items():
        if p is None:
            continue
        if p not in labels:
            raise TaxonomyError(f"{node!r} refers to unknown parent {p!r}", node)
        children[p].append(node)

    # everything reachable from the single root; leftovers sit on a cycle
    seen = {roots[0]}
    stack = [roots[0]]
    while stack:
        for c in children[stack.pop()]:
            seen.add(c)
            stack.append(c)
    if len(seen) != len(labels):
        stray = next(n for n in labels if n not in seen)
        raise TaxonomyError(f"not a tree: cycle through {stray!r}", stray)
    return Taxonomy(roots[0], parent, labels, {n: tuple(cs) for n, cs in children.items()})


def _flatten(doc: dict[str, Any]) -> list[dict[str, Any]]:
    records = []
    stack: list[tuple[dict[str, Any], str | None]] = [(doc, None)]
    while stack:
        node, parent = stack.pop()
        if not isinstance(node, dict):
            raise TaxonomyError(f"taxonomy node must be an object, got {node!r}")
        records.append({"id": node.get("id"), "label": node.get("label", node.get("id")),
                        "parent": parent})
        kids = node.get("children") or []
        for child in reversed(kids):
            stack.append((child, node.get("id")))
    return records


def load_taxonomy(document: str | Path | dict | list) -> Taxonomy:
    """Parse a taxonomy document.

    Accepts the nested ``{"id", "label", "children": [...]}`` form with a
    single top-level root, or a flat list of ``{"id", "label", "parent"}``
    records.  Strings are parsed as JSON text; ``Path`` objects are read
    from disk.
    """
    if isinstance(document, Path):
        document = json.loads(document.read_text(encoding="utf-8"))
    elif isinstance(document, str):
        document = json.loads(document)
    if isinstance(document, dict):
        return _from_records(_flatten(document))
    if isinstance(document, list):
        return _from_records(document)
    raise TaxonomyError(f"unsupported taxonomy document type {type(document).__name__}")


def lca(taxonomy: Taxonomy, a: str, b: str) -> LcaResult:
    da, db = taxonomy.depth(a), taxonomy.depth(b)
    x, y = a, b
    while taxonomy.depth(x) > taxonomy.depth(y):
        x = taxonomy.parent(x)
    while taxonomy.depth(y) > taxonomy.depth(x):
        y = taxonomy.parent(y)
    while x != y:
        x, y = taxonomy.parent(x), taxonomy.parent(y)
    n0 = taxonomy.depth(x)
    return LcaResult(x, n0, da - n0, db - n0)


@dataclass(frozen=True)
class ProbabilityTable:
    """Probability of meeting each concept or one of its descendants."""

    p: Mapping[str, float]
    total: int
    smoothing: float = 1.0
    counts: Mapping[str, float] = field(default_factory=dict, repr=False)

    def __getitem__(self, concept: str) -> float:
        try:
            return self.p[concept]
        except KeyError:
            raise TaxonomyError(f"no probability for concept {concept!r}", concept) from None

    def __contains__(self, concept: object) -> bool:
        return concept in self.p

    def information_content(self, concept: str) -> float:
        return -math.log(self[concept])


def estimate_probabilities(taxonomy: Taxonomy, selections: Iterable[Iterable[str]],
                           smoothing: float = 1.0) -> ProbabilityTable:
    """Descendant-inclusive selection frequencies with a per-node pseudo-count.

    Each selection is any iterable of concept ids (a ``KeywordSelection``
    iterates its concept ids).
    """
    if smoothing < 0:
        raise ValueError("smoothing must be non-negative")
    own: Counter[str] = Counter()
    total = 0
    for sel in selections:
        for concept in sel:
            if concept not in taxonomy:
                raise TaxonomyError(f"unknown concept id {concept!r} in selection", concept)
            own[concept] += 1
            total += 1
    if total == 0 and smoothing == 0:
        raise ValueError("cannot estimate probabilities: no selections and zero smoothing")

    inclusive: dict[str, float] = {}
    for node in reversed(list(taxonomy)):
        inclusive[node] = own[node] + smoothing + sum(inclusive[c] for c in taxonomy.children(node))
    root_count = inclusive[taxonomy.root]
    p = {n: inclusive[n] / root_count for n in taxonomy}
    p[taxonomy.root] = 1.0
    return ProbabilityTable(MappingProxyType(p), total, smoothing, MappingProxyType(inclusive))
