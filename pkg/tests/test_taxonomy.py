import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from taxomatch import Taxonomy, TaxonomyError, estimate_probabilities, lca, load_taxonomy
from taxomatch.synthetic import random_taxonomy

from conftest import SIX_PARENTS
from oracles import lca_by_paths


def test_depths_of_six_node_tree(six):
    assert len(six) == 6
    assert six.root == "root"
    assert six.depth("A1") == 2
    assert six.depth("B") == 1
    assert six.children("A") == ("A1", "A2")
    assert six.descendants("A") == {"A", "A1", "A2"}


def test_single_node():
    tax = load_taxonomy({"id": "root", "label": "root"})
    assert tax.depth("root") == 0
    assert tax.height == 0


def test_flat_records_equivalent_to_nested(six):
    flat = [{"id": n, "label": n, "parent": p} for n, p in SIX_PARENTS.items()]
    tax = load_taxonomy(flat)
    assert {n: tax.depth(n) for n in tax} == {n: six.depth(n) for n in six}


def test_two_parents_is_not_a_tree():
    doc = [{"id": "root", "label": "r"}, {"id": "A", "label": "a", "parent": "root"},
           {"id": "B", "label": "b", "parent": "root"},
           {"id": "A1", "label": "a1", "parents": ["A", "B"]}]
    with pytest.raises(TaxonomyError, match="not a tree") as err:
        load_taxonomy(doc)
    assert err.value.concept == "A1"


def test_nested_duplicate_id_is_not_a_tree():
    doc = {"id": "root", "label": "r", "children": [
        {"id": "A", "label": "a", "children": [{"id": "X", "label": "x"}]},
        {"id": "B", "label": "b", "children": [{"id": "X", "label": "x"}]}]}
    with pytest.raises(TaxonomyError, match="duplicate id 'X'"):
        load_taxonomy(doc)


@pytest.mark.parametrize("doc, concept", [
    ([{"id": "r1", "label": "a"}, {"id": "r2", "label": "b"}], "r2"),
    ([{"id": "root", "label": "r"}, {"id": "a", "label": "a", "parent": "b"},
      {"id": "b", "label": "b", "parent": "a"}], "a"),
    ({"id": "root", "label": "  "}, "root"),
])
def test_malformed_documents_name_the_offender(doc, concept):
    with pytest.raises(TaxonomyError) as err:
        load_taxonomy(doc)
    assert err.value.concept == concept


def test_unknown_parent():
    with pytest.raises(TaxonomyError, match="unknown parent"):
        load_taxonomy([{"id": "root", "label": "r"}, {"id": "a", "label": "a", "parent": "zz"}])


def test_round_trip(six):
    again = load_taxonomy(json.dumps(six.to_dict()))
    assert again.to_dict() == six.to_dict()


@pytest.mark.parametrize("a, b, expected", [
    ("A1", "A2", ("A", 1, 1, 1)),
    ("A1", "B1", ("root", 0, 2, 2)),
    ("A1", "A1", ("A1", 2, 0, 0)),
    ("A", "A1", ("A", 1, 0, 1)),
    ("root", "root", ("root", 0, 0, 0)),
])
def test_lca_examples(six, a, b, expected):
    res = lca(six, a, b)
    assert (res.ancestor, res.n0, res.n1, res.n2) == expected


def test_lca_unknown_concept(six):
    with pytest.raises(TaxonomyError):
        lca(six, "A1", "nope")


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 60), st.integers(0, 2**32 - 1))
def test_lca_matches_root_path_oracle(n, seed):
    tax = random_taxonomy(n, np.random.default_rng(seed))
    parents = {c: tax.parent(c) for c in tax}
    for a in tax:
        for b in tax:
            res = lca(tax, a, b)
            assert (res.ancestor, res.n0, res.n1, res.n2) == lca_by_paths(parents, a, b)
            assert res.n0 + res.n1 == tax.depth(a)
            assert res.n0 + res.n2 == tax.depth(b)
            swapped = lca(tax, b, a)
            assert (swapped.ancestor, swapped.n1, swapped.n2) == (res.ancestor, res.n2, res.n1)


def test_probabilities_unsmoothed(six):
    table = estimate_probabilities(six, [["A1", "A2"], ["A1", "B1"]], smoothing=0)
    assert table["A1"] == pytest.approx(0.5, abs=1e-12)
    assert table["A"] == pytest.approx(0.75, abs=1e-12)
    assert table["root"] == 1.0
    assert table.counts["root"] == 4


def test_probabilities_smoothed(six):
    table = estimate_probabilities(six, [["A1", "A2"], ["A1", "B1"]], smoothing=1)
    assert table.counts["A1"] == 3 and table.counts["A"] == 6 and table.counts["root"] == 10
    assert table["A1"] == pytest.approx(0.3, abs=1e-12)
    assert table["A"] == pytest.approx(0.6, abs=1e-12)
    assert table["root"] == 1.0


def test_probabilities_empty_selections_smoothed(six):
    table = estimate_probabilities(six, [], smoothing=1)
    # inclusive count equals subtree size
    assert table["A"] == pytest.approx(3 / 6)
    assert table["A1"] == pytest.approx(1 / 6)
    _assert_monotone(six, table)


def test_probabilities_errors(six):
    with pytest.raises(TaxonomyError):
        estimate_probabilities(six, [["Z"]])
    with pytest.raises(ValueError):
        estimate_probabilities(six, [], smoothing=0)


def _assert_monotone(tax, table):
    assert table[tax.root] == 1.0
    for c in tax:
        p = tax.parent(c)
        if p is not None:
            assert table[c] <= table[p]


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 40), st.integers(0, 2**32 - 1), st.sampled_from([0.0, 0.5, 1.0]))
def test_probability_monotonicity(n, seed, smoothing):
    rng = np.random.default_rng(seed)
    tax = random_taxonomy(n, rng)
    nodes = list(tax)
    selections = [[nodes[i] for i in rng.choice(n, size=rng.integers(1, n + 1), replace=False)]
                  for _ in range(5)]
    _assert_monotone(tax, estimate_probabilities(tax, selections, smoothing))


def test_from_parents_matches_fixture(six):
    tax = Taxonomy.from_parents(SIX_PARENTS)
    assert [tax.depth(n) for n in SIX_PARENTS] == [six.depth(n) for n in SIX_PARENTS]
