"""Brute-force reference implementations, kept independent of the package code paths."""

import itertools
import math

LEVEL_RANK = {"Low": 0, "Medium": 1, "High": 2}


def root_path(parents, node):
    path = [node]
    while parents[path[-1]] is not None:
        path.append(parents[path[-1]])
    return path


def lca_by_paths(parents, a, b):
    """Deepest node on both root paths, with the three edge counts."""
    pa, pb = root_path(parents, a), root_path(parents, b)
    common = set(pa) & set(pb)
    anc = max(common, key=lambda n: len(root_path(parents, n)))
    n0 = len(root_path(parents, anc)) - 1
    return anc, n0, pa.index(anc), pb.index(anc)


def best_assignment(values, k, capacity, conflicts=frozenset()):
    """Exhaustive search over every k-subset per paper; returns (total, edges) or None."""
    n_p = len(values)
    n_r = len(values[0]) if n_p else 0
    options = []
    for i in range(n_p):
        eligible = [j for j in range(n_r) if (i, j) not in conflicts]
        options.append(list(itertools.combinations(eligible, k)))
    best = None
    load = [0] * n_r

    def rec(i, chosen):
        nonlocal best
        if i == n_p:
            edges = [(p, r) for p, rs in enumerate(chosen) for r in rs]
            total = math.fsum(values[p][r] for p, r in edges)
            if best is None or total > best[0]:
                best = (total, edges)
            return
        for combo in options[i]:
            if all(load[j] < capacity for j in combo):
                for j in combo:
                    load[j] += 1
                rec(i + 1, chosen + [combo])
                for j in combo:
                    load[j] -= 1

    rec(0, [])
    return best


def consistent(subset):
    """``subset`` of (level, value) pairs obeys the expertise ordering rules."""
    for level, v in subset:
        if level != "Low" and v == 0:
            return False
    for (l1, v1), (l2, v2) in itertools.combinations(subset, 2):
        r1, r2 = LEVEL_RANK[l1], LEVEL_RANK[l2]
        if r1 == r2:
            continue
        lo, hi = ((v1, v2) if r1 < r2 else (v2, v1))
        if not lo < hi:
            return False
    return True


def max_consistent(items):
    """(size, highs) of the best subset by exhaustive enumeration."""
    best = (0, 0)
    for size in range(len(items), 0, -1):
        for combo in itertools.combinations(items, size):
            if consistent(combo):
                highs = sum(1 for lvl, _ in combo if lvl == "High")
                best = max(best, (size, highs))
        if best[0] == size:
            break
    return best
