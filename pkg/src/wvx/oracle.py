"""Brute-force reference implementations.

Linear-scan answers for the three sequence queries and rectangle
queries, plus an exhaustive optimum for prefix-code cost. These are the
ground truth that every indexed structure is tested against, and they
back the CLI's verify mode. No attention is paid to speed.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .errors import NotEnoughOccurrences


def naive_access(seq, i):
    n = len(seq)
    if not 1 <= i <= n:
        raise IndexError(f"position {i} out of range [1, {n}]")
    return int(seq[i - 1])


def naive_rank(seq, a, i):
    n = len(seq)
    if not 0 <= i <= n:
        raise IndexError(f"prefix length {i} out of range [0, {n}]")
    arr = np.asarray(seq)
    return int((arr[:i] == a).sum())


def naive_select(seq, a, j):
    if j < 1:
        raise NotEnoughOccurrences(f"occurrence index {j} must be at least 1")
    arr = np.asarray(seq)
    hits = np.flatnonzero(arr == a)
    if j > hits.size:
        raise NotEnoughOccurrences(
            f"not enough occurrences: requested #{j} of symbol {a}, have {hits.size}"
        )
    return int(hits[j - 1]) + 1


def naive_range(seq, x1, x2, y1, y2):
    """(count, [(symbol, multiplicity)...]) of values in seq[x1..x2] within [y1, y2]."""
    if x1 > x2 or y1 > y2:
        return 0, []
    arr = np.asarray(seq)
    window = arr[x1 - 1 : x2]
    sel = window[(window >= y1) & (window <= y2)]
    if sel.size == 0:
        return 0, []
    syms, mults = np.unique(sel, return_counts=True)
    return int(sel.size), [(int(s), int(m)) for s, m in zip(syms, mults)]


@lru_cache(maxsize=None)
def _depth_multisets(k):
    """Leaf-depth multisets of all full binary trees with k leaves."""
    if k == 1:
        return frozenset({(0,)})
    out = set()
    for i in range(1, k):
        for left in _depth_multisets(i):
            for right in _depth_multisets(k - i):
                out.add(tuple(sorted([d + 1 for d in left] + [d + 1 for d in right])))
    return frozenset(out)


def optimal_code_cost(counts):
    """Minimum total bits over every complete binary prefix code.

    Exhaustive over tree shapes, so limited to at most 8 coded symbols.
    A lone coded symbol costs one bit per occurrence, matching the
    length-1 convention used by the code builders.
    """
    pos = sorted((int(c) for c in counts if c > 0), reverse=True)
    if not pos:
        raise ValueError("all counts are zero")
    if len(pos) > 8:
        raise ValueError("exhaustive enumeration supports at most 8 coded symbols")
    if len(pos) == 1:
        return pos[0]
    best = math.inf
    for multiset in _depth_multisets(len(pos)):
        cost = sum(c * d for c, d in zip(pos, sorted(multiset)))
        best = min(best, cost)
    return int(best)
