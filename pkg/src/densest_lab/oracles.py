"""Brute-force oracles over vertex subsets and cliques.

These are the reference values every solver and reduction is checked
against, so they stay deliberately simple: full enumeration, explicit work
budgets, no pruning that could hide a bug.
"""
from __future__ import annotations

from enum import Enum
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Iterable

import numpy as np

from .errors import InvalidInputError, OracleTooLarge, check_budget, default_budget
from .graph import Graph, Witness


class SizeMode(str, Enum):
    EXACT = "exact-k"
    AT_MOST = "at-most-k"
    AT_LEAST = "at-least-k"


def subset_edge_counts(g: Graph, budget: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Edge count and popcount for every vertex mask ``0 .. 2**n - 1``.

    Built incrementally: masks whose top bit is ``v`` extend the masks below
    ``2**v`` by vertex ``v``.
    """
    n = g.n
    check_budget(1 << n, budget, f"2^{n} subset enumeration")
    size = 1 << n
    edges = np.zeros(size, dtype=np.int32)
    pop = np.zeros(size, dtype=np.int16)
    masks = np.arange(size, dtype=np.int64)
    for v in range(n):
        lo, hi = 1 << v, 1 << (v + 1)
        below = masks[:lo]
        pop[lo:hi] = pop[:lo] + 1
        edges[lo:hi] = edges[:lo] + pop[below & g.adj_masks[v]]
    return edges, pop


def _mask_vertices(mask: int) -> tuple[int, ...]:
    out = []
    v = 0
    while mask:
        if mask & 1:
            out.append(v)
        mask >>= 1
        v += 1
    return tuple(out)


def _lex_first(masks: Iterable[int]) -> tuple[int, ...]:
    return min(_mask_vertices(int(m)) for m in masks)


def _best_edges_by_size(g: Graph, budget: int | None) -> list[int]:
    edges, pop = subset_edge_counts(g, budget)
    best = [-1] * (g.n + 1)
    order = np.argsort(pop, kind="stable")
    bounds = np.searchsorted(pop[order], np.arange(g.n + 2))
    for s in range(g.n + 1):
        chunk = edges[order[bounds[s]:bounds[s + 1]]]
        best[s] = int(chunk.max())
    return best


def brute_edge_max(g: Graph, k: int, mode: SizeMode | str = SizeMode.EXACT, budget: int | None = None) -> int:
    """Maximum induced edge count over subsets of the given size class."""
    mode = SizeMode(mode)
    if not 1 <= k <= g.n:
        raise InvalidInputError(f"need 1 <= k <= n, got k={k}, n={g.n}")
    limit = default_budget() if budget is None else budget
    if (1 << g.n) <= limit:
        best = _best_edges_by_size(g, limit)
    elif mode is SizeMode.EXACT and comb(g.n, k) <= limit:
        return max(g.induced_edge_count(s) for s in combinations(range(g.n), k))
    else:
        raise OracleTooLarge(f"oracle too large: n={g.n} exceeds budget {limit}")
    if mode is SizeMode.EXACT:
        return best[k]
    if mode is SizeMode.AT_MOST:
        return max(best[1:k + 1])
    return max(best[k:])


def brute_den_atleast(g: Graph, k: int, budget: int | None = None) -> tuple[Fraction, Witness]:
    """Exact densest-at-least-k value with a tie-broken maximiser.

    Ties go to the smallest witness, then to the lexicographically smallest
    sorted vertex list.
    """
    if not 1 <= k <= g.n:
        raise InvalidInputError(f"need 1 <= k <= n, got k={k}, n={g.n}")
    edges, pop = subset_edge_counts(g, budget)
    best_val: Fraction | None = None
    best_size = -1
    for s in range(k, g.n + 1):
        sel = pop == s
        val = Fraction(int(edges[sel].max()), s)
        if best_val is None or val > best_val:
            best_val, best_size = val, s
    assert best_val is not None
    target = best_val * best_size
    cands = np.flatnonzero((pop == best_size) & (edges == int(target)))
    verts = _lex_first(cands)
    return best_val, Witness(verts, best_val)


def brute_den_range(g: Graph, lo: int, hi: int, budget: int | None = None) -> tuple[Fraction, Witness] | None:
    """Densest subset with ``lo <= size <= hi``; ``None`` if the range is empty."""
    lo = max(lo, 1)
    hi = min(hi, g.n)
    if lo > hi:
        return None
    edges, pop = subset_edge_counts(g, budget)
    best_val: Fraction | None = None
    best_size = -1
    for s in range(lo, hi + 1):
        val = Fraction(int(edges[pop == s].max()), s)
        if best_val is None or val > best_val:
            best_val, best_size = val, s
    assert best_val is not None
    cands = np.flatnonzero((pop == best_size) & (edges == int(best_val * best_size)))
    return best_val, Witness(_lex_first(cands), best_val)


def _clique_walk(g: Graph, t: int, allowed: int, budget: int, emit) -> None:
    """Depth-first walk over increasing vertex sequences that stay cliques."""
    masks = g.adj_masks
    work = 0

    def extend(prefix: list[int], cand: int) -> None:
        nonlocal work
        work += 1
        if work > budget:
            raise OracleTooLarge(f"oracle too large: clique enumeration exceeded budget {budget}")
        if len(prefix) == t - 1:
            emit(prefix, cand)
            return
        rest = cand
        while rest:
            low = rest & -rest
            v = low.bit_length() - 1
            rest ^= low
            # only neighbours with larger index, so every clique is seen once
            prefix.append(v)
            extend(prefix, masks[v] & rest)
            prefix.pop()

    extend([], allowed)


def enumerate_cliques(g: Graph, t: int, budget: int | None = None) -> list[tuple[int, ...]]:
    """All t-cliques as sorted tuples, in lexicographic order."""
    if t < 1:
        raise InvalidInputError("clique size must be >= 1")
    limit = default_budget() if budget is None else budget
    out: list[tuple[int, ...]] = []

    def emit(prefix: list[int], cand: int) -> None:
        base = tuple(prefix)
        rest = cand
        while rest:
            low = rest & -rest
            out.append(base + (low.bit_length() - 1,))
            rest ^= low
        if len(out) > limit:
            raise OracleTooLarge(f"oracle too large: more than {limit} cliques")

    _clique_walk(g, t, (1 << g.n) - 1, limit, emit)
    return out


def count_cliques_in(g: Graph, vertices: Iterable[int], t: int, budget: int | None = None) -> int:
    """Number of t-cliques of the induced subgraph ``g[vertices]``."""
    if t < 1:
        raise InvalidInputError("clique size must be >= 1")
    allowed = 0
    for v in vertices:
        if not 0 <= v < g.n:
            raise InvalidInputError(f"vertex {v} not in graph")
        allowed |= 1 << v
    total = 0

    def emit(prefix: list[int], cand: int) -> None:
        nonlocal total
        total += bin(cand).count("1")

    _clique_walk(g, t, allowed, default_budget() if budget is None else budget, emit)
    return total


def has_clique(g: Graph, t: int, budget: int | None = None) -> bool:
    if t <= 1:
        return g.n >= t
    found = False

    class _Found(Exception):
        pass

    def emit(prefix: list[int], cand: int) -> None:
        if cand:
            raise _Found

    try:
        _clique_walk(g, t, (1 << g.n) - 1, default_budget() if budget is None else budget, emit)
    except _Found:
        found = True
    return found
