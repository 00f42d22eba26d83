"""Exact and approximate solvers for densest subgraph and DALkS.

The exact routines all go through one parametric decision: for a guess
``g`` and a forced set ``A``, is there ``S ⊇ A`` whose edge surplus over a
base exceeds ``g`` per added vertex? That is a single min-cut, and the
search over ``g`` terminates exactly because distinct candidate ratios have
denominators at most ``n``.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import combinations
from math import comb, prod
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidInputError, check_budget
from .flow import FlowNetwork
from .gadget import GadgetShape
from .graph import Graph, Witness, density


class Method(str, Enum):
    FLOW = "flow"
    ANCHORED = "anchored"
    XP = "xp"
    PEEL3 = "peel3"
    APPROX2 = "approx2"
    BRUTE = "brute"
    STRUCTURED = "structured"


class Guarantee(str, Enum):
    EXACT = "exact"
    FACTOR_2 = "factor-2"
    FACTOR_3 = "factor-3"


@dataclass(frozen=True)
class SolveResult:
    witness: Witness
    value: Fraction
    method: Method
    guarantee: Guarantee


def _decide(g: Graph, anchors: frozenset[int], guess: Fraction, base_edges: int, base_size: int) -> list[int] | None:
    """Return a maximiser S ⊇ anchors of e(S) - guess*|S| if it beats the base, else None."""
    n = g.n
    p, q = guess.numerator, guess.denominator
    src, sink = n, n + 1
    net = FlowNetwork(n + 2)
    inf = 2 * q * g.m + 2 * p * n + 1
    for v in range(n):
        net.add_edge(src, v, inf if v in anchors else q * len(g.neighbors[v]))
        net.add_edge(v, sink, 2 * p)
    for u, v in g.edges:
        net.add_edge(u, v, q, q)
    cut = net.max_flow(src, sink)
    if cut >= 2 * q * (g.m - base_edges) + 2 * p * base_size:
        return None
    side = net.source_side(src)
    return [v for v in range(n) if side[v]]


def _ratio_search(g: Graph, anchors: frozenset[int], growth: bool) -> tuple[list[int], Fraction] | None:
    """Maximise (e(S) - e(A)) / (|S| - |A|) over S ⊋ A when ``growth``,
    otherwise e(S)/|S| over nonempty S ⊇ A.

    Returns None when ``growth`` is set and no superset adds a positive ratio.
    """
    n = g.n
    if growth:
        base_edges, base_size = g.induced_edge_count(anchors), len(anchors)
        best: list[int] | None = None
        lo, hi = Fraction(0), Fraction(max(n - 1, 0))
    else:
        base_edges = base_size = 0
        if anchors:
            best = sorted(anchors)
            lo = density(g, best)
        elif g.m:
            best, lo = list(g.edges[0]), Fraction(1, 2)
        else:
            return [0], Fraction(0)
        hi = Fraction(n - 1, 2)

    def ratio(s: list[int]) -> Fraction:
        return Fraction(g.induced_edge_count(s) - base_edges, len(s) - base_size)

    gap = Fraction(1, n * (n - 1)) if n > 1 else Fraction(1)
    while hi - lo >= gap:
        mid = (lo + hi) / 2
        found = _decide(g, anchors, mid, base_edges, base_size)
        if found is None:
            hi = mid
        else:
            best, lo = found, ratio(found)
    if best is None:
        return None
    return best, lo


def _result(g: Graph, verts: Iterable[int], method: Method, guarantee: Guarantee) -> SolveResult:
    w = sorted(verts)
    val = density(g, w)
    return SolveResult(Witness(tuple(w), val), val, method, guarantee)


def densest_subgraph_exact(g: Graph) -> SolveResult:
    if g.n < 1:
        raise InvalidInputError("graph must have at least one vertex")
    verts, _ = _ratio_search(g, frozenset(), growth=False)
    return _result(g, verts, Method.FLOW, Guarantee.EXACT)


def anchored_densest(g: Graph, anchors: Iterable[int]) -> SolveResult:
    """Densest subgraph among vertex sets containing every anchor."""
    anchors = frozenset(int(a) for a in anchors)
    if any(not 0 <= a < g.n for a in anchors):
        raise InvalidInputError("anchor outside the graph")
    if g.n < 1:
        raise InvalidInputError("graph must have at least one vertex")
    verts, _ = _ratio_search(g, anchors, growth=False)
    return _result(g, verts, Method.ANCHORED, Guarantee.EXACT)


def dalks_exact_xp(g: Graph, k: int, budget: int | None = None) -> SolveResult:
    """den_{>=k} via one anchored solve per k-subset."""
    _check_k(g, k)
    check_budget(comb(g.n, k), budget, f"C({g.n},{k}) anchor sets")
    best: SolveResult | None = None
    for anchors in combinations(range(g.n), k):
        res = anchored_densest(g, anchors)
        if best is None or res.value > best.value:
            best = res
    assert best is not None
    return SolveResult(best.witness, best.value, Method.XP, Guarantee.EXACT)


def _pad(g: Graph, verts: Sequence[int], k: int) -> list[int]:
    """Grow ``verts`` to size k, each time adding the vertex with most edges into the set."""
    chosen = set(verts)
    gain = [0] * g.n
    for v in chosen:
        for u in g.neighbors[v]:
            gain[u] += 1
    while len(chosen) < k:
        v = max((u for u in range(g.n) if u not in chosen), key=lambda u: (gain[u], -u))
        chosen.add(v)
        for u in g.neighbors[v]:
            gain[u] += 1
    return sorted(chosen)


def dalks_2approx(g: Graph, k: int) -> SolveResult:
    """Nested densest-increment chain, each member padded to size k.

    The chain starts at a densest subgraph and repeatedly adds the vertex set
    with the largest edges-per-new-vertex ratio; the best padded member is
    within a factor 2 of den_{>=k}.
    """
    _check_k(g, k)
    current = densest_subgraph_exact(g).witness.vertices
    chain = [list(current)]
    while len(current) < k:
        step = _ratio_search(g, frozenset(current), growth=True)
        if step is None:
            break
        current = tuple(step[0])
        chain.append(list(current))
    best: list[int] | None = None
    best_val = Fraction(-1)
    for verts in chain:
        cand = _pad(g, verts, k) if len(verts) < k else verts
        val = density(g, cand)
        if val > best_val:
            best, best_val = cand, val
    assert best is not None
    return _result(g, best, Method.APPROX2, Guarantee.FACTOR_2)


def peel_order(g: Graph) -> list[int]:
    """Removal order of repeated min-degree deletion (ties: smallest index)."""
    deg = [len(nb) for nb in g.neighbors]
    heap = [(d, v) for v, d in enumerate(deg)]
    heapq.heapify(heap)
    removed = [False] * g.n
    order = []
    while heap:
        d, v = heapq.heappop(heap)
        if removed[v] or d != deg[v]:
            continue
        removed[v] = True
        order.append(v)
        for u in g.neighbors[v]:
            if not removed[u]:
                deg[u] -= 1
                heapq.heappush(heap, (deg[u], u))
    return order


def dalks_3approx_peel(g: Graph, k: int) -> SolveResult:
    """Densest suffix of size >= k of the min-degree peeling sequence."""
    _check_k(g, k)
    order = peel_order(g)
    alive = set(range(g.n))
    edges = g.m
    best_size, best_val = g.n, Fraction(edges, g.n)
    for i, v in enumerate(order[: g.n - k]):
        edges -= sum(1 for u in g.neighbors[v] if u in alive)
        alive.discard(v)
        size = g.n - i - 1
        val = Fraction(edges, size)
        if val > best_val:
            best_size, best_val = size, val
    return _result(g, order[g.n - best_size:], Method.PEEL3, Guarantee.FACTOR_3)


def brute_solve(g: Graph, k: int, budget: int | None = None) -> SolveResult:
    from .oracles import brute_den_atleast

    val, w = brute_den_atleast(g, k, budget)
    return SolveResult(w, val, Method.BRUTE, Guarantee.EXACT)


def _check_k(g: Graph, k: int) -> None:
    if not 1 <= k <= g.n:
        raise InvalidInputError(f"need 1 <= k <= n, got k={k}, n={g.n}")


# --- structured oracle for gadget shapes ------------------------------------

_ROWS = 1 << 13


def _left_dimensions(shape: GadgetShape) -> tuple[list[int], list[list[int]]]:
    """Enumeration axes over element classes.

    Classes that belong to no subset class only contribute their vertex
    count, so they are pooled into one axis.
    """
    used = sorted({u for mem in shape.subset_members for u in mem})
    pooled = sum(c for u, c in enumerate(shape.element_mult) if u not in set(used))
    radices = [shape.element_mult[u] + 1 for u in used]
    groups = [[u] for u in used]
    if pooled:
        radices.append(pooled + 1)
        groups.append([u for u in range(len(shape.element_mult)) if u not in set(used)])
    return radices, groups


def structured_optimum(shape: GadgetShape, k: int, budget: int | None = None) -> SolveResult:
    """Exact den_{>=k} of the expanded gadget without expanding it.

    For a fixed number of copies taken from each element class, every copy of
    a subset class gains the same number of edges, so the best r subset
    copies are a greedy prefix by gain. The density is quasi-convex in the
    clique take y and piecewise monotone in r, so only the interval ends and
    the prefix breakpoints need to be examined.
    """
    N = shape.n_vertices
    if not 1 <= k <= N:
        raise InvalidInputError(f"need 1 <= k <= {N}, got {k}")
    radices, groups = _left_dimensions(shape)
    total = prod(radices)
    check_budget(total, budget, "left-side copy-count vectors")
    x = shape.x
    R = len(shape.subset_mult)
    dims = len(radices)
    # membership of enumeration axis j in subset class s (pooled axis is in none)
    axis_of = {g[0]: j for j, g in enumerate(groups) if len(g) == 1 and g[0] in {u for m in shape.subset_members for u in m}}
    member = np.zeros((dims, R), dtype=np.int64)
    for s, mem in enumerate(shape.subset_members):
        for u in mem:
            member[axis_of[u], s] = 1
    mult = np.asarray(shape.subset_mult, dtype=np.int64)
    strides = np.cumprod([1] + radices[:-1]).astype(np.int64)
    radix_arr = np.asarray(radices, dtype=np.int64)
    R_total = int(mult.sum())

    best_key: tuple[Fraction, int, int, int] | None = None  # (value, row, y, r)
    for start in range(0, total, _ROWS):
        idx = np.arange(start, min(total, start + _ROWS), dtype=np.int64)
        A = (idx[:, None] // strides[None, :]) % radix_arr[None, :]
        left = A.sum(axis=1)
        gains = A @ member  # per subset class
        order = np.argsort(-gains, axis=1, kind="stable")
        g_sorted = np.take_along_axis(gains, order, axis=1)
        m_sorted = mult[order]
        cum_cnt = np.concatenate([np.zeros((len(idx), 1), np.int64), np.cumsum(m_sorted, axis=1)], axis=1)
        cum_gain = np.concatenate([np.zeros((len(idx), 1), np.int64), np.cumsum(m_sorted * g_sorted, axis=1)], axis=1)
        extra = np.stack([k - left - x, k - left], axis=1)
        r_cand = np.clip(np.concatenate([cum_cnt, extra], axis=1), 0, R_total)
        # prefix value at arbitrary r: full classes below r plus a partial class
        j = (cum_cnt[:, None, :] <= r_cand[:, :, None]).sum(axis=2) - 1
        j = np.minimum(j, R - 1) if R else j
        base_cnt = np.take_along_axis(cum_cnt, j, axis=1)
        base_gain = np.take_along_axis(cum_gain, j, axis=1)
        if R:
            next_gain = np.take_along_axis(g_sorted, np.clip(j, 0, R - 1), axis=1)
        else:
            next_gain = np.zeros_like(base_gain)
        P = base_gain + next_gain * (r_cand - base_cnt)
        lft = left[:, None]
        y_lo = np.maximum(k - lft - r_cand, 0)
        y_lo = np.where(lft + r_cand == 0, np.maximum(y_lo, 1), y_lo)
        for y in (np.full_like(y_lo, x), y_lo):
            den = y + lft + r_cand
            num = y * (y - 1) // 2 + P
            ok = (y <= x) & (den >= k) & (den >= 1)
            if not ok.any():
                continue
            ratio = np.where(ok, num / np.where(den > 0, den, 1), -1.0)
            top = ratio.max()
            rows, cols = np.nonzero(ok & (ratio >= top - abs(top) * 1e-12 - 1e-300))
            for a_row, c in zip(rows.tolist(), cols.tolist()):
                val = Fraction(int(num[a_row, c]), int(den[a_row, c]))
                key = (val, int(idx[a_row]), int(y[a_row, c]), int(r_cand[a_row, c]))
                if best_key is None or val > best_key[0]:
                    best_key = key
    if best_key is None:
        raise InvalidInputError("no feasible vertex set of size >= k")
    value, row, y, r = best_key
    verts = _structured_witness(shape, groups, radices, row, y, r)
    w = Witness(tuple(verts), value)
    assert shape.density(w.vertices) == value
    return SolveResult(w, value, Method.STRUCTURED, Guarantee.EXACT)


def _structured_witness(shape: GadgetShape, groups, radices, row: int, y: int, r: int) -> list[int]:
    counts = []
    for rad in radices:
        counts.append(row % rad)
        row //= rad
    a = [0] * len(shape.element_mult)
    for grp, cnt in zip(groups, counts):
        for u in grp:
            take = min(cnt, shape.element_mult[u])
            a[u] = take
            cnt -= take
    verts = list(range(y))
    for u, take in enumerate(a):
        verts.extend(shape.element_vertex(u, i) for i in range(take))
    gains = [sum(a[u] for u in mem) for mem in shape.subset_members]
    for s in sorted(range(len(gains)), key=lambda s: -gains[s]):
        if r <= 0:
            break
        take = min(r, shape.subset_mult[s])
        verts.extend(shape.subset_vertex(s, i) for i in range(take))
        r -= take
    return verts


def dalks_exact_structured(shape: GadgetShape, k: int, budget: int | None = None) -> Fraction:
    return structured_optimum(shape, k, budget).value
