"""Witness checking, completeness-direction witness maps, clique extraction."""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Sequence


from .errors import InvalidInputError
from .gadget import GadgetShape
from .graph import Graph, UniformHypergraph, Witness
from .instances import GapInstance, GapKind, dumps_json
from .oracles import count_cliques_in, enumerate_cliques
from .rational import Number, fmt_rat
from .reductions import ReductionRecord, clique_universe

CROSS_CHECK_LIMIT = 1 << 25


class WitnessRefused(InvalidInputError):
    """The source witness does not certify the source instance."""


@dataclass(frozen=True)
class Verdict:
    valid: bool
    objective: Number
    threshold: Number
    reason: str | None = None
    cross_checked: bool = False

    @property
    def margin(self) -> Fraction:
        return Fraction(self.objective) - Fraction(self.threshold)

    def to_dict(self) -> dict:
        return {
            "valid": self.valid,
            "objective": fmt_rat(self.objective),
            "threshold": fmt_rat(self.threshold),
            "margin": fmt_rat(self.margin),
            "reason": self.reason,
            "cross_checked": self.cross_checked,
        }

    def dumps(self) -> str:
        return dumps_json(self.to_dict())


def _size_rule(kind: GapKind) -> str:
    return {
        GapKind.GAP_DKS: "eq",
        GapKind.GAP_DKS_SIZE: "le",
        GapKind.POLY_GAP_DKS: "eq",
        GapKind.POLY_GAP_DKS_SIZE: "eq",
        GapKind.STRONG_GAP_DKSH: "le",
        GapKind.GAP_DALKS: "ge",
    }[kind]


def _universe_size(carrier) -> int:
    if isinstance(carrier, GadgetShape):
        return carrier.n_vertices
    return carrier.n


def check_witness(inst: GapInstance, w: Witness, cross_limit: int = CROSS_CHECK_LIMIT) -> Verdict:
    """Evaluate the completeness objective of ``inst`` on ``w``.

    Size violations and bad indices give an invalid verdict, never an
    exception. Gadget carriers are scored from per-class counts; if the
    expansion has at most ``cross_limit`` edges the count is re-derived from
    the explicit edge list.
    """
    verts = w.vertices
    threshold = inst.threshold
    if verts and verts[-1] >= _universe_size(inst.carrier):
        return Verdict(False, 0, threshold, "index out of range")
    size, k, rule = len(verts), inst.k, _size_rule(inst.kind)
    bad = {"eq": size != k, "le": size > k, "ge": size < k}[rule]
    if size == 0:
        bad = True
    cross = False
    if inst.kind is GapKind.GAP_DALKS:
        if size == 0:
            return Verdict(False, 0, threshold, "size: empty witness")
        carrier = inst.carrier
        if isinstance(carrier, GadgetShape):
            edges = carrier.induced_edge_count(verts)
            if carrier.n_edges <= cross_limit:
                explicit = carrier.materialized_edge_count(verts)
                if explicit != edges:
                    raise AssertionError(f"analytic edge count {edges} != materialized {explicit}")
                cross = True
        else:
            edges = carrier.induced_edge_count(verts)
        objective: Number = Fraction(edges, size)
    elif inst.kind is GapKind.STRONG_GAP_DKSH:
        objective = inst.carrier.contained_count(verts)
    elif inst.kind in (GapKind.POLY_GAP_DKS, GapKind.POLY_GAP_DKS_SIZE):
        objective = count_cliques_in(inst.carrier, verts, int(inst.params["t"]))
    else:
        objective = inst.carrier.induced_edge_count(verts)
    if bad:
        need = {"eq": "exactly", "le": "at most", "ge": "at least"}[rule]
        return Verdict(False, objective, threshold, f"size: witness has {size} indices, needs {need} {k}", cross)
    if objective < threshold:
        return Verdict(False, objective, threshold, "objective below threshold", cross)
    return Verdict(True, objective, threshold, None, cross)


# --- completeness witness maps ----------------------------------------------------

def map_witness(
    rule: str,
    source: GapInstance | Graph,
    w: Witness,
    record: ReductionRecord,
    seed: int = 0,
) -> Witness:
    """Carry a completeness witness of the source instance to the target instance."""
    if rule == "clique2dalks":
        if not isinstance(source, Graph):
            raise InvalidInputError("clique2dalks maps from a graph")
        k = int(record.inputs["k"])
        T = list(w.vertices)
        if len(T) != k or any(v >= source.n for v in T) or source.induced_edge_count(T) != comb(k, 2):
            raise WitnessRefused(f"source witness is not a {k}-clique")
        index = {e: i for i, e in enumerate(source.edges)}
        x = k
        inner = [index[(u, v)] for i, u in enumerate(T) for v in T[i + 1:]]
        verts = list(range(x)) + [x + u for u in T] + [x + source.n + e for e in inner]
        return Witness(tuple(verts))
    if not isinstance(source, GapInstance):
        raise InvalidInputError(f"rule {rule} maps from a gap instance")
    verdict = check_witness(source, w)
    if not verdict.valid:
        raise WitnessRefused(f"source witness invalid: {verdict.reason}")
    if rule in ("relax", "dks2dksh"):
        return Witness(w.vertices)
    if rule == "shrink":
        k_new = int(record.derived["k_prime"])
        return Witness(tuple(shrink_clique_witness_sample(source.carrier, w.vertices, k_new, int(source.params["t"]), seed)))
    if rule == "poly2dksh":
        t = int(source.params["t"])
        g: Graph = source.carrier
        universe = clique_universe(g, t)
        inside = set(enumerate_cliques(g.induced(list(w.vertices)), t - 1))
        # relabel back to original vertex ids before lookup
        verts = list(w.vertices)
        inside = {tuple(verts[i] for i in c) for c in inside}
        return Witness(tuple(i for i, c in enumerate(universe) if c in inside))
    if rule == "dksh2dalks":
        h: UniformHypergraph = source.carrier
        c1, c2, x = (int(record.derived[name]) for name in ("c1", "c2", "x"))
        ell = int(source.threshold)
        chosen = h.contained_indices(w.vertices)[:ell]
        shape = GadgetShape.from_hypergraph(h, x, c1, c2)
        verts: list[int] = list(range(x))
        for u in w.vertices:
            base = shape.element_vertex(u, 0)
            verts.extend(range(base, base + c1))
        for s in chosen.tolist():
            base = shape.subset_vertex(s, 0)
            verts.extend(range(base, base + c2))
        return Witness(tuple(verts))
    raise InvalidInputError(f"unknown reduction rule {rule!r}")


# --- soundness direction of the clique reduction ----------------------------------

def source_graph_of(shape: GadgetShape) -> Graph:
    """Recover the graph whose incidence graph the gadget encodes."""
    if any(c != 1 for c in shape.element_mult + shape.subset_mult):
        raise InvalidInputError("not a single-copy incidence gadget")
    if any(len(m) != 2 for m in shape.subset_members):
        raise InvalidInputError("subset classes must be edges")
    return Graph(len(shape.element_mult), shape.subset_members)


def extract_clique(inst: GapInstance, w: Witness) -> tuple[int, ...] | None:
    """Turn a witness with density >= alpha into a k-clique of the source graph.

    The witness is first normalised as in the optimality argument: the whole
    clique side is added, then incidence vertices of minimum degree are
    dropped until exactly k' vertices remain. Returns None when the surviving
    element side is not a k-clique.
    """
    shape = inst.carrier
    if not isinstance(shape, GadgetShape):
        raise InvalidInputError("clique extraction needs a gadget instance")
    g = source_graph_of(shape)
    k = shape.x
    verdict = check_witness(inst, w)
    if not verdict.valid:
        return None
    S = set(w.vertices) | set(range(k))
    left0, right0 = k, k + g.n
    deg = {}
    for v in S:
        if left0 <= v < right0:
            deg[v] = 0
        elif v >= right0:
            deg[v] = 0
    for e, (a, b) in enumerate(g.edges):
        ev = right0 + e
        if ev in S:
            for u in (a, b):
                if left0 + u in S:
                    deg[ev] += 1
                    deg[left0 + u] += 1
    while len(S) > inst.k:
        v = min(deg, key=lambda u: (deg[u], -(u >= right0), u))
        S.discard(v)
        del deg[v]
        if v >= right0:
            for u in g.edges[v - right0]:
                if left0 + u in deg:
                    deg[left0 + u] -= 1
        else:
            u = v - left0
            for e, (a, b) in enumerate(g.edges):
                if u in (a, b) and right0 + e in deg:
                    deg[right0 + e] -= 1
    T = tuple(sorted(v - left0 for v in S if left0 <= v < right0))
    if len(T) != k or g.induced_edge_count(T) != comb(k, 2):
        return None
    return T


# --- constructive versions of the subset-sampling steps --------------------------

def shrink_witness_peel(g: Graph, S: Iterable[int], k: int) -> list[int]:
    """Drop minimum-degree vertices of g[S] (ties: smallest index) until k remain.

    Each deletion keeps at least an (s-2)/s fraction of the edges, so the
    result has at least e(S) k(k-1) / (r(r-1)) edges.
    """
    S = sorted(set(S))
    if not 0 <= k <= len(S):
        raise InvalidInputError(f"need 0 <= k <= |S|, got k={k}, |S|={len(S)}")
    alive = set(S)
    deg = {v: len(g.neighbors[v] & alive) for v in S}
    while len(alive) > k:
        v = min(alive, key=lambda u: (deg[u], u))
        alive.discard(v)
        for u in g.neighbors[v]:
            if u in alive:
                deg[u] -= 1
    return sorted(alive)


def shrink_clique_witness_sample(
    g: Graph, S: Sequence[int], k_new: int, t: int, seed: int, draws: int = 64
) -> list[int]:
    """Best of ``draws`` seeded uniform k'-subsets of S by t-clique count."""
    S = sorted(set(S))
    if not 0 <= k_new <= len(S):
        raise InvalidInputError(f"need k' <= |S|, got k'={k_new}, |S|={len(S)}")
    rng = random.Random(seed)
    best: list[int] | None = None
    best_count = -1
    for _ in range(draws):
        cand = sorted(rng.sample(S, k_new))
        c = count_cliques_in(g, cand, t)
        if c > best_count:
            best, best_count = cand, c
    assert best is not None
    return best
