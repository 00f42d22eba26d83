"""Desk-scale self-test suites behind ``densest-lab selftest``."""
from __future__ import annotations

import random
import warnings
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Callable, Iterator

import numpy as np

from .gadget import GadgetShape
from .generators import gnp, planted_clique
from .graph import Graph, UniformHypergraph, Witness
from .instances import GapInstance, GapKind
from .oracles import SizeMode, brute_den_atleast, brute_den_range, brute_edge_max, has_clique
from .rational import ceil_rational_power
from .reductions import clique_to_dalks_instance, dksh_to_dalks, plan_pipeline
from .solvers import (
    anchored_densest,
    dalks_2approx,
    dalks_3approx_peel,
    dalks_exact_xp,
    densest_subgraph_exact,
    structured_optimum,
)
from .witnesses import check_witness, extract_clique, map_witness, shrink_witness_peel


@dataclass(frozen=True)
class Outcome:
    suite: str
    name: str
    ok: bool
    detail: str = ""


def _rng_graph(rng: random.Random, n_lo: int, n_hi: int) -> Graph:
    n = rng.randint(n_lo, n_hi)
    return gnp(n, Fraction(rng.randint(1, 9), 10), rng.getrandbits(64))


def suite_oracles(seed: int) -> Iterator[tuple[str, bool, str]]:
    rng = random.Random(seed)
    bad = 0
    for _ in range(40):
        g = _rng_graph(rng, 1, 10)
        opt = brute_den_atleast(g, 1)[0]
        if densest_subgraph_exact(g).value != opt or anchored_densest(g, ()).value != opt:
            bad += 1
        for k in range(1, min(3, g.n) + 1):
            if dalks_exact_xp(g, k).value != brute_den_atleast(g, k)[0]:
                bad += 1
    yield "flow/anchored/xp agree with brute force", bad == 0, f"{bad} mismatches"
    worst2 = worst3 = Fraction(1)
    for _ in range(30):
        g = _rng_graph(rng, 2, 11)
        for k in range(1, g.n + 1):
            opt = brute_den_atleast(g, k)[0]
            if opt == 0:
                continue
            a, p = dalks_2approx(g, k), dalks_3approx_peel(g, k)
            worst2 = max(worst2, opt / a.value if a.value else Fraction(10 ** 9))
            worst3 = max(worst3, opt / p.value if p.value else Fraction(10 ** 9))
    yield "approximation ratios within 2 and 3", worst2 <= 2 and worst3 <= 3, f"worst {worst2}, {worst3}"
    mono = True
    for _ in range(20):
        g = _rng_graph(rng, 2, 9)
        ex = [brute_edge_max(g, k, SizeMode.EXACT) for k in range(1, g.n + 1)]
        le = [brute_edge_max(g, k, SizeMode.AT_MOST) for k in range(1, g.n + 1)]
        den = [brute_den_atleast(g, k)[0] for k in range(1, g.n + 1)]
        mono &= ex == sorted(ex) and ex == le and den == sorted(den, reverse=True)
    yield "monotonicity and edge_{<=k} = edge_{=k}", mono, ""
    roots = all(
        ceil_rational_power(k, p, q) == next(z for z in range(0, k ** p + 2) if z ** q >= k ** p)
        for k in range(1, 30)
        for p in range(0, 5)
        for q in range(1, 5)
    )
    yield "ceil_rational_power matches a linear scan", roots, ""


def suite_reductions(seed: int) -> Iterator[tuple[str, bool, str]]:
    h = UniformHypergraph(4, 2, np.array([[0, 1], [2, 3]]))
    src = GapInstance(GapKind.STRONG_GAP_DKSH, h, 2, 1, {"lambda": 80, "gamma": 20 ** 7, "t": 2})
    out, rec = dksh_to_dalks(src, 1)
    d = rec.derived
    yield "faithful gadget constants", (d["c1"], d["c2"], d["x"], d["k_prime"], d["alpha"]) == (
        1, 160000, 566, 160568, Fraction(57, 20)), str(d)
    shape = out.carrier
    sizes = shape.n_vertices == 566 + 4 + 2 * 160000 and shape.n_edges == comb(566, 2) + 2 * 2 * 160000
    yield "gadget size formulas", sizes, f"{shape.n_vertices} vertices, {shape.n_edges} edges"
    again, rec2 = dksh_to_dalks(src, 1)
    yield "reduction determinism", rec.dumps() == rec2.dumps() and again.carrier.dumps() == shape.dumps(), ""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        inst, _ = clique_to_dalks_instance(Graph.complete(10), 10)
    yield "clique gadget alpha at k=10", inst.threshold == Fraction(27, 13) and inst.threshold > 2, str(inst.threshold)
    p1, p3 = plan_pipeline(1, 1), plan_pipeline(3, 1)
    yield "theorem 1 chain", p1.ok and p1.stages[0].params["lambda"] == 20 ** 16, ""
    yield "theorem 3 chain", p3.ok and p3.stages[1].params["gamma"] == 20 ** 7 * 32, ""
    rng = random.Random(seed)
    trips = True
    for _ in range(10):
        g = _rng_graph(rng, 0, 12)
        trips &= Graph.loads(g.dumps()) == g and Graph.loads(g.dumps()).dumps() == g.dumps()
    yield "graph round trip", trips, ""


def suite_clique_iff(seed: int) -> Iterator[tuple[str, bool, str]]:
    rng = random.Random(seed)
    bad = []
    for i in range(10):
        n = rng.randint(10, 12)
        g = planted_clique(n, Fraction(1, 2), 10, rng.getrandbits(64)) if i % 2 == 0 else gnp(n, Fraction(7, 10), rng.getrandbits(64))
        inst, _ = clique_to_dalks_instance(g, 10)
        # fewer than k' gadget vertices means no feasible set and no room for a k-clique
        feasible = inst.k <= inst.carrier.n_vertices
        yes = feasible and structured_optimum(inst.carrier, inst.k).value >= inst.threshold
        if has_clique(g, 10) != yes:
            bad.append(i)
    yield "k-clique iff den >= alpha (k = 10)", not bad, f"{len(bad)} mismatches"
    inst, _ = clique_to_dalks_instance(Graph.cycle(4), 3)
    val = structured_optimum(inst.carrier, inst.k).value
    w = Witness(tuple(range(inst.carrier.n_vertices)))
    yield "C_4, k=3 counterexample", val == 1 == inst.threshold and extract_clique(inst, w) is None, str(val)


def suite_lemma8(seed: int) -> Iterator[tuple[str, bool, str]]:
    h = UniformHypergraph(4, 2, np.array([[0, 1], [2, 3]]))
    src = GapInstance(GapKind.STRONG_GAP_DKSH, h, 2, 1, {"lambda": 80, "gamma": 20 ** 7, "t": 2})
    out, rec = dksh_to_dalks(src, 1)
    w = map_witness("dksh2dalks", src, Witness((0, 1)), rec)
    v = check_witness(out, w)
    yield "faithful completeness (t=2, eps=1)", v.valid and v.cross_checked and v.objective == Fraction(479895, 160568), str(v.objective)
    rng = random.Random(seed)
    vacuous = checked = 0
    ok = True
    for _ in range(20):
        res = _lemma9_case(rng)
        if res is None:
            continue
        checked += 1
        holds, empty = res
        ok &= holds
        vacuous += empty
    yield "scaled small-set density bound", ok, f"{checked} instances, {vacuous} with empty size range"


def _lemma9_case(rng: random.Random) -> tuple[bool, bool] | None:
    t = rng.choice([2, 3])
    eps = rng.choice([Fraction(1), Fraction(1, 2)])
    n_u = rng.randint(t, 5)
    pool = list(combinations(range(n_u), t))
    subsets = rng.sample(pool, rng.randint(0, min(2, len(pool))))
    h = UniformHypergraph(n_u, t, np.array(subsets, dtype=np.int64).reshape(-1, t))
    k = rng.randint(1, n_u)
    ell = rng.randint(1, 3) if not subsets else rng.randint(1, 200)
    lam, gam = Fraction(20 * t * t) / eps, Fraction(10 ** 7 * t ** 5) / eps ** 4
    if not strong_soundness_holds(h, k, ell, lam, gam):
        return None
    c1, c2, x = rng.randint(1, 3), rng.randint(1, 3), rng.randint(0, 3)
    src = GapInstance(GapKind.STRONG_GAP_DKSH, h, k, ell, {"lambda": lam, "gamma": gam, "t": t})
    out, rec = dksh_to_dalks(src, eps, c1=c1, c2=c2, x=x)
    shape = out.carrier
    if shape.n_vertices > 20:
        return None
    return lemma9_holds(shape, out.k, eps, c1)


def strong_soundness_holds(h: UniformHypergraph, k: int, ell: int, lam: Fraction, gam: Fraction) -> bool:
    """Every T of size <= gamma*k meets fewer than ell/lambda subsets in two or more points."""
    cap = min(h.n, int(gam * k))
    for size in range(cap + 1):
        for T in combinations(range(h.n), size):
            if h.hit_count(T) >= Fraction(ell) / lam:
                return False
    return True


def lemma9_holds(shape: GadgetShape, k_new: int, eps: Fraction, c1: int) -> tuple[bool, bool]:
    """No W' inside the incidence side with k'/2 <= |W'| <= 10tk'/eps reaches (1 + eps/10) c1.

    Returns (holds, range_empty).
    """
    t = max((len(m) for m in shape.subset_members), default=2)
    lo = -(-k_new // 2)
    hi = (10 * t * k_new) / eps
    inner = shape.expand().induced(list(range(shape.x, shape.n_vertices)))
    hi_int = min(inner.n, int(hi))
    best = brute_den_range(inner, lo, hi_int) if inner.n else None
    if best is None:
        return True, True
    return best[0] < (1 + eps / 10) * c1, False


def suite_peeling(seed: int) -> Iterator[tuple[str, bool, str]]:
    rng = random.Random(seed)
    ok = True
    for _ in range(300):
        g = gnp(12, Fraction(2, 5), rng.getrandbits(64))
        r = rng.randint(1, 12)
        S = sorted(rng.sample(range(12), r))
        k = rng.randint(1, r)
        kept = shrink_witness_peel(g, S, k)
        bound = Fraction(g.induced_edge_count(S) * k * (k - 1), r * (r - 1)) if r > 1 else Fraction(0)
        ok &= len(kept) == k and set(kept) <= set(S) and g.induced_edge_count(kept) >= bound
    yield "peeling keeps k(k-1)/(r(r-1)) of the edges", ok, "300 trials"


SUITES: dict[str, Callable[[int], Iterator[tuple[str, bool, str]]]] = {
    "oracles": suite_oracles,
    "reductions": suite_reductions,
    "clique-iff": suite_clique_iff,
    "lemma8": suite_lemma8,
    "peeling": suite_peeling,
}


def run_suites(names: list[str], seed: int) -> list[Outcome]:
    out = []
    for name in names:
        for case, ok, detail in SUITES[name](seed):
            out.append(Outcome(name, case, bool(ok), detail))
    return out
