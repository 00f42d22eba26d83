"""Deterministic gap-preserving reductions and the theorem pipelines.

Each reduction maps a source :class:`GapInstance` to a target instance and
returns a :class:`ReductionRecord` listing every derived constant. Large-k
assumptions are reported through ``guarantee_threshold_met`` rather than
enforced, so desk-scale instances can still be built and tested.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, comb
from typing import Any

import numpy as np

from .errors import InvalidInputError, ParameterError
from .gadget import GadgetShape
from .graph import Graph, UniformHypergraph
from .instances import GapInstance, GapKind, dumps_json
from .oracles import enumerate_cliques
from .rational import Number, ceil_rational_power, ceil_root, floor_rational_root, fmt_rat, power_leq


@dataclass(frozen=True)
class ReductionRecord:
    rule: str
    inputs: dict[str, Any]
    derived: dict[str, Any]
    guarantee_threshold_met: bool
    layout: dict[str, Any] = field(default_factory=dict)
    faithful: bool = True

    def to_dict(self) -> dict:
        return {
            "rule": self.rule,
            "inputs": _render(self.inputs),
            "derived": _render(self.derived),
            "guarantee_threshold_met": self.guarantee_threshold_met,
            "layout": _render(self.layout),
            "faithful": self.faithful,
        }

    def dumps(self) -> str:
        return dumps_json(self.to_dict())


def _render(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _render(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_render(v) for v in value]
    if isinstance(value, bool):
        return value
    if isinstance(value, Fraction):
        return fmt_rat(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    return value


def _require(inst: GapInstance, *kinds: GapKind) -> None:
    if inst.kind not in kinds:
        names = ", ".join(k.value for k in kinds)
        raise InvalidInputError(f"expected a {names} instance, got {inst.kind.value}")


def _at_least_one(name: str, value: Number) -> Fraction:
    value = Fraction(value)
    if value < 1:
        raise ParameterError(f"{name} must be >= 1, got {fmt_rat(value)}")
    return value


def _check_eps(eps: Number) -> Fraction:
    eps = Fraction(eps)
    if not 0 < eps <= 1:
        raise ParameterError(f"eps must lie in (0, 1], got {fmt_rat(eps)}")
    return eps


def poly_threshold(k: int, t: int, delta: Number) -> int:
    """ceil(k ** (t - delta)), the clique-count target of PolyGapDkS."""
    e = t - Fraction(delta)
    return ceil_rational_power(k, e.numerator, e.denominator)


# --- size relaxation ----------------------------------------------------------

def relax_gapdks(inst: GapInstance, lam: Number, gamma: Number) -> tuple[GapInstance, ReductionRecord]:
    """Identity on (G, k, l); only the gap parameters change."""
    _require(inst, GapKind.GAP_DKS)
    lam, gamma = _at_least_one("lambda", lam), _at_least_one("gamma", gamma)
    source_lambda = 2 * lam * gamma ** 2
    if inst.params["lambda"] < source_lambda:
        raise ParameterError(
            f"source gap {fmt_rat(inst.params['lambda'])} is weaker than the required {fmt_rat(source_lambda)}"
        )
    out = inst.retag(GapKind.GAP_DKS_SIZE, {"lambda": lam, "gamma": gamma})
    rec = ReductionRecord(
        "relax",
        {"k": inst.k, "ell": inst.threshold, "lambda": lam, "gamma": gamma},
        {"source_lambda": source_lambda},
        True,
        {"graph": "unchanged"},
        inst.faithful,
    )
    return out, rec


def shrink_polydks(inst: GapInstance, delta: Number, t: int, gamma: Number) -> tuple[GapInstance, ReductionRecord]:
    """Keep the graph, replace k by floor((k/gamma)^(1/t))."""
    _require(inst, GapKind.POLY_GAP_DKS)
    delta, gamma = Fraction(delta), _at_least_one("gamma", gamma)
    if not 0 < delta <= 1:
        raise ParameterError("delta must lie in (0, 1]")
    if t < 2 or inst.params["t"] != t:
        raise ParameterError(f"t must be >= 2 and match the source instance (source t={inst.params['t']})")
    source_delta = delta / (2 * t)
    if inst.params["delta"] > source_delta:
        raise ParameterError(
            f"source delta {fmt_rat(inst.params['delta'])} is weaker than the required {fmt_rat(source_delta)}"
        )
    k = inst.k
    k_new = floor_rational_root(Fraction(k) / gamma, t)
    if k_new < 1:
        raise ParameterError(f"degenerate output: floor((k/gamma)^(1/t)) = {k_new}")
    big = Fraction(2) ** (t + 1) * gamma
    met = power_leq([(2 * gamma, 1), (big, Fraction(2 * t) / delta)], [(k, 1)])
    if met:
        _assert_shrink_chain(k, k_new, t, delta, gamma)
    out = GapInstance(
        GapKind.POLY_GAP_DKS_SIZE,
        inst.carrier,
        k_new,
        poly_threshold(k_new, t, delta),
        {"delta": delta, "t": t, "gamma": gamma},
        inst.faithful,
    )
    rec = ReductionRecord(
        "shrink",
        {"k": k, "delta": delta, "t": t, "gamma": gamma},
        {"source_delta": source_delta, "k_prime": k_new},
        met,
        {"graph": "unchanged"},
        inst.faithful,
    )
    return out, rec


def _assert_shrink_chain(k: int, kp: int, t: int, delta: Fraction, gamma: Fraction) -> None:
    """k^(d/2t) <= (gamma (2k')^t)^(d/2t) <= 2^-t k'^d (k'^(d/2) / (2^(t+1) gamma))^-1 <= 2^-t k'^d."""
    e = delta / (2 * t)
    big = Fraction(2) ** (t + 1) * gamma
    a = [(k, e)]
    b = [(gamma * (2 * kp) ** t, e)]
    c = [(Fraction(1, 2 ** t), 1), (kp, delta), (kp, -delta / 2), (big, 1)]
    d = [(Fraction(1, 2 ** t), 1), (kp, delta)]
    for lhs, rhs in ((a, b), (b, c), (c, d)):
        if not power_leq(lhs, rhs):
            raise AssertionError(f"size-shrink inequality chain failed at k={k}, k'={kp}")


# --- graph problems to hypergraph ---------------------------------------------

def dks_to_dksh(inst: GapInstance) -> tuple[GapInstance, ReductionRecord]:
    _require(inst, GapKind.GAP_DKS_SIZE)
    g: Graph = inst.carrier
    h = UniformHypergraph(g.n, 2, np.array(g.edges, dtype=np.int64).reshape(g.m, 2))
    params = {"lambda": inst.params["lambda"], "gamma": inst.params["gamma"], "t": 2}
    out = GapInstance(GapKind.STRONG_GAP_DKSH, h, inst.k, inst.threshold, params, inst.faithful)
    rec = ReductionRecord(
        "dks2dksh",
        {"k": inst.k, "ell": inst.threshold},
        {"universe": g.n, "subsets": g.m},
        True,
        {"universe": "vertex ids", "subsets": "edge order"},
        inst.faithful,
    )
    return out, rec


def clique_universe(g: Graph, t: int, budget: int | None = None) -> list[tuple[int, ...]]:
    """The (t-1)-cliques of g in lexicographic order; their positions are universe ids."""
    return enumerate_cliques(g, t - 1, budget)


def _index_rows(universe: np.ndarray, rows: np.ndarray, n: int) -> np.ndarray:
    """Position of each row of ``rows`` inside the lexicographically sorted ``universe``."""
    width = universe.shape[1]
    if n ** width < 2 ** 62:
        weights = np.array([n ** (width - 1 - j) for j in range(width)], dtype=np.int64)
        keys = universe @ weights
        probe = rows @ weights
        pos = np.searchsorted(keys, probe)
        assert np.array_equal(keys[pos], probe)
        return pos
    lookup = {tuple(r): i for i, r in enumerate(universe.tolist())}
    return np.array([lookup[tuple(r)] for r in rows.tolist()], dtype=np.int64)


def polydks_to_dksh(inst: GapInstance, lam: Number, budget: int | None = None) -> tuple[GapInstance, ReductionRecord]:
    """(t-1)-cliques become elements, each t-clique becomes the set of its facets."""
    _require(inst, GapKind.POLY_GAP_DKS_SIZE)
    lam = _at_least_one("lambda", lam)
    if inst.params["delta"] > Fraction(1, 3):
        raise ParameterError("source delta must be at most 1/3")
    g: Graph = inst.carrier
    t = int(inst.params["t"])
    gamma = inst.params["gamma"]
    k = inst.k
    universe = np.array(clique_universe(g, t, budget), dtype=np.int64).reshape(-1, t - 1)
    tops = np.array(enumerate_cliques(g, t, budget), dtype=np.int64).reshape(-1, t)
    facets = [
        _index_rows(universe, np.delete(tops, j, axis=1), g.n) if len(tops) else np.zeros(0, np.int64)
        for j in range(t)
    ]
    subsets = np.stack(facets, axis=1) if len(tops) else np.zeros((0, t), dtype=np.int64)
    h = UniformHypergraph(len(universe), t, subsets)
    k_new = comb(k, t - 1)
    ell = ceil_rational_power(k, 3 * t - 1, 3)
    met = k >= (lam * gamma * t) ** 3
    params = {"lambda": lam, "gamma": gamma, "t": t}
    out = GapInstance(GapKind.STRONG_GAP_DKSH, h, max(k_new, 1), ell, params, inst.faithful)
    rec = ReductionRecord(
        "poly2dksh",
        {"k": k, "t": t, "lambda": lam, "gamma": gamma},
        {"k_prime": k_new, "ell": ell, "universe": len(universe), "subsets": len(tops)},
        met,
        {"universe": f"{t - 1}-cliques, lexicographic", "subsets": f"{t}-cliques, lexicographic"},
        inst.faithful,
    )
    return out, rec


# --- hypergraph to DALkS ------------------------------------------------------

def gadget_constants(t: int, k: int, ell: int, eps: Number) -> tuple[int, int, int]:
    """Faithful (c1, c2, x) for the hypergraph-to-DALkS gadget."""
    eps = _check_eps(eps)
    c1 = ell
    c2 = ceil(Fraction(10 ** 4 * t ** 3 * k) / eps ** 2)
    x = ceil_root(2 * (t - 1) * ell * c1 * c2, 2)
    return c1, c2, x


def dksh_to_dalks(
    inst: GapInstance,
    eps: Number,
    c1: int | None = None,
    c2: int | None = None,
    x: int | None = None,
) -> tuple[GapInstance, ReductionRecord]:
    """Clique K_x disjoint from the incidence graph with c1 element copies and c2 subset copies.

    Passing any of ``c1``, ``c2``, ``x`` switches to scaled-override mode and
    marks the output non-faithful.
    """
    _require(inst, GapKind.STRONG_GAP_DKSH)
    eps = _check_eps(eps)
    h: UniformHypergraph = inst.carrier
    t, k, ell = h.t, inst.k, int(inst.threshold)
    if t < 2:
        raise ParameterError("t must be >= 2")
    if ell < 1:
        raise ParameterError("ell must be >= 1")
    f1, f2, fx = gadget_constants(t, k, ell, eps)
    overridden = any(v is not None for v in (c1, c2, x))
    c1 = f1 if c1 is None else int(c1)
    c2 = f2 if c2 is None else int(c2)
    x = fx if x is None else int(x)
    if min(c1, c2, x) < 0:
        raise ParameterError("gadget constants must be nonnegative")
    shape = GadgetShape.from_hypergraph(h, x, c1, c2)
    k_new = x + c1 * k + c2 * ell
    alpha = (2 * t - 1) * c1 * (1 - eps / (10 * t))
    need_lambda = Fraction(20 * t * t) / eps
    need_gamma = Fraction(10 ** 7 * t ** 5) / eps ** 4
    faithful = inst.faithful and not overridden
    met = faithful and inst.params["lambda"] >= need_lambda and inst.params["gamma"] >= need_gamma
    gap = 2 - Fraction(1, t) - eps
    out = GapInstance(GapKind.GAP_DALKS, shape, k_new, alpha, {"lambda": gap, "eps": eps, "t": t}, faithful)
    rec = ReductionRecord(
        "dksh2dalks",
        {"k": k, "ell": ell, "t": t, "eps": eps, "scaled_override": overridden},
        {
            "c1": c1,
            "c2": c2,
            "x": x,
            "k_prime": k_new,
            "alpha": alpha,
            "required_lambda": need_lambda,
            "required_gamma": need_gamma,
            "vertices": shape.n_vertices,
            "edges": shape.n_edges,
        },
        met,
        shape.layout(),
        faithful,
    )
    return out, rec


def clique_to_dalks(g: Graph, k: int) -> tuple[GadgetShape, int, Fraction]:
    """K_k disjoint from the vertex-edge incidence graph of g."""
    if k < 1:
        raise ParameterError("k must be >= 1")
    if k < 10:
        warnings.warn("clique-to-DALkS soundness needs k >= 10", stacklevel=2)
    shape = GadgetShape.from_graph_incidence(g, k)
    k_new = 2 * k + comb(k, 2)
    alpha = Fraction(comb(k, 2) + 2 * comb(k, 2), k_new)
    return shape, k_new, alpha


def clique_to_dalks_instance(g: Graph, k: int) -> tuple[GapInstance, ReductionRecord]:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        shape, k_new, alpha = clique_to_dalks(g, k)
    out = GapInstance(GapKind.GAP_DALKS, shape, k_new, alpha, {"lambda": 1}, True)
    rec = ReductionRecord(
        "clique2dalks",
        {"k": k, "n": g.n, "m": g.m},
        {"x": k, "k_prime": k_new, "alpha": alpha, "vertices": shape.n_vertices, "edges": shape.n_edges},
        k >= 10,
        shape.layout(),
        True,
    )
    return out, rec


# --- theorem pipelines ----------------------------------------------------------

@dataclass(frozen=True)
class Stage:
    kind: GapKind
    params: dict[str, Number]


@dataclass(frozen=True)
class Check:
    step: str
    quantity: str
    required: Fraction
    provided: Fraction
    ok: bool


@dataclass(frozen=True)
class PipelinePlan:
    theorem: int
    eps: Fraction
    stages: list[Stage]
    checks: list[Check]
    notes: dict[str, Number]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "theorem": self.theorem,
            "eps": fmt_rat(self.eps),
            "stages": [{"kind": s.kind.value, "params": _render(s.params)} for s in self.stages],
            "checks": [
                {
                    "step": c.step,
                    "quantity": c.quantity,
                    "required": fmt_rat(c.required),
                    "provided": fmt_rat(c.provided),
                    "ok": c.ok,
                }
                for c in self.checks
            ],
            "notes": _render(self.notes),
        }

    def render(self) -> str:
        lines = [f"theorem {self.theorem}, eps = {fmt_rat(self.eps)}"]
        for i, s in enumerate(self.stages, 1):
            ps = ", ".join(f"{k}={fmt_rat(v)}" for k, v in s.params.items())
            lines.append(f"  {i}. {s.kind.value}({ps})")
        for c in self.checks:
            mark = "ok" if c.ok else "FAIL"
            lines.append(f"  [{mark}] {c.step}: {c.quantity} needs {fmt_rat(c.required)}, has {fmt_rat(c.provided)}")
        return "\n".join(lines) + "\n"


def _dominates(step: str, quantity: str, required: Fraction, provided: Fraction, larger_ok: bool = True) -> Check:
    ok = provided >= required if larger_ok else provided <= required
    return Check(step, quantity, required, provided, ok)


def plan_pipeline(theorem: int, eps: Number) -> PipelinePlan:
    """Parameter chain of the two hardness pipelines, with domination checks.

    A gap instance with a larger gap (lambda) or a larger size slack (gamma)
    is also an instance for any smaller value, so each step only needs the
    provided parameter to dominate the required one.
    """
    eps = _check_eps(eps)
    if theorem == 1:
        t = 2
        lam0 = Fraction(20 ** 16) / eps ** 9
        lam, gamma = Fraction(80) / eps, Fraction(20 ** 7) / eps ** 4
        stages = [
            Stage(GapKind.GAP_DKS, {"lambda": lam0}),
            Stage(GapKind.GAP_DKS_SIZE, {"lambda": lam, "gamma": gamma}),
            Stage(GapKind.STRONG_GAP_DKSH, {"lambda": lam, "gamma": gamma, "t": t}),
            Stage(GapKind.GAP_DALKS, {"lambda": Fraction(3, 2) - eps}),
        ]
        eps_gadget = eps
        checks = [
            _dominates("relax", "source lambda", 2 * lam * gamma ** 2, lam0),
            _dominates("dks2dksh", "lambda", lam, lam),
            _dominates("dks2dksh", "gamma", gamma, gamma),
        ]
    elif theorem == 3:
        t = ceil(2 / eps)
        gamma = Fraction(20 ** 7 * t ** 5) / eps ** 4
        lam = Fraction(40 * t * t) / eps
        delta0 = Fraction(1, 6 * t)
        stages = [
            Stage(GapKind.POLY_GAP_DKS, {"delta": delta0, "t": t}),
            Stage(GapKind.POLY_GAP_DKS_SIZE, {"delta": Fraction(1, 3), "t": t, "gamma": gamma}),
            Stage(GapKind.STRONG_GAP_DKSH, {"lambda": lam, "gamma": gamma, "t": t}),
            Stage(GapKind.GAP_DALKS, {"lambda": 2 - eps}),
        ]
        eps_gadget = eps / 2
        checks = [
            # smaller source delta means a stronger promise
            _dominates("shrink", "source delta", Fraction(1, 3) / (2 * t), delta0, larger_ok=False),
            _dominates("poly2dksh", "source delta", Fraction(1, 3), Fraction(1, 3), larger_ok=False),
            _dominates("poly2dksh", "gamma", gamma, gamma),
        ]
    else:
        raise ParameterError(f"theorem must be 1 or 3, got {theorem}")
    need_lambda = Fraction(20 * t * t) / eps_gadget
    need_gamma = Fraction(10 ** 7 * t ** 5) / eps_gadget ** 4
    final_gap = 2 - Fraction(1, t) - eps_gadget
    checks += [
        _dominates("dksh2dalks", "lambda", need_lambda, stages[2].params["lambda"]),
        _dominates("dksh2dalks", "gamma", need_gamma, stages[2].params["gamma"]),
        _dominates("dksh2dalks", "output gap", stages[3].params["lambda"], final_gap),
    ]
    notes = {
        "t": t,
        "gadget_eps": eps_gadget,
        "gadget_gamma_10e7": need_gamma,
        "pipeline_gamma_20e7": stages[2].params["gamma"],
    }
    return PipelinePlan(theorem, eps, stages, checks, notes)
