"""Seeded random graph models used to feed the property suites."""
from __future__ import annotations

import random
from fractions import Fraction

from .errors import ParameterError
from .graph import Graph
from .rational import Number


def _bernoulli(rng: random.Random, p: Fraction) -> bool:
    return rng.randrange(p.denominator) < p.numerator


def _check_p(p: Number) -> Fraction:
    p = Fraction(p)
    if not 0 <= p <= 1:
        raise ParameterError("edge probability must lie in [0, 1]")
    return p


def gnp(n: int, p: Number, seed: int) -> Graph:
    """Erdős–Rényi G(n, p); pairs are visited in lexicographic order."""
    if n < 0:
        raise ParameterError("n must be nonnegative")
    p = _check_p(p)
    rng = random.Random(seed)
    return Graph(n, tuple((u, v) for u in range(n) for v in range(u + 1, n) if _bernoulli(rng, p)))


def planted_clique(n: int, p: Number, k: int, seed: int) -> Graph:
    """G(n, p) with a clique overlaid on vertices 0..k-1."""
    return planted_dense(n, p, k, seed, q=1)


def planted_dense(n: int, p: Number, k: int, seed: int, q: Number = Fraction(3, 4)) -> Graph:
    """G(n, p) with G(k, q) overlaid on vertices 0..k-1."""
    if not 0 <= k <= n:
        raise ParameterError("need 0 <= k <= n")
    p, q = _check_p(p), _check_p(q)
    rng = random.Random(seed)
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            hit = _bernoulli(rng, p)
            if v < k and not hit:
                hit = _bernoulli(rng, q)
            if hit:
                edges.append((u, v))
    return Graph(n, tuple(edges))


MODELS = {"gnp", "planted-clique", "planted-dense"}


def generate(model: str, n: int, p: Number, k: int, seed: int, q: Number = Fraction(3, 4)) -> Graph:
    if model == "gnp":
        return gnp(n, p, seed)
    if model == "planted-clique":
        return planted_clique(n, p, k, seed)
    if model == "planted-dense":
        return planted_dense(n, p, k, seed, q)
    raise ParameterError(f"unknown model {model!r}")
