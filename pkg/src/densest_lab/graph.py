"""Graphs, uniform hypergraphs and witnesses, with their text formats."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidInputError
from .rational import Number, fmt_rat, parse_rat


@dataclass(frozen=True, eq=True)
class Graph:
    """Simple undirected graph on vertices ``0..n-1``.

    Edges are normalised to ``u < v`` and kept sorted, so two graphs with the
    same edge set compare (and serialise) identically.
    """

    n: int
    edges: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        if self.n < 0:
            raise InvalidInputError("vertex count must be nonnegative")
        canon = set()
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise InvalidInputError(f"self-loop at {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise InvalidInputError(f"edge ({u},{v}) out of range for n={self.n}")
            e = (u, v) if u < v else (v, u)
            if e in canon:
                raise InvalidInputError(f"duplicate edge {e}")
            canon.add(e)
        object.__setattr__(self, "edges", tuple(sorted(canon)))

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def adj_masks(self) -> tuple[int, ...]:
        masks = [0] * self.n
        for u, v in self.edges:
            masks[u] |= 1 << v
            masks[v] |= 1 << u
        return tuple(masks)

    @cached_property
    def neighbors(self) -> tuple[frozenset[int], ...]:
        nb: list[set[int]] = [set() for _ in range(self.n)]
        for u, v in self.edges:
            nb[u].add(v)
            nb[v].add(u)
        return tuple(frozenset(s) for s in nb)

    def degree(self, v: int) -> int:
        return len(self.neighbors[v])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.neighbors[u]

    def induced_edge_count(self, vertices: Iterable[int]) -> int:
        mask = 0
        for v in vertices:
            mask |= 1 << v
        masks = self.adj_masks
        total = 0
        rest = mask
        while rest:
            low = rest & -rest
            v = low.bit_length() - 1
            total += bin(masks[v] & mask).count("1")
            rest ^= low
        return total // 2

    def induced(self, vertices: Sequence[int]) -> "Graph":
        """Induced subgraph, relabelled to ``0..len(vertices)-1`` in the given order."""
        index = {v: i for i, v in enumerate(vertices)}
        return Graph(len(vertices), tuple((index[u], index[v]) for u, v in self.edges if u in index and v in index))

    def disjoint_union(self, other: "Graph") -> "Graph":
        shift = self.n
        return Graph(self.n + other.n, self.edges + tuple((u + shift, v + shift) for u, v in other.edges))

    # --- constructors -------------------------------------------------
    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls(n, tuple(combinations(range(n), 2)))

    @classmethod
    def cycle(cls, n: int) -> "Graph":
        if n < 3:
            raise InvalidInputError("cycle needs n >= 3")
        return cls(n, tuple((i, (i + 1) % n) for i in range(n)))

    @classmethod
    def path(cls, n: int) -> "Graph":
        return cls(n, tuple((i, i + 1) for i in range(n - 1)))

    @classmethod
    def complete_bipartite(cls, a: int, b: int) -> "Graph":
        return cls(a + b, tuple((i, a + j) for i in range(a) for j in range(b)))

    @classmethod
    def star(cls, leaves: int) -> "Graph":
        return cls(leaves + 1, tuple((0, i) for i in range(1, leaves + 1)))

    # --- text format ----------------------------------------------------
    def dumps(self) -> str:
        lines = [f"{self.n} {self.m}"]
        lines.extend(f"{u} {v}" for u, v in self.edges)
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "Graph":
        rows = _data_rows(text)
        if not rows:
            raise InvalidInputError("empty graph file")
        header = _ints(rows[0], 2, "graph header")
        n, m = header
        if len(rows) - 1 != m:
            raise InvalidInputError(f"graph header promises {m} edges, found {len(rows) - 1}")
        edges = []
        for row in rows[1:]:
            u, v = _ints(row, 2, "edge line")
            if u >= v:
                raise InvalidInputError(f"edge line must have u < v, got {u} {v}")
            edges.append((u, v))
        return cls(n, tuple(edges))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def load(cls, path: str | Path) -> "Graph":
        return cls.loads(Path(path).read_text())


@dataclass(frozen=True, eq=False)
class UniformHypergraph:
    """Universe ``0..n-1`` with a canonically sorted family of t-subsets.

    Subsets live in an ``(s, t)`` integer array; rows are sorted and the row
    order is lexicographic.
    """

    n: int
    t: int
    subsets: np.ndarray = field(default_factory=lambda: np.zeros((0, 0), dtype=np.int64))

    def __post_init__(self) -> None:
        if self.t < 1:
            raise InvalidInputError("uniformity must be >= 1")
        arr = np.asarray(self.subsets, dtype=np.int64)
        if arr.size == 0:
            arr = arr.reshape(0, self.t)
        if arr.ndim != 2 or arr.shape[1] != self.t:
            raise InvalidInputError(f"subsets must have exactly t={self.t} elements")
        arr = np.sort(arr, axis=1)
        if arr.size:
            if arr.min() < 0 or arr.max() >= self.n:
                raise InvalidInputError("subset element out of range")
            if self.t > 1 and np.any(arr[:, 1:] == arr[:, :-1]):
                raise InvalidInputError("subset with repeated element")
            order = np.lexsort(arr.T[::-1])
            arr = arr[order]
            if len(arr) > 1 and np.any(np.all(arr[1:] == arr[:-1], axis=1)):
                raise InvalidInputError("duplicate subset")
        arr.setflags(write=False)
        object.__setattr__(self, "subsets", arr)

    @property
    def s(self) -> int:
        return int(self.subsets.shape[0])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, UniformHypergraph):
            return NotImplemented
        return self.n == other.n and self.t == other.t and np.array_equal(self.subsets, other.subsets)

    def __hash__(self) -> int:
        return hash((self.n, self.t, self.subsets.tobytes()))

    def subset_list(self) -> list[tuple[int, ...]]:
        return [tuple(int(x) for x in row) for row in self.subsets]

    def contained_count(self, elements: Iterable[int]) -> int:
        """Number of subsets lying entirely inside ``elements``."""
        mask = np.zeros(self.n, dtype=bool)
        mask[list(elements)] = True
        if self.s == 0:
            return 0
        return int(np.all(mask[self.subsets], axis=1).sum())

    def contained_indices(self, elements: Iterable[int]) -> np.ndarray:
        mask = np.zeros(self.n, dtype=bool)
        mask[list(elements)] = True
        if self.s == 0:
            return np.zeros(0, dtype=np.int64)
        return np.flatnonzero(np.all(mask[self.subsets], axis=1))

    def hit_count(self, elements: Iterable[int], at_least: int = 2) -> int:
        """Number of subsets meeting ``elements`` in at least ``at_least`` points."""
        mask = np.zeros(self.n, dtype=bool)
        mask[list(elements)] = True
        if self.s == 0:
            return 0
        return int((mask[self.subsets].sum(axis=1) >= at_least).sum())

    def dumps(self) -> str:
        lines = [f"{self.n} {self.s} {self.t}"]
        lines.extend(" ".join(str(int(x)) for x in row) for row in self.subsets)
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "UniformHypergraph":
        rows = _data_rows(text)
        if not rows:
            raise InvalidInputError("empty hypergraph file")
        n, s, t = _ints(rows[0], 3, "hypergraph header")
        if len(rows) - 1 != s:
            raise InvalidInputError(f"hypergraph header promises {s} subsets, found {len(rows) - 1}")
        body = [_ints(row, t, "subset line") for row in rows[1:]]
        for row in body:
            if list(row) != sorted(row):
                raise InvalidInputError("subset line must list sorted indices")
        return cls(n, t, np.array(body, dtype=np.int64).reshape(s, t))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def load(cls, path: str | Path) -> "UniformHypergraph":
        return cls.loads(Path(path).read_text())


@dataclass(frozen=True)
class Witness:
    vertices: tuple[int, ...]
    claimed_value: Number | None = None

    def __post_init__(self) -> None:
        verts = tuple(sorted(int(v) for v in self.vertices))
        if any(a == b for a, b in zip(verts, verts[1:])):
            raise InvalidInputError("witness contains duplicate indices")
        if verts and verts[0] < 0:
            raise InvalidInputError("negative witness index")
        object.__setattr__(self, "vertices", verts)

    def __len__(self) -> int:
        return len(self.vertices)

    def dumps(self) -> str:
        lines = [str(len(self.vertices))]
        lines.extend(str(v) for v in self.vertices)
        if self.claimed_value is not None:
            lines.insert(0, f"# claimed {fmt_rat(self.claimed_value)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "Witness":
        claimed = None
        tokens: list[str] = []
        for line in text.splitlines():
            stripped = line.strip()
            if stripped.startswith("# claimed"):
                claimed = parse_rat(stripped[len("# claimed"):])
                continue
            if not stripped or stripped.startswith("#"):
                continue
            tokens.extend(stripped.split())
        if not tokens:
            raise InvalidInputError("empty witness file")
        try:
            size, *rest = (int(tok) for tok in tokens)
        except ValueError as exc:
            raise InvalidInputError("witness file must contain integers") from exc
        if size != len(rest):
            raise InvalidInputError(f"witness header says {size} indices, found {len(rest)}")
        if rest != sorted(rest):
            raise InvalidInputError("witness indices must be sorted")
        return cls(tuple(rest), claimed)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def load(cls, path: str | Path) -> "Witness":
        return cls.loads(Path(path).read_text())


def density(g: Graph, vertices: Iterable[int]) -> Fraction:
    """Exact edge/vertex ratio of the induced subgraph on ``vertices``."""
    verts = set(vertices)
    if not verts:
        raise InvalidInputError("density of an empty vertex set is undefined")
    if min(verts) < 0 or max(verts) >= g.n:
        raise InvalidInputError("vertex set not contained in the graph")
    return Fraction(g.induced_edge_count(verts), len(verts))


def _data_rows(text: str) -> list[str]:
    return [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.strip().startswith("#")]


def _ints(row: str, count: int, what: str) -> tuple[int, ...]:
    parts = row.split()
    if len(parts) != count:
        raise InvalidInputError(f"{what}: expected {count} integers, got {row!r}")
    try:
        values = tuple(int(p) for p in parts)
    except ValueError as exc:
        raise InvalidInputError(f"{what}: non-integer token in {row!r}") from exc
    if any(v < 0 for v in values):
        raise InvalidInputError(f"{what}: negative value in {row!r}")
    return values
