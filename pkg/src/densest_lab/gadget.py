"""Compact description of clique-plus-incidence gadget graphs.

A gadget is the disjoint union of a clique ``K_x`` and a bipartite graph in
which every copy of an element class is joined to every copy of each subset
class containing it. Vertex layout is fixed: clique vertices first, then
element copies (element-major), then subset copies (subset-major).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import comb
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .errors import InvalidInputError, OracleTooLarge
from .graph import Graph, UniformHypergraph, _data_rows, _ints

_CHUNK = 1 << 22


@dataclass(frozen=True)
class GadgetShape:
    x: int
    element_mult: tuple[int, ...]
    subset_mult: tuple[int, ...]
    subset_members: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if self.x < 0:
            raise InvalidInputError("clique size must be nonnegative")
        object.__setattr__(self, "element_mult", tuple(int(c) for c in self.element_mult))
        object.__setattr__(self, "subset_mult", tuple(int(c) for c in self.subset_mult))
        members = tuple(tuple(sorted(int(u) for u in mem)) for mem in self.subset_members)
        object.__setattr__(self, "subset_members", members)
        if len(self.subset_mult) != len(members):
            raise InvalidInputError("one member list per subset class required")
        if any(c < 0 for c in self.element_mult + self.subset_mult):
            raise InvalidInputError("multiplicities must be nonnegative")
        L = len(self.element_mult)
        for mem in members:
            if len(set(mem)) != len(mem) or any(not 0 <= u < L for u in mem):
                raise InvalidInputError(f"bad subset class members {mem}")

    # --- sizes and layout --------------------------------------------------
    @property
    def n_left(self) -> int:
        return sum(self.element_mult)

    @property
    def n_right(self) -> int:
        return sum(self.subset_mult)

    @property
    def n_vertices(self) -> int:
        return self.x + self.n_left + self.n_right

    @cached_property
    def class_weight(self) -> tuple[int, ...]:
        """Degree of each copy of a subset class: total member-element copies."""
        return tuple(sum(self.element_mult[u] for u in mem) for mem in self.subset_members)

    @property
    def n_edges(self) -> int:
        return comb(self.x, 2) + sum(c * w for c, w in zip(self.subset_mult, self.class_weight))

    @cached_property
    def element_offsets(self) -> np.ndarray:
        return self.x + np.concatenate(([0], np.cumsum(self.element_mult, dtype=np.int64)))

    @cached_property
    def subset_offsets(self) -> np.ndarray:
        return self.x + self.n_left + np.concatenate(([0], np.cumsum(self.subset_mult, dtype=np.int64)))

    def element_vertex(self, cls: int, copy: int) -> int:
        return int(self.element_offsets[cls]) + copy

    def subset_vertex(self, cls: int, copy: int) -> int:
        return int(self.subset_offsets[cls]) + copy

    def layout(self) -> dict[str, list[int]]:
        return {
            "clique": [0, self.x],
            "elements": [self.x, self.x + self.n_left],
            "subsets": [self.x + self.n_left, self.n_vertices],
        }

    # --- analytic evaluation -----------------------------------------------
    def classify(self, vertices: Iterable[int]) -> tuple[int, np.ndarray, np.ndarray]:
        """Split a vertex set into (clique count, per-element-class, per-subset-class) counts."""
        verts = np.asarray(sorted(set(int(v) for v in vertices)), dtype=np.int64)
        if verts.size and (verts[0] < 0 or verts[-1] >= self.n_vertices):
            raise InvalidInputError("vertex index outside the gadget")
        y = int(np.searchsorted(verts, self.x))
        left_end = self.x + self.n_left
        left = verts[(verts >= self.x) & (verts < left_end)]
        right = verts[verts >= left_end]
        L, R = len(self.element_mult), len(self.subset_mult)
        a = np.bincount(np.searchsorted(self.element_offsets, left, side="right") - 1, minlength=L)[:L]
        b = np.bincount(np.searchsorted(self.subset_offsets, right, side="right") - 1, minlength=R)[:R]
        return y, a.astype(np.int64), b.astype(np.int64)

    def edges_from_counts(self, y: int, a: Iterable[int], b: Iterable[int]) -> int:
        a = list(int(v) for v in a)
        total = comb(y, 2)
        for cnt, mem in zip(b, self.subset_members):
            if cnt:
                total += int(cnt) * sum(a[u] for u in mem)
        return total

    def induced_edge_count(self, vertices: Iterable[int]) -> int:
        y, a, b = self.classify(vertices)
        return self.edges_from_counts(y, a, b)

    def density(self, vertices: Iterable[int]) -> Fraction:
        verts = set(int(v) for v in vertices)
        if not verts:
            raise InvalidInputError("density of an empty vertex set is undefined")
        return Fraction(self.induced_edge_count(verts), len(verts))

    # --- explicit expansion ------------------------------------------------
    def iter_edge_blocks(self) -> Iterator[tuple[np.ndarray, np.ndarray]]:
        """Yield the expanded edge list as ``(u, v)`` numpy chunks, u < v."""
        x = self.x
        rows_per_chunk = max(1, _CHUNK // max(x, 1))
        for start in range(0, max(x - 1, 0), rows_per_chunk):
            stop = min(x - 1, start + rows_per_chunk)
            us, vs = [], []
            for u in range(start, stop):
                vs.append(np.arange(u + 1, x, dtype=np.int64))
                us.append(np.full(x - u - 1, u, dtype=np.int64))
            yield np.concatenate(us), np.concatenate(vs)
        for cls, (mult, mem) in enumerate(zip(self.subset_mult, self.subset_members)):
            if not mult or not mem:
                continue
            left = np.concatenate(
                [np.arange(self.element_offsets[u], self.element_offsets[u + 1], dtype=np.int64) for u in mem]
            )
            if left.size == 0:
                continue
            per = max(1, _CHUNK // left.size)
            base = int(self.subset_offsets[cls])
            for start in range(0, mult, per):
                right = np.arange(base + start, base + min(mult, start + per), dtype=np.int64)
                yield np.repeat(left, right.size), np.tile(right, left.size)

    def materialized_edge_count(self, vertices: Iterable[int] | None = None) -> int:
        """Count edges of the explicit expansion, optionally inside a vertex set."""
        if vertices is None:
            return sum(int(u.size) for u, _ in self.iter_edge_blocks())
        mask = np.zeros(self.n_vertices, dtype=bool)
        mask[np.fromiter((int(v) for v in vertices), dtype=np.int64)] = True
        return sum(int(np.count_nonzero(mask[u] & mask[v])) for u, v in self.iter_edge_blocks())

    def expand(self, limit: int = 1 << 21) -> Graph:
        if self.n_edges + self.n_vertices > limit:
            raise OracleTooLarge(f"oracle too large: expansion has {self.n_edges} edges, limit {limit}")
        edges: list[tuple[int, int]] = []
        for u, v in self.iter_edge_blocks():
            edges.extend(zip(u.tolist(), v.tolist()))
        return Graph(self.n_vertices, tuple(edges))

    # --- constructors --------------------------------------------------------
    @classmethod
    def from_hypergraph(cls, h: UniformHypergraph, x: int, c1: int, c2: int) -> "GadgetShape":
        return cls(x, (c1,) * h.n, (c2,) * h.s, tuple(tuple(int(u) for u in row) for row in h.subsets))

    @classmethod
    def from_graph_incidence(cls, g: Graph, x: int) -> "GadgetShape":
        return cls(x, (1,) * g.n, (1,) * g.m, g.edges)

    # --- text format -----------------------------------------------------------
    def dumps(self) -> str:
        lines = [f"gadget {self.x} {len(self.element_mult)} {len(self.subset_mult)}"]
        lines.extend(f"{i} {c}" for i, c in enumerate(self.element_mult))
        for i, (c, mem) in enumerate(zip(self.subset_mult, self.subset_members)):
            lines.append(" ".join([str(i), str(c), *map(str, mem)]))
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "GadgetShape":
        rows = _data_rows(text)
        if not rows or not rows[0].startswith("gadget"):
            raise InvalidInputError("gadget file must start with 'gadget x L R'")
        x, L, R = _ints(rows[0][len("gadget"):], 3, "gadget header")
        if len(rows) != 1 + L + R:
            raise InvalidInputError(f"gadget header promises {L + R} class lines, found {len(rows) - 1}")
        elem = []
        for i, row in enumerate(rows[1:1 + L]):
            cid, mult = _ints(row, 2, "element class line")
            if cid != i:
                raise InvalidInputError(f"element class ids must be 0..L-1 in order, got {cid}")
            elem.append(mult)
        mults, members = [], []
        for i, row in enumerate(rows[1 + L:]):
            parts = row.split()
            vals = _ints(row, len(parts), "subset class line")
            if len(vals) < 2 or vals[0] != i:
                raise InvalidInputError(f"subset class ids must be 0..R-1 in order, got {row!r}")
            if list(vals[2:]) != sorted(vals[2:]):
                raise InvalidInputError("subset class members must be sorted")
            mults.append(vals[1])
            members.append(tuple(vals[2:]))
        return cls(x, tuple(elem), tuple(mults), tuple(members))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def load(cls, path: str | Path) -> "GadgetShape":
        return cls.loads(Path(path).read_text())
