"""Simple undirected graphs, their Laplacians and degree data.

Also builds the two families the rest of the package cares about:
1-regular semi-bipartite graphs (a clique with pendant vertices hanging off
some of its members) and threshold graphs (grown by repeatedly adding an
isolated or a dominating vertex).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

from .linalg import SymmetricMatrix


class GraphError(ValueError):
    pass


class EdgeListError(ValueError):
    """Malformed edge-list input; ``line`` is the 1-based offending line."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on vertices ``0..vertex_count-1``.

    Edges are stored normalised (``u < v``), deduplicated and sorted.
    """

    vertex_count: int
    edges: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.vertex_count < 0:
            raise GraphError("vertex_count must be nonnegative")
        canon = set()
        for idx, edge in enumerate(self.edges):
            u, v = (int(x) for x in edge)
            if u == v:
                raise GraphError(f"edge {idx} ({u}, {v}) is a self-loop")
            for w in (u, v):
                if not 0 <= w < self.vertex_count:
                    raise GraphError(
                        f"edge {idx} ({u}, {v}): endpoint {w} out of range "
                        f"0..{self.vertex_count - 1}")
            canon.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", tuple(sorted(canon)))

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def degrees(self) -> tuple[int, ...]:
        deg = [0] * self.vertex_count
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return tuple(deg)


@dataclass(frozen=True)
class SemiBipartitePartition:
    clique_vertices: tuple[int, ...]
    attachment_vertices: tuple[int, ...]
    extra_vertices: tuple[int, ...]
    pendant_groups: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class DegreeData:
    """Degrees and the conjugate sequence.

    ``conjugate[m - 1]`` counts vertices of degree at least ``m`` for
    ``m = 1..vertex_count``.
    """

    degrees: tuple[int, ...]
    conjugate: tuple[int, ...]


class Creation(str, enum.Enum):
    ISOLATED = "isolated"
    DOMINATING = "dominating"


def build_graph(vertex_count: int, edges: Iterable[Sequence[int]]) -> Graph:
    return Graph(int(vertex_count), tuple(tuple(e) for e in edges))


def build_semibipartite(n: int, ks: Sequence[int]) -> tuple[Graph, SemiBipartitePartition]:
    """Clique on ``0..n-1``; clique vertex ``l`` gets ``ks[l]`` fresh pendant
    vertices, numbered consecutively after the clique."""
    ks = [int(k) for k in ks]
    j = len(ks)
    if n < 1:
        raise GraphError("clique size n must be positive")
    if j > n:
        raise GraphError(f"{j} pendant groups do not fit on a clique of size {n}")
    if any(k < 1 for k in ks):
        raise GraphError(f"every pendant group needs k >= 1, got {ks}")
    edges = [(u, v) for u in range(n) for v in range(u + 1, n)]
    groups = []
    nxt = n
    for l, k in enumerate(ks):
        group = tuple(range(nxt, nxt + k))
        edges.extend((l, w) for w in group)
        groups.append(group)
        nxt += k
    g = Graph(nxt, tuple(edges))
    part = SemiBipartitePartition(
        clique_vertices=tuple(range(n)),
        attachment_vertices=tuple(range(j)),
        extra_vertices=tuple(range(j, n)),
        pendant_groups=tuple(groups),
    )
    return g, part


def build_threshold(creation_sequence: Sequence[Union[Creation, str]]) -> Graph:
    steps = [Creation(s) for s in creation_sequence]
    if not steps:
        raise GraphError("creation sequence must be nonempty")
    edges = []
    for v, step in enumerate(steps):
        if step is Creation.DOMINATING:
            edges.extend((u, v) for u in range(v))
    return Graph(len(steps), tuple(edges))


def adjacency(g: Graph) -> np.ndarray:
    a = np.zeros((g.vertex_count, g.vertex_count))
    if g.edges:
        u, v = np.array(g.edges).T
        a[u, v] = 1.0
        a[v, u] = 1.0
    return a


def laplacian(g: Graph) -> SymmetricMatrix:
    a = adjacency(g)
    return SymmetricMatrix(np.diag(a.sum(axis=1)) - a)


def degree_data(g: Graph) -> DegreeData:
    deg = g.degrees()
    counts = np.bincount(np.array(deg, dtype=int), minlength=g.vertex_count + 1)
    # vertices of degree >= m, read off a reversed cumulative count
    at_least = np.cumsum(counts[::-1])[::-1]
    conj = tuple(int(c) for c in at_least[1:g.vertex_count + 1])
    return DegreeData(deg, conj)


def quadratic_form(g: Graph, x: Sequence[float]) -> float:
    """Sum of ``(x_u - x_v)**2`` over the edges."""
    x = np.asarray(x, dtype=float)
    if x.shape != (g.vertex_count,):
        raise ValueError(f"expected a vector of length {g.vertex_count}, got shape {x.shape}")
    if not g.edges:
        return 0.0
    u, v = np.array(g.edges).T
    return float(np.sum((x[u] - x[v]) ** 2))


def parse_edge_list(text: str) -> Graph:
    """Parse the plain edge-list format.

    ``#`` lines and blank lines are skipped; the first remaining line is
    ``p N`` and every later one is an edge ``u v`` with 0-based endpoints.
    """
    vertex_count = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if vertex_count is None:
            if len(fields) != 2 or fields[0] != "p":
                raise EdgeListError(lineno, f"expected header 'p N', got {line!r}")
            try:
                vertex_count = int(fields[1])
            except ValueError:
                raise EdgeListError(lineno, f"vertex count {fields[1]!r} is not an integer") from None
            if vertex_count < 0:
                raise EdgeListError(lineno, "vertex count must be nonnegative")
            continue
        if len(fields) != 2:
            raise EdgeListError(lineno, f"expected 'u v', got {line!r}")
        try:
            u, v = int(fields[0]), int(fields[1])
        except ValueError:
            raise EdgeListError(lineno, f"non-integer endpoint in {line!r}") from None
        if u == v:
            raise EdgeListError(lineno, f"self-loop at vertex {u}")
        for w in (u, v):
            if not 0 <= w < vertex_count:
                raise EdgeListError(lineno, f"endpoint {w} out of range 0..{vertex_count - 1}")
        edges.append((u, v))
    if vertex_count is None:
        raise EdgeListError(0, "missing 'p N' header")
    return Graph(vertex_count, tuple(edges))


def read_edge_list(path: Union[str, Path]) -> Graph:
    return parse_edge_list(Path(path).read_text(encoding="utf-8"))


def format_edge_list(g: Graph) -> str:
    lines = [f"p {g.vertex_count}"]
    lines.extend(f"{u} {v}" for u, v in g.edges)
    return "\n".join(lines) + "\n"
