"""Weighted digraphs, structural validation and the disagreement basis.

The consensus algorithms analysed by this package run over strongly
connected, weight-balanced digraphs.  This module provides:

* :class:`Digraph` -- an immutable weighted directed graph,
* :func:`load_graph` / :func:`read_edge_list` -- constructors with strict
  input validation,
* :func:`validate` -- a :class:`StructureReport` with connectivity, balance
  and degree statistics,
* :func:`laplacian` -- the out-degree Laplacian ``L = D_out - A``,
* :func:`disagreement_basis` -- the orthonormal basis of the subspace
  orthogonal to the all-ones vector,
* small parametric families (:func:`ring_graph`, :func:`complete_graph`,
  :func:`path_graph`) and the fixed :func:`chorded_ring_graph` benchmark
  instance.

Node indices are 0-based throughout the API; edge-list *files* use 1-based
indices (see :func:`read_edge_list`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import InputFormatError, ParameterError

__all__ = [
    "Digraph",
    "StructureReport",
    "load_graph",
    "read_edge_list",
    "parse_edge_list",
    "validate",
    "laplacian",
    "disagreement_basis",
    "projector",
    "ring_graph",
    "complete_graph",
    "path_graph",
    "chorded_ring_graph",
]


@dataclass(frozen=True)
class Digraph:
    """Immutable weighted digraph with ``n`` nodes and positive edge weights.

    ``edges`` holds ``(tail, head, weight)`` triples with 0-based node
    indices; an edge ``(i, j, w)`` contributes ``w`` to entry ``A[i, j]`` of
    the adjacency matrix.
    """

    n: int
    edges: tuple[tuple[int, int, float], ...]

    def adjacency(self) -> np.ndarray:
        """Dense adjacency matrix ``A`` with ``A[i, j]`` the weight of ``i -> j``."""
        a = np.zeros((self.n, self.n))
        for i, j, w in self.edges:
            a[i, j] = w
        return a

    def out_degrees(self) -> np.ndarray:
        """Weighted out-degree of every node."""
        return self.adjacency().sum(axis=1)

    def in_degrees(self) -> np.ndarray:
        """Weighted in-degree of every node."""
        return self.adjacency().sum(axis=0)

    def reverse(self) -> "Digraph":
        """The digraph with every edge direction flipped."""
        return Digraph(self.n, tuple((j, i, w) for i, j, w in self.edges))


@dataclass(frozen=True)
class StructureReport:
    """Structural summary produced by :func:`validate`."""

    n: int
    edge_count: int
    strongly_connected: bool
    weight_balanced: bool
    balance_residual: float
    max_out_degree: float
    min_out_degree: float
    undirected: bool

    @property
    def is_scwb(self) -> bool:
        """True when the graph is strongly connected and weight-balanced."""
        return self.strongly_connected and self.weight_balanced

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "edge_count": self.edge_count,
            "strongly_connected": self.strongly_connected,
            "weight_balanced": self.weight_balanced,
            "is_scwb": self.is_scwb,
            "balance_residual": self.balance_residual,
            "max_out_degree": self.max_out_degree,
            "min_out_degree": self.min_out_degree,
            "undirected": self.undirected,
        }


def load_graph(edges: Iterable[Sequence], n: int | None = None) -> Digraph:
    """Build a :class:`Digraph` from ``(tail, head, weight)`` triples.

    Node indices are 0-based.  The node count defaults to one plus the
    largest index seen; passing ``n`` allows trailing isolated nodes
    (flagged later by :func:`validate`).

    Raises
    ------
    InputFormatError
        For self-loops, duplicate edges, non-positive or non-finite
        weights, negative indices, or indices outside an explicit ``n``.
    """
    triples: list[tuple[int, int, float]] = []
    seen: set[tuple[int, int]] = set()
    max_index = -1
    for edge in edges:
        if len(edge) != 3:
            raise InputFormatError(f"edge {edge!r} is not a (tail, head, weight) triple")
        i, j, w = int(edge[0]), int(edge[1]), float(edge[2])
        if i < 0 or j < 0:
            raise InputFormatError(f"edge ({i}, {j}) has a negative node index")
        if i == j:
            raise InputFormatError(f"self-loop on node {i} is not allowed")
        if not math.isfinite(w) or w <= 0.0:
            raise InputFormatError(f"edge ({i}, {j}) has non-positive weight {w!r}")
        if (i, j) in seen:
            raise InputFormatError(f"duplicate edge ({i}, {j})")
        seen.add((i, j))
        triples.append((i, j, w))
        max_index = max(max_index, i, j)
    inferred = max_index + 1
    if n is None:
        n = inferred
    elif n < inferred:
        raise InputFormatError(f"node count {n} is smaller than largest index + 1 = {inferred}")
    if n < 2:
        raise InputFormatError("a graph needs at least 2 nodes")
    return Digraph(int(n), tuple(triples))


def parse_edge_list(text: str, n: int | None = None) -> Digraph:
    """Parse edge-list text: one ``i j w`` triple per line, 1-based indices.

    Blank lines are skipped and ``#`` starts a comment.  The node count is
    inferred from the largest index unless ``n`` is given.
    """
    edges: list[tuple[int, int, float]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 3:
            raise InputFormatError(
                f"line {lineno}: expected 'i j w' (3 fields), got {len(fields)}: {raw.strip()!r}"
            )
        try:
            i, j = int(fields[0]), int(fields[1])
            w = float(fields[2])
        except ValueError as exc:
            raise InputFormatError(f"line {lineno}: {exc}") from None
        if i < 1 or j < 1:
            raise InputFormatError(f"line {lineno}: node indices are 1-based, got ({i}, {j})")
        edges.append((i - 1, j - 1, w))
    if not edges:
        raise InputFormatError("edge list contains no edges")
    try:
        return load_graph(edges, n=n)
    except InputFormatError as exc:
        raise InputFormatError(f"edge list invalid: {exc}") from None


def read_edge_list(path: str | Path, n: int | None = None) -> Digraph:
    """Read an edge-list file (see :func:`parse_edge_list` for the format)."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputFormatError(f"cannot read edge list {path}: {exc}") from None
    try:
        return parse_edge_list(text, n=n)
    except InputFormatError as exc:
        raise InputFormatError(f"{path}: {exc}") from None


def _reachable_from_zero(g: Digraph, reverse: bool) -> bool:
    """Breadth-first reachability of every node from node 0."""
    adj: list[list[int]] = [[] for _ in range(g.n)]
    for i, j, _ in g.edges:
        if reverse:
            adj[j].append(i)
        else:
            adj[i].append(j)
    seen = [False] * g.n
    seen[0] = True
    stack = [0]
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                stack.append(v)
    return all(seen)


def validate(g: Digraph, balance_tol: float = 1e-9) -> StructureReport:
    """Check strong connectivity, weight balance and degree statistics.

    Strong connectivity is decided by two reachability sweeps from node 0,
    one along the edges and one against them.  Weight balance compares the
    weighted in- and out-degree of every node against ``balance_tol``
    (scaled by the largest degree).
    """
    a = g.adjacency()
    out_deg = a.sum(axis=1)
    in_deg = a.sum(axis=0)
    residual = float(np.max(np.abs(in_deg - out_deg))) if g.n else 0.0
    scale = max(1.0, float(out_deg.max(initial=0.0)))
    balanced = residual <= balance_tol * scale
    connected = _reachable_from_zero(g, reverse=False) and _reachable_from_zero(g, reverse=True)
    undirected = bool(np.allclose(a, a.T, rtol=0.0, atol=balance_tol * scale))
    return StructureReport(
        n=g.n,
        edge_count=len(g.edges),
        strongly_connected=connected,
        weight_balanced=balanced,
        balance_residual=residual,
        max_out_degree=float(out_deg.max(initial=0.0)),
        min_out_degree=float(out_deg.min(initial=0.0)),
        undirected=undirected,
    )


def laplacian(g: Digraph) -> np.ndarray:
    """Out-degree Laplacian ``L = D_out - A``; every row sums to zero."""
    a = g.adjacency()
    return np.diag(a.sum(axis=1)) - a


def disagreement_basis(n: int) -> np.ndarray:
    """Orthonormal basis ``R`` (``n x (n-1)``) of the subspace orthogonal to 1.

    Built from the Householder reflection that maps the first canonical
    basis vector to ``1/sqrt(n) * ones``; columns 2..n of the reflector form
    ``R``.  The construction is deterministic, ``R^T R = I`` and
    ``R R^T = I - ones*ones^T/n``.
    """
    if n < 2:
        raise ParameterError(f"disagreement basis needs n >= 2, got {n}")
    u = np.full(n, 1.0 / math.sqrt(n))
    v = -u
    v[0] += 1.0  # v = e1 - u
    q = np.eye(n) - (2.0 / (v @ v)) * np.outer(v, v)
    return q[:, 1:]


def projector(n: int) -> np.ndarray:
    """Projector ``I - ones*ones^T/n`` onto the disagreement subspace."""
    return np.eye(n) - np.full((n, n), 1.0 / n)


def _require_size(n: int, what: str) -> None:
    if n < 2:
        raise ParameterError(f"{what} needs n >= 2, got {n}")


def ring_graph(n: int, weight: float = 1.0) -> Digraph:
    """Directed cycle ``0 -> 1 -> ... -> n-1 -> 0`` with uniform weights."""
    _require_size(n, "ring graph")
    return load_graph([(i, (i + 1) % n, weight) for i in range(n)])


def complete_graph(n: int, weight: float = 1.0) -> Digraph:
    """Complete digraph with all ordered pairs present (symmetric weights)."""
    _require_size(n, "complete graph")
    return load_graph([(i, j, weight) for i in range(n) for j in range(n) if i != j])


def path_graph(n: int, weight: float = 1.0) -> Digraph:
    """Undirected path ``0 - 1 - ... - n-1`` (each edge in both directions)."""
    _require_size(n, "path graph")
    edges = []
    for i in range(n - 1):
        edges.append((i, i + 1, weight))
        edges.append((i + 1, i, weight))
    return load_graph(edges)


def chorded_ring_graph() -> Digraph:
    """Six-node directed ring with two bidirected chords.

    The ring ``0 -> 1 -> 2 -> 3 -> 4 -> 5 -> 0`` plus chords between nodes
    2 and 4 and between nodes 0 and 4 (both directions, unit weights).  The
    graph is strongly connected and weight-balanced with maximum out-degree
    three; it is the standard "denser than a ring" benchmark instance used
    in the tests.
    """
    edges = [(i, (i + 1) % 6, 1.0) for i in range(6)]
    edges += [(2, 4, 1.0), (4, 2, 1.0), (0, 4, 1.0), (4, 0, 1.0)]
    return load_graph(edges)
