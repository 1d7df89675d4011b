"""Directed, node-labeled multi-graphs with edge multiplicities.

Nodes are dense integers ``0..n-1``; original string ids from input files are
kept in ``node_names`` so every export can be mapped back.  Adjacency is
stored CSR-style in sorted numpy arrays, once, at construction time — graphs
are immutable after that.  A self-loop appears in both the out- and the
in-adjacency of its node.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

DEFAULT_LABEL = "node"


class GraphFormatError(ValueError):
    """Raised for malformed input files; message carries the line number."""


class LabeledMultiGraph:
    def __init__(
        self,
        n: int,
        edges: dict[tuple[int, int], int],
        labels: Sequence[int] | None = None,
        label_names: Sequence[str] | None = None,
        node_names: Sequence[str] | None = None,
    ):
        if n < 1:
            raise ValueError("graph needs at least one node")
        self.n = n
        self.label_names = list(label_names) if label_names else [DEFAULT_LABEL]
        if labels is None:
            labels = [0] * n
        self.labels = np.asarray(labels, dtype=np.int64)
        if self.labels.shape != (n,):
            raise ValueError("labels must assign one label to every node")
        if len(self.labels) and (
            self.labels.min() < 0 or self.labels.max() >= len(self.label_names)
        ):
            raise ValueError("label id out of range")
        self.node_names = (
            list(node_names) if node_names is not None else [str(i) for i in range(n)]
        )
        if len(self.node_names) != n:
            raise ValueError("node_names must cover every node")

        for (u, w), m in edges.items():
            if not (0 <= u < n and 0 <= w < n):
                raise ValueError(f"edge ({u}, {w}) out of node range")
            if m < 1:
                raise ValueError(f"edge ({u}, {w}) has multiplicity {m} < 1")

        m_edges = len(edges)
        src = np.empty(m_edges, dtype=np.int64)
        dst = np.empty(m_edges, dtype=np.int64)
        mult = np.empty(m_edges, dtype=np.int64)
        for i, ((u, w), m) in enumerate(edges.items()):
            src[i], dst[i], mult[i] = u, w, m

        order = np.lexsort((dst, src))
        self.out_src = src[order]
        self.out_dst = dst[order]
        self.out_mult = mult[order]
        self.out_indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(self.out_indptr, self.out_src + 1, 1)
        np.cumsum(self.out_indptr, out=self.out_indptr)

        order = np.lexsort((src, dst))
        self.in_src = src[order]
        self.in_dst = dst[order]
        self.in_mult = mult[order]
        self.in_indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(self.in_indptr, self.in_dst + 1, 1)
        np.cumsum(self.in_indptr, out=self.in_indptr)

        self._token_cache: tuple[np.ndarray, np.ndarray] | None = None

    # -- basic accessors ---------------------------------------------------

    @property
    def label_count(self) -> int:
        return len(self.label_names)

    @property
    def edge_count(self) -> int:
        """Number of distinct directed edges (multiplicities not counted)."""
        return len(self.out_dst)

    def out_edges(self, v: int) -> tuple[np.ndarray, np.ndarray]:
        """Sorted (targets, multiplicities) of v's out-edges."""
        lo, hi = self.out_indptr[v], self.out_indptr[v + 1]
        return self.out_dst[lo:hi], self.out_mult[lo:hi]

    def in_edges(self, v: int) -> tuple[np.ndarray, np.ndarray]:
        """Sorted (sources, multiplicities) of v's in-edges."""
        lo, hi = self.in_indptr[v], self.in_indptr[v + 1]
        return self.in_src[lo:hi], self.in_mult[lo:hi]

    def out_neighbors(self, v: int) -> np.ndarray:
        return self.out_edges(v)[0]

    def in_neighbors(self, v: int) -> np.ndarray:
        return self.in_edges(v)[0]

    def degree(self, v: int) -> int:
        """Token degree: in-degree plus out-degree, self-loop counted twice."""
        return int(
            (self.out_indptr[v + 1] - self.out_indptr[v])
            + (self.in_indptr[v + 1] - self.in_indptr[v])
        )

    def multiplicity(self, u: int, w: int) -> int:
        """Multiplicity of edge (u, w), 0 if absent."""
        targets, mults = self.out_edges(u)
        i = np.searchsorted(targets, w)
        if i < len(targets) and targets[i] == w:
            return int(mults[i])
        return 0

    def has_edge(self, u: int, w: int) -> bool:
        return self.multiplicity(u, w) > 0

    def self_loop_mult(self, v: int) -> int:
        return self.multiplicity(v, v)

    def edges(self) -> Iterator[tuple[int, int, int]]:
        for u, w, m in zip(self.out_src, self.out_dst, self.out_mult):
            yield int(u), int(w), int(m)

    # -- similarity support ------------------------------------------------

    def concat_adjacency(self, v: int) -> list[tuple[str, int]]:
        """Direction-tagged neighbor tokens: in-neighbors then out-neighbors.

        An in-neighbor and an out-neighbor with the same id are distinct
        tokens; a self-loop contributes one "in" and one "out" token.
        """
        return [("in", int(u)) for u in self.in_neighbors(v)] + [
            ("out", int(w)) for w in self.out_neighbors(v)
        ]

    def token_array(self) -> tuple[np.ndarray, np.ndarray]:
        """All nodes' direction-tagged tokens as one flat uint64 array.

        Returns (tokens, indptr): node v's tokens are
        ``tokens[indptr[v]:indptr[v+1]]``, encoded as ``neighbor * 2 + dir``
        with dir 0 for in and 1 for out.  Cached after the first call.
        """
        if self._token_cache is None:
            deg_in = np.diff(self.in_indptr)
            deg_out = np.diff(self.out_indptr)
            indptr = np.zeros(self.n + 1, dtype=np.int64)
            np.cumsum(deg_in + deg_out, out=indptr[1:])
            tokens = np.empty(indptr[-1], dtype=np.uint64)
            pos = indptr[:-1]
            for v in range(self.n):
                a = self.in_src[self.in_indptr[v] : self.in_indptr[v + 1]]
                b = self.out_dst[self.out_indptr[v] : self.out_indptr[v + 1]]
                p = pos[v]
                tokens[p : p + len(a)] = a.astype(np.uint64) * 2
                tokens[p + len(a) : p + len(a) + len(b)] = b.astype(np.uint64) * 2 + 1
            self._token_cache = (tokens, indptr)
        return self._token_cache

    # -- comparison and export ----------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, LabeledMultiGraph):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.labels, other.labels)
            and np.array_equal(self.out_src, other.out_src)
            and np.array_equal(self.out_dst, other.out_dst)
            and np.array_equal(self.out_mult, other.out_mult)
        )

    def __hash__(self):
        return hash((self.n, self.edge_count))

    def canonical_dump(self) -> str:
        """Deterministic text form: sorted edge lines then label lines."""
        lines = [
            f"{self.node_names[u]}\t{self.node_names[w]}\t{m}"
            for u, w, m in self.edges()
        ]
        lines.sort()
        label_lines = sorted(
            f"{self.node_names[v]}\t{self.label_names[self.labels[v]]}"
            for v in range(self.n)
        )
        return "\n".join(lines + label_lines) + "\n"


@dataclass(frozen=True)
class InducedStats:
    """Edge statistics of the subgraph induced by a node set.

    ``edge_count`` counts distinct directed non-self-loop edges inside the
    set; the degree maxima also exclude self-loops; ``self_loop_count`` is
    the number of members carrying a self-loop.
    """

    edge_count: int
    max_in_degree: int
    max_in_node: int
    max_out_degree: int
    max_out_node: int
    self_loop_count: int


def induced_edge_stats(g: LabeledMultiGraph, nodes: Iterable[int]) -> InducedStats:
    members = sorted(set(int(v) for v in nodes))
    if not members:
        raise ValueError("induced_edge_stats needs a non-empty node set")
    member_set = set(members)
    in_deg = {v: 0 for v in members}
    out_deg = {v: 0 for v in members}
    edge_count = 0
    self_loops = 0
    for u in members:
        targets, _ = g.out_edges(u)
        for w in targets:
            w = int(w)
            if w == u:
                self_loops += 1
            elif w in member_set:
                edge_count += 1
                out_deg[u] += 1
                in_deg[w] += 1
    # argmax with ties resolved toward the smallest node id
    max_in_node = min(members, key=lambda v: (-in_deg[v], v))
    max_out_node = min(members, key=lambda v: (-out_deg[v], v))
    return InducedStats(
        edge_count=edge_count,
        max_in_degree=in_deg[max_in_node],
        max_in_node=max_in_node,
        max_out_degree=out_deg[max_out_node],
        max_out_node=max_out_node,
        self_loop_count=self_loops,
    )


# -- file loading -----------------------------------------------------------


def _parse_edge_file(path: str) -> Iterator[tuple[int, str, str, int]]:
    with open(path, encoding="utf-8") as fh:
        for line_num, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = [p.strip() for p in line.split("\t")]
            if len(parts) == 2:
                src, dst, mult_s = parts[0], parts[1], "1"
            elif len(parts) == 3:
                src, dst, mult_s = parts
            else:
                raise GraphFormatError(
                    f"{path}:{line_num}: expected 'src<TAB>dst[<TAB>mult]', "
                    f"got {len(parts)} fields"
                )
            if not src or not dst:
                raise GraphFormatError(f"{path}:{line_num}: empty node id")
            try:
                mult = int(mult_s)
            except ValueError:
                raise GraphFormatError(
                    f"{path}:{line_num}: multiplicity {mult_s!r} is not an integer"
                ) from None
            if mult < 1:
                raise GraphFormatError(
                    f"{path}:{line_num}: multiplicity must be >= 1, got {mult}"
                )
            yield line_num, src, dst, mult


def load_graph(
    path: str,
    labels_path: str | None = None,
    undirected: bool = False,
) -> LabeledMultiGraph:
    """Load a graph from a TSV edge list, optionally with a node-label file.

    Edge lines are ``src<TAB>dst[<TAB>mult]`` (mult defaults to 1); duplicate
    lines sum their multiplicities; ``#`` starts a comment line.  With
    ``undirected`` every line materializes both directions (a self-loop line
    stays a single loop).  Label lines are ``node<TAB>label`` and must cover
    exactly the nodes of the edge file; without a label file all nodes share
    one default label.  Node ids are arbitrary strings, remapped to dense
    integers in order of first appearance and kept in ``node_names``.
    """
    name_to_id: dict[str, int] = {}
    edges: dict[tuple[int, int], int] = {}

    def node_id(name: str) -> int:
        i = name_to_id.get(name)
        if i is None:
            i = len(name_to_id)
            name_to_id[name] = i
        return i

    for _line_num, src, dst, mult in _parse_edge_file(path):
        u, w = node_id(src), node_id(dst)
        edges[(u, w)] = edges.get((u, w), 0) + mult
        if undirected and u != w:
            edges[(w, u)] = edges.get((w, u), 0) + mult

    if not name_to_id:
        raise GraphFormatError(f"{path}: no edges found")
    n = len(name_to_id)
    node_names = [""] * n
    for name, i in name_to_id.items():
        node_names[i] = name

    labels = [0] * n
    label_names = [DEFAULT_LABEL]
    if labels_path is not None:
        label_to_id: dict[str, int] = {}
        seen: dict[int, str] = {}
        with open(labels_path, encoding="utf-8") as fh:
            for line_num, raw in enumerate(fh, start=1):
                line = raw.rstrip("\n")
                if not line.strip() or line.lstrip().startswith("#"):
                    continue
                parts = [p.strip() for p in line.split("\t")]
                if len(parts) != 2 or not parts[0] or not parts[1]:
                    raise GraphFormatError(
                        f"{labels_path}:{line_num}: expected 'node<TAB>label'"
                    )
                name, label = parts
                if name not in name_to_id:
                    raise GraphFormatError(
                        f"{labels_path}:{line_num}: unknown node {name!r}"
                    )
                v = name_to_id[name]
                if v in seen and seen[v] != label:
                    raise GraphFormatError(
                        f"{labels_path}:{line_num}: conflicting label for {name!r}"
                    )
                seen[v] = label
                if label not in label_to_id:
                    label_to_id[label] = len(label_to_id)
                labels[v] = label_to_id[label]
        if len(seen) < n:
            missing = next(
                node_names[v] for v in range(n) if v not in seen
            )
            raise GraphFormatError(
                f"{labels_path}: {n - len(seen)} nodes without a label "
                f"(first: {missing!r})"
            )
        label_names = [""] * len(label_to_id)
        for label, i in label_to_id.items():
            label_names[i] = label

    return LabeledMultiGraph(
        n, edges, labels=labels, label_names=label_names, node_names=node_names
    )
