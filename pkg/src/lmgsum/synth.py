"""Seeded synthetic graph generators used by benchmarks and tests.

Three families:

* random labeled multi-graphs with controllable size, density, multiplicity
  range, label count, and optional symmetric (undirected-style) edges;
* planted-structure benchmarks: disjoint perfect cliques and stars plus a
  percentage of uniform noise edges, with ground truth returned alongside;
* k-out growth graphs: each new node attaches k out-edges to uniformly
  chosen existing nodes, duplicate draws accumulating as multiplicity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import DEFAULT_LABEL, LabeledMultiGraph
from .summary import Glyph


def _dedup_sum(
    n: int, src: np.ndarray, dst: np.ndarray, mult: np.ndarray
) -> dict[tuple[int, int], int]:
    key = src.astype(np.int64) * n + dst.astype(np.int64)
    order = np.argsort(key, kind="stable")
    key, mult = key[order], mult[order]
    uniq, start = np.unique(key, return_index=True)
    sums = np.add.reduceat(mult.astype(np.int64), start)
    return {
        (int(k // n), int(k % n)): int(m) for k, m in zip(uniq, sums)
    }


def random_graph(
    seed: int,
    n: int | None = None,
    avg_degree: float | None = None,
    max_mult: int = 50,
    max_labels: int = 8,
    symmetric: bool = False,
) -> LabeledMultiGraph:
    """A random labeled multi-graph; every unset knob is drawn from the seed.

    Node count falls in [10, 500], average total degree in [0.5, 10],
    multiplicities in [1, max_mult], labels in [1, max_labels].  Self-loops
    occur naturally.  With ``symmetric`` the edge set is mirrored with equal
    multiplicities (loops kept single).
    """
    rng = np.random.default_rng(seed)
    if n is None:
        n = int(rng.integers(10, 501))
    if avg_degree is None:
        avg_degree = float(rng.uniform(0.5, 10.0))
    label_count = int(rng.integers(1, max_labels + 1))
    labels = rng.integers(0, label_count, n).astype(np.int64)
    m = max(1, int(round(n * avg_degree / 2)))
    src = rng.integers(0, n, m)
    dst = rng.integers(0, n, m)
    mult = rng.integers(1, max_mult + 1, m)
    edges = _dedup_sum(n, src, dst, mult)
    if symmetric:
        sym: dict[tuple[int, int], int] = {}
        for (u, w), mm in edges.items():
            if u == w:
                sym[(u, w)] = sym.get((u, w), 0) + mm
            else:
                a, b = (u, w) if u < w else (w, u)
                sym[(a, b)] = sym.get((a, b), 0) + mm
        edges = {}
        for (a, b), mm in sym.items():
            edges[(a, b)] = mm
            if a != b:
                edges[(b, a)] = mm
    label_names = [f"label{i}" for i in range(label_count)]
    return LabeledMultiGraph(n, edges, labels.tolist(), label_names=label_names)


def perfect_edges(
    glyph: Glyph, members, hub: int | None = None, mult: int = 1
) -> dict[tuple[int, int], int]:
    """Edge dict of a structure that a glyph reproduces without corrections."""
    members = sorted(members)
    edges: dict[tuple[int, int], int] = {}
    if glyph is Glyph.CLIQUE:
        for u in members:
            for w in members:
                if u != w:
                    edges[(u, w)] = mult
    elif glyph is Glyph.IN_STAR:
        for u in members:
            if u != hub:
                edges[(u, hub)] = mult
    elif glyph is Glyph.OUT_STAR:
        for u in members:
            if u != hub:
                edges[(hub, u)] = mult
    elif glyph is Glyph.DISCONNECTED:
        pass
    else:
        raise ValueError(f"no planted template for {glyph}")
    return edges


@dataclass(frozen=True)
class PlantedGroup:
    members: tuple[int, ...]
    glyph: Glyph
    hub: int | None


def planted_graph(
    seed: int,
    cliques: int = 5,
    in_stars: int = 5,
    out_stars: int = 5,
    size_range: tuple[int, int] = (10, 20),
    noise: float = 0.05,
) -> tuple[LabeledMultiGraph, list[PlantedGroup]]:
    """Disjoint perfect structures plus uniform noise edges, single label.

    Noise volume is ``noise`` times the clean edge count; endpoints are
    uniform ordered non-loop pairs over all nodes, duplicates accumulating
    into multiplicity.  Ground truth is returned for recovery scoring.
    """
    rng = np.random.default_rng(seed)
    kinds = (
        [Glyph.CLIQUE] * cliques
        + [Glyph.IN_STAR] * in_stars
        + [Glyph.OUT_STAR] * out_stars
    )
    groups: list[PlantedGroup] = []
    edges: dict[tuple[int, int], int] = {}
    next_node = 0
    for glyph in kinds:
        size = int(rng.integers(size_range[0], size_range[1] + 1))
        members = tuple(range(next_node, next_node + size))
        next_node += size
        hub = None
        if glyph in (Glyph.IN_STAR, Glyph.OUT_STAR):
            hub = int(members[int(rng.integers(0, size))])
        edges.update(perfect_edges(glyph, members, hub))
        groups.append(PlantedGroup(members, glyph, hub))
    n = next_node
    n_noise = int(round(noise * len(edges)))
    added = 0
    while added < n_noise:
        u = int(rng.integers(0, n))
        w = int(rng.integers(0, n))
        if u == w:
            continue
        edges[(u, w)] = edges.get((u, w), 0) + 1
        added += 1
    g = LabeledMultiGraph(n, edges, [0] * n, label_names=[DEFAULT_LABEL])
    return g, groups


def kout_graph(seed: int, n: int, k: int = 10) -> LabeledMultiGraph:
    """Growth graph: node i >= 1 draws k uniform targets among nodes < i.

    Repeated draws of the same target sum into the edge multiplicity, so
    the distinct-edge count is at most (n - 1) * k.
    """
    if n < 2:
        raise ValueError("kout_graph needs n >= 2")
    rng = np.random.default_rng(seed)
    src = np.repeat(np.arange(1, n, dtype=np.int64), k)
    bound = np.repeat(np.arange(1, n, dtype=np.int64), k)
    dst = np.floor(rng.random(len(src)) * bound).astype(np.int64)
    mult = np.ones(len(src), dtype=np.int64)
    edges = _dedup_sum(n, src, dst, mult)
    return LabeledMultiGraph(n, edges, [0] * n, label_names=[DEFAULT_LABEL])
