"""Candidate node sets via minhash LSH over direction-tagged adjacency.

Two nodes are similar when their combined in/out neighbor sets overlap: the
directed Jaccard similarity counts intersections of in-neighbors and of
out-neighbors separately (an in- and an out-neighbor with the same id never
match).  Minhash signatures over the tagged tokens collide row-wise with
probability equal to that similarity, so a full r-row band collision happens
with probability J^r.  Bands are added one at a time; the b-th band admits
pairs down to the threshold t(b) = (1/b)^(1/r), so candidate discovery is a
sweep from high to low similarity.

Nodes sharing a band signature fall into one bucket; buckets are coalesced
into clusters with union-find.  Newly coalesced pairs within a degree window
are verified exactly: pairs at or above the current threshold become edges
of the similarity graph, pairs between the final threshold and the current
one wait in a max-heap cache and are promoted when the threshold drops to
them.  Candidates are the maximal cliques of the similarity graph that
contain at least one new edge; their quality is the minimum pairwise
similarity inside the clique.
"""

from __future__ import annotations

import heapq
from bisect import bisect_left, insort
from dataclasses import dataclass, field

import numpy as np

from .graph import LabeledMultiGraph

SENTINEL = np.uint64(0xFFFFFFFFFFFFFFFF)
_C1 = 0xBF58476D1CE4E5B9
_C2 = 0x94D049BB133111EB
_MASK = (1 << 64) - 1


def _mix64_scalar(x: int) -> int:
    x &= _MASK
    x ^= x >> 30
    x = (x * _C1) & _MASK
    x ^= x >> 27
    x = (x * _C2) & _MASK
    x ^= x >> 31
    return x


def _mix64(x: np.ndarray) -> np.ndarray:
    x = x.copy()
    x ^= x >> np.uint64(30)
    x *= np.uint64(_C1)
    x ^= x >> np.uint64(27)
    x *= np.uint64(_C2)
    x ^= x >> np.uint64(31)
    return x


def _row_key(seed: int, band: int, row: int) -> int:
    return _mix64_scalar(
        _mix64_scalar(seed ^ 0x9E3779B97F4A7C15) ^ (band * 0xD1B54A32D192ED03) ^ row
    )


def threshold(band_count: int, r: int) -> float:
    """Similarity admitted after band_count bands: (1/b)^(1/r)."""
    if band_count < 1 or r < 1:
        raise ValueError("band_count and r must be >= 1")
    return (1.0 / band_count) ** (1.0 / r)


def directed_jaccard(g: LabeledMultiGraph, v: int, w: int) -> float:
    """Directionality-preserving Jaccard similarity of two nodes.

    Intersections and unions of the in-neighbor sets and of the out-neighbor
    sets are summed separately; two nodes without any neighbors score 0.
    """
    iv, iw = g.in_neighbors(v), g.in_neighbors(w)
    ov, ow = g.out_neighbors(v), g.out_neighbors(w)
    ii = np.intersect1d(iv, iw, assume_unique=True).size
    oo = np.intersect1d(ov, ow, assume_unique=True).size
    union = (len(iv) + len(iw) - ii) + (len(ov) + len(ow) - oo)
    if union == 0:
        return 0.0
    return (ii + oo) / union


def minhash_band(
    g: LabeledMultiGraph, band_index: int, seed: int, r: int
) -> np.ndarray:
    """(n, r) matrix of row-minimum hashes for one band.

    Row j of node v is the minimum keyed hash over v's direction-tagged
    neighbor tokens.  Nodes without any token get the sentinel value in
    every row; the sentinel never collides because such nodes are excluded
    from bucketing altogether.
    """
    tokens, indptr = g.token_array()
    sig = np.full((g.n, r), SENTINEL, dtype=np.uint64)
    lengths = np.diff(indptr)
    nonempty = np.nonzero(lengths > 0)[0]
    if len(nonempty) == 0:
        return sig
    starts = indptr[:-1][nonempty]
    for j in range(r):
        key = np.uint64(_row_key(seed, band_index, j))
        hashed = _mix64(tokens ^ key)
        sig[nonempty, j] = np.minimum.reduceat(hashed, starts)
    return sig


def _band_keys(sig: np.ndarray) -> np.ndarray:
    """Collapse the r row-minima of each node into one bucket key."""
    key = sig[:, 0].copy()
    for j in range(1, sig.shape[1]):
        key = _mix64(key ^ (sig[:, j] + np.uint64(0x9E3779B97F4A7C15)))
    return key


@dataclass(frozen=True)
class Candidate:
    """A similar node group: maximal clique in the similarity graph."""

    nodes: tuple[int, ...]
    quality: float
    band: int

    @property
    def size(self) -> int:
        return len(self.nodes)


def candidate_sort_key(c: Candidate):
    """Descending size*quality, then larger size, then smallest members."""
    return (-c.size * c.quality, -c.size, c.nodes)


class SimilarityGraph:
    """Exact-similarity graph over verified node pairs.

    An edge is present iff the pair's directed Jaccard similarity reached
    the admission threshold in force when the pair was verified or promoted.
    """

    def __init__(self):
        self.adj: dict[int, set[int]] = {}
        self.jaccard: dict[tuple[int, int], float] = {}
        self.new_edges: list[tuple[int, int]] = []

    def add_edge(self, u: int, v: int, j: float) -> None:
        u, v = (u, v) if u < v else (v, u)
        if (u, v) in self.jaccard:
            return
        self.jaccard[(u, v)] = j
        self.adj.setdefault(u, set()).add(v)
        self.adj.setdefault(v, set()).add(u)
        self.new_edges.append((u, v))

    def neighbors(self, u: int) -> set[int]:
        return self.adj.get(u, set())

    def similarity(self, u: int, v: int) -> float:
        u, v = (u, v) if u < v else (v, u)
        return self.jaccard[(u, v)]

    def quality(self, nodes) -> float:
        nodes = sorted(nodes)
        return min(
            self.jaccard[(u, v)]
            for i, u in enumerate(nodes)
            for v in nodes[i + 1 :]
        )

    @property
    def edge_count(self) -> int:
        return len(self.jaccard)


class PairCache:
    """Max-heap of verified pairs still below the admission threshold."""

    def __init__(self):
        self._heap: list[tuple[float, int, int]] = []

    def push(self, j: float, u: int, v: int) -> None:
        heapq.heappush(self._heap, (-j, u, v))

    def pop_at_least(self, t: float) -> list[tuple[float, int, int]]:
        """Remove and return every cached pair with similarity >= t."""
        out = []
        while self._heap and -self._heap[0][0] >= t:
            negj, u, v = heapq.heappop(self._heap)
            out.append((-negj, u, v))
        return out

    def __len__(self):
        return len(self._heap)


class LshState:
    """Incremental LSH: clusters, verified pairs, similarity graph, cliques."""

    def __init__(
        self,
        g: LabeledMultiGraph,
        r: int = 8,
        b_max: int = 10,
        seed: int = 0,
        cluster_cap: int = 5000,
    ):
        self.g = g
        self.r = r
        self.b_max = b_max
        self.seed = seed
        self.cluster_cap = cluster_cap
        self.t_min = threshold(b_max, r)
        self.bands_added = 0
        self.parent = list(range(g.n))
        # degree-sorted member lists, keyed by cluster root
        self.members: dict[int, list[tuple[int, int]]] = {
            v: [(g.degree(v), v)] for v in range(g.n)
        }
        self.verified: set[tuple[int, int]] = set()
        self.gsim = SimilarityGraph()
        self.cache = PairCache()
        self.max_clique_size: dict[int, int] = {}
        self.emitted: set[frozenset] = set()
        # pair-verification budget per cluster merge, to bound worst cases
        self.merge_budget = cluster_cap * 8

    # -- union-find with windowed pair verification -------------------------

    def _find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def _window(self, arr: list[tuple[int, int]], deg: int):
        lo = int(np.floor(deg * self.t_min))
        hi = int(np.ceil(deg / self.t_min))
        i = bisect_left(arr, (lo,))
        j = bisect_left(arr, (hi + 1,))
        return arr[i:j]

    def _verify(self, u: int, v: int, t: float) -> None:
        key = (u, v) if u < v else (v, u)
        if key in self.verified:
            return
        self.verified.add(key)
        j = directed_jaccard(self.g, u, v)
        if j >= t:
            self.gsim.add_edge(u, v, j)
        elif j >= self.t_min:
            self.cache.push(j, u, v)

    def _union(self, a: int, b: int, t: float) -> None:
        ra, rb = self._find(a), self._find(b)
        if ra == rb:
            return
        small, large = self.members[ra], self.members[rb]
        if len(small) > len(large):
            ra, rb = rb, ra
            small, large = large, small
        checks = 0
        for deg, u in small:
            if checks >= self.merge_budget:
                break
            for _dw, w in self._window(large, deg):
                checks += 1
                self._verify(u, w, t)
                if checks >= self.merge_budget:
                    break
        self.parent[ra] = rb
        del self.members[ra]
        if len(small) < 16:
            for item in small:
                insort(large, item)
        else:
            large.extend(small)
            large.sort()

    # -- band pipeline -------------------------------------------------------

    def add_band(self) -> None:
        """Hash the next band, bucket nodes, coalesce clusters, verify pairs."""
        self.bands_added += 1
        t = threshold(self.bands_added, self.r)
        sig = minhash_band(self.g, self.bands_added, self.seed, self.r)
        lengths = np.diff(self.g.token_array()[1])
        active = np.nonzero(lengths > 0)[0]
        if len(active) == 0:
            return
        keys = _band_keys(sig[active])
        order = np.argsort(keys, kind="stable")
        sorted_keys = keys[order]
        sorted_nodes = active[order]
        start = 0
        for end in range(1, len(sorted_keys) + 1):
            if end == len(sorted_keys) or sorted_keys[end] != sorted_keys[start]:
                if end - start >= 2:
                    group = sorted_nodes[start:end]
                    first = int(group[0])
                    for other in group[1:]:
                        self._union(first, int(other), t)
                start = end
        for j, u, v in self.cache.pop_at_least(t):
            self.gsim.add_edge(u, v, j)

    def harvest_cliques(self) -> list[Candidate]:
        """Maximal cliques containing at least one edge added since the last

        harvest.  A new edge whose potential clique cannot beat the recorded
        maximum of either endpoint is skipped; emitted node sets are never
        repeated.
        """
        new_edges = self.gsim.new_edges
        self.gsim.new_edges = []
        found: list[Candidate] = []
        sizes_seen: list[tuple[frozenset, int]] = []
        for u, v in new_edges:
            common = self.gsim.neighbors(u) & self.gsim.neighbors(v)
            bound = 2 + len(common)
            known_u = self.max_clique_size.get(u, 0)
            known_v = self.max_clique_size.get(v, 0)
            if bound <= known_u and bound <= known_v:
                continue
            if common:
                cliques = [c | {u, v} for c in self._max_cliques(common)]
            else:
                cliques = [{u, v}]
            for c in cliques:
                fs = frozenset(c)
                if fs in self.emitted:
                    continue
                self.emitted.add(fs)
                nodes = tuple(sorted(fs))
                found.append(
                    Candidate(nodes, self.gsim.quality(nodes), self.bands_added)
                )
                sizes_seen.append((fs, len(fs)))
        for fs, size in sizes_seen:
            for x in fs:
                if self.max_clique_size.get(x, 0) < size:
                    self.max_clique_size[x] = size
        return found

    def _max_cliques(self, subset: set[int]):
        """Maximal cliques of the similarity graph induced on ``subset``."""
        result: list[set[int]] = []

        def expand(r: set[int], p: set[int], x: set[int]):
            if not p and not x:
                result.append(set(r))
                return
            pivot_pool = p | x
            pivot = max(
                pivot_pool, key=lambda n: len(self.gsim.neighbors(n) & p)
            )
            for n in sorted(p - self.gsim.neighbors(pivot)):
                nb = self.gsim.neighbors(n) & subset
                expand(r | {n}, p & nb, x & nb)
                p = p - {n}
                x = x | {n}

        expand(set(), set(subset), set())
        return result


def lsh_add_band(state: LshState) -> None:
    state.add_band()


def filter_and_grow(state: LshState) -> int:
    """Promote cached pairs that clear the current threshold; returns the

    number of similarity-graph edges (promotion happens inside add_band as
    bands arrive; this drains anything left at the current threshold)."""
    t = threshold(max(state.bands_added, 1), state.r)
    for j, u, v in state.cache.pop_at_least(t):
        state.gsim.add_edge(u, v, j)
    return state.gsim.edge_count


def prune_redundant(cands: list[Candidate]) -> list[Candidate]:
    """Drop candidates that are strict subsets of an equal-or-better one."""
    by_node: dict[int, list[int]] = {}
    for i, c in enumerate(cands):
        for v in c.nodes:
            by_node.setdefault(v, []).append(i)
    keep = [True] * len(cands)
    for i, c in enumerate(cands):
        probe = min(c.nodes, key=lambda v: len(by_node[v]))
        cset = set(c.nodes)
        for j in by_node[probe]:
            other = cands[j]
            if (
                other.size > c.size
                and other.quality >= c.quality
                and cset.issubset(other.nodes)
            ):
                keep[i] = False
                break
    return [c for i, c in enumerate(cands) if keep[i]]


def generate_candidates(
    g: LabeledMultiGraph,
    r: int = 8,
    b_max: int = 10,
    seed: int = 0,
    cluster_cap: int = 5000,
) -> list[Candidate]:
    """Run all bands and return the merged candidate list, best first."""
    state = LshState(g, r=r, b_max=b_max, seed=seed, cluster_cap=cluster_cap)
    cands: list[Candidate] = []
    for _ in range(b_max):
        state.add_band()
        cands.extend(state.harvest_cliques())
    cands = prune_redundant(cands)
    cands.sort(key=candidate_sort_key)
    return cands
