"""Greedy merge engine: score and commit candidate node sets.

The engine owns a :class:`SummaryState` — a summary graph plus incremental
bookkeeping of its two-part description length.  Candidate node sets are
split by label, scored as merge proposals (glyph choice, self-loop flag,
representative multiplicity, and a super-edge-or-corrections decision for
every bundle of crossing edges), and committed only when they strictly
reduce the total cost.  Scoring never mutates the state, so rejecting a
proposal is free, and committed deltas are exact: after every commit the
running total equals a from-scratch recomputation.

Only current singletons can be merged; once a node is absorbed into a
multi-member super-node it is marked and never regrouped.  Candidate sets
whose glyph comes out disconnected are additionally scored with one
candidate hub attached (the external singleton most members point to, or
are pointed to by) so that stars whose hub is dissimilar from its spokes —
which is the typical case — remain reachable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .encoding import (
    GLYPH_COUNT,
    cost_multiplicity_diff,
    cost_node_map,
    ell_diff,
    len_natural,
    log2_binomial,
)
from .graph import LabeledMultiGraph, induced_edge_stats
from .summary import (
    Glyph,
    STAR_GLYPHS,
    SummaryGraph,
    SuperNode,
    node_context_bits,
    pair_context_bits,
)

#: exhaustive-scan window for the representative-multiplicity search
SCAN_LIMIT = 1024
PROBE_LIMIT = 256


class MergeError(RuntimeError):
    pass


def split_by_label(g: LabeledMultiGraph, nodes) -> list[list[int]]:
    """Partition a candidate set into label-homogeneous subsets of size >= 2.

    Size-1 subsets are dropped: a lone node cannot form a new super-node.
    """
    by_label: dict[int, list[int]] = {}
    for v in sorted(set(int(u) for u in nodes)):
        by_label.setdefault(int(g.labels[v]), []).append(v)
    return [group for _, group in sorted(by_label.items()) if len(group) >= 2]


def decide_glyph(g: LabeledMultiGraph, nodes) -> tuple[Glyph, int | None]:
    """Choose the cheapest structural glyph for a node set.

    A set with at least half of all possible directed edges is a clique.
    Otherwise the star costs count the corrections a star explanation needs
    (missing spokes plus unexplained edges); a star wins only when strictly
    cheaper than leaving all edges as corrections, ties between the two star
    orientations go to the in-star, and the hub is the member with maximum
    in- (or out-) degree, smallest id on ties.  Two-node sets need both
    directed edges to count as a clique — a single edge is the degenerate
    star, whose expansion matches either orientation exactly.
    """
    members = sorted(set(int(u) for u in nodes))
    k = len(members)
    if k < 2:
        raise ValueError("glyph decision needs at least two nodes")
    stats = induced_edge_stats(g, members)
    e_c = stats.edge_count
    clique_threshold = k * (k - 1) / 2 if k > 2 else 2
    if e_c >= clique_threshold:
        return Glyph.CLIQUE, None
    cost_in = (k - 1 - stats.max_in_degree) + (e_c - stats.max_in_degree)
    cost_out = (k - 1 - stats.max_out_degree) + (e_c - stats.max_out_degree)
    in_wins = cost_in < e_c
    out_wins = cost_out < e_c
    if in_wins and (not out_wins or cost_in <= cost_out):
        return Glyph.IN_STAR, stats.max_in_node
    if out_wins:
        return Glyph.OUT_STAR, stats.max_out_node
    return Glyph.DISCONNECTED, None


def representative_multiplicity(mults) -> tuple[int, float]:
    """Multiplicity minimizing the total multiplicity-correction bits.

    Scans the [min, max] range exhaustively when it spans at most
    SCAN_LIMIT values.  Wider ranges are narrowed by bisecting on the local
    slope, then the surviving window is scanned together with probes at and
    next to each distinct multiplicity: between consecutive data values the
    cost is a sum of concave terms, so its minimum sits at or adjacent to a
    data value and the probes bound the search exactly whenever there are
    at most PROBE_LIMIT distinct values.  Ties go to the smallest
    multiplicity.
    """
    mults = list(mults)
    if not mults:
        raise ValueError("empty multiplicity list has no representative")
    lo, hi = min(mults), max(mults)
    if lo == hi:
        return lo, float(len(mults))
    arr = np.asarray(mults, dtype=np.float64)

    def batch_cost(candidates: np.ndarray) -> np.ndarray:
        diffs = np.abs(arr[None, :] - candidates[:, None])
        return np.where(
            diffs == 0, 1.0, 2.0 * np.log2(np.maximum(diffs, 1.0)) + 3.0
        ).sum(axis=1)

    if hi - lo <= SCAN_LIMIT:
        candidates = np.arange(lo, hi + 1, dtype=np.float64)
    else:

        def cost(m: int) -> float:
            return float(batch_cost(np.asarray([m], dtype=np.float64))[0])

        blo, bhi = lo, hi
        while bhi - blo > SCAN_LIMIT:
            mid = (blo + bhi) // 2
            if cost(mid) <= cost(mid + 1):
                bhi = mid
            else:
                blo = mid + 1
        values = np.unique(np.asarray(mults, dtype=np.int64))
        if len(values) > PROBE_LIMIT:
            keep = np.linspace(0, len(values) - 1, PROBE_LIMIT).round().astype(int)
            values = values[np.unique(keep)]
        probes = np.clip(np.concatenate([values - 1, values, values + 1]), lo, hi)
        candidates = np.unique(
            np.concatenate([np.arange(blo, bhi + 1, dtype=np.int64), probes])
        ).astype(np.float64)
    costs = batch_cost(candidates)
    best = int(np.argmin(costs))
    return int(candidates[best]), float(costs[best])


@dataclass
class EdgeBundle:
    """All original edges crossing one ordered super-node pair."""

    src: SuperNode
    dst: SuperNode
    edges: list[tuple[int, int, int]]


def decide_super_edge(bundle: EdgeBundle) -> tuple[int | None, float]:
    """Super-edge or plain corrections for one bundle, whichever is cheaper.

    Returns (rep_mult, context_bits): rep_mult is None when the bundle stays
    as positive corrections.  context_bits is the correction cost of the
    chosen option; the super-edge option additionally pays len_natural(rep)
    on the summary side, which is included in the comparison here but
    charged to the source super-node by the caller.
    """
    without_bits = pair_context_bits(bundle.src, bundle.dst, None, bundle.edges)
    if not bundle.edges:
        return None, without_bits
    port_src = set(bundle.src.ports())
    port_dst = set(bundle.dst.ports())
    covered = [m for u, w, m in bundle.edges if u in port_src and w in port_dst]
    if not covered:
        return None, without_bits
    rep, _ = representative_multiplicity(covered)
    with_bits = pair_context_bits(bundle.src, bundle.dst, rep, bundle.edges)
    if with_bits + len_natural(rep) < without_bits:
        return rep, with_bits
    return None, without_bits


@dataclass
class MergeProposal:
    """A scored merge of singleton nodes into one new super-node."""

    node: SuperNode
    out_edges: dict[int, int]  # target super-node id -> rep mult
    in_edges: dict[int, int]  # source super-node id -> rep mult
    absorbed: tuple[int, ...]  # singleton super-node ids that disappear
    dissolved: list[tuple[int, int]]  # super-edge keys removed by absorption
    dcost: float
    d_summary: float
    d_correction: float
    odeg_delta: dict[int, int] = field(default_factory=dict)
    per_node_delta: float = 0.0


class SummaryState:
    """A summary under construction, with exact incremental cost tracking.

    ``summary_bits`` and ``correction_bits`` always equal the from-scratch
    costs of the current summary; commits adjust them by the proposal's
    deltas, including the global terms that depend on the number of
    super-nodes (those are recomputed exactly through a histogram of
    out-super-edge counts, so no approximation is involved).
    """

    def __init__(self, g: LabeledMultiGraph):
        self.g = g
        self.n_s = g.n
        self.next_id = g.n
        self.assign = list(range(g.n))
        self.snodes: dict[int, SuperNode] = {}
        self.sedges: dict[tuple[int, int], int] = {}
        self.out_se: dict[int, dict[int, int]] = {}
        self.in_se: dict[int, dict[int, int]] = {}
        self.odeg_hist: dict[int, int] = {0: g.n}

        loops = {}
        for v, w, m in zip(g.out_src, g.out_dst, g.out_mult):
            if v == w:
                loops[int(v)] = int(m)
        per_node = 0.0
        for v in range(g.n):
            rep = loops.get(v, 1)
            self.snodes[v] = SuperNode(
                id=v,
                label=int(g.labels[v]),
                glyph=Glyph.SINGLETON,
                members=(v,),
                rep_mult=rep,
                self_loop=v in loops,
            )
            per_node += 1.0 + len_natural(rep)  # member count + rep mult
        self.per_node_sum = per_node

        # baseline corrections: every edge is a positive correction in its
        # own 1x1 pair context; each node pays its map term and one
        # self-loop bundle flag (plus a 1-bit multiplicity flag for a
        # covered loop).
        loop_mask = g.out_src == g.out_dst
        n_loops = int(loop_mask.sum())
        plain_mults = g.out_mult[~loop_mask].astype(np.float64)
        corr = g.n * math.log2(g.n) if g.n > 1 else 0.0  # map terms
        corr += g.n  # one bundle flag per node context
        corr += n_loops  # covered loops: equal-multiplicity flags
        corr += len(plain_mults)  # one bundle flag per edge-bearing pair
        if len(plain_mults):
            corr += float((2.0 * np.log2(plain_mults) + 1.0).sum())
        self.correction_bits = corr
        self.summary_bits = self._width_bits() + len_natural(g.label_count) + per_node

    # -- cost helpers ------------------------------------------------------

    def _width_bits(
        self, n_s: int | None = None, hist: dict[int, int] | None = None
    ) -> float:
        """Summary-cost terms that depend on the number of super-nodes."""
        n_s = self.n_s if n_s is None else n_s
        hist = self.odeg_hist if hist is None else hist
        bits = len_natural(n_s)
        bits += n_s * (
            math.log2(self.g.label_count) + math.log2(GLYPH_COUNT) + math.log2(n_s + 1)
        )
        for d, cnt in hist.items():
            if d:
                bits += cnt * log2_binomial(n_s, d)
        return bits

    @property
    def total_bits(self) -> float:
        return self.summary_bits + self.correction_bits

    def is_unmarked(self, v: int) -> bool:
        """A node is mergeable while it still sits in its own singleton."""
        return self.snodes[self.assign[v]].size == 1

    def to_summary_graph(self) -> SummaryGraph:
        s = SummaryGraph(
            graph_size=self.g.n,
            label_count=self.g.label_count,
            label_names=tuple(self.g.label_names),
            node_names=tuple(self.g.node_names),
        )
        s.super_nodes = dict(self.snodes)
        s.super_edges = dict(self.sedges)
        return s

    # -- proposal scoring ----------------------------------------------------

    def _singleton_ctx_bits(self, sid: int) -> float:
        """Node-context bits of an existing singleton super-node."""
        sn = self.snodes[sid]
        u = sn.members[0]
        loop_m = self.g.self_loop_mult(u)
        internal = [(u, u, loop_m)] if loop_m else []
        return node_context_bits(sn, internal)

    def _gather_cross(self, member_set: set[int]):
        """Internal edges and crossing bundles of a prospective member set.

        Returns (internal, out_bundles, in_bundles) where bundles group the
        crossing edges by the other endpoint's current super-node id.
        """
        internal: list[tuple[int, int, int]] = []
        out_b: dict[int, list[tuple[int, int, int]]] = {}
        in_b: dict[int, list[tuple[int, int, int]]] = {}
        for u in sorted(member_set):
            targets, mults = self.g.out_edges(u)
            for w, m in zip(targets, mults):
                w = int(w)
                if w in member_set:
                    internal.append((u, w, int(m)))
                else:
                    out_b.setdefault(self.assign[w], []).append((u, w, int(m)))
            sources, mults = self.g.in_edges(u)
            for w, m in zip(sources, mults):
                w = int(w)
                if w not in member_set:
                    in_b.setdefault(self.assign[w], []).append((w, u, int(m)))
        return internal, out_b, in_b

    def _score(self, members: list[int]) -> MergeProposal:
        """Score merging ``members`` (label-homogeneous, unmarked, >= 2)."""
        g = self.g
        member_set = set(members)
        k = len(members)
        glyph, hub = decide_glyph(g, members)
        stats = induced_edge_stats(g, members)
        self_loop = 2 * stats.self_loop_count >= k

        internal, out_b, in_b = self._gather_cross(member_set)
        new_node = SuperNode(
            id=self.next_id,
            label=int(g.labels[members[0]]),
            glyph=glyph,
            members=tuple(members),
            hub=hub,
            rep_mult=1,
            self_loop=self_loop,
        )
        covered = [m for u, w, m in internal if new_node.covers_pair(u, w)]
        rep = representative_multiplicity(covered)[0] if covered else 1
        new_node.rep_mult = rep

        absorbed = tuple(sorted(self.assign[u] for u in members))
        absorbed_set = set(absorbed)

        # ---- old terms being removed
        old_corr = 0.0
        old_per_node = 0.0
        odeg_delta: dict[int, int] = {}
        for sid in absorbed:
            sn = self.snodes[sid]
            old_corr += cost_node_map(1, g.n, False)
            old_corr += self._singleton_ctx_bits(sid)
            odeg = len(self.out_se.get(sid, {}))
            old_per_node += 1.0 + len_natural(sn.rep_mult)
            old_per_node += sum(len_natural(m) for m in self.out_se.get(sid, {}).values())
            odeg_delta[odeg] = odeg_delta.get(odeg, 0) - 1

        # old pair contexts touching any absorbed singleton
        old_keys: set[tuple[int, int]] = set()
        for sid in absorbed:
            for b in self.out_se.get(sid, {}):
                old_keys.add((sid, b))
            for a in self.in_se.get(sid, {}):
                old_keys.add((a, sid))
        for other, edges in out_b.items():
            for u, _w, _m in edges:
                old_keys.add((self.assign[u], other))
        for other, edges in in_b.items():
            for _w, u, _m in edges:
                old_keys.add((other, self.assign[u]))
        for u, w, _m in internal:
            a, b = self.assign[u], self.assign[w]
            if a != b:
                old_keys.add((a, b))

        # net out-super-edge count change of surviving super-nodes
        se_change: dict[int, int] = {}
        dissolved: list[tuple[int, int]] = []
        for a, b in sorted(old_keys):
            rep_ab = self.sedges.get((a, b))
            edges_ab = self._region_edges(a, b)
            old_corr += pair_context_bits(
                self.snodes[a], self.snodes[b], rep_ab, edges_ab
            )
            if rep_ab is not None:
                dissolved.append((a, b))
                # the source side loses this super-edge from its own cost
                if a not in absorbed_set:
                    old_per_node += len_natural(rep_ab)
                    se_change[a] = se_change.get(a, 0) - 1

        # ---- new terms
        new_corr = cost_node_map(k, g.n, glyph in STAR_GLYPHS)
        new_corr += node_context_bits(new_node, internal)
        new_per_node = len_natural(k) + len_natural(rep)
        out_edges: dict[int, int] = {}
        in_edges: dict[int, int] = {}
        for other in sorted(out_b):
            bundle = EdgeBundle(new_node, self.snodes[other], out_b[other])
            se_rep, ctx_bits = decide_super_edge(bundle)
            new_corr += ctx_bits
            if se_rep is not None:
                out_edges[other] = se_rep
                new_per_node += len_natural(se_rep)
        for other in sorted(in_b):
            bundle = EdgeBundle(self.snodes[other], new_node, in_b[other])
            se_rep, ctx_bits = decide_super_edge(bundle)
            new_corr += ctx_bits
            if se_rep is not None:
                in_edges[other] = se_rep
                se_change[other] = se_change.get(other, 0) + 1

        odeg_delta[len(out_edges)] = odeg_delta.get(len(out_edges), 0) + 1
        for other, change in sorted(se_change.items()):
            if change == 0:
                continue
            d_old = len(self.out_se.get(other, {}))
            odeg_delta[d_old] = odeg_delta.get(d_old, 0) - 1
            odeg_delta[d_old + change] = odeg_delta.get(d_old + change, 0) + 1
        per_node_delta = new_per_node - old_per_node
        for other, m in in_edges.items():
            per_node_delta += len_natural(m)

        # ---- assemble exact deltas, including the summary-size-wide terms
        old_width = self._width_bits()
        new_hist = dict(self.odeg_hist)
        for d, c in odeg_delta.items():
            new_hist[d] = new_hist.get(d, 0) + c
            if new_hist[d] == 0:
                del new_hist[d]
        new_width = self._width_bits(self.n_s - len(absorbed) + 1, new_hist)

        d_summary = (new_width - old_width) + per_node_delta
        d_correction = new_corr - old_corr
        return MergeProposal(
            node=new_node,
            out_edges=out_edges,
            in_edges=in_edges,
            absorbed=absorbed,
            dissolved=dissolved,
            dcost=d_summary + d_correction,
            d_summary=d_summary,
            d_correction=d_correction,
            odeg_delta=odeg_delta,
            per_node_delta=per_node_delta,
        )

    def _region_edges(self, a: int, b: int) -> list[tuple[int, int, int]]:
        """Original edges from super-node a's members to b's members."""
        sa, sb = self.snodes[a], self.snodes[b]
        if sa.size <= sb.size:
            targets = set(sb.members)
            out = []
            for u in sa.members:
                dsts, mults = self.g.out_edges(u)
                for w, m in zip(dsts, mults):
                    if int(w) in targets:
                        out.append((u, int(w), int(m)))
            return out
        sources = set(sa.members)
        out = []
        for w in sb.members:
            srcs, mults = self.g.in_edges(w)
            for u, m in zip(srcs, mults):
                if int(u) in sources:
                    out.append((int(u), w, int(m)))
        return out

    def _hub_variants(self, members: list[int]) -> list[list[int]]:
        """Candidate hub completions for a set whose glyph came out

        disconnected: when most members point to one same-label unmarked
        singleton (an in-star hub) or are pointed to by one (out-star hub),
        propose absorbing that hub — and, as a second variant, also the
        hub's remaining same-label unmarked singleton neighbors on the spoke
        side, since a star is only cheap when its spokes are inside.
        """
        g = self.g
        member_set = set(members)
        label = int(g.labels[members[0]])
        need = max(2, (len(members) + 1) // 2)

        def eligible(w: int) -> bool:
            return (
                w not in member_set
                and int(g.labels[w]) == label
                and self.is_unmarked(w)
            )

        variants = []
        for direction in ("out", "in"):
            counts: dict[int, int] = {}
            for u in members:
                nbrs = g.out_neighbors(u) if direction == "out" else g.in_neighbors(u)
                for w in nbrs:
                    w = int(w)
                    if eligible(w):
                        counts[w] = counts.get(w, 0) + 1
            if not counts:
                continue
            h = min(counts, key=lambda w: (-counts[w], w))
            if counts[h] < need:
                continue
            variants.append(sorted(members + [h]))
            spoke_pool = g.in_neighbors(h) if direction == "out" else g.out_neighbors(h)
            completion = {int(w) for w in spoke_pool if eligible(int(w)) and int(w) != h}
            if completion:
                variants.append(sorted(member_set | completion | {h}))
        dedup = []
        for var in variants:
            if var not in dedup:
                dedup.append(var)
        return dedup

    def evaluate_proposal(self, nodes) -> MergeProposal | None:
        """Best proposal for a candidate subset, or None when not mergeable.

        Filters out nodes already absorbed by earlier commits; needs at
        least two survivors sharing one label.  The returned proposal may
        include one extra hub node (see class docstring); commit it only
        when dcost < 0.
        """
        members = sorted(v for v in set(nodes) if self.is_unmarked(int(v)))
        if len(members) < 2:
            return None
        labels = {int(self.g.labels[v]) for v in members}
        if len(labels) != 1:
            raise ValueError("evaluate_proposal needs a label-homogeneous set")
        best = self._score(members)
        if best.node.glyph is Glyph.DISCONNECTED:
            for variant in self._hub_variants(members):
                p = self._score(variant)
                if p.dcost < best.dcost - 1e-12:
                    best = p
        return best

    def commit(self, proposal: MergeProposal) -> None:
        """Apply a strictly-improving proposal to the state."""
        if not (proposal.dcost < 0):
            raise MergeError(f"refusing to commit dcost={proposal.dcost:+.6f}")
        new = proposal.node
        if new.id != self.next_id:
            raise MergeError("stale proposal")
        for sid in proposal.absorbed:
            if self.snodes[sid].size != 1:
                raise MergeError("absorbed super-node is no longer a singleton")

        for a, b in proposal.dissolved:
            del self.sedges[(a, b)]
            del self.out_se[a][b]
            del self.in_se[b][a]
        for sid in proposal.absorbed:
            del self.snodes[sid]
            self.out_se.pop(sid, None)
            self.in_se.pop(sid, None)
        self.snodes[new.id] = new
        for u in new.members:
            self.assign[u] = new.id
        for other, m in proposal.out_edges.items():
            self.sedges[(new.id, other)] = m
            self.out_se.setdefault(new.id, {})[other] = m
            self.in_se.setdefault(other, {})[new.id] = m
        for other, m in proposal.in_edges.items():
            self.sedges[(other, new.id)] = m
            self.out_se.setdefault(other, {})[new.id] = m
            self.in_se.setdefault(new.id, {})[other] = m

        for d, c in proposal.odeg_delta.items():
            self.odeg_hist[d] = self.odeg_hist.get(d, 0) + c
            if self.odeg_hist[d] == 0:
                del self.odeg_hist[d]
        self.n_s = self.n_s - len(proposal.absorbed) + 1
        self.next_id += 1
        self.summary_bits += proposal.d_summary
        self.correction_bits += proposal.d_correction

    def process_candidate(self, nodes, audit=None) -> list[MergeProposal]:
        """Split a raw candidate by label, then evaluate and commit each

        strictly-improving subset.  Returns the committed proposals.  When
        given, ``audit(state, proposal)`` runs right after every commit.
        """
        committed = []
        for subset in split_by_label(self.g, [v for v in nodes if self.is_unmarked(v)]):
            proposal = self.evaluate_proposal(subset)
            if proposal is not None and proposal.dcost < 0:
                self.commit(proposal)
                committed.append(proposal)
                if audit is not None:
                    audit(self, proposal)
        return committed
