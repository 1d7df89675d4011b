"""Summary graphs: glyph-typed super-nodes, weighted super-edges, corrections.

A summary partitions the input graph's nodes into label-homogeneous
super-nodes, each carrying a structural glyph (clique, in-star, out-star,
disconnected, singleton), an optional self-loop flag, and a representative
edge multiplicity.  Weighted super-edges connect super-nodes.  Decompression
expands glyphs and super-edges back into plain edges; a correction set
(edges to add, edges to drop, multiplicity deltas) makes the round trip
exact.

Cost model.  Every ordered region of node pairs is owned by exactly one
context: the region inside a super-node v (S_v x S_v, diagonal included)
belongs to v's node context, and the region between two distinct super-nodes
(a, b) belongs to the pair context (a, b).  Within a context, decompression
produces an expansion X; original edges inside X are "covered" (their
multiplicities are corrected against the representative multiplicity),
original edges outside X are positive corrections (coded with the universal
integer code), and expansion pairs without an original edge are negative
corrections.  Positive and negative corrections are charged per context with
a binomial bundle code; a pair context without a super-edge exists only when
it contains at least one original edge, in which case all its corrections
are positive.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable

from .encoding import (
    CostBreakdown,
    cost_correction_set,
    cost_multiplicity_diff,
    cost_node_map,
    cost_summary,
    ell_diff,
    len_natural,
)
from .graph import LabeledMultiGraph


class Glyph(Enum):
    CLIQUE = "clique"
    IN_STAR = "in_star"
    OUT_STAR = "out_star"
    DISCONNECTED = "disconnected"
    SINGLETON = "singleton"


STAR_GLYPHS = (Glyph.IN_STAR, Glyph.OUT_STAR)

#: graphviz shape per glyph
DOT_SHAPES = {
    Glyph.CLIQUE: "square",
    Glyph.IN_STAR: "triangle",
    Glyph.OUT_STAR: "invtriangle",
    Glyph.DISCONNECTED: "hexagon",
    Glyph.SINGLETON: "circle",
}

DOT_PALETTE = (
    "lightblue", "lightpink", "palegreen", "khaki", "plum",
    "lightsalmon", "lightgray", "aquamarine", "wheat", "thistle",
)


@dataclass
class SuperNode:
    id: int
    label: int
    glyph: Glyph
    members: tuple[int, ...]
    hub: int | None = None
    rep_mult: int = 1
    self_loop: bool = False

    def __post_init__(self):
        self.members = tuple(sorted(self.members))
        if not self.members:
            raise ValueError("super-node needs at least one member")
        if self.rep_mult < 1:
            raise ValueError("representative multiplicity must be >= 1")
        if self.glyph in STAR_GLYPHS:
            if self.hub is None or self.hub not in self.members:
                raise ValueError("star glyph needs a hub among its members")
        if self.glyph is Glyph.SINGLETON and len(self.members) != 1:
            raise ValueError("singleton glyph requires exactly one member")

    @property
    def size(self) -> int:
        return len(self.members)

    def ports(self) -> tuple[int, ...]:
        """Members that super-edges attach to: the hub for stars, else all."""
        if self.glyph in STAR_GLYPHS:
            return (self.hub,)
        return self.members

    def glyph_pairs(self) -> Iterable[tuple[int, int]]:
        """Ordered node pairs the glyph expands to (self-loops excluded)."""
        if self.glyph is Glyph.CLIQUE:
            for u in self.members:
                for w in self.members:
                    if u != w:
                        yield (u, w)
        elif self.glyph is Glyph.IN_STAR:
            for u in self.members:
                if u != self.hub:
                    yield (u, self.hub)
        elif self.glyph is Glyph.OUT_STAR:
            for w in self.members:
                if w != self.hub:
                    yield (self.hub, w)

    def glyph_pair_count(self) -> int:
        k = len(self.members)
        if self.glyph is Glyph.CLIQUE:
            return k * (k - 1)
        if self.glyph in STAR_GLYPHS:
            return k - 1
        return 0

    def covers_pair(self, u: int, w: int) -> bool:
        """Whether the internal pair (u, w) lies in this glyph's expansion."""
        if u == w:
            return self.self_loop
        if self.glyph is Glyph.CLIQUE:
            return True
        if self.glyph is Glyph.IN_STAR:
            return w == self.hub
        if self.glyph is Glyph.OUT_STAR:
            return u == self.hub
        return False


@dataclass
class SummaryGraph:
    """A complete summary: partition into super-nodes plus super-edges."""

    graph_size: int
    label_count: int
    super_nodes: dict[int, SuperNode] = field(default_factory=dict)
    super_edges: dict[tuple[int, int], int] = field(default_factory=dict)
    label_names: tuple[str, ...] = ()
    node_names: tuple[str, ...] = ()

    def node_to_super(self) -> dict[int, int]:
        assign = {}
        for vid, sn in self.super_nodes.items():
            for u in sn.members:
                assign[u] = vid
        return assign

    def validate(self, g: LabeledMultiGraph | None = None) -> None:
        """Check structural invariants; raises ValueError on violation."""
        seen: set[int] = set()
        for sn in self.super_nodes.values():
            for u in sn.members:
                if u in seen:
                    raise ValueError(f"node {u} in two super-nodes")
                if not (0 <= u < self.graph_size):
                    raise ValueError(f"member {u} out of range")
                seen.add(u)
        if len(seen) != self.graph_size:
            raise ValueError("super-nodes must cover every node")
        for (a, b), m in self.super_edges.items():
            if a == b:
                raise ValueError("super-edge endpoints must differ")
            if a not in self.super_nodes or b not in self.super_nodes:
                raise ValueError("super-edge endpoint missing")
            if m < 1:
                raise ValueError("super-edge multiplicity must be >= 1")
        if g is not None:
            for sn in self.super_nodes.values():
                labels = {int(g.labels[u]) for u in sn.members}
                if labels != {sn.label}:
                    raise ValueError(
                        f"super-node {sn.id} mixes labels {sorted(labels)}"
                    )

    def glyph_counts(self) -> dict[str, int]:
        counts = {glyph.value: 0 for glyph in Glyph}
        for sn in self.super_nodes.values():
            counts[sn.glyph.value] += 1
        return counts


def all_singleton_summary(g: LabeledMultiGraph) -> SummaryGraph:
    """The trivial summary: one singleton super-node per node, no super-edges.

    A node's self-loop flag mirrors the graph and its representative
    multiplicity is the loop multiplicity (1 when loop-free), so the only
    information carried is the baseline encoding of the edge set via
    positive corrections.
    """
    s = SummaryGraph(
        graph_size=g.n,
        label_count=g.label_count,
        label_names=tuple(g.label_names),
        node_names=tuple(g.node_names),
    )
    for v in range(g.n):
        loop = g.self_loop_mult(v)
        s.super_nodes[v] = SuperNode(
            id=v,
            label=int(g.labels[v]),
            glyph=Glyph.SINGLETON,
            members=(v,),
            rep_mult=loop if loop else 1,
            self_loop=loop > 0,
        )
    return s


# -- decompression and corrections -------------------------------------------


def decompress(summary: SummaryGraph) -> LabeledMultiGraph:
    """Expand a summary into a plain graph (no corrections applied)."""
    edges: dict[tuple[int, int], int] = {}
    labels = [0] * summary.graph_size
    for sn in summary.super_nodes.values():
        for u in sn.members:
            labels[u] = sn.label
        for pair in sn.glyph_pairs():
            edges[pair] = sn.rep_mult
        if sn.self_loop:
            for u in sn.members:
                edges[(u, u)] = sn.rep_mult
    for (a, b), m in summary.super_edges.items():
        for u in summary.super_nodes[a].ports():
            for w in summary.super_nodes[b].ports():
                edges[(u, w)] = m
    return LabeledMultiGraph(
        summary.graph_size,
        edges,
        labels=labels,
        label_names=summary.label_names or None,
        node_names=summary.node_names or None,
    )


@dataclass
class CorrectionSet:
    """Exact patch from a decompressed summary back to the original graph."""

    positive: list[tuple[int, int, int]] = field(default_factory=list)
    negative: list[tuple[int, int]] = field(default_factory=list)
    mult_deltas: list[tuple[int, int, int]] = field(default_factory=list)

    def counts(self) -> dict[str, int]:
        return {
            "positive": len(self.positive),
            "negative": len(self.negative),
            "mult_deltas": len(self.mult_deltas),
        }


def _group_edges(g: LabeledMultiGraph, summary: SummaryGraph):
    """Split g's edges into per-super-node internal and per-pair cross lists."""
    assign = summary.node_to_super()
    internal: dict[int, list[tuple[int, int, int]]] = {}
    cross: dict[tuple[int, int], list[tuple[int, int, int]]] = {}
    for u, w, m in g.edges():
        a, b = assign[u], assign[w]
        if a == b:
            internal.setdefault(a, []).append((u, w, m))
        else:
            cross.setdefault((a, b), []).append((u, w, m))
    return internal, cross


def _pair_expansion(summary: SummaryGraph, a: int, b: int):
    """Ports and expansion size for the super-edge footprint of (a, b)."""
    sa, sb = summary.super_nodes[a], summary.super_nodes[b]
    ports_a, ports_b = sa.ports(), sb.ports()
    return ports_a, ports_b, len(ports_a) * len(ports_b)


def compute_corrections(g: LabeledMultiGraph, summary: SummaryGraph) -> CorrectionSet:
    """Corrections such that reconstruct(summary, corrections) == g exactly."""
    cor = CorrectionSet()
    internal, cross = _group_edges(g, summary)

    for vid, sn in summary.super_nodes.items():
        present = {(u, w): m for (u, w, m) in internal.get(vid, [])}
        for pair in sn.glyph_pairs():
            if pair in present:
                if present[pair] != sn.rep_mult:
                    cor.mult_deltas.append(
                        (*pair, present[pair] - sn.rep_mult)
                    )
            else:
                cor.negative.append(pair)
        if sn.self_loop:
            for u in sn.members:
                if (u, u) in present:
                    if present[(u, u)] != sn.rep_mult:
                        cor.mult_deltas.append((u, u, present[(u, u)] - sn.rep_mult))
                else:
                    cor.negative.append((u, u))
        for (u, w), m in sorted(present.items()):
            if not sn.covers_pair(u, w):
                cor.positive.append((u, w, m))

    linked = set(summary.super_edges)
    for (a, b), edges in sorted(cross.items()):
        if (a, b) in linked:
            continue
        for u, w, m in sorted(edges):
            cor.positive.append((u, w, m))

    for (a, b), rep in sorted(summary.super_edges.items()):
        present = {(u, w): m for (u, w, m) in cross.get((a, b), [])}
        ports_a, ports_b, _ = _pair_expansion(summary, a, b)
        port_b_set = set(ports_b)
        covered: set[tuple[int, int]] = set()
        for u in ports_a:
            for w in ports_b:
                if (u, w) in present:
                    covered.add((u, w))
                    if present[(u, w)] != rep:
                        cor.mult_deltas.append((u, w, present[(u, w)] - rep))
                else:
                    cor.negative.append((u, w))
        port_a_set = set(ports_a)
        for (u, w), m in sorted(present.items()):
            if not (u in port_a_set and w in port_b_set):
                cor.positive.append((u, w, m))

    return cor


def reconstruct(summary: SummaryGraph, corrections: CorrectionSet) -> LabeledMultiGraph:
    """Apply corrections to the decompressed summary; exact inverse of

    compute_corrections for the graph the corrections were derived from.
    """
    base = decompress(summary)
    edges = {(u, w): m for u, w, m in base.edges()}
    for u, w, m in corrections.positive:
        if (u, w) in edges:
            raise ValueError(f"positive correction for existing edge ({u}, {w})")
        edges[(u, w)] = m
    for u, w in corrections.negative:
        if (u, w) not in edges:
            raise ValueError(f"negative correction for missing edge ({u}, {w})")
        del edges[(u, w)]
    for u, w, delta in corrections.mult_deltas:
        if (u, w) not in edges:
            raise ValueError(f"multiplicity delta for missing edge ({u}, {w})")
        edges[(u, w)] += delta
        if edges[(u, w)] < 1:
            raise ValueError(f"multiplicity of ({u}, {w}) dropped below 1")
    return LabeledMultiGraph(
        summary.graph_size,
        edges,
        labels=[int(x) for x in base.labels],
        label_names=summary.label_names or None,
        node_names=summary.node_names or None,
    )


# -- correction cost ----------------------------------------------------------


def node_context_bits(sn: SuperNode, internal: list[tuple[int, int, int]]) -> float:
    """Correction bits owned by one super-node's internal region.

    ``internal`` lists the original edges (u, w, m) with both endpoints in
    the super-node, self-loops included.
    """
    k = sn.size
    region = k * k
    x_size = sn.glyph_pair_count() + (k if sn.self_loop else 0)
    covered_mults: list[int] = []
    pos_mults: list[int] = []
    for u, w, m in internal:
        if sn.covers_pair(u, w):
            covered_mults.append(m)
        else:
            pos_mults.append(m)
    n_neg = x_size - len(covered_mults)
    bits = 0.0
    if x_size >= 1:
        bits += cost_correction_set(n_neg, x_size)
    if region - x_size >= 1:
        bits += cost_correction_set(len(pos_mults), region - x_size)
    bits += cost_multiplicity_diff(covered_mults, sn.rep_mult)
    bits += sum(len_natural(m) for m in pos_mults)
    return bits


def pair_context_bits(
    sa: SuperNode,
    sb: SuperNode,
    rep: int | None,
    edges: list[tuple[int, int, int]],
) -> float:
    """Correction bits owned by the ordered super-node pair (sa, sb).

    ``rep`` is the super-edge's representative multiplicity, or None when the
    pair is not linked (then every edge is a positive correction over the
    full region).
    """
    region = sa.size * sb.size
    if rep is None:
        if not edges:
            return 0.0
        return cost_correction_set(len(edges), region) + sum(
            len_natural(m) for _, _, m in edges
        )
    ports_a, ports_b = sa.ports(), sb.ports()
    x_size = len(ports_a) * len(ports_b)
    port_a_set, port_b_set = set(ports_a), set(ports_b)
    covered_mults = []
    pos_mults = []
    for u, w, m in edges:
        if u in port_a_set and w in port_b_set:
            covered_mults.append(m)
        else:
            pos_mults.append(m)
    bits = cost_correction_set(x_size - len(covered_mults), x_size)
    if region - x_size >= 1:
        bits += cost_correction_set(len(pos_mults), region - x_size)
    bits += cost_multiplicity_diff(covered_mults, rep)
    bits += sum(len_natural(m) for m in pos_mults)
    return bits


def correction_cost(
    g: LabeledMultiGraph, summary: SummaryGraph
) -> tuple[float, dict]:
    """Bits to repair the decompressed summary into g, with a breakdown.

    Returns (total_bits, breakdown) where breakdown maps context keys —
    ("map", v), ("node", v), ("pair", a, b) — to their bit costs.
    """
    internal, cross = _group_edges(g, summary)
    breakdown: dict[tuple, float] = {}
    for vid, sn in summary.super_nodes.items():
        breakdown[("map", vid)] = cost_node_map(
            sn.size, summary.graph_size, sn.glyph in STAR_GLYPHS
        )
        breakdown[("node", vid)] = node_context_bits(sn, internal.get(vid, []))
    pair_keys = set(cross) | set(summary.super_edges)
    for a, b in sorted(pair_keys):
        breakdown[("pair", a, b)] = pair_context_bits(
            summary.super_nodes[a],
            summary.super_nodes[b],
            summary.super_edges.get((a, b)),
            cross.get((a, b), []),
        )
    return sum(breakdown.values()), breakdown


def total_cost(g: LabeledMultiGraph, summary: SummaryGraph) -> CostBreakdown:
    """Two-part description length of g under the given summary."""
    corr, _ = correction_cost(g, summary)
    return CostBreakdown(summary_bits=cost_summary(summary), correction_bits=corr)


def correction_set_cost(g: LabeledMultiGraph, summary: SummaryGraph) -> float:
    """Convenience: correction bits only."""
    return correction_cost(g, summary)[0]


# -- exports ------------------------------------------------------------------


def summary_to_dict(
    g: LabeledMultiGraph, summary: SummaryGraph, costs: CostBreakdown | None = None
) -> dict:
    """JSON-ready form of a summary, with original node-id strings."""
    names = summary.node_names or tuple(g.node_names)
    if costs is None:
        costs = total_cost(g, summary)
    return {
        "graph_size": summary.graph_size,
        "label_names": list(summary.label_names or g.label_names),
        "node_names": list(names),
        "super_nodes": [
            {
                "id": sn.id,
                "label": summary.label_names[sn.label]
                if summary.label_names
                else g.label_names[sn.label],
                "glyph": sn.glyph.value,
                "members": [names[u] for u in sn.members],
                "hub": names[sn.hub] if sn.hub is not None else None,
                "rep_mult": sn.rep_mult,
                "self_loop": sn.self_loop,
            }
            for sn in sorted(summary.super_nodes.values(), key=lambda s: s.id)
        ],
        "super_edges": [
            {"src": a, "dst": b, "rep_mult": m}
            for (a, b), m in sorted(summary.super_edges.items())
        ],
        "cost": {
            "summary_bits": costs.summary_bits,
            "correction_bits": costs.correction_bits,
            "total_bits": costs.total_bits,
        },
    }


def summary_from_dict(data: dict) -> SummaryGraph:
    """Inverse of summary_to_dict (ids are re-derived from node_names)."""
    names = list(data["node_names"])
    name_to_id = {name: i for i, name in enumerate(names)}
    label_names = list(data["label_names"])
    label_to_id = {name: i for i, name in enumerate(label_names)}
    s = SummaryGraph(
        graph_size=data["graph_size"],
        label_count=len(label_names),
        label_names=tuple(label_names),
        node_names=tuple(names),
    )
    for rec in data["super_nodes"]:
        s.super_nodes[rec["id"]] = SuperNode(
            id=rec["id"],
            label=label_to_id[rec["label"]],
            glyph=Glyph(rec["glyph"]),
            members=tuple(name_to_id[m] for m in rec["members"]),
            hub=name_to_id[rec["hub"]] if rec["hub"] is not None else None,
            rep_mult=rec["rep_mult"],
            self_loop=rec["self_loop"],
        )
    for rec in data["super_edges"]:
        s.super_edges[(rec["src"], rec["dst"])] = rec["rep_mult"]
    return s


def corrections_to_dict(summary: SummaryGraph, cor: CorrectionSet) -> dict:
    names = summary.node_names

    def nm(u):
        return names[u]

    return {
        "positive": [[nm(u), nm(w), m] for u, w, m in cor.positive],
        "negative": [[nm(u), nm(w)] for u, w in cor.negative],
        "mult_deltas": [[nm(u), nm(w), d] for u, w, d in cor.mult_deltas],
    }


def corrections_from_dict(summary: SummaryGraph, data: dict) -> CorrectionSet:
    name_to_id = {name: i for i, name in enumerate(summary.node_names)}
    return CorrectionSet(
        positive=[(name_to_id[u], name_to_id[w], m) for u, w, m in data["positive"]],
        negative=[(name_to_id[u], name_to_id[w]) for u, w in data["negative"]],
        mult_deltas=[
            (name_to_id[u], name_to_id[w], d) for u, w, d in data["mult_deltas"]
        ],
    )


def export_json(
    g: LabeledMultiGraph, summary: SummaryGraph, costs: CostBreakdown | None = None
) -> str:
    return json.dumps(summary_to_dict(g, summary, costs), indent=2)


def export_dot(summary: SummaryGraph, graph_name: str = "summary") -> str:
    """Graphviz rendering: shape encodes the glyph, fill color the label,

    node text is "label|member count|representative multiplicity", and each
    super-edge is annotated with its representative multiplicity.
    """
    lines = [f"digraph {graph_name} {{", "  node [style=filled];"]
    for sn in sorted(summary.super_nodes.values(), key=lambda s: s.id):
        label_name = (
            summary.label_names[sn.label] if summary.label_names else str(sn.label)
        )
        color = DOT_PALETTE[sn.label % len(DOT_PALETTE)]
        text = f"{label_name}|{sn.size}|{sn.rep_mult}"
        lines.append(
            f'  sn{sn.id} [shape={DOT_SHAPES[sn.glyph]}, fillcolor="{color}", '
            f'label="{text}"];'
        )
    for (a, b), m in sorted(summary.super_edges.items()):
        lines.append(f'  sn{a} -> sn{b} [label="{m}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
