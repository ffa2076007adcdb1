"""Gate-Whitehead graphs and gate index lists."""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

import networkx as nx

from .gates import GateStructure, gate_morphism
from .graphs import GraphError, GraphMap, crossed_turns, vertex_orbit_periodic


@dataclass(frozen=True)
class GateWhiteheadGraph:
    vertex: str
    gates: tuple  # frozensets, canonical order
    edges: frozenset  # frozenset({g1, g2}) with g1 != g2

    def is_connected(self) -> bool:
        g = nx.Graph()
        g.add_nodes_from(self.gates)
        g.add_edges_from(tuple(e) for e in self.edges)
        return nx.is_connected(g) if self.gates else True


def _seed_turns(f: GraphMap, G: GateStructure) -> set:
    seeds = set()
    for lab in f.source.labels:
        for x, y in crossed_turns(f.image(lab)):
            gx, gy = G.gate_of(x), G.gate_of(y)
            if gx != gy:
                seeds.add(frozenset((gx, gy)))
    return seeds


def gate_turn_closure(f: GraphMap, G: GateStructure) -> frozenset:
    """All gate turns crossed by some ``f^t(e)``, t >= 1, at every vertex.

    Seeds are the gate turns inside the edge images; the closure applies the
    induced map on gates, which is how turns at the junctions of ``f(e_i)``
    and ``f(e_{i+1})`` arise inside ``f^{t+1}(e)``.
    """
    if not f.is_self_map:
        raise GraphError(f"map {f.name} is not a self-map")
    gm = gate_morphism(f, G, G)
    if not gm.defined:
        raise GraphError(f"map {f.name} is not a gate structure morphism for {G.name}")
    found = _seed_turns(f, G)
    frontier = list(found)
    while frontier:
        nxt = []
        for turn in frontier:
            g1, g2 = tuple(turn)
            image = frozenset((gm.mapping[g1], gm.mapping[g2]))
            if len(image) == 2 and image not in found:
                found.add(image)
                nxt.append(image)
        frontier = nxt
    return frozenset(found)


def gate_whitehead_graph(f: GraphMap, G: GateStructure, v: str, closure: frozenset | None = None) -> GateWhiteheadGraph:
    if closure is None:
        closure = gate_turn_closure(f, G)
    gates = G.gates_at(v)
    here = set(gates)
    return GateWhiteheadGraph(v, gates, frozenset(t for t in closure if t <= here))


def whitehead_graphs(f: GraphMap, G: GateStructure) -> dict:
    closure = gate_turn_closure(f, G)
    return {v: gate_whitehead_graph(f, G, v, closure) for v in f.source.vertices}


def essential_vertices(f: GraphMap, G: GateStructure) -> list:
    periodic = vertex_orbit_periodic(f)
    return [v for v in f.source.vertices if v in periodic and len(G.gates_at(v)) >= 3]


@dataclass(frozen=True)
class IndexEntry:
    vertex: str
    gate_count: int
    index: Fraction


@dataclass(frozen=True)
class IndexReport:
    entries: tuple
    rank: int
    certified_stable: bool = False

    @property
    def indices(self) -> list:
        return [e.index for e in self.entries]

    @property
    def total(self) -> Fraction:
        return sum((e.index for e in self.entries), Fraction(0))

    def certify(self) -> "IndexReport":
        if self.total > self.rank - 1:
            raise AssertionError(f"index sum {self.total} exceeds rank - 1 = {self.rank - 1}")
        return replace(self, certified_stable=True)


def gate_index_list(f: GraphMap, G: GateStructure) -> IndexReport:
    entries = []
    for v in essential_vertices(f, G):
        g = len(G.gates_at(v))
        entries.append(IndexEntry(v, g, Fraction(g, 2) - 1))
    order = {v: i for i, v in enumerate(f.source.vertices)}
    entries.sort(key=lambda e: (-e.index, order[e.vertex]))
    return IndexReport(tuple(entries), f.source.rank)


def format_index_list(indices) -> str:
    return "[" + ", ".join(str(x) for x in indices) + "]"
