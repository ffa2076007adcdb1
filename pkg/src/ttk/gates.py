"""Gate structures, legality, and the gate structure intrinsic to a self-map."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .graphs import Graph, GraphError, GraphMap, differential, rev


class PartitionError(GraphError):
    pass


@dataclass(frozen=True)
class GateStructure:
    """Per-vertex partition of outgoing directions into gates.

    ``gates`` is a tuple of frozensets in canonical order: by vertex order
    of the graph, then by smallest direction.
    """

    graph: Graph
    gates: tuple
    name: str = "G"
    _gate_of: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        gate_of = {}
        for gate in self.gates:
            if not gate:
                raise PartitionError("partition violated: empty gate")
            vs = {self.graph.initial(d) for d in gate}
            if len(vs) != 1:
                raise PartitionError(f"partition violated: gate {sorted(gate)} spans several vertices")
            for d in gate:
                if d in gate_of:
                    raise PartitionError(f"partition violated: direction {d} in two gates")
                gate_of[d] = gate
        missing = set(self.graph.directions) - set(gate_of)
        if missing:
            raise PartitionError(f"partition violated: direction {min(missing)} in no gate")
        object.__setattr__(self, "_gate_of", gate_of)

    @classmethod
    def from_blocks(cls, graph: Graph, blocks: Iterable[Iterable[str]], name: str = "G") -> "GateStructure":
        gates = []
        for block in blocks:
            block = tuple(block)
            for d in block:
                if not graph.has_direction(d):
                    raise PartitionError(f"partition violated: unknown direction {d}")
            gates.append(frozenset(block))
            if len(gates[-1]) != len(block):
                raise PartitionError(f"partition violated: direction repeated in gate {' '.join(block)}")
        order = {v: i for i, v in enumerate(graph.vertices)}
        gates.sort(key=lambda g: (order[graph.initial(min(g))], min(g)))
        return cls(graph, tuple(gates), name)

    def gate_of(self, d: str) -> frozenset:
        return self._gate_of[d]

    def gates_at(self, v: str) -> tuple:
        return tuple(g for g in self.gates if self.graph.initial(min(g)) == v)

    def vertex_of(self, gate: frozenset) -> str:
        return self.graph.initial(min(gate))

    def same_partition(self, other: "GateStructure") -> bool:
        return self.graph == other.graph and set(self.gates) == set(other.gates)

    def renamed(self, name: str) -> "GateStructure":
        return GateStructure(self.graph, self.gates, name)


def format_gate(gate: frozenset) -> str:
    return "{" + ",".join(sorted(gate)) + "}"


def singleton_gates(graph: Graph, name: str = "G1") -> GateStructure:
    return GateStructure.from_blocks(graph, ([d] for d in graph.directions), name)


def sign_gates(graph: Graph, name: str = "Gpm") -> GateStructure:
    """Positive and negative directions as two gates at each vertex."""
    blocks = []
    for v in graph.vertices:
        for neg in (False, True):
            block = [d for d in graph.outgoing(v) if (d[0] == "~") == neg]
            if block:
                blocks.append(block)
    return GateStructure.from_blocks(graph, blocks, name)


def is_legal_turn(G: GateStructure, d1: str, d2: str) -> bool:
    if G.graph.initial(d1) != G.graph.initial(d2):
        raise GraphError(f"turn ({d1}, {d2}) is not at a single vertex")
    return d1 != d2 and G.gate_of(d1) is not G.gate_of(d2)


def is_legal_word(G: GateStructure, word: Sequence[str]) -> bool:
    gate_of = G._gate_of
    for x, y in zip(word, word[1:]):
        if gate_of[rev(x)] is gate_of[y]:
            return False
    return True


def is_legal_path(G: GateStructure, path) -> bool:
    return is_legal_word(G, getattr(path, "dirs", path))


def illegal_turns_in(G: GateStructure, word: Sequence[str]) -> int:
    gate_of = G._gate_of
    return sum(1 for x, y in zip(word, word[1:]) if gate_of[rev(x)] is gate_of[y])


def intrinsic_gates(f: GraphMap, name: str | None = None) -> GateStructure:
    """Directions at a vertex share a gate iff some iterate of Df identifies them."""
    if not f.is_self_map:
        raise GraphError(f"map {f.name} is not a self-map")
    dirs = f.source.directions
    df = differential(f)
    n = len(dirs)
    cur = {d: d for d in dirs}
    history = []
    for _ in range(n):
        cur = {d: df[x] for d, x in cur.items()}
        history.append(_partition(f.source, cur))
    # the partitions coarsen monotonically and must have stabilised by step n
    assert history[-1] == history[-2] if n > 1 else True
    return GateStructure.from_blocks(f.source, history[-1], name or f"G({f.name})")


def _partition(graph: Graph, key: dict) -> tuple:
    blocks: dict = {}
    for d in graph.directions:
        blocks.setdefault((graph.initial(d), key[d]), []).append(d)
    return tuple(sorted(tuple(b) for b in blocks.values()))


def is_train_track_morphism(f: GraphMap, G_src: GateStructure, G_tgt: GateStructure) -> bool:
    """(2'a) D²f maps legal turns to legal turns and (2'b) every f(e) is legal."""
    if G_src.graph != f.source or G_tgt.graph != f.target:
        raise GraphError("gate structure on the wrong graph")
    for lab in f.source.labels:
        if not is_legal_word(G_tgt, f.image(lab)):
            return False
    df = differential(f)
    for v in f.source.vertices:
        out = f.source.outgoing(v)
        for i, x in enumerate(out):
            for y in out[i + 1:]:
                if G_src.gate_of(x) is G_src.gate_of(y):
                    continue
                fx, fy = df[x], df[y]
                if fx == fy or G_tgt.gate_of(fx) is G_tgt.gate_of(fy):
                    return False
    return True


@dataclass(frozen=True)
class GateMorphism:
    """Induced map on gates, or the first gate that Df splits."""

    mapping: dict | None
    violation: frozenset | None = None

    @property
    def defined(self) -> bool:
        return self.mapping is not None

    def is_injective_at(self, gates: Sequence[frozenset]) -> bool:
        images = [self.mapping[g] for g in gates]
        return len(set(images)) == len(images)


def gate_morphism(f: GraphMap, G_src: GateStructure, G_tgt: GateStructure) -> GateMorphism:
    df = differential(f)
    mapping = {}
    for gate in G_src.gates:
        images = {G_tgt.gate_of(df[d]) for d in gate}
        if len(images) != 1:
            return GateMorphism(None, gate)
        mapping[gate] = images.pop()
    return GateMorphism(mapping)


def is_gate_stable(f: GraphMap, G: GateStructure) -> bool:
    if not f.is_self_map:
        return False
    if any(f.vmap[v] != v for v in f.source.vertices):
        return False
    gm = gate_morphism(f, G, G)
    return gm.defined and all(gm.mapping[g] == g for g in G.gates)


def refines(G1: GateStructure, G2: GateStructure) -> bool:
    """Every gate of ``G1`` lies inside a gate of ``G2`` (G1 finer)."""
    if G1.graph != G2.graph:
        raise GraphError("gate structures live on different graphs")
    return all(gate <= G2.gate_of(min(gate)) for gate in G1.gates)
