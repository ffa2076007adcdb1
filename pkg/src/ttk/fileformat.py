"""Line-oriented text format for graphs, maps and gate structures.

::

    # comment
    graph R2
    vertex v
    edge a v v
    edge b v v
    endgraph

    map F R2 -> R2
    vmap v v
    emap a a b
    emap b a

    gates GF R2
    gate v a b
    gate v ~a
    gate v ~b

Map and gates blocks end at the next block keyword.  ``serialize`` writes
blocks in declaration order separated by one blank line, so canonical
files survive a round trip byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .gates import GateStructure, PartitionError
from .graphs import Graph, GraphError, GraphMap, format_word

KEYWORDS = ("graph", "map", "gates")


class ParseError(GraphError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message


@dataclass
class Document:
    graphs: dict = field(default_factory=dict)
    maps: dict = field(default_factory=dict)
    gates: dict = field(default_factory=dict)
    order: list = field(default_factory=list)  # (kind, name) in declaration order

    def add(self, obj) -> None:
        kind = _kind(obj)
        if obj.name in self.graphs or obj.name in self.maps or obj.name in self.gates:
            raise GraphError(f"name {obj.name} declared twice")
        {"graph": self.graphs, "map": self.maps, "gates": self.gates}[kind][obj.name] = obj
        self.order.append((kind, obj.name))

    def map(self, name: str) -> GraphMap:
        if name not in self.maps:
            raise GraphError(f"no map named {name}")
        return self.maps[name]

    def gate_structure(self, name: str) -> GateStructure:
        if name not in self.gates:
            raise GraphError(f"no gate structure named {name}")
        return self.gates[name]

    def graph(self, name: str) -> Graph:
        if name not in self.graphs:
            raise GraphError(f"no graph named {name}")
        return self.graphs[name]


def _kind(obj):
    if isinstance(obj, Graph):
        return "graph"
    if isinstance(obj, GraphMap):
        return "map"
    if isinstance(obj, GateStructure):
        return "gates"
    raise TypeError(f"cannot store {type(obj).__name__}")


def _tokens(text: str) -> list:
    out = []
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].split()
        if line:
            out.append((n, line))
    return out


def parse(text: str) -> Document:
    doc = Document()
    lines = _tokens(text)
    i = 0
    while i < len(lines):
        n, toks = lines[i]
        head = toks[0]
        if head == "graph":
            i = _parse_graph(doc, lines, i)
        elif head == "map":
            i = _parse_map(doc, lines, i)
        elif head == "gates":
            i = _parse_gates(doc, lines, i)
        else:
            raise ParseError(n, f"expected graph, map or gates, got {head!r}")
    return doc


def parse_file(path) -> Document:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def _block_end(lines: list, i: int) -> int:
    j = i + 1
    while j < len(lines) and lines[j][1][0] not in KEYWORDS:
        j += 1
    return j


def _add(doc: Document, obj, n: int) -> None:
    try:
        doc.add(obj)
    except GraphError as exc:
        raise ParseError(n, str(exc)) from None


def _parse_graph(doc: Document, lines: list, i: int) -> int:
    n0, toks = lines[i]
    if len(toks) != 2:
        raise ParseError(n0, "expected 'graph NAME'")
    name = toks[1]
    vertices, edges = [], []
    j = i + 1
    while True:
        if j >= len(lines):
            raise ParseError(n0, f"graph {name} has no endgraph")
        n, toks = lines[j]
        if toks[0] == "endgraph":
            if len(toks) != 1:
                raise ParseError(n, "unexpected tokens after endgraph")
            break
        if toks[0] == "vertex":
            if len(toks) < 2:
                raise ParseError(n, "vertex line without vertices")
            vertices.extend(toks[1:])
        elif toks[0] == "edge":
            if len(toks) != 4:
                raise ParseError(n, "expected 'edge LABEL FROM TO'")
            edges.append(tuple(toks[1:]))
            for v in toks[2:]:
                if v not in vertices:
                    raise ParseError(n, f"dangling vertex {v} (not declared)")
        else:
            raise ParseError(n, f"unexpected {toks[0]!r} inside graph {name}")
        j += 1
    try:
        graph = Graph(name, tuple(vertices), tuple(edges))
    except GraphError as exc:
        raise ParseError(lines[j][0], str(exc)) from None
    _add(doc, graph, n0)
    return j + 1


def _parse_map(doc: Document, lines: list, i: int) -> int:
    n0, toks = lines[i]
    if len(toks) != 5 or toks[3] != "->":
        raise ParseError(n0, "expected 'map NAME SRC -> TGT'")
    name, src, tgt = toks[1], toks[2], toks[4]
    for g in (src, tgt):
        if g not in doc.graphs:
            raise ParseError(n0, f"unknown graph {g}")
    source, target = doc.graphs[src], doc.graphs[tgt]
    end = _block_end(lines, i)
    vmap, emap = {}, {}
    for n, toks in lines[i + 1:end]:
        if toks[0] == "vmap":
            if len(toks) != 3:
                raise ParseError(n, "expected 'vmap V W'")
            if toks[1] in vmap:
                raise ParseError(n, f"vertex {toks[1]} mapped twice")
            vmap[toks[1]] = toks[2]
        elif toks[0] == "emap":
            if len(toks) < 2:
                raise ParseError(n, "expected 'emap LABEL TOK...'")
            lab, word = toks[1], tuple(toks[2:])
            if lab in emap:
                raise ParseError(n, f"edge {lab} mapped twice")
            if lab not in source.labels:
                raise ParseError(n, f"unknown edge {lab}")
            if not word:
                raise ParseError(n, f"contracted edge {lab}")
            try:
                target.check_word(word)
            except GraphError as exc:
                raise ParseError(n, str(exc)) from None
            emap[lab] = word
        else:
            raise ParseError(n, f"unexpected {toks[0]!r} inside map {name}")
    # a rose needs no vmap line
    if not vmap and len(source.vertices) == 1 and len(target.vertices) == 1:
        vmap = {source.vertices[0]: target.vertices[0]}
    try:
        f = GraphMap(name, source, target, vmap, emap)
    except GraphError as exc:
        raise ParseError(n0, str(exc)) from None
    _add(doc, f, n0)
    return end


def _parse_gates(doc: Document, lines: list, i: int) -> int:
    n0, toks = lines[i]
    if len(toks) != 3:
        raise ParseError(n0, "expected 'gates NAME GRAPH'")
    name, gname = toks[1], toks[2]
    if gname not in doc.graphs:
        raise ParseError(n0, f"unknown graph {gname}")
    graph = doc.graphs[gname]
    end = _block_end(lines, i)
    blocks = []
    seen: dict = {}
    for n, toks in lines[i + 1:end]:
        if toks[0] != "gate" or len(toks) < 3:
            raise ParseError(n, "expected 'gate VERTEX TOK...'")
        v = toks[1]
        if v not in graph.vertices:
            raise ParseError(n, f"unknown vertex {v}")
        for d in toks[2:]:
            if not graph.has_direction(d):
                raise ParseError(n, f"partition violated: unknown direction {d}")
            if graph.initial(d) != v:
                raise ParseError(n, f"partition violated: direction {d} does not start at {v}")
            if d in seen:
                raise ParseError(n, f"partition violated: direction {d} already in a gate (line {seen[d]})")
            seen[d] = n
        blocks.append(toks[2:])
    try:
        G = GateStructure.from_blocks(graph, blocks, name)
    except PartitionError as exc:
        raise ParseError(n0, str(exc)) from None
    _add(doc, G, n0)
    return end


def format_graph(graph: Graph) -> list:
    out = [f"graph {graph.name}", "vertex " + " ".join(graph.vertices)]
    out += [f"edge {lab} {u} {w}" for lab, u, w in graph.edges]
    out.append("endgraph")
    return out


def format_map(f: GraphMap) -> list:
    out = [f"map {f.name} {f.source.name} -> {f.target.name}"]
    out += [f"vmap {v} {f.vmap[v]}" for v in f.source.vertices]
    out += [f"emap {lab} {format_word(f.emap[lab])}" for lab in f.source.labels]
    return out


def format_gates(G: GateStructure) -> list:
    out = [f"gates {G.name} {G.graph.name}"]
    out += [f"gate {G.vertex_of(g)} " + " ".join(sorted(g)) for g in G.gates]
    return out


def serialize(doc: Document) -> str:
    blocks = []
    for kind, name in doc.order:
        if kind == "graph":
            blocks.append(format_graph(doc.graphs[name]))
        elif kind == "map":
            blocks.append(format_map(doc.maps[name]))
        else:
            blocks.append(format_gates(doc.gates[name]))
    return "\n\n".join("\n".join(b) for b in blocks) + "\n"


def document(*objects) -> Document:
    """Document holding the given objects, plus any graphs they live on."""
    doc = Document()
    for obj in objects:
        graphs = []
        if isinstance(obj, GraphMap):
            graphs = [obj.source, obj.target]
        elif isinstance(obj, GateStructure):
            graphs = [obj.graph]
        for g in graphs:
            if g.name not in doc.graphs:
                doc.add(g)
        if not (isinstance(obj, Graph) and obj.name in doc.graphs):
            doc.add(obj)
    return doc
