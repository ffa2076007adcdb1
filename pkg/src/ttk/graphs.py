"""Finite graphs, edge paths and graph maps.

Directions are plain strings: a positive edge is its lowercase label
(``"a"``), its reversal carries a ``~`` prefix (``"~a"``).  Because ``~``
sorts after every label character, plain string ordering puts all
positive directions before the reversed ones, which is the canonical
order used throughout the package.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

LABEL_RE = re.compile(r"^[a-z][a-z0-9_]*$")
VERTEX_RE = re.compile(r"^[A-Za-z0-9_][A-Za-z0-9_.]*$")

Word = tuple  # tuple[str, ...] of directions


class GraphError(ValueError):
    """Raised for malformed graphs, paths or maps."""


def rev(d: str) -> str:
    return d[1:] if d[0] == "~" else "~" + d


def label(d: str) -> str:
    return d[1:] if d[0] == "~" else d


def is_reversed(d: str) -> bool:
    return d[0] == "~"


def reverse_word(word: Sequence[str]) -> tuple:
    return tuple(rev(d) for d in reversed(word))


def reduce_word(word: Iterable[str]) -> tuple:
    out: list[str] = []
    for d in word:
        if out and out[-1] == rev(d):
            out.pop()
        else:
            out.append(d)
    return tuple(out)


def parse_word(text: str) -> tuple:
    """``"a ~b a"`` -> ``("a", "~b", "a")``.  The empty string is the empty word."""
    return tuple(text.split())


def format_word(word: Sequence[str]) -> str:
    return " ".join(word) if word else "1"


@dataclass(frozen=True)
class Graph:
    """A finite connected graph without valence-1 vertices.

    ``edges`` holds ``(label, initial, terminal)`` triples for the positive
    edges, in declaration order.
    """

    name: str
    vertices: tuple
    edges: tuple
    _ends: dict = field(init=False, repr=False, compare=False)
    _out: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(set(self.vertices)) != len(self.vertices):
            raise GraphError(f"graph {self.name}: duplicate vertex")
        if not self.vertices:
            raise GraphError(f"graph {self.name}: no vertices")
        for v in self.vertices:
            if not VERTEX_RE.match(v):
                raise GraphError(f"graph {self.name}: bad vertex id {v!r}")
        ends: dict[str, tuple[str, str]] = {}
        out: dict[str, list[str]] = {v: [] for v in self.vertices}
        for lab, u, w in self.edges:
            if not LABEL_RE.match(lab):
                raise GraphError(f"graph {self.name}: bad edge label {lab!r}")
            if lab in ends:
                raise GraphError(f"graph {self.name}: duplicate edge {lab}")
            for x in (u, w):
                if x not in out:
                    raise GraphError(f"graph {self.name}: edge {lab} has dangling vertex {x}")
            ends[lab] = (u, w)
            out[u].append(lab)
            out[w].append("~" + lab)
        object.__setattr__(self, "_ends", ends)
        object.__setattr__(self, "_out", {v: tuple(sorted(ds)) for v, ds in out.items()})
        for v, ds in self._out.items():
            if len(ds) < 2:
                raise GraphError(f"graph {self.name}: vertex {v} has valence {len(ds)} < 2")
        if not self._connected():
            raise GraphError(f"graph {self.name}: not connected")
        for d in self.directions:
            assert rev(rev(d)) == d and rev(d) != d
            assert self.initial(rev(d)) == self.terminal(d)

    def _connected(self) -> bool:
        seen = {self.vertices[0]}
        todo = deque(seen)
        while todo:
            v = todo.popleft()
            for d in self._out[v]:
                w = self.terminal(d)
                if w not in seen:
                    seen.add(w)
                    todo.append(w)
        return len(seen) == len(self.vertices)

    @classmethod
    def rose(cls, labels: Sequence[str], name: str = "R", vertex: str = "v") -> "Graph":
        return cls(name, (vertex,), tuple((lab, vertex, vertex) for lab in labels))

    @property
    def labels(self) -> tuple:
        return tuple(e[0] for e in self.edges)

    @property
    def directions(self) -> tuple:
        return tuple(sorted(self.labels + tuple("~" + lab for lab in self.labels)))

    @property
    def rank(self) -> int:
        return len(self.edges) - len(self.vertices) + 1

    def has_direction(self, d: str) -> bool:
        return label(d) in self._ends

    def initial(self, d: str) -> str:
        u, w = self._ends[label(d)]
        return w if d[0] == "~" else u

    def terminal(self, d: str) -> str:
        u, w = self._ends[label(d)]
        return u if d[0] == "~" else w

    def outgoing(self, v: str) -> tuple:
        return self._out[v]

    def valence(self, v: str) -> int:
        return len(self._out[v])

    def check_word(self, word: Sequence[str], start: str | None = None) -> None:
        """Raise :class:`GraphError` unless ``word`` is an edge path of this graph."""
        for d in word:
            if not self.has_direction(d):
                raise GraphError(f"direction {d} not in graph {self.name}")
        if start is not None and word and self.initial(word[0]) != start:
            raise GraphError(f"path {format_word(word)} does not start at {start}")
        for x, y in zip(word, word[1:]):
            if self.terminal(x) != self.initial(y):
                raise GraphError(f"path {format_word(word)} is not connected at {x} {y}")


@dataclass(frozen=True)
class EdgePath:
    """A vertex-anchored edge path; may be empty."""

    start: str
    dirs: tuple = ()

    def __len__(self) -> int:
        return len(self.dirs)

    def end(self, graph: Graph) -> str:
        return graph.terminal(self.dirs[-1]) if self.dirs else self.start

    def reversed(self, graph: Graph) -> "EdgePath":
        return EdgePath(self.end(graph), reverse_word(self.dirs))

    def __str__(self) -> str:
        return format_word(self.dirs)


def make_path(graph: Graph, word: str | Sequence[str], start: str | None = None) -> EdgePath:
    dirs = parse_word(word) if isinstance(word, str) else tuple(word)
    if not dirs and start is None:
        raise GraphError("an empty path needs an anchor vertex")
    graph.check_word(dirs, start)
    return EdgePath(start if start is not None else graph.initial(dirs[0]), dirs)


def reduce_path(path: EdgePath) -> EdgePath:
    return EdgePath(path.start, reduce_word(path.dirs))


def crossed_turns(word: Sequence[str]):
    """Yield the turns ``(rev(e_i), e_{i+1})`` crossed by ``word``."""
    for x, y in zip(word, word[1:]):
        yield rev(x), y


@dataclass(frozen=True, eq=False)
class GraphMap:
    """Vertices to vertices, positive edges to nonempty edge paths.

    Images of reversed edges are the reversed images.  Images are kept
    exactly as given, including any backtracking.
    """

    name: str
    source: Graph
    target: Graph
    vmap: Mapping[str, str]
    emap: Mapping[str, tuple]
    _img: dict = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "vmap", dict(self.vmap))
        object.__setattr__(self, "emap", {k: tuple(v) for k, v in self.emap.items()})
        src, tgt = self.source, self.target
        for v in src.vertices:
            if v not in self.vmap:
                raise GraphError(f"map {self.name}: vertex {v} has no image")
            if self.vmap[v] not in tgt.vertices:
                raise GraphError(f"map {self.name}: image {self.vmap[v]} of {v} not in {tgt.name}")
        if set(self.vmap) != set(src.vertices):
            raise GraphError(f"map {self.name}: vertex map has unknown vertices")
        if set(self.emap) != set(src.labels):
            missing = sorted(set(src.labels) - set(self.emap))
            if missing:
                raise GraphError(f"map {self.name}: edge {missing[0]} has no image")
            raise GraphError(f"map {self.name}: image given for unknown edge")
        img = {}
        for lab, u, w in src.edges:
            word = self.emap[lab]
            if not word:
                raise GraphError(f"map {self.name}: contracted edge {lab}")
            tgt.check_word(word)
            if tgt.initial(word[0]) != self.vmap[u] or tgt.terminal(word[-1]) != self.vmap[w]:
                raise GraphError(f"map {self.name}: image of {lab} has wrong endpoints")
            img[lab] = word
            img["~" + lab] = reverse_word(word)
        object.__setattr__(self, "_img", img)

    @classmethod
    def _unchecked(cls, name, source, target, vmap, emap) -> "GraphMap":
        """Build without validation; only for results of operations on valid maps."""
        f = object.__new__(cls)
        img = {}
        for lab, word in emap.items():
            img[lab] = word
            img["~" + lab] = reverse_word(word)
        for k, v in (("name", name), ("source", source), ("target", target), ("vmap", dict(vmap)),
                     ("emap", dict(emap)), ("_img", img)):
            object.__setattr__(f, k, v)
        return f

    def renamed(self, name: str) -> "GraphMap":
        f = object.__new__(type(self))
        for k in ("source", "target", "vmap", "emap", "_img"):
            object.__setattr__(f, k, getattr(self, k))
        object.__setattr__(f, "name", name)
        return f

    @property
    def is_self_map(self) -> bool:
        return self.source == self.target

    def image(self, d: str) -> tuple:
        return self._img[d]

    def apply_word(self, word: Iterable[str]) -> tuple:
        img = self._img
        out: list[str] = []
        for d in word:
            out.extend(img[d])
        return tuple(out)

    def length(self, d: str) -> int:
        return len(self._img[d])

    def __repr__(self) -> str:
        return f"GraphMap({self.name}: {self.source.name} -> {self.target.name})"


def identity_map(graph: Graph, name: str = "id") -> GraphMap:
    return GraphMap(name, graph, graph, {v: v for v in graph.vertices},
                    {lab: (lab,) for lab in graph.labels})


def rose_map(images: Mapping[str, str | Sequence[str]], name: str = "f",
             graph: Graph | None = None) -> GraphMap:
    """Self-map of a rose from ``{"a": "a b", "b": "a"}``."""
    if graph is None:
        graph = Graph.rose(tuple(images), name="R%d" % len(images))
    v = graph.vertices[0]
    emap = {k: parse_word(w) if isinstance(w, str) else tuple(w) for k, w in images.items()}
    return GraphMap(name, graph, graph, {v: v}, emap)


def apply_map(f: GraphMap, path: EdgePath) -> EdgePath:
    if path.start not in f.source.vertices:
        raise GraphError(f"path anchor {path.start} not in {f.source.name}")
    f.source.check_word(path.dirs, path.start)
    return EdgePath(f.vmap[path.start], f.apply_word(path.dirs))


def compose(outer: GraphMap, inner: GraphMap, name: str | None = None) -> GraphMap:
    """``outer ∘ inner``: apply ``inner`` first.  Images stay unreduced."""
    if inner.target != outer.source:
        raise GraphError(f"cannot compose {outer.name} after {inner.name}: graph mismatch")
    return GraphMap._unchecked(
        name or f"{outer.name}.{inner.name}",
        inner.source,
        outer.target,
        {v: outer.vmap[w] for v, w in inner.vmap.items()},
        {lab: outer.apply_word(word) for lab, word in inner.emap.items()},
    )


def power(f: GraphMap, k: int, name: str | None = None) -> GraphMap:
    if not f.is_self_map:
        raise GraphError(f"map {f.name} is not a self-map")
    if k < 0:
        raise ValueError("negative power")
    if k == 1 and name is None:
        return f
    result = identity_map(f.source)
    for _ in range(k):
        result = compose(f, result)
    return result.renamed(name or f"{f.name}^{k}")


def transition_matrix(f: GraphMap) -> np.ndarray:
    """Rows: target edges, columns: source edges, both in declaration order.

    Entries are Python ints (object dtype) so products never overflow.
    """
    rows = {lab: i for i, lab in enumerate(f.target.labels)}
    m = np.zeros((len(rows), len(f.source.labels)), dtype=object)
    m[:] = 0
    for j, lab in enumerate(f.source.labels):
        for d in f.image(lab):
            m[rows[label(d)], j] += 1
    return m


def is_primitive(m) -> bool:
    """Some power ``m**t`` with ``t <= (n-1)**2 + 1`` is entrywise positive."""
    a = np.asarray(m, dtype=object)
    n = a.shape[0]
    if a.shape != (n, n) or n == 0:
        raise ValueError("square nonempty matrix expected")
    b = (a > 0).astype(np.int64)
    p = b.copy()
    for _ in range((n - 1) ** 2 + 1):
        if p.all():
            return True
        p = ((p @ b) > 0).astype(np.int64)
    return False


def is_positive(m) -> bool:
    return bool((np.asarray(m, dtype=object) > 0).all())


def is_expanding(f: GraphMap) -> bool:
    """Every edge has some iterate image of length at least 2.

    Edges with single-edge images form a partial function on labels; an
    edge fails iff its orbit under that function never leaves it.
    """
    if not f.is_self_map:
        raise GraphError(f"map {f.name} is not a self-map")
    step = {lab: label(f.image(lab)[0]) for lab in f.source.labels if f.length(lab) == 1}
    for lab in step:
        seen = set()
        x = lab
        while x in step and x not in seen:
            seen.add(x)
            x = step[x]
        if x in step:
            return False
    return True


def cancellation_bound(f: GraphMap) -> int:
    """Combinatorial volume: total length of the positive edge images."""
    return sum(f.length(lab) for lab in f.source.labels)


def differential(f: GraphMap) -> dict:
    return {d: f.image(d)[0] for d in f.source.directions}


def d2(f: GraphMap, turn: tuple) -> tuple:
    x, y = turn
    return f.image(x)[0], f.image(y)[0]


def vertex_orbit_periodic(f: GraphMap) -> set:
    """The periodic vertices of a self-map."""
    periodic = set()
    for v in f.source.vertices:
        x = f.vmap[v]
        for _ in range(len(f.source.vertices)):
            if x == v:
                periodic.add(v)
                break
            x = f.vmap[x]
    return periodic
