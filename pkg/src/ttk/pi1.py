"""Does a graph self-map induce an automorphism of the fundamental group?

The marking uses a breadth-first spanning tree rooted at the least vertex;
each non-tree edge gives one basis loop.  A word list is decided to be a
basis by Stallings folding: ``N`` words generate ``F_N`` iff the folded
graph of the wedge of their loops is the one-vertex rose, and generating
sets of size ``N`` are bases because free groups are hopfian.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .graphs import EdgePath, Graph, GraphError, GraphMap, label, reduce_word, rev


@dataclass(frozen=True)
class MarkedBasis:
    graph: Graph
    base: str
    tree: frozenset
    loops: tuple  # (letter, EdgePath) per non-tree edge

    @property
    def letters(self) -> tuple:
        return tuple(lab for lab, _ in self.loops)

    def word_of(self, dirs: Sequence[str]) -> tuple:
        """Rewrite a closed path (or any path) as a reduced word in the basis letters."""
        return reduce_word(d for d in dirs if label(d) not in self.tree)


def marked_basis(graph: Graph) -> MarkedBasis:
    base = min(graph.vertices)
    parent: dict[str, str | None] = {base: None}  # vertex -> direction used to reach it
    todo = deque([base])
    while todo:
        v = todo.popleft()
        for d in graph.outgoing(v):
            w = graph.terminal(d)
            if w not in parent:
                parent[w] = d
                todo.append(w)
    tree = frozenset(label(d) for d in parent.values() if d is not None)

    def to_vertex(v: str) -> tuple:
        path = []
        while parent[v] is not None:
            path.append(parent[v])
            v = graph.initial(parent[v])
        return tuple(reversed(path))

    loops = []
    for lab, u, w in graph.edges:
        if lab in tree:
            continue
        there = to_vertex(u)
        back = tuple(rev(d) for d in reversed(to_vertex(w)))
        loops.append((lab, EdgePath(base, reduce_word(there + (lab,) + back))))
    basis = MarkedBasis(graph, base, tree, tuple(loops))
    assert len(basis.loops) == graph.rank
    return basis


def induced_endomorphism(f: GraphMap, basis: MarkedBasis | None = None) -> tuple:
    """Images of the basis loops, as reduced words in the basis letters."""
    if not f.is_self_map:
        raise GraphError(f"map {f.name} is not a self-map")
    if basis is None:
        basis = marked_basis(f.source)
    if basis.graph != f.source:
        raise GraphError("basis belongs to another graph")
    # tree paths carry no letters, so conjugating f(loop) back to the base changes nothing
    return tuple(basis.word_of(f.apply_word(loop.dirs)) for _, loop in basis.loops)


class _Folding:
    def __init__(self):
        self.parent: list[int] = []
        self.out: list[dict] = []  # vertex -> {(letter, +-1): vertex}

    def new(self) -> int:
        self.parent.append(len(self.parent))
        self.out.append({})
        return len(self.parent) - 1

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def add_edge(self, u: int, letter: str, w: int, pending: list) -> None:
        for a, key, b in ((u, (letter, 1), w), (w, (letter, -1), u)):
            a = self.find(a)
            other = self.out[a].get(key)
            if other is None:
                self.out[a][key] = b
            else:
                pending.append((other, b))

    def merge(self, x: int, y: int, pending: list) -> None:
        x, y = self.find(x), self.find(y)
        if x == y:
            return
        if len(self.out[x]) < len(self.out[y]):
            x, y = y, x
        self.parent[y] = x
        for key, b in self.out[y].items():
            other = self.out[x].get(key)
            if other is None:
                self.out[x][key] = b
            else:
                pending.append((other, b))
        self.out[y] = {}


def is_automorphism(words: Sequence[Sequence[str]], rank: int,
                    alphabet: Sequence[str] | None = None) -> bool:
    """Do ``words`` form a basis of the free group of the given rank?"""
    words = [reduce_word(w) for w in words]
    letters = set(label(d) for w in words for d in w)
    if alphabet is not None:
        if len(alphabet) != rank or not letters <= set(alphabet):
            raise ValueError("words use letters outside the alphabet")
    elif len(letters) > rank:
        raise ValueError("more letters than the rank")
    if len(words) != rank or len(letters) < rank:
        return False
    fold = _Folding()
    base = fold.new()
    pending: list = []
    for w in words:
        if not w:
            return False
        at = base
        for i, d in enumerate(w):
            nxt = base if i == len(w) - 1 else fold.new()
            if d[0] == "~":
                fold.add_edge(nxt, label(d), at, pending)
            else:
                fold.add_edge(at, d, nxt, pending)
            while pending:
                fold.merge(*pending.pop(), pending)
            at = nxt
    # after folding, H = F_N iff base carries every letter in both directions as loops
    b = fold.find(base)
    for lab in letters:
        for sign in (1, -1):
            w = fold.out[b].get((lab, sign))
            if w is None or fold.find(w) != b:
                return False
    return True


def abelianization(words: Sequence[Sequence[str]], alphabet: Sequence[str]) -> np.ndarray:
    idx = {a: i for i, a in enumerate(alphabet)}
    m = np.zeros((len(alphabet), len(words)), dtype=object)
    m[:] = 0
    for j, w in enumerate(words):
        for d in w:
            m[idx[label(d)], j] += -1 if d[0] == "~" else 1
    return m


def integer_det(m) -> int:
    """Exact determinant by fraction-free elimination (Bareiss)."""
    a = [[int(x) for x in row] for row in np.asarray(m, dtype=object)]
    n = len(a)
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1] if n else 1


def is_pi1_automorphism(f: GraphMap) -> bool:
    basis = marked_basis(f.source)
    return is_automorphism(induced_endomorphism(f, basis), f.source.rank, basis.letters)
