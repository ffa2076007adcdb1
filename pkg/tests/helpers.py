"""Shared fixtures for the test modules."""

from __future__ import annotations

import itertools
import random
from functools import lru_cache
from pathlib import Path

from ttk.fileformat import parse_file
from ttk.graphs import Graph, GraphMap, identity_map, reduce_word, rev, rose_map
from ttk.survey import random_samples

DATA = Path(__file__).parent / "data"
CANONICAL = ["fib", "tri", "tri2", "quad", "collapse", "theta", "barbell", "rose4", "composed", "sample3"]
FACTORY = ["tri", "tri2", "quad"]


@lru_cache(maxsize=None)
def load(name: str):
    return parse_file(DATA / f"{name}.tt")


def fib():
    d = load("fib")
    return d.graph("R2"), d.map("F"), d.map("F2"), d.map("P")


def fib_gates():
    d = load("fib")
    return d.gate_structure("GF"), d.gate_structure("Gpm"), d.gate_structure("G1")


def factory_fixture(name: str):
    """(f, g, G, legalizers) for one of the rank-3 factory files."""
    d = load(name)
    legalizers = [d.maps[n] for k, n in d.order if k == "map" and n.startswith("e")]
    return d.map("f"), d.map("g"), d.gate_structure("GT"), legalizers


def words(graph: Graph, max_len: int, start: str | None = None):
    """Every edge path of length 1..max_len (backtracking allowed)."""
    for n in range(1, max_len + 1):
        for w in itertools.product(graph.directions, repeat=n):
            if start is not None and graph.initial(w[0]) != start:
                continue
            if all(graph.terminal(x) == graph.initial(y) for x, y in zip(w, w[1:])):
                yield w


def leftmost_reduce(word) -> tuple:
    """Normal form by repeatedly deleting the leftmost cancelling pair."""
    w = list(word)
    while True:
        for i in range(len(w) - 1):
            if w[i + 1] == rev(w[i]):
                del w[i:i + 2]
                break
        else:
            return tuple(w)


def random_path(graph: Graph, rng: random.Random, start: str, end: str, max_len: int):
    """A random (possibly unreduced) nonempty path from start to end, by rejection."""
    for _ in range(1000):
        n = rng.randint(1, max_len)
        w, v = [], start
        for _ in range(n):
            d = rng.choice(graph.outgoing(v))
            w.append(d)
            v = graph.terminal(d)
        if v == end:
            return tuple(w)
    raise RuntimeError("no path found")


def random_map(source: Graph, target: Graph, rng: random.Random, max_len: int = 4, name: str = "r") -> GraphMap:
    vmap = {v: rng.choice(target.vertices) for v in source.vertices}
    emap = {lab: random_path(target, rng, vmap[u], vmap[w], max_len) for lab, u, w in source.edges}
    return GraphMap(name, source, target, vmap, emap)


def random_graphs():
    return [Graph.rose(("a", "b"), "R2"), Graph.rose(("a", "b", "c"), "R3"),
            load("theta").graph("Theta"), load("barbell").graph("Bar")]


@lru_cache(maxsize=None)
def dichotomy_fixtures() -> tuple:
    """Seeded expanding automorphisms: random positive ones plus the factory files."""
    maps = [s.map for r in (2, 3) for s in random_samples(r, 12, 11)]
    _, F, F2, _ = fib()
    maps += [F, F2]
    for name in FACTORY:
        f, g, _, _ = factory_fixture(name)
        maps += [f, g]
    return tuple(maps)


def train_track_pairs():
    """(f, g, G) with f and g train track maps for G on one graph."""
    R2, F, F2, P = fib()
    GF, Gpm, _ = fib_gates()
    ident = identity_map(R2)
    pairs = [(F, F, GF), (F, F2, GF), (F2, F, GF), (F2, F2, GF), (F, ident, GF),
             (F, F2, Gpm), (F2, P, Gpm), (P, F, Gpm), (F, P, Gpm)]
    # small positive maps are train track for the sign structure
    pos = [rose_map({"a": "a b b", "b": "b a"}, "q1", R2), rose_map({"a": "b a", "b": "b a a b"}, "q2", R2),
           rose_map({"a": "a", "b": "b a b"}, "q3", R2)]
    pairs += [(a, b, Gpm) for a in pos for b in pos]
    for name in FACTORY:
        f, g, G, legal = factory_fixture(name)
        pairs += [(f, g, G), (g, f, G)] + [(f, e, G) for e in legal]
    return pairs


def gate_stable_pairs():
    """(f, g, G) with G = intrinsic gates of f and g gate-stable, pi1-automorphism, train track."""
    R2, F, F2, _ = fib()
    GF, _, _ = fib_gates()
    pairs = [(F, F2, GF), (F2, F2, GF), (F, identity_map(R2), GF), (F2, identity_map(R2), GF)]
    for name in FACTORY:
        f, g, G, legal = factory_fixture(name)
        pairs += [(f, g, G), (f, identity_map(G.graph), G)] + [(f, e, G) for e in legal]
    return pairs


def reduced(word) -> tuple:
    return reduce_word(word)
