"""Long turns, their images under train track morphisms, and LT_C.

A long turn is an unordered pair of nonempty legal paths from one vertex
with distinct first directions.  Branches are tuples of direction strings;
the pair is stored with ``first < second`` so equal turns compare equal.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Iterator

from .gates import GateStructure, is_legal_word
from .graphs import Graph, GraphError, GraphMap, cancellation_bound, format_word, rev


class LongTurnError(GraphError):
    pass


class BoundViolation(AssertionError):
    """A cancellation or expansion bound turned out not to hold."""


@dataclass(frozen=True, order=True)
class LongTurn:
    first: tuple
    second: tuple

    @classmethod
    def of(cls, p, q) -> "LongTurn":
        p, q = tuple(p), tuple(q)
        if not p or not q:
            raise LongTurnError("long turn branches must be nonempty")
        if p[0] == q[0]:
            raise LongTurnError(f"long turn branches share the first direction {p[0]}")
        return cls(p, q) if p < q else cls(q, p)

    @property
    def branch_length(self) -> int:
        return min(len(self.first), len(self.second))

    @property
    def directions(self) -> tuple:
        return self.first[0], self.second[0]

    def check(self, G: GateStructure) -> None:
        graph = G.graph
        for b in (self.first, self.second):
            graph.check_word(b)
            if not is_legal_word(G, b):
                raise LongTurnError(f"branch {format_word(b)} is not legal")
        if graph.initial(self.first[0]) != graph.initial(self.second[0]):
            raise LongTurnError("branches start at different vertices")

    def path(self) -> tuple:
        """The path ``reverse(first) . second`` crossing the turn."""
        return tuple(rev(d) for d in reversed(self.first)) + self.second

    def __str__(self) -> str:
        return "{" + format_word(self.first) + ", " + format_word(self.second) + "}"


def parse_turn(text: str) -> LongTurn:
    """``"a b|b a"`` (or ``"a.b|b.a"``) -> LongTurn."""
    parts = text.split("|")
    if len(parts) != 2:
        raise LongTurnError(f"turn {text!r} must have two branches separated by '|'")
    p, q = (tuple(x.replace(".", " ").split()) for x in parts)
    return LongTurn.of(p, q)


def lt_is_legal(G: GateStructure, turn: LongTurn) -> bool:
    x, y = turn.directions
    return G.gate_of(x) is not G.gate_of(y)


def common_prefix_length(u, v, start: int = 0) -> int:
    k = start
    n = min(len(u), len(v))
    while k < n and u[k] == v[k]:
        k += 1
    return k


def lt_image_ordered(f: GraphMap, p, q):
    """Ordered image ``(r, s)`` of the long turn ``(p, q)``, or None if degenerate."""
    fp, fq = f.apply_word(p), f.apply_word(q)
    k = common_prefix_length(fp, fq)
    if k == len(fp) or k == len(fq):
        return None
    return fp[k:], fq[k:]


def lt_image(f: GraphMap, turn: LongTurn) -> LongTurn | None:
    """The f-image of a long turn; None when the turn is f-degenerate."""
    image = lt_image_ordered(f, turn.first, turn.second)
    return None if image is None else LongTurn.of(*image)


def lt_truncate(turn: LongTurn, C: int) -> LongTurn:
    if C < 1 or C > turn.branch_length:
        raise LongTurnError(f"cannot truncate {turn} to branch length {C}")
    return LongTurn.of(turn.first[:C], turn.second[:C])


@lru_cache(maxsize=256)
def legal_successors(G: GateStructure) -> dict:
    """Direction -> directions that may follow it on a legal path."""
    graph = G.graph
    succ = {}
    for d in graph.directions:
        g = G.gate_of(rev(d))
        succ[d] = tuple(e for e in graph.outgoing(graph.terminal(d)) if G.gate_of(e) is not g)
    return succ


def extend_legal(G: GateStructure, word: tuple, C: int) -> Iterator[tuple]:
    """All legal extensions of ``word`` to length ``C``, lexicographically."""
    if len(word) >= C:
        yield word[:C]
        return
    succ = legal_successors(G)
    path = list(word)
    iters = [iter(succ[word[-1]])]  # depth-first, one iterator per added edge
    while iters:
        e = next(iters[-1], None)
        if e is None:
            iters.pop()
            if iters:
                path.pop()
            continue
        path.append(e)
        if len(path) == C:
            yield tuple(path)
            path.pop()
        else:
            iters.append(iter(succ[e]))


def enumerate_legal_paths(graph: Graph, G: GateStructure, v: str, C: int) -> list:
    if C < 1:
        raise LongTurnError("path length must be at least 1")
    out = []
    for d in graph.outgoing(v):
        out.extend(extend_legal(G, (d,), C))
    return out


def count_legal_extensions(G: GateStructure, word: tuple, C: int) -> int:
    """Number of legal paths of length ``C`` extending the legal ``word``."""
    if len(word) >= C:
        return 1
    succ = legal_successors(G)
    counts = {word[-1]: 1}
    for _ in range(C - len(word)):
        nxt: dict = {}
        for d, n in counts.items():
            for e in succ[d]:
                nxt[e] = nxt.get(e, 0) + n
        counts = nxt
    return sum(counts.values())


def enumerate_LT_C(graph: Graph, G: GateStructure, C: int, illegal_only: bool = False) -> list:
    turns = []
    for v in graph.vertices:
        paths = enumerate_legal_paths(graph, G, v, C)
        for i, p in enumerate(paths):
            gp = G.gate_of(p[0])
            for q in paths[i + 1:]:
                if q[0] == p[0]:
                    continue
                if illegal_only and G.gate_of(q[0]) is not gp:
                    continue
                turns.append(LongTurn(p, q))
    return turns


def count_LT_C(G: GateStructure, C: int, illegal_only: bool = False) -> int:
    """``card LT_C`` without enumerating it."""
    n = {d: count_legal_extensions(G, (d,), C) for d in G.graph.directions}
    total = 0
    groups = G.gates if illegal_only else [G.graph.outgoing(v) for v in G.graph.vertices]
    for group in groups:
        s = sum(n[d] for d in group)
        total += comb(s, 2) - sum(comb(n[d], 2) for d in group)
    return total


def long_extensions(f: GraphMap, G: GateStructure, p: tuple, q: tuple, limit: int | None = None):
    """Minimal f-long extensions of the ordered turn ``(p, q)``.

    Yields ``(p', q', r, s)`` where ``(p', q')`` extends ``(p, q)``, is
    f-long, and ``(r, s)`` is its ordered image.  A degenerate turn can only
    become long by extending the branch whose image is exhausted, so the
    search branches on that side only; every f-long extension of ``(p, q)``
    contains exactly one of the yielded turns.
    """
    if limit is None:
        limit = cancellation_bound(f) + 1
    succ = legal_successors(G)
    stack = [(p, q, f.apply_word(p), f.apply_word(q), 0)]
    while stack:
        p, q, fp, fq, k = stack.pop()
        k = common_prefix_length(fp, fq, k)
        if k < len(fp) and k < len(fq):
            yield p, q, fp[k:], fq[k:]
            continue
        if len(fp) <= len(fq):
            if len(p) >= limit:
                raise BoundViolation(f"turn ({format_word(p)}, {format_word(q)}) still degenerate at length {limit}")
            for e in reversed(succ[p[-1]]):
                stack.append((p + (e,), q, fp + f.image(e), fq, k))
        else:
            if len(q) >= limit:
                raise BoundViolation(f"turn ({format_word(p)}, {format_word(q)}) still degenerate at length {limit}")
            for e in reversed(succ[q[-1]]):
                stack.append((p, q + (e,), fp, fq + f.image(e), k))


def illegal_direction_pairs(G: GateStructure) -> list:
    pairs = []
    for gate in G.gates:
        ds = sorted(gate)
        for i, x in enumerate(ds):
            for y in ds[i + 1:]:
                pairs.append(((x,), (y,)))
    return pairs


@dataclass(frozen=True)
class TurnCancellation:
    """Largest common image prefix over illegal turns, and the branch length needed."""

    cancellation: int
    depth: int
    minimal_turns: int


def turn_cancellation(f: GraphMap, G: GateStructure) -> TurnCancellation:
    best, depth, count = 0, 1, 0
    for p, q in illegal_direction_pairs(G):
        for p2, q2, r, s in long_extensions(f, G, p, q):
            count += 1
            best = max(best, len(f.apply_word(p2)) - len(r))
            depth = max(depth, len(p2), len(q2))
    return TurnCancellation(best, depth, count)


def min_image_lengths(f: GraphMap, G: GateStructure, k: int) -> int:
    """Minimum of ``|f(w)|`` over legal paths ``w`` of length exactly ``k``."""
    succ = legal_successors(G)
    best = {d: f.length(d) for d in f.source.directions}
    for _ in range(k - 1):
        nxt: dict = {}
        for d, n in best.items():
            for e in succ[d]:
                m = n + f.length(e)
                if m < nxt.get(e, m + 1):
                    nxt[e] = m
        best = nxt
    return min(best.values()) if best else 0


def strong_expansion_constant(f: GraphMap, G: GateStructure, search_bound: int = 8) -> int | None:
    """Least K <= search_bound such that legal paths of length K gain an edge."""
    for k in range(1, search_bound + 1):
        if min_image_lengths(f, G, k) >= k + 1:
            return k
    return None


@dataclass(frozen=True)
class ExpansionProfile:
    K: int | None
    volume: int
    bound: int | None  # max(K, K * volume)
    turn_cancellation: int | None = None
    turn_depth: int | None = None

    @property
    def sharp_bound(self) -> int | None:
        """max(K, K * turn cancellation, depth): sufficient for LT_C to be mapped into itself."""
        if self.K is None or self.turn_cancellation is None:
            return None
        return max(self.K, self.K * self.turn_cancellation, self.turn_depth)


def expansion_profile(f: GraphMap, G: GateStructure, search_bound: int = 8) -> ExpansionProfile:
    K = strong_expansion_constant(f, G, search_bound)
    vol = cancellation_bound(f)
    if K is None:
        return ExpansionProfile(None, vol, None)
    tc = turn_cancellation(f, G)
    return ExpansionProfile(K, vol, max(K, K * vol), tc.cancellation, tc.depth)


class LongTurnMap:
    """The induced self-map of LT_C, ``t -> f^LT(t) truncated to C``."""

    def __init__(self, f: GraphMap, G: GateStructure, C: int, profile: ExpansionProfile | None = None):
        if profile is None:
            profile = expansion_profile(f, G)
        if profile.sharp_bound is None:
            raise LongTurnError(f"map {f.name} is not strongly K-expanding within the search bound")
        if C < profile.sharp_bound:
            raise LongTurnError(f"C = {C} is below the expansion bound {profile.sharp_bound}")
        self.f, self.G, self.C, self.profile = f, G, C, profile
        self._cache: dict = {}

    def ordered(self, p: tuple, q: tuple) -> tuple:
        image = lt_image_ordered(self.f, p, q)
        if image is None:
            raise BoundViolation(f"turn ({format_word(p)}, {format_word(q)}) is f-degenerate at C = {self.C}")
        r, s = image
        if len(r) < self.C or len(s) < self.C:
            raise BoundViolation(f"image of ({format_word(p)}, {format_word(q)}) is shorter than C = {self.C}")
        return r[:self.C], s[:self.C]

    def __call__(self, turn: LongTurn) -> LongTurn:
        hit = self._cache.get(turn)
        if hit is None:
            hit = LongTurn.of(*self.ordered(turn.first, turn.second))
            self._cache[turn] = hit
        return hit

    def table(self, turns=None) -> dict:
        if turns is None:
            turns = enumerate_LT_C(self.f.source, self.G, self.C)
        return {t: self(t) for t in turns}


def lt_map_C(f: GraphMap, G: GateStructure, C: int) -> LongTurnMap:
    return LongTurnMap(f, G, C)
