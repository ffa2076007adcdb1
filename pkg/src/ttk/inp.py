"""Periodic INPs and legalizing maps.

Periodic illegal long turns are searched level by level.  At branch length
``c`` every illegal turn gets as successors all length-``c`` turns
compatible with the image of its minimal f-long extensions.  This relation
contains the projection of the true LT_C dynamics for every large C, so a
turn not on a cycle at level ``c`` has no periodic extension; only
extensions of cyclic turns are carried to level ``c + 1``.  A cycle made of
exact edges (turn already f-long, image branches at least ``c``) is a
genuine periodic turn and yields a certificate; once ``c`` reaches the
expansion bound every edge is exact, so the search always ends.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import networkx as nx

from .gates import GateStructure, illegal_turns_in, intrinsic_gates, is_legal_word, is_train_track_morphism
from .graphs import (GraphError, GraphMap, cancellation_bound, format_word, is_expanding, label, power,
                     reduce_word, reverse_word)
from .longturns import (BoundViolation, ExpansionProfile, LongTurn, LongTurnMap, count_LT_C, enumerate_LT_C,
                        expansion_profile, extend_legal, illegal_direction_pairs, legal_successors,
                        long_extensions, lt_image_ordered)

DEFAULT_BUDGET = 1 << 20


class InpError(GraphError):
    pass


class NotExpanding(InpError):
    pass


class SearchBudgetExceeded(RuntimeError):
    pass


# -- certificates -------------------------------------------------------------

@dataclass(frozen=True)
class INPCertificate:
    turn: LongTurn
    branches: tuple  # ordered (alpha-side, beta-side) branches of the periodic turn
    period: int  # of the unordered turn, under the map the search ran on
    ordered_period: int
    power: int  # the search ran on map**power
    map_period: int  # [f^map_period(eta)] = eta for the original map
    eta: tuple
    endpoints: tuple  # ((direction, offset), (direction, offset)) on each branch
    positions: tuple  # fixed points as distances from the turn's vertex
    transcript: tuple
    verified: bool

    @property
    def endpoints_are_vertices(self) -> bool:
        return all(x.denominator == 1 for x in self.positions)


def _fixed_point(h: GraphMap, branch: tuple, stripped: int, log: list, side: str) -> Fraction:
    """Least positive fixed point of the piecewise-linear branch map.

    Edge ``i`` of the branch maps affinely onto its image, which starts at
    ``offset - stripped`` along the stripped image path.
    """
    offset = -stripped
    for i, d in enumerate(branch):
        n = h.length(d)
        if n == 1:
            if offset == i and i > 0:
                log.append(f"{side}: edge {i + 1} ({d}) is fixed pointwise; take x = {i}")
                return Fraction(i)
        else:
            x = Fraction(i * n - offset, n - 1)
            if i <= x <= i + 1 and x > 0:
                log.append(f"{side}: on edge {i + 1} ({d}), {offset} + (x - {i}) * {n} = x gives x = {x}")
                return x
        offset += n
    raise InpError(f"no positive fixed point on branch {format_word(branch)}")


def _evaluate(h: GraphMap, branch: tuple, stripped: int, x: Fraction) -> Fraction:
    i = min(int(math.floor(x)), len(branch) - 1)
    before = sum(h.length(d) for d in branch[:i])
    return before - stripped + (x - i) * h.length(branch[i])


def _endpoint(branch: tuple, x: Fraction) -> tuple:
    k = int(math.floor(x))
    if x == k:
        return branch[k - 1], Fraction(1)
    return branch[k], x - k


def _covered(branch: tuple, x: Fraction) -> tuple:
    return branch[:int(math.ceil(x))]


def extract_inp(f: GraphMap, turn: LongTurn, period: int, *, root: GraphMap | None = None,
                map_power: int = 1) -> INPCertificate:
    """Periodic INP inside a periodic illegal long turn.

    ``period`` is the period of the unordered turn; if the branches come
    back swapped, the ordered period ``2 * period`` is used.  When ``f`` is
    ``root**map_power``, the reported map period refers to ``root``.
    """
    p, q = turn.first, turn.second
    ordered = period
    h = power(f, period)
    image = lt_image_ordered(h, p, q)
    if image is None:
        raise InpError(f"turn {turn} is degenerate under {h.name}")
    r, s = image
    if not (r[:len(p)] == p and s[:len(q)] == q):
        if r[:len(q)] == q and s[:len(p)] == p:
            ordered = 2 * period
            h = power(f, ordered)
            image = lt_image_ordered(h, p, q)
            r, s = image
        if image is None or not (r[:len(p)] == p and s[:len(q)] == q):
            raise InpError(f"turn {turn} is not periodic with period {period}")
    stripped = len(h.apply_word(p)) - len(r)
    if stripped == 0:
        raise InpError(f"no positive fixed point: {h.name} strips nothing from {turn}")
    log = [f"map {h.name} strips a common prefix of length {stripped}"]
    x = _fixed_point(h, p, stripped, log, "first branch")
    y = _fixed_point(h, q, stripped, log, "second branch")
    for branch, z in ((p, x), (q, y)):
        assert _evaluate(h, branch, stripped, z) == z
    alpha, beta = _covered(p, x), _covered(q, y)
    eta = reverse_word(alpha) + beta
    verified = True
    map_period = map_power * ordered
    if x.denominator == 1 and y.denominator == 1:
        verified = reduce_word(h.apply_word(eta)) == eta
        log.append(f"[{h.name}(eta)] = eta checked by free reduction: {verified}")
        if root is not None and map_power > 1:
            map_period = _least_period(root, eta, map_period)
    else:
        log.append("endpoints inside edges: fixed-point equations verified exactly")
    return INPCertificate(turn, (p, q), period, ordered, map_power, map_period, eta,
                          (_endpoint(p, x), _endpoint(q, y)), (x, y), tuple(log), verified)


def _least_period(f: GraphMap, eta: tuple, bound: int) -> int:
    for d in range(1, bound + 1):
        if bound % d == 0 and reduce_word(power(f, d).apply_word(eta)) == eta:
            return d
    return bound


def verify_certificate(f: GraphMap, G: GateStructure, cert: INPCertificate) -> bool:
    """Independent check: eta reduced, one illegal turn, legal branches, and periodic."""
    eta = cert.eta
    if reduce_word(eta) != eta:
        return False
    p, q = cert.branches
    if not (is_legal_word(G, p) and is_legal_word(G, q)):
        return False
    if illegal_turns_in(G, eta) != 1:
        return False
    if cert.endpoints_are_vertices:
        return reduce_word(power(f, cert.map_period).apply_word(eta)) == eta
    return cert.verified


# -- the level-by-level search --------------------------------------------------

@dataclass(frozen=True)
class LevelStats:
    level: int
    candidates: int
    cyclic: int
    exact_cycles: int


@dataclass
class INPSearch:
    map_name: str
    power: int
    K: int | None
    bound: int | None  # max(K, K * volume) for the searched power
    sharp_bound: int | None
    levels: list = field(default_factory=list)
    periodic: list = field(default_factory=list)  # (turn, period) on exact cycles at the last level
    certificate: INPCertificate | None = None

    @property
    def found(self) -> bool:
        return self.certificate is not None

    def transcript(self) -> list:
        lines = [f"searched {self.map_name}^{self.power}; K = {self.K}, bound = {self.bound}, "
                 f"sharp bound = {self.sharp_bound}"]
        for s in self.levels:
            lines.append(f"level {s.level}: {s.candidates} illegal candidates, {s.cyclic} on cycles, "
                         f"{s.exact_cycles} exact cycles")
        if self.certificate is None:
            lines.append("no cyclic illegal turn survives: no periodic INP")
        return lines


class _Search:
    def __init__(self, h: GraphMap, G: GateStructure, budget: int):
        self.h, self.G, self.budget = h, G, budget
        self.limit = cancellation_bound(h) + 1
        self.succ = legal_successors(G)

    def level(self, c: int, candidates: set):
        gate_of = self.G.gate_of
        edges: dict = {t: set() for t in candidates}
        exact: dict = {}
        for t in sorted(candidates):
            p, q = t.first, t.second
            for p2, q2, r, s in long_extensions(self.h, self.G, p, q, self.limit):
                if gate_of(r[0]) is not gate_of(s[0]):
                    continue
                if p2 == p and q2 == q and len(r) >= c and len(s) >= c:
                    u = LongTurn.of(r[:c], s[:c])
                    if u in candidates:
                        edges[t].add(u)
                        exact[t] = u
                    continue
                for r2 in extend_legal(self.G, r, c):
                    for s2 in extend_legal(self.G, s, c):
                        u = LongTurn.of(r2, s2)
                        if u in candidates:
                            edges[t].add(u)
        return edges, exact

    @staticmethod
    def cyclic_nodes(edges: dict) -> set:
        g = nx.DiGraph()
        g.add_nodes_from(edges)
        g.add_edges_from((a, b) for a, bs in edges.items() for b in bs)
        nodes = set()
        for comp in nx.strongly_connected_components(g):
            if len(comp) > 1:
                nodes |= comp
            else:
                (x,) = comp
                if x in edges[x]:
                    nodes.add(x)
        return nodes

    @staticmethod
    def exact_cycles(exact: dict) -> list:
        """Cycles of the partial function ``exact``, each rotated to start at its least turn."""
        state: dict = {}
        cycles = []
        for start in sorted(exact):
            path = []
            x = start
            while x in exact and x not in state:
                state[x] = start
                path.append(x)
                x = exact[x]
            if x in state and state[x] == start and x in exact:
                cyc = path[path.index(x):]
                cycles.append((min(cyc), len(cyc)))
        return sorted(cycles)

    def extend(self, nodes: set) -> set:
        out = set()
        for t in nodes:
            for e in self.succ[t.first[-1]]:
                for e2 in self.succ[t.second[-1]]:
                    out.add(LongTurn(t.first + (e,), t.second + (e2,)))
        return out

    def run(self, max_level: int, stop_at_exact: bool = True):
        candidates = {LongTurn.of(p, q) for p, q in illegal_direction_pairs(self.G)}
        stats = []
        c = 1
        while True:
            if len(candidates) > self.budget:
                raise SearchBudgetExceeded(f"{len(candidates)} candidate turns at level {c}")
            edges, exact = self.level(c, candidates)
            cyclic = self.cyclic_nodes(edges)
            cycles = self.exact_cycles(exact)
            stats.append(LevelStats(c, len(candidates), len(cyclic), len(cycles)))
            if not cyclic:
                return stats, []
            if (cycles and stop_at_exact) or c >= max_level:
                if c >= max_level and len(cycles) == 0:
                    raise BoundViolation(f"cyclic turns without exact cycles at level {c}")
                return stats, cycles
            candidates = self.extend(cyclic)
            c += 1


def strongly_expanding_power(f: GraphMap) -> int:
    """Least p with every ``|f^p(e)| >= 2``; that power is strongly 1-expanding."""
    if not is_expanding(f):
        raise NotExpanding(f"map {f.name} is not expanding")
    lengths = {lab: 1 for lab in f.source.labels}
    for p in range(1, len(f.source.labels) + 2):
        lengths = {lab: sum(lengths[label(d)] for d in f.image(lab)) for lab in f.source.labels}
        if min(lengths.values()) >= 2:
            return p
    raise AssertionError("expanding map without a strongly 1-expanding power")


def _prepare(f: GraphMap, G: GateStructure | None):
    if not f.is_self_map:
        raise InpError(f"map {f.name} is not a self-map")
    if G is None:
        G = intrinsic_gates(f)
    if not is_train_track_morphism(f, G, G):
        raise InpError(f"map {f.name} is not a train track morphism for {G.name}")
    p = strongly_expanding_power(f)
    h = power(f, p)
    profile = expansion_profile(h, G)
    assert profile.K == 1
    return G, p, h, profile


def search_periodic_inp(f: GraphMap, G: GateStructure | None = None, budget: int = DEFAULT_BUDGET) -> INPSearch:
    G, p, h, profile = _prepare(f, G)
    report = INPSearch(f.name, p, profile.K, profile.bound, profile.sharp_bound)
    stats, cycles = _Search(h, G, budget).run(profile.sharp_bound)
    report.levels = stats
    report.periodic = cycles
    if cycles:
        turn, period = cycles[0]
        report.certificate = extract_inp(h, turn, period, root=f, map_power=p)
    return report


def has_periodic_inp(f: GraphMap, G: GateStructure | None = None, budget: int = DEFAULT_BUDGET):
    return search_periodic_inp(f, G, budget).certificate


def periodic_illegal_turns(f: GraphMap, G: GateStructure, C: int, profile: ExpansionProfile | None = None,
                           budget: int = DEFAULT_BUDGET) -> list:
    """Illegal turns of LT_C on cycles of the induced map, with their periods."""
    ltmap = LongTurnMap(f, G, C, profile)
    stats, _ = _Search(f, G, budget).run(C, stop_at_exact=False)
    if stats[-1].cyclic == 0:
        return []
    # rerun the last level's candidates through the exact map at level C
    search = _Search(f, G, budget)
    candidates = {LongTurn.of(p, q) for p, q in illegal_direction_pairs(G)}
    for c in range(1, C):
        edges, _ = search.level(c, candidates)
        candidates = search.extend(search.cyclic_nodes(edges))
    return _cycles_of(ltmap, candidates)


def periodic_illegal_turns_bruteforce(f: GraphMap, G: GateStructure, C: int) -> list:
    ltmap = LongTurnMap(f, G, C)
    return _cycles_of(ltmap, set(enumerate_LT_C(f.source, G, C, illegal_only=True)))


def _cycles_of(ltmap: LongTurnMap, domain: set) -> list:
    table = {}
    for t in domain:
        u = ltmap(t)
        if u in domain:
            table[t] = u
    out = []
    on_cycle: set = set()
    for start in sorted(table):
        seen = []
        x = start
        for _ in range(len(table) + 1):
            if x not in table or x in on_cycle:
                break
            seen.append(x)
            x = table[x]
            if x == start:
                for y in seen:
                    on_cycle.add(y)
                break
    for t in sorted(on_cycle):
        n, x = 1, table[t]
        while x != t:
            n, x = n + 1, table[x]
        out.append((t, n))
    return out


# -- legalizing -----------------------------------------------------------------

@dataclass(frozen=True)
class LegalizingCheck:
    legalizing: bool
    witness: LongTurn | None = None
    witness_image: LongTurn | None = None
    padded_witness: LongTurn | None = None
    examined: int = 0

    def __bool__(self) -> bool:
        return self.legalizing


def is_legalizing(f: GraphMap, G: GateStructure, G_target: GateStructure | None = None) -> LegalizingCheck:
    """Every illegal f-long turn has a legal f-image.

    Only minimal f-long illegal turns are examined: the legality of an
    image is shared by all f-long turns containing the same minimal one.
    """
    Gt = G_target or G
    examined = 0
    for p, q in illegal_direction_pairs(G):
        for p2, q2, r, s in long_extensions(f, G, p, q):
            examined += 1
            if Gt.gate_of(r[0]) is Gt.gate_of(s[0]):
                witness = LongTurn.of(p2, q2)
                n = cancellation_bound(f) + 1
                padded = None
                try:
                    padded = LongTurn.of(next(extend_legal(G, p2, n)), next(extend_legal(G, q2, n)))
                except StopIteration:
                    pass
                return LegalizingCheck(False, witness, LongTurn.of(r, s), padded, examined)
    return LegalizingCheck(True, examined=examined)


def legalizing_power(f: GraphMap, G: GateStructure | None = None, max_power: int | None = None,
                     max_volume: int = 2_000_000) -> int | None:
    """Least k with f^k legalizing, or None (periodic INP, or beyond ``max_power``).

    Legalizing powers are upward closed (a legalizing factor makes the
    product legalizing), so doubling then bisection finds the least one.
    """
    G, p, h, profile = _prepare(f, G)
    if _Search(h, G, DEFAULT_BUDGET).run(profile.sharp_bound)[1]:
        return None
    if max_power is None:
        max_power = count_LT_C(G, profile.sharp_bound)
    powers = {1: f}

    def get(k: int) -> GraphMap:
        if k not in powers:
            g = power(f, k)
            if cancellation_bound(g) > max_volume:
                raise SearchBudgetExceeded(f"{f.name}^{k} has volume above {max_volume}")
            powers[k] = g
        return powers[k]

    hi = 1
    while not is_legalizing(get(hi), G):
        if hi >= max_power:
            return None
        hi = min(2 * hi, max_power)
    lo = hi // 2  # not legalizing (or 0)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if is_legalizing(get(mid), G):
            hi = mid
        else:
            lo = mid
    return hi
