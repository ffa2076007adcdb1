"""The iwip criterion, the main theorem pipeline, monoids, and the legalizing factory."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .gates import GateStructure, gate_morphism, intrinsic_gates, is_gate_stable, is_train_track_morphism
from .graphs import (Graph, GraphError, GraphMap, compose, identity_map, is_expanding, is_positive,
                     is_primitive, power, transition_matrix, vertex_orbit_periodic)
from .inp import (INPSearch, LegalizingCheck, SearchBudgetExceeded, is_legalizing,
                  legalizing_power, search_periodic_inp)
from .longturns import (BoundViolation, LongTurn, count_legal_extensions, enumerate_LT_C, expansion_profile,
                        extend_legal, illegal_direction_pairs, long_extensions, lt_image_ordered, lt_is_legal)
from .pi1 import is_pi1_automorphism
from .whitehead import IndexReport, gate_index_list, whitehead_graphs

CERTIFIED = "Certified-iwip"
INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""


# -- iwip criterion -------------------------------------------------------------

@dataclass
class IwipReport:
    map_name: str
    checks: list = field(default_factory=list)  # preconditions
    gates: GateStructure | None = None
    primitive: bool | None = None
    whitehead_connected: dict = field(default_factory=dict)
    no_inp: bool | None = None
    search: INPSearch | None = None
    reasons: list = field(default_factory=list)

    @property
    def certified(self) -> bool:
        return not self.reasons

    @property
    def verdict(self) -> str:
        return CERTIFIED if self.certified else INCONCLUSIVE

    @property
    def outcome(self) -> str:
        """Coarse class used by the survey: certified, INP, or other."""
        if self.certified:
            return CERTIFIED
        if self.reasons == ["periodic INP"]:
            return "Inconclusive: INP"
        return "Inconclusive: other"

    @property
    def certificate(self):
        return self.search.certificate if self.search else None


def certify_iwip(f: GraphMap) -> IwipReport:
    """Check primitivity, connected gate-Whitehead graphs and absence of periodic INPs.

    The criterion is sufficient only, so failure is reported as inconclusive.
    """
    report = IwipReport(f.name)
    pre = [Check("self-map", f.is_self_map)]
    if f.is_self_map:
        pre.append(Check("pi1-automorphism", is_pi1_automorphism(f)))
        pre.append(Check("expanding", is_expanding(f)))
    report.checks = pre
    failed = [c.name for c in pre if not c.passed]
    if failed:
        report.reasons = ["not " + failed[0].replace("self-map", "a self-map")
                          .replace("pi1-automorphism", "a pi1-automorphism")]
        return report
    G = intrinsic_gates(f)
    report.gates = G
    tt = is_train_track_morphism(f, G, G)
    report.checks.append(Check("train track", tt))
    if not tt:
        report.reasons = ["not a train track map"]
        return report
    report.primitive = is_primitive(transition_matrix(f))
    if not report.primitive:
        report.reasons.append("M(f) not primitive")
    report.whitehead_connected = {v: w.is_connected() for v, w in whitehead_graphs(f, G).items()}
    for v, ok in report.whitehead_connected.items():
        if not ok:
            report.reasons.append(f"gate-Whitehead graph disconnected at {v}")
    try:
        report.search = search_periodic_inp(f, G)
        report.no_inp = not report.search.found
        if report.search.found:
            report.reasons.append("periodic INP")
    except SearchBudgetExceeded as exc:
        report.reasons.append(f"INP search budget exceeded: {exc}")
    return report


# -- main theorem ---------------------------------------------------------------

@dataclass
class MainTheoremReport:
    f_name: str
    g_name: str
    swapped: bool
    hypotheses: list = field(default_factory=list)
    composite: GraphMap | None = None
    inp_search: INPSearch | None = None
    composite_legalizing: bool | None = None
    gates_preserved: bool | None = None
    iwip: IwipReport | None = None
    index: IndexReport | None = None
    legalizing_witness: LegalizingCheck | None = None

    @property
    def hypotheses_hold(self) -> bool:
        return all(h.passed for h in self.hypotheses)

    @property
    def failures(self) -> list:
        return [h for h in self.hypotheses if not h.passed]

    @property
    def passed(self) -> bool:
        return (self.hypotheses_hold and self.iwip is not None and self.iwip.certified
                and self.inp_search is not None and not self.inp_search.found
                and bool(self.gates_preserved) and self.index is not None and self.index.certified_stable)


def _hypotheses(f: GraphMap, g: GraphMap, swapped: bool, G: GateStructure | None):
    hyps = []
    if not (f.is_self_map and g.is_self_map and f.source == g.source):
        hyps.append(Check("f and g are self-maps of one graph", False))
        return hyps, None, None
    if G is None:
        G = intrinsic_gates(f)
    elif G.graph != f.source:
        hyps.append(Check("G lives on the graph of f", False))
        return hyps, None, None
    hyps.append(Check("f train track for G", is_train_track_morphism(f, G, G)))
    hyps.append(Check("f pi1-automorphism", is_pi1_automorphism(f)))
    hyps.append(Check("M(f) positive", is_positive(transition_matrix(f)),
                      "" if is_positive(transition_matrix(f)) else "M(f) not positive"))
    if swapped:
        gm = gate_morphism(f, G, G)
        hyps.append(Check("f gate structure morphism", gm.defined,
                          "" if gm.defined else "f not a gate structure morphism"))
    periodic = vertex_orbit_periodic(f)
    try:
        wh = whitehead_graphs(f, G)
        bad = [v for v in sorted(periodic) if not wh[v].is_connected()]
        hyps.append(Check("Wh connected at periodic vertices", not bad,
                          "" if not bad else "disconnected at " + ", ".join(bad)))
    except GraphError as exc:
        hyps.append(Check("Wh connected at periodic vertices", False, str(exc)))
    g_tt = is_train_track_morphism(g, G, G)
    hyps.append(Check("g train track for G", g_tt))
    check = None
    if g_tt:
        check = is_legalizing(g, G)
        detail = "" if check.legalizing else f"witness {check.witness} with illegal image {check.witness_image}"
        hyps.append(Check("g legalizing", check.legalizing, detail))
    else:
        hyps.append(Check("g legalizing", False, "g not a train track morphism"))
    hyps.append(Check("g gate-stable", is_gate_stable(g, G)))
    hyps.append(Check("g pi1-automorphism", is_pi1_automorphism(g)))
    return hyps, G, check


def theorem_main(f: GraphMap, g: GraphMap, swapped: bool = False, G: GateStructure | None = None) -> MainTheoremReport:
    """Check the hypotheses, then re-derive every conclusion for f.g (or g.f).

    ``G`` defaults to the intrinsic gate structure of ``f``; a coarser
    structure for which both maps are train track morphisms may be given.
    """
    report = MainTheoremReport(f.name, g.name, swapped)
    report.hypotheses, G, report.legalizing_witness = _hypotheses(f, g, swapped, G)
    if not report.hypotheses_hold:
        return report
    h = compose(g, f) if swapped else compose(f, g)
    report.composite = h
    report.gates_preserved = intrinsic_gates(h).same_partition(G)
    report.composite_legalizing = is_legalizing(h, G).legalizing
    report.inp_search = search_periodic_inp(h, G)
    report.iwip = certify_iwip(h)
    index = gate_index_list(f, G)
    if report.iwip.certified and not report.inp_search.found and report.gates_preserved:
        index = index.certify()
    report.index = index
    return report


def theorem_main_swapped(f: GraphMap, g: GraphMap, G: GateStructure | None = None) -> MainTheoremReport:
    return theorem_main(f, g, swapped=True, G=G)


# -- monoids --------------------------------------------------------------------

class MonoidError(GraphError):
    pass


@dataclass
class Generator:
    map: GraphMap
    conditions: list
    exponent: int | None = None

    @property
    def accepted(self) -> bool:
        return all(c.passed for c in self.conditions) and self.exponent is not None

    @property
    def failed(self) -> str | None:
        for c in self.conditions:
            if not c.passed:
                return c.name
        if self.exponent is None:
            return "no legalizing power within bound"
        return None


@dataclass
class MonoidSetup:
    gates: GateStructure
    generators: list

    @property
    def exponents(self) -> list:
        return [gen.exponent for gen in self.generators]


def monoid_setup(maps: list, G: GateStructure | None = None) -> MonoidSetup:
    if not maps:
        raise MonoidError("no generators")
    if G is None:
        G = intrinsic_gates(maps[0])
    gens = []
    for f in maps:
        tests = [
            ("train track for G", lambda: f.is_self_map and f.source == G.graph and is_train_track_morphism(f, G, G)),
            ("pi1-automorphism", lambda: is_pi1_automorphism(f)),
            ("intrinsic gates equal G", lambda: intrinsic_gates(f).same_partition(G)),
            ("positive matrix", lambda: is_positive(transition_matrix(f))),
            ("connected gate-Whitehead graphs", lambda: all(w.is_connected() for w in whitehead_graphs(f, G).values())),
            ("no periodic INP", lambda: not search_periodic_inp(f, G).found),
            ("gate-stable", lambda: is_gate_stable(f, G)),
        ]
        conds = []
        for cname, test in tests:  # later tests assume the earlier ones passed
            conds.append(Check(cname, bool(test())))
            if not conds[-1].passed:
                break
        gen = Generator(f, conds)
        if all(c.passed for c in conds):
            gen.exponent = legalizing_power(f, G)
        gens.append(gen)
    return MonoidSetup(G, gens)


@dataclass
class MonoidWord:
    word: tuple
    map: GraphMap
    iwip: IwipReport
    index: IndexReport
    legalizing: bool
    gates_preserved: bool

    @property
    def certified(self) -> bool:
        return self.iwip.certified and self.legalizing and self.gates_preserved


def monoid_certify(setup: MonoidSetup, word) -> MonoidWord:
    """Certify the product of generator powers named by ``word`` (1-based, left to right)."""
    word = tuple(int(i) for i in word)
    if not word:
        raise MonoidError("empty word")
    maps = []
    for i in word:
        if not 1 <= i <= len(setup.generators):
            raise MonoidError(f"generator {i} out of range")
        gen = setup.generators[i - 1]
        if not gen.accepted:
            raise MonoidError(f"generator {i} ({gen.map.name}) rejected: {gen.failed}")
        maps.append(power(gen.map, gen.exponent))
    f = maps[0]
    for m in maps[1:]:
        f = compose(f, m)
    G = setup.gates
    iwip = certify_iwip(f)
    gates_ok = iwip.gates is not None and iwip.gates.same_partition(G)
    legal = is_legalizing(f, G).legalizing
    index = gate_index_list(f, G)
    if iwip.certified and gates_ok and legal:
        index = index.certify()
    return MonoidWord(word, f, iwip, index, legal, gates_ok)


# -- legalizing factory -----------------------------------------------------------

class FactoryError(GraphError):
    pass


@dataclass(frozen=True)
class FactoryStep:
    target: LongTurn  # least turn of LT_C^ill(g_k)
    fixed: LongTurn  # branch-length-L subturn of its image, legalized next
    illegal_before: int
    illegal_after: int


@dataclass
class FactoryResult:
    map: GraphMap
    C: int
    L: int
    steps: list
    initial_illegal: int


def illegal_witnesses(g: GraphMap, G: GateStructure) -> list:
    """Minimal g-long illegal turns whose g-image is illegal."""
    out = []
    for p, q in illegal_direction_pairs(G):
        for p2, q2, r, s in long_extensions(g, G, p, q):
            if G.gate_of(r[0]) is G.gate_of(s[0]):
                out.append(LongTurn.of(p2, q2))
    return sorted(out)


def count_illegal_LT(g: GraphMap, G: GateStructure, C: int) -> tuple:
    """``card LT_C^ill(g)`` and its least member, via the witness cylinders."""
    total, least = 0, None
    for w in illegal_witnesses(g, G):
        if w.branch_length > C or max(len(w.first), len(w.second)) > C:
            raise BoundViolation(f"minimal long turn {w} longer than C = {C}")
        total += count_legal_extensions(G, w.first, C) * count_legal_extensions(G, w.second, C)
        first = next(extend_legal(G, w.first, C), None)
        second = next(extend_legal(G, w.second, C), None)
        if first is not None and second is not None:
            t = LongTurn(first, second)
            least = t if least is None else min(least, t)
    return total, least


def check_elementary(g: GraphMap, G: GateStructure, t: LongTurn) -> str | None:
    """Why ``g`` fails to be an elementary legalizer for ``t`` (None if it is one)."""
    if not (g.is_self_map and g.source == G.graph):
        return "not a self-map of the graph"
    if not is_train_track_morphism(g, G, G):
        return "not a train track morphism"
    image = lt_image_ordered(g, t.first, t.second)
    if image is None:
        return f"turn {t} is not long"
    if G.gate_of(image[0][0]) is G.gate_of(image[1][0]):
        return f"image of {t} is illegal"
    return None


def legalizing_factory(elementary: dict, expander: GraphMap, G: GateStructure, max_steps: int = 10_000,
                       name: str = "g") -> FactoryResult:
    """Compose elementary legalizers (after the expander) until the result is legalizing."""
    if not elementary:
        if count_illegal_LT(identity_map(G.graph), G, 1)[0] == 0:
            return FactoryResult(identity_map(G.graph, name), 1, 1, [], 0)
        raise FactoryError("no elementary legalizers given")
    lengths = {t.branch_length for t in elementary} | {max(len(t.first), len(t.second)) for t in elementary}
    if len(lengths) != 1:
        raise FactoryError("elementary legalizers must all have one branch length L")
    (L,) = lengths
    for t in enumerate_LT_C(G.graph, G, L, illegal_only=True):
        if t not in elementary:
            raise FactoryError(f"missing elementary legalizer for turn {t}")
    for t, g in elementary.items():
        why = check_elementary(g, G, t)
        if why:
            raise FactoryError(f"legalizer {g.name} for {t}: {why}")
    if not is_train_track_morphism(expander, G, G):
        raise FactoryError(f"expander {expander.name} is not a train track morphism")
    if expansion_profile(expander, G).K is None:
        raise FactoryError(f"expander {expander.name} is not strongly expanding within the search bound")
    composites = {t: compose(expander, g) for t, g in elementary.items()}
    C = L
    for gp in composites.values():
        prof = expansion_profile(gp, G)
        if prof.sharp_bound is None:
            raise FactoryError(f"{gp.name} is not strongly expanding within the search bound")
        C = max(C, prof.sharp_bound)
    current = identity_map(G.graph)
    count, least = count_illegal_LT(current, G, C)
    initial, steps = count, []
    while count:
        if len(steps) >= max_steps:
            raise SearchBudgetExceeded(f"factory did not finish in {max_steps} steps")
        image = lt_image_ordered(current, least.first, least.second)
        assert image is not None and min(map(len, image)) >= L
        t = LongTurn.of(image[0][:L], image[1][:L])
        assert not lt_is_legal(G, t)
        current = compose(composites[t], current)
        new_count, new_least = count_illegal_LT(current, G, C)
        if new_count >= count:
            raise AssertionError(f"illegal turn count did not decrease: {count} -> {new_count}")
        steps.append(FactoryStep(least, t, count, new_count))
        count, least = new_count, new_least
    g = current.renamed(name)
    assert is_legalizing(g, G).legalizing
    return FactoryResult(g, C, L, steps, initial)


# -- bounded search for elementary legalizers -------------------------------------

def _legal_loops(graph: Graph, G: GateStructure, u: str, w: str, max_len: int) -> list:
    """Legal words from ``u`` to ``w`` of length at most ``max_len``."""
    out = []
    for n in range(1, max_len + 1):
        for d in graph.outgoing(u):
            for word in extend_legal(G, (d,), n):
                if graph.terminal(word[-1]) == w:
                    out.append(word)
    return out


def candidate_maps(G: GateStructure, max_len: int = 4, gate_stable: bool = True):
    """Train track self-maps fixing vertices, with edge images of length at most ``max_len``.

    With ``gate_stable`` the first and last letters of each image are
    restricted so that every gate is fixed, which prunes most candidates.
    """
    graph = G.graph
    choices = []
    for lab, u, w in graph.edges:
        words = _legal_loops(graph, G, u, w, max_len)
        if gate_stable:
            words = [x for x in words if x[0] in G.gate_of(lab) and
                     (x[-1][1:] if x[-1][0] == "~" else "~" + x[-1]) in G.gate_of("~" + lab)]
        choices.append(words)
    labels = graph.labels
    vmap = {v: v for v in graph.vertices}
    for combo in itertools.product(*choices):
        emap = dict(zip(labels, combo))
        try:
            g = GraphMap("g", graph, graph, vmap, emap)
        except GraphError:
            continue
        if is_train_track_morphism(g, G, G) and (not gate_stable or is_gate_stable(g, G)):
            yield g


def search_elementary_legalizers(G: GateStructure, L: int, max_len: int = 4, gate_stable: bool = True,
                                 automorphism: bool = True) -> tuple:
    """For each illegal turn of branch length L, the first candidate map legalizing it.

    Returns ``(found, missing)``; the search is exhaustive up to ``max_len``.
    """
    turns = enumerate_LT_C(G.graph, G, L, illegal_only=True)
    found: dict = {}
    for g in candidate_maps(G, max_len, gate_stable):
        open_turns = [t for t in turns if t not in found and check_elementary(g, G, t) is None]
        if not open_turns:
            continue
        if automorphism and not is_pi1_automorphism(g):
            continue
        named = g.renamed(f"e{len(set(map(id, found.values()))) + 1}")
        for t in open_turns:
            found[t] = named
        if len(found) == len(turns):
            break
    missing = [t for t in turns if t not in found]
    return found, missing
