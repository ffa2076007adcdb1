"""Acceptance criteria 1-10.

Each test records one ``criterion N: PASS|FAIL ...`` line; the lines are
printed as they happen and repeated in the terminal summary (see
conftest.py).  Run ``python3 tests/test_acceptance.py`` to print them
without pytest.
"""

from __future__ import annotations

import io
import itertools
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent))

from helpers import (CANONICAL, DATA, FACTORY, dichotomy_fixtures, factory_fixture, fib, fib_gates,  # noqa: E402
                     gate_stable_pairs, leftmost_reduce, load, random_graphs, random_map, train_track_pairs, words)
from ttk.certify import legalizing_factory, search_elementary_legalizers, theorem_main  # noqa: E402
from ttk.cli import run  # noqa: E402
from ttk.fileformat import parse, serialize  # noqa: E402
from ttk.gates import intrinsic_gates, is_gate_stable, is_train_track_morphism  # noqa: E402
from ttk.graphs import EdgePath, compose, identity_map, is_primitive, reduce_path, rev, transition_matrix  # noqa: E402
from ttk.inp import _prepare, has_periodic_inp, is_legalizing, search_periodic_inp, verify_certificate  # noqa: E402
from ttk.longturns import LongTurn, count_LT_C, enumerate_legal_paths, lt_image  # noqa: E402
from ttk.survey import format_histogram, survey  # noqa: E402
from ttk.whitehead import gate_turn_closure, gate_whitehead_graph, whitehead_graphs  # noqa: E402

RESULTS: dict = {}


def record(n: int, passed: bool, detail: str) -> None:
    line = f"criterion {n}: {'PASS' if passed else 'FAIL'}  {detail}"
    RESULTS[n] = line
    print(line)
    assert passed, line


def mat(rows):
    return np.array(rows, dtype=object)


# -- 1 -----------------------------------------------------------------------------

def test_criterion_1_fibonacci_inp():
    R2, F, F2, _ = fib()
    t0 = time.perf_counter()
    out = io.StringIO()
    code = run(["inp", str(DATA / "fib.tt"), "--map", "F"], out)
    cert = search_periodic_inp(F).certificate
    elapsed = time.perf_counter() - t0
    eta = ("~b", "~a", "b", "a")
    # independent oracle: apply F twice letter by letter, then leftmost cancellation
    image = eta
    for _ in range(2):
        image = tuple(x for d in image for x in F.image(d))
    fixed = leftmost_reduce(image) == eta
    ok = (code == 0 and cert is not None and cert.eta == eta
          and set(cert.branches) == {("a", "b"), ("b", "a")} and cert.map_period == 2
          and cert.verified and fixed and "eta = ~b ~a b a" in out.getvalue() and elapsed < 5)
    record(1, ok, f"eta = {' '.join(cert.eta) if cert else None}, branches {cert.branches if cert else None}, "
                  f"[F^2(eta)] = eta by leftmost reduction: {fixed}, exit {code}, {elapsed:.2f}s (< 5s)")


# -- 2 -----------------------------------------------------------------------------

def test_criterion_2_gates_and_index():
    R2, F, F2, _ = fib()
    G = intrinsic_gates(F)
    parts = {frozenset(g) for g in G.gates}
    want = {frozenset({"a", "b"}), frozenset({"~a"}), frozenset({"~b"})}
    wh = gate_whitehead_graph(F, G, "v")
    edges = {frozenset(frozenset(g) for g in e) for e in wh.edges}
    want_edges = {frozenset({frozenset({"~a"}), frozenset({"a", "b"})}),
                  frozenset({frozenset({"~b"}), frozenset({"a", "b"})})}
    from ttk.whitehead import gate_index_list
    idx = gate_index_list(F, G).indices
    M = transition_matrix(F)
    ok = (parts == want and edges == want_edges and wh.is_connected() and idx == [Fraction(1, 2)]
          and is_primitive(M) and (M.dot(M) == mat([[2, 1], [1, 1]])).all())
    record(2, ok, f"gates {sorted(map(sorted, parts))}, {len(edges)} Whitehead edges, connected {wh.is_connected()}, "
                  f"index list {[str(x) for x in idx]}, M^2 = {M.dot(M).tolist()}")


# -- 3 -----------------------------------------------------------------------------

def test_criterion_3_transition_functoriality():
    rng = random.Random(20240603)
    graphs = random_graphs()
    bad = 0
    for n in range(100):
        A, B, C = (rng.choice(graphs) for _ in range(3))
        f = random_map(A, B, rng, 4, "f")
        g = random_map(B, C, rng, 4, "g")
        if not (transition_matrix(compose(g, f)) == transition_matrix(g).dot(transition_matrix(f))).all():
            bad += 1
    pairs = train_track_pairs()
    for f, g, _ in pairs:
        if not (transition_matrix(compose(g, f)) == transition_matrix(g).dot(transition_matrix(f))).all():
            bad += 1
    record(3, bad == 0, f"100 random pairs + {len(pairs)} fixture pairs, {bad} mismatches")


# -- 4 -----------------------------------------------------------------------------

def long_turns_up_to(G, n: int) -> list:
    graph = G.graph
    out = []
    for v in graph.vertices:
        paths = [p for c in range(1, n + 1) for p in enumerate_legal_paths(graph, G, v, c)]
        for p, q in itertools.combinations(paths, 2):
            if p[0] != q[0]:
                out.append(LongTurn.of(p, q))
    return out


def test_criterion_4_long_turn_functoriality():
    R2 = fib()[0]
    checked, defined, bad = 0, 0, 0
    pairs = [(f, g, G) for f, g, G in train_track_pairs() if f.source == R2 and G.name in ("GF", "Gpm")]
    for f, g, G in pairs:
        gf = compose(g, f)
        for t in long_turns_up_to(G, 3):
            checked += 1
            a = lt_image(f, t)
            direct = lt_image(gf, t)
            stepwise = None if a is None else lt_image(g, a)
            if (direct is None) != (stepwise is None) or direct != stepwise:
                bad += 1
            defined += direct is not None
    record(4, bad == 0 and len({G.name for _, _, G in pairs}) == 2,
           f"{len(pairs)} pairs on (R2, GF) and (R2, Gpm), {checked} turns, {defined} defined, {bad} exceptions")


# -- 5 -----------------------------------------------------------------------------

def direct_legalizing_power(f, G, cap: int, max_volume: int = 3_000):
    """Least k <= cap with f^k legalizing, scanning powers directly; (k, scanned)."""
    g = f
    for k in range(1, cap + 1):
        if k > 1:
            g = compose(f, g)
        if sum(g.length(lab) for lab in g.source.labels) > max_volume:
            return None, k - 1
        if is_legalizing(g, G):
            return k, k
    return None, cap


def test_criterion_5_dichotomy():
    fixtures = dichotomy_fixtures()
    t0 = time.perf_counter()
    counts = {"inp": 0, "legalizing": 0}
    bad = []
    scanned_total = 0
    for f in fixtures:
        G, p, h, profile = _prepare(f, None)
        card = count_LT_C(G, profile.sharp_bound)
        cert = has_periodic_inp(f)
        k, scanned = direct_legalizing_power(f, G, card)
        scanned_total += scanned
        inp_side = cert is not None and verify_certificate(f, G, cert)
        legal_side = k is not None and k <= card
        # a scan stopped by the volume cap is completed by the certificate: a periodic INP
        # rules out every legalizing power, so only a contradiction within the scan counts
        if inp_side == legal_side:
            bad.append(f.name)
        counts["inp" if inp_side else "legalizing"] += 1
    elapsed = time.perf_counter() - t0
    record(5, not bad and len(fixtures) >= 20 and elapsed < 60,
           f"{len(fixtures)} fixtures: {counts['inp']} with INP certificate, {counts['legalizing']} with "
           f"legalizing power <= card LT_C ({scanned_total} powers scanned directly), violations {bad}, "
           f"{elapsed:.1f}s (< 60s)")


# -- 6 -----------------------------------------------------------------------------

def test_criterion_6_legalizing_implies_intrinsic():
    checked, bad = 0, []
    for name in FACTORY:
        f, g_file, G, legal = factory_fixture(name)
        found, missing = search_elementary_legalizers(G, 1, 4)
        g = legalizing_factory(found, f, G).map
        assert not missing and serialize_map(g) == serialize_map(g_file)
        assert is_gate_stable(g, G) and is_legalizing(g, G)
        if not intrinsic_gates(g).same_partition(G):
            bad.append(f"{name}: G(g)")
        doc = load(name)
        others = [m for m in doc.maps.values() if is_train_track_morphism(m, G, G)] + [identity_map(G.graph)]
        for m in others:
            checked += 1
            if not intrinsic_gates(compose(m, g)).same_partition(G):
                bad.append(f"{name}: G({m.name}.g)")
    record(6, not bad, f"{len(FACTORY)} factory maps, {checked} composites f.g checked, mismatches {bad}")


def serialize_map(m) -> dict:
    return {lab: m.image(lab) for lab in m.source.labels}


# -- 7 -----------------------------------------------------------------------------

def test_criterion_7_main_theorem():
    R2, F, F2, _ = fib()
    GF = fib_gates()[0]
    found, missing = search_elementary_legalizers(GF, 1, 4)
    note = ""
    if missing:
        note = (f"bounded search on (R2, GF) found no elementary legalizer for "
                f"{', '.join(map(str, missing))} with images of length <= 4; substituted rank-3 fixture tri; ")
        f, g, _, _ = factory_fixture("tri")
    else:
        f = F2
        g = legalizing_factory(found, F2, GF).map
    r = theorem_main(f, g)
    ok = (r.passed and r.hypotheses_hold and r.inp_search is not None and not r.inp_search.found
          and len(r.inp_search.transcript()) > 0 and r.iwip.certified and r.index.certified_stable
          and r.index.indices == [Fraction(1, 2)] and r.index.total <= r.index.rank - 1)
    record(7, ok, note + f"{f.name}.{g.name}: hypotheses {r.hypotheses_hold}, no periodic INP re-derived "
                         f"({len(r.inp_search.levels) if r.inp_search else 0} levels), iwip {r.iwip.verdict if r.iwip else None}, "
                         f"index list {[str(x) for x in r.index.indices] if r.index else None}, "
                         f"sum {r.index.total if r.index else None} <= {r.index.rank - 1 if r.index else None}")


# -- 8 -----------------------------------------------------------------------------

def test_criterion_8_whitehead_composition():
    checked, bad = 0, []
    pairs = gate_stable_pairs()
    for f, g, G in pairs:
        base = whitehead_graphs(f, G)
        for comp in (compose(f, g), compose(g, f)):
            other = whitehead_graphs(comp, G)
            for v, w in base.items():
                checked += 1
                if not w.edges <= other[v].edges:
                    bad.append((f.name, g.name, comp.name, v))
    record(8, not bad, f"{len(pairs)} pairs, {checked} vertex inclusions checked, exceptions {bad}")


# -- 9 -----------------------------------------------------------------------------

def test_criterion_9_roundtrip_and_survey():
    bad = []
    for name in CANONICAL:
        text = (DATA / f"{name}.tt").read_text(encoding="utf-8")
        if serialize(parse(text)) != text:
            bad.append(name)
    hist = [format_histogram(3, 100, 7, survey(3, 100, 7, threads=t)) for t in (1, 1, 8)]
    same = hist[0] == hist[1] == hist[2]
    record(9, not bad and same and len(CANONICAL) >= 10,
           f"{len(CANONICAL)} golden files, round-trip failures {bad}; survey rank 3 count 100 seed 7 "
           f"identical across runs and threads 1/8: {same}")


# -- 10 ----------------------------------------------------------------------------

def power_oracle(m) -> bool:
    n = len(m)
    a = np.array(m, dtype=object)
    p = a.copy()
    for _ in range((n - 1) ** 2 + 1):
        if (p > 0).all():
            return True
        p = p.dot(a)
    return False


def scanned_turns(f, G, t_max: int) -> frozenset:
    """Gate turns crossed by f^t(e) for t <= t_max, by direct iteration."""
    found = set()
    images = {lab: f.image(lab) for lab in f.source.labels}
    for _ in range(t_max):
        for w in images.values():
            for x, y in zip(w, w[1:]):
                a, b = G.gate_of(rev(x)), G.gate_of(y)
                if a != b:
                    found.add(frozenset((a, b)))
        images = {lab: f.apply_word(w) for lab, w in images.items()}
    return frozenset(found)


def test_criterion_10_small_oracles():
    R2, F, F2, _ = fib()
    theta = load("theta").graph("Theta")
    red = 0
    n_paths = 0
    for graph in (R2, theta):
        for w in words(graph, 8 if graph is R2 else 7):
            n_paths += 1
            start = graph.initial(w[0])
            if reduce_path(EdgePath(start, w)).dirs != leftmost_reduce(w):
                red += 1
    prim = 0
    for entries in itertools.product((0, 1, 2), repeat=9):
        m = [list(entries[0:3]), list(entries[3:6]), list(entries[6:9])]
        if is_primitive(mat(m)) != power_oracle(m):
            prim += 1
    wh = 0
    maps = [F, F2, load("collapse").map("f")] + [factory_fixture(n)[0] for n in FACTORY] + \
        [load("theta").map("h"), load("barbell").map("k")]
    for f in maps:
        G = intrinsic_gates(f)
        n_turns = sum(len(G.gates_at(v)) * (len(G.gates_at(v)) - 1) // 2 for v in f.source.vertices)
        if gate_turn_closure(f, G) != scanned_turns(f, G, n_turns + 1):
            wh += 1
    record(10, red == 0 and prim == 0 and wh == 0,
           f"reduce vs leftmost oracle on {n_paths} paths: {red} mismatches; primitivity on 19683 matrices: "
           f"{prim} mismatches; Whitehead closure vs scan on {len(maps)} maps: {wh} mismatches")


if __name__ == "__main__":
    tests = [fn for name, fn in globals().items() if name.startswith("test_criterion_")]
    for fn in sorted(tests, key=lambda fn: int(fn.__name__.split("_")[2])):
        try:
            fn()
        except AssertionError:
            pass
