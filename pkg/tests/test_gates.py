import random

import pytest

from helpers import factory_fixture, fib, fib_gates, load, random_map, train_track_pairs
from ttk.gates import (GateStructure, PartitionError, gate_morphism, intrinsic_gates, is_gate_stable,
                       is_legal_path, is_legal_turn, is_train_track_morphism, refines, sign_gates, singleton_gates)
from ttk.graphs import Graph, GraphError, compose, identity_map, make_path, rose_map, vertex_orbit_periodic


def blocks(G):
    return {frozenset(g) for g in G.gates}


def partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for p in partitions(rest):
        yield [[first]] + p
        for i in range(len(p)):
            yield p[:i] + [[first] + p[i]] + p[i + 1:]


def all_structures(graph):
    return [GateStructure.from_blocks(graph, p, f"P{i}") for i, p in enumerate(partitions(list(graph.directions)))]


def test_partition_count():
    R2 = fib()[0]
    assert len(all_structures(R2)) == 15  # Bell number B4


def test_is_legal_turn_examples():
    GF = fib_gates()[0]
    assert not is_legal_turn(GF, "a", "b")
    assert is_legal_turn(GF, "~a", "~b")
    assert not is_legal_turn(GF, "a", "a")


def test_is_legal_turn_different_vertices():
    d = load("theta")
    with pytest.raises(GraphError):
        is_legal_turn(d.gate_structure("Gh"), "a", "~a")


def test_is_legal_path_examples():
    R2 = fib()[0]
    GF = fib_gates()[0]
    assert is_legal_path(GF, make_path(R2, "a b"))
    assert not is_legal_path(GF, make_path(R2, "~a b"))
    for G in fib_gates():
        assert is_legal_path(G, make_path(R2, "a"))


def test_intrinsic_gates_examples():
    R2, F, F2, P = fib()
    want = {frozenset({"a", "b"}), frozenset({"~a"}), frozenset({"~b"})}
    assert blocks(intrinsic_gates(F)) == want
    assert blocks(intrinsic_gates(F2)) == want
    assert blocks(intrinsic_gates(P)) == {frozenset({d}) for d in R2.directions}


def test_intrinsic_gates_oracle():
    # oracle: directions share a gate iff their Df orbits meet within |directions| steps
    rng = random.Random(4)
    R3 = Graph.rose(("a", "b", "c"), "R3")
    for _ in range(100):
        f = random_map(R3, R3, rng, 3)
        G = intrinsic_gates(f)
        dirs = R3.directions
        for x in dirs:
            for y in dirs:
                a, b, meet = x, y, False
                for _ in range(len(dirs)):
                    a, b = f.image(a)[0], f.image(b)[0]
                    meet = meet or a == b
                assert (G.gate_of(x) == G.gate_of(y)) == (meet or x == y)


def test_train_track_examples():
    R2, F, _, _ = fib()
    GF, Gpm, _ = fib_gates()
    assert is_train_track_morphism(F, GF, GF)
    assert is_train_track_morphism(F, Gpm, Gpm)
    assert not is_train_track_morphism(rose_map({"a": "a ~b", "b": "b"}, "x", R2), Gpm, Gpm)


def test_train_track_wrong_graph():
    R2, F, _, _ = fib()
    with pytest.raises(GraphError):
        is_train_track_morphism(F, sign_gates(Graph.rose(("a", "b", "c"), "R3")), fib_gates()[0])


def test_gate_morphism_examples():
    R2, F, _, _ = fib()
    GF, Gpm, G1 = fib_gates()
    gm = gate_morphism(F, GF, GF)
    ab, na, nb = GF.gate_of("a"), GF.gate_of("~a"), GF.gate_of("~b")
    assert gm.defined and gm.mapping == {ab: ab, na: nb, nb: na}
    ident = identity_map(R2)
    assert gate_morphism(ident, GF, Gpm).defined  # finer to coarser merges gates
    bad = gate_morphism(ident, Gpm, GF)
    assert not bad.defined and bad.violation == Gpm.gate_of("~a")


def test_gate_stable_examples():
    R2, F, F2, _ = fib()
    GF = fib_gates()[0]
    assert not is_gate_stable(F, GF)
    assert is_gate_stable(F2, GF)
    assert is_gate_stable(identity_map(R2), GF)


def test_refines_examples():
    GF, Gpm, G1 = fib_gates()
    assert refines(GF, Gpm)
    assert refines(GF, GF)
    assert not refines(Gpm, GF)
    assert refines(G1, GF)
    with pytest.raises(GraphError):
        refines(GF, sign_gates(Graph.rose(("a", "b", "c"), "R3")))


def test_partition_validation():
    R2 = fib()[0]
    with pytest.raises(PartitionError):
        GateStructure.from_blocks(R2, [["a", "b"], ["a", "~a"], ["~b"]])
    with pytest.raises(PartitionError):
        GateStructure.from_blocks(R2, [["a", "b"], ["~a"]])
    assert len(singleton_gates(R2).gates) == 4


def fixture_self_maps():
    R2, F, F2, P = fib()
    maps = [F, F2, P, identity_map(R2), rose_map({"a": "a b b", "b": "b a"}, "q1", R2)]
    for name in ("tri", "tri2", "quad"):
        f, g, _, legal = factory_fixture(name)
        maps += [f, g] + legal
    maps += [load("collapse").map("f"), load("theta").map("h"), load("barbell").map("k"), load("rose4").map("m")]
    return maps


def test_intrinsic_structure_is_built_in():
    for f in fixture_self_maps():
        G = intrinsic_gates(f)
        gm = gate_morphism(f, G, G)
        assert gm.defined
        for v in f.source.vertices:
            assert gm.is_injective_at(G.gates_at(v))


def test_intrinsic_structure_is_finest():
    rng = random.Random(9)
    R2, R3 = fib()[0], Graph.rose(("a", "b", "c"), "R3")
    structures = {R2: all_structures(R2), R3: all_structures(R3)}
    maps = [f for f in fixture_self_maps() if f.source in structures]
    maps += [random_map(R2, R2, rng, 3) for _ in range(20)]
    hits = 0
    for f in maps:
        Gf = intrinsic_gates(f)
        for G in structures[f.source]:
            if is_train_track_morphism(f, G, G):
                hits += 1
                assert refines(Gf, G)
    assert hits > 0


def test_periodic_gates_bijective():
    for f in fixture_self_maps():
        for G in (intrinsic_gates(f),):
            if not is_train_track_morphism(f, G, G):
                continue
            for v in vertex_orbit_periodic(f):
                images = {}
                for gate in G.gates_at(v):
                    targets = {G.gate_of(f.image(d)[0]) for d in gate}
                    assert len(targets) == 1
                    images[gate] = targets.pop()
                assert sorted(map(sorted, images.values())) == sorted(map(sorted, G.gates_at(f.vmap[v])))


def test_periodic_gates_with_collapse_fixture():
    d = load("collapse")
    f, Gc = d.map("f"), d.gate_structure("Gc")
    assert is_train_track_morphism(f, Gc, Gc)
    assert not gate_morphism(f, Gc, Gc).defined  # the gate at the non-periodic vertex w splits
    assert vertex_orbit_periodic(f) == {"u"}
    images = {g: {Gc.gate_of(f.image(x)[0]) for x in g} for g in Gc.gates_at("u")}
    assert all(len(t) == 1 for t in images.values())
    assert len({next(iter(t)) for t in images.values()}) == 3


def test_composition_of_train_tracks():
    for f, g, G in train_track_pairs():
        assert is_train_track_morphism(compose(g, f), G, G)


def test_finer_coarser_monotonicity():
    R2 = fib()[0]
    structures = all_structures(R2)
    maps = [m for m in fixture_self_maps() if m.source == R2]
    maps.append(rose_map({"a": "b a", "b": "b a a b"}, "q2", R2))
    for f in maps:
        for Gs in structures:
            for Gt in structures:
                if not is_train_track_morphism(f, Gs, Gt):
                    continue
                for H in structures:
                    if refines(Gs, H):
                        assert is_train_track_morphism(f, H, Gt)
                    if refines(H, Gt):
                        assert is_train_track_morphism(f, Gs, H)
