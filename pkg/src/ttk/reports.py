"""Plain-data views of results, for JSON output and the text renderer.

Every dict built here uses only str, int, bool, list, dict and None, with
exact fractions written as strings like ``"1/2"``.
"""

from __future__ import annotations

from fractions import Fraction

from .certify import FactoryResult, IwipReport, MainTheoremReport, MonoidSetup, MonoidWord
from .gates import GateStructure, format_gate
from .graphs import GraphMap, format_word, transition_matrix
from .inp import INPCertificate, INPSearch, LegalizingCheck
from .longturns import LongTurn
from .whitehead import GateWhiteheadGraph, IndexReport, format_index_list


def frac(x: Fraction) -> str:
    return str(Fraction(x))


def turn_dict(t: LongTurn | None):
    if t is None:
        return None
    return [format_word(t.first), format_word(t.second)]


def gates_dict(G: GateStructure) -> dict:
    return {"name": G.name, "graph": G.graph.name,
            "gates": [{"vertex": G.vertex_of(g), "directions": sorted(g)} for g in G.gates]}


def map_dict(f: GraphMap) -> dict:
    return {"name": f.name, "source": f.source.name, "target": f.target.name,
            "vmap": {v: f.vmap[v] for v in f.source.vertices},
            "emap": {lab: format_word(f.emap[lab]) for lab in f.source.labels},
            "matrix": [[int(x) for x in row] for row in transition_matrix(f)]}


def whitehead_dict(w: GateWhiteheadGraph) -> dict:
    edges = sorted(sorted(format_gate(g) for g in e) for e in w.edges)
    return {"vertex": w.vertex, "gates": [format_gate(g) for g in w.gates], "edges": edges,
            "connected": w.is_connected()}


def index_dict(r: IndexReport) -> dict:
    return {"entries": [{"vertex": e.vertex, "gates": e.gate_count, "index": frac(e.index)} for e in r.entries],
            "list": [frac(x) for x in r.indices], "total": frac(r.total), "rank": r.rank,
            "certified_stable": r.certified_stable}


def certificate_dict(c: INPCertificate) -> dict:
    return {"turn": turn_dict(c.turn), "branches": [format_word(b) for b in c.branches],
            "period": c.period, "ordered_period": c.ordered_period, "power": c.power,
            "map_period": c.map_period, "eta": format_word(c.eta),
            "endpoints": [{"direction": d, "offset": frac(x)} for d, x in c.endpoints],
            "positions": [frac(x) for x in c.positions], "endpoints_are_vertices": c.endpoints_are_vertices,
            "verified": c.verified, "transcript": list(c.transcript)}


def search_dict(s: INPSearch) -> dict:
    return {"map": s.map_name, "power": s.power, "K": s.K, "bound": s.bound, "sharp_bound": s.sharp_bound,
            "levels": [{"level": x.level, "candidates": x.candidates, "cyclic": x.cyclic,
                        "exact_cycles": x.exact_cycles} for x in s.levels],
            "found": s.found, "certificate": certificate_dict(s.certificate) if s.certificate else None,
            "transcript": s.transcript()}


def legalizing_dict(c: LegalizingCheck, power: int | None = None, computed_power: bool = False) -> dict:
    out = {"legalizing": c.legalizing, "witness": turn_dict(c.witness),
           "witness_image": turn_dict(c.witness_image), "padded_witness": turn_dict(c.padded_witness)}
    if computed_power:
        out["legalizing_power"] = power
    return out


def iwip_dict(r: IwipReport) -> dict:
    return {"map": r.map_name, "verdict": r.verdict, "outcome": r.outcome, "reasons": list(r.reasons),
            "checks": [{"name": c.name, "passed": c.passed} for c in r.checks],
            "gates": gates_dict(r.gates) if r.gates else None, "primitive": r.primitive,
            "whitehead_connected": dict(r.whitehead_connected), "no_inp": r.no_inp,
            "inp_search": search_dict(r.search) if r.search else None}


def theorem_dict(r: MainTheoremReport) -> dict:
    return {"f": r.f_name, "g": r.g_name, "swapped": r.swapped, "passed": r.passed,
            "hypotheses": [{"name": h.name, "passed": h.passed, "detail": h.detail} for h in r.hypotheses],
            "composite": map_dict(r.composite) if r.composite else None,
            "gates_preserved": r.gates_preserved, "composite_legalizing": r.composite_legalizing,
            "inp_search": search_dict(r.inp_search) if r.inp_search else None,
            "iwip": iwip_dict(r.iwip) if r.iwip else None,
            "index": index_dict(r.index) if r.index else None}


def factory_dict(r: FactoryResult) -> dict:
    return {"map": map_dict(r.map), "C": r.C, "L": r.L, "initial_illegal": r.initial_illegal,
            "steps": [{"target": turn_dict(s.target), "fixed": turn_dict(s.fixed),
                       "illegal_before": s.illegal_before, "illegal_after": s.illegal_after} for s in r.steps]}


def monoid_dict(setup: MonoidSetup, word: MonoidWord | None, error: str | None) -> dict:
    gens = [{"map": g.map.name, "exponent": g.exponent, "accepted": g.accepted, "failed": g.failed,
             "conditions": [{"name": c.name, "passed": c.passed} for c in g.conditions]}
            for g in setup.generators]
    out = {"gates": gates_dict(setup.gates), "generators": gens, "error": error, "word": None}
    if word is not None:
        out["word"] = {"letters": list(word.word), "map": word.map.name, "certified": word.certified,
                       "legalizing": word.legalizing, "gates_preserved": word.gates_preserved,
                       "iwip": iwip_dict(word.iwip), "index": index_dict(word.index)}
    return out


# -- text rendering -------------------------------------------------------------

def render(obj, indent: int = 0) -> str:
    """Deterministic indented text for nested plain data."""
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.append(render(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_scalar(v)}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}-")
                lines.append(render(v, indent + 1))
            else:
                lines.append(f"{pad}- {_scalar(v)}")
    else:
        lines.append(pad + _scalar(obj))
    return "\n".join(lines)


def _scalar(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, (list, dict)):
        return "[]" if isinstance(v, list) else "{}"
    return str(v)


__all__ = ["frac", "turn_dict", "gates_dict", "map_dict", "whitehead_dict", "index_dict", "certificate_dict",
           "search_dict", "legalizing_dict", "iwip_dict", "theorem_dict", "factory_dict", "monoid_dict",
           "render", "format_index_list"]
