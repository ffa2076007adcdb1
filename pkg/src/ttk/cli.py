"""Command line interface.

Exit codes: 0 success or certified, 1 inconclusive or property failed
(a report is still printed), 2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import reports as R
from .certify import (FactoryError, MonoidError, certify_iwip, legalizing_factory, monoid_certify, monoid_setup,
                      search_elementary_legalizers, theorem_main)
from .fileformat import ParseError, document, parse_file, serialize
from .gates import intrinsic_gates, is_train_track_morphism
from .graphs import GraphError, GraphMap, compose
from .inp import NotExpanding, SearchBudgetExceeded, is_legalizing, legalizing_power, search_periodic_inp
from .longturns import LongTurnError, parse_turn
from .pi1 import is_pi1_automorphism
from .survey import format_histogram, survey
from .whitehead import gate_index_list, whitehead_graphs

OK, FAILED, INPUT_ERROR = 0, 1, 2


class InputError(Exception):
    pass


def _load(path: str):
    try:
        return parse_file(path)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    except ParseError as exc:
        raise InputError(f"{path}: {exc}") from None


def _map(doc, name: str) -> GraphMap:
    try:
        return doc.map(name)
    except GraphError as exc:
        raise InputError(str(exc)) from None


def _gates(doc, name: str):
    try:
        return doc.gate_structure(name)
    except GraphError as exc:
        raise InputError(str(exc)) from None


def _self_map(f: GraphMap) -> GraphMap:
    if not f.is_self_map:
        raise InputError(f"map {f.name} is not a self-map")
    return f


def _write(path: str, doc) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize(doc))


# -- subcommands: each returns (exit code, plain report, text) ---------------------

def cmd_validate(args):
    doc = _load(args.file)
    items = []
    for kind, name in doc.order:
        entry = {"kind": kind, "name": name}
        if kind == "graph":
            g = doc.graphs[name]
            entry.update(vertices=len(g.vertices), edges=len(g.edges), rank=g.rank)
        elif kind == "map":
            f = doc.maps[name]
            entry["self_map"] = f.is_self_map
            if f.is_self_map:
                entry["pi1_automorphism"] = is_pi1_automorphism(f)
        else:
            entry["gates"] = len(doc.gates[name].gates)
        items.append(entry)
    report = {"file": args.file, "valid": True, "objects": items}
    return OK, report, None


def cmd_gates(args):
    f = _self_map(_map(_load(args.file), args.map))
    G = intrinsic_gates(f, args.name or f"G{f.name}")
    report = R.gates_dict(G)
    report["train_track"] = is_train_track_morphism(f, G, G)
    text = serialize(document(G)).split("\n\n", 1)[1].rstrip("\n")
    return OK, report, text + f"\n# {f.name} train track for {G.name}: {'yes' if report['train_track'] else 'no'}"


def cmd_certify(args):
    f = _map(_load(args.file), args.map)
    r = certify_iwip(f)
    report = R.iwip_dict(r)
    text = f"{f.name}: {r.verdict}" + ("" if r.certified else ": " + "; ".join(r.reasons))
    return (OK if r.certified else FAILED), report, text + "\n" + R.render(report)


def cmd_inp(args):
    doc = _load(args.file)
    f = _self_map(_map(doc, args.map))
    G = _gates(doc, args.gates) if args.gates else None
    try:
        s = search_periodic_inp(f, G)
    except NotExpanding as exc:
        return FAILED, {"map": f.name, "error": str(exc), "search": None}, f"{f.name}: {exc}"
    report = {"map": f.name, "error": None, "search": R.search_dict(s)}
    if s.certificate is None:
        return FAILED, report, "\n".join([f"{f.name}: no periodic INP"] + s.transcript())
    c = s.certificate
    lines = [f"{f.name}: periodic INP",
             f"eta = {R.format_word(c.eta)}",
             f"branches = {R.format_word(c.branches[0])} | {R.format_word(c.branches[1])}",
             f"period {c.map_period} (ordered), turn period {c.period} under {f.name}^{c.power}",
             "endpoints = " + ", ".join(f"{d} at {R.frac(x)}" for d, x in c.endpoints),
             f"verified: {'yes' if c.verified else 'no'}"]
    return OK, report, "\n".join(lines + list(c.transcript))


def cmd_legalizing(args):
    doc = _load(args.file)
    f = _self_map(_map(doc, args.map))
    G = _gates(doc, args.gates)
    if not is_train_track_morphism(f, G, G):
        return FAILED, {"legalizing": False, "witness": None, "witness_image": None, "padded_witness": None,
                        "error": f"{f.name} is not a train track morphism for {G.name}"}, \
            f"{f.name} is not a train track morphism for {G.name}"
    c = is_legalizing(f, G)
    k = legalizing_power(f, G) if args.power else None
    report = R.legalizing_dict(c, k, args.power)
    report["error"] = None
    text = f"{f.name} legalizing for {G.name}: {'yes' if c.legalizing else 'no'}"
    if not c.legalizing:
        text += f"\nwitness {c.witness} -> {c.witness_image}\npadded {c.padded_witness}"
    if args.power:
        text += f"\nleast legalizing power: {k if k is not None else 'none'}"
    return (OK if c.legalizing else FAILED), report, text


def cmd_index(args):
    doc = _load(args.file)
    f = _self_map(_map(doc, args.map))
    G = _gates(doc, args.gates) if args.gates else intrinsic_gates(f)
    r = gate_index_list(f, G)
    report = R.index_dict(r)
    try:
        report["whitehead"] = [R.whitehead_dict(w) for w in whitehead_graphs(f, G).values()]
    except GraphError:
        report["whitehead"] = None
    text = f"{f.name} gate index list {R.format_index_list(r.indices)}, sum {R.frac(r.total)}, rank {r.rank}"
    return OK, report, text


def cmd_compose(args):
    doc = _load(args.file)
    names = args.maps.split(",")
    if len(names) != 2:
        raise InputError("--maps takes two names M1,M2 (M1 after M2)")
    m1, m2 = (_map(doc, n) for n in names)
    try:
        h = compose(m1, m2, args.name or f"{m1.name}{m2.name}")
    except GraphError as exc:
        raise InputError(str(exc)) from None
    out = document(h)
    _write(args.out, out)
    return OK, {"map": R.map_dict(h), "out": args.out}, serialize(out).rstrip("\n")


def cmd_theorem(args):
    doc = _load(args.file)
    f, g = _map(doc, args.f), _map(doc, args.g)
    G = _gates(doc, args.gates) if args.gates else None
    r = theorem_main(f, g, swapped=args.swapped, G=G)
    report = R.theorem_dict(r)
    lines = [f"{'g.f' if r.swapped else 'f.g'} with f = {f.name}, g = {g.name}"]
    for h in r.hypotheses:
        lines.append(f"  [{'ok' if h.passed else 'FAIL'}] {h.name}" + (f": {h.detail}" if h.detail else ""))
    if r.hypotheses_hold:
        lines.append(f"  composite intrinsic gates equal G: {'yes' if r.gates_preserved else 'no'}")
        lines.append(f"  composite legalizing: {'yes' if r.composite_legalizing else 'no'}")
        lines += ["  " + x for x in r.inp_search.transcript()]
        lines.append(f"  iwip: {r.iwip.verdict}")
        lines.append(f"  index list {R.format_index_list(r.index.indices)}, sum {R.frac(r.index.total)}"
                     f" <= {r.index.rank - 1}, certified-stable: {'yes' if r.index.certified_stable else 'no'}")
    return (OK if r.passed else FAILED), report, "\n".join(lines)


def cmd_factory(args):
    doc = _load(args.file)
    G = _gates(doc, args.gates)
    h = _map(doc, args.expander)
    elementary = {}
    if args.legalizers:
        for item in args.legalizers.split(","):
            name, sep, turn = item.partition(":")
            if not sep:
                raise InputError(f"legalizer {item!r} must look like NAME:TURN")
            try:
                elementary[parse_turn(turn)] = _map(doc, name)
            except LongTurnError as exc:
                raise InputError(str(exc)) from None
    if args.search is not None:
        found, missing = search_elementary_legalizers(G, args.length, args.search)
        for t, g in found.items():
            elementary.setdefault(t, g)
    try:
        res = legalizing_factory(elementary, h, G, name=args.name)
    except FactoryError as exc:
        return FAILED, {"error": str(exc), "factory": None}, f"factory failed: {exc}"
    out = document(G, *sorted({id(g): g for g in elementary.values()}.values(), key=lambda m: m.name), res.map)
    _write(args.out, out)
    report = {"error": None, "factory": R.factory_dict(res)}
    lines = [f"C = {res.C}, L = {res.L}, illegal turns in LT_C: {res.initial_illegal}"]
    lines += [f"step {i + 1}: {s.fixed} fixed, {s.illegal_before} -> {s.illegal_after}" for i, s in enumerate(res.steps)]
    lines.append(f"wrote {res.map.name} to {args.out}")
    return OK, report, "\n".join(lines)


def cmd_monoid(args):
    doc = _load(args.file)
    maps = [_map(doc, n) for n in args.maps.split(",")]
    G = _gates(doc, args.gates) if args.gates else None
    setup = monoid_setup(maps, G)
    try:
        word = monoid_certify(setup, args.word.split())
        error = None
    except MonoidError as exc:
        word, error = None, str(exc)
    except ValueError:
        raise InputError(f"bad word {args.word!r}") from None
    report = R.monoid_dict(setup, word, error)
    lines = [f"{g.map.name}: exponent {g.exponent}" + ("" if g.accepted else f" (rejected: {g.failed})")
             for g in setup.generators]
    if error:
        lines.append(error)
        return FAILED, report, "\n".join(lines)
    lines.append(f"word {' '.join(map(str, word.word))}: {word.iwip.verdict}, legalizing "
                 f"{'yes' if word.legalizing else 'no'}, index list {R.format_index_list(word.index.indices)}")
    return (OK if word.certified else FAILED), report, "\n".join(lines)


def cmd_survey(args):
    if args.rank < 2:
        raise InputError("rank must be at least 2")
    hist = survey(args.rank, args.count, args.seed, args.threads)
    report = {"rank": args.rank, "count": args.count, "seed": args.seed,
              "histogram": [{"outcome": k, "count": n} for k, n in hist.items()]}
    return OK, report, format_histogram(args.rank, args.count, args.seed, hist).rstrip("\n")


# -- parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ttk", description="Train track maps, gates, INPs and iwip certificates.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, file=True):
        sp = sub.add_parser(name, help=help_text)
        if file:
            sp.add_argument("file")
        sp.add_argument("--json", action="store_true", help="machine-readable report")
        sp.set_defaults(func=func)
        return sp

    add("validate", cmd_validate, "parse and check a file")
    sp = add("gates", cmd_gates, "intrinsic gate structure of a map")
    sp.add_argument("--map", required=True)
    sp.add_argument("--name")
    sp = add("certify", cmd_certify, "iwip criterion")
    sp.add_argument("--map", required=True)
    sp = add("inp", cmd_inp, "search for a periodic INP")
    sp.add_argument("--map", required=True)
    sp.add_argument("--gates")
    sp = add("legalizing", cmd_legalizing, "is the map legalizing")
    sp.add_argument("--map", required=True)
    sp.add_argument("--gates", required=True)
    sp.add_argument("--power", action="store_true", help="also compute the least legalizing power")
    sp = add("index", cmd_index, "gate index list")
    sp.add_argument("--map", required=True)
    sp.add_argument("--gates")
    sp = add("compose", cmd_compose, "compose two maps (M1 after M2)")
    sp.add_argument("--maps", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--name")
    sp = add("theorem", cmd_theorem, "main theorem pipeline for f.g")
    sp.add_argument("--f", required=True)
    sp.add_argument("--g", required=True)
    sp.add_argument("--swapped", action="store_true", help="use g.f")
    sp.add_argument("--gates", help="ambient gate structure (default: intrinsic gates of f)")
    sp = add("factory", cmd_factory, "build a legalizing map")
    sp.add_argument("--gates", required=True)
    sp.add_argument("--legalizers", help="NAME:TURN,... with TURN like a.b|b.a")
    sp.add_argument("--search", type=int, metavar="MAXLEN", help="search legalizers with images up to MAXLEN")
    sp.add_argument("--length", type=int, default=1, help="branch length L for --search")
    sp.add_argument("--expander", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--name", default="g")
    sp = add("monoid", cmd_monoid, "certify a word in generator powers")
    sp.add_argument("--maps", required=True)
    sp.add_argument("--word", required=True)
    sp.add_argument("--gates")
    sp = add("survey", cmd_survey, "random positive automorphisms", file=False)
    sp.add_argument("--rank", type=int, required=True)
    sp.add_argument("--count", type=int, required=True)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--threads", type=int, help="worker threads (default TTK_THREADS or 1)")
    return p


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return INPUT_ERROR if exc.code else OK
    try:
        code, report, text = args.func(args)
    except (InputError, GraphError) as exc:
        code, report, text = INPUT_ERROR, {"error": str(exc)}, f"error: {exc}"
    except SearchBudgetExceeded as exc:
        code, report, text = FAILED, {"error": f"search budget exceeded: {exc}"}, f"inconclusive: {exc}"
    if args.json:
        envelope = {"command": args.command, "exit_code": code, "report": report}
        out.write(json.dumps(envelope, indent=2, sort_keys=True) + "\n")
    else:
        out.write((text if text is not None else R.render(report)) + "\n")
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
