"""Random positive automorphisms of a rose, certified in bulk.

Samples are products of moves ``x_i -> x_i x_j``.  All random draws happen
up front from one seeded generator, so the histogram does not depend on
how many worker threads evaluate the samples.
"""

from __future__ import annotations

import os
import random
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .certify import CERTIFIED, certify_iwip
from .graphs import Graph, GraphMap, compose, identity_map
from .inp import SearchBudgetExceeded
from .whitehead import format_index_list, gate_index_list

LETTERS = "abcdefghijklmnopqrstuvwxyz"


@dataclass(frozen=True)
class Sample:
    moves: tuple  # (i, j) pairs, applied left to right
    map: GraphMap


def nielsen_move(graph: Graph, i: int, j: int) -> GraphMap:
    labels = graph.labels
    emap = {lab: (lab,) for lab in labels}
    emap[labels[i]] = (labels[i], labels[j])
    return GraphMap(f"n{i}{j}", graph, graph, {graph.vertices[0]: graph.vertices[0]}, emap)


def random_samples(rank: int, count: int, seed: int) -> list:
    if rank < 2:
        raise ValueError("rank must be at least 2")
    if rank > len(LETTERS):
        raise ValueError(f"rank at most {len(LETTERS)}")
    graph = Graph.rose(tuple(LETTERS[:rank]), f"R{rank}")
    rng = random.Random(seed)
    samples = []
    for n in range(count):
        k = rng.randint(5, 25)
        moves = []
        f = identity_map(graph)
        for _ in range(k):
            i, j = rng.sample(range(rank), 2)
            moves.append((i, j))
            f = compose(f, nielsen_move(graph, i, j))
        samples.append(Sample(tuple(moves), f.renamed(f"s{n}")))
    return samples


def classify(sample: Sample) -> str:
    f = sample.map
    try:
        report = certify_iwip(f)
    except SearchBudgetExceeded:
        return "Inconclusive: other"
    if report.outcome != CERTIFIED:
        return report.outcome
    index = gate_index_list(f, report.gates).certify()  # asserts sum <= N - 1
    return f"Certified with list {format_index_list(index.indices)}"


def thread_count(threads: int | None = None) -> int:
    if threads is None:
        threads = int(os.environ.get("TTK_THREADS", "1") or 1)
    return max(1, threads)


def survey(rank: int, count: int, seed: int, threads: int | None = None) -> dict:
    samples = random_samples(rank, count, seed)
    with ThreadPoolExecutor(max_workers=thread_count(threads)) as pool:
        outcomes = list(pool.map(classify, samples))
    return dict(sorted(Counter(outcomes).items()))


def format_histogram(rank: int, count: int, seed: int, histogram: dict) -> str:
    lines = [f"survey rank {rank} count {count} seed {seed}"]
    lines += [f"{n:6d}  {key}" for key, n in histogram.items()]
    return "\n".join(lines) + "\n"
