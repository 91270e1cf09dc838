"""Shared randomized-input builders for the test suite.

All randomness flows through SplitMix64 with explicit seeds, so every
test run sees the same inputs.
"""

import numpy as np

from linksom import DataSet, GridTopology, LinkGraph, SomMap
from linksom.rng import SplitMix64


def random_graph(rng: SplitMix64, n_nodes: int, edge_prob: float = 0.3,
                 max_weight: int = 9, self_loops: bool = True) -> LinkGraph:
    graph = LinkGraph()
    labels = ["n%02d" % i for i in range(n_nodes)]
    for label in labels:
        graph.add_node(label)
    for i in range(n_nodes):
        for j in range(n_nodes):
            if i == j and not self_loops:
                continue
            if rng.next_unit() < edge_prob:
                graph.add_edge(labels[i], labels[j], 1 + rng.next_index(max_weight))
    return graph


def random_dataset(rng: SplitMix64, n_records: int, dimension: int,
                   low: float = 0.0, high: float = 1.0) -> DataSet:
    vectors = np.array(
        [[rng.uniform(low, high) for _ in range(dimension)] for _ in range(n_records)]
    )
    labels = ["r%03d" % i for i in range(n_records)]
    return DataSet(dimension=dimension, labels=labels, vectors=vectors)


def random_map(rng: SplitMix64, xsize: int, ysize: int, dimension: int,
               lattice: str = "rect", integer: bool = False) -> SomMap:
    topo = GridTopology(xsize, ysize, lattice)
    if integer:
        codebook = np.array(
            [[float(rng.next_index(11) - 5) for _ in range(dimension)]
             for _ in range(topo.n_units)]
        )
    else:
        codebook = np.array(
            [[rng.uniform(-1.0, 1.0) for _ in range(dimension)]
             for _ in range(topo.n_units)]
        )
    return SomMap(topology=topo, dimension=dimension, codebook=codebook)


def planted_partition_graph(n_blocks: int, block_size: int, p_in: float,
                            p_out: float, max_weight: int, seed: int):
    """Digraph of dense blocks with sparse cross-links; returns (graph, block_of)."""
    rng = SplitMix64(seed)
    graph = LinkGraph()
    n = n_blocks * block_size
    labels = ["node%03d" % i for i in range(n)]
    block_of = {}
    for i, label in enumerate(labels):
        graph.add_node(label)
        block_of[label] = i // block_size
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            same = block_of[labels[i]] == block_of[labels[j]]
            if rng.next_unit() < (p_in if same else p_out):
                graph.add_edge(labels[i], labels[j], 1 + rng.next_index(max_weight))
    return graph, block_of
