"""Weighted directed matchup network.

Edges run from the outperformed lineup to the one that outperformed it, with
weight equal to the absolute point margin per minute.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import TextIO

import numpy as np

from .datamodel import MatchupRecord, SeasonDataset


@dataclass(frozen=True, eq=False)
class MatchupNetwork:
    """Directed graph in CSR form over sorted lineup ids.

    ``indices[indptr[i]:indptr[i+1]]`` are the out-neighbours of node ``i``
    (sorted), ``weights`` the matching edge weights.
    """

    nodes: tuple[int, ...]
    indptr: np.ndarray
    indices: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        for arr in (self.indptr, self.indices, self.weights):
            arr.setflags(write=False)

    @cached_property
    def index(self) -> dict[int, int]:
        return {lid: i for i, lid in enumerate(self.nodes)}

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_edges(self) -> int:
        return len(self.indices)

    def out_neighbors(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return self.indices[lo:hi], self.weights[lo:hi]

    def out_degree(self, i: int) -> int:
        return int(self.indptr[i + 1] - self.indptr[i])

    def has_edge(self, i: int, j: int) -> bool:
        nbrs, _ = self.out_neighbors(i)
        k = np.searchsorted(nbrs, j)
        return bool(k < len(nbrs) and nbrs[k] == j)

    def edges(self):
        """Yield ``(src_lineup_id, dst_lineup_id, weight)`` in CSR order."""
        for i in range(self.n_nodes):
            nbrs, w = self.out_neighbors(i)
            for j, wt in zip(nbrs, w):
                yield self.nodes[i], self.nodes[j], float(wt)

    def adjacency(self, weighted: bool = True) -> np.ndarray:
        """Dense matrix with entry ``[i, j]`` for edge ``i -> j``."""
        mat = np.zeros((self.n_nodes, self.n_nodes))
        for i in range(self.n_nodes):
            nbrs, w = self.out_neighbors(i)
            mat[i, nbrs] = w if weighted else 1.0
        return mat

    def __eq__(self, other):
        if not isinstance(other, MatchupNetwork):
            return NotImplemented
        return (
            self.nodes == other.nodes
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.weights, other.weights)
        )

    __hash__ = None


def margin_per_minute(rec: MatchupRecord) -> float:
    """Signed points per minute; positive means ``lineup_a`` outperformed."""
    return rec.point_diff / rec.minutes


def from_edges(nodes, edges) -> MatchupNetwork:
    """Build a network from lineup ids and ``(src_id, dst_id, weight)`` triples."""
    nodes = tuple(sorted(nodes))
    index = {lid: i for i, lid in enumerate(nodes)}
    rows: list[list[tuple[int, float]]] = [[] for _ in nodes]
    seen = set()
    for src, dst, w in edges:
        if src == dst:
            raise ValueError(f"self-edge on lineup {src}")
        if not w > 0:
            raise ValueError(f"edge {src}->{dst} has non-positive weight {w}")
        if (src, dst) in seen:
            raise ValueError(f"duplicate edge {src}->{dst}")
        seen.add((src, dst))
        rows[index[src]].append((index[dst], float(w)))
    indptr = np.zeros(len(nodes) + 1, dtype=np.int64)
    indices, weights = [], []
    for i, row in enumerate(rows):
        row.sort()
        indices.extend(j for j, _ in row)
        weights.extend(w for _, w in row)
        indptr[i + 1] = len(indices)
    return MatchupNetwork(
        nodes, indptr, np.asarray(indices, dtype=np.int64), np.asarray(weights, dtype=np.float64)
    )


def build_network(ds: SeasonDataset) -> MatchupNetwork:
    """Network over every lineup that appears in a record; tied records add no edge."""
    edges = []
    for rec in ds.matchups:
        m = margin_per_minute(rec)
        if m > 0:
            edges.append((rec.lineup_b, rec.lineup_a, m))
        elif m < 0:
            edges.append((rec.lineup_a, rec.lineup_b, -m))
    return from_edges(ds.lineup_ids_in_matchups(), edges)


def dump_edges(net: MatchupNetwork, stream: TextIO) -> None:
    for src, dst, w in net.edges():
        stream.write(f"{src} {dst} {w!r}\n")


def load_edges(stream: TextIO, nodes=None) -> MatchupNetwork:
    """Inverse of :func:`dump_edges`. Isolated nodes must be passed in ``nodes``."""
    edges = []
    ids = set(nodes or ())
    for line in stream:
        parts = line.split()
        if not parts:
            continue
        src, dst, w = int(parts[0]), int(parts[1]), float(parts[2])
        edges.append((src, dst, w))
        ids.update((src, dst))
    return from_edges(ids, edges)
