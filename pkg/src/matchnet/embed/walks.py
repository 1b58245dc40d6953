"""Second-order biased random walks over a matchup network.

A walk sitting on ``curr`` after arriving from ``prev`` weights each
out-neighbour ``x`` of ``curr`` by ``w(curr, x)`` times a bias:
``1/p`` when ``x == prev``, ``1`` when ``prev -> x`` is an edge, and ``1/q``
otherwise. The first hop uses the edge weights alone. Walks stop early at
nodes without out-edges.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from ..netbuild import MatchupNetwork
from .alias import alias_draw, build_alias

_CHUNK = 256


@dataclass(frozen=True)
class WalkConfig:
    p: float = 0.5
    q: float = 3.0
    num_walks: int = 3000
    walk_length: int = 3500
    seed: int = 0

    def __post_init__(self):
        if not (self.p > 0 and self.q > 0):
            raise ValueError(f"p and q must be positive, got p={self.p}, q={self.q}")
        if self.num_walks < 1 or self.walk_length < 1:
            raise ValueError("num_walks and walk_length must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")


@dataclass(frozen=True, eq=False)
class WalkCorpus:
    """Walks as node-index arrays, plus the lineup ids they index into."""

    nodes: tuple[int, ...]
    walks: list[np.ndarray]

    def __len__(self):
        return len(self.walks)

    def __iter__(self):
        return iter(self.walks)

    def __eq__(self, other):
        if not isinstance(other, WalkCorpus):
            return NotImplemented
        return (
            self.nodes == other.nodes
            and len(self.walks) == len(other.walks)
            and all(np.array_equal(a, b) for a, b in zip(self.walks, other.walks))
        )

    __hash__ = None

    @property
    def lengths(self) -> np.ndarray:
        """Realised number of nodes per walk."""
        return np.array([len(w) for w in self.walks], dtype=np.int64)

    def as_lineup_ids(self) -> list[list[int]]:
        return [[self.nodes[i] for i in w] for w in self.walks]


def transition_distribution(net: MatchupNetwork, prev, curr: int, p: float, q: float):
    """Next-step distribution from node index ``curr``.

    Returns ``(neighbours, probabilities)``; both are empty when ``curr`` is a
    dead end. ``prev`` is ``None`` on the first hop.
    """
    nbrs, w = net.out_neighbors(curr)
    if len(nbrs) == 0:
        return nbrs.copy(), np.zeros(0)
    if prev is None:
        mass = w.astype(np.float64)
    else:
        prev_nbrs, _ = net.out_neighbors(prev)
        bias = np.where(np.isin(nbrs, prev_nbrs), 1.0, 1.0 / q)
        bias[nbrs == prev] = 1.0 / p
        mass = bias * w
    return nbrs.copy(), mass / mass.sum()


@dataclass(frozen=True, eq=False)
class TransitionTables:
    """Alias tables for every first hop (per node) and every later hop (per edge).

    Node tables are aligned with the CSR arrays of the network. The table for
    edge ``e = (prev -> curr)`` spans ``curr``'s out-neighbours and starts at
    ``edge_offset[e]``.
    """

    indptr: np.ndarray
    indices: np.ndarray
    node_accept: np.ndarray
    node_alias: np.ndarray
    edge_offset: np.ndarray
    edge_accept: np.ndarray
    edge_alias: np.ndarray


def build_tables(net: MatchupNetwork, p: float, q: float) -> TransitionTables:
    n_edges = net.n_edges
    node_accept = np.ones(n_edges)
    node_alias = np.zeros(n_edges, dtype=np.int64)
    for i in range(net.n_nodes):
        lo, hi = net.indptr[i], net.indptr[i + 1]
        if hi > lo:
            _, probs = transition_distribution(net, None, i, p, q)
            node_accept[lo:hi], node_alias[lo:hi] = build_alias(probs)

    degree = np.diff(net.indptr)
    edge_offset = np.zeros(n_edges + 1, dtype=np.int64)
    np.cumsum(degree[net.indices], out=edge_offset[1:])
    edge_accept = np.ones(edge_offset[-1])
    edge_alias = np.zeros(edge_offset[-1], dtype=np.int64)
    for prev in range(net.n_nodes):
        for e in range(net.indptr[prev], net.indptr[prev + 1]):
            curr = net.indices[e]
            lo, hi = edge_offset[e], edge_offset[e + 1]
            if hi > lo:
                _, probs = transition_distribution(net, prev, curr, p, q)
                edge_accept[lo:hi], edge_alias[lo:hi] = build_alias(probs)
    return TransitionTables(
        np.asarray(net.indptr, dtype=np.int64),
        np.asarray(net.indices, dtype=np.int64),
        node_accept,
        node_alias,
        edge_offset,
        edge_accept,
        edge_alias,
    )


@njit(cache=True)
def _walk_kernel(starts, uniforms, indptr, indices, node_accept, node_alias,
                 edge_offset, edge_accept, edge_alias, out, lengths):
    n_walks, n_steps = uniforms.shape
    for w in range(n_walks):
        curr = starts[w]
        out[w, 0] = curr
        length = 1
        edge = -1
        for step in range(n_steps):
            lo = indptr[curr]
            deg = indptr[curr + 1] - lo
            if deg == 0:
                break
            if edge < 0:
                k = alias_draw(node_accept, node_alias, lo, deg, uniforms[w, step])
            else:
                k = alias_draw(edge_accept, edge_alias, edge_offset[edge], deg, uniforms[w, step])
            edge = lo + k
            curr = indices[edge]
            out[w, length] = curr
            length += 1
        lengths[w] = length


def walk_uniforms(seed: int, walk_index: int, n: int) -> np.ndarray:
    """The ``n`` uniforms that drive walk ``walk_index``; independent per walk."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, walk_index]))
    return rng.random(n)


def generate_walks(net: MatchupNetwork, cfg: WalkConfig) -> WalkCorpus:
    """``cfg.num_walks`` walks with start nodes assigned round-robin over sorted nodes."""
    if net.n_nodes == 0:
        raise ValueError("cannot walk an empty network")
    tables = build_tables(net, cfg.p, cfg.q)
    walks: list[np.ndarray] = []
    for lo in range(0, cfg.num_walks, _CHUNK):
        ids = np.arange(lo, min(lo + _CHUNK, cfg.num_walks))
        starts = (ids % net.n_nodes).astype(np.int64)
        uniforms = np.stack([walk_uniforms(cfg.seed, int(i), cfg.walk_length) for i in ids])
        out = np.empty((len(ids), cfg.walk_length + 1), dtype=np.int64)
        lengths = np.empty(len(ids), dtype=np.int64)
        _walk_kernel(starts, uniforms, tables.indptr, tables.indices, tables.node_accept,
                     tables.node_alias, tables.edge_offset, tables.edge_accept,
                     tables.edge_alias, out, lengths)
        walks.extend(out[k, :lengths[k]].copy() for k in range(len(ids)))
    return WalkCorpus(net.nodes, walks)
