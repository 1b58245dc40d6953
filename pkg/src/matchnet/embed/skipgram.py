"""Skip-gram with negative sampling over a walk corpus.

Every node within ``window`` positions of a centre node is a positive
context; negatives come from the walk-occurrence unigram distribution raised
to the 3/4 power. Training is plain SGD with a learning rate that decays
linearly from ``lr_initial`` to ``lr_initial / 100`` over all pair updates.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from numba import njit

from .walks import WalkCorpus

_LOSS_BUCKETS = 100


@dataclass(frozen=True)
class EmbedConfig:
    d: int = 128
    window: int = 10
    negatives: int = 5
    epochs: int = 1
    lr_initial: float = 0.025
    seed: int = 0

    def __post_init__(self):
        if self.d < 1 or self.window < 1 or self.negatives < 1 or self.epochs < 1:
            raise ValueError("d, window, negatives and epochs must be at least 1")
        if not self.lr_initial > 0:
            raise ValueError("lr_initial must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")


@dataclass(eq=False)
class Embedding:
    """Row ``k`` of ``matrix`` is the vector of lineup ``nodes[k]``."""

    nodes: tuple[int, ...]
    matrix: np.ndarray
    loss_curve: np.ndarray | None = None

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=np.float64)
        if self.matrix.shape[0] != len(self.nodes):
            raise ValueError("one vector per node required")
        if not np.all(np.isfinite(self.matrix)):
            raise ValueError("embedding contains non-finite entries")
        self._row = {lid: k for k, lid in enumerate(self.nodes)}

    @property
    def d(self) -> int:
        return self.matrix.shape[1]

    @property
    def vectors(self) -> dict[int, np.ndarray]:
        return {lid: self.matrix[k] for k, lid in enumerate(self.nodes)}

    def __contains__(self, lineup_id) -> bool:
        return lineup_id in self._row

    def __getitem__(self, lineup_id) -> np.ndarray:
        return self.matrix[self._row[lineup_id]]

    def __eq__(self, other):
        if not isinstance(other, Embedding):
            return NotImplemented
        return self.nodes == other.nodes and np.array_equal(self.matrix, other.matrix)

    __hash__ = None


def _log_sigmoid(x):
    return -np.logaddexp(0.0, -x)


def _sigmoid(x):
    return np.exp(_log_sigmoid(x))


def sgns_loss(center, context, negatives):
    """Negative-sampling loss of one (centre, context) pair.

    ``center`` is the input vector, ``context`` the output vector of the true
    context and ``negatives`` a ``(k, d)`` array of output vectors.
    """
    loss = -_log_sigmoid(center @ context)
    loss -= np.sum(_log_sigmoid(-(negatives @ center)))
    return float(loss)


def sgns_grad(center, context, negatives):
    """Gradients of :func:`sgns_loss` w.r.t. ``(center, context, negatives)``."""
    g_pos = _sigmoid(center @ context) - 1.0
    g_neg = _sigmoid(negatives @ center)
    d_center = g_pos * context + g_neg @ negatives
    d_context = g_pos * center
    d_negatives = np.outer(g_neg, center)
    return d_center, d_context, d_negatives


@njit(cache=True)
def _softplus(x):
    if x > 0:
        return x + math.log1p(math.exp(-x))
    return math.log1p(math.exp(x))


@njit(cache=True)
def _pair_update(syn0, syn1, center, targets, n_targets, lr, neu1e):
    """SGD step on one pair; ``targets[0]`` is the positive, the rest negatives.

    Returns the pair loss evaluated before the step.
    """
    dim = syn0.shape[1]
    for j in range(dim):
        neu1e[j] = 0.0
    loss = 0.0
    for t in range(n_targets):
        tgt = targets[t]
        f = 0.0
        for j in range(dim):
            f += syn0[center, j] * syn1[tgt, j]
        label = 1.0 if t == 0 else 0.0
        if t == 0:
            loss += _softplus(-f)
        else:
            loss += _softplus(f)
        s = 1.0 / (1.0 + math.exp(-f)) if f >= 0 else math.exp(f) / (1.0 + math.exp(f))
        g = (label - s) * lr
        for j in range(dim):
            neu1e[j] += g * syn1[tgt, j]
            syn1[tgt, j] += g * syn0[center, j]
    for j in range(dim):
        syn0[center, j] += neu1e[j]
    return loss


@njit(cache=True)
def _count_pairs(offsets, window):
    total = 0
    for w in range(len(offsets) - 1):
        n = offsets[w + 1] - offsets[w]
        for pos in range(n):
            total += min(n - 1, pos + window) - max(0, pos - window)
    return total


@njit(cache=True)
def _train_kernel(flat, offsets, window, negatives, neg_cdf, syn0, syn1, lr0, epochs,
                  total, rng_seed, loss_sum, loss_cnt):
    np.random.seed(rng_seed)
    targets = np.empty(negatives + 1, dtype=np.int64)
    neu1e = np.empty(syn0.shape[1])
    n_buckets = len(loss_sum)
    lr_min = lr0 / 100.0
    cdf_total = neg_cdf[-1]
    done = 0
    for _ in range(epochs):
        for w in range(len(offsets) - 1):
            lo = offsets[w]
            hi = offsets[w + 1]
            for pos in range(lo, hi):
                center = flat[pos]
                for cpos in range(max(lo, pos - window), min(hi, pos + window + 1)):
                    if cpos == pos:
                        continue
                    ctx = flat[cpos]
                    targets[0] = ctx
                    n_t = 1
                    for _k in range(negatives):
                        neg = np.searchsorted(neg_cdf, np.random.random() * cdf_total, side="right")
                        if neg >= len(neg_cdf):
                            neg = len(neg_cdf) - 1
                        if neg != ctx:
                            targets[n_t] = neg
                            n_t += 1
                    frac = done / total if total > 1 else 0.0
                    lr = lr0 - (lr0 - lr_min) * frac
                    loss = _pair_update(syn0, syn1, center, targets, n_t, lr, neu1e)
                    b = done * n_buckets // total
                    loss_sum[b] += loss
                    loss_cnt[b] += 1
                    done += 1


def _numba_seed(seed: int) -> int:
    return int(np.random.SeedSequence([seed, 1]).generate_state(1)[0])


def train_embedding(corpus: WalkCorpus, cfg: EmbedConfig) -> Embedding:
    """Fit input-side node vectors on ``corpus``; deterministic for a given seed.

    Nodes that never occur in a walk get the zero vector.
    """
    if len(corpus) == 0:
        raise ValueError("walk corpus is empty")
    n = len(corpus.nodes)
    flat = np.concatenate(corpus.walks).astype(np.int64)
    if flat.min() < 0 or flat.max() >= n:
        raise ValueError("walk contains an index outside the node table")
    offsets = np.zeros(len(corpus) + 1, dtype=np.int64)
    np.cumsum([len(w) for w in corpus.walks], out=offsets[1:])

    counts = np.bincount(flat, minlength=n).astype(np.float64)
    neg_cdf = np.cumsum(counts ** 0.75)

    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 0]))
    syn0 = (rng.random((n, cfg.d)) - 0.5) / cfg.d
    syn1 = np.zeros((n, cfg.d))

    total = _count_pairs(offsets, cfg.window) * cfg.epochs
    loss_sum = np.zeros(_LOSS_BUCKETS)
    loss_cnt = np.zeros(_LOSS_BUCKETS, dtype=np.int64)
    if total > 0:
        _train_kernel(flat, offsets, cfg.window, cfg.negatives, neg_cdf, syn0, syn1,
                      cfg.lr_initial, cfg.epochs, total, _numba_seed(cfg.seed),
                      loss_sum, loss_cnt)

    unseen = counts == 0
    if unseen.any():
        missing = [corpus.nodes[k] for k in np.flatnonzero(unseen)]
        warnings.warn(
            f"{len(missing)} node(s) absent from all walks get zero vectors: {missing[:10]}",
            stacklevel=2,
        )
        syn0[unseen] = 0.0
    curve = np.divide(loss_sum, loss_cnt, out=np.full(_LOSS_BUCKETS, np.nan), where=loss_cnt > 0)
    return Embedding(corpus.nodes, syn0, curve)


def dump_embedding(emb: Embedding, stream) -> None:
    for lid, row in zip(emb.nodes, emb.matrix):
        stream.write(str(lid) + " " + " ".join(repr(float(x)) for x in row) + "\n")


def load_embedding(stream) -> Embedding:
    nodes, rows = [], []
    for line in stream:
        parts = line.split()
        if not parts:
            continue
        nodes.append(int(parts[0]))
        rows.append([float(x) for x in parts[1:]])
    if len({len(r) for r in rows}) > 1:
        raise ValueError("inconsistent vector lengths in embedding file")
    return Embedding(tuple(nodes), np.array(rows, dtype=np.float64).reshape(len(nodes), -1))
