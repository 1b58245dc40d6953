"""Node embeddings from biased random walks and skip-gram training."""

from .skipgram import (
    EmbedConfig,
    Embedding,
    dump_embedding,
    load_embedding,
    sgns_grad,
    sgns_loss,
    train_embedding,
)
from .walks import WalkConfig, WalkCorpus, generate_walks, transition_distribution


def embed_network(net, walk_cfg: WalkConfig, embed_cfg: EmbedConfig) -> Embedding:
    return train_embedding(generate_walks(net, walk_cfg), embed_cfg)


__all__ = [
    "EmbedConfig",
    "Embedding",
    "WalkConfig",
    "WalkCorpus",
    "dump_embedding",
    "embed_network",
    "generate_walks",
    "load_embedding",
    "sgns_grad",
    "sgns_loss",
    "train_embedding",
    "transition_distribution",
]
