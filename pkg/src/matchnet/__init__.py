"""Lineup matchup prediction from network embeddings."""

__version__ = "0.1.0"
