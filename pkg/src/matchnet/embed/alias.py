"""Vose alias tables for O(1) draws from a fixed discrete distribution."""

import numpy as np
from numba import njit


def build_alias(probs):
    """Return ``(accept, alias)`` arrays for the distribution ``probs``.

    Column ``k`` keeps outcome ``k`` with probability ``accept[k]`` and
    otherwise yields ``alias[k]``. ``probs`` need not be normalised.
    """
    probs = np.asarray(probs, dtype=np.float64)
    n = len(probs)
    if n == 0:
        raise ValueError("empty distribution")
    if np.any(probs < 0) or not probs.sum() > 0:
        raise ValueError("probabilities must be non-negative with positive total")
    scaled = probs * (n / probs.sum())
    accept = np.ones(n)
    alias = np.arange(n, dtype=np.int64)
    small = [i for i in range(n) if scaled[i] < 1.0]
    large = [i for i in range(n) if scaled[i] >= 1.0]
    while small and large:
        s = small.pop()
        g = large.pop()
        accept[s] = scaled[s]
        alias[s] = g
        scaled[g] = scaled[g] + scaled[s] - 1.0
        if scaled[g] < 1.0:
            small.append(g)
        else:
            large.append(g)
    # leftovers are 1 up to rounding
    return accept, alias


def alias_masses(accept, alias):
    """Exact distribution encoded by an alias table (for verification)."""
    n = len(accept)
    mass = np.asarray(accept, dtype=np.float64) / n
    for k in range(n):
        mass[alias[k]] += (1.0 - accept[k]) / n
    return mass


@njit(cache=True)
def alias_draw(accept, alias, offset, n, u):
    """Draw a local index in ``[0, n)`` from the table at ``offset`` using one uniform ``u``."""
    x = u * n
    k = int(x)
    if k >= n:
        k = n - 1
    if x - k < accept[offset + k]:
        return k
    return alias[offset + k]
