"""Seeded random streams.

Every random draw in rmchannel comes from :func:`make_rng`. A generator is
identified by ``(seed, stream, index)``: ``seed`` is the user seed, ``stream``
separates the kinds of draws (so GUE matrices and Haar unitaries sharing a seed
stay independent) and ``index`` numbers the members of an ensemble. The key is
fed to a :class:`numpy.random.SeedSequence` as ``spawn_key`` and drives a
counter-based Philox bit generator, so member ``k`` of a sweep is the same
matrix no matter how many workers produced the sweep.
"""

import numpy as np

GUE_STREAM = 1
HAAR_STREAM = 2
POISSON_STREAM = 3
BOOTSTRAP_STREAM = 4

SEED_MASK = (1 << 64) - 1


def make_rng(seed: int, stream: int, index: int = 0) -> np.random.Generator:
    """Return the generator for member ``index`` of ``stream`` under ``seed``."""
    sequence = np.random.SeedSequence(int(seed) & SEED_MASK, spawn_key=(stream, index))
    return np.random.Generator(np.random.Philox(sequence))
