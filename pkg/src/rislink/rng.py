"""Reproducible random-number streams for parallel Monte Carlo runs.

Every random draw in this package comes from a stream addressed by
``(master_seed, stream_id)``. Streams are backed by the counter-based
Philox4x64 generator keyed with exactly those two 64-bit words, so a run
is bit-reproducible on any machine and any worker count: a task that
knows its indices can open its own stream without coordination.

Derivation rule (documented so runs can be reproduced externally):

* ``stream_id = fold(tag, i0, i1, ...)`` where ``fold`` starts at 0 and
  absorbs each 64-bit value ``v`` via ``h = splitmix64(h XOR v)``.
* The generator is ``numpy.random.Philox(key=[master_seed, stream_id])``
  with the counter starting at zero, wrapped in ``numpy.random.Generator``.

Tags keep unrelated draw purposes (channel fading, symbol choices, noise)
in disjoint streams even when their loop indices coincide.
"""

from __future__ import annotations

import numpy as np

_MASK64 = 0xFFFFFFFFFFFFFFFF

# Stream purpose tags.
TAG_CHANNEL = 0x01
TAG_TRIALS = 0x02
TAG_THEORY = 0x03
TAG_GENERIC = 0x0F


def splitmix64(z: int) -> int:
    """One SplitMix64 scrambling round (Steele et al. finalizer)."""
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def derive_stream_id(*indices: int) -> int:
    """Fold a tuple of non-negative integers into one 64-bit stream id."""
    h = 0
    for v in indices:
        h = splitmix64(h ^ (int(v) & _MASK64))
    return h


def stream(master_seed: int, *indices: int) -> np.random.Generator:
    """Open the Philox stream addressed by (master_seed, fold(indices))."""
    key = [int(master_seed) & _MASK64, derive_stream_id(*indices)]
    return np.random.Generator(np.random.Philox(key=key))
