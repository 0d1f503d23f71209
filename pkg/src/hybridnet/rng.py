"""Seedable random-number streams with deterministic per-subsystem splitting.

Every stochastic component draws from its own PCG64 stream, derived from the
run seed via ``numpy.random.SeedSequence.spawn``. Streams are assigned by
label in a fixed order, so two runs with the same seed produce identical
draws in every subsystem regardless of how the other subsystems consume
their streams.
"""

from __future__ import annotations

import numpy as np

# Fixed label order; appending new labels keeps existing streams stable.
STREAM_LABELS = ("mobility", "traffic", "drops", "placement", "latency")


def spawn_streams(seed: int, labels: tuple[str, ...] = STREAM_LABELS) -> dict[str, np.random.Generator]:
    """Return one independent Generator per label, in label order."""
    children = np.random.SeedSequence(seed).spawn(len(labels))
    return {label: np.random.Generator(np.random.PCG64(child)) for label, child in zip(labels, children)}


def substreams(seed: int, count: int) -> list[np.random.Generator]:
    """Independent generators for sharded work, merged in shard order."""
    return [np.random.Generator(np.random.PCG64(child)) for child in np.random.SeedSequence(seed).spawn(count)]
