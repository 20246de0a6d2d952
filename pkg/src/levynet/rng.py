"""Seed-stream splitting.

Every test or ensemble chunk draws from its own stream. A stream is the
``numpy.random.SeedSequence`` with entropy ``root_seed`` and spawn key
``(crc32(name), index)``, so streams are stable across runs, independent of
execution order, and never shared between named consumers.
"""
from __future__ import annotations

import zlib

import numpy as np

__all__ = ["stream_id", "seed_sequence", "generator", "as_generator"]


def stream_id(name: str) -> int:
    """Stable 32-bit identifier of a named stream."""
    return zlib.crc32(name.encode("utf-8")) & 0xFFFFFFFF


def seed_sequence(root_seed: int, name: str, index: int = 0) -> np.random.SeedSequence:
    """Seed sequence for chunk ``index`` of the stream called ``name``."""
    return np.random.SeedSequence(int(root_seed), spawn_key=(stream_id(name), int(index)))


def generator(root_seed: int, name: str, index: int = 0) -> np.random.Generator:
    """PCG64 generator for chunk ``index`` of stream ``name``."""
    return np.random.Generator(np.random.PCG64(seed_sequence(root_seed, name, index)))


def as_generator(rng: np.random.Generator | int | None) -> np.random.Generator:
    """Coerce a seed or generator into a ``Generator``."""
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)
