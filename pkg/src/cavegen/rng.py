"""
Seed derivation.

Every random draw in the generator comes from a numpy ``Generator`` backed by
PCG64. Streams are never shared between phases: each phase of each world gets
its own stream derived from ``SeedSequence([master_seed, world_index, tag])``
where ``tag`` is the CRC32 of a short phase name. Python's ``hash()`` is never
used (it is salted per process).
"""

from __future__ import annotations

import zlib

import numpy as np

MASK64 = (1 << 64) - 1


def _tag(name: str) -> int:
    return zlib.crc32(name.encode("utf-8")) & 0xFFFFFFFF


def derive_seed(master_seed: int, *keys: int | str) -> int:
    """Deterministic 64-bit seed from a master seed and a sequence of keys."""
    entropy = [int(master_seed) & MASK64]
    entropy += [_tag(k) if isinstance(k, str) else int(k) & MASK64 for k in keys]
    state = np.random.SeedSequence(entropy).generate_state(2, dtype=np.uint32)
    return (int(state[0]) << 32) | int(state[1])


def world_seed(master_seed: int, index: int) -> int:
    return derive_seed(master_seed, index, "world")


def stream(seed: int, phase: str) -> np.random.Generator:
    """Independent generator for one phase ("structure", "paths", ...) of one world."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed) & MASK64, _tag(phase)])))
