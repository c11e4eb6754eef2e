"""Deterministic, schedule-independent random streams.

Each (seed, *stream) label is hashed into an independent Philox key, so
a sample's draws depend only on its label and never on which worker or
in which order it ran.  Labels may mix ints and strings.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1


def _splitmix64(state: int) -> tuple[int, int]:
    state = (state + 0x9E3779B97F4A7C15) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return state, z ^ (z >> 31)


def mix(seed: int, *stream) -> int:
    """Collapse a label into a single 64-bit value."""
    state = seed & _MASK
    state, out = _splitmix64(state)
    for part in stream:
        if isinstance(part, str):
            for byte in part.encode():
                state, h = _splitmix64(state ^ byte)
                out ^= h
        else:
            state, h = _splitmix64(state ^ (int(part) & _MASK))
            out ^= h
    return out


def philox(seed: int, *stream) -> np.random.Generator:
    """Independent generator for the given label."""
    k0 = mix(seed, "key0", *stream)
    k1 = mix(seed, "key1", *stream)
    return np.random.Generator(np.random.Philox(key=np.array([k0, k1], dtype=np.uint64)))
