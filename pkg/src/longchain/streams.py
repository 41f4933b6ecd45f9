"""Counter-based uniform streams.

Every message delay is driven by its own infinite stream of uniforms,
addressed by an integer key and a position.  Values are a pure function
of ``(key, position)`` so a trial can be replayed, and any prefix of a
stream can be re-read later (the refresh construction needs this).

The scalar functions work on Python ints; the ``*_array`` variants do
the same arithmetic on numpy uint64 arrays and agree bit for bit.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MUL1 = 0xBF58476D1CE4E5B9
_MUL2 = 0x94D049BB133111EB
_KEY_INIT = 0x243F6A8885A308D3
_SCALE = 2.0 ** -53


def mix64(z: int) -> int:
    z = (z + _GOLDEN) & _MASK
    z = ((z ^ (z >> 30)) * _MUL1) & _MASK
    z = ((z ^ (z >> 27)) * _MUL2) & _MASK
    return z ^ (z >> 31)


def stream_key(*parts: int) -> int:
    """Fold integer parts (negative allowed) into a 64-bit stream key."""
    h = _KEY_INIT
    for p in parts:
        h = mix64(h ^ (int(p) & _MASK))
    return h


def uniform(key: int, position: int) -> float:
    """Uniform in the open interval (0, 1) at ``position`` of stream ``key``."""
    z = mix64(key ^ mix64(position & _MASK))
    return ((z >> 11) + 0.5) * _SCALE


def _signed(p):
    if isinstance(p, int) and p >= 1 << 63:
        return p - (1 << 64)
    return p


def _u64(x) -> np.ndarray:
    a = np.atleast_1d(np.asarray(x))
    if a.dtype == np.uint64:
        return a
    return a.astype(np.int64).view(np.uint64)


def mix64_array(z: np.ndarray) -> np.ndarray:
    z = _u64(z) + np.uint64(_GOLDEN)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MUL1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MUL2)
    return z ^ (z >> np.uint64(31))


def stream_key_array(*parts) -> np.ndarray:
    """Vectorised :func:`stream_key`; parts broadcast against each other."""
    arrays = np.broadcast_arrays(*[_u64(_signed(p)) for p in parts])
    h = np.full(arrays[0].shape, _KEY_INIT, dtype=np.uint64)
    for p in arrays:
        h = mix64_array(h ^ p)
    return h


def uniform_array(keys: np.ndarray, positions) -> np.ndarray:
    z = mix64_array(_u64(keys) ^ mix64_array(_u64(positions)))
    return ((z >> np.uint64(11)).astype(np.float64) + 0.5) * _SCALE
