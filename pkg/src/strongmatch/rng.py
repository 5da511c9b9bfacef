"""Counter-based uniforms keyed by integer tuples.

Every random draw in the package is ``keyed_uniform(seed, *keys)``: a pure
function of the seed and the keys (trial, EdgeId, vertex pair, ...).  Draws
can be made in any order, in parallel, or for a subset of keys and still come
out identical, and adding edges never perturbs the draws of existing ones.

numpy's bit generators are sequential streams without vectorised random
access, so the mixing here is the SplitMix64 finaliser applied per key.
"""

from __future__ import annotations

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_MASK64 = (1 << 64) - 1


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def _as_u64(x) -> np.ndarray:
    arr = np.asarray(x)
    if arr.dtype == np.uint64:
        return arr
    if arr.dtype.kind in "iu":
        return arr.astype(np.int64).astype(np.uint64)
    if arr.dtype == object or arr.ndim == 0:
        return np.asarray(int(arr) & _MASK64, dtype=np.uint64)
    raise TypeError(f"keys must be integers, got dtype {arr.dtype}")


def keyed_bits(seed: int, *keys) -> np.ndarray:
    """64-bit hash of ``(seed, *keys)``; keys broadcast like numpy arrays."""
    with np.errstate(over="ignore"):
        h = _mix(np.asarray((int(seed) & _MASK64), dtype=np.uint64) + _GOLDEN)
        for key in keys:
            h = _mix(h ^ _mix(_as_u64(key) + _GOLDEN))
    return h


def keyed_uniform(seed: int, *keys) -> np.ndarray:
    """Uniform variates on ``[0, 1)`` with 53 random bits each."""
    return (keyed_bits(seed, *keys) >> np.uint64(11)).astype(np.float64) * (2.0 ** -53)


def derive_seed(seed: int, *keys) -> int:
    """A child seed (63 bits) for a sub-experiment identified by ``keys``."""
    return int(keyed_bits(seed, *keys)) >> 1
