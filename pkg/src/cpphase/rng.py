"""Deterministic random-stream derivation for reproducible parallel Monte Carlo.

Every stochastic routine in the package draws its randomness from a stream
keyed by ``(master_seed, module_tag, index)``.  Streams are derived with
``numpy.random.SeedSequence`` and consumed either by a Philox counter-based
generator (Python-level sampling) or by a splitmix64 state embedded in the
compiled kernels.  Identical keys give identical streams on every platform
and under any parallel schedule.
"""
from __future__ import annotations

import zlib

import numpy as np

# Recorded in run manifests so outputs are attributable to a generator.
GENERATOR_NAME = "philox4x64(seedseq) / splitmix64(kernels)"


def _tag(module: str) -> int:
    return zlib.crc32(module.encode("ascii"))


def seed_sequence(master_seed: int, module: str, index: int = 0) -> np.random.SeedSequence:
    """SeedSequence keyed by (master seed, module tag, stream index)."""
    return np.random.SeedSequence(master_seed, spawn_key=(_tag(module), int(index)))


def stream(master_seed: int, module: str, index: int = 0) -> np.random.Generator:
    """Independent Generator for the given key. Cheap enough to create per replica."""
    return np.random.Generator(np.random.Philox(seed_sequence(master_seed, module, index)))


def stream_id(master_seed: int, module: str, index: int = 0) -> str:
    return f"{master_seed}/{module}/{index}"


def substream_seeds(master_seed: int, module: str, n: int, offset: int = 0) -> np.ndarray:
    """uint64 seeds feeding the compiled kernels, one per replica.

    Derivation goes through SeedSequence so kernel streams stay independent of
    how many replicas a batch contains and of the batch's thread schedule.
    """
    out = np.empty(n, dtype=np.uint64)
    for i in range(n):
        out[i] = seed_sequence(master_seed, module, offset + i).generate_state(1, np.uint64)[0]
    return out


# splitmix64, vectorised.  Used for keyed per-pair uniforms in the generators
# (monotone couplings need the same uniform for the same vertex pair).
_SM_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_SM_M1 = np.uint64(0xBF58476D1CE4E5B9)
_SM_M2 = np.uint64(0x94D049BB133111EB)


def splitmix64(x: np.ndarray) -> np.ndarray:
    """One splitmix64 mixing round on a uint64 array (wrapping arithmetic)."""
    z = (x + _SM_GAMMA).astype(np.uint64)
    z ^= z >> np.uint64(30)
    z *= _SM_M1
    z ^= z >> np.uint64(27)
    z *= _SM_M2
    z ^= z >> np.uint64(31)
    return z


def pair_uniforms(seed: int, i: np.ndarray, j: np.ndarray) -> np.ndarray:
    """Uniform(0,1) keyed by (seed, unordered pair {i, j}).

    Deterministic in the pair, so regenerating a graph with pointwise larger
    connection probabilities keeps every previously accepted edge.
    """
    a = np.minimum(i, j).astype(np.uint64)
    b = np.maximum(i, j).astype(np.uint64)
    key = splitmix64(np.uint64(seed) ^ splitmix64(a) ^ splitmix64(splitmix64(b)))
    return (key >> np.uint64(11)).astype(np.float64) * 2.0**-53
