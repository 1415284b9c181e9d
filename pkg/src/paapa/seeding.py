"""Replica seed derivation and generator construction.

Replica seeds are the splitmix64 sequence started at the base seed:
``derive_seed(base, r)`` is the (r+1)-th splitmix64 output. The state
increment is odd, so the map is injective in ``r`` for a fixed base, and the
finalizer is a bijection on 64-bit words.
"""

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15

RNG_NAME = "numpy.random.PCG64"


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(base: int, replica: int) -> int:
    if not 0 <= base <= MASK64:
        raise ValueError(f"base seed must be a 64-bit unsigned integer, got {base}")
    if replica < 0:
        raise ValueError(f"replica index must be non-negative, got {replica}")
    return mix64(base + (replica + 1) * GOLDEN_GAMMA)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def replica_rng(base: int, replica: int) -> np.random.Generator:
    return make_rng(derive_seed(base, replica))


def rng_identity() -> dict:
    return {"generator": RNG_NAME, "numpy_version": np.__version__,
            "seed_derivation": "splitmix64"}
