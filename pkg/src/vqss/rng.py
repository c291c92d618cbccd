"""Seeded random streams.

Splitting rule: the stream for ``(seed, purpose, index)`` is PCG64 seeded by
``SeedSequence([seed, purpose, index])``. Trial i therefore sees the same bits
whatever the trial count or worker layout.

The simulator uses a pseudo-random generator throughout; a real deployment
would need a cryptographic source for the participants' masks.
"""

import secrets

import numpy as np

DEAL = 0
SESSION = 1
ATTACK = 2


def stream(seed: int, *path: int) -> np.random.Generator:
    if seed < 0 or any(p < 0 for p in path):
        raise ValueError("seed and stream path must be non-negative")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, *path])))


def fresh_seed() -> int:
    return secrets.randbits(63)
