"""Deterministic seeding.

All randomness goes through numpy's ``PCG64`` bit generator. Child seeds are
derived from a master seed with :class:`numpy.random.SeedSequence`, using the
integer keys as the spawn key, so a derived stream depends only on
``(master, *keys)`` and never on the order in which workers ask for it.
"""

import numpy as np

_MASK64 = (1 << 64) - 1


def derive_seed(master, *keys):
    """Return a 64-bit child seed for ``master`` split along ``keys``."""
    seq = np.random.SeedSequence(entropy=int(master) & _MASK64,
                                 spawn_key=tuple(int(k) for k in keys))
    hi, lo = seq.generate_state(2, dtype=np.uint32)
    return (int(hi) << 32) | int(lo)


def make_rng(seed, *keys):
    """``numpy.random.Generator`` for ``seed`` (optionally split by ``keys``)."""
    if keys:
        seed = derive_seed(seed, *keys)
    return np.random.Generator(np.random.PCG64(int(seed) & _MASK64))
