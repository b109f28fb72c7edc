"""Reproducible normal variates for simulation studies.

Simulations here must be replicable from a written recipe, not just from
"same library, same version".  The recipe:

1. Uniforms come from the Philox4x64-10 counter-based generator keyed by
   the integer seed, consumed as numpy delivers them: each double is
   (word >> 11) * 2**-53 in [0, 1).
2. Normals are Box-Muller pairs.  For pair i with uniforms (u1, u2):
   r = sqrt(-2 log(1 - u1)) (the 1-u maps [0,1) onto (0,1] so the log is
   finite), and the pair is (r cos(2 pi u2), r sin(2 pi u2)), emitted in
   that order.  A stream of k normals takes the first k values of the
   interleaved pair sequence.
3. Replicate r of a study keyed by master seed s uses seed s + r.

Any implementation of Philox and this pairing reproduces the streams
bit-for-bit.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["CounterNormals", "replicate_seed"]


class CounterNormals:
    """Sequential Box-Muller normal stream over Philox uniforms."""

    def __init__(self, seed: int):
        self._uniforms = np.random.Generator(np.random.Philox(key=seed))

    def normals(self, shape) -> np.ndarray:
        size = int(np.prod(shape))
        pairs = (size + 1) // 2
        u1 = 1.0 - self._uniforms.random(pairs)
        u2 = self._uniforms.random(pairs)
        r = np.sqrt(-2.0 * np.log(u1))
        out = np.empty(2 * pairs)
        out[0::2] = r * np.cos(2.0 * math.pi * u2)
        out[1::2] = r * np.sin(2.0 * math.pi * u2)
        return out[:size].reshape(shape)


def replicate_seed(master_seed: int, replicate: int) -> int:
    """Seed for one replicate of a study: master + replicate index."""
    return master_seed + replicate
