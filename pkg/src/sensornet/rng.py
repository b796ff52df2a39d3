"""Counter-based random streams for reproducible Monte Carlo.

Every stochastic routine in the package derives its randomness from a Philox
generator keyed by ``(seed, stream)``.  Streams indexed by sample number are
statistically independent and do not depend on execution order, so results
are identical for any batch size or worker count.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def philox_stream(seed: int, stream: int = 0) -> np.random.Generator:
    """Generator for the given 64-bit seed and stream index."""
    key = (int(stream) & _MASK64) << 64 | (int(seed) & _MASK64)
    return np.random.Generator(np.random.Philox(key=key))
