"""Counter-based random streams, one per ``(seed, replica)`` pair."""

from __future__ import annotations

import numpy as np


def replica_rng(seed: int, replica: int = 0) -> np.random.Generator:
    """Philox generator keyed by the seed and the replica index.

    Streams for different replicas are independent and do not depend on the
    order in which replicas are drawn.
    """
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(replica),))
    return np.random.Generator(np.random.Philox(ss))
