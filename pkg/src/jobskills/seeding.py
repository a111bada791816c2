"""Seed derivation shared by the stochastic stages."""
from __future__ import annotations

import numpy as np


def derive_seed(master: int, *keys: int) -> int:
    """Independent child seed for a (master, keys...) path."""
    return int(np.random.SeedSequence([int(master), *map(int, keys)]).generate_state(1, dtype=np.uint32)[0])
