"""
Seeded random streams and ordered parallel evaluation
Every stochastic operation takes an explicit integer seed; child streams
are derived with numpy SeedSequence so batches never share state
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, TypeVar

import numpy as np

from config.settings import default_threads

T = TypeVar("T")
R = TypeVar("R")


def make_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def child_rngs(seed: int, count: int) -> List[np.random.Generator]:
    """Independent generators for `count` parallel batches"""
    return [np.random.default_rng(child) for child in np.random.SeedSequence(seed).spawn(count)]


def derive_seed(seed: int, *keys: int) -> int:
    """Deterministic 32-bit seed for a (seed, key...) combination, e.g. one per epoch"""
    return int(np.random.SeedSequence([seed, *keys]).generate_state(1)[0])


def ordered_map(fn: Callable[[T], R], items: Sequence[T], threads: Optional[int] = None) -> List[R]:
    """
    Map fn over items, possibly on a thread pool

    Results always come back in input order so reductions are reproducible.
    """
    workers = default_threads() if threads is None else max(1, threads)
    if workers == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))
