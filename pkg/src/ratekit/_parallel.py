"""Seeding and worker-pool helpers shared by Monte-Carlo routines."""

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np


def worker_count(default=1):
    """Worker budget from ``RATEKIT_THREADS`` (falls back to ``default``)."""
    raw = os.environ.get("RATEKIT_THREADS")
    if not raw:
        return default
    try:
        return max(1, int(raw))
    except ValueError:
        return default


def rng(seed):
    """Counter-based generator (Philox) for a seed or SeedSequence."""
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    return np.random.Generator(np.random.Philox(seed))


def trial_rngs(seed, trials):
    """One independent generator per trial, derived only from ``seed``."""
    return [rng(s) for s in np.random.SeedSequence(seed).spawn(trials)]


def ordered_map(fn, items, workers=None):
    """``map`` that may fan out to threads but always returns input order."""
    items = list(items)
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
