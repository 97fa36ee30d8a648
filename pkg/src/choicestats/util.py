"""Small shared utilities: deterministic seeding and optional process pools."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor

import numpy as np


def seed_from(*parts):
    """Deterministic 64-bit seed from a tuple of non-negative integers.

    Hashing goes through numpy's SeedSequence so the derived streams for
    (base, 0), (base, 1), ... are independent and platform-stable. Order
    matters: seed_from(a, b) != seed_from(b, a) in general.
    """
    ss = np.random.SeedSequence([int(p) for p in parts])
    return int(ss.generate_state(1, np.uint64)[0])


def parallel_map(fn, items, jobs=1):
    """Map fn over items, preserving order; jobs > 1 uses worker processes.

    Every item must carry its own seeds, so the result is identical for any
    job count.
    """
    items = list(items)
    if jobs is None or jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))
