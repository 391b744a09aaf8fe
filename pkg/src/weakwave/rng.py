"""Counter-based uniform streams.

Draw ``k`` of stream ``s`` under seed ``seed`` is a pure function of
``(seed, s, k)``: the index range is cut into fixed blocks and block ``b``
is generated by a Philox bit generator keyed by ``(seed, s)`` with its
counter started at ``b``.  Any partition of the blocks over worker
threads therefore yields identical numbers.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

BLOCK = 1 << 16
THREADS_ENV = "WEAKWAVE_THREADS"


def worker_count() -> int:
    """Worker cap from ``WEAKWAVE_THREADS`` (default: CPU count)."""
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw.strip() == "":
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError as exc:
        raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from exc
    if n < 1:
        raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


def _block(seed: int, stream: int, block: int) -> np.ndarray:
    key = (seed & 0xFFFF_FFFF_FFFF_FFFF) | ((stream & 0xFFFF_FFFF_FFFF_FFFF) << 64)
    bitgen = np.random.Philox(key=key, counter=[0, 0, block, 0])
    return np.random.Generator(bitgen).random(BLOCK)


def uniforms(seed: int, stream: int, start: int, count: int, workers: int | None = None) -> np.ndarray:
    """Uniform [0, 1) draws with indices ``start .. start + count - 1``."""
    if count <= 0:
        return np.empty(0)
    first, last = start // BLOCK, (start + count - 1) // BLOCK
    blocks = range(first, last + 1)
    workers = min(worker_count() if workers is None else workers, len(blocks))
    if workers <= 1:
        parts = [_block(seed, stream, b) for b in blocks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: _block(seed, stream, b), blocks))
    flat = np.concatenate(parts)
    offset = start - first * BLOCK
    return flat[offset:offset + count]
