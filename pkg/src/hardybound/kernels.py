"""Backend selection and the deterministic block scheduler for Monte Carlo loops.

The compiled extension is used when it imports; setting
``HARDYBOUND_PURE_PYTHON=1`` forces the NumPy fallback.  Replications are cut
into fixed-size blocks, each with its own generator spawned from
``(seed, tag, block)``, so results do not depend on the worker count.
"""
from __future__ import annotations

import os
import zlib
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _fallback

BLOCK_REPS = 256

if os.environ.get("HARDYBOUND_PURE_PYTHON", "").strip() not in ("", "0"):
    _compiled = None
else:
    try:
        from . import _kernels as _compiled
    except ImportError:
        _compiled = None

BACKEND = "compiled" if _compiled is not None else "python"


def _arr(x):
    return np.ascontiguousarray(x, dtype=float)


def quantile_many(spec, u, backend=None):
    """Vectorized lower-endpoint quantile for a :class:`KernelSpec`."""
    mod = _module(backend)
    return mod.quantile_many(spec.kind, _arr(spec.levels), _arr(spec.values), float(spec.a), float(spec.b), _arr(u))


def _module(backend):
    backend = backend or BACKEND
    if backend == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not available")
        return _compiled
    return _fallback


def slot_averages(rng, spec, fam0, fam1, split, mode, reps, backend=None):
    """Per-replication averages over one slot family (see the module docstring).

    ``fam0`` and ``fam1`` are ``(base_levels, width, lo_clamp, hi_clamp)``.
    """
    b0, w0, lo0, hi0 = fam0
    b1, w1, lo1, hi1 = fam1
    args = (
        spec.kind, _arr(spec.levels), _arr(spec.values), float(spec.a), float(spec.b),
        _arr(b0), float(w0), _arr(lo0), _arr(hi0),
        _arr(b1), float(w1), _arr(lo1), _arr(hi1),
        float(split), int(mode), int(reps),
    )
    if (backend or BACKEND) == "compiled":
        return _module("compiled").slot_averages(rng.bit_generator, *args)
    return _fallback.slot_averages(rng, *args)


def stream_tag(label: str) -> int:
    return zlib.crc32(label.encode())


def block_rng(seed, tag, block):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(tag, block))))


def run_blocks(fn, reps, seed, tag, workers=1, block_reps=BLOCK_REPS):
    """Evaluate ``fn(rng, rows)`` over fixed blocks and concatenate in block order."""
    reps = int(reps)
    nblocks = -(-reps // block_reps)

    def one(b):
        rows = min(block_reps, reps - b * block_reps)
        return fn(block_rng(seed, tag, b), rows)

    if workers <= 1 or nblocks <= 1:
        parts = [one(b) for b in range(nblocks)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(one, range(nblocks)))
    if not parts:
        return np.empty(0)
    return np.concatenate(parts)
