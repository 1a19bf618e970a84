"""Deterministic random-number substreams.

All randomness in the package flows through PCG64 generators whose seeds are
derived by hashing (master seed, purpose tag, index) with SHA-256.  Point
sampling, percolation coins, strategy retries etc. therefore never share or
disturb each other's streams, and every artifact is reproducible from the
master seed alone, on any platform.
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["substream", "subseed"]


def subseed(seed: int, tag: str, index: int = 0) -> int:
    """Derive a 64-bit sub-seed from (seed, tag, index)."""
    payload = f"{int(seed)}|{tag}|{int(index)}".encode()
    digest = hashlib.sha256(payload).digest()
    return int.from_bytes(digest[:8], "little")


def substream(seed: int, tag: str, index: int = 0) -> np.random.Generator:
    """A PCG64 generator for one purpose, independent of all other tags."""
    return np.random.Generator(np.random.PCG64(subseed(seed, tag, index)))
