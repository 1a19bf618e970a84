"""Input-validation helpers shared by the public API surfaces."""

from __future__ import annotations

import math

import numpy as np

from .errors import ConfigError, RadiusOutOfRange

__all__ = [
    "check_radius",
    "check_probability",
    "check_seed",
    "check_vertex_array",
    "require",
]


def check_radius(r: float) -> float:
    """Radii must lie in (0, sqrt(2)); at sqrt(2) the graph is a clique."""
    r = float(r)
    if not (0.0 < r < math.sqrt(2.0)):
        raise RadiusOutOfRange(f"radius {r} not in (0, sqrt(2))")
    return r


def check_probability(p: float, name: str = "p", zero_ok: bool = False) -> float:
    p = float(p)
    lo_ok = p >= 0.0 if zero_ok else p > 0.0
    if not (lo_ok and p <= 1.0):
        raise ConfigError(f"{name}={p} not a valid probability")
    return p


def check_seed(seed: int) -> int:
    seed = int(seed)
    if seed < 0:
        raise ConfigError(f"seed must be non-negative, got {seed}")
    return seed


def check_vertex_array(a, n: int, name: str = "vertices") -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    if a.size and (a.min() < 0 or a.max() >= n):
        raise ConfigError(f"{name} contains ids outside [0, {n})")
    return a


def require(cond: bool, exc_type, *args):
    if not cond:
        raise exc_type(*args)
