"""Deterministic seeding and random streams.

Every Monte Carlo trial draws from its own stream, keyed by a 64-bit
sub-seed derived from ``(master_seed, trial_index)`` with the SplitMix64
finalizer.  The derivation is a bijection in the trial index for a fixed
master seed, so sub-seeds never collide and trials can run in parallel
without coordination.
"""
from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    """SplitMix64 finalizer (the output mix of the splitmix64 generator)."""
    z = x & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def derive_seed(master_seed: int, trial_index: int) -> int:
    """Sub-seed for one trial: splitmix64(master + (trial+1) * golden).

    Parameters
    ----------
    master_seed : int
        64-bit master seed of the experiment.
    trial_index : int
        Nonnegative trial number.

    Returns
    -------
    int
        64-bit sub-seed, distinct for every trial index.
    """
    if trial_index < 0:
        raise ValueError("trial_index must be nonnegative")
    return splitmix64((master_seed + (trial_index + 1) * _GOLDEN) & _MASK64)


def derive_seeds(master_seed: int, n_trials: int) -> np.ndarray:
    """Vectorized ``derive_seed`` for trials ``0 .. n_trials-1``."""
    with np.errstate(over="ignore"):
        idx = np.arange(1, n_trials + 1, dtype=np.uint64)
        z = np.uint64(master_seed) + idx * np.uint64(_GOLDEN)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))


def stream(seed: int) -> np.random.Generator:
    """Uniform random stream for a 64-bit seed (PCG64 generator)."""
    return np.random.Generator(np.random.PCG64(seed))


def trial_stream(master_seed: int, trial_index: int) -> np.random.Generator:
    """Stream for one trial of an experiment."""
    return stream(derive_seed(master_seed, trial_index))


def polar_gaussians(rng: np.random.Generator, count: int) -> np.ndarray:
    """`count` standard normal draws by the polar (Marsaglia) method.

    Pairs (u, v) uniform on the square are rejected outside the open unit
    disc; accepted pairs map to two independent normals.  Block sizes
    depend only on how many draws are still missing, so the output is a
    pure function of the underlying uniform stream.
    """
    out = np.empty(count)
    filled = 0
    while filled < count:
        # acceptance rate is pi/4 and each hit yields two normals
        block = max(256, int((count - filled) * 0.7) + 16)
        u = 2.0 * rng.random(block) - 1.0
        v = 2.0 * rng.random(block) - 1.0
        s = u * u + v * v
        ok = (s > 0.0) & (s < 1.0)
        f = np.sqrt(-2.0 * np.log(s[ok]) / s[ok])
        pair = np.concatenate([u[ok] * f, v[ok] * f])
        take = min(pair.size, count - filled)
        out[filled:filled + take] = pair[:take]
        filled += take
    return out
