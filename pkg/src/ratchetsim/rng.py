"""Reproducible per-trajectory random streams.

Every trajectory owns a counter-based Philox stream keyed by
(seed, unit_index, trajectory_index), so results are bit-identical under
any batching or worker schedule. A trajectory consumes its stream in a
fixed order: two uniforms for the initial condition, then the noise
sequence.
"""

from __future__ import annotations

import numpy as np


def trajectory_generator(seed: int, unit: int, index: int) -> np.random.Generator:
    """Stream for one trajectory of one experiment unit."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(unit, index))
    return np.random.Generator(np.random.Philox(ss))


def trajectory_generators(seed: int, unit: int, count: int) -> list[np.random.Generator]:
    return [trajectory_generator(seed, unit, i) for i in range(count)]


def initial_conditions(
    gens: list[np.random.Generator],
    x_lo: float,
    x_hi: float,
    p_lo: float,
    p_hi: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Draw (x0, p0) per trajectory, uniform over the given rectangle."""
    n = len(gens)
    x = np.empty(n)
    p = np.empty(n)
    for i, g in enumerate(gens):
        x[i] = g.uniform(x_lo, x_hi)
        p[i] = g.uniform(p_lo, p_hi)
    return x, p


def normal_block(gens: list[np.random.Generator], n_steps: int) -> np.ndarray:
    """Standard-normal block of shape (n_steps, len(gens)).

    Column i holds the next `n_steps` draws of trajectory i's stream, in
    stream order, so chunking over steps never changes a trajectory's
    sequence.
    """
    n = len(gens)
    out = np.empty((n, n_steps))
    for i, g in enumerate(gens):
        out[i] = g.standard_normal(n_steps)
    return np.ascontiguousarray(out.T)
