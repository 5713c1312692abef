"""Classical engine: the dissipative noisy kicked map on ensembles.

One kick advances (x, p) by

    p' = gamma * p + K [sin x + a sin(2x + phi)] + xi
    x' = x + p'

with xi a zero-mean Gaussian of variance 2 (1 - gamma) T. Positions are
stored unwrapped; the force wraps x mod 2pi at evaluation so precision
does not degrade over long runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import rng as _rng
from .observables import CurrentSeries
from .params import SimulationParams, noise_std, validate

TWO_PI = 2.0 * np.pi

# Default initial-condition cell: x in [0, pi), p in [-pi, pi].
DEFAULT_REGION = (0.0, float(np.pi), -float(np.pi), float(np.pi))

# Trajectory block size for noisy runs; fixed so reductions are
# schedule-independent.
_BLOCK = 1 << 18
# Upper bound on noise-buffer elements per chunk.
_NOISE_ELEMS = 1 << 23


@dataclass(frozen=True)
class PhasePoint:
    """Single classical state (x unwrapped, p in map units)."""

    x: float
    p: float


@dataclass
class Ensemble:
    """Bundle of trajectories with their private noise streams.

    `streams` may be None for zero-temperature evolution (no noise is
    drawn); `step_count` counts kicks applied so far, identical for all
    points.
    """

    x: np.ndarray
    p: np.ndarray
    streams: list | None = None
    step_count: int = 0

    def __post_init__(self):
        if self.x.shape != self.p.shape or self.x.ndim != 1:
            raise ValueError("x and p must be 1-d arrays of equal length")

    def __len__(self) -> int:
        return self.x.size

    def points(self):
        """Iterate PhasePoints (diagnostic use only; the arrays are primary)."""
        for xi, pi in zip(self.x, self.p):
            yield PhasePoint(float(xi), float(pi))

    def copy(self) -> "Ensemble":
        return Ensemble(self.x.copy(), self.p.copy(), self.streams, self.step_count)


@dataclass
class BifurcationScan:
    """Retained momentum samples per dissipation value."""

    gamma_grid: np.ndarray
    samples: list[np.ndarray]
    protocol: tuple[int, int, int]  # (transient, retained, count)


def kick_force(x, params: SimulationParams):
    """Kick impulse K [sin x + a sin(2x + phi)], evaluated at x mod 2pi."""
    xw = np.mod(x, TWO_PI)
    return params.K * (np.sin(xw) + params.a * np.sin(2.0 * xw + params.phi))


def map_step(x, p, params: SimulationParams, noise=None):
    """One application of the map to arrays (or scalars) x, p."""
    p_new = params.gamma * p + kick_force(x, params)
    if noise is not None:
        p_new = p_new + noise
    x_new = x + p_new
    return x_new, p_new


def step(point: PhasePoint, params: SimulationParams, noise_sample: float = 0.0) -> PhasePoint:
    """Single-point map step; the caller supplies the noise draw."""
    x_new, p_new = map_step(point.x, point.p, params,
                            noise_sample if noise_sample != 0.0 else None)
    return PhasePoint(float(x_new), float(p_new))


def sample_initial(
    count: int,
    params: SimulationParams,
    unit: int = 0,
    region: tuple[float, float, float, float] = DEFAULT_REGION,
) -> Ensemble:
    """Fresh ensemble, uniform over the initial cell, one stream per point."""
    if count < 1:
        raise ValueError("count must be >= 1")
    validate(params)
    gens = _rng.trajectory_generators(params.seed, unit, count)
    x_lo, x_hi, p_lo, p_hi = region
    x, p = _rng.initial_conditions(gens, x_lo, x_hi, p_lo, p_hi)
    return Ensemble(x, p, gens)


def symmetric_ensemble(count: int, params: SimulationParams, unit: int = 0,
                       region: tuple[float, float, float, float] = DEFAULT_REGION) -> Ensemble:
    """Ensemble symmetric under (x, p) -> (-x, -p), for null-current tests."""
    half = sample_initial(count, params, unit=unit, region=region)
    x = np.concatenate([half.x, -half.x])
    p = np.concatenate([half.p, -half.p])
    return Ensemble(x, p, None)


def _mean_stderr(p: np.ndarray) -> tuple[float, float]:
    n = p.size
    m = float(p.sum() / n)
    if n < 2:
        return m, 0.0
    var = float(((p - m) ** 2).sum() / (n - 1))
    return m, float(np.sqrt(var / n))


def _evolve_block(x, p, gens, params, steps, sigma, record_into=None, t_offset=0):
    """Advance one trajectory block in place; optionally record per-step sums.

    `record_into` is a pair (sum_p, sum_p2) of length steps + 1 arrays that
    accumulate ensemble sums for the current estimator.
    """
    count = x.size
    if sigma > 0.0:
        chunk = max(1, min(steps, _NOISE_ELEMS // max(count, 1)))
    else:
        chunk = steps
    t = 0
    while t < steps:
        c = min(chunk, steps - t)
        noise = None
        if sigma > 0.0:
            noise = _rng.normal_block(gens, c)
        for j in range(c):
            xw = np.mod(x, TWO_PI)
            force = params.K * (np.sin(xw) + params.a * np.sin(2.0 * xw + params.phi))
            p = params.gamma * p + force
            if noise is not None:
                p += sigma * noise[j]
            x = x + p
            if record_into is not None:
                sum_p, sum_p2 = record_into
                sum_p[t_offset + t + j + 1] += p.sum()
                sum_p2[t_offset + t + j + 1] += (p * p).sum()
        t += c
    return x, p


def evolve(ensemble: Ensemble, params: SimulationParams, steps: int) -> tuple[Ensemble, CurrentSeries]:
    """Apply `steps` kicks to every point; record J(t) after each kick.

    The returned series includes J(0). The ensemble is not modified; a new
    one is returned with the advanced state.
    """
    validate(params)
    sigma = noise_std(params.gamma, params.temperature)
    if sigma > 0.0 and ensemble.streams is None:
        raise ValueError("finite temperature requires an ensemble with noise streams")
    count = len(ensemble)
    sum_p = np.zeros(steps + 1)
    sum_p2 = np.zeros(steps + 1)
    sum_p[0] = ensemble.p.sum()
    sum_p2[0] = (ensemble.p * ensemble.p).sum()

    x_out = np.empty_like(ensemble.x)
    p_out = np.empty_like(ensemble.p)
    for lo in range(0, count, _BLOCK):
        hi = min(lo + _BLOCK, count)
        gens = ensemble.streams[lo:hi] if ensemble.streams is not None else None
        xb, pb = _evolve_block(ensemble.x[lo:hi].copy(), ensemble.p[lo:hi].copy(),
                               gens, params, steps, sigma,
                               record_into=(sum_p, sum_p2))
        x_out[lo:hi] = xb
        p_out[lo:hi] = pb

    t = np.arange(steps + 1)
    J = sum_p / count
    if count > 1:
        var = np.maximum(sum_p2 - sum_p * sum_p / count, 0.0) / (count - 1)
        stderr = np.sqrt(var / count)
    else:
        stderr = np.zeros(steps + 1)
    series = CurrentSeries(t=t, J=J, stderr=stderr)
    out = Ensemble(x_out, p_out, ensemble.streams, ensemble.step_count + steps)
    return out, series


def asymptotic_current(
    params: SimulationParams,
    transient: int,
    window: int,
    count: int,
    unit: int = 0,
    region: tuple[float, float, float, float] = DEFAULT_REGION,
    block_length: int = 10,
) -> tuple[float, float]:
    """Stationary current estimate: discard `transient` kicks, average J(t)
    over the next `window` kicks.

    The standard error uses block means (length `block_length`) over the
    window to discount the kick-to-kick autocorrelation.
    """
    if transient + window < 1:
        raise ValueError("transient + window must be >= 1")
    validate(params)
    ens = sample_initial(count, params, unit=unit, region=region)
    sigma = noise_std(params.gamma, params.temperature)
    x, p = ens.x, ens.p
    if transient > 0:
        x, p = _evolve_block(x, p, ens.streams, params, transient, sigma)
    sum_p = np.zeros(window + 1)
    sum_p2 = np.zeros(window + 1)
    x, p = _evolve_block(x, p, ens.streams, params, window, sigma,
                         record_into=(sum_p, sum_p2))
    J = sum_p[1:] / count
    j_inf = float(J.mean())
    n_blocks = max(1, window // block_length)
    usable = n_blocks * block_length
    blocks = J[:usable].reshape(n_blocks, block_length).mean(axis=1)
    if n_blocks > 1:
        stderr = float(blocks.std(ddof=1) / np.sqrt(n_blocks))
    else:
        stderr = 0.0
    return j_inf, stderr


def bifurcation_scan(
    gamma_grid,
    params_template: SimulationParams,
    transient: int = 140_000,
    retained: int = 5_000,
    count: int = 5_000,
    max_total_samples: int | None = 50_000,
    region: tuple[float, float, float, float] = DEFAULT_REGION,
    unit_offset: int = 0,
) -> BifurcationScan:
    """Retained-p samples per gamma after a long transient.

    Every gamma gets a fresh random cell ensemble (streams keyed by
    `unit_offset` + its grid index, so chunked grids reproduce unchunked
    ones exactly). Output is deterministically stride-subsampled so the
    total sample count stays below `max_total_samples` (None keeps all).
    All gammas evolve together in one flat array; per-trajectory streams
    make this identical to evolving them one at a time.
    """
    gamma_grid = np.asarray(gamma_grid, dtype=float)
    if gamma_grid.size == 0:
        raise ValueError("gamma_grid must be nonempty")
    if np.any((gamma_grid < 0.0) | (gamma_grid > 1.0)):
        raise ValueError("gamma values must lie in [0, 1]")
    n_g = gamma_grid.size

    gens = []
    x = np.empty(n_g * count)
    p = np.empty(n_g * count)
    for u in range(n_g):
        g_unit = _rng.trajectory_generators(params_template.seed, unit_offset + u, count)
        xs, ps = _rng.initial_conditions(g_unit, *region)
        x[u * count:(u + 1) * count] = xs
        p[u * count:(u + 1) * count] = ps
        gens.extend(g_unit)

    gamma_flat = np.repeat(gamma_grid, count)
    sigma_flat = np.sqrt(2.0 * (1.0 - gamma_flat) * params_template.temperature)
    noisy = params_template.temperature > 0.0

    K, a, phi = params_template.K, params_template.a, params_template.phi

    def _advance(x, p, n_steps, collect=None):
        chunk = max(1, min(n_steps, _NOISE_ELEMS // x.size)) if noisy else n_steps
        t = 0
        while t < n_steps:
            c = min(chunk, n_steps - t)
            noise = _rng.normal_block(gens, c) if noisy else None
            for j in range(c):
                xw = np.mod(x, TWO_PI)
                force = K * (np.sin(xw) + a * np.sin(2.0 * xw + phi))
                p = gamma_flat * p + force
                if noise is not None:
                    p += sigma_flat * noise[j]
                x = x + p
                if collect is not None:
                    collect(t + j, p)
            t += c
        return x, p

    x, p = _advance(x, p, transient)

    if max_total_samples is None:
        keep_per_step = count
        stride = 1
    else:
        cap_per_gamma = max(1, max_total_samples // n_g)
        keep_per_step = max(1, cap_per_gamma // retained)
        stride = max(1, count // keep_per_step)
    picks = np.arange(0, count, stride)[:max(1, keep_per_step)]

    collected: list[list[np.ndarray]] = [[] for _ in range(n_g)]

    def collect(_t, p_now):
        view = p_now.reshape(n_g, count)
        for u in range(n_g):
            collected[u].append(view[u, picks].copy())

    _advance(x, p, retained, collect=collect)
    samples = [np.concatenate(ch) for ch in collected]
    return BifurcationScan(gamma_grid=gamma_grid, samples=samples,
                           protocol=(transient, retained, count))
