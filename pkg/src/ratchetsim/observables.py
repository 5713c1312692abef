"""Analysis layer shared by both engines: current series, asymptote and
peak detection, Poincare histograms and Husimi distributions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * np.pi


@dataclass
class CurrentSeries:
    """J(t) record; `stderr` entries may be NaN where no ensemble error
    applies (density-matrix evolution)."""

    t: np.ndarray
    J: np.ndarray
    stderr: np.ndarray | None = None

    def __post_init__(self):
        self.t = np.asarray(self.t)
        self.J = np.asarray(self.J, dtype=float)
        if self.stderr is not None:
            self.stderr = np.asarray(self.stderr, dtype=float)
        if self.t.shape != self.J.shape:
            raise ValueError("t and J must have equal length")
        if self.t.size and (self.t[0] != 0 or np.any(np.diff(self.t) <= 0)):
            raise ValueError("t must increase strictly from 0")

    def __len__(self) -> int:
        return self.t.size


@dataclass
class PoincareHistogram:
    """Phase-space density raster over x in [0, 2pi) and a momentum window.

    `density` has shape (p_bins, x_bins); density * cell_area sums to the
    fraction of the ensemble inside the window.
    """

    density: np.ndarray
    x_edges: np.ndarray
    p_edges: np.ndarray


@dataclass
class HusimiGrid:
    """Coherent-state expectation raster, same layout as PoincareHistogram."""

    values: np.ndarray
    x_grid: np.ndarray
    p_grid: np.ndarray
    width_ratio: float


def detect_asymptote(series: CurrentSeries, window: int, tol: float) -> tuple[float, int | None]:
    """Stationary value and settle time of a current series.

    Returns (J_inf, t_settle): J_inf is the mean over the final `window`
    entries; t_settle is the earliest t from which every trailing-window
    mean (partial windows allowed at the start) stays within `tol`
    (relative) of J_inf. A series that never settles gives t_settle None.
    """
    n = len(series)
    if n <= 2 * window:
        raise ValueError("series too short for the requested window")
    J = series.J
    j_inf = float(J[n - window:].mean())
    csum = np.concatenate([[0.0], np.cumsum(J)])
    t = np.arange(n)
    lo = np.maximum(0, t - window + 1)
    trailing = (csum[t + 1] - csum[lo]) / (t + 1 - lo)
    scale = max(abs(j_inf), 1e-12)
    ok = np.abs(trailing - j_inf) <= tol * scale
    bad = np.where(~ok)[0]
    if bad.size == 0:
        return j_inf, 0
    first_good = bad[-1] + 1
    # settling only inside the reference window itself is inconclusive
    if first_good > n - window:
        return j_inf, None
    return j_inf, int(series.t[first_good])


def detect_transient_peak(
    series: CurrentSeries,
    t_range: tuple[int, int],
    prominence: float = 0.05,
    reference: float | None = None,
) -> tuple[int, float] | None:
    """Most prominent interior local maximum of J within t_range.

    A peak must exceed the series values at both range endpoints by
    `prominence` * |reference|; `reference` defaults to the mean over the
    final quarter of the series. Returns (t_peak, J_peak) or None.
    """
    lo, hi = t_range
    idx = np.where((series.t >= lo) & (series.t <= hi))[0]
    if idx.size < 3:
        return None
    if reference is None:
        tail = max(2, len(series) // 4)
        reference = float(series.J[-tail:].mean())
    seg = series.J[idx]
    bar = prominence * abs(reference)
    best = None
    for i in range(1, idx.size - 1):
        if seg[i] >= seg[i - 1] and seg[i] >= seg[i + 1]:
            if seg[i] - max(seg[0], seg[-1]) >= bar:
                if best is None or seg[i] > best[1]:
                    best = (int(series.t[idx[i]]), float(seg[i]))
    return best


def poincare_histogram(
    x: np.ndarray,
    p: np.ndarray,
    window: tuple[float, float] = (-4.0, 8.0),
    bins: tuple[int, int] = (400, 300),
) -> PoincareHistogram:
    """Snapshot density of an ensemble, normalized to the full ensemble size.

    `bins` is (x_bins, p_bins); x wraps into [0, 2pi).
    """
    p_lo, p_hi = window
    x_bins, p_bins = bins
    xw = np.mod(x, TWO_PI)
    counts, xe, pe = np.histogram2d(
        xw, p, bins=[x_bins, p_bins], range=[[0.0, TWO_PI], [p_lo, p_hi]]
    )
    cell = (xe[1] - xe[0]) * (pe[1] - pe[0])
    density = counts.T / (x.size * cell)
    return PoincareHistogram(density=density, x_edges=xe, p_edges=pe)


def coherent_weights(
    n_levels: np.ndarray,
    hbar_eff: float,
    x0: np.ndarray,
    p0: np.ndarray,
    width_ratio: float = 1.0,
) -> np.ndarray:
    """Momentum-space coefficients of periodized coherent states.

    Shape (N, G) for G grid points; each column is normalized. Building
    the states directly on the integer momentum lattice handles the
    cylinder topology without image sums in x.
    """
    pn = hbar_eff * n_levels[:, None]
    log_env = -width_ratio * (pn - p0[None, :]) ** 2 / (2.0 * hbar_eff)
    env = np.exp(log_env - log_env.max(axis=0, keepdims=True))
    c = env * np.exp(-1j * n_levels[:, None] * x0[None, :])
    c /= np.linalg.norm(c, axis=0, keepdims=True)
    return c


def husimi(
    rho: np.ndarray,
    hbar_eff: float,
    window: tuple[float, float] = (-4.0, 8.0),
    resolution: tuple[int, int] = (240, 180),
    width_ratio: float = 1.0,
) -> HusimiGrid:
    """Husimi raster H(x0, p0) = <z|rho|z> / (2 pi hbar) over the window.

    `resolution` is (x_points, p_points); grid points sit at cell centers
    so the raster is directly comparable with poincare_histogram output of
    the same window and bin counts.
    """
    N = rho.shape[0]
    n_max = (N - 1) // 2
    n_levels = np.arange(-n_max, n_max + 1, dtype=float)
    p_lo, p_hi = window
    nx, npts = resolution
    x_grid = (np.arange(nx) + 0.5) * TWO_PI / nx
    p_grid = p_lo + (np.arange(npts) + 0.5) * (p_hi - p_lo) / npts

    values = np.empty((npts, nx))
    # Block over momentum rows of the grid to bound the coefficient matrix.
    block = max(1, int(2e6 // max(N * nx, 1)) or 1)
    for lo in range(0, npts, block):
        hi = min(lo + block, npts)
        X, P = np.meshgrid(x_grid, p_grid[lo:hi])
        c = coherent_weights(n_levels, hbar_eff, X.ravel(), P.ravel(), width_ratio)
        h = np.real(np.einsum("ng,ng->g", c.conj(), rho @ c))
        values[lo:hi] = h.reshape(hi - lo, nx)
    return HusimiGrid(values=values / (TWO_PI * hbar_eff), x_grid=x_grid,
                      p_grid=p_grid, width_ratio=width_ratio)
