"""Experiment runners: map a validated config onto engine calls and
deterministic CSV artifacts.

Grid points (gamma, T, hbar_eff) are independent jobs scheduled across a
process pool; every randomized job owns a disjoint range of stream units,
so results are bit-identical for any worker count. The parent process
writes all artifacts in a fixed order.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from . import classical, io
from .config import ExperimentConfig, resolved_dict
from .observables import CurrentSeries, husimi, poincare_histogram
from .params import QuantumParams, SimulationParams
from .quantum import DensityMatrix, build_initial_cell_state, evolve as q_evolve

_UNIT_STRIDE = 1 << 20  # unit-index range reserved per job


def _num(v: float) -> str:
    return f"{float(v):g}"


def _series_meta(cfg: ExperimentConfig, engine: str, params: SimulationParams,
                 hbar_eff: float | None = None) -> dict:
    meta = {
        "engine": engine,
        "kind": cfg.kind,
        "K": _num(params.K), "a": _num(params.a), "phi": _num(params.phi),
        "gamma": _num(params.gamma), "temperature": _num(params.temperature),
        "seed": params.seed,
    }
    if hbar_eff is not None:
        meta["hbar_eff"] = _num(hbar_eff)
    return meta


# -- job bodies (module level: picklable for the worker pool) ----------------

def _job_classical_current(params: SimulationParams, count: int, steps: int,
                           region, unit_base: int):
    ens = classical.sample_initial(count, params, unit=unit_base, region=region)
    _, series = classical.evolve(ens, params, steps)
    return series.t, series.J, series.stderr


def _job_classical_scan(params: SimulationParams, transient: int, window: int,
                        count: int, region, unit_base: int):
    return classical.asymptotic_current(params, transient, window, count,
                                        unit=unit_base, region=region)


def _job_classical_portrait(params: SimulationParams, count: int, steps: int,
                            region, bins, p_window, unit_base: int):
    ens = classical.sample_initial(count, params, unit=unit_base, region=region)
    ens, _ = classical.evolve(ens, params, steps)
    hist = poincare_histogram(ens.x, ens.p, window=p_window, bins=bins)
    return hist


def _job_bifurcation_chunk(params: SimulationParams, gammas, transient: int,
                           retained: int, count: int, max_total: int | None,
                           region, unit_base: int):
    scan = classical.bifurcation_scan(
        gammas, params, transient=transient, retained=retained, count=count,
        max_total_samples=max_total, region=region, unit_offset=unit_base,
    )
    return scan.samples


def _job_quantum_current(params: SimulationParams, qp: QuantumParams, periods: int):
    rho = build_initial_cell_state(qp)
    _, series, diag = q_evolve(rho, qp, periods)
    return series.t, series.J, diag.worst()


def _job_quantum_scan(params: SimulationParams, qp: QuantumParams,
                      transient: int, window: int):
    rho = build_initial_cell_state(qp)
    _, series, _ = q_evolve(rho, qp, transient + window)
    j_inf = float(series.J[transient + 1:].mean())
    return j_inf, float("nan")


def _job_quantum_portrait(params: SimulationParams, qp: QuantumParams, steps: int,
                          resolution, p_window, squeeze: float):
    rho = build_initial_cell_state(qp)
    rho, _, _ = q_evolve(rho, qp, steps)
    return husimi(rho.mat, qp.hbar_eff, window=p_window, resolution=resolution,
                  width_ratio=squeeze)


_JOBS = {
    "classical_current": _job_classical_current,
    "classical_scan": _job_classical_scan,
    "classical_portrait": _job_classical_portrait,
    "bifurcation_chunk": _job_bifurcation_chunk,
    "quantum_current": _job_quantum_current,
    "quantum_scan": _job_quantum_scan,
    "quantum_portrait": _job_quantum_portrait,
}


def _dispatch(entry):
    name, args = entry
    return _JOBS[name](*args)


def _run_jobs(jobs: list[tuple[str, tuple]], workers: int) -> list:
    if workers <= 1 or len(jobs) <= 1:
        return [_dispatch(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
        return list(pool.map(_dispatch, jobs))


# -- experiment assembly -------------------------------------------------------

def _quantum_variant(cfg: ExperimentConfig, hbar_eff: float, temperature: float) -> QuantumParams:
    qp = cfg.quantum
    base = replace(qp.base, temperature=temperature)
    n_max = qp.n_max  # explicit n_max is kept; None re-derives from p_span
    return replace(qp, base=base, hbar_eff=hbar_eff, n_max=n_max)


def _temperatures(cfg: ExperimentConfig) -> list[float]:
    if cfg.temperature_grid is not None:
        return [float(t) for t in cfg.temperature_grid]
    return [cfg.params.temperature]


def _hbars(cfg: ExperimentConfig) -> list[float]:
    if cfg.hbar_grid is not None:
        return [float(h) for h in cfg.hbar_grid]
    return [cfg.quantum.hbar_eff]


def run_experiment(cfg: ExperimentConfig, out_dir, workers: int = 1,
                   seed_override: int | None = None) -> list[Path]:
    """Execute one experiment config; returns the artifact paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if seed_override is not None:
        cfg.params = replace(cfg.params, seed=seed_override)
        if cfg.quantum is not None:
            cfg.quantum = replace(cfg.quantum, base=cfg.params)

    manifest_path = out_dir / f"{cfg.output_prefix}.manifest.json"
    started = time.monotonic()
    io.write_manifest(manifest_path, resolved_dict(cfg), cfg.params.seed,
                      __version__, [], complete=False)
    try:
        artifacts = _run_kind(cfg, out_dir, workers)
    except BaseException:
        io.write_manifest(manifest_path, resolved_dict(cfg), cfg.params.seed,
                          __version__, [], complete=False,
                          wall_time_s=time.monotonic() - started)
        raise
    io.write_manifest(manifest_path, resolved_dict(cfg), cfg.params.seed,
                      __version__, [str(a.name) for a in artifacts], complete=True,
                      wall_time_s=time.monotonic() - started)
    return artifacts + [manifest_path]


def _run_kind(cfg: ExperimentConfig, out_dir: Path, workers: int) -> list[Path]:
    if cfg.kind == "bifurcation":
        return _run_bifurcation(cfg, out_dir, workers)
    if cfg.kind == "current":
        return _run_current(cfg, out_dir, workers)
    if cfg.kind == "asymptotic-scan":
        return _run_scan(cfg, out_dir, workers)
    if cfg.kind in ("portrait", "husimi"):
        return _run_portrait(cfg, out_dir, workers)
    raise ValueError(f"unsupported kind {cfg.kind!r}")


def _run_bifurcation(cfg: ExperimentConfig, out_dir: Path, workers: int) -> list[Path]:
    transient = cfg.transient if cfg.transient is not None else 140_000
    retained = cfg.retained if cfg.retained is not None else 5_000
    gammas = cfg.gamma_grid
    artifacts: list[Path] = []

    for temp in _temperatures(cfg):
        params = replace(cfg.params, temperature=temp)
        # split the gamma grid into contiguous chunks, one job per worker
        n_chunks = max(1, min(workers, gammas.size))
        bounds = np.linspace(0, gammas.size, n_chunks + 1).astype(int)
        cap = cfg.max_total_samples
        jobs = []
        for c in range(n_chunks):
            lo, hi = bounds[c], bounds[c + 1]
            if lo == hi:
                continue
            chunk_cap = None if cap is None else max(1, cap * (hi - lo) // gammas.size)
            jobs.append(("bifurcation_chunk",
                         (params, gammas[lo:hi], transient, retained, cfg.count,
                          chunk_cap, cfg.init_region, int(lo))))
        results = _run_jobs(jobs, workers)
        samples: list[np.ndarray] = []
        for res in results:
            samples.extend(res)
        g_col = np.concatenate([np.full(s.size, g) for g, s in zip(gammas, samples)])
        p_col = np.concatenate(samples)
        path = out_dir / f"{cfg.output_prefix}_T{_num(temp)}.csv"
        meta = _series_meta(cfg, "classical", params)
        meta.update({"transient": transient, "retained": retained, "count": cfg.count})
        io.write_bifurcation_samples(path, g_col, p_col, meta=meta)
        artifacts.append(path)

        if cfg.inset_gamma_grid is not None:
            inset_count = cfg.inset_count if cfg.inset_count is not None else cfg.count
            jobs = []
            for i, g in enumerate(cfg.inset_gamma_grid):
                p_i = replace(params, gamma=float(g))
                jobs.append(("classical_scan",
                             (p_i, cfg.inset_transient, cfg.inset_window,
                              inset_count, cfg.init_region, (i + 1) * _UNIT_STRIDE)))
            results = _run_jobs(jobs, workers)
            j_inf = np.array([r[0] for r in results])
            err = np.array([r[1] for r in results])
            path = out_dir / f"{cfg.output_prefix}_jinf_T{_num(temp)}.csv"
            io.write_scan(path, "gamma", np.asarray(cfg.inset_gamma_grid), j_inf, err,
                          meta=_series_meta(cfg, "classical", params))
            artifacts.append(path)
    return artifacts


def is_single_quantum_run(cfg: ExperimentConfig) -> bool:
    """True when the config maps to exactly one quantum evolution."""
    return (
        cfg.engine == "quantum"
        and cfg.kind == "current"
        and not cfg.include_classical
        and len(_hbars(cfg)) == 1
        and len(_temperatures(cfg)) == 1
    )


def _checkpoint_paths(cfg: ExperimentConfig, out_dir: Path):
    hbar = _hbars(cfg)[0]
    temp = _temperatures(cfg)[0]
    csv = out_dir / f"{cfg.output_prefix}_hbar{_num(hbar)}_T{_num(temp)}.csv"
    ck = out_dir / f"{cfg.output_prefix}.ck"
    return csv, ck


def run_checkpointed(cfg: ExperimentConfig, out_dir: Path,
                     resume_state=None) -> list[Path]:
    """Single quantum current run with periodic checkpoints.

    `resume_state` is (rho_mat, step_count) from a verified checkpoint.
    An interrupt or numerical failure still leaves a valid checkpoint of
    the last completed period next to the partial series.
    """
    if not is_single_quantum_run(cfg):
        raise ValueError("checkpointing supports single quantum current runs only")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    hbar = _hbars(cfg)[0]
    temp = _temperatures(cfg)[0]
    qp = _quantum_variant(cfg, hbar, temp)
    csv_path, ck_path = _checkpoint_paths(cfg, out_dir)
    phash = io.params_hash(qp.base, qp)
    meta = _series_meta(cfg, "quantum", qp.base, hbar_eff=hbar)

    if resume_state is None:
        rho = build_initial_cell_state(qp)
        start, history = 0, None
    else:
        mat, start = resume_state
        rho = DensityMatrix(mat, qp.hbar_eff)
        series, _ = io.read_current_series(csv_path)
        if len(series) < start + 1:
            raise ValueError(f"partial series {csv_path} is shorter than the checkpoint")
        history = [float(v) for v in series.J[: start + 1]]

    every = cfg.checkpoint_every or 0
    last = {"t": start, "rho": rho, "J": history or None}

    def _save(t, rho_now, J):
        io.write_checkpoint(ck_path, rho_now.mat, qp.hbar_eff, t, phash)
        part = CurrentSeries(t=np.arange(t + 1), J=np.asarray(J[: t + 1]),
                             stderr=np.full(t + 1, np.nan))
        io.write_current_series(csv_path, part, meta=meta)

    def on_period(t, rho_now, J):
        last.update(t=t, rho=rho_now, J=list(J))
        if every and t % every == 0:
            _save(t, rho_now, J)

    try:
        rho, series, diag = q_evolve(rho, qp, cfg.steps, start_period=start,
                                     current_history=history, on_period=on_period)
    except BaseException:
        if last["J"] is not None and last["t"] > start:
            _save(last["t"], last["rho"], last["J"])
        raise
    # diagnostics cover only the periods this process ran, so they are kept
    # out of the CSV: a resumed file must be byte-identical to a straight run
    io.write_current_series(csv_path, series, meta=meta)
    io.write_checkpoint(ck_path, rho.mat, qp.hbar_eff, cfg.steps, phash)
    return [csv_path, ck_path]


def resume_experiment(checkpoint_path, cfg: ExperimentConfig, out_dir) -> list[Path]:
    """Continue a checkpointed quantum run; validates the checkpoint first."""
    if not is_single_quantum_run(cfg):
        raise ValueError("resume supports single quantum current runs only")
    out_dir = Path(out_dir)
    hbar = _hbars(cfg)[0]
    temp = _temperatures(cfg)[0]
    qp = _quantum_variant(cfg, hbar, temp)
    mat, hbar_ck, step, phash = io.read_checkpoint(checkpoint_path)
    if mat.shape[0] != qp.n_levels:
        raise ValueError(f"checkpoint dimension {mat.shape[0]} does not match "
                         f"the config basis {qp.n_levels}")
    if hbar_ck != qp.hbar_eff:
        raise ValueError(f"checkpoint hbar_eff {hbar_ck} does not match config {qp.hbar_eff}")
    if phash != io.params_hash(qp.base, qp):
        raise ValueError("checkpoint parameter hash does not match the config")
    if step >= cfg.steps:
        print(f"checkpoint already at step {step} >= {cfg.steps}; nothing to do")
        csv_path, ck_path = _checkpoint_paths(cfg, out_dir)
        return [csv_path, ck_path]

    manifest_path = out_dir / f"{cfg.output_prefix}.manifest.json"
    started = time.monotonic()
    io.write_manifest(manifest_path, resolved_dict(cfg), cfg.params.seed,
                      __version__, [], complete=False)
    artifacts = run_checkpointed(cfg, out_dir, resume_state=(mat, step))
    io.write_manifest(manifest_path, resolved_dict(cfg), cfg.params.seed,
                      __version__, [a.name for a in artifacts], complete=True,
                      wall_time_s=time.monotonic() - started)
    return artifacts + [manifest_path]


def _run_current(cfg: ExperimentConfig, out_dir: Path, workers: int) -> list[Path]:
    if cfg.checkpoint_every and is_single_quantum_run(cfg):
        return run_checkpointed(cfg, out_dir)
    artifacts: list[Path] = []
    jobs: list[tuple[str, tuple]] = []
    outputs: list[tuple[Path, dict]] = []
    unit = 0

    if cfg.engine == "classical":
        for temp in _temperatures(cfg):
            params = replace(cfg.params, temperature=temp)
            jobs.append(("classical_current",
                         (params, cfg.count, cfg.steps, cfg.init_region, unit)))
            outputs.append((out_dir / f"{cfg.output_prefix}_classical_T{_num(temp)}.csv",
                            _series_meta(cfg, "classical", params)))
            unit += _UNIT_STRIDE
    else:
        for hbar in _hbars(cfg):
            for temp in _temperatures(cfg):
                qp = _quantum_variant(cfg, hbar, temp)
                jobs.append(("quantum_current", (qp.base, qp, cfg.steps)))
                outputs.append((out_dir / f"{cfg.output_prefix}_hbar{_num(hbar)}_T{_num(temp)}.csv",
                                _series_meta(cfg, "quantum", qp.base, hbar_eff=hbar)))
        if cfg.include_classical:
            temps = (cfg.classical_temperatures if cfg.classical_temperatures is not None
                     else _temperatures(cfg))
            for temp in temps:
                params = replace(cfg.params, temperature=float(temp))
                jobs.append(("classical_current",
                             (params, cfg.count, cfg.steps, cfg.init_region, unit)))
                outputs.append((out_dir / f"{cfg.output_prefix}_classical_T{_num(temp)}.csv",
                                _series_meta(cfg, "classical", params)))
                unit += _UNIT_STRIDE

    results = _run_jobs(jobs, workers)
    for (path, meta), res in zip(outputs, results):
        if len(res) == 3 and isinstance(res[2], dict):  # quantum: diagnostics dict
            t, J, worst = res
            meta = dict(meta)
            meta.update({k: f"{v:.3e}" if isinstance(v, float) else v
                         for k, v in worst.items()})
            series = CurrentSeries(t=t, J=J, stderr=np.full(len(t), np.nan))
        else:
            t, J, err = res
            series = CurrentSeries(t=t, J=J, stderr=err)
        io.write_current_series(path, series, meta=meta)
        artifacts.append(path)
    return artifacts


def _run_scan(cfg: ExperimentConfig, out_dir: Path, workers: int) -> list[Path]:
    if cfg.gamma_grid is not None:
        axis_name, axis = "gamma", np.asarray(cfg.gamma_grid, dtype=float)
    else:
        axis_name, axis = "temperature", np.asarray(cfg.temperature_grid, dtype=float)

    cl_transient = cfg.transient if cfg.transient is not None else 1000
    cl_window = cfg.window if cfg.window is not None else 1000
    q_transient = cfg.transient if cfg.transient is not None else 100
    q_window = cfg.window if cfg.window is not None else 50

    def classical_params(v: float) -> SimulationParams:
        if axis_name == "gamma":
            return replace(cfg.params, gamma=float(v))
        return replace(cfg.params, temperature=float(v))

    artifacts: list[Path] = []
    series_jobs: list[tuple[str, list[tuple[str, tuple]], Path, dict]] = []

    if cfg.engine == "classical" or cfg.include_classical:
        jobs = [("classical_scan",
                 (classical_params(v), cl_transient, cl_window, cfg.count,
                  cfg.init_region, (i + 1) * _UNIT_STRIDE))
                for i, v in enumerate(axis)]
        series_jobs.append(("classical", jobs,
                            out_dir / f"{cfg.output_prefix}_classical.csv",
                            _series_meta(cfg, "classical", cfg.params)))
    if cfg.engine == "quantum":
        for hbar in _hbars(cfg):
            jobs = []
            for v in axis:
                params = classical_params(v)
                qp = _quantum_variant(cfg, hbar, params.temperature)
                if axis_name == "gamma":
                    qp = replace(qp, base=replace(qp.base, gamma=float(v)))
                jobs.append(("quantum_scan", (qp.base, qp, q_transient, q_window)))
            series_jobs.append((f"hbar{_num(hbar)}", jobs,
                                out_dir / f"{cfg.output_prefix}_hbar{_num(hbar)}.csv",
                                _series_meta(cfg, "quantum", cfg.params, hbar_eff=hbar)))

    flat: list[tuple[str, tuple]] = []
    spans = []
    for _, jobs, _, _ in series_jobs:
        spans.append((len(flat), len(flat) + len(jobs)))
        flat.extend(jobs)
    results = _run_jobs(flat, workers)
    for (label, _, path, meta), (lo, hi) in zip(series_jobs, spans):
        vals = results[lo:hi]
        j_inf = np.array([v[0] for v in vals])
        err = np.array([v[1] for v in vals])
        io.write_scan(path, axis_name, axis, j_inf, err, meta=meta)
        artifacts.append(path)
    return artifacts


def _run_portrait(cfg: ExperimentConfig, out_dir: Path, workers: int) -> list[Path]:
    steps = cfg.steps if cfg.steps else 40
    p_window = (cfg.p_lo, cfg.p_hi)
    bins = (cfg.x_bins, cfg.p_bins)
    artifacts: list[Path] = []
    jobs: list[tuple[str, tuple]] = []
    outputs: list[tuple[str, dict]] = []
    unit = 0

    for temp in _temperatures(cfg):
        if cfg.engine == "classical":
            params = replace(cfg.params, temperature=temp)
            jobs.append(("classical_portrait",
                         (params, cfg.count, steps, cfg.init_region, bins, p_window, unit)))
            outputs.append((f"{cfg.output_prefix}_poincare_T{_num(temp)}",
                            {"engine": "classical", "t": steps, "count": cfg.count,
                             **_series_meta(cfg, "classical", params)}))
            unit += _UNIT_STRIDE
        else:
            qp = _quantum_variant(cfg, cfg.quantum.hbar_eff, temp)
            jobs.append(("quantum_portrait",
                         (qp.base, qp, steps, bins, p_window, cfg.husimi_squeeze)))
            outputs.append((f"{cfg.output_prefix}_husimi_T{_num(temp)}",
                            {"engine": "quantum", "t": steps,
                             **_series_meta(cfg, "quantum", qp.base, hbar_eff=qp.hbar_eff)}))
            if cfg.include_classical:
                params = replace(cfg.params, temperature=temp)
                jobs.append(("classical_portrait",
                             (params, cfg.count, steps, cfg.init_region, bins, p_window, unit)))
                outputs.append((f"{cfg.output_prefix}_poincare_T{_num(temp)}",
                                {"engine": "classical", "t": steps, "count": cfg.count,
                                 **_series_meta(cfg, "classical", params)}))
                unit += _UNIT_STRIDE

    results = _run_jobs(jobs, workers)
    for (prefix, meta), raster in zip(outputs, results):
        csv_path, meta_path = io.write_portrait(out_dir / prefix, raster, meta)
        artifacts.extend([csv_path, meta_path])
    return artifacts
