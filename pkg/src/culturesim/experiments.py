"""Experiment presets, parallel sweep execution, and CSV/manifest output.

Outputs are a pure function of the experiment config: worker count and
scheduling order never change a byte of any file.
"""

from __future__ import annotations

import hashlib
import json
import multiprocessing
import os
import tempfile
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from .analysis import (
    CellSummary,
    RunSeries,
    average_series,
    piv,
    summarize_cell,
    time_to_threshold,
)
from .world import (
    ConfigError,
    MODE_FIXED_ROLES,
    MODE_SHARED_P,
    REGIME_SINGLE_STEP,
    REGIME_TEMPLATE,
    WorldConfig,
    run_world,
)

PRESET_EXP1 = "exp1_sweep"
PRESET_EXP2 = "exp2_sr"
PRESET_EXP3 = "exp3_chaining"
PRESET_CUSTOM = "custom"
PRESETS = (PRESET_EXP1, PRESET_EXP2, PRESET_EXP3, PRESET_CUSTOM)

DESK_GRID = tuple(round(0.2 * k, 1) for k in range(1, 6))  # 0.2 .. 1.0
DESK_RUNS_PER_CELL = 25
DESK_TAU = 35.1

WORKERS_ENV = "CULTURESIM_WORKERS"


@dataclass(frozen=True)
class ExperimentSpec:
    preset: str = PRESET_CUSTOM
    grid_c: Tuple[float, ...] = DESK_GRID
    grid_p: Tuple[float, ...] = DESK_GRID
    runs_per_cell: int = DESK_RUNS_PER_CELL
    world: WorldConfig = field(default_factory=WorldConfig)
    output_dir: str = "out"

    def validate(self) -> "ExperimentSpec":
        if self.preset not in PRESETS:
            raise ConfigError(f"preset must be one of {PRESETS}, got {self.preset!r}")
        if self.runs_per_cell < 1:
            raise ConfigError(
                f"runs_per_cell must be >= 1, got {self.runs_per_cell}"
            )
        for name, grid in (("grid_c", self.grid_c), ("grid_p", self.grid_p)):
            if not grid:
                raise ConfigError(f"{name} must be non-empty")
            for v in grid:
                if not 0.0 <= v <= 1.0:
                    raise ConfigError(f"{name} values must be in [0, 1], got {v}")
        self.world.validate()
        return self

    def digest(self) -> str:
        """Digest of the scientific content; output location is excluded."""
        d = self.to_dict()
        del d["output_dir"]
        payload = json.dumps(d, sort_keys=True).encode()
        return hashlib.sha256(payload).hexdigest()

    def to_dict(self) -> dict:
        d = asdict(self)
        d["grid_c"] = list(self.grid_c)
        d["grid_p"] = list(self.grid_p)
        return d


_WORLD_FIELDS = set(WorldConfig.__dataclass_fields__)
_SPEC_FIELDS = set(ExperimentSpec.__dataclass_fields__) - {"world"}


def load_config(path: str) -> ExperimentSpec:
    """Parse a JSON experiment config; unknown keys are errors."""
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}")
    if not isinstance(raw, dict):
        raise ConfigError(f"config root must be a JSON object, got {type(raw).__name__}")

    world_raw = raw.pop("world", {})
    if not isinstance(world_raw, dict):
        raise ConfigError("'world' must be a JSON object of world settings")
    unknown = set(raw) - _SPEC_FIELDS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    unknown = set(world_raw) - _WORLD_FIELDS
    if unknown:
        raise ConfigError(f"unknown world config keys: {sorted(unknown)}")

    for key in ("grid_c", "grid_p"):
        if key in raw:
            raw[key] = tuple(raw[key])
    try:
        world = WorldConfig(**world_raw)
        spec = ExperimentSpec(world=world, **raw)
    except TypeError as exc:
        raise ConfigError(f"bad config value: {exc}")
    return apply_preset(spec).validate()


def apply_preset(spec: ExperimentSpec) -> ExperimentSpec:
    """Force the world settings each preset's design requires."""
    w = spec.world
    if spec.preset == PRESET_EXP1:
        w = replace(
            w,
            mode=MODE_FIXED_ROLES,
            sr_enabled=False,
            chaining_enabled=False,
            fitness_regime=REGIME_SINGLE_STEP,
            tau=w.tau if w.tau != WorldConfig.tau else DESK_TAU,
        )
    elif spec.preset == PRESET_EXP2:
        w = replace(
            w,
            mode=MODE_SHARED_P,
            chaining_enabled=False,
            fitness_regime=REGIME_SINGLE_STEP,
        )
    elif spec.preset == PRESET_EXP3:
        w = replace(
            w,
            mode=MODE_SHARED_P,
            chaining_enabled=True,
            fitness_regime=REGIME_TEMPLATE,
        )
    return replace(spec, world=w)


def worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV, "").strip()
    if raw:
        n = int(raw)
        if n < 1:
            raise ConfigError(f"{WORKERS_ENV} must be >= 1, got {n}")
        return n
    return os.cpu_count() or 1


def _job(args: Tuple[WorldConfig, int]) -> RunSeries:
    cfg, run_index = args
    return run_world(cfg, run_index)


def run_jobs(jobs: Sequence[Tuple[WorldConfig, int]], workers: Optional[int] = None) -> List[RunSeries]:
    """Execute runs in job order; failed jobs are retried once from their
    deterministic seed before the sweep aborts."""
    if workers is None:
        workers = worker_count()
    results: List[Optional[RunSeries]] = [None] * len(jobs)
    if workers <= 1 or len(jobs) <= 1:
        for i, job in enumerate(jobs):
            try:
                results[i] = _job(job)
            except Exception:
                results[i] = _job(job)  # single retry, then propagate
        return results  # type: ignore[return-value]
    with multiprocessing.Pool(workers) as pool:
        for i, res in enumerate(pool.imap(_try_job, jobs, chunksize=1)):
            if isinstance(res, Exception):
                results[i] = _job(jobs[i])  # retry in-process
            else:
                results[i] = res
    return results  # type: ignore[return-value]


def _try_job(args):
    try:
        return _job(args)
    except Exception as exc:  # pickled back to the parent for the retry
        return exc


def fmt(x: float) -> str:
    """17-significant-digit float serialization for reproducible CSVs."""
    return format(x, ".17g")


def atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def series_csv(avg: Dict[str, List[float]]) -> str:
    lines = ["iter,mean_fitness,diversity,frac_low,frac_mid,frac_high"]
    horizon = len(avg["mean_fitness"])
    for t in range(horizon):
        lines.append(
            ",".join(
                [
                    str(t + 1),
                    fmt(avg["mean_fitness"][t]),
                    fmt(avg["diversity"][t]),
                    fmt(avg["frac_low"][t]),
                    fmt(avg["frac_mid"][t]),
                    fmt(avg["frac_high"][t]),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def surface_csv(cells: Sequence[CellSummary]) -> str:
    lines = ["C,p,runs,mean_ttt_log10,censored_count,mean_piv"]
    for cell in cells:
        lines.append(
            ",".join(
                [
                    fmt(cell.c),
                    fmt(cell.p),
                    str(cell.runs),
                    fmt(cell.mean_ttt_log10),
                    str(cell.censored_count),
                    fmt(cell.mean_piv),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def _sha256_file(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_outputs(spec: ExperimentSpec, files: Dict[str, str]) -> List[Path]:
    """Write output files plus the effective-config echo and the manifest."""
    out = Path(spec.output_dir)
    files = dict(files)
    files["config.json"] = json.dumps(spec.to_dict(), sort_keys=True, indent=2) + "\n"
    written = []
    for name, text in files.items():
        path = out / name
        atomic_write(path, text)
        written.append(path)
    manifest = {
        "config_digest": spec.digest(),
        "files": {p.name: _sha256_file(p) for p in sorted(written)},
    }
    manifest_path = out / "manifest.json"
    atomic_write(manifest_path, json.dumps(manifest, sort_keys=True, indent=2) + "\n")
    written.append(manifest_path)
    return written


def execute_exp1(spec: ExperimentSpec, workers: Optional[int] = None) -> List[Path]:
    """Creator-fraction / creativity sweep with a paired (1, 1) PIV baseline."""
    cells = [(c, p) for c in spec.grid_c for p in spec.grid_p]
    cell_cfg = {
        (c, p): replace(spec.world, creator_fraction=c, creator_creativity=p)
        for c, p in cells
    }
    baseline_cfg = replace(spec.world, creator_fraction=1.0, creator_creativity=1.0)
    need_baseline = (1.0, 1.0) not in cell_cfg
    jobs: List[Tuple[WorldConfig, int]] = []
    for cell in cells:
        jobs.extend((cell_cfg[cell], r) for r in range(spec.runs_per_cell))
    if need_baseline:
        jobs.extend((baseline_cfg, r) for r in range(spec.runs_per_cell))
    results = run_jobs(jobs, workers)

    by_cell: Dict[Tuple[float, float], List[RunSeries]] = {}
    idx = 0
    for cell in cells:
        by_cell[cell] = results[idx : idx + spec.runs_per_cell]
        idx += spec.runs_per_cell
    baselines = (
        results[idx : idx + spec.runs_per_cell]
        if need_baseline
        else by_cell[(1.0, 1.0)]
    )

    tau = spec.world.tau
    horizon = spec.world.iterations
    summaries = []
    for c, p in cells:
        runs = by_cell[(c, p)]
        ttts = [time_to_threshold(r.mean_fitness, tau) for r in runs]
        pivs = [
            piv(r.mean_fitness, b.mean_fitness) for r, b in zip(runs, baselines)
        ]
        summaries.append(summarize_cell(c, p, ttts, pivs, horizon))
    return _write_outputs(spec, {"surface.csv": surface_csv(summaries)})


def execute_paired_sr(spec: ExperimentSpec, workers: Optional[int] = None) -> List[Path]:
    """SR-on vs SR-off comparison with shared run seeds (experiments 2 and 3)."""
    cfg_off = replace(spec.world, sr_enabled=False)
    cfg_on = replace(spec.world, sr_enabled=True)
    k = spec.runs_per_cell
    jobs = [(cfg_off, r) for r in range(k)] + [(cfg_on, r) for r in range(k)]
    results = run_jobs(jobs, workers)
    avg_off = average_series(results[:k])
    avg_on = average_series(results[k:])
    return _write_outputs(
        spec,
        {"series_nosr.csv": series_csv(avg_off), "series_sr.csv": series_csv(avg_on)},
    )


def execute(spec: ExperimentSpec, workers: Optional[int] = None) -> List[Path]:
    spec = apply_preset(spec).validate()
    if spec.preset == PRESET_EXP1:
        return execute_exp1(spec, workers)
    if spec.preset in (PRESET_EXP2, PRESET_EXP3):
        return execute_paired_sr(spec, workers)
    # Custom configs run a single cell and emit its averaged series.
    jobs = [(spec.world, r) for r in range(spec.runs_per_cell)]
    results = run_jobs(jobs, workers)
    return _write_outputs(spec, {"series.csv": series_csv(average_series(results))})


def preset_spec(preset: str, runs: Optional[int] = None, seed: Optional[int] = None,
                out: Optional[str] = None) -> ExperimentSpec:
    """Desk-scale spec for a named preset with optional overrides."""
    world = WorldConfig(mode=MODE_SHARED_P) if preset in (PRESET_EXP2, PRESET_EXP3) else WorldConfig()
    spec = ExperimentSpec(preset=preset, world=world)
    if runs is not None:
        spec = replace(spec, runs_per_cell=runs)
    if seed is not None:
        spec = replace(spec, world=replace(spec.world, base_seed=seed))
    if out is not None:
        spec = replace(spec, output_dir=out)
    return apply_preset(spec).validate()
