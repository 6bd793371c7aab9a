"""Accuracy metrics and the benchmark experiment driver.

The driver runs a grid of (setting, total size, replication) cells: each
cell simulates a dataset, splits off the training fraction, fits every
requested model, and scores center and radius predictions on the held-out
rows with out-of-sample R-squared, MSE, and MAE. Replications are
independent jobs keyed by seeds derived from the master seed, so results
are byte-reproducible regardless of worker count or completion order.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DegenerateTruthError, DimensionError, EmptySampleError
from .frame import IntervalFrame, SplitSpec, split
from .forest import ForestParams, fit_forest, predict_forest_frame
from .kernel import fit_kernel, predict_kernel_frame
from .linear import PredictionSet, fit_linear, predict_linear_frame
from .rng import derive_seed
from .simulate import SETTING_IDS, SimSetting, simulate

MODELS = ("ccrm", "crm", "minmax", "ke", "rf")
COMPONENTS = ("center", "radius")


@dataclass(frozen=True)
class ComponentScores:
    r2: float
    mse: float
    mae: float


@dataclass(frozen=True)
class EvalReport:
    center: ComponentScores
    radius: ComponentScores
    n_test: int
    incoherent_count: int


def _scores(pred: np.ndarray, truth: np.ndarray, what: str) -> ComponentScores:
    resid = pred - truth
    mse = float(np.mean(resid**2))
    mae = float(np.mean(np.abs(resid)))
    dev = truth - truth.mean()
    sst = float(dev @ dev)
    if sst <= 0.0:
        raise DegenerateTruthError(f"test {what} values have zero variance")
    r2 = 1.0 - float(resid @ resid) / sst
    return ComponentScores(r2, mse, mae)


def evaluate(pred: PredictionSet, truth_center: np.ndarray, truth_radius: np.ndarray) -> EvalReport:
    """Score predictions against the truth, per component.

    R-squared is out-of-sample: the baseline is the test-set mean, so values
    can be negative. Incoherent predictions are scored on their raw values
    and counted.
    """
    truth_center = np.asarray(truth_center, dtype=float).ravel()
    truth_radius = np.asarray(truth_radius, dtype=float).ravel()
    n = truth_center.size
    if pred.center.size != n or truth_radius.size != n:
        raise DimensionError(
            f"prediction rows ({pred.center.size}) != truth rows ({n})"
        )
    if n < 2:
        raise EmptySampleError(f"evaluation needs at least 2 rows, got {n}")
    return EvalReport(
        _scores(pred.center, truth_center, "center"),
        _scores(pred.radius, truth_radius, "radius"),
        n_test=n,
        incoherent_count=int(np.count_nonzero(pred.incoherent)),
    )


def evaluate_frame(pred: PredictionSet, truth: IntervalFrame) -> EvalReport:
    return evaluate(pred, truth.y_center, truth.y_radius)


@dataclass(frozen=True)
class ExperimentSpec:
    """Benchmark grid: settings x total sizes x replications x models."""

    settings: tuple[int, ...]
    total_sizes: tuple[int, ...] = (500, 1000, 2000)
    reps: int = 100
    models: tuple[str, ...] = ("ccrm", "rf")
    master_seed: int = 0
    train_fraction: float = 0.1
    n_trees: int = 500
    mtry: int | None = None
    min_node: int = 5
    max_depth: int | None = None
    kernel: str = "gaussian"
    bandwidth: float | None = None
    workers: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "settings", tuple(int(s) for s in self.settings))
        object.__setattr__(self, "total_sizes", tuple(int(n) for n in self.total_sizes))
        object.__setattr__(self, "models", tuple(m.lower() for m in self.models))
        if self.reps < 1:
            raise ConfigError(f"reps must be >= 1, got {self.reps}")
        for m in self.models:
            if m not in MODELS:
                raise ConfigError(f"unknown model {m!r}; choose from {', '.join(MODELS)}")
        if not self.models:
            raise ConfigError("no models requested")
        for s in self.settings:
            if s not in SETTING_IDS:
                raise ConfigError(f"unknown setting {s}; choose from 1..7")
        if not (0.0 < self.train_fraction < 1.0):
            raise ConfigError(f"train_fraction must be in (0, 1), got {self.train_fraction}")


@dataclass(frozen=True)
class CellRow:
    setting: int
    n_train: int
    rep: int
    model: str
    component: str
    r2: float
    mse: float
    mae: float
    wall_time_s: float
    incoherent: int


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    rows: list[CellRow] = field(default_factory=list)

    def sorted_rows(self) -> list[CellRow]:
        order = {m: i for i, m in enumerate(MODELS)}
        return sorted(
            self.rows,
            key=lambda r: (r.setting, r.n_train, r.rep, order[r.model], r.component),
        )

    def mean_cells(self) -> dict:
        """Mean r2/mse/mae per (setting, n_train, model, component)."""
        sums: dict[tuple, list[float]] = {}
        for r in self.sorted_rows():
            key = (r.setting, r.n_train, r.model, r.component)
            acc = sums.setdefault(key, [0.0, 0.0, 0.0, 0])
            acc[0] += r.r2
            acc[1] += r.mse
            acc[2] += r.mae
            acc[3] += 1
        return {
            key: {"r2": s[0] / s[3], "mse": s[1] / s[3], "mae": s[2] / s[3]}
            for key, s in sums.items()
        }


def fit_and_predict(
    model: str,
    train: IntervalFrame,
    test: IntervalFrame,
    spec: ExperimentSpec,
    seed: int,
) -> PredictionSet:
    if model in ("ccrm", "crm", "minmax"):
        fit = fit_linear(model, train)
        return predict_linear_frame(fit, test)
    if model == "ke":
        fit = fit_kernel(train, h=spec.bandwidth, kernel=spec.kernel)
        return predict_kernel_frame(fit, test)
    if model == "rf":
        params = ForestParams(
            n_trees=spec.n_trees,
            mtry=spec.mtry,
            min_node=spec.min_node,
            max_depth=spec.max_depth,
            seed=seed,
        )
        fit = fit_forest(train, params)
        return predict_forest_frame(fit, test)
    raise ConfigError(f"unknown model {model!r}")


def _run_cell(args: tuple) -> list[CellRow]:
    spec, setting, total_n, rep = args
    rep_seed = derive_seed("rep", spec.master_seed, setting, total_n, rep)
    frame = simulate(SimSetting(setting, total_n, rep_seed))
    train, test = split(
        frame, SplitSpec(spec.train_fraction, mode="random", seed=rep_seed)
    )
    rows: list[CellRow] = []
    for model in spec.models:
        t0 = time.perf_counter()
        pred = fit_and_predict(model, train, test, spec, rep_seed)
        report = evaluate_frame(pred, test)
        wall = time.perf_counter() - t0
        for component in COMPONENTS:
            scores = getattr(report, component)
            rows.append(
                CellRow(
                    setting,
                    train.n,
                    rep,
                    model,
                    component,
                    scores.r2,
                    scores.mse,
                    scores.mae,
                    wall,
                    report.incoherent_count,
                )
            )
    return rows


def resolve_workers(requested: int | None) -> int:
    if requested is not None:
        return max(1, int(requested))
    env = os.environ.get("IVF_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_experiment(spec: ExperimentSpec) -> ExperimentResult:
    """Run every cell of the grid; fully determined by the master seed."""
    jobs = [
        (spec, setting, total_n, rep)
        for setting in spec.settings
        for total_n in spec.total_sizes
        for rep in range(spec.reps)
    ]
    workers = resolve_workers(spec.workers)
    result = ExperimentResult(spec)
    if workers <= 1 or len(jobs) <= 1:
        for job in jobs:
            result.rows.extend(_run_cell(job))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for rows in pool.map(_run_cell, jobs, chunksize=1):
                result.rows.extend(rows)
    result.rows = result.sorted_rows()
    return result


RESULTS_HEADER = "setting,n_train,rep,model,component,r2,mse,mae"
TIMINGS_HEADER = "setting,n_train,rep,model,wall_time_s"


def results_csv(result: ExperimentResult) -> str:
    lines = [RESULTS_HEADER]
    for r in result.sorted_rows():
        lines.append(
            f"{r.setting},{r.n_train},{r.rep},{r.model},{r.component},"
            f"{r.r2!r},{r.mse!r},{r.mae!r}"
        )
    return "\n".join(lines) + "\n"


def timings_csv(result: ExperimentResult) -> str:
    lines = [TIMINGS_HEADER]
    seen = set()
    for r in result.sorted_rows():
        key = (r.setting, r.n_train, r.rep, r.model)
        if key in seen:
            continue
        seen.add(key)
        lines.append(f"{r.setting},{r.n_train},{r.rep},{r.model},{r.wall_time_s:.6f}")
    return "\n".join(lines) + "\n"


def summary_csv(result: ExperimentResult) -> str:
    """Mean per cell in a layout mirroring the benchmark tables.

    One row per (setting, n_train, component, metric); one column per model
    plus a marker column naming the best model (highest r2, lowest mse/mae).
    """
    cells = result.mean_cells()
    models = list(result.spec.models)
    lines = ["setting,n_train,component,metric," + ",".join(models) + ",best"]
    keys = sorted({(s, n) for (s, n, _, _) in cells})
    for setting, n_train in keys:
        for component in COMPONENTS:
            for metric in ("r2", "mse", "mae"):
                vals = [cells[(setting, n_train, m, component)][metric] for m in models]
                if metric == "r2":
                    best = models[int(np.argmax(vals))]
                else:
                    best = models[int(np.argmin(vals))]
                row = [str(setting), str(n_train), component, metric]
                row += [repr(v) for v in vals]
                row.append(best)
                lines.append(",".join(row))
    return "\n".join(lines) + "\n"


PREDICTIONS_HEADER = "y_L,y_U,incoherent"


def predictions_csv(pred: PredictionSet) -> str:
    """Raw bound-form predictions; incoherent rows keep their inverted bounds."""
    lines = [PREDICTIONS_HEADER]
    for c, r, bad in zip(pred.center, pred.radius, pred.incoherent):
        lines.append(f"{float(c - r)!r},{float(c + r)!r},{int(bad)}")
    return "\n".join(lines) + "\n"


def read_predictions_csv(path) -> PredictionSet:
    import csv as _csv

    with open(path, newline="", encoding="utf-8") as fh:
        reader = _csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != PREDICTIONS_HEADER.split(","):
            raise ConfigError(f"{path}: expected header {PREDICTIONS_HEADER!r}")
        lo, hi, flags = [], [], []
        for raw in reader:
            if not raw or all(not cell.strip() for cell in raw):
                continue
            lo.append(float(raw[0]))
            hi.append(float(raw[1]))
            flags.append(bool(int(raw[2])))
    lo_arr = np.asarray(lo)
    hi_arr = np.asarray(hi)
    return PredictionSet(
        0.5 * (lo_arr + hi_arr), 0.5 * (hi_arr - lo_arr), np.asarray(flags, dtype=bool)
    )


def run_real_data(
    frame: IntervalFrame,
    models: tuple[str, ...] = ("ccrm", "rf"),
    train_fraction: float = 0.8,
    train_count: int | None = None,
    mode: str = "chronological",
    seed: int = 0,
    n_trees: int = 500,
    mtry: int | None = None,
    min_node: int = 5,
    kernel: str = "gaussian",
    bandwidth: float | None = None,
) -> tuple[dict, dict]:
    """Single-dataset comparison: split, fit each model, score on the test part.

    Returns (reports, predictions), keyed by model name.
    """
    spec = ExperimentSpec(
        settings=(1,),
        reps=1,
        models=tuple(models),
        master_seed=seed,
        n_trees=n_trees,
        mtry=mtry,
        min_node=min_node,
        kernel=kernel,
        bandwidth=bandwidth,
    )
    train, test = split(
        frame, SplitSpec(train_fraction, mode=mode, seed=seed, train_count=train_count)
    )
    reports: dict[str, EvalReport] = {}
    predictions: dict[str, PredictionSet] = {}
    for model in spec.models:
        pred = fit_and_predict(model, train, test, spec, derive_seed("real", seed))
        predictions[model] = pred
        reports[model] = evaluate_frame(pred, test)
    return reports, predictions
