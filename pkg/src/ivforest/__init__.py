"""Regression for interval-valued data: random forests, kernel smoothing,
and linear center/radius baselines, plus a seeded simulation benchmark."""

from .errors import (
    ConfigError,
    DegenerateTruthError,
    DimensionError,
    EmptySampleError,
    InvalidIntervalError,
    IvforestError,
    NumericError,
    OOBUnavailableError,
    ParseError,
    SplitError,
    UnderdeterminedError,
    UnknownSettingError,
)
from .evaluate import (
    EvalReport,
    ExperimentResult,
    ExperimentSpec,
    evaluate,
    evaluate_frame,
    run_experiment,
    run_real_data,
)
from .forest import ForestFit, ForestParams, fit_forest, predict_forest, predict_forest_frame
from .frame import IntervalFrame, SplitSpec, coherence_report, load_csv, split, write_csv
from .intervals import (
    HyperInterval,
    Interval,
    WWeight,
    aumann_mean,
    delta_distance,
    from_center_radius,
    hausdorff,
    hyper_distance,
    make_interval,
    minkowski_add,
    scalar_mul,
    w_distance,
)
from .kernel import KernelFit, fit_kernel, predict_kernel, predict_kernel_frame, select_bandwidth
from .linear import LinearFit, PredictionSet, fit_linear, nnls, ols, predict_linear
from .simulate import SimSetting, simulate

__version__ = "0.1.0"
