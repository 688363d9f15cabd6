"""Schedule-free optimization toolkit: optimizer core, baselines,
synthetic problems, loss-curve analysis, and a run harness."""

from .analysis import (
    CurveFit,
    ema_smooth,
    extrapolate,
    fit_inverse_sqrt,
    inverse_sqrt_model,
    norm_diagnostics,
)
from .baselines import (
    BaselineAdam,
    BaselineConfig,
    BoundInput,
    Schedule,
    anytime_bound,
    bound_curve,
    bound_grid_multipliers,
    optimal_weights,
    schedule_multiplier,
    schedule_value,
    weight_objective,
)
from .errors import (
    BatchTooLarge,
    ConfigInvalid,
    DenominatorZero,
    Diverged,
    FitDiverged,
    MissingColumn,
    NonFiniteParameter,
    OutputUnwritable,
    SfplusError,
)
from .harness import apply_overrides, bound_cmd, fit_cmd, load_config, run, sweep
from .presets import describe_presets, get_preset, get_sweep
from .problems import Problem, make_problem
from .sfcore import (
    HyperConfig,
    ScheduleFreePlus,
    SfState,
    StepDiagnostics,
    anneal_beta,
    averaging_coeff,
    eval_point,
    init_state,
    l1_denominator_pair,
    model_point,
    polyak_scalar,
    sf_step,
)

__version__ = "0.1.0"

__all__ = [
    "BaselineAdam",
    "BaselineConfig",
    "BatchTooLarge",
    "BoundInput",
    "ConfigInvalid",
    "CurveFit",
    "DenominatorZero",
    "Diverged",
    "FitDiverged",
    "HyperConfig",
    "MissingColumn",
    "NonFiniteParameter",
    "OutputUnwritable",
    "Problem",
    "Schedule",
    "ScheduleFreePlus",
    "SfState",
    "SfplusError",
    "StepDiagnostics",
    "anneal_beta",
    "anytime_bound",
    "apply_overrides",
    "averaging_coeff",
    "bound_cmd",
    "bound_curve",
    "bound_grid_multipliers",
    "describe_presets",
    "ema_smooth",
    "eval_point",
    "extrapolate",
    "fit_cmd",
    "fit_inverse_sqrt",
    "get_preset",
    "get_sweep",
    "init_state",
    "inverse_sqrt_model",
    "l1_denominator_pair",
    "load_config",
    "make_problem",
    "model_point",
    "norm_diagnostics",
    "optimal_weights",
    "polyak_scalar",
    "run",
    "schedule_multiplier",
    "schedule_value",
    "sf_step",
    "sweep",
    "weight_objective",
]
