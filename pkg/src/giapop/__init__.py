"""Trophozoite population control: plant, norm observer, dose laws, engine.

The package simulates a drug-dosed protozoan population whose growth
rate carries a mutation-resistance term, estimates the unmeasured
resistance magnitude with a first-order norm observer, computes doses by
output feedback, and machine-checks the certified inequalities (observer
bound, exponential decay envelope, Riccati refinement) on every run.
"""

from .analysis import (ComparisonRow, McSummary, UncertaintyRanges,
                       compare_experiment, convert_dose, monte_carlo,
                       riccati_bound, time_to_fraction)
from .config import (DEFAULT_CONFIG, ParsedConfig, RunManifest, config_hash,
                     parse_config, tool_version, write_manifest)
from .control import (STRATEGIES, UM_PER_UGML, AdaptiveConfig, AdaptiveReport,
                      ControllerConfig, DoseSchedule, adaptive_dose,
                      clamp_nonneg, constant_dose, min_eta, scheduled_dose,
                      validate_adaptive)
from .csvio import (TRAJECTORY_HEADER, read_counts_csv, read_experiment_csv,
                    read_schedule_csv, read_trajectory_csv,
                    write_trajectory_csv)
from .errors import NumericError, ValidationError
from .model import (Derivative, ModelParams, PlantState, growth_rate,
                    open_loop_equilibrium, output, vector_field)
from .observer import (GainReport, ObserverParams, ObserverState,
                       certified_bound, observer_derivative, pi_bound,
                       validate_gains)
from .sim import (SimConfig, Trajectory, TrajectoryRecord, check_envelope,
                  check_observer_bound, rk4_step, simulate)

__version__ = tool_version()

__all__ = [
    "AdaptiveConfig", "AdaptiveReport", "ComparisonRow", "ControllerConfig",
    "DEFAULT_CONFIG", "Derivative", "DoseSchedule", "GainReport", "McSummary",
    "ModelParams", "NumericError", "ObserverParams", "ObserverState",
    "ParsedConfig", "PlantState", "RunManifest", "STRATEGIES", "SimConfig",
    "TRAJECTORY_HEADER", "Trajectory", "TrajectoryRecord", "UM_PER_UGML",
    "UncertaintyRanges", "ValidationError", "adaptive_dose", "certified_bound",
    "check_envelope", "check_observer_bound", "clamp_nonneg",
    "compare_experiment", "config_hash", "constant_dose", "convert_dose",
    "growth_rate", "min_eta", "monte_carlo", "observer_derivative",
    "open_loop_equilibrium", "output", "parse_config", "pi_bound",
    "read_counts_csv", "read_experiment_csv", "read_schedule_csv",
    "read_trajectory_csv", "riccati_bound", "rk4_step", "scheduled_dose",
    "simulate", "time_to_fraction", "tool_version", "validate_adaptive",
    "validate_gains", "vector_field", "write_manifest",
    "write_trajectory_csv",
]
