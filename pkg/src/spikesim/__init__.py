"""Simulation of nonlinear bidimensional integrate-and-fire neuron models.

Fixed-step Euler, a hybrid scheme that switches to the phase-plane orbit
equations where the membrane potential moves fast, an adaptive version of
that scheme with a per-step precision target, and a high-accuracy reference
solver, together with error analysis and spike-pattern classification.
"""

from .error_analysis import (
    ErrorClass,
    ErrorCurvePoint,
    ErrorReport,
    error_A,
    error_B,
    error_vs_cutoff_curve,
    measure_empirical_error,
    onedim_blowup_solution,
    spike_time_delay,
)
from .exceptions import (
    AnalysisError,
    BlowUpError,
    ConfigError,
    DataError,
    DivergenceError,
    InvertibilityError,
    MeasurementError,
    ModelRangeError,
    OracleError,
    QuadratureError,
    SpikeSimError,
    StepSizeError,
)
from .harness import (
    BenchReport,
    ExperimentConfig,
    load_config,
    load_shipped_config,
    parse_config,
    run_comparison,
    run_error_sweep,
    run_experiment,
)
from .integrators import (
    SimState,
    SolverConfig,
    SpikeTrain,
    Trajectory,
    reference_solve,
    simulate,
    simulate_euler,
    simulate_hybrid_adaptive,
    simulate_hybrid_fixed,
)
from .models import InputCurrent, ModelSpec, analyze_fixed_points, in_spiking_zone
from .spiketrain import PatternClass, ResetSequence, classify_pattern, reset_histogram, reset_sequence

__version__ = "0.1.0"

__all__ = [
    "AnalysisError",
    "BenchReport",
    "BlowUpError",
    "ConfigError",
    "DataError",
    "DivergenceError",
    "ErrorClass",
    "ErrorCurvePoint",
    "ErrorReport",
    "ExperimentConfig",
    "InputCurrent",
    "InvertibilityError",
    "MeasurementError",
    "ModelRangeError",
    "ModelSpec",
    "OracleError",
    "PatternClass",
    "QuadratureError",
    "ResetSequence",
    "SimState",
    "SolverConfig",
    "SpikeSimError",
    "SpikeTrain",
    "StepSizeError",
    "Trajectory",
    "analyze_fixed_points",
    "classify_pattern",
    "error_A",
    "error_B",
    "error_vs_cutoff_curve",
    "in_spiking_zone",
    "load_config",
    "load_shipped_config",
    "measure_empirical_error",
    "onedim_blowup_solution",
    "parse_config",
    "reference_solve",
    "reset_histogram",
    "reset_sequence",
    "run_comparison",
    "run_error_sweep",
    "run_experiment",
    "simulate",
    "simulate_euler",
    "simulate_hybrid_adaptive",
    "simulate_hybrid_fixed",
    "spike_time_delay",
]
