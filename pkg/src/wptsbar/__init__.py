"""Simulation and control toolkit for a series-series compensated wireless
power transfer link with a semi-bridgeless active rectifier.

Two engines over one circuit: a fundamental-amplitude (envelope) model with
a closed-form propagator as its oracle, and a carrier-resolved switched
model of the inverter/rectifier pair.  On top sit the rectifier duty map,
the inverse-model overshoot-suppressing command generator, and a scenario
harness that reproduces the published step/ramp/proposed comparison.
"""

from .controller import (
    ControllerConfig,
    FilterState,
    command_chain,
    f_duty,
    f_inv,
    inverse_plant_step,
    lowpass_reference,
    make_reference,
)
from .envelope import (
    EnvelopeState,
    analytic_chain,
    analytic_envelope,
    envelope_rhs,
    max_stable_dt,
    simulate_envelope,
)
from .errors import DivergenceError, ToleranceError, ValidationError, WptsbarError
from .harness import (
    Metrics,
    ScenarioConfig,
    Table2Report,
    compute_metrics,
    emit_csv,
    load_config,
    reproduce_table2,
    run_scenario,
)
from .model import (
    DEFAULT_PARAMS,
    CircuitParams,
    DerivedParams,
    TransferFn2x1,
    derive_params,
    envelope_matrices,
    g22,
    steady_state,
)
from .series import TimeSeries
from .switched import (
    GateSchedule,
    SwitchedState,
    converged_state,
    envelope_buckets,
    extract_envelope,
    simulate_switched,
)

__version__ = "0.1.0"

__all__ = [
    "CircuitParams",
    "ControllerConfig",
    "DEFAULT_PARAMS",
    "DerivedParams",
    "DivergenceError",
    "EnvelopeState",
    "FilterState",
    "GateSchedule",
    "Metrics",
    "ScenarioConfig",
    "SwitchedState",
    "Table2Report",
    "TimeSeries",
    "ToleranceError",
    "TransferFn2x1",
    "ValidationError",
    "WptsbarError",
    "analytic_chain",
    "analytic_envelope",
    "command_chain",
    "compute_metrics",
    "converged_state",
    "derive_params",
    "emit_csv",
    "envelope_buckets",
    "envelope_matrices",
    "envelope_rhs",
    "extract_envelope",
    "f_duty",
    "f_inv",
    "g22",
    "inverse_plant_step",
    "load_config",
    "lowpass_reference",
    "make_reference",
    "max_stable_dt",
    "reproduce_table2",
    "run_scenario",
    "simulate_envelope",
    "simulate_switched",
    "steady_state",
    "__version__",
]
