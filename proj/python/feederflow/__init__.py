"""Three-phase feeder Y-Bus construction and Z-Bus load flow."""

from ._core import (
    AssumptionCheck,
    Diagnostics,
    Feeder,
    FeederParseError,
    FeederValidationError,
    NumericalFailure,
    PhaseIndexMap,
    SolverResult,
    __version__,
    assemble,
    build_index,
    check,
    epsilon_sweep,
    load_admittance,
    parse_feeder,
    parse_feeder_string,
    regulator_internal_voltages,
    regulator_ratio,
    residual,
    serialize_feeder,
    solve,
    transformer_matrices,
    voltage_table,
)

__all__ = [
    "AssumptionCheck",
    "Diagnostics",
    "Feeder",
    "FeederParseError",
    "FeederValidationError",
    "NumericalFailure",
    "PhaseIndexMap",
    "SolverResult",
    "__version__",
    "assemble",
    "build_index",
    "check",
    "epsilon_sweep",
    "load_admittance",
    "parse_feeder",
    "parse_feeder_string",
    "regulator_internal_voltages",
    "regulator_ratio",
    "residual",
    "serialize_feeder",
    "solve",
    "transformer_matrices",
    "voltage_table",
]
