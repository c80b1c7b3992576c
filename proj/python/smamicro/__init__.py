"""Two-variant shape-memory alloy microstructure simulator."""

from ._core import (
    BoundaryKind,
    ConfigError,
    ContractViolation,
    ExitCode,
    Material,
    MaterialParams,
    Mesh2D,
    Preset,
    RunConfig,
    Variant,
    diagnose_directory,
    edge_stretch,
    lp_relaxation_check,
    mooney_rivlin,
    parse_config,
    phase_objective,
    run,
    run_to_directory,
    serialize_config,
    solve_phase,
    variant_density,
    variant_density_gradient,
)

__all__ = [
    "BoundaryKind",
    "ConfigError",
    "ContractViolation",
    "ExitCode",
    "Material",
    "MaterialParams",
    "Mesh2D",
    "Preset",
    "RunConfig",
    "Variant",
    "diagnose_directory",
    "edge_stretch",
    "lp_relaxation_check",
    "mooney_rivlin",
    "parse_config",
    "phase_objective",
    "run",
    "run_to_directory",
    "serialize_config",
    "solve_phase",
    "variant_density",
    "variant_density_gradient",
]
