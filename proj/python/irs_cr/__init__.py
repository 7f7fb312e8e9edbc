"""IRS-assisted spectrum sharing simulator (C++ core)."""

from ._core import (
    ChannelSet,
    ConfigError,
    NumericalError,
    ResultRecord,
    ScenarioConfig,
    SolveResult,
    SystemParams,
    format_results,
    interference_min,
    max_eigenvalue,
    optimal_power,
    run_sweep,
    sinr,
    solve_ao,
    solve_no_irs,
    solve_two_stage,
    trial_channels,
    write_results,
)

__all__ = [
    "ChannelSet",
    "ConfigError",
    "NumericalError",
    "ResultRecord",
    "ScenarioConfig",
    "SolveResult",
    "SystemParams",
    "format_results",
    "interference_min",
    "max_eigenvalue",
    "optimal_power",
    "run_sweep",
    "sinr",
    "solve_ao",
    "solve_no_irs",
    "solve_two_stage",
    "trial_channels",
    "write_results",
]
