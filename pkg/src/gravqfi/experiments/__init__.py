from .config import ConfigError, Grid, SweepConfig, load_config, parse_config
from .report import report_steady_state
from .sweeps import (
    SweepRow,
    optimal_time,
    run_purity_sweep,
    run_qfi_contour,
    run_qfi_sweep,
    to_csv,
    write_csv,
)
from .validation import run_validation, validate

__all__ = [
    "ConfigError",
    "Grid",
    "SweepConfig",
    "SweepRow",
    "load_config",
    "optimal_time",
    "parse_config",
    "report_steady_state",
    "run_purity_sweep",
    "run_qfi_contour",
    "run_qfi_sweep",
    "run_validation",
    "to_csv",
    "validate",
    "write_csv",
]
