"""Quantum Otto machine driven by a generalized position measurement and a
PT-symmetric thermal bath, with analytic, truncated-Fock and Gaussian backends."""
from ._kernels import BACKEND as KERNEL_BACKEND
from .analytic_cycle import (
    Backend,
    CycleParams,
    Mode,
    Regime,
    ThermoReport,
    analytic_grid,
    analytic_report,
    cop,
    efficiency,
    sigma_switch,
)
from .bath_models import BathConfig, thermalize
from .config import SweepSpec, parse_config
from .cycle_runner import ComparisonReport, compare_modes, first_law_check, run_cycle
from .errors import (
    ConvergenceError,
    FirstLawError,
    NumericError,
    PTMachineError,
    RegimeError,
    StabilityError,
    TruncationError,
    ValidationError,
)
from .pt_params import PTParams, effective_beta, mu_from_epsilon, thermal_occupancy

__version__ = "0.1.0"

__all__ = [
    "Backend", "BathConfig", "ComparisonReport", "ConvergenceError", "CycleParams",
    "FirstLawError", "KERNEL_BACKEND", "Mode", "NumericError", "PTMachineError", "PTParams",
    "Regime", "RegimeError", "StabilityError", "SweepSpec", "ThermoReport", "TruncationError",
    "ValidationError", "analytic_grid", "analytic_report", "compare_modes", "cop",
    "effective_beta", "efficiency", "first_law_check", "mu_from_epsilon", "parse_config",
    "run_cycle", "sigma_switch", "thermal_occupancy", "thermalize",
]
