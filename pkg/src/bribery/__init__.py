"""Two-period bribery model: equilibria, brute-force checks, synthetic panels,
fixed-effects estimation and scenario identification."""

from .equilibrium import (
    EquilibriumOutcome, MenuOffer, ModelParams, Scenario, bureaucrat_objective,
    entry_threshold, firm_payoff, solve_scenario, solve_swc_uncertain, validate_params,
)
from .estimator import FitResult, RegressionSpec, fit_panel, fit_within, lsdv_oracle, within_demean
from .identify import classify_scenario, detect_bribery, load_coefficients
from .oracle import GridSpec, bracketing_grid, brute_force_menu, check_constraints
from .panelgen import (
    Calibration, PanelDataset, construct_design, generate_panel, read_csv, summarize_panel,
    write_csv,
)

__version__ = "0.1.0"

__all__ = [
    "EquilibriumOutcome", "MenuOffer", "ModelParams", "Scenario", "bureaucrat_objective",
    "entry_threshold", "firm_payoff", "solve_scenario", "solve_swc_uncertain",
    "validate_params", "FitResult", "RegressionSpec", "fit_panel", "fit_within",
    "lsdv_oracle", "within_demean", "classify_scenario", "detect_bribery",
    "load_coefficients", "GridSpec", "bracketing_grid", "brute_force_menu",
    "check_constraints", "Calibration", "PanelDataset", "construct_design",
    "generate_panel", "read_csv", "summarize_panel", "write_csv",
]
