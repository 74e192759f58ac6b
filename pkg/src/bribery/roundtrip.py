"""Simulate, estimate and classify over many seeds."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import pandas as pd

from .equilibrium import Scenario
from .estimator import RegressionSpec, fit_panel
from .identify import classify_scenario
from .panelgen import Calibration, generate_panel

__all__ = ["ROUNDTRIP_ALPHA", "RoundtripSummary", "replicate", "run_roundtrip"]

# three tests at this level leave about 1.5% false verdicts for SC, the
# scenario defined purely by non-rejections
ROUNDTRIP_ALPHA = 0.005


@dataclass
class RoundtripSummary:
    scenario: Scenario
    alpha: float
    records: pd.DataFrame

    @property
    def reps(self) -> int:
        return len(self.records)

    @property
    def recovery_rate(self) -> float:
        return float(self.records["correct"].mean())

    @property
    def lambda_coverage(self) -> float:
        return float(self.records["lambda_within_2se"].mean())

    def report(self) -> str:
        counts = self.records["verdict"].value_counts().reindex(
            ["NS", "SC", "SwC", "inconclusive"], fill_value=0)
        return "\n".join([
            f"scenario {self.scenario}: {self.reps} replications, alpha {self.alpha:g}",
            "verdicts: " + ", ".join(f"{k}={v}" for k, v in counts.items()),
            f"recovery rate: {self.recovery_rate:.6g}",
            f"lambda within 2 SE of truth: {self.lambda_coverage:.6g}",
        ])


def replicate(args) -> dict:
    """One seeded simulate-estimate-classify pass (picklable for workers)."""
    cal, scenario, seed, alpha, spec = args
    panel = generate_panel(cal, scenario, seed=seed)
    fit = fit_panel(panel, spec)
    verdict = classify_scenario(fit, alpha)
    truth = cal.true_coefficients(scenario)["swc_lambda"]
    lam, se = fit.coef["swc_lambda"], fit.se["swc_lambda"]
    t = fit.tstat
    return {
        "seed": seed,
        "verdict": verdict.verdict,
        "correct": verdict.verdict == str(scenario),
        "lambda_hat": lam,
        "lambda_se": se,
        "lambda_within_2se": abs(lam - truth) <= 2 * se,
        "t_ns": t["ns"],
        "t_lambda": t["swc_lambda"],
        "t_g": t["swc_g"],
        "truncated": panel.truncated_bribe,
    }


def run_roundtrip(cal: Calibration, scenario, reps: int, seed: int,
                  alpha: float = ROUNDTRIP_ALPHA, spec: RegressionSpec | None = None,
                  jobs: int = 1) -> RoundtripSummary:
    """Replication ``r`` uses seed ``seed + r``; results are ordered by ``r``."""
    if reps < 1:
        raise ValueError("reps must be >= 1")
    scenario = Scenario.parse(scenario)
    spec = spec or RegressionSpec()
    tasks = [(cal, scenario, seed + r, alpha, spec) for r in range(reps)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(replicate, tasks))
    else:
        rows = [replicate(t) for t in tasks]
    return RoundtripSummary(scenario, alpha, pd.DataFrame(rows))
