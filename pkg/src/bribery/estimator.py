"""Within (firm fixed-effects) least squares with firm-clustered covariance."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import pandas as pd
from scipy import linalg, stats

from .errors import DesignError, RankDeficiencyError, SizeLimitError
from .panelgen import COEF_LABELS, Design, Interaction, PanelDataset, construct_design

__all__ = [
    "RegressionSpec",
    "FitResult",
    "within_demean",
    "fit_within",
    "fit_panel",
    "lsdv_oracle",
    "coef_label",
    "stars",
    "RANK_TOL",
]

RANK_TOL = 1e-10


def coef_label(key: str) -> str:
    if key in COEF_LABELS:
        return COEF_LABELS[key]
    if key.startswith("beta_") and key[5:].isdigit():
        return f"β_{key[5:]}"
    return key


def stars(t: float) -> str:
    """Two-sided normal significance stars at 10/5/1%."""
    if not np.isfinite(t):
        return ""
    p = 2.0 * stats.norm.sf(abs(t))
    return "***" if p < 0.01 else "**" if p < 0.05 else "*" if p < 0.10 else ""


@dataclass(frozen=True)
class RegressionSpec:
    """Recipe for a fit: which regressors, which response, which covariance.

    ``regressors`` optionally restricts the design to a subset of its
    columns. ``cov_type`` is ``"CR1"`` (finite-sample scaled) or ``"CR0"``.
    """

    variant: str = "EM1.1"
    response: str = "bribe"
    regressors: tuple[str, ...] | None = None
    cluster: str = "firm_id"
    year_dummies: bool = True
    interactions: tuple[Interaction, ...] = ()
    cov_type: str = "CR1"

    def __post_init__(self):
        if self.regressors is not None and len(set(self.regressors)) != len(self.regressors):
            raise DesignError("regressors must be distinct")
        if self.cov_type not in ("CR0", "CR1"):
            raise DesignError(f"cov_type must be CR0 or CR1, got {self.cov_type!r}")
        if self.cluster != "firm_id":
            raise DesignError("clustering is by firm_id only")

    def build(self, panel) -> Design:
        design = construct_design(panel, self.response, self.variant, self.interactions)
        keep = list(design.X.columns)
        if not self.year_dummies:
            keep = [c for c in keep if not (c.startswith("y") and c[1:].isdigit())]
        if self.regressors is not None:
            unknown = [c for c in self.regressors if c not in design.X.columns]
            if unknown:
                raise DesignError(f"unknown regressor(s): {', '.join(unknown)}")
            keep = [c for c in keep if c in self.regressors]
        design.X = design.X[keep]
        design.coef_keys = {c: design.coef_keys[c] for c in keep}
        return design


@dataclass
class FitResult:
    """Estimates keyed by coefficient name.

    Regressors that are constant within every firm are listed in
    ``not_identified`` and carry NaN estimates. ``cov`` covers the
    identified slopes; the intercept's standard error comes from the slope
    covariance through the grand means.
    """

    coef: dict[str, float]
    se: dict[str, float]
    cov: pd.DataFrame
    not_identified: list[str]
    n_obs: int
    n_firms: int
    n_slopes: int
    df_resid: int
    cov_type: str
    r2_within: float
    r2_between: float
    r2_overall: float
    ssr: float
    columns: dict[str, str] = field(default_factory=dict)
    variant: str = "EM1.1"
    response: str = "bribe"

    @property
    def tstat(self) -> dict[str, float]:
        out = {}
        for k, b in self.coef.items():
            s = self.se[k]
            out[k] = b / s if s > 0 else np.nan
        return out

    def __getitem__(self, key: str) -> float:
        return self.coef[key]

    def to_frame(self) -> pd.DataFrame:
        t = self.tstat
        rows = [(k, coef_label(k), self.coef[k], self.se[k], t[k]) for k in self.coef]
        return pd.DataFrame(rows, columns=["name", "label", "estimate", "se", "t"])

    def table(self, digits: int = 6) -> str:
        """Aligned report with stars; numbers to ``digits`` significant digits."""
        t = self.tstat
        fmt = f"{{:.{digits}g}}"
        width = max(12, *(len(coef_label(k)) for k in self.coef)) + 2
        lines = [f"Dependent variable: {self.response}/workers  ({self.variant})",
                 f"{'Coefficient':<{width}}{'Estimate':>16}{'':<4}{'(SE)':>16}"]
        for k, b in self.coef.items():
            if k in self.not_identified:
                lines.append(f"{coef_label(k):<{width}}{'not identified':>16}")
                continue
            lines.append(f"{coef_label(k):<{width}}{fmt.format(b):>16}{stars(t[k]):<4}"
                         f"{'(' + fmt.format(self.se[k]) + ')':>16}")
        lines += [
            f"{'Year FX':<{width}}{'Yes' if any(k.startswith('beta_2') for k in self.coef) else 'No':>16}",
            f"{'Firm FX':<{width}}{'Yes':>16}",
            f"{'Within R2':<{width}}{fmt.format(self.r2_within):>16}",
            f"{'Between R2':<{width}}{fmt.format(self.r2_between):>16}",
            f"{'Overall R2':<{width}}{fmt.format(self.r2_overall):>16}",
            f"{'Observations':<{width}}{self.n_obs:>16}",
            f"{'Firms':<{width}}{self.n_firms:>16}",
            f"Standard errors clustered by firm ({self.cov_type}); *** p<0.01, ** p<0.05, * p<0.1",
        ]
        return "\n".join(lines)

    def write_csv(self, path) -> None:
        self.to_frame()[["name", "estimate", "se", "t"]].to_csv(path, index=False, lineterminator="\n")


def _group_index(groups) -> tuple[np.ndarray, np.ndarray]:
    uniq, inv = np.unique(np.asarray(groups), return_inverse=True)
    return uniq, inv


def within_demean(X, groups) -> tuple[np.ndarray, np.ndarray]:
    """Subtract per-group means from every column.

    Returns the demeaned array and the group means (one row per sorted
    unique group). Accepts 1-D or 2-D input.
    """
    A = np.asarray(X, dtype=float)
    one_d = A.ndim == 1
    A2 = A[:, None] if one_d else A
    _, inv = _group_index(groups)
    counts = np.bincount(inv).astype(float)
    sums = np.zeros((counts.size, A2.shape[1]))
    np.add.at(sums, inv, A2)
    means = sums / counts[:, None]
    out = A2 - means[inv]
    return (out[:, 0], means[:, 0]) if one_d else (out, means)


def _collinear_set(Z: np.ndarray, names: list[str]) -> list[str]:
    scale = np.linalg.norm(Z, axis=0)
    Zn = Z / np.where(scale > 0, scale, 1.0)
    _, s, vt = np.linalg.svd(Zn, full_matrices=False)
    null = vt[s < RANK_TOL * s[0]]
    involved = np.any(np.abs(null) > 1e-6, axis=0)
    return [n for n, hit in zip(names, involved) if hit]


def fit_within(design: Design, cov_type: str = "CR1") -> FitResult:
    """Fixed-effects slopes by QR on firm-demeaned data.

    The CR1 factor is ``G/(G-1) * (N-1)/(N-K)`` with ``K`` counting the
    retained slopes, the ``G`` absorbed firm effects, and the intercept.

    Raises
    ------
    RankDeficiencyError
        If the retained (not absorbed) regressors are collinear.
    DesignError
        If no regressor varies within firms, or the CR1 degrees of freedom
        are exhausted.
    """
    if cov_type not in ("CR0", "CR1"):
        raise DesignError(f"cov_type must be CR0 or CR1, got {cov_type!r}")
    if design.y is None:
        raise DesignError("design has no response")
    # fixed summation order: rows sorted by firm (stable within firm)
    order = np.argsort(design.firm_id, kind="stable")
    names = list(design.X.columns)
    X = design.X.to_numpy(dtype=float)[order]
    y = design.y.to_numpy(dtype=float)[order]
    groups = np.asarray(design.firm_id)[order]
    N = len(y)
    uniq, inv = _group_index(groups)
    G = uniq.size
    if np.bincount(inv).max() < 2:
        raise DesignError("every firm has a single row; within estimation needs >= 2 periods per firm")

    Xd, _ = within_demean(X, inv)
    yd, _ = within_demean(y, inv)

    col_scale = np.maximum(np.abs(X).max(axis=0, initial=0.0), 1.0)
    absorbed = np.abs(Xd).max(axis=0, initial=0.0) <= 1e-12 * col_scale
    keep = np.flatnonzero(~absorbed)
    kept = [names[j] for j in keep]
    if not kept:
        raise DesignError("no regressor varies within firms")
    Z = Xd[:, keep]
    collinear = _collinear_set(Z, kept)
    if collinear:
        raise RankDeficiencyError(collinear)

    Q, R = linalg.qr(Z, mode="economic")
    beta = linalg.solve_triangular(R, Q.T @ yd)
    u = yd - Z @ beta
    Rinv = linalg.solve_triangular(R, np.eye(R.shape[0]))
    bread = Rinv @ Rinv.T

    starts = np.r_[0, np.flatnonzero(np.diff(inv)) + 1]
    scores = np.add.reduceat(Z * u[:, None], starts, axis=0)
    meat = scores.T @ scores
    V = bread @ meat @ bread
    k = len(kept)
    K = k + G + 1
    if cov_type == "CR1":
        if N - K <= 0:
            raise DesignError(f"CR1 needs N > K (N={N}, K={K}); use CR0")
        V = V * (G / (G - 1)) * ((N - 1) / (N - K))
    V = 0.5 * (V + V.T)

    keys = [design.coef_keys[c] for c in names]
    kept_keys = [design.coef_keys[c] for c in kept]
    coef = {key: np.nan for key in keys}
    se = {key: np.nan for key in keys}
    sd = np.sqrt(np.clip(np.diag(V), 0.0, None))
    for key, b, s in zip(kept_keys, beta, sd):
        coef[key], se[key] = float(b), float(s)

    xbar = X[:, keep].mean(axis=0)
    coef["intercept"] = float(y.mean() - xbar @ beta)
    se["intercept"] = float(np.sqrt(max(xbar @ V @ xbar, 0.0)))

    ssr = float(u @ u)
    sst = float(yd @ yd)
    fitted = X[:, keep] @ beta
    fit_means = np.bincount(inv, weights=fitted) / np.bincount(inv)
    y_means = np.bincount(inv, weights=y) / np.bincount(inv)
    return FitResult(
        coef=coef,
        se=se,
        cov=pd.DataFrame(V, index=kept_keys, columns=kept_keys),
        not_identified=[design.coef_keys[names[j]] for j in np.flatnonzero(absorbed)],
        n_obs=N,
        n_firms=G,
        n_slopes=k,
        df_resid=N - K,
        cov_type=cov_type,
        r2_within=float(np.clip(1.0 - ssr / sst, 0.0, 1.0)) if sst > 0 else np.nan,
        r2_between=_sq_corr(fit_means, y_means),
        r2_overall=_sq_corr(fitted, y),
        ssr=ssr,
        columns={design.coef_keys[c]: c for c in names},
        variant=design.variant,
        response=design.response,
    )


def _sq_corr(a: np.ndarray, b: np.ndarray) -> float:
    if a.size < 2 or np.std(a) == 0 or np.std(b) == 0:
        return np.nan
    return float(np.clip(np.corrcoef(a, b)[0, 1] ** 2, 0.0, 1.0))


def fit_panel(panel, spec: RegressionSpec | None = None) -> FitResult:
    """Build the design for ``spec`` from ``panel`` and fit it."""
    spec = spec or RegressionSpec()
    return fit_within(spec.build(panel), spec.cov_type)


def lsdv_oracle(design: Design, max_rows: int = 5000, max_firms: int = 500) -> dict[str, float]:
    """Slopes from OLS with explicit firm dummies.

    Columns are added greedily after the dummies and kept only if they raise
    the rank, so regressors that are constant within firms drop out. The
    returned dict holds the retained slopes keyed by coefficient name.
    """
    N = len(design.X)
    firms, inv = _group_index(design.firm_id)
    if N > max_rows or firms.size > max_firms:
        raise SizeLimitError(f"LSDV oracle limited to {max_rows} rows and {max_firms} firms "
                             f"(got {N} rows, {firms.size} firms)")
    D = np.zeros((N, firms.size))
    D[np.arange(N), inv] = 1.0
    X = design.X.to_numpy(dtype=float)
    kept = []
    current = D
    for j, name in enumerate(design.X.columns):
        trial = np.column_stack([current, X[:, j]])
        scale = np.linalg.norm(trial, axis=0)
        if np.linalg.matrix_rank(trial / np.where(scale > 0, scale, 1.0), tol=1e-8) > current.shape[1]:
            current = trial
            kept.append(name)
    sol, *_ = np.linalg.lstsq(current, design.y.to_numpy(dtype=float), rcond=None)
    slopes = sol[firms.size:]
    return {design.coef_keys[n]: float(b) for n, b in zip(kept, slopes)}
