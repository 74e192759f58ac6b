"""Synthetic firm-year panels and regression design construction.

The generator is linear in the per-worker regressors of the baseline
specification, so a fit on a noiseless panel returns the true coefficients
exactly. Money is in one unit throughout (the defaults read as thousand
2014 USD); times are in days.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields
from typing import Iterator, Sequence

import numpy as np
import pandas as pd

from .equilibrium import Scenario
from .errors import CalibrationError, DesignError, GenerationError, SchemaError

__all__ = [
    "Calibration",
    "FirmYearRecord",
    "PanelDataset",
    "Interaction",
    "Design",
    "CSV_COLUMNS",
    "BASE_COLUMNS",
    "COEF_KEYS",
    "COEF_LABELS",
    "generate_panel",
    "construct_design",
    "summarize_panel",
    "type_shares",
    "write_csv",
    "read_csv",
    "validate_frame",
]

CSV_COLUMNS = (
    "firm_id", "year", "p_type", "reported_profit", "delta_pi", "capital", "f_l",
    "t_min", "workers", "papers", "dispute", "delay", "bribe", "rep_bribe",
)
_INT_COLUMNS = ("firm_id", "year", "p_type", "workers", "papers", "dispute")

# design column -> coefficient key; year dummies are added per panel
BASE_COLUMNS = {
    "pi_n_w": "beta_pi_n",
    "dpi_p_disp_w": "ns",
    "dpi_p_w": "swc_lambda",
    "m_disp_w": "beta_m",
    "fl_disp_w": "beta_fl",
    "tmin_disp_w": "beta_tmin",
    "m_n_w": "neg_sn_1b",
    "m_p_w": "neg_sp",
    "n_w": "swc_g",
    "ap_w": "beta_ap",
    "apd_w": "beta_apd",
}
COEF_KEYS = tuple(BASE_COLUMNS.values()) + ("intercept",)
COEF_LABELS = {
    "beta_pi_n": "β_ΠN",
    "ns": "1_NS",
    "swc_lambda": "1_SwC·λ",
    "beta_m": "β_M",
    "beta_fl": "β_FL",
    "beta_tmin": "β_tmin",
    "neg_sn_1b": "−s_N·1_B",
    "neg_sp": "−s_P",
    "swc_g": "1_SwC·g",
    "beta_ap": "β_AP",
    "beta_apd": "β_APD",
    "intercept": "Intercept",
}
_PROFIT_COLUMNS = ("dpi_p_disp_w", "dpi_p_w")


def _lognormal_params(mean: float, sd: float) -> tuple[float, float]:
    s2 = math.log1p((sd / mean) ** 2)
    return math.log(mean) - 0.5 * s2, math.sqrt(s2)


@dataclass(frozen=True)
class Calibration:
    """Everything needed to generate a panel.

    Distribution families: money magnitudes, workers, legal times and base
    delays are log-normal with the given mean and standard deviation;
    reported profit is normal; papers are ``1 + Poisson(papers_mean - 1)``.
    Firm-level draws hold workers, capital, legal fee and legal time fixed
    within a firm. Reported profit, unreported profit, type, dispute,
    papers and the processing-cost scale vary by firm-year.
    """

    n_firms: int = 500
    years: tuple[int, ...] = (2012, 2013, 2014)
    theta: float = 0.30
    dispute_prob: float = 0.220
    papers_mean: float = 8.1
    workers_mean: float = 42.7
    workers_sd: float = 83.9
    workers_min: int = 2
    pi_n_mean: float = -56.0
    pi_n_sd: float = 731.7
    pi_n_firm_share: float = 0.7
    delta_pi_mean: float = 423.3
    delta_pi_sd: float = 600.0
    delta_pi_year_sigma: float = 0.3
    capital_mean: float = 554.3
    capital_sd: float = 1500.0
    fl_mean: float = 41.0
    fl_sd: float = 120.0
    tmin_mean: float = 11.6
    tmin_sd: float = 11.1
    delay_mean: float = 4.5
    delay_sd: float = 4.0
    cost_sigma: float = 0.3
    # true coefficients of the per-worker specification
    ns_true: float = 1.0
    lambda_true: float = 0.039
    g_true: float = 8.93
    s_P_true: float = 8.80
    s_N_true: float = 4.0
    one_b: float = 0.0
    beta_pi_n: float = 0.0
    beta_m: float = 0.0
    beta_fl: float = 0.0
    beta_tmin: float = 0.0
    beta_ap: float = 27.6
    beta_apd: float = 14.7
    intercept: float = 35.9
    year_effects: tuple[float, ...] = (2.0, -1.0)
    firm_effect_sd: float = 10.0
    noise_sd: float = 6.0
    rep_noise_sd: float = 3.0
    max_truncation: float = 0.05
    seed: int = 42

    def __post_init__(self):
        object.__setattr__(self, "years", tuple(int(y) for y in self.years))
        object.__setattr__(self, "year_effects", tuple(float(e) for e in self.year_effects))

    def problems(self) -> list[str]:
        out = []
        for name in ("theta", "dispute_prob", "pi_n_firm_share", "max_truncation"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                out.append(f"{name}={v} not in [0,1]")
        if self.n_firms < 2:
            out.append(f"n_firms={self.n_firms} < 2")
        if len(set(self.years)) < 2 or len(set(self.years)) != len(self.years):
            out.append("need at least 2 distinct years")
        if len(self.year_effects) != len(self.years) - 1:
            out.append(f"year_effects needs {len(self.years) - 1} entries (one per year after the first)")
        if self.papers_mean < 1:
            out.append("papers_mean < 1")
        if self.workers_min < 1:
            out.append("workers_min < 1")
        for name in ("workers", "delta_pi", "capital", "fl", "tmin", "delay"):
            if getattr(self, f"{name}_mean") <= 0 or getattr(self, f"{name}_sd") <= 0:
                out.append(f"{name}_mean and {name}_sd must be > 0")
        for name in ("pi_n_sd", "delta_pi_year_sigma", "cost_sigma", "firm_effect_sd",
                     "noise_sd", "rep_noise_sd"):
            if getattr(self, name) < 0:
                out.append(f"{name} < 0")
        if self.s_P_true <= self.s_N_true or self.s_N_true <= 0:
            out.append("need s_P_true > s_N_true > 0")
        return out

    def validate(self) -> None:
        bad = self.problems()
        if bad:
            raise CalibrationError("invalid calibration: " + "; ".join(bad))

    def true_coefficients(self, scenario) -> dict[str, float]:
        """Coefficients the baseline fit should recover under ``scenario``."""
        s = Scenario.parse(scenario)
        truth = {
            "beta_pi_n": self.beta_pi_n,
            "ns": self.ns_true if s is Scenario.NS else 0.0,
            "swc_lambda": self.lambda_true if s is Scenario.SwC else 0.0,
            "beta_m": self.beta_m,
            "beta_fl": self.beta_fl,
            "beta_tmin": self.beta_tmin,
            "neg_sn_1b": -self.s_N_true * self.one_b,
            "neg_sp": -self.s_P_true,
            "swc_g": self.g_true if s is Scenario.SwC else 0.0,
            "beta_ap": self.beta_ap,
            "beta_apd": self.beta_apd,
        }
        for y, e in zip(self.years[1:], self.year_effects):
            truth[f"beta_{y}"] = e
        truth["intercept"] = self.intercept
        return truth

    def replace(self, **changes) -> "Calibration":
        from dataclasses import replace
        return replace(self, **changes)


@dataclass(frozen=True)
class FirmYearRecord:
    firm_id: int
    year: int
    p_type: int
    reported_profit: float
    delta_pi: float
    capital: float
    f_l: float
    t_min: float
    workers: int
    papers: int
    dispute: int
    delay: float
    bribe: float
    rep_bribe: float


@dataclass
class PanelDataset:
    """A panel in CSV column order plus generation metadata."""

    frame: pd.DataFrame
    scenario: Scenario | None = None
    calibration: Calibration | None = None
    truncated_bribe: int = 0
    truncated_rep_bribe: int = 0
    extra: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.frame)

    @property
    def n_firms(self) -> int:
        return int(self.frame["firm_id"].nunique())

    def records(self) -> Iterator[FirmYearRecord]:
        names = [f.name for f in fields(FirmYearRecord)]
        for row in self.frame[names].itertuples(index=False):
            yield FirmYearRecord(*row)

    @classmethod
    def from_records(cls, records: Sequence[FirmYearRecord]) -> "PanelDataset":
        frame = pd.DataFrame([asdict(r) for r in records], columns=list(CSV_COLUMNS))
        return cls(validate_frame(frame))


def _p_delay(c, s_P, t_min):
    return np.maximum(np.sqrt(c / s_P), t_min) - t_min


def generate_panel(cal: Calibration, scenario, seed: int | None = None) -> PanelDataset:
    """Draw a balanced firm-year panel under ``scenario``.

    The bribe per worker is the specification's linear index at the true
    coefficients plus a mean-zero firm effect and noise. Negative bribes
    are set to zero and counted.

    Raises
    ------
    CalibrationError
        If ``cal`` violates its invariants.
    GenerationError
        If more than ``cal.max_truncation`` of either bribe measure was
        truncated at zero.
    """
    cal.validate()
    scenario = Scenario.parse(scenario)
    rng = np.random.default_rng(cal.seed if seed is None else seed)
    G, T = cal.n_firms, len(cal.years)
    n = G * T

    def firm_lognormal(mean, sd, size=G):
        mu, s = _lognormal_params(mean, sd)
        return rng.lognormal(mu, s, size)

    # firm-level draws
    workers = np.maximum(np.rint(firm_lognormal(cal.workers_mean, cal.workers_sd)),
                         cal.workers_min).astype(np.int64)
    capital = firm_lognormal(cal.capital_mean, cal.capital_sd)
    f_l = firm_lognormal(cal.fl_mean, cal.fl_sd)
    t_min = firm_lognormal(cal.tmin_mean, cal.tmin_sd)
    base_delay = firm_lognormal(cal.delay_mean, cal.delay_sd)
    dpi_base = firm_lognormal(cal.delta_pi_mean, cal.delta_pi_sd)
    pi_firm = rng.normal(cal.pi_n_mean, cal.pi_n_sd * math.sqrt(cal.pi_n_firm_share), G)
    alpha = rng.normal(0.0, cal.firm_effect_sd, G)
    alpha -= alpha.mean()

    rep = np.repeat
    firm_id = rep(np.arange(1, G + 1), T)
    year = np.tile(np.asarray(cal.years, dtype=np.int64), G)
    W = rep(workers, T).astype(float)

    # firm-year draws
    p_type = (rng.random(n) >= cal.theta).astype(np.int64)
    dispute = (rng.random(n) < cal.dispute_prob).astype(np.int64)
    papers = 1 + rng.poisson(cal.papers_mean - 1.0, n)
    pi_n = rep(pi_firm, T) + rng.normal(0.0, cal.pi_n_sd * math.sqrt(1 - cal.pi_n_firm_share), n)
    ys = cal.delta_pi_year_sigma
    delta_pi = rep(dpi_base, T) * rng.lognormal(-0.5 * ys * ys, ys, n) * p_type
    tm = rep(t_min, T)
    # processing-cost scale centred so the P-type delay is near the firm's base delay
    c = cal.s_P_true * (tm + rep(base_delay, T)) ** 2 * rng.lognormal(0.0, cal.cost_sigma, n)
    # the P-type time solves the screening problem; the N-type time sits above
    # sqrt(c/s_N), the bound every valid parameter set satisfies
    delay = np.where(p_type == 1,
                     _p_delay(c, cal.s_P_true, tm),
                     _p_delay(c, cal.s_N_true, tm))
    eps = rng.normal(0.0, cal.noise_sd, n)
    eta = rng.normal(0.0, cal.rep_noise_sd, n)

    frame = pd.DataFrame({
        "firm_id": firm_id, "year": year, "p_type": p_type, "reported_profit": pi_n,
        "delta_pi": delta_pi, "capital": rep(capital, T), "f_l": rep(f_l, T),
        "t_min": tm, "workers": rep(workers, T), "papers": papers,
        "dispute": dispute, "delay": delay,
    })
    design = construct_design(frame, response=None, check=False)
    truth = cal.true_coefficients(scenario)
    index = design.X.to_numpy() @ np.array([truth[design.coef_keys[col]] for col in design.X.columns])
    index += cal.intercept + rep(alpha, T)
    per_worker = index + eps
    bribe = W * per_worker
    rep_bribe = W * (per_worker + eta)

    cut_b, cut_r = int((bribe < 0).sum()), int((rep_bribe < 0).sum())
    for name, cut in (("bribe", cut_b), ("rep_bribe", cut_r)):
        if cut > cal.max_truncation * n:
            raise GenerationError(
                f"{cut} of {n} {name} values truncated at 0 "
                f"(limit {cal.max_truncation:.0%}); lower the noise scales")
    frame["bribe"] = np.maximum(bribe, 0.0)
    frame["rep_bribe"] = np.maximum(rep_bribe, 0.0)
    return PanelDataset(frame, scenario, cal, cut_b, cut_r)


# -- design -----------------------------------------------------------------------

@dataclass(frozen=True)
class Interaction:
    """Extra regressor built as a product of factors.

    Each factor is a design column, a panel column, a derived flag
    (``n_type``, ``p_high``, ``p_low``) or any of those prefixed with ``~``
    for the complement ``1 - x``. With ``per_worker`` the product is divided
    by workers. Listing design columns in ``replaces`` drops them from the
    regressor set, which is how a regressor is split by a flag.
    """

    name: str
    factors: tuple[str, ...]
    per_worker: bool = False
    replaces: tuple[str, ...] = ()


@dataclass
class Design:
    X: pd.DataFrame
    y: pd.Series | None
    firm_id: np.ndarray
    year: np.ndarray
    coef_keys: dict[str, str]
    variant: str = "EM1.1"
    response: str = "bribe"

    @property
    def columns(self) -> list[str]:
        return list(self.X.columns)


_REQUIRED = ("firm_id", "year", "p_type", "reported_profit", "delta_pi", "capital",
             "f_l", "t_min", "workers", "papers", "dispute", "delay")
VARIANTS = ("EM1.1", "EM1.2", "EM1.3", "custom")


def _derived_flags(df: pd.DataFrame) -> dict[str, np.ndarray]:
    p = df["p_type"].to_numpy()
    dpi = df["delta_pi"].to_numpy()
    med = float(np.median(dpi[p == 1])) if (p == 1).any() else 0.0
    high = ((p == 1) & (dpi > med)).astype(float)
    return {"n_type": 1.0 - p, "p_high": high, "p_low": p - high}


def construct_design(panel, response: str | None = "bribe", variant: str = "EM1.1",
                     interactions: Sequence[Interaction] = (), check: bool = True) -> Design:
    """Per-worker regressors and response for a fixed-effects fit.

    ``variant`` EM1.2 switches the response to ``rep_bribe``; EM1.3 drops the
    two unreported-profit regressors; ``custom`` applies ``interactions``
    on top of the baseline set. Pass ``response=None`` to skip the response.

    Raises
    ------
    DesignError
        On missing fields, missing values, or non-positive workers.
    """
    df = panel.frame if isinstance(panel, PanelDataset) else panel
    if variant not in VARIANTS:
        raise DesignError(f"unknown variant {variant!r}; choose from {', '.join(VARIANTS)}")
    if variant == "EM1.2":
        response = "rep_bribe" if response is not None else None
    if interactions and variant != "custom":
        raise DesignError("interactions require variant 'custom'")
    need = list(_REQUIRED) + ([response] if response else [])
    missing = [c for c in need if c not in df.columns]
    if missing:
        raise DesignError(f"missing field(s): {', '.join(missing)}")
    if check:
        na = df[need].isna().any()
        if na.any():
            raise DesignError(f"missing values in: {', '.join(na[na].index)}")
        bad = np.flatnonzero(df["workers"].to_numpy() <= 0)
        if bad.size:
            raise DesignError(f"workers must be >= 1 (row {int(bad[0])} has "
                              f"{df['workers'].iloc[bad[0]]})")

    W = df["workers"].to_numpy(dtype=float)
    p = df["p_type"].to_numpy(dtype=float)
    d = df["dispute"].to_numpy(dtype=float)
    delay = df["delay"].to_numpy(dtype=float)
    dpi = df["delta_pi"].to_numpy(dtype=float)
    ap = df["papers"].to_numpy(dtype=float)
    cols = {
        "pi_n_w": df["reported_profit"].to_numpy(dtype=float) / W,
        "dpi_p_disp_w": dpi * p * d / W,
        "dpi_p_w": dpi * p / W,
        "m_disp_w": df["capital"].to_numpy(dtype=float) * d / W,
        "fl_disp_w": df["f_l"].to_numpy(dtype=float) * d / W,
        "tmin_disp_w": df["t_min"].to_numpy(dtype=float) * d / W,
        "m_n_w": delay * (1 - p) * d / W,
        "m_p_w": delay * p * d / W,
        "n_w": delay * p / W,
    }
    cols["ap_w"] = ap / W
    cols["apd_w"] = ap * d / W
    keys = dict(BASE_COLUMNS)
    years = np.sort(df["year"].unique())
    yr = df["year"].to_numpy()
    for y in years[1:]:
        cols[f"y{y}"] = (yr == y).astype(float)
        keys[f"y{y}"] = f"beta_{y}"
    if variant == "EM1.3":
        for c in _PROFIT_COLUMNS:
            del cols[c]

    if interactions:
        flags = _derived_flags(df)
        base = dict(cols)

        def factor(name):
            neg = name.startswith("~")
            key = name[1:] if neg else name
            if key in base:
                v = base[key]
            elif key in flags:
                v = flags[key]
            elif key in df.columns:
                v = df[key].to_numpy(dtype=float)
            else:
                raise DesignError(f"unknown interaction factor {key!r}")
            return 1.0 - v if neg else v

        for rec in interactions:
            if rec.name in cols:
                raise DesignError(f"duplicate regressor {rec.name!r}")
            v = np.ones(len(df))
            for f in rec.factors:
                v = v * factor(f)
            cols[rec.name] = v / W if rec.per_worker else v
            keys[rec.name] = rec.name
        for rec in interactions:
            for r in rec.replaces:
                if r not in base:
                    raise DesignError(f"cannot replace unknown regressor {r!r}")
                cols.pop(r, None)

    X = pd.DataFrame(cols, index=df.index)
    y = df[response].to_numpy(dtype=float) / W if response else None
    return Design(
        X=X,
        y=pd.Series(y, index=df.index, name=f"{response}_w") if response else None,
        firm_id=df["firm_id"].to_numpy(),
        year=yr,
        coef_keys={c: keys[c] for c in X.columns},
        variant=variant,
        response=response or "",
    )


# -- summaries ----------------------------------------------------------------------

def summarize_panel(panel) -> pd.DataFrame:
    """Count, mean, sd, min and max per variable (sd of one row is 0)."""
    df = panel.frame if isinstance(panel, PanelDataset) else panel
    if len(df) == 0:
        raise ValueError("cannot summarize an empty panel")
    body = df[[c for c in CSV_COLUMNS if c not in ("firm_id", "year")]].astype(float)
    out = pd.DataFrame({
        "obs": body.count(),
        "mean": body.mean(),
        "sd": body.std(ddof=1).fillna(0.0) if len(df) > 1 else 0.0,
        "min": body.min(),
        "max": body.max(),
    })
    out.index.name = "variable"
    return out


def type_shares(panel) -> pd.DataFrame:
    """Percentage of N- and P-type rows per year."""
    df = panel.frame if isinstance(panel, PanelDataset) else panel
    if len(df) == 0:
        raise ValueError("cannot summarize an empty panel")
    share = df.groupby("year")["p_type"].mean()
    out = pd.DataFrame({"N_pct": 100.0 * (1 - share), "P_pct": 100.0 * share})
    out.loc["all"] = [100.0 * (1 - df["p_type"].mean()), 100.0 * df["p_type"].mean()]
    return out


# -- CSV ------------------------------------------------------------------------------

def validate_frame(frame: pd.DataFrame) -> pd.DataFrame:
    """Check the CSV schema and coerce dtypes.

    The leading columns must match :data:`CSV_COLUMNS` exactly; extra
    trailing columns (such as a legal-status flag) are kept. Workers of zero
    are accepted here and rejected when a design is built.
    """
    head = list(frame.columns[:len(CSV_COLUMNS)])
    for i, expected in enumerate(CSV_COLUMNS):
        got = head[i] if i < len(head) else None
        if got != expected:
            where = f"found {got!r}" if got is not None else "header too short"
            raise SchemaError(f"column {i + 1}: expected {expected!r}, {where}")
    out = frame.copy()
    for col in CSV_COLUMNS:
        values = pd.to_numeric(out[col], errors="coerce")
        bad = values.isna() & out[col].notna()
        if bad.any():
            row = int(np.flatnonzero(bad.to_numpy())[0])
            raise SchemaError(f"column {col!r}, row {row + 1}: non-numeric value {out[col].iloc[row]!r}")
        if col in _INT_COLUMNS:
            if values.isna().any():
                row = int(np.flatnonzero(values.isna().to_numpy())[0])
                raise SchemaError(f"column {col!r}, row {row + 1}: missing value")
            if (values != np.round(values)).any():
                row = int(np.flatnonzero((values != np.round(values)).to_numpy())[0])
                raise SchemaError(f"column {col!r}, row {row + 1}: expected an integer")
            values = values.astype(np.int64)
        else:
            values = values.astype(float)
        out[col] = values
    return out


def write_csv(panel, path) -> None:
    """Write with shortest round-trip float formatting."""
    df = panel.frame if isinstance(panel, PanelDataset) else panel
    df.to_csv(path, index=False, lineterminator="\n")


def read_csv(path) -> PanelDataset:
    frame = pd.read_csv(path, float_precision="round_trip")
    return PanelDataset(validate_frame(frame))
