"""Sign-restriction identification of the informational scenario.

Three coefficients discriminate between the scenarios:

============  =====  =====  =====
coefficient    NS     SC     SwC
============  =====  =====  =====
``ns``         > 0    = 0    = 0
``swc_lambda`` = 0    = 0    > 0
``swc_g``      = 0    = 0    > 0
============  =====  =====  =====

"> 0" is a one-sided test at level ``alpha``; "= 0" means the two-sided
test at level ``alpha`` fails to reject. Critical values are normal.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
import pandas as pd
from scipy import stats

from .errors import MissingCoefficientError, SchemaError
from .panelgen import COEF_LABELS

__all__ = [
    "CoefficientSet",
    "Restriction",
    "BriberyFlags",
    "ScenarioVerdict",
    "classify_scenario",
    "detect_bribery",
    "load_coefficients",
    "canonical_name",
    "PATTERNS",
    "REFERENCE_EFFECTS",
    "PUBLISHED_BASELINE",
]

PATTERNS = {
    "NS": {"ns": ">0", "swc_lambda": "=0", "swc_g": "=0"},
    "SC": {"ns": "=0", "swc_lambda": "=0", "swc_g": "=0"},
    "SwC": {"ns": "=0", "swc_lambda": ">0", "swc_g": ">0"},
}

# effect sizes an SC verdict should be able to rule out (generator truths)
REFERENCE_EFFECTS = {"ns": 1.0, "swc_lambda": 0.039, "swc_g": 8.93}

# published baseline estimates (estimate, standard error)
PUBLISHED_BASELINE = {
    "beta_pi_n": (5.029, 2.238),
    "ns": (-0.007, 0.098),
    "swc_lambda": (0.039, 0.007),
    "beta_m": (-0.022, 0.046),
    "beta_fl": (-0.002, 0.005),
    "beta_tmin": (1.729, 3.268),
    "neg_sn_1b": (-5.595, 21.625),
    "neg_sp": (-8.804, 4.116),
    "swc_g": (8.929, 4.143),
    "beta_ap": (27.626, 13.120),
    "beta_apd": (14.693, 9.133),
    "intercept": (35.930, 7.971),
}


@dataclass
class CoefficientSet:
    """Estimates and standard errors keyed by coefficient name."""

    coef: dict[str, float]
    se: dict[str, float]

    @classmethod
    def from_pairs(cls, pairs: Mapping[str, tuple[float, float]]) -> "CoefficientSet":
        return cls({k: float(v[0]) for k, v in pairs.items()},
                   {k: float(v[1]) for k, v in pairs.items()})


def _lookup(fit, key: str) -> tuple[float, float]:
    try:
        b, s = fit.coef[key], fit.se[key]
    except KeyError:
        raise MissingCoefficientError(f"fit has no coefficient {key!r}") from None
    if not (np.isfinite(b) and np.isfinite(s)) or s < 0:
        raise MissingCoefficientError(f"coefficient {key!r} is not identified in this fit")
    return float(b), float(s)


@dataclass(frozen=True)
class Restriction:
    name: str
    required: str
    estimate: float
    se: float
    t: float
    critical: float
    met: bool

    @property
    def label(self) -> str:
        return COEF_LABELS.get(self.name, self.name)


def _test(fit, key: str, required: str, alpha: float) -> Restriction:
    b, s = _lookup(fit, key)
    t = b / s if s > 0 else (np.inf * np.sign(b) if b else 0.0)
    if required == ">0":
        crit = float(stats.norm.isf(alpha))
        met = t > crit
    elif required == "<0":
        crit = float(-stats.norm.isf(alpha))
        met = t < crit
    elif required == "=0":
        crit = float(stats.norm.isf(alpha / 2))
        met = abs(t) <= crit
    else:
        raise ValueError(f"unknown requirement {required!r}")
    return Restriction(key, required, b, s, float(t), crit, bool(met))


def _check_alpha(alpha: float) -> None:
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must be in (0,1), got {alpha}")


@dataclass
class BriberyFlags:
    extortionary_present: bool
    non_extortionary_present: bool
    restrictions: list[Restriction]
    n_type_caveat: str | None = None


def detect_bribery(fit, alpha: float = 0.05) -> BriberyFlags:
    """Which bribery types the estimates support.

    Extortionary bribery needs a significantly negative coefficient on the
    P-type delay; non-extortionary bribery needs both contest coefficients
    significantly positive.
    """
    _check_alpha(alpha)
    sp = _test(fit, "neg_sp", "<0", alpha)
    lam = _test(fit, "swc_lambda", ">0", alpha)
    g = _test(fit, "swc_g", ">0", alpha)
    sn = _test(fit, "neg_sn_1b", "=0", alpha)
    caveat = None
    if sn.met:
        caveat = ("N-type delay coefficient is not significant: a zero bribing "
                  "indicator and a zero N-type cost of time cannot be told apart")
    return BriberyFlags(sp.met, lam.met and g.met, [sp, lam, g, sn], caveat)


@dataclass
class ScenarioVerdict:
    verdict: str
    restrictions: dict[str, list[Restriction]]
    flags: BriberyFlags
    alpha: float
    mde: dict[str, float] = field(default_factory=dict)
    underpowered: bool = False
    warnings: list[str] = field(default_factory=list)

    @property
    def matched(self) -> list[str]:
        return [s for s, rs in self.restrictions.items() if all(r.met for r in rs)]

    def table(self) -> str:
        lines = [f"verdict: {self.verdict}  (alpha = {self.alpha:g}; normal critical values)"]
        lines.append(f"{'scenario':<9}{'coefficient':<14}{'required':>9}{'estimate':>14}"
                     f"{'se':>14}{'t':>10}{'critical':>10}  met")
        for scen, rs in self.restrictions.items():
            for r in rs:
                lines.append(f"{scen:<9}{r.label:<14}{r.required:>9}{r.estimate:>14.6g}"
                             f"{r.se:>14.6g}{r.t:>10.4g}{r.critical:>10.4g}  {'yes' if r.met else 'no'}")
        f = self.flags
        lines.append(f"extortionary bribery present: {'yes' if f.extortionary_present else 'no'}")
        lines.append(f"non-extortionary bribery present: {'yes' if f.non_extortionary_present else 'no'}")
        if f.n_type_caveat:
            lines.append(f"note: {f.n_type_caveat}")
        if self.mde:
            lines.append("minimum detectable effects (80% power): "
                         + ", ".join(f"{COEF_LABELS.get(k, k)}={v:.6g}" for k, v in self.mde.items()))
        for w in self.warnings:
            lines.append(f"warning: {w}")
        return "\n".join(lines)

    def __str__(self) -> str:
        return self.table()


def classify_scenario(fit, alpha: float = 0.05,
                      reference: Mapping[str, float] | None = None) -> ScenarioVerdict:
    """Match the three discriminating coefficients to a scenario pattern.

    Returns ``inconclusive`` when no pattern matches. A coefficient whose
    t-statistic lies between the one-sided and two-sided critical values
    counts both as "> 0" and "= 0"; if that makes two patterns match, the
    verdict is also ``inconclusive`` and a warning names the overlap.

    An SC verdict carries the minimum detectable effect at 80% power of
    each two-sided test, and is flagged underpowered if any exceeds the
    reference effect size.
    """
    _check_alpha(alpha)
    reference = dict(REFERENCE_EFFECTS if reference is None else reference)
    restrictions = {scen: [_test(fit, k, req, alpha) for k, req in pat.items()]
                    for scen, pat in PATTERNS.items()}
    matched = [s for s, rs in restrictions.items() if all(r.met for r in rs)]
    warnings = []
    if len(matched) == 1:
        verdict = matched[0]
    else:
        verdict = "inconclusive"
        if matched:
            warnings.append("patterns " + " and ".join(matched)
                            + " both match (a t-statistic lies between the one- and two-sided critical values)")
    out = ScenarioVerdict(verdict, restrictions, detect_bribery(fit, alpha), alpha, warnings=warnings)
    if verdict == "SC":
        z = stats.norm.isf(alpha / 2) + stats.norm.ppf(0.8)
        out.mde = {r.name: float(z * r.se) for r in restrictions["SC"]}
        short = [COEF_LABELS.get(k, k) for k, m in out.mde.items()
                 if k in reference and m > abs(reference[k])]
        if short:
            out.underpowered = True
            out.warnings.append("SC rests on non-rejections, but the test cannot detect the "
                                "reference effect for " + ", ".join(short))
    return out


# -- coefficient files -------------------------------------------------------------------

def _norm(name: str) -> str:
    s = str(name).strip().lower().replace("−", "-").replace("λ", "lambda").replace("π", "pi").replace("β", "beta")
    return re.sub(r"[\s_·*()]", "", s)


_ALIASES = {
    "lambda": "swc_lambda", "swclambda": "swc_lambda",
    "g": "swc_g", "swcg": "swc_g",
    "-sp": "neg_sp",
    "-sn1b": "neg_sn_1b", "-sn": "neg_sn_1b",
    "1ns": "ns", "ns": "ns",
    "const": "intercept", "cons": "intercept",
}


def canonical_name(name: str) -> str:
    """Map a label or alias (e.g. ``"1_SwC·λ"``, ``"-s_P"``) to its key."""
    n = _norm(name)
    for key, label in COEF_LABELS.items():
        if n in (_norm(key), _norm(label)):
            return key
    if n in _ALIASES:
        return _ALIASES[n]
    m = re.fullmatch(r"beta(\d{4})", n)
    if m:
        return f"beta_{m.group(1)}"
    return str(name).strip()


def load_coefficients(path) -> CoefficientSet:
    """Read a ``name,estimate,se`` CSV (a ``t`` column is ignored).

    Accepts the output of the ``estimate`` command or a hand-written table
    using display labels such as ``1_SwC·λ``.
    """
    df = pd.read_csv(path, float_precision="round_trip")
    cols = {c.strip().lower(): c for c in df.columns}
    missing = [c for c in ("name", "estimate", "se") if c not in cols]
    if missing:
        raise SchemaError(f"coefficient file needs columns name, estimate, se; missing {', '.join(missing)}")
    coef, se = {}, {}
    for i, rec in enumerate(df.to_dict("records")):
        key = canonical_name(rec[cols["name"]])
        try:
            b, s = float(rec[cols["estimate"]]), float(rec[cols["se"]])
        except (TypeError, ValueError):
            raise SchemaError(f"row {i + 1}: estimate and se must be numeric") from None
        if key in coef:
            raise SchemaError(f"row {i + 1}: duplicate coefficient {key!r}")
        coef[key], se[key] = b, s
    return CoefficientSet(coef, se)
