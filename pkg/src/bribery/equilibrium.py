"""Closed-form equilibria of the two-period bribery model.

A firm of type N (non-positive profit) or P (positive profit) may enter a
bribe contest for a contract in period 1 and must obtain a certificate from a
second bureaucrat (B2) in period 2. B2 chooses a processing time and fee per
information set. Three informational scenarios are solved here:

NS
    B2 observes the firm's type and its period-1 action.
SC
    B2 does not observe the type but is told whether the firm entered.
SwC
    B2 observes neither.

All functions are pure. Money is in one arbitrary unit, time in days.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .errors import DegenerateThresholdError, InvalidParametersError

__all__ = [
    "Scenario",
    "ModelParams",
    "MenuOffer",
    "EquilibriumOutcome",
    "Violation",
    "validate_params",
    "solve_scenario",
    "solve_swc_uncertain",
    "entry_threshold",
    "firm_payoff",
    "bureaucrat_objective",
    "n_type_time",
    "p_type_time",
    "outcome_record",
]


class Scenario(str, Enum):
    NS = "NS"
    SC = "SC"
    SwC = "SwC"

    @classmethod
    def parse(cls, value) -> "Scenario":
        if isinstance(value, cls):
            return value
        for member in cls:
            if member.value.lower() == str(value).strip().lower():
                return member
        raise ValueError(f"unknown scenario {value!r}; expected one of NS, SC, SwC")

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class ModelParams:
    """Structural parameters of the model.

    ``lambda_``, ``pi_P0`` and ``pi_P1`` are derived, not free: the contest
    bribe ``kappa * V`` is re-expressed as a share of the winning firm's profit.
    """

    pi_N: float
    delta_pi0: float
    M: float
    F_L: float
    t_min: float
    s_N: float
    s_P: float
    c: float
    W: float = 0.0
    theta: float = 0.5
    V: float = 0.0
    kappa: float = 0.0
    g: float = 0.0
    n_days: float = 0.0
    mu: float = 1.0

    def __post_init__(self):
        for name in self.__dataclass_fields__:
            object.__setattr__(self, name, float(getattr(self, name)))

    @property
    def pi_P0(self) -> float:
        return self.pi_N + self.delta_pi0

    @property
    def pi_P1(self) -> float:
        return self.pi_P0 + (1.0 - self.kappa) * self.V

    @property
    def lambda_(self) -> float:
        return self.kappa * self.V / self.pi_P1

    @property
    def headroom(self) -> float:
        """N-type surplus over its outside option at the legal fee."""
        return self.pi_N - self.M - self.F_L

    def scaled(self, k: float) -> "ModelParams":
        """Multiply every money-dimensioned parameter by ``k``."""
        money = ("pi_N", "delta_pi0", "M", "F_L", "V", "c", "s_N", "s_P", "g", "W")
        return replace(self, **{name: getattr(self, name) * k for name in money})


@dataclass(frozen=True)
class MenuOffer:
    t: float
    F: float


@dataclass(frozen=True)
class EquilibriumOutcome:
    scenario: Scenario
    phi: int
    menu_N: MenuOffer
    menu_P0: MenuOffer
    menu_P1: MenuOffer
    eb_N: float
    eb_P: float
    m_N: float
    m_P: float
    nbc_P: float
    bribe_N: float
    bribe_P: float
    won_contest: int
    mu_star: float | None = field(default=None)

    @property
    def menus(self) -> dict[str, MenuOffer]:
        return {"N": self.menu_N, "P0": self.menu_P0, "P1": self.menu_P1}


@dataclass(frozen=True)
class Violation:
    name: str
    slack: float
    message: str

    def __str__(self) -> str:
        return f"{self.name} (slack {self.slack:.6g}): {self.message}"


def validate_params(p: ModelParams) -> list[Violation]:
    """Return every violated model assumption; an empty list means valid.

    Slack is signed so that a violation always has ``slack <= 0`` (or is
    undefined, reported as ``nan``).
    """
    out: list[Violation] = []

    def need(name, slack, message, strict=True):
        bad = not (slack > 0 if strict else slack >= 0)
        if bad or math.isnan(slack):
            out.append(Violation(name, slack, message))

    h = p.headroom
    need("pi_N - M - F_L > 0", h, "N-type processing time must be positive")
    need("s_N > 0", p.s_N, "N-type cost of time must be positive")
    need("s_P > s_N", p.s_P - p.s_N, "P-type cost of time must exceed N-type's")
    need("c > 0", p.c, "processing-cost scale must be positive")
    if p.c > 0 and h > 0:
        need("s_N < (Π_N−M−F_L)²/c", h * h / p.c - p.s_N,
             "N-type cost of time too large for the screening ordering")
    need("delta_pi0 > 0", p.delta_pi0, "profit increment must be positive")
    need("V > 0", p.V, "contract payoff must be positive")
    need("theta in [0,1]", min(p.theta, 1.0 - p.theta), "probability out of range", strict=False)
    need("kappa in [0,1]", min(p.kappa, 1.0 - p.kappa), "bribe share out of range", strict=False)
    need("mu in (0,1]", p.mu, "win probability out of range")
    if p.mu > 1:
        out.append(Violation("mu in (0,1]", 1.0 - p.mu, "win probability out of range"))
    need("t_min >= 0", p.t_min, "legal processing time must be non-negative", strict=False)
    need("g >= 0", p.g, "contest cost must be non-negative", strict=False)
    need("n_days >= 0", p.n_days, "contest length must be non-negative", strict=False)
    if p.c > 0 and p.s_P > 0:
        need("sqrt(c/s_P) >= t_min", math.sqrt(p.c / p.s_P) - p.t_min,
             "P-type processing time below the legal minimum (negative delay)", strict=False)
    if p.s_N > 0:
        rent = p.delta_pi0 - (p.s_P / p.s_N - 1.0) * h
        need("U_P(Γ=0) >= M at the screening menu", rent,
             "P-type firm without contract would reject its screening offer", strict=False)
    return out


def _require_valid(p: ModelParams) -> None:
    violations = validate_params(p)
    if violations:
        raise InvalidParametersError(violations)


def n_type_time(headroom, s_N):
    """Processing time offered to the N-type firm (binding participation)."""
    return np.divide(headroom, s_N) if isinstance(headroom, np.ndarray) else headroom / s_N


def p_type_time(c, s_P):
    """Processing time offered to the P-type firm, the unconstrained optimum."""
    return np.sqrt(np.divide(c, s_P)) if isinstance(c, np.ndarray) else math.sqrt(c / s_P)


def _screening_fee(p: ModelParams, t_N: float, t_P: float) -> float:
    # binding IC of the P-type firm against the N-type offer
    return p.s_P * (t_N - t_P) + p.F_L


def _build(p, scenario, phi, menu_N, menu_P0, menu_P1, eb_P, m_P, nbc_P, bribe_P, won,
           mu_star=None) -> EquilibriumOutcome:
    return EquilibriumOutcome(
        scenario=scenario,
        phi=phi,
        menu_N=menu_N,
        menu_P0=menu_P0,
        menu_P1=menu_P1,
        eb_N=menu_N.F - p.F_L,
        eb_P=eb_P,
        m_N=menu_N.t - p.t_min,
        m_P=m_P,
        nbc_P=nbc_P,
        bribe_N=0.0,
        bribe_P=bribe_P,
        won_contest=won,
        mu_star=mu_star,
    )


def _solve_ns(p: ModelParams) -> EquilibriumOutcome:
    t_N = n_type_time(p.headroom, p.s_N)
    t_P = p_type_time(p.c, p.s_P)
    menu_N = MenuOffer(t_N, p.F_L)
    menu_P0 = MenuOffer(t_P, p.pi_P0 - p.M - p.s_P * t_P)
    menu_P1 = MenuOffer(t_P, p.pi_P1 - p.M - p.s_P * t_P)
    m_P = t_P - p.t_min
    bribe_P = p.pi_N + p.delta_pi0 - p.M - p.F_L - p.s_P * p.t_min - p.s_P * m_P
    return _build(p, Scenario.NS, 1, menu_N, menu_P0, menu_P1,
                  eb_P=menu_P0.F - p.F_L, m_P=m_P, nbc_P=0.0, bribe_P=bribe_P, won=0)


def _screening_part(p: ModelParams):
    t_N = n_type_time(p.headroom, p.s_N)
    t_P = p_type_time(p.c, p.s_P)
    menu_N = MenuOffer(t_N, p.F_L)
    pooled = MenuOffer(t_P, _screening_fee(p, t_N, t_P))
    m_P = t_P - p.t_min
    eb = (p.s_P / p.s_N) * p.headroom - p.s_P * p.t_min - p.s_P * m_P
    return menu_N, pooled, m_P, eb


def _solve_sc(p: ModelParams) -> EquilibriumOutcome:
    menu_N, menu_P0, m_P, eb = _screening_part(p)
    # {I3} is a singleton set: full extraction as in NS
    t_P = menu_P0.t
    menu_P1 = MenuOffer(t_P, p.pi_P1 - p.M - p.s_P * t_P)
    return _build(p, Scenario.SC, 1, menu_N, menu_P0, menu_P1,
                  eb_P=menu_P0.F - p.F_L, m_P=m_P, nbc_P=0.0, bribe_P=eb, won=0)


def _swc_entered(p: ModelParams, won: int, mu_star=None) -> EquilibriumOutcome:
    menu_N, pooled, m_P, eb = _screening_part(p)
    nbc = p.g * p.n_days + won * (p.lambda_ * p.pi_P1)
    return _build(p, Scenario.SwC, 0, menu_N, pooled, pooled,
                  eb_P=pooled.F - p.F_L, m_P=m_P, nbc_P=nbc, bribe_P=eb + nbc, won=won,
                  mu_star=mu_star)


def solve_scenario(p: ModelParams, scenario) -> EquilibriumOutcome:
    """Equilibrium menus, entry choice, bribes and delays for one scenario.

    The SwC solution assumes the contest is won with certainty (``mu = 1``);
    see :func:`solve_swc_uncertain` for the general case.

    Raises
    ------
    InvalidParametersError
        If :func:`validate_params` reports any violation.
    """
    scenario = Scenario.parse(scenario)
    _require_valid(p)
    if scenario is Scenario.NS:
        return _solve_ns(p)
    if scenario is Scenario.SC:
        return _solve_sc(p)
    return _swc_entered(p, won=1)


def entry_threshold(p: ModelParams) -> float:
    """Smallest win probability above which the P-type firm enters the contest."""
    denom = (1.0 - p.kappa) * p.V - p.lambda_ * p.pi_P1
    if denom <= 0:
        raise DegenerateThresholdError(
            f"entry never profitable: (1-kappa)V - lambda*Pi_P(1) = {denom:.6g} <= 0"
        )
    return p.g * p.n_days / denom


def solve_swc_uncertain(p: ModelParams, won: bool = True) -> EquilibriumOutcome:
    """SwC equilibrium when the contest is won only with probability ``p.mu``.

    ``won`` is the realised contest outcome; it only matters when the firm
    enters. Below the threshold the firm stays out and the outcome coincides
    with the SC outcome (``scenario`` still reads SwC).
    """
    _require_valid(p)
    mu_star = entry_threshold(p)
    if p.mu > mu_star:
        return _swc_entered(p, won=int(bool(won)), mu_star=mu_star)
    return replace(_solve_sc(p), scenario=Scenario.SwC, mu_star=mu_star)


def firm_payoff(p: ModelParams, firm_type: str, offer: MenuOffer, contract: bool = False,
                entered: bool = False, two_period: bool = False) -> float:
    """Net payoff of accepting ``offer``: profit minus fee minus cost of waiting.

    The contest cost ``g * n_days`` is sunk by period 2 and is only subtracted
    when ``two_period`` is set and the firm ``entered``. ``contract`` is
    ignored for the N-type firm, which cannot enter the contest.
    """
    firm_type = firm_type.upper()
    if firm_type == "N":
        profit, s = p.pi_N, p.s_N
    elif firm_type == "P":
        profit, s = (p.pi_P1 if contract else p.pi_P0), p.s_P
    else:
        raise ValueError(f"firm_type must be 'N' or 'P', got {firm_type!r}")
    value = profit - offer.F - s * offer.t
    if two_period and entered:
        value -= p.g * p.n_days
    return value


def bureaucrat_objective(p: ModelParams, scenario, menus, phi: float) -> float:
    """B2's expected utility from a menu in the given scenario.

    ``menus`` maps ``"N"``, ``"P0"`` and (except for SC) ``"P1"`` to offers.
    For SC only the pooled information set {I1, I2} is optimised, so the
    weights are conditional on not entering.
    """
    scenario = Scenario.parse(scenario)
    th = p.theta
    tN = menus["N"].t
    p0 = menus["P0"]
    gain0 = p0.F - p.F_L - p.c / p0.t
    if scenario is Scenario.SC:
        denom = th + (1.0 - th) * phi
        if denom <= 0:
            raise ValueError("information set {I1, I2} has zero probability")
        return p.W - th / denom * p.c / tN + (1.0 - th) * phi / denom * gain0
    p1 = menus["P1"]
    gain1 = p1.F - p.F_L - p.c / p1.t
    return (p.W - th * p.c / tN + (1.0 - th) * phi * gain0
            + (1.0 - th) * (1.0 - phi) * gain1)


def outcome_record(out: EquilibriumOutcome) -> dict[str, object]:
    """Flat key-value view of an outcome, in a stable key order."""
    rec: dict[str, object] = {"scenario": str(out.scenario), "phi": out.phi}
    for key, menu in out.menus.items():
        rec[f"t_{key}"] = menu.t
        rec[f"F_{key}"] = menu.F
    for key in ("eb_N", "eb_P", "m_N", "m_P", "nbc_P", "bribe_N", "bribe_P", "won_contest"):
        rec[key] = getattr(out, key)
    if out.mu_star is not None:
        rec["mu_star"] = out.mu_star
    return rec
