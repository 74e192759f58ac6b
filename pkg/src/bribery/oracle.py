"""Brute-force verification of the screening solutions.

The search enumerates every menu on a (processing time, fee) grid and keeps
those satisfying the literal IR/IC constraint list of the scenario's
problem. Nothing here calls the closed forms except :func:`bracketing_grid`,
which only uses them to place the grid bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .equilibrium import MenuOffer, ModelParams, Scenario, p_type_time, n_type_time
from .errors import EmptyFeasibleSetError

__all__ = [
    "GridSpec",
    "BruteForceResult",
    "ConstraintCheck",
    "ConstraintReport",
    "brute_force_menu",
    "check_constraints",
    "bracketing_grid",
    "draw_valid_params",
    "DEFAULT_PHI",
]

# At phi=0 (SwC) or phi=1 (NS) one P-type offer carries zero weight and is not
# pinned down by the objective; an interior phi keeps every offer determined.
DEFAULT_PHI = {Scenario.NS: 0.5, Scenario.SC: 1.0, Scenario.SwC: 0.5}

REL_TOL = 1e-9


@dataclass(frozen=True)
class GridSpec:
    t_lo: float
    t_hi: float
    F_lo: float
    F_hi: float
    steps_t: int
    steps_F: int

    def __post_init__(self):
        if self.steps_t < 2 or self.steps_F < 2:
            raise ValueError("grid needs at least 2 steps per axis")
        if not 0 < self.t_lo < self.t_hi:
            raise ValueError("need 0 < t_lo < t_hi (the cost c/t is undefined at t=0)")
        if not self.F_lo < self.F_hi:
            raise ValueError("need F_lo < F_hi")

    @property
    def dt(self) -> float:
        return (self.t_hi - self.t_lo) / (self.steps_t - 1)

    @property
    def dF(self) -> float:
        return (self.F_hi - self.F_lo) / (self.steps_F - 1)

    def t_nodes(self) -> np.ndarray:
        return self.t_lo + self.dt * np.arange(self.steps_t)

    def F_nodes(self) -> np.ndarray:
        return self.F_lo + self.dF * np.arange(self.steps_F)

    def refined(self) -> "GridSpec":
        """Grid with halved spacing that contains every node of this one."""
        return GridSpec(self.t_lo, self.t_hi, self.F_lo, self.F_hi,
                        2 * self.steps_t - 1, 2 * self.steps_F - 1)

    def check(self, p: ModelParams) -> None:
        if self.t_lo < p.t_min:
            raise ValueError(f"t_lo={self.t_lo} below legal minimum t_min={p.t_min}")
        if self.F_lo < p.F_L:
            raise ValueError(f"F_lo={self.F_lo} below legal fee F_L={p.F_L}")


@dataclass
class BruteForceResult:
    scenario: Scenario
    phi: float
    menus: dict[str, MenuOffer]
    objective: float
    grid: GridSpec
    cell_tolerance: dict[str, float]
    lipschitz_bound: float

    def argmax_gap(self, menus: dict[str, MenuOffer]) -> dict[str, float]:
        """Absolute per-coordinate distance from the grid argmax to ``menus``."""
        gap = {}
        for key, mine in self.menus.items():
            gap[f"t_{key}"] = abs(mine.t - menus[key].t)
            if key != "N":
                gap[f"F_{key}"] = abs(mine.F - menus[key].F)
        return gap

    def within_one_cell(self, menus: dict[str, MenuOffer]) -> bool:
        gap = self.argmax_gap(menus)
        slack = 1e-9 * max(1.0, self.grid.t_hi, abs(self.grid.F_hi))
        return all(g <= self.cell_tolerance[k[0]] + slack for k, g in gap.items())


def _scale(p: ModelParams) -> float:
    return max(1.0, abs(p.pi_P1), abs(p.M), abs(p.F_L), abs(p.pi_N))


def _ge(lhs, rhs, tol):
    return lhs - rhs >= -tol


def brute_force_menu(p: ModelParams, scenario, grid: GridSpec,
                     phi: float | None = None) -> BruteForceResult:
    """Exhaustive constrained grid search over menus.

    The N-type offer always carries the legal fee; its processing time ranges
    over the time nodes. P-type offers range over all (time, fee) nodes.

    Ties are broken toward the lexicographically smallest menu.

    Raises
    ------
    EmptyFeasibleSetError
        If no grid menu satisfies every constraint.
    """
    scenario = Scenario.parse(scenario)
    grid.check(p)
    if phi is None:
        phi = DEFAULT_PHI[scenario]
    tol = REL_TOL * _scale(p)

    t = grid.t_nodes()
    T, F = np.meshgrid(t, grid.F_nodes(), indexing="ij")
    T, F = T.ravel(), F.ravel()
    gain = F - p.F_L - p.c / T
    ir_n = _ge(p.pi_N - p.s_N * t - p.F_L, p.M, tol)
    if not ir_n.any():
        raise EmptyFeasibleSetError("no time node satisfies IR_N")
    n_idx = np.flatnonzero(ir_n)

    if scenario is Scenario.NS:
        best = _solve_ns_grid(p, phi, t, T, F, gain, n_idx, tol)
    elif scenario is Scenario.SC:
        best = _solve_sc_grid(p, phi, t, T, F, gain, n_idx, tol)
    else:
        best = _solve_swc_grid(p, phi, t, T, F, gain, n_idx, tol)

    dt, dF = grid.dt, grid.dF
    # a fee on a binding constraint moves by s_P per unit of time, so one time
    # cell displaces the optimal fee by s_P*dt on top of the fee cell itself
    tol_cell = {"t": dt, "F": dF + p.s_P * dt}
    n_t = 2 if scenario is Scenario.SC else 3
    n_F = 1 if scenario is Scenario.SC else 2
    lip = n_t * (p.c / grid.t_lo ** 2) * dt + n_F * tol_cell["F"]
    return BruteForceResult(scenario, phi, best[1], best[0], grid, tol_cell, lip)


def _solve_ns_grid(p, phi, t, T, F, gain, n_idx, tol):
    th = p.theta
    i_n = n_idx[np.argmax(-p.c / t[n_idx])]
    menus = {"N": MenuOffer(float(t[i_n]), p.F_L)}
    value = p.W - th * p.c / t[i_n]
    for key, profit, weight in (("P0", p.pi_P0, (1 - th) * phi),
                                ("P1", p.pi_P1, (1 - th) * (1 - phi))):
        ok = _ge(profit - p.s_P * T - F, p.M, tol)
        if not ok.any():
            raise EmptyFeasibleSetError(f"no grid offer satisfies IR_{key}")
        v = np.where(ok, gain, -np.inf)
        j = int(np.argmax(v))
        menus[key] = MenuOffer(float(T[j]), float(F[j]))
        value += weight * v[j]
    return float(value), menus


def _solve_sc_grid(p, phi, t, T, F, gain, n_idx, tol):
    th = p.theta
    denom = th + (1 - th) * phi
    w_n, w_p = th / denom, (1 - th) * phi / denom
    ir_p0 = _ge(p.pi_P0 - p.s_P * T - F, p.M, tol)
    best = (-np.inf, None)
    for i in n_idx:
        tN = t[i]
        ok = (ir_p0
              & _ge(-p.s_N * tN - p.F_L, -p.s_N * T - F, tol)      # IC_N
              & _ge(-p.s_P * T - F, -p.s_P * tN - p.F_L, tol))     # IC_P0
        if not ok.any():
            continue
        v = np.where(ok, gain, -np.inf)
        j = int(np.argmax(v))
        value = p.W - w_n * p.c / tN + w_p * v[j]
        if value > best[0]:
            best = (float(value), {"N": MenuOffer(float(tN), p.F_L),
                                   "P0": MenuOffer(float(T[j]), float(F[j]))})
    if best[1] is None:
        raise EmptyFeasibleSetError("no grid menu satisfies the SC constraints")
    return best


def _solve_swc_grid(p, phi, t, T, F, gain, n_idx, tol):
    th = p.theta
    w0, w1 = (1 - th) * phi, (1 - th) * (1 - phi)
    # IC_P0(P1) and IC_P1(P0) jointly force equal s_P*t + F across the two
    # P offers; group cells by that quantity (within tolerance)
    k = p.s_P * T + F
    order = np.lexsort((F, T, k))
    ks = k[order]
    starts = np.r_[0, np.flatnonzero(np.diff(ks) > tol) + 1]
    group_of = np.repeat(np.arange(starts.size), np.diff(np.r_[starts, ks.size]))
    Ts, Fs, gs = T[order], F[order], gain[order]
    ir0 = _ge(p.pi_P0 - p.s_P * Ts - Fs, p.M, tol)
    ir1 = _ge(p.pi_P1 - p.s_P * Ts - Fs, p.M, tol)

    best = (-np.inf, None, None)
    for i in n_idx:
        tN = t[i]
        ic_n = _ge(-p.s_N * tN - p.F_L, -p.s_N * Ts - Fs, tol)     # IC_N(P,·)
        ic_p = _ge(-p.s_P * Ts - Fs, -p.s_P * tN - p.F_L, tol)     # IC_P,·(N)
        ok0, ok1 = ir0 & ic_n & ic_p, ir1 & ic_n & ic_p
        v0 = np.where(ok0, w0 * gs, -np.inf)
        v1 = np.where(ok1, w1 * gs, -np.inf)
        b0 = np.maximum.reduceat(v0, starts)
        b1 = np.maximum.reduceat(v1, starts)
        tot = b0 + b1
        g = int(np.argmax(tot))
        if not np.isfinite(tot[g]):
            continue
        value = p.W - th * p.c / tN + tot[g]
        if value > best[0]:
            best = (float(value), tN, (g, b0[g], b1[g], v0, v1))
    if best[2] is None:
        raise EmptyFeasibleSetError("no grid menu satisfies the SwC constraints")
    value, tN, (g, m0, m1, v0, v1) = best
    members = np.flatnonzero(group_of == g)
    j0 = members[np.flatnonzero(v0[members] == m0)[0]]
    j1 = members[np.flatnonzero(v1[members] == m1)[0]]
    menus = {"N": MenuOffer(float(tN), p.F_L),
             "P0": MenuOffer(float(Ts[j0]), float(Fs[j0])),
             "P1": MenuOffer(float(Ts[j1]), float(Fs[j1]))}
    return value, menus


@dataclass(frozen=True)
class ConstraintCheck:
    name: str
    slack: float
    status: str


@dataclass
class ConstraintReport:
    scenario: Scenario
    checks: list[ConstraintCheck] = field(default_factory=list)
    reduced: list[ConstraintCheck] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.status != "violated" for c in self.checks + self.reduced)

    def by_name(self) -> dict[str, ConstraintCheck]:
        return {c.name: c for c in self.checks + self.reduced}

    def table(self) -> str:
        rows = [f"{'constraint':<28} {'slack':>14}  status"]
        for c in self.checks:
            rows.append(f"{c.name:<28} {c.slack:>14.6g}  {c.status}")
        if self.reduced:
            rows.append("-- reduced system --")
            for c in self.reduced:
                rows.append(f"{c.name:<28} {c.slack:>14.6g}  {c.status}")
        rows.append(f"overall: {'PASS' if self.ok else 'FAIL'}")
        return "\n".join(rows)


def _status(slack: float, tol: float, equality: bool = False) -> str:
    if abs(slack) <= tol:
        return "binding"
    if equality or slack < 0:
        return "violated"
    return "satisfied"


def check_constraints(p: ModelParams, scenario, menus, tol: float = REL_TOL) -> ConstraintReport:
    """Signed slack (lhs minus rhs) of every IR/IC constraint at ``menus``.

    ``tol`` is relative to the model's money scale. For SC and SwC the
    reduced system used in the optimality argument is reported as well.
    """
    scenario = Scenario.parse(scenario)
    atol = tol * _scale(p)
    N = menus["N"]
    U = {
        "N": lambda m: p.pi_N - p.s_N * m.t - m.F,
        "P0": lambda m: p.pi_P0 - p.s_P * m.t - m.F,
        "P1": lambda m: p.pi_P1 - p.s_P * m.t - m.F,
    }
    legal_N = MenuOffer(N.t, p.F_L)
    raw: list[tuple[str, float]] = [("IR_N", U["N"](legal_N) - p.M),
                                    ("IR_P0", U["P0"](menus["P0"]) - p.M)]
    reduced: list[ConstraintCheck] = []
    if scenario is not Scenario.SC:
        raw.append(("IR_P1", U["P1"](menus["P1"]) - p.M))
    if scenario is Scenario.SC:
        raw += [("IC_N", U["N"](legal_N) - U["N"](menus["P0"])),
                ("IC_P0", U["P0"](menus["P0"]) - U["P0"](legal_N))]
    elif scenario is Scenario.SwC:
        raw += [("IC_N(P0)", U["N"](legal_N) - U["N"](menus["P0"])),
                ("IC_N(P1)", U["N"](legal_N) - U["N"](menus["P1"])),
                ("IC_P0(N)", U["P0"](menus["P0"]) - U["P0"](legal_N)),
                ("IC_P0(P1)", U["P0"](menus["P0"]) - U["P0"](menus["P1"])),
                ("IC_P1(N)", U["P1"](menus["P1"]) - U["P1"](legal_N)),
                ("IC_P1(P0)", U["P1"](menus["P1"]) - U["P1"](menus["P0"]))]
    checks = [ConstraintCheck(n, float(s), _status(s, atol)) for n, s in raw]

    t_tol = tol * max(1.0, N.t)
    if scenario is Scenario.SC:
        slack = dict(raw)
        reduced = [
            ConstraintCheck("IR_N binds", slack["IR_N"],
                            _status(slack["IR_N"], atol, equality=True)),
            ConstraintCheck("IC_P0 binds", slack["IC_P0"],
                            _status(slack["IC_P0"], atol, equality=True)),
            ConstraintCheck("t_N >= t_P0", N.t - menus["P0"].t,
                            _status(N.t - menus["P0"].t, t_tol)),
        ]
    elif scenario is Scenario.SwC:
        p0, p1 = menus["P0"], menus["P1"]
        eq = p.s_P * (p0.t - p1.t) - (p1.F - p0.F)
        reduced = [
            ConstraintCheck("s_P(t_P0-t_P1) = F_P1-F_P0", float(eq),
                            _status(eq, atol, equality=True)),
            ConstraintCheck("t_N >= t_P0", N.t - p0.t, _status(N.t - p0.t, t_tol)),
            ConstraintCheck("t_N >= t_P1", N.t - p1.t, _status(N.t - p1.t, t_tol)),
        ]
    return ConstraintReport(scenario, checks, reduced)


def bracketing_grid(p: ModelParams, scenario, steps_t: int = 200) -> GridSpec:
    """Grid whose bounds bracket the analytic optimum.

    The fee step equals ``s_P * dt`` and the fee axis starts at the legal
    fee, so lines of constant P-type utility pass through grid nodes. This
    keeps fee rounding from flattening the search over processing times.
    """
    scenario = Scenario.parse(scenario)
    t_N = n_type_time(p.headroom, p.s_N)
    t_P = p_type_time(p.c, p.s_P)
    t_lo = p.t_min if p.t_min > 0 else 0.5 * t_P
    t_lo = max(t_lo, 0.5 * t_P)
    t_hi = 1.25 * t_N
    dt = (t_hi - t_lo) / (steps_t - 1)
    dF = p.s_P * dt
    if scenario is Scenario.NS:
        F_top = p.pi_P1 - p.M - p.s_P * t_lo
    else:
        F_top = p.F_L + p.s_P * (t_N - t_lo)
    steps_F = int(math.ceil(1.1 * (F_top - p.F_L) / dF)) + 1
    steps_F = max(steps_F, 2)
    return GridSpec(t_lo, t_hi, p.F_L, p.F_L + (steps_F - 1) * dF, steps_t, steps_F)


def _log_uniform(rng, lo, hi):
    return float(np.exp(rng.uniform(np.log(lo), np.log(hi))))


def draw_valid_params(rng: np.random.Generator, max_ratio: float = 50.0,
                      max_tries: int = 10_000) -> ModelParams:
    """Rejection-sample a valid parameter set with log-uniform money scales.

    Draws with ``t_N / t_P > max_ratio`` are rejected so that a grid of a
    few hundred time nodes still resolves the P-type processing time.
    """
    from .equilibrium import validate_params

    for _ in range(max_tries):
        s_N = _log_uniform(rng, 0.2, 5.0)
        s_P = s_N * _log_uniform(rng, 1.1, 5.0)
        h = _log_uniform(rng, 5.0, 500.0)
        M = _log_uniform(rng, 1.0, 200.0)
        F_L = _log_uniform(rng, 1.0, 100.0)
        c = _log_uniform(rng, 1.0, 1e4)
        rent_floor = (s_P / s_N - 1.0) * h
        p = ModelParams(
            pi_N=h + M + F_L,
            delta_pi0=rent_floor * _log_uniform(rng, 1.0, 10.0),
            M=M, F_L=F_L,
            t_min=float(rng.uniform(0.0, 1.0)) * math.sqrt(c / s_P),
            s_N=s_N, s_P=s_P, c=c,
            W=_log_uniform(rng, 1.0, 100.0),
            theta=float(rng.uniform(0.05, 0.95)),
            V=_log_uniform(rng, 1.0, 1000.0),
            kappa=float(rng.uniform(0.0, 1.0)),
            g=_log_uniform(rng, 0.1, 20.0),
            n_days=float(rng.uniform(1.0, 30.0)),
        )
        if validate_params(p):
            continue
        if (h / s_N) / math.sqrt(c / s_P) > max_ratio:
            continue
        return p
    raise RuntimeError("could not draw a valid parameter set")
