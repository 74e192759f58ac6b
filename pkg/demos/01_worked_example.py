"""Closed-form equilibria on a small hand-checkable parameter set.

Run with ``python demos/01_worked_example.py``.
"""

from bribery import (
    ModelParams, bureaucrat_objective, entry_threshold, firm_payoff, solve_scenario,
    solve_swc_uncertain,
)
from dataclasses import replace

p = ModelParams(pi_N=100, delta_pi0=300, M=20, F_L=10, s_N=1, s_P=4, c=100,
                t_min=2, W=0, theta=0.5, V=200, kappa=0.25, g=2, n_days=10, mu=1)

print(f"derived: pi_P0={p.pi_P0:g}  pi_P1={p.pi_P1:g}  lambda={p.lambda_:.6g}")

# Without secrecy the bureaucrat sees the firm's type and extracts everything
# above the outside option. Under screening, the N-type offer is slowed down
# until the P-type no longer wants to mimic it.
for scenario in ("NS", "SC", "SwC"):
    out = solve_scenario(p, scenario)
    print(f"\n{scenario}: t_N={out.menu_N.t:g} t_P={out.menu_P0.t:g} "
          f"F_P0={out.menu_P0.F:g} F_P1={out.menu_P1.F:g}")
    print(f"   bribe_P={out.bribe_P:g} (extortionary {out.eb_P:g} + contest {out.nbc_P:g}), "
          f"enters contest: {out.phi == 0}")
    print(f"   objective={bureaucrat_objective(p, scenario, out.menus, out.phi):.6g}")

sc = solve_scenario(p, "SC")
print(f"\nSC payoffs: P-type {firm_payoff(p, 'P', sc.menu_P0):g}, "
      f"N-type {firm_payoff(p, 'N', sc.menu_N):g} (outside option M={p.M:g})")

# When the contest is won only with probability mu, the firm enters only if
# mu clears a threshold.
print(f"\nentry threshold mu* = {entry_threshold(p):g}")
for mu, won in ((1.0, True), (1.0, False), (0.1, True)):
    out = solve_swc_uncertain(replace(p, mu=mu), won=won)
    print(f"  mu={mu:g} won={won}: enters={out.phi == 0} bribe_P={out.bribe_P:g}")
