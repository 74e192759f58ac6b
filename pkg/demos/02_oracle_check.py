"""Checking the closed forms against exhaustive grid search.

The grid search knows only the constraint list of each scenario, so
agreement between the two is independent evidence for the closed forms.
"""

import numpy as np

from bribery import (
    GridSpec, MenuOffer, ModelParams, bracketing_grid, brute_force_menu, check_constraints,
    solve_scenario,
)
from bribery.oracle import draw_valid_params

p = ModelParams(pi_N=100, delta_pi0=300, M=20, F_L=10, s_N=1, s_P=4, c=100,
                t_min=2, W=0, theta=0.5, V=200, kappa=0.25, g=2, n_days=10, mu=1)

# A grid with time step 0.5 and fee step 1 contains the exact optimum.
grid = GridSpec(t_lo=2, t_hi=100, F_lo=10, F_hi=600, steps_t=197, steps_F=591)
for scenario in ("NS", "SC", "SwC"):
    res = brute_force_menu(p, scenario, grid)
    closed = solve_scenario(p, scenario)
    print(f"{scenario}: grid {res.menus}  within one cell: {res.within_one_cell(closed.menus)}")

print("\nconstraint slack at the SC solution")
print(check_constraints(p, "SC", solve_scenario(p, "SC").menus).table())

# Raising the P-type fee by one unit breaks its incentive constraint.
menus = dict(solve_scenario(p, "SC").menus)
menus["P0"] = MenuOffer(5.0, 271.0)
print("\nwith F_P = 271")
print(check_constraints(p, "SC", menus).table())

# Random parameter sets, each on a grid bracketing its own optimum.
rng = np.random.default_rng(0)
agree = 0
for _ in range(20):
    q = draw_valid_params(rng)
    for scenario in ("NS", "SC", "SwC"):
        res = brute_force_menu(q, scenario, bracketing_grid(q, scenario))
        agree += res.within_one_cell(solve_scenario(q, scenario).menus)
print(f"\n{agree}/60 random (draw, scenario) pairs agree to within one grid cell")
