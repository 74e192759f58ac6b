"""Command-line entry point: ``bribery <subcommand> ...``.

Exit status is 0 on success, 1 when a check fails (``oracle-check``), and
2-5 for configuration, file, input-schema and model errors respectively.
The environment variable ``BRIBERY_OUTPUT_DIR`` sets the default directory
for files written without an explicit path.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import load_calibration, load_grid, load_params
from .equilibrium import (
    ModelParams, Scenario, bureaucrat_objective, outcome_record,
    solve_scenario, solve_swc_uncertain,
)
from .errors import BriberyError, ConfigError, SchemaError
from .estimator import RegressionSpec, fit_panel
from .identify import classify_scenario, load_coefficients
from .oracle import bracketing_grid, brute_force_menu, check_constraints, draw_valid_params
from .panelgen import Calibration, generate_panel, read_csv, summarize_panel, write_csv
from .roundtrip import ROUNDTRIP_ALPHA, run_roundtrip

OUTPUT_ENV = "BRIBERY_OUTPUT_DIR"

WORKED_EXAMPLE = ModelParams(pi_N=100, delta_pi0=300, M=20, F_L=10, s_N=1, s_P=4, c=100,
                             t_min=2, W=0, theta=0.5, V=200, kappa=0.25, g=2, n_days=10, mu=1)

_PROVENANCE = {
    "solve": "equilibrium",
    "oracle-check": "oracle",
    "simulate": "panelgen",
    "estimate": "estimator",
    "identify": "identify",
    "roundtrip": "roundtrip",
}


def _g(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{x:.6g}"
    return str(x)


def _output_dir() -> Path:
    return Path(os.environ.get(OUTPUT_ENV) or ".")


def _out_path(given: str | None, default_name: str) -> Path:
    path = Path(given) if given else _output_dir() / default_name
    if not path.parent.exists():
        raise FileNotFoundError(f"output directory does not exist: {path.parent}")
    return path


def _in_path(given: str) -> Path:
    path = Path(given)
    if not path.is_file():
        raise FileNotFoundError(f"input file not found: {path}")
    return path


def _params(args) -> ModelParams:
    return load_params(_in_path(args.params)) if args.params else WORKED_EXAMPLE


def _calibration(args) -> Calibration:
    cal = load_calibration(_in_path(args.config)) if args.config else Calibration()
    if getattr(args, "firms", None) is not None:
        cal = cal.replace(n_firms=args.firms)
    problems = cal.problems()
    if problems:
        raise ConfigError("; ".join(problems))
    return cal


# -- subcommands -------------------------------------------------------------------------

def cmd_solve(args) -> int:
    p = _params(args)
    if args.uncertain:
        out = solve_swc_uncertain(p, won=not args.lost)
    else:
        out = solve_scenario(p, args.scenario)
    rec = outcome_record(out)
    rec["objective"] = bureaucrat_objective(p, out.scenario, out.menus, out.phi)
    width = max(len(k) for k in rec)
    for k, v in rec.items():
        print(f"{k:<{width}}  {_g(v)}")
    return 0


def cmd_oracle_check(args) -> int:
    scenarios = list(Scenario) if args.scenario == "all" else [Scenario.parse(args.scenario)]
    if args.draws:
        rng = np.random.default_rng(args.seed)
        cases = [(f"draw {i}", draw_valid_params(rng)) for i in range(args.draws)]
    else:
        cases = [("params", _params(args))]
    fixed_grid = load_grid(_in_path(args.params)) if args.params and not args.draws else None
    failures = 0
    for label, p in cases:
        for s in scenarios:
            grid = fixed_grid or bracketing_grid(p, s, args.steps)
            res = brute_force_menu(p, s, grid)
            closed = solve_scenario(p, s)
            report = check_constraints(p, s, closed.menus)
            gap = bureaucrat_objective(p, s, closed.menus, res.phi) - res.objective
            tol = 1e-9 * max(1.0, abs(res.objective))
            ok = report.ok and -tol <= gap <= res.lipschitz_bound and res.within_one_cell(closed.menus)
            failures += not ok
            if args.draws and not args.verbose:
                if not ok:
                    print(f"{label} {s}: FAIL (gap {gap:.6g}, bound {res.lipschitz_bound:.6g})")
                continue
            print(f"== {label}, scenario {s} ==")
            print(report.table())
            print(f"grid: t in [{grid.t_lo:.6g}, {grid.t_hi:.6g}] x {grid.steps_t}, "
                  f"F in [{grid.F_lo:.6g}, {grid.F_hi:.6g}] x {grid.steps_F}")
            for key, b in res.menus.items():
                m = closed.menus[key]
                print(f"  {key:<3} closed form (t={m.t:.6g}, F={m.F:.6g})   grid (t={b.t:.6g}, F={b.F:.6g})")
            print(f"objective gap {gap:.6g} (Lipschitz bound {res.lipschitz_bound:.6g}); "
                  f"argmax within one cell: {'yes' if res.within_one_cell(closed.menus) else 'no'}")
            print(f"oracle check: {'PASS' if ok else 'FAIL'}")
    total = len(cases) * len(scenarios)
    print(f"{total - failures}/{total} checks passed")
    return 0 if failures == 0 else 1


def cmd_simulate(args) -> int:
    cal = _calibration(args)
    path = _out_path(args.out, f"panel_{Scenario.parse(args.scenario)}_{args.seed}.csv")
    panel = generate_panel(cal, args.scenario, seed=args.seed)
    write_csv(panel, path)
    print(f"wrote {len(panel)} rows ({panel.n_firms} firms) to {path}")
    print(f"truncated at zero: bribe {panel.truncated_bribe}, rep_bribe {panel.truncated_rep_bribe}")
    if args.summary:
        print(summarize_panel(panel).to_string(float_format=lambda x: f"{x:.6g}"))
    return 0


def cmd_estimate(args) -> int:
    src = _in_path(args.input)
    panel = read_csv(src)
    spec = RegressionSpec(variant=args.variant, cov_type=args.cov)
    fit = fit_panel(panel, spec)
    report = fit.table()
    print(report)
    stem = args.out or str(_output_dir() / f"{src.stem}_fit")
    txt, csv = _out_path(stem + ".txt", ""), _out_path(stem + ".csv", "")
    txt.write_text(report + "\n", encoding="utf-8")
    fit.write_csv(csv)
    print(f"wrote {txt} and {csv}")
    return 0


def cmd_identify(args) -> int:
    coefs = load_coefficients(_in_path(args.coeffs))
    verdict = classify_scenario(coefs, args.alpha)
    print(verdict.table())
    return 0


def cmd_roundtrip(args) -> int:
    cal = _calibration(args)
    spec = RegressionSpec(variant=args.variant)
    summary = run_roundtrip(cal, args.scenario, args.reps, args.seed, args.alpha, spec, args.jobs)
    print(summary.report())
    if args.out:
        path = _out_path(args.out, "")
        summary.records.to_csv(path, index=False, lineterminator="\n")
        print(f"wrote per-replication results to {path}")
    return 0


# -- parser -------------------------------------------------------------------------------

def _scenario(value: str) -> str:
    try:
        return str(Scenario.parse(value))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bribery", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="closed-form equilibrium for one scenario")
    p.add_argument("--scenario", type=_scenario, default="SC")
    p.add_argument("--params", help="INI file with a [params] section (default: worked example)")
    p.add_argument("--uncertain", action="store_true",
                   help="contest won with probability mu (entry decided by the threshold)")
    p.add_argument("--lost", action="store_true", help="with --uncertain: the entrant lost")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("oracle-check", help="compare closed forms with brute-force grid search")
    p.add_argument("--scenario", default="all", help="NS, SC, SwC or all")
    p.add_argument("--params", help="INI file with [params] and optional [grid]")
    p.add_argument("--steps", type=int, default=200, help="time nodes of the bracketing grid")
    p.add_argument("--draws", type=int, default=0, help="check this many random parameter sets instead")
    p.add_argument("--seed", type=int, default=0, help="seed for --draws")
    p.add_argument("--verbose", action="store_true", help="print full tables for every draw")
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("simulate", help="write a synthetic panel CSV")
    p.add_argument("--scenario", type=_scenario, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--firms", type=int)
    p.add_argument("--config", help="INI file with a [calibration] section")
    p.add_argument("--out", help=f"output CSV (default: ${OUTPUT_ENV} or cwd)")
    p.add_argument("--summary", action="store_true", help="print summary statistics")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("estimate", help="fixed-effects fit of a panel CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--variant", choices=["EM1.1", "EM1.2", "EM1.3"], default="EM1.1")
    p.add_argument("--cov", choices=["CR1", "CR0"], default="CR1")
    p.add_argument("--out", help="output prefix; writes PREFIX.txt and PREFIX.csv")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("identify", help="classify a coefficient table")
    p.add_argument("--coeffs", required=True, help="CSV with columns name, estimate, se")
    p.add_argument("--alpha", type=float, default=0.05)
    p.set_defaults(func=cmd_identify)

    p = sub.add_parser("roundtrip", help="simulate, estimate and classify over many seeds")
    p.add_argument("--scenario", type=_scenario, required=True)
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--firms", type=int)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--alpha", type=float, default=ROUNDTRIP_ALPHA)
    p.add_argument("--variant", choices=["EM1.1", "EM1.2"], default="EM1.1")
    p.add_argument("--config", help="INI file with a [calibration] section")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", help="CSV of per-replication results")
    p.set_defaults(func=cmd_roundtrip)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    where = _PROVENANCE.get(args.command, args.command)
    try:
        return args.func(args)
    except ConfigError as exc:
        code, kind, msg = 2, "config error", exc
    except OSError as exc:
        code, kind, msg = 3, "file error", exc
    except SchemaError as exc:
        code, kind, msg = 4, "input error", exc
    except (BriberyError, ValueError) as exc:
        code, kind, msg = 5, "model error", exc
    print(f"bribery {args.command}: {kind} [{where}]: {msg}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
