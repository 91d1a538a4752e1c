"""
linesearch command-line interface

Evaluate competitive ratios, run the exact oracle and Monte Carlo checks, tune the hybrid
strategy, emit heatmap grids and run the built-in verification suite.
"""

import argparse
import math
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import orjson
from rich.console import Console
from rich.table import Table

from linesearch.config import settings
from linesearch.core.exceptions import ConfigurationError, LineSearchError, exit_code_for, handle_generic_exception, handle_linesearch_exception
from linesearch.core.logging import get_logger, setup_logging
from linesearch.core.parallel import resolve_jobs
from linesearch.models import SearchParams, StrategyKind, StrategySpec, validate_params
from linesearch.schemas import HeatmapQuantity
from linesearch.services import heatmap_io, lowerbound, oracle, strategies, tuner, verification

console = Console()
error_console = Console(stderr=True)
logger = get_logger(__name__)


def emit(args: argparse.Namespace, payload: Dict[str, Any], title: str) -> None:
    """Print a report as sorted JSON or as a two-column table."""
    if args.format == "json":
        data = orjson.dumps(heatmap_io.encode_nonfinite(payload), option=orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2)
        sys.stdout.write(data.decode("utf-8") + "\n")
        return
    table = Table(title=title)
    table.add_column("Field", style="cyan")
    table.add_column("Value", style="green")
    for key, value in payload.items():
        table.add_row(key, _display(value))
    console.print(table)


def _display(value: Any) -> str:
    if isinstance(value, float):
        return heatmap_io.format_float(value) if math.isinf(value) else f"{value:.12g}"
    if isinstance(value, (list, tuple)):
        return ", ".join(_display(item) for item in value)
    return str(value)


def _require(args: argparse.Namespace, name: str, command: str) -> float:
    value = getattr(args, name)
    if value is None:
        raise ConfigurationError(name, f"--{name} is required for {command}")
    return float(value)


def _strategy(args: argparse.Namespace, p: float, v: float) -> StrategySpec:
    """The strategy named on the command line; --a/--b override the published parameters."""
    kind = StrategyKind(args.algorithm)
    if args.a is not None:
        return StrategySpec(kind=kind, a=args.a, b=args.b if args.b is not None and kind is StrategyKind.HYBRID else 0.0)
    if kind is StrategyKind.HYBRID and args.b == 0.0:
        return StrategySpec(kind=kind, a=strategies.slow_ratio(v), b=0.0)
    spec = tuner.published_spec(kind, p, v)
    if kind is StrategyKind.HYBRID and args.b is not None:
        return StrategySpec(kind=kind, a=spec.a, b=args.b)
    return spec


def _environment(args: argparse.Namespace) -> SearchParams:
    p = 0.0 if args.p is None else args.p
    v = 1.0 if args.v is None else args.v
    return SearchParams(p=p, v=v)


def _published_cr(spec: StrategySpec, params: SearchParams) -> float:
    if spec.kind is StrategyKind.FAST:
        return strategies.fast_cr_general(params.p, spec.a).value
    if spec.kind is StrategyKind.SLOW:
        return strategies.slow_cr_general(params.v, spec.a).value
    return strategies.hybrid_cr(spec.a, spec.b, params.p, params.v).value


def cmd_cr(args: argparse.Namespace) -> int:
    """Closed-form competitive ratios."""
    if args.algorithm == "compare":
        p, v = _require(args, "p", "compare"), _require(args, "v", "compare")
        report = tuner.compare_strategies(p, v)
        report["recommended"] = tuner.recommend_strategy(p, v, printed=args.printed_threshold).value
        emit(args, report, "Strategy comparison")
        return 0

    if args.algorithm == "fast":
        p = _require(args, "p", "the fast algorithm")
        if args.a is None:
            a, result = (strategies.fast_ratio(p) if p > 0.0 else math.inf), strategies.fast_cr(p)
        else:
            a, result = args.a, strategies.fast_cr_general(p, args.a)
        emit(args, {"algorithm": "fast", "p": p, "a": a, "cr": result.value, "formula_id": result.formula_id}, "Fast approach")
        return 0

    if args.algorithm == "slow":
        v = _require(args, "v", "the slow algorithm")
        a = strategies.slow_ratio(v) if args.a is None else args.a
        result = strategies.slow_cr(v) if args.a is None else strategies.slow_cr_general(v, a)
        emit(args, {"algorithm": "slow", "v": v, "a": a, "cr": result.value, "formula_id": result.formula_id}, "Slow approach")
        return 0

    p, v = _require(args, "p", "the hybrid algorithm"), _require(args, "v", "the hybrid algorithm")
    spec = _strategy(args, p, v)
    cr1 = strategies.hybrid_cr1(spec.a, spec.b, v).value
    cr2 = strategies.hybrid_cr2(spec.a, spec.b, p, v).value
    result = strategies.hybrid_cr(spec.a, spec.b, p, v)
    report = {"algorithm": "hybrid", "p": p, "v": v, "a": spec.a, "b": spec.b, "cr": result.value, "cr1": cr1, "cr2": cr2, "binding": result.formula_id}
    emit(args, report, "Hybrid approach")
    return 0


def cmd_oracle(args: argparse.Namespace) -> int:
    """Exact expected CR at a target, or the worst case over targets."""
    params = _environment(args)
    spec = _strategy(args, params.p, params.v)
    validate_params(params, spec)
    trajectory = strategies.build_trajectory(params, spec)
    report: Dict[str, Any] = {"algorithm": spec.kind.value, "p": params.p, "v": params.v, "a": spec.a, "b": spec.b}

    if args.sup:
        result = oracle.sup_cr(trajectory, rounds=args.rounds, samples_per_round=args.samples_per_round, tol=args.tol)
        closed = _published_cr(spec, params)
        report.update(
            {
                "rounds": args.rounds,
                "sup_cr": result.sup_cr,
                "argmax_d": result.argmax_d,
                "argmax_round": result.argmax_round,
                "closed_form_cr": closed,
                "delta": result.sup_cr - closed,
                "relative_delta": (result.sup_cr - closed) / closed if math.isfinite(closed) else math.nan,
            }
        )
        emit(args, report, "Worst-case search")
        return 0

    d = _require(args, "d", "oracle without --sup")
    distribution = oracle.detection_distribution(trajectory, d, tol=args.tol)
    report.update(
        {
            "d": d,
            "expected_time": distribution.expectation,
            "expected_cr": distribution.expectation / abs(d),
            "tail_bound": distribution.tail_bound,
            "passes": len(distribution.passes),
            "absorbed": distribution.absorbed,
        }
    )
    if args.show_rounds:
        report["round_time_discrepancy"] = oracle.round_time_discrepancy(trajectory)
    emit(args, report, "Exact oracle")
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    """Monte Carlo estimate against the exact oracle; fails when |z| > 5."""
    if args.trials < 1:
        raise ConfigurationError("trials", f"must be >= 1, got {args.trials}")
    params = _environment(args)
    spec = _strategy(args, params.p, params.v)
    validate_params(params, spec)
    trajectory = strategies.build_trajectory(params, spec)
    d = _require(args, "d", "simulate")

    exact = oracle.expected_detection_time(trajectory, d).value
    result = oracle.simulate_detection(trajectory, d, trials=args.trials, seed=args.seed, jobs=resolve_jobs(args.jobs))
    if result.standard_error > 0.0:
        z = (result.mean - exact) / result.standard_error
    else:
        z = 0.0 if math.isclose(result.mean, exact, rel_tol=1e-12) else math.inf
    report = {
        "algorithm": spec.kind.value,
        "p": params.p,
        "v": params.v,
        "a": spec.a,
        "b": spec.b,
        "d": d,
        "trials": result.trials,
        "seed": result.seed,
        "mean": result.mean,
        "standard_error": result.standard_error,
        "exact": exact,
        "z": z,
    }
    emit(args, report, "Monte Carlo")
    return 1 if abs(z) > 5.0 else 0


def _budget(args: argparse.Namespace) -> tuner.OptimizerBudget:
    return tuner.OptimizerBudget(
        coarse_grid=args.coarse_grid or settings.coarse_grid,
        refine_iterations=args.refine_iterations or settings.refine_iterations,
    )


def cmd_optimize(args: argparse.Namespace) -> int:
    """Tune the hybrid (a, b) for one (p, v)."""
    p, v = _require(args, "p", "optimize"), _require(args, "v", "optimize")
    tuned = tuner.optimize_hybrid(p, v, _budget(args))
    report = tuned.model_dump()
    if args.restarts:
        report["restart_crs"] = [t.cr_star for t in tuner.optimize_hybrid_restarts(p, v, args.restarts, _budget(args))]
    emit(args, report, "Tuned hybrid")
    return 0


def cmd_heatmap(args: argparse.Namespace) -> int:
    """Compute a (p, v) grid and write it as CSV and/or JSON."""
    grid = tuner.build_heatmap(
        HeatmapQuantity(args.quantity),
        args.grid,
        p_range=tuple(args.p_range),
        v_range=tuple(args.v_range),
        budget=_budget(args),
        jobs=resolve_jobs(args.jobs),
        seed=args.seed,
    )
    formats = ["csv", "json"] if args.file_format == "both" else [args.file_format]
    if args.output is None:
        for file_format in formats:
            text = heatmap_io.grid_to_csv(grid) if file_format == "csv" else heatmap_io.grid_to_json(grid).decode("utf-8")
            sys.stdout.write(text)
        return 0

    written = []
    for file_format in formats:
        path = Path(args.output)
        if len(formats) > 1:
            path = path.with_suffix(f".{file_format}")
        written.append(str(heatmap_io.write_grid(grid, path, file_format)))
    finite = [value for row in grid.values for value in row if math.isfinite(value)]
    report = {
        "quantity": grid.quantity.value,
        "grid": args.grid,
        "files": written,
        "min": min(finite) if finite else math.nan,
        "max": max(finite) if finite else math.nan,
    }
    emit(args, report, "Heatmap")
    return 0


def cmd_lower_bound(args: argparse.Namespace) -> int:
    """p = 0 lower bound: value at a given beta, the optimal beta, or a scan over beta."""
    v = _require(args, "v", "lower-bound")
    beta_star, cr_star = lowerbound.optimal_beta(v)
    report: Dict[str, Any] = {"v": v, "beta_star": beta_star, "cr_star": cr_star, "slow_cr": strategies.slow_cr(v).value}
    if args.beta is not None:
        solution = lowerbound.recurrence_solution(v, args.beta, args.terms)
        report.update(
            {
                "beta": args.beta,
                "cr": lowerbound.lower_bound_cr(v, args.beta).value,
                "x": solution.x,
                "t": solution.t,
                "finite_round_cr": lowerbound.lower_bound_cr_sequence(v, args.beta, args.terms),
            }
        )
    if args.scan:
        scan = lowerbound.scan_beta(v, args.scan)
        report["scan_beta"] = [beta for beta, _ in scan]
        report["scan_cr"] = [cr for _, cr in scan]
        report["unimodal"] = lowerbound.is_unimodal(report["scan_cr"])
    emit(args, report, "Lower bound (p = 0)")
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    """Run the acceptance checks; the exit status is the number of failures."""
    results = verification.run_checks(args.only)
    failures = sum(not result.passed for result in results)
    if args.json or args.format == "json":
        payload = {"failures": failures, "checks": [result.model_dump() for result in results]}
        sys.stdout.write(orjson.dumps(payload, option=orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2).decode("utf-8") + "\n")
        return failures

    table = Table(title="Verification")
    for column in ("Group", "Check", "Expected", "Actual", "Tolerance", "Status"):
        table.add_column(column)
    for result in results:
        status = "[green]PASS[/green]" if result.passed else "[red]FAIL[/red]"
        table.add_row(result.group, result.name, result.expected, result.actual, result.tolerance, status)
    console.print(table)
    console.print(f"{len(results) - failures} passed, {failures} failed")
    return failures


def _add_strategy_flags(parser: argparse.ArgumentParser, algorithms: Sequence[str]) -> None:
    parser.add_argument("--algorithm", choices=list(algorithms), required=True, help="Search strategy")
    parser.add_argument("--p", type=float, help="Detection probability per fast pass")
    parser.add_argument("--v", type=float, help="Slow speed as a fraction of the fast speed")
    parser.add_argument("--a", type=float, help="Expansion ratio (default: published value)")
    parser.add_argument("--b", type=float, help="Scout-ahead ratio, hybrid only (default: tuned value)")


def _add_budget_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--coarse-grid", type=int, help=f"Coarse grid points per axis (default: {settings.coarse_grid})")
    parser.add_argument("--refine-iterations", type=int, help=f"Local refinement iterations (default: {settings.refine_iterations})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="linesearch",
        description="Linear search with probabilistic detection: ratios, oracle, tuning and heatmaps",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  linesearch cr --algorithm fast --p 1
  linesearch oracle --algorithm slow --v 0.5 --d -0.9
  linesearch simulate --algorithm fast --p 0.5 --d 1.7 --trials 100000 --seed 42
  linesearch optimize --p 0.5 --v 0.5
  linesearch heatmap --quantity improvement --grid 20 --output improvement.csv
  linesearch lower-bound --v 0.5 --scan 32
  linesearch verify --only lowerbound
        """,
    )
    parser.add_argument("--log-level", help="Log level (default: from settings)")
    parser.add_argument("--jobs", type=int, help="Worker processes (default: LINESEARCH_JOBS or 1)")
    parser.add_argument("--format", choices=["table", "json"], default="table", help="Report format (default: table)")
    parser.add_argument("--version", action="version", version=f"{settings.app_name} {settings.app_version}")

    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    cr_parser = subparsers.add_parser("cr", help="Closed-form competitive ratios")
    _add_strategy_flags(cr_parser, ["fast", "slow", "hybrid", "compare"])
    cr_parser.add_argument(
        "--printed-threshold",
        "--paper-formula",
        dest="printed_threshold",
        action="store_true",
        help="Recommend with the printed (looser) fast/slow threshold",
    )
    cr_parser.set_defaults(func=cmd_cr)

    oracle_parser = subparsers.add_parser("oracle", help="Exact expected competitive ratio")
    _add_strategy_flags(oracle_parser, ["fast", "slow", "hybrid"])
    oracle_parser.add_argument("--d", type=float, help="Signed target position")
    oracle_parser.add_argument("--sup", action="store_true", help="Search the worst case over targets")
    oracle_parser.add_argument("--rounds", type=int, default=40, help="Largest round index searched (default: 40)")
    oracle_parser.add_argument("--samples-per-round", type=int, help=f"Interior samples per round (default: {settings.samples_per_round})")
    oracle_parser.add_argument("--tol", type=float, help=f"Relative tail tolerance (default: {settings.expectation_tol:g})")
    oracle_parser.add_argument("--show-rounds", action="store_true", help="Report literal vs simplified durations of rounds 0 and 1")
    oracle_parser.set_defaults(func=cmd_oracle)

    simulate_parser = subparsers.add_parser("simulate", help="Monte Carlo detection time")
    _add_strategy_flags(simulate_parser, ["fast", "slow", "hybrid"])
    simulate_parser.add_argument("--d", type=float, help="Signed target position")
    simulate_parser.add_argument("--trials", type=int, default=100_000, help="Number of trials (default: 100000)")
    simulate_parser.add_argument("--seed", type=int, default=0, help="Random seed (default: 0)")
    simulate_parser.set_defaults(func=cmd_simulate)

    optimize_parser = subparsers.add_parser("optimize", help="Tune the hybrid parameters")
    optimize_parser.add_argument("--p", type=float, help="Detection probability per fast pass")
    optimize_parser.add_argument("--v", type=float, help="Slow speed")
    optimize_parser.add_argument("--restarts", type=int, default=0, help="Also refine from this many coarse-grid seeds")
    _add_budget_flags(optimize_parser)
    optimize_parser.set_defaults(func=cmd_optimize)

    heatmap_parser = subparsers.add_parser("heatmap", help="Emit a (p, v) grid")
    heatmap_parser.add_argument("--quantity", choices=[q.value for q in HeatmapQuantity], required=True, help="Cell quantity")
    heatmap_parser.add_argument("--grid", type=int, default=20, help="Points per axis (default: 20)")
    heatmap_parser.add_argument("--p-range", type=float, nargs=2, default=[0.05, 1.0], metavar=("LOW", "HIGH"), help="p axis range")
    heatmap_parser.add_argument("--v-range", type=float, nargs=2, default=[0.05, 1.0], metavar=("LOW", "HIGH"), help="v axis range")
    heatmap_parser.add_argument("--output", "-o", help="Output file (default: stdout)")
    heatmap_parser.add_argument("--format", dest="file_format", choices=["csv", "json", "both"], default="csv", help="File format (default: csv)")
    heatmap_parser.add_argument("--seed", type=int, default=0, help="Seed recorded in the grid metadata (default: 0)")
    _add_budget_flags(heatmap_parser)
    heatmap_parser.set_defaults(func=cmd_heatmap)

    lower_parser = subparsers.add_parser("lower-bound", help="Lower bound for p = 0")
    lower_parser.add_argument("--v", type=float, help="Slow speed")
    lower_parser.add_argument("--beta", type=float, help="Exploration rate to evaluate")
    lower_parser.add_argument("--terms", type=int, default=10, help="Recurrence terms to report with --beta (default: 10)")
    lower_parser.add_argument("--scan", type=int, nargs="?", const=64, default=0, help="Scan this many beta values (default when given: 64)")
    lower_parser.set_defaults(func=cmd_lower_bound)

    verify_parser = subparsers.add_parser("verify", help="Run the acceptance checks")
    verify_parser.add_argument("--only", nargs="+", choices=list(verification.CHECK_GROUPS), help="Check groups to run")
    verify_parser.add_argument("--json", action="store_true", help="Machine-readable results")
    verify_parser.set_defaults(func=cmd_verify)

    return parser


def run(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, dispatch, and map errors to exit codes."""
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(level=args.log_level)

    if not args.command:
        parser.print_help()
        return 2

    try:
        return int(args.func(args))
    except LineSearchError as exc:
        payload = handle_linesearch_exception(exc)
        sys.stderr.write(orjson.dumps(payload, option=orjson.OPT_SORT_KEYS).decode("utf-8") + "\n")
        return exit_code_for(exc)
    except KeyboardInterrupt:
        error_console.print("\n[yellow]Operation cancelled by user[/yellow]")
        return 130
    except Exception as exc:
        payload = handle_generic_exception(exc)
        sys.stderr.write(orjson.dumps(payload, option=orjson.OPT_SORT_KEYS).decode("utf-8") + "\n")
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
