"""
tailfit command line: estimate, calibrate, simulate, analyze and goldens.

Option precedence: command-line flags > --config JSON file > TAILFIT_* environment / .env > defaults.
"""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

from src.config.settings import settings
from src.models.schemas import RunConfig
from src.services.commands import run
from src.services.errors import ArgumentError, ConfigurationError, TailFitError
from src.services.goldens import bless, verify_goldens


logger = logging.getLogger("tailfit")

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2

# flag destination -> key inside RunConfig.adaptive
ADAPTIVE_FLAGS = {"rho": "rho", "delta": "delta", "k0": "k0", "k0_frac": "k0_frac", "grid": "grid_length",
                  "z": "critical_value", "mu": "mu"}
RUN_FLAGS = ["input_path", "p_levels", "seed", "output_dir", "n_rep", "n", "workers", "experiment",
             "calibration_file", "level", "include_ecdf", "trace", "k_stride", "k_grid", "gamma", "t_min", "t_max",
             "points", "quiet"]


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, default=None, help="JSON file with RunConfig fields")
    parser.add_argument("--out", dest="output_dir", type=Path, default=None,
                        help=f"Output directory (default: {settings.output_dir})")
    parser.add_argument("--seed", type=int, default=None, help=f"Random seed (default: {settings.seed})")
    parser.add_argument("--workers", type=int, default=None, help="Worker processes (default: CPU count)")
    parser.add_argument("--quiet", action="store_true", default=None, help="Only warnings and errors, no progress bar")
    parser.add_argument("--rho", type=float, default=None, help=f"Lower window fraction (default: {settings.rho})")
    parser.add_argument("--delta", type=float, default=None, help=f"Upper window margin (default: {settings.delta})")
    parser.add_argument("--k0", type=int, default=None, help="Starting grid index (overrides --k0-frac)")
    parser.add_argument("--k0-frac", dest="k0_frac", type=float, default=None,
                        help=f"Starting grid index as a fraction of n (default: {settings.k0_frac})")
    parser.add_argument("--grid", type=int, default=None, help=f"Grid length K_n (default: {settings.grid_length})")
    parser.add_argument("--z", type=float, default=None,
                        help=f"Critical value (default: {settings.critical_value})")
    parser.add_argument("--mu", type=float, default=None, help="Use the critical value mu * log(n)")


def _add_law(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--law", type=str, default=None, help="Built-in law name, e.g. cauchy, loggamma, hall, gpd")
    parser.add_argument("--param", dest="law_params", action="append", default=[], metavar="KEY=VALUE",
                        help="Law parameter, repeatable")


def build_argument_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tailfit", description="Adaptive estimation of heavy distribution tails.")
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="Adaptive tail selection and quantiles on a data file")
    est.add_argument("--input", dest="input_path", type=Path, default=None, help="One observation per line")
    est.add_argument("--p", dest="p_levels", type=float, nargs="+", default=None, help="Quantile levels")
    est.add_argument("--calibration-file", dest="calibration_file", type=Path, default=None,
                     help="Take the critical value from a calibrate result")
    est.add_argument("--trace", choices=["stop", "full"], default=None, help="Trace up to the rejection or the whole grid")
    _add_common(est)

    cal = sub.add_parser("calibrate", help="Monte Carlo critical value under the Pareto null")
    cal.add_argument("--n", type=int, default=None, help="Sample size (default: 1000)")
    cal.add_argument("--reps", dest="n_rep", type=int, default=None, help=f"Replications (default: {settings.n_rep})")
    cal.add_argument("--level", type=float, default=None,
                     help=f"Confidence level (default: {settings.calibration_level})")
    cal.add_argument("--include-ecdf", dest="include_ecdf", action="store_true", default=None,
                     help="Store the simulated maxima")
    _add_common(cal)

    sim = sub.add_parser("simulate", help="Simulation-study experiments")
    sim.add_argument("experiment_name", nargs="?", choices=["table1", "table2", "gamma_rmse"], default=None)
    sim.add_argument("--experiment", choices=["table1", "table2", "gamma_rmse"], default=None)
    sim.add_argument("--n", type=int, default=None, help="Sample size (default: 1000)")
    sim.add_argument("--reps", dest="n_rep", type=int, default=None, help=f"Replications (default: {settings.n_rep})")
    sim.add_argument("--p", dest="p_levels", type=float, nargs="+", default=None, help="Probability levels (table1)")
    sim.add_argument("--k-grid", dest="k_grid", type=int, nargs="+", default=None, help="Values of k (table2)")
    sim.add_argument("--k-stride", dest="k_stride", type=int, default=None, help="Stride of the fixed-k scans")
    sim.add_argument("--gamma", type=float, default=None, help="Index of regular variation (gamma_rmse)")
    _add_law(sim)
    _add_common(sim)

    ana = sub.add_parser("analyze", help="Fitted Pareto index diagnostics of a law")
    ana.add_argument("--t-min", dest="t_min", type=float, default=None)
    ana.add_argument("--t-max", dest="t_max", type=float, default=None)
    ana.add_argument("--points", type=int, default=None)
    ana.add_argument("--n", type=int, default=None, help="Size of the sample behind the Hill overlay (default: 1000)")
    ana.add_argument("--k-stride", dest="k_stride", type=int, default=None, help="Stride of k in the Hill overlay")
    _add_law(ana)
    _add_common(ana)

    gold = sub.add_parser("goldens", help="Record or verify the regression cases")
    gold.add_argument("action", choices=["verify", "bless"])
    gold.add_argument("--cases", type=Path, default=None,
                      help=f"Cases file (default: {settings.goldens_dir / 'cases.json'})")
    gold.add_argument("--quiet", action="store_true", default=None)
    return parser


def parse_overrides(pairs: List[str]) -> Dict[str, float]:
    """
    KEY=VALUE strings to a parameter map

    Raises:
        ArgumentError: Malformed pair or non-numeric value
    """
    params = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep or not key:
            raise ArgumentError(f"expected KEY=VALUE, got '{pair}'")
        try:
            params[key.strip()] = float(value)
        except ValueError as err:
            raise ArgumentError(f"parameter {key} needs a number, got '{value}'") from err
    return params


def _load_config_file(path: Optional[Path]) -> Dict[str, Any]:
    if path is None:
        return {}
    try:
        document = json.loads(Path(path).read_text())
    except OSError as err:
        raise ConfigurationError(f"cannot read config file {path}: {err.strerror}") from err
    except json.JSONDecodeError as err:
        raise ConfigurationError(f"config file {path} is not valid JSON: {err.msg} at line {err.lineno}") from err
    if not isinstance(document, dict):
        raise ConfigurationError(f"config file {path} must hold a JSON object")
    return document


def resolve_run_config(args: argparse.Namespace) -> RunConfig:
    """
    Merge the config file and explicitly given flags into a validated RunConfig

    Raises:
        ConfigurationError: Invalid merged configuration
    """
    merged = _load_config_file(args.config)
    merged["command"] = args.command
    values = vars(args)
    for key in RUN_FLAGS:
        if values.get(key) is not None:
            merged[key] = values[key]
    if values.get("experiment_name") is not None:
        merged["experiment"] = values["experiment_name"]

    adaptive = dict(merged.get("adaptive") or {})
    for flag, key in ADAPTIVE_FLAGS.items():
        if values.get(flag) is not None:
            adaptive[key] = values[flag]
    if values.get("mu") is not None:
        adaptive["critical_value"] = None
    merged["adaptive"] = adaptive

    if values.get("law") is not None or values.get("law_params"):
        law = dict(merged.get("law_spec") or {})
        if values.get("law") is not None and values["law"] != law.get("name"):
            law = {"name": values["law"], "params": {}}
        law["params"] = {**law.get("params", {}), **parse_overrides(values.get("law_params") or [])}
        merged["law_spec"] = law

    try:
        return RunConfig.model_validate(merged)
    except ValidationError as err:
        first = err.errors()[0]
        where = ".".join(str(p) for p in first["loc"])
        raise ConfigurationError(f"invalid configuration{' at ' + where if where else ''}: {first['msg']}") from err


def _configure_logging(quiet: bool) -> None:
    level = logging.WARNING if quiet else getattr(logging, settings.log_level.upper(), logging.INFO)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def _goldens(args: argparse.Namespace) -> int:
    if args.action == "bless":
        cases = bless(args.cases)
        print(f"blessed {len(cases)} golden case(s)")
        return EXIT_OK
    report = verify_goldens(args.cases)
    for outcome in report.outcomes:
        status = "ok" if outcome.passed else "FAIL"
        print(f"{status:4} {outcome.name}{': ' + outcome.detail if outcome.detail else ''}")
    return EXIT_OK if report.passed else EXIT_FAILED


def main(argv: Optional[List[str]] = None) -> int:
    """
    Entry point of the tailfit console script

    Returns:
        int: 0 when every artifact was written, 1 when golden verification fails,
            2 on usage, data or configuration errors
    """
    parser = build_argument_parser()
    args = parser.parse_args(argv)
    _configure_logging(bool(args.quiet))
    try:
        if args.command == "goldens":
            return _goldens(args)
        config = resolve_run_config(args)
        paths = run(config)
    except TailFitError as err:
        print(f"tailfit {args.command}: error: {err}", file=sys.stderr)
        return EXIT_USAGE
    for path in paths:
        logger.info("wrote %s", path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
