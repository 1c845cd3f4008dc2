"""Command-line interface.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 regime-constraint violation.  Failures print a machine-readable error
JSON to stdout.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import (
    ConfigError,
    IntegrationDivergenceError,
    RegimeError,
    SimulationError,
    SteadyStateError,
)
from .scenarios import SCENARIOS, parse_config, resolve_params, run_scenario

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_REGIME = 4


def _load_scenario(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    return parse_config(text)


def _error_json(exc: Exception, code: int) -> str:
    payload = {
        "error": {
            "type": type(exc).__name__,
            "message": str(exc),
        },
        "exit_code": code,
    }
    if isinstance(exc, ConfigError) and exc.path:
        payload["error"]["path"] = list(exc.path)
    return json.dumps(payload, sort_keys=True)


def _classify(exc: Exception) -> int:
    if isinstance(exc, ConfigError):
        return EXIT_CONFIG
    if isinstance(exc, RegimeError):
        return EXIT_REGIME
    if isinstance(exc, (IntegrationDivergenceError, SteadyStateError)):
        return EXIT_NUMERICAL
    if isinstance(exc, SimulationError):
        return EXIT_NUMERICAL
    raise exc


def cmd_run(args) -> int:
    sc = _load_scenario(args.config)
    result = run_scenario(sc, out_dir=args.out, workers=args.workers, verbose=args.verbose)
    print(json.dumps({"scenario": sc.name, "out_dir": str(result.out_dir)}, sort_keys=True))
    return EXIT_OK


def cmd_validate(args) -> int:
    sc = _load_scenario(args.config)
    report = {"valid": True, "scenario": sc.name}
    if sc.name != "sweep":
        from . import model

        p = resolve_params(sc)
        branch = "memory" if sc.name == "memory" else "nonadiabatic"
        if sc.name == "effective-check":
            branch = sc.options.get("branch", "nonadiabatic")
        regime = model.check_regime(p, branch)
        report["regime_ok"] = regime.ok
        report["ratios"] = regime.ratios
        report["residuals"] = {k: res for k, (ok, res) in regime.checks.items()}
        if not regime.ok:
            print(json.dumps(report, sort_keys=True))
            raise RegimeError(regime, "resolved parameters violate the branch constraints")
    print(json.dumps(report, sort_keys=True))
    return EXIT_OK


def cmd_list_scenarios(_args) -> int:
    for name, description in SCENARIOS.items():
        print(f"{name:20s} {description}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reslab",
        description="Engineered-reservoir simulations for a driven ion-cavity system.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute a scenario config and write outputs")
    run_p.add_argument("config", help="path to a JSON scenario config")
    run_p.add_argument("--out", default="runs", help="output directory (default: runs)")
    run_p.add_argument("--workers", type=int, default=1, help="parallel sweep workers")
    run_p.add_argument("--verbose", action="store_true", help="print derived quantities")
    run_p.set_defaults(func=cmd_run)

    val_p = sub.add_parser("validate", help="parse a config and check regime constraints")
    val_p.add_argument("config", help="path to a JSON scenario config")
    val_p.set_defaults(func=cmd_validate)

    list_p = sub.add_parser("list-scenarios", help="list available scenarios")
    list_p.set_defaults(func=cmd_list_scenarios)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - mapped to exit codes below
        code = _classify(exc)
        print(_error_json(exc, code))
        return code


if __name__ == "__main__":
    sys.exit(main())
